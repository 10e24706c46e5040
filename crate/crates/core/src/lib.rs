//! Siegel theta series of even unimodular lattices and the operators that
//! connect modular forms across genera.
//!
//! The crate is organised bottom-up:
//!
//! * [`qforms`]: exact Gram matrices of E8, E8⊕E8 and D16+ with verification.
//! * [`enumeration`]: lattice vectors of a given norm (Fincke–Pohst with an
//!   exact rational bound profile and exact acceptance).
//! * [`fourier`]: Fourier indices, representation numbers r(T, Q) and
//!   truncated theta expansions, plus the plain-text cache format.
//! * [`siegel`]: the Siegel Φ-operator on expansions, stable families, the
//!   Igusa form and the Schottky witness search.
//! * [`symplectic`]: numeric Sp(2n, ℝ) action, automorphy factors and the
//!   lift/descent/limit operators between ℍ_n and the group.
//! * [`grenier`]: the SL(n) symmetric space, its partial Iwasawa
//!   decomposition and the Grenier operator on power functions.
//!
//! Data-parallel loops go through [`par`]; with the `parallel` feature
//! disabled every loop runs sequentially.

pub mod enumeration;
pub mod error;
pub mod exact;
pub mod fourier;
pub mod grenier;
pub mod par;
pub mod qforms;
pub mod siegel;
pub mod symplectic;

pub use error::{Error, Result};
pub use fourier::{Engine, EngineConfig, Expansion, FourierIndex};
pub use par::Execution;
pub use qforms::QuadraticForm;
