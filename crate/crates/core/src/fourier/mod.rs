//! Fourier indices, representation numbers and truncated theta expansions.

mod engine;
mod expansion;
mod index;
pub mod reduce;

pub use engine::{
    representation_count, representation_count_direct, theta_expansion, Engine, EngineConfig,
};
pub use expansion::{expansion_sub, Expansion};
pub use index::{enumerate_indices, unimodular_transform, FourierIndex};
