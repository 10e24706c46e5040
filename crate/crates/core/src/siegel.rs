//! The Siegel Φ-operator on truncated expansions, stable families of theta
//! series, the Igusa form `θ_{E8⊕E8} − θ_{D16+}` and the search for its first
//! nonzero coefficient in genus 4.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::Rational64;
use num_traits::Zero;

use crate::fourier::{enumerate_indices, expansion_sub, Engine, Expansion, FourierIndex};
use crate::par;
use crate::qforms::{make_d16_plus, make_e8e8, QuadraticForm};
use crate::{Error, Result};

/// `a′(T′) = a(T′ ⊕ 0)` for every genus-`(n−1)` index within the bound.
///
/// Only indices whose last row and column vanish survive the limit
/// `Y_nn → ∞`; positive semidefiniteness forces the whole last row to vanish
/// once the corner does.
pub fn siegel_phi(a: &Expansion) -> Result<Expansion> {
    if a.genus() == 0 {
        return Err(Error::InvalidGenus("the Siegel operator needs genus ≥ 1".into()));
    }
    let coeffs: BTreeMap<FourierIndex, BigInt> = enumerate_indices(a.genus() - 1, a.trace_bound())
        .into_iter()
        .map(|t| {
            let c = a.coefficient(&t.pad_zero());
            (t, c)
        })
        .collect();
    Expansion::new(a.genus() - 1, a.weight(), a.trace_bound(), a.label(), coeffs)
}

/// `Φ_{m,n} = Φ_{m,m+1} ∘ ⋯ ∘ Φ_{n−1,n}`.
pub fn siegel_phi_to(a: &Expansion, target_genus: usize) -> Result<Expansion> {
    if target_genus > a.genus() {
        return Err(Error::InvalidGenus(format!(
            "cannot lower genus {} to {target_genus}",
            a.genus()
        )));
    }
    let mut cur = a.clone();
    while cur.genus() > target_genus {
        cur = siegel_phi(&cur)?;
    }
    Ok(cur)
}

/// Expansions of genus `0..=N` linked by `Φ(f_n) = f_{n−1}`.
#[derive(Clone, Debug)]
pub struct StableFamily {
    members: Vec<Expansion>,
}

impl StableFamily {
    /// Accepts the members only if they form a coherent family.
    pub fn new(members: Vec<Expansion>) -> Result<Self> {
        if members.is_empty() {
            return Err(Error::InvalidGenus("a family needs at least genus 0".into()));
        }
        let report = check_stability(&members)?;
        if members[0].genus() != 0 {
            return Err(Error::InvalidGenus("a family starts at genus 0".into()));
        }
        if !report.is_stable() {
            return Err(Error::Incompatible(report.to_string()));
        }
        Ok(Self { members })
    }

    pub fn max_genus(&self) -> usize {
        self.members.len() - 1
    }

    pub fn weight(&self) -> Rational64 {
        self.members[0].weight()
    }

    pub fn trace_bound(&self) -> i64 {
        self.members[0].trace_bound()
    }

    pub fn member(&self, genus: usize) -> Option<&Expansion> {
        self.members.get(genus)
    }

    pub fn members(&self) -> &[Expansion] {
        &self.members
    }
}

/// `(θ_{Q,n})_{0 ≤ n ≤ N}` truncated at `trace_bound`.
pub fn theta_stable_family(q: &QuadraticForm, max_genus: usize, trace_bound: i64) -> Result<StableFamily> {
    theta_stable_family_with(Engine::global(), q, max_genus, trace_bound)
}

pub fn theta_stable_family_with(
    engine: &Engine,
    q: &QuadraticForm,
    max_genus: usize,
    trace_bound: i64,
) -> Result<StableFamily> {
    let members = (0..=max_genus)
        .map(|n| engine.theta_expansion(q, n, trace_bound))
        .collect::<Result<Vec<_>>>()?;
    StableFamily::new(members)
}

/// Φ-coherence failures for one adjacent pair of genera.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PairReport {
    pub lower_genus: usize,
    /// Indices `T′` with `f_{n}(T′ ⊕ 0) ≠ f_{n−1}(T′)`.
    pub failures: Vec<FourierIndex>,
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct StabilityReport {
    pub pairs: Vec<PairReport>,
}

impl StabilityReport {
    pub fn is_stable(&self) -> bool {
        self.pairs.iter().all(|p| p.failures.is_empty())
    }

    pub fn failure_count(&self) -> usize {
        self.pairs.iter().map(|p| p.failures.len()).sum()
    }
}

impl fmt::Display for StabilityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.pairs.is_empty() {
            return writeln!(f, "single expansion: vacuously stable");
        }
        for p in &self.pairs {
            let (lo, hi) = (p.lower_genus, p.lower_genus + 1);
            if p.failures.is_empty() {
                writeln!(f, "genus {hi} -> {lo}: coherent")?;
            } else {
                let list: Vec<String> = p.failures.iter().map(|t| t.to_string()).collect();
                writeln!(f, "genus {hi} -> {lo}: {} failure(s) at {}", p.failures.len(), list.join(" "))?;
            }
        }
        Ok(())
    }
}

/// Compares `Φ(f_{n})` with `f_{n−1}` for every adjacent pair.
///
/// The expansions must have consecutive genera and share weight and trace
/// bound.
pub fn check_stability(family: &[Expansion]) -> Result<StabilityReport> {
    let mut pairs = Vec::new();
    for w in family.windows(2) {
        let (lo, hi) = (&w[0], &w[1]);
        if hi.genus() != lo.genus() + 1 {
            return Err(Error::InvalidGenus(format!(
                "genera {} and {} are not consecutive",
                lo.genus(),
                hi.genus()
            )));
        }
        if hi.weight() != lo.weight() || hi.trace_bound() != lo.trace_bound() {
            return Err(Error::Incompatible(format!(
                "weight/bound {}/{} vs {}/{}",
                lo.weight(),
                lo.trace_bound(),
                hi.weight(),
                hi.trace_bound()
            )));
        }
        let failures = enumerate_indices(lo.genus(), lo.trace_bound())
            .into_iter()
            .filter(|t| hi.coefficient(&t.pad_zero()) != lo.coefficient(t))
            .collect();
        pairs.push(PairReport {
            lower_genus: lo.genus(),
            failures,
        });
    }
    Ok(StabilityReport { pairs })
}

/// `φ_n = θ_{E8⊕E8,n} − θ_{D16+,n}`, weight 8.
pub fn igusa_form(genus: usize, trace_bound: i64) -> Result<Expansion> {
    igusa_form_with(Engine::global(), genus, trace_bound)
}

pub fn igusa_form_with(engine: &Engine, genus: usize, trace_bound: i64) -> Result<Expansion> {
    let a = engine.theta_expansion(&make_e8e8(), genus, trace_bound)?;
    let b = engine.theta_expansion(&make_d16_plus(), genus, trace_bound)?;
    expansion_sub(&a, &b)
}

/// Singular indices carrying a nonzero coefficient.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CuspReport {
    pub singular_checked: usize,
    pub violations: Vec<(FourierIndex, BigInt)>,
}

impl CuspReport {
    pub fn is_cusp(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for CuspReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_cusp() {
            write!(
                f,
                "singular coefficients all zero ({} singular indices checked)",
                self.singular_checked
            )
        } else {
            write!(f, "{} nonzero singular coefficient(s):", self.violations.len())?;
            for (t, c) in self.violations.iter().take(10) {
                write!(f, " {t}->{c}")?;
            }
            Ok(())
        }
    }
}

/// Checks that every coefficient at a singular index vanishes, the
/// boundary condition a cusp form satisfies.
pub fn cusp_surrogate_check(a: &Expansion) -> CuspReport {
    let mut singular_checked = 0;
    let mut violations = Vec::new();
    for (t, c) in a.coefficients() {
        if t.is_singular() {
            singular_checked += 1;
            if !c.is_zero() {
                violations.push((t.clone(), c.clone()));
            }
        }
    }
    CuspReport {
        singular_checked,
        violations,
    }
}

/// Genus-4 indices with diagonal `(2, 2, 2, 2)`, in graded order.
pub fn schottky_candidates() -> Vec<FourierIndex> {
    let mut out = Vec::new();
    let mut upper = [2, 0, 0, 0, 2, 0, 0, 2, 0, 2];
    let off = [1usize, 2, 3, 5, 6, 8];
    for code in 0..5usize.pow(6) {
        let mut c = code;
        for &p in &off {
            upper[p] = (c % 5) as i64 - 2;
            c /= 5;
        }
        if let Ok(t) = FourierIndex::from_upper(4, &upper) {
            out.push(t);
        }
    }
    out.sort();
    out
}

/// The first genus-4 index with diagonal `(2,2,2,2)` at which the Igusa form
/// has a nonzero coefficient, with that coefficient. `None` when
/// `trace_bound < 8` or when no candidate differs.
pub fn schottky_witness(trace_bound: i64) -> Result<Option<(FourierIndex, BigInt)>> {
    schottky_witness_with(Engine::global(), trace_bound)
}

pub fn schottky_witness_with(engine: &Engine, trace_bound: i64) -> Result<Option<(FourierIndex, BigInt)>> {
    if trace_bound < 8 {
        return Ok(None);
    }
    let e8e8 = make_e8e8();
    let d16 = make_d16_plus();
    let candidates = schottky_candidates();
    for chunk in candidates.chunks(32) {
        let diffs = par::try_map(engine.config().execution, chunk, |t| -> Result<BigInt> {
            Ok(engine.representation_count(&e8e8, t)? - engine.representation_count(&d16, t)?)
        })?;
        if let Some((t, d)) = chunk.iter().zip(diffs).find(|(_, d)| !d.is_zero()) {
            return Ok(Some((t.clone(), d)));
        }
    }
    Ok(None)
}
