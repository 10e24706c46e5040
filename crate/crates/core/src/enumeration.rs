//! Lattice vectors of prescribed norm.
//!
//! Enumeration follows Fincke–Pohst: the Gram matrix is brought into the
//! completed-square form `Q(x) = Σ q_i (x_i + Σ_{j>i} μ_ij x_j)²` using exact
//! rational arithmetic, the profile `(q_i, μ_ij)` is rounded to `f64` only to
//! drive the coordinate bounds, the search radius is inflated to absorb that
//! rounding, and every leaf is accepted or rejected on its exact integer norm.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use crate::par::{self, Budget, Execution};
use crate::qforms::QuadraticForm;
use crate::{Error, Result};

/// All lattice vectors of one norm, sorted lexicographically.
///
/// Coordinates are stored flat (`rank` entries per vector) as `i16`; shell
/// construction fails if a coordinate would not fit.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NormShell {
    label: String,
    norm: i64,
    rank: usize,
    coords: Vec<i16>,
}

impl NormShell {
    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn norm(&self) -> i64 {
        self.norm
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn len(&self) -> usize {
        self.coords.len().checked_div(self.rank).unwrap_or(0)
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    /// Raw coordinates of the `i`-th vector.
    pub fn row(&self, i: usize) -> &[i16] {
        &self.coords[i * self.rank..(i + 1) * self.rank]
    }

    pub fn vector(&self, i: usize) -> Vec<i64> {
        self.row(i).iter().map(|&c| c as i64).collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = Vec<i64>> + '_ {
        (0..self.len()).map(|i| self.vector(i))
    }

    /// Position of `v` in the shell.
    pub fn position(&self, v: &[i64]) -> Option<usize> {
        let key: Vec<i16> = v.iter().map(|&c| i16::try_from(c).ok()).collect::<Option<_>>()?;
        let mut lo = 0usize;
        let mut hi = self.len();
        while lo < hi {
            let mid = (lo + hi) / 2;
            match self.row(mid).cmp(&key[..]) {
                std::cmp::Ordering::Less => lo = mid + 1,
                std::cmp::Ordering::Greater => hi = mid,
                std::cmp::Ordering::Equal => return Some(mid),
            }
        }
        None
    }
}

/// Completed-square profile of a positive definite Gram matrix.
#[derive(Clone, Debug)]
pub struct BoundProfile {
    n: usize,
    q: Vec<f64>,
    mu: Vec<f64>,
}

impl BoundProfile {
    pub fn new(form: &QuadraticForm) -> Result<Self> {
        let n = form.rank();
        let mut a: Vec<BigRational> = form
            .gram()
            .iter()
            .map(|&v| BigRational::from_integer(BigInt::from(v)))
            .collect();
        for i in 0..n {
            if a[i * n + i] <= BigRational::zero() {
                return Err(Error::InvalidForm(format!(
                    "{} is not positive definite",
                    form.label()
                )));
            }
            for j in i + 1..n {
                a[j * n + i] = a[i * n + j].clone();
                a[i * n + j] = &a[i * n + j] / &a[i * n + i];
            }
            for k in i + 1..n {
                for l in k..n {
                    let delta = &a[k * n + i] * &a[i * n + l];
                    a[k * n + l] -= delta;
                }
            }
        }
        let to_f64 = |r: &BigRational| r.to_f64().unwrap_or(f64::NAN);
        let q = (0..n).map(|i| to_f64(&a[i * n + i])).collect();
        let mut mu = vec![0.0; n * n];
        for i in 0..n {
            for j in i + 1..n {
                mu[i * n + j] = to_f64(&a[i * n + j]);
            }
        }
        Ok(Self { n, q, mu })
    }
}

struct Search<'a> {
    form: &'a QuadraticForm,
    profile: &'a BoundProfile,
    target: i64,
    radius: f64,
    x: Vec<i64>,
    nodes: u64,
}

impl Search<'_> {
    /// Depth-first search over coordinates `level, level-1, …, 0`, given the
    /// float partial sum and the exact norm of coordinates above `level`.
    fn descend<F: FnMut(&[i64])>(&mut self, level: usize, partial: f64, exact: i64, emit: &mut F) {
        let n = self.profile.n;
        let c: f64 = (level + 1..n)
            .map(|j| self.profile.mu[level * n + j] * self.x[j] as f64)
            .sum();
        let cross: i64 = (level + 1..n)
            .map(|j| self.form.entry(level, j) * self.x[j])
            .sum();
        let room = (self.radius - partial).max(0.0) / self.profile.q[level];
        let r = room.sqrt();
        let lo = (-c - r - 1e-9).ceil() as i64;
        let hi = (-c + r + 1e-9).floor() as i64;
        let g = self.form.entry(level, level);
        for v in lo..=hi {
            self.nodes += 1;
            self.x[level] = v;
            let t = v as f64 + c;
            let p = partial + self.profile.q[level] * t * t;
            if p > self.radius {
                continue;
            }
            let e = exact + g * v * v + 2 * v * cross;
            if level == 0 {
                if e == self.target {
                    emit(&self.x);
                }
            } else {
                self.descend(level - 1, p, e, emit);
            }
        }
        self.x[level] = 0;
    }
}

fn check_norm(m: i64) -> Result<()> {
    if m < 0 {
        return Err(Error::InvalidForm(format!("negative norm {m}")));
    }
    if m % 2 != 0 {
        return Err(Error::OddNorm(m));
    }
    Ok(())
}

/// Range of the top coordinate; each value roots an independent subtree.
fn top_range(profile: &BoundProfile, radius: f64) -> std::ops::RangeInclusive<i64> {
    let n = profile.n;
    let r = (radius / profile.q[n - 1]).sqrt();
    let lo = (-r - 1e-9).ceil() as i64;
    let hi = (r + 1e-9).floor() as i64;
    lo..=hi
}

fn run_subtree<F: FnMut(&[i64])>(
    form: &QuadraticForm,
    profile: &BoundProfile,
    m: i64,
    top: i64,
    emit: &mut F,
) -> u64 {
    let n = form.rank();
    let radius = m as f64 + 1e-6 * (m.max(1) as f64);
    let mut s = Search {
        form,
        profile,
        target: m,
        radius,
        x: vec![0; n],
        nodes: 1,
    };
    let t = top as f64;
    let p = profile.q[n - 1] * t * t;
    if p > radius {
        return s.nodes;
    }
    s.x[n - 1] = top;
    let e = form.entry(n - 1, n - 1) * top * top;
    if n == 1 {
        if e == m {
            emit(&s.x);
        }
    } else {
        s.descend(n - 2, p, e, emit);
    }
    s.nodes
}

fn pack(v: &[i64], out: &mut Vec<i16>) -> Result<()> {
    for &c in v {
        out.push(i16::try_from(c).map_err(|_| Error::Overflow)?);
    }
    Ok(())
}

pub fn vectors_of_norm(q: &QuadraticForm, m: i64) -> Result<NormShell> {
    vectors_of_norm_with(q, m, Execution::default(), &Budget::unlimited())
}

pub fn vectors_of_norm_with(
    q: &QuadraticForm,
    m: i64,
    exec: Execution,
    budget: &Budget,
) -> Result<NormShell> {
    check_norm(m)?;
    let profile = BoundProfile::new(q)?;
    let n = q.rank();
    let radius = m as f64 + 1e-6 * (m.max(1) as f64);
    let tops: Vec<i64> = top_range(&profile, radius).collect();
    let parts = par::try_map(exec, &tops, |&top| -> Result<Vec<i16>> {
        let mut out = Vec::new();
        let mut err = None;
        let nodes = run_subtree(q, &profile, m, top, &mut |x| {
            if err.is_none() {
                if let Err(e) = pack(x, &mut out) {
                    err = Some(e);
                }
            }
        });
        budget.charge(nodes)?;
        match err {
            Some(e) => Err(e),
            None => Ok(out),
        }
    })?;
    let flat: Vec<i16> = parts.concat();
    let mut rows: Vec<&[i16]> = flat.chunks_exact(n).collect();
    rows.sort_unstable();
    let coords = rows.concat();
    Ok(NormShell {
        label: q.label().to_string(),
        norm: m,
        rank: n,
        coords,
    })
}

pub fn count_by_norm(q: &QuadraticForm, m: i64) -> Result<u64> {
    count_by_norm_with(q, m, Execution::default(), &Budget::unlimited())
}

pub fn count_by_norm_with(
    q: &QuadraticForm,
    m: i64,
    exec: Execution,
    budget: &Budget,
) -> Result<u64> {
    check_norm(m)?;
    let profile = BoundProfile::new(q)?;
    let radius = m as f64 + 1e-6 * (m.max(1) as f64);
    let tops: Vec<i64> = top_range(&profile, radius).collect();
    let counts = par::try_map(exec, &tops, |&top| -> Result<u64> {
        let mut count = 0u64;
        let nodes = run_subtree(q, &profile, m, top, &mut |_| count += 1);
        budget.charge(nodes)?;
        Ok(count)
    })?;
    Ok(counts.iter().sum())
}

/// All `x` of norm `target_norm` with `ᵗfixed[i]·Q·x = target_inner[i]`.
pub fn constrained_extend(
    q: &QuadraticForm,
    fixed: &[Vec<i64>],
    target_norm: i64,
    target_inner: &[i64],
) -> Result<Vec<Vec<i64>>> {
    if fixed.len() != target_inner.len() {
        return Err(Error::DimensionMismatch {
            expected: fixed.len(),
            got: target_inner.len(),
        });
    }
    check_norm(target_norm)?;
    let mut fixed_norms = Vec::with_capacity(fixed.len());
    for (f, &c) in fixed.iter().zip(target_inner) {
        let nf = q.norm(f)?;
        // Cauchy–Schwarz in exact integers: c² ≤ Q(f)·Q(x).
        if (c as i128) * (c as i128) > (nf as i128) * (target_norm as i128) {
            return Ok(Vec::new());
        }
        fixed_norms.push(nf);
    }
    if target_norm == 0 {
        return Ok(if target_inner.iter().all(|&c| c == 0) {
            vec![vec![0; q.rank()]]
        } else {
            Vec::new()
        });
    }
    let shell = vectors_of_norm(q, target_norm)?;
    constrained_filter(q, &shell, fixed, target_inner)
}

/// The vectors of an already enumerated shell that satisfy the inner-product
/// constraints `ᵗfixed[i]·Q·x = target_inner[i]`.
pub fn constrained_filter(
    q: &QuadraticForm,
    shell: &NormShell,
    fixed: &[Vec<i64>],
    target_inner: &[i64],
) -> Result<Vec<Vec<i64>>> {
    if fixed.len() != target_inner.len() {
        return Err(Error::DimensionMismatch {
            expected: fixed.len(),
            got: target_inner.len(),
        });
    }
    let n = q.rank();
    let mut duals = Vec::with_capacity(fixed.len());
    for f in fixed {
        if f.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: f.len(),
            });
        }
        duals.push(
            (0..n)
                .map(|a| (0..n).map(|b| q.entry(a, b) * f[b]).sum::<i64>())
                .collect::<Vec<i64>>(),
        );
    }
    let mut out = Vec::new();
    'outer: for i in 0..shell.len() {
        let x = shell.row(i);
        for (d, &c) in duals.iter().zip(target_inner) {
            if d.iter().zip(x).map(|(&a, &b)| a * b as i64).sum::<i64>() != c {
                continue 'outer;
            }
        }
        out.push(shell.vector(i));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qforms::{make_e8, QuadraticForm};

    #[test]
    fn e8_small_shells() {
        let e8 = make_e8();
        let zero = vectors_of_norm(&e8, 0).unwrap();
        assert_eq!(zero.len(), 1);
        assert_eq!(zero.vector(0), vec![0; 8]);
        assert_eq!(vectors_of_norm(&e8, 2).unwrap().len(), 240);
        assert_eq!(count_by_norm(&e8, 4).unwrap(), 2160);
        assert_eq!(count_by_norm(&e8, 6).unwrap(), 6720);
    }

    #[test]
    fn odd_norm_rejected() {
        assert!(matches!(
            vectors_of_norm(&make_e8(), 3),
            Err(Error::OddNorm(3))
        ));
    }

    #[test]
    fn shell_is_sorted_and_negation_closed() {
        let e8 = make_e8();
        let s = vectors_of_norm(&e8, 4).unwrap();
        for i in 1..s.len() {
            assert!(s.row(i - 1) < s.row(i));
        }
        for v in s.iter() {
            let neg: Vec<i64> = v.iter().map(|c| -c).collect();
            assert!(s.position(&neg).is_some());
            assert_eq!(e8.norm(&v).unwrap(), 4);
        }
    }

    #[test]
    fn sequential_matches_parallel() {
        let e8 = make_e8();
        let a = vectors_of_norm_with(&e8, 4, Execution::Sequential, &Budget::unlimited()).unwrap();
        let b = vectors_of_norm_with(&e8, 4, Execution::Parallel, &Budget::unlimited()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn indefinite_rejected() {
        let q = QuadraticForm::new("H", 2, vec![0, 1, 1, 0]).unwrap();
        assert!(vectors_of_norm(&q, 2).is_err());
    }

    #[test]
    fn constrained_root_extensions() {
        let e8 = make_e8();
        let mut rho = vec![0i64; 8];
        rho[0] = 1;
        let ones = constrained_extend(&e8, &[rho.clone()], 2, &[1]).unwrap();
        assert_eq!(ones.len(), 56);
        let same = constrained_extend(&e8, &[rho.clone()], 2, &[2]).unwrap();
        assert_eq!(same, vec![rho.clone()]);
        let none = constrained_extend(&e8, &[rho], 2, &[3]).unwrap();
        assert!(none.is_empty());
        let zero = constrained_extend(&e8, &[], 0, &[]).unwrap();
        assert_eq!(zero, vec![vec![0; 8]]);
    }

    #[test]
    fn budget_is_enforced() {
        let e8 = make_e8();
        let r = count_by_norm_with(&e8, 6, Execution::Sequential, &Budget::new(100));
        assert!(matches!(r, Err(Error::BudgetExceeded { .. })));
    }
}
