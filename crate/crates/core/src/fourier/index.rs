use std::cmp::Ordering;
use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::exact;
use crate::{Error, Result};

/// Index `T` of a Fourier coefficient: an integral symmetric positive
/// semidefinite `n × n` matrix with even diagonal.
///
/// The character attached to `T` is `e^{πi tr(TZ)}`, so `T` is the Gram
/// matrix `ᵗG S G` itself; the half-integral convention is `T / 2`.
///
/// Ordering is graded: genus, then trace, then the upper triangle
/// lexicographically.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FourierIndex {
    genus: usize,
    t: Vec<i64>,
}

fn isqrt(v: i64) -> i64 {
    if v <= 0 {
        return 0;
    }
    let mut r = (v as f64).sqrt() as i64;
    while r * r > v {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= v {
        r += 1;
    }
    r
}

impl FourierIndex {
    pub fn new(genus: usize, t: Vec<i64>) -> Result<Self> {
        if t.len() != genus * genus {
            return Err(Error::DimensionMismatch {
                expected: genus * genus,
                got: t.len(),
            });
        }
        let n = genus;
        for i in 0..n {
            let d = t[i * n + i];
            if d < 0 || d % 2 != 0 {
                return Err(Error::InvalidIndex(format!(
                    "diagonal entry {d} at {i} must be even and nonnegative"
                )));
            }
            for j in 0..i {
                if t[i * n + j] != t[j * n + i] {
                    return Err(Error::InvalidIndex(format!("not symmetric at ({i}, {j})")));
                }
                let bound = isqrt(t[i * n + i] * t[j * n + j]);
                if t[i * n + j].abs() > bound {
                    return Err(Error::InvalidIndex(format!(
                        "|t[{j}][{i}]| = {} exceeds {bound}",
                        t[i * n + j].abs()
                    )));
                }
            }
        }
        if !exact::is_psd(&t, n) {
            return Err(Error::InvalidIndex("not positive semidefinite".into()));
        }
        Ok(Self { genus, t })
    }

    /// Builds an index from its upper triangle in row-major order.
    pub fn from_upper(genus: usize, upper: &[i64]) -> Result<Self> {
        let expected = genus * (genus + 1) / 2;
        if upper.len() != expected {
            return Err(Error::DimensionMismatch {
                expected,
                got: upper.len(),
            });
        }
        let mut t = vec![0i64; genus * genus];
        let mut it = upper.iter();
        for i in 0..genus {
            for j in i..genus {
                let v = *it.next().expect("length checked");
                t[i * genus + j] = v;
                t[j * genus + i] = v;
            }
        }
        Self::new(genus, t)
    }

    pub fn zero(genus: usize) -> Self {
        Self {
            genus,
            t: vec![0; genus * genus],
        }
    }

    pub fn genus(&self) -> usize {
        self.genus
    }

    pub fn entry(&self, i: usize, j: usize) -> i64 {
        self.t[i * self.genus + j]
    }

    pub fn matrix(&self) -> &[i64] {
        &self.t
    }

    pub fn trace(&self) -> i64 {
        (0..self.genus).map(|i| self.entry(i, i)).sum()
    }

    pub fn diagonal(&self) -> Vec<i64> {
        (0..self.genus).map(|i| self.entry(i, i)).collect()
    }

    pub fn upper_triangle(&self) -> Vec<i64> {
        let n = self.genus;
        let mut out = Vec::with_capacity(n * (n + 1) / 2);
        for i in 0..n {
            for j in i..n {
                out.push(self.t[i * n + j]);
            }
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.t.iter().all(|&v| v == 0)
    }

    /// `det(t) = 0`, exactly.
    pub fn is_singular(&self) -> bool {
        exact::det(&self.t, self.genus).is_zero()
    }

    /// `T ⊕ 0`, one genus up.
    pub fn pad_zero(&self) -> Self {
        let n = self.genus;
        let m = n + 1;
        let mut t = vec![0i64; m * m];
        for i in 0..n {
            for j in 0..n {
                t[i * m + j] = self.t[i * n + j];
            }
        }
        Self { genus: m, t }
    }

    /// The upper-left `(n−1)`-block if the last row and column vanish.
    pub fn strip_zero(&self) -> Option<Self> {
        let n = self.genus;
        if n == 0 || (0..n).any(|j| self.t[(n - 1) * n + j] != 0) {
            return None;
        }
        let m = n - 1;
        let mut t = Vec::with_capacity(m * m);
        for i in 0..m {
            t.extend_from_slice(&self.t[i * n..i * n + m]);
        }
        Some(Self { genus: m, t })
    }

    /// Simultaneous permutation of rows and columns: entry `(i, j)` of the
    /// result is `t[perm[i]][perm[j]]`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        let n = self.genus;
        let mut seen = vec![false; n];
        if perm.len() != n || perm.iter().any(|&p| p >= n || std::mem::replace(&mut seen[p], true))
        {
            return Err(Error::InvalidIndex("not a permutation".into()));
        }
        let mut t = vec![0i64; n * n];
        for i in 0..n {
            for j in 0..n {
                t[i * n + j] = self.t[perm[i] * n + perm[j]];
            }
        }
        Ok(Self { genus: n, t })
    }
}

impl Ord for FourierIndex {
    fn cmp(&self, other: &Self) -> Ordering {
        self.genus
            .cmp(&other.genus)
            .then_with(|| self.trace().cmp(&other.trace()))
            .then_with(|| self.upper_triangle().cmp(&other.upper_triangle()))
    }
}

impl PartialOrd for FourierIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for FourierIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = self.genus;
        f.write_str("[")?;
        for i in 0..n {
            if i > 0 {
                f.write_str("; ")?;
            }
            let row: Vec<String> = self.t[i * n..(i + 1) * n]
                .iter()
                .map(|v| v.to_string())
                .collect();
            f.write_str(&row.join(","))?;
        }
        f.write_str("]")
    }
}

/// `ᵗU · T · U` for an integral `U` with `det U = ±1`.
pub fn unimodular_transform(t: &FourierIndex, u: &[i64]) -> Result<FourierIndex> {
    let n = t.genus;
    if u.len() != n * n {
        return Err(Error::DimensionMismatch {
            expected: n * n,
            got: u.len(),
        });
    }
    let d = exact::det(u, n);
    if !d.abs().is_one() {
        return Err(Error::NotUnimodular(d.to_string()));
    }
    FourierIndex::new(n, exact::congruence(&t.t, u, n))
}

/// Every index of genus `n` with trace at most `trace_bound`, in graded order.
pub fn enumerate_indices(n: usize, trace_bound: i64) -> Vec<FourierIndex> {
    if n == 0 {
        return vec![FourierIndex::zero(0)];
    }
    let half = (trace_bound.max(0) / 2) as usize;
    let mut out = Vec::new();
    let mut diag = vec![0i64; n];
    diagonals(&mut diag, 0, half, &mut |d| {
        let mut t = vec![0i64; n * n];
        for i in 0..n {
            t[i * n + i] = d[i];
        }
        fill_offdiagonal(&mut t, n, 1, 0, &mut out);
    });
    out.sort();
    out
}

fn diagonals(diag: &mut Vec<i64>, pos: usize, remaining: usize, f: &mut impl FnMut(&[i64])) {
    if pos == diag.len() {
        f(diag);
        return;
    }
    for a in 0..=remaining {
        diag[pos] = 2 * a as i64;
        diagonals(diag, pos + 1, remaining - a, f);
    }
    diag[pos] = 0;
}

/// Fills entry `(row, col)` with `row < col`, column by column; when a column
/// is complete every principal minor that involves it is checked, since a psd
/// matrix has psd principal submatrices.
fn fill_offdiagonal(t: &mut Vec<i64>, n: usize, col: usize, row: usize, out: &mut Vec<FourierIndex>) {
    if col == n {
        out.push(FourierIndex {
            genus: n,
            t: t.clone(),
        });
        return;
    }
    if row == col {
        if leading_block_psd(t, n, col) {
            fill_offdiagonal(t, n, col + 1, 0, out);
        }
        return;
    }
    let bound = isqrt(t[row * n + row] * t[col * n + col]);
    for v in -bound..=bound {
        t[row * n + col] = v;
        t[col * n + row] = v;
        fill_offdiagonal(t, n, col, row + 1, out);
    }
    t[row * n + col] = 0;
    t[col * n + row] = 0;
}

fn leading_block_psd(t: &[i64], n: usize, last: usize) -> bool {
    let mut idx = Vec::with_capacity(last + 1);
    for mask in 0u32..(1u32 << last) {
        idx.clear();
        idx.extend((0..last).filter(|&i| mask & (1 << i) != 0));
        idx.push(last);
        if idx.len() < 2 {
            continue;
        }
        let sub = exact::principal_submatrix(t, n, &idx);
        if exact::det(&sub, idx.len()).is_negative() {
            return false;
        }
    }
    true
}
