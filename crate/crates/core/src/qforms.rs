//! Even unimodular positive definite quadratic forms.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed};

use crate::exact;
use crate::{Error, Result};

pub const E8_LABEL: &str = "E8";
pub const E8E8_LABEL: &str = "E8E8";
pub const D16_PLUS_LABEL: &str = "D16PLUS";

/// An integral symmetric Gram matrix with a short label.
///
/// Construction only checks shape and symmetry; the even/unimodular/definite
/// properties are reported by [`verify_even_unimodular`].
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QuadraticForm {
    label: String,
    dim: usize,
    gram: Vec<i64>,
}

impl QuadraticForm {
    pub fn new(label: impl Into<String>, dim: usize, gram: Vec<i64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidForm("rank must be positive".into()));
        }
        if gram.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                got: gram.len(),
            });
        }
        for i in 0..dim {
            for j in 0..i {
                if gram[i * dim + j] != gram[j * dim + i] {
                    return Err(Error::InvalidForm(format!(
                        "gram not symmetric at ({i}, {j})"
                    )));
                }
            }
        }
        Ok(Self {
            label: label.into(),
            dim,
            gram,
        })
    }

    pub fn from_rows(label: impl Into<String>, rows: &[Vec<i64>]) -> Result<Self> {
        let dim = rows.len();
        if let Some(bad) = rows.iter().find(|r| r.len() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: bad.len(),
            });
        }
        Self::new(label, dim, rows.concat())
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn rank(&self) -> usize {
        self.dim
    }

    pub fn gram(&self) -> &[i64] {
        &self.gram
    }

    pub fn entry(&self, i: usize, j: usize) -> i64 {
        self.gram[i * self.dim + j]
    }

    /// `ᵗx · gram · y`.
    pub fn evaluate(&self, x: &[i64], y: &[i64]) -> Result<i64> {
        for v in [x, y] {
            if v.len() != self.dim {
                return Err(Error::DimensionMismatch {
                    expected: self.dim,
                    got: v.len(),
                });
            }
        }
        let n = self.dim;
        let mut acc = 0i64;
        for i in 0..n {
            if x[i] == 0 {
                continue;
            }
            let row = &self.gram[i * n..(i + 1) * n];
            let gy: i64 = row.iter().zip(y).map(|(g, v)| g * v).sum();
            acc += x[i] * gy;
        }
        Ok(acc)
    }

    /// The norm `Q(x, x)`.
    pub fn norm(&self, x: &[i64]) -> Result<i64> {
        self.evaluate(x, x)
    }

    pub fn determinant(&self) -> BigInt {
        exact::det(&self.gram, self.dim)
    }

    /// Plain-text block: a `form <label> rank <r>` header followed by `r`
    /// whitespace-separated rows.
    pub fn to_text(&self) -> String {
        let mut out = format!("form {} rank {}\n", self.label, self.dim);
        for i in 0..self.dim {
            let row: Vec<String> = self.gram[i * self.dim..(i + 1) * self.dim]
                .iter()
                .map(|v| v.to_string())
                .collect();
            out.push_str(&row.join(" "));
            out.push('\n');
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines
            .next()
            .ok_or_else(|| Error::InvalidForm("empty input".into()))?;
        let parts: Vec<&str> = header.split_whitespace().collect();
        let (label, dim) = match parts.as_slice() {
            ["form", label, "rank", r] => (
                label.to_string(),
                r.parse::<usize>()
                    .map_err(|e| Error::InvalidForm(format!("bad rank: {e}")))?,
            ),
            _ => return Err(Error::InvalidForm(format!("bad header: {header}"))),
        };
        let mut rows = Vec::with_capacity(dim);
        for _ in 0..dim {
            let line = lines
                .next()
                .ok_or_else(|| Error::InvalidForm("truncated gram block".into()))?;
            let row = line
                .split_whitespace()
                .map(|t| t.parse::<i64>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|e| Error::InvalidForm(format!("bad entry: {e}")))?;
            rows.push(row);
        }
        Self::from_rows(label, &rows)
    }
}

impl fmt::Display for QuadraticForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

/// Outcome of [`verify_even_unimodular`]; `passed()` iff every flag holds.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VerificationReport {
    pub symmetric: bool,
    pub even_diagonal: bool,
    pub positive_definite: bool,
    pub unimodular: bool,
    pub rank_divisible_by_8: bool,
    pub determinant: BigInt,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.symmetric
            && self.even_diagonal
            && self.positive_definite
            && self.unimodular
            && self.rank_divisible_by_8
    }
}

impl fmt::Display for VerificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "symmetric={} even={} positive_definite={} det={} rank_mod_8={} => {}",
            self.symmetric,
            self.even_diagonal,
            self.positive_definite,
            self.determinant,
            self.rank_divisible_by_8,
            if self.passed() { "pass" } else { "fail" }
        )
    }
}

pub fn verify_even_unimodular(q: &QuadraticForm) -> VerificationReport {
    let n = q.dim;
    let g = &q.gram;
    let symmetric = (0..n).all(|i| (0..i).all(|j| g[i * n + j] == g[j * n + i]));
    let even_diagonal = (0..n).all(|i| g[i * n + i] % 2 == 0);
    let minors = exact::leading_minors(g, n);
    let positive_definite = minors.iter().all(|d| d.is_positive());
    let determinant = minors.last().cloned().unwrap_or_else(BigInt::one);
    VerificationReport {
        symmetric,
        even_diagonal,
        positive_definite,
        unimodular: determinant.is_one(),
        rank_divisible_by_8: n % 8 == 0,
        determinant,
    }
}

/// E8 with the Cartan matrix as Gram (Bourbaki labelling: chain
/// 1–3–4–5–6–7–8 with node 2 attached to node 4).
pub fn make_e8() -> QuadraticForm {
    let edges = [(0, 2), (2, 3), (3, 4), (4, 5), (5, 6), (6, 7), (1, 3)];
    let mut gram = vec![0i64; 64];
    for i in 0..8 {
        gram[i * 8 + i] = 2;
    }
    for (a, b) in edges {
        gram[a * 8 + b] = -1;
        gram[b * 8 + a] = -1;
    }
    QuadraticForm::new(E8_LABEL, 8, gram).expect("E8 Cartan matrix is symmetric")
}

/// Gram matrix of a basis given in doubled Euclidean coordinates
/// (so half-integral vectors stay integral). Fails unless the result is an
/// even unimodular positive definite form.
pub fn form_from_doubled_basis(label: &str, doubled: &[Vec<i64>]) -> Result<QuadraticForm> {
    let n = doubled.len();
    let mut gram = vec![0i64; n * n];
    for i in 0..n {
        for j in 0..n {
            let dot: i64 = doubled[i].iter().zip(&doubled[j]).map(|(a, b)| a * b).sum();
            if dot % 4 != 0 {
                return Err(Error::Construction(format!(
                    "{label}: inner product of basis vectors {i},{j} is not integral"
                )));
            }
            gram[i * n + j] = dot / 4;
        }
    }
    let q = QuadraticForm::new(label, n, gram)?;
    let report = verify_even_unimodular(&q);
    if !report.passed() {
        return Err(Error::Construction(format!("{label}: {report}")));
    }
    Ok(q)
}

/// Doubled coordinates of the D16+ basis
/// `e2−e3, …, e15−e16, e15+e16, ½(e1+…+e16)`.
pub fn d16_plus_basis() -> Vec<Vec<i64>> {
    let mut basis = Vec::with_capacity(16);
    for i in 1..15 {
        let mut v = vec![0i64; 16];
        v[i] = 2;
        v[i + 1] = -2;
        basis.push(v);
    }
    let mut v = vec![0i64; 16];
    v[14] = 2;
    v[15] = 2;
    basis.push(v);
    basis.push(vec![1i64; 16]);
    basis
}

/// The rank-16 lattice D16+ (D16 glued with the half-integral spinor class).
///
/// Panics if the built-in basis fails verification; that can only mean the
/// glue basis is wrong.
pub fn make_d16_plus() -> QuadraticForm {
    form_from_doubled_basis(D16_PLUS_LABEL, &d16_plus_basis())
        .unwrap_or_else(|e| panic!("D16+ construction failed: {e}"))
}

/// Block-diagonal sum; labels are concatenated.
pub fn direct_sum(a: &QuadraticForm, b: &QuadraticForm) -> QuadraticForm {
    let n = a.dim + b.dim;
    let mut gram = vec![0i64; n * n];
    for i in 0..a.dim {
        for j in 0..a.dim {
            gram[i * n + j] = a.entry(i, j);
        }
    }
    for i in 0..b.dim {
        for j in 0..b.dim {
            gram[(a.dim + i) * n + a.dim + j] = b.entry(i, j);
        }
    }
    QuadraticForm::new(format!("{}{}", a.label, b.label), n, gram)
        .expect("block sum of symmetric matrices is symmetric")
}

pub fn make_e8e8() -> QuadraticForm {
    let e8 = make_e8();
    direct_sum(&e8, &e8)
}

/// Looks up one of the built-in forms by CLI label.
pub fn form_by_label(label: &str) -> Result<QuadraticForm> {
    match label {
        E8_LABEL => Ok(make_e8()),
        E8E8_LABEL => Ok(make_e8e8()),
        D16_PLUS_LABEL => Ok(make_d16_plus()),
        other => Err(Error::InvalidForm(format!(
            "unknown form {other:?} (expected E8, E8E8 or D16PLUS)"
        ))),
    }
}
