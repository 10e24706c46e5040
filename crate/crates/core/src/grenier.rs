//! The space `X_n` of determinant-one positive matrices, its partial Iwasawa
//! decomposition and the Grenier operator.
//!
//! Every `Y ∈ X_n` decomposes uniquely as
//!
//! ```text
//! Y = ( v^{-1}        0          ) [ 1  ᵗx      ]
//!     ( 0     v^{1/(n−1)} W      ) [ 0  I_{n−1} ]
//! ```
//!
//! with `v > 0`, `x ∈ ℝ^{n−1}` and `W ∈ X_{n−1}`, where `A[B] = ᵗB A B`. The
//! Grenier operator is `𝔏 f(W) = lim_{v→∞} v^{−s₁−ξ₁} f(Y)`; on power
//! functions it shifts the parameters, `𝔏 p_{−(s₁,…,s_{n−1})} =
//! p_{−(s₂,…,s_{n−1})}`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;

use crate::symplectic::{LimitReport, LIMIT_TOLERANCE};
use crate::{Error, Result};

const SYM_TOL: f64 = 1e-12;
const DET_TOL: f64 = 1e-10;

/// A point of `X_n`.
#[derive(Clone, Debug, PartialEq)]
pub struct SpecialPositiveMatrix {
    y: DMatrix<f64>,
    /// Determinant of the input before rescaling.
    input_det: f64,
}

impl SpecialPositiveMatrix {
    /// Accepts a symmetric positive definite matrix and rescales it by
    /// `det(Y)^{-1/n}` so that the determinant is one.
    pub fn new(y: DMatrix<f64>) -> Result<Self> {
        let n = y.nrows();
        if n == 0 || !y.is_square() {
            return Err(Error::InvalidMatrix("expected a nonempty square matrix".into()));
        }
        let scale = y.amax().max(1.0);
        if (&y - y.transpose()).amax() > SYM_TOL * scale {
            return Err(Error::InvalidMatrix("matrix is not symmetric".into()));
        }
        let y = (&y + y.transpose()) * 0.5;
        let Some(chol) = y.clone().cholesky() else {
            return Err(Error::InvalidMatrix("matrix is not positive definite".into()));
        };
        let det = chol.l().diagonal().iter().map(|d| d * d).product::<f64>();
        let y = if (det - 1.0).abs() > DET_TOL {
            y * det.powf(-1.0 / n as f64)
        } else {
            y
        };
        Ok(Self { y, input_det: det })
    }

    pub fn from_rows(n: usize, entries: &[f64]) -> Result<Self> {
        if entries.len() != n * n {
            return Err(Error::DimensionMismatch {
                expected: n * n,
                got: entries.len(),
            });
        }
        Self::new(DMatrix::from_row_slice(n, n, entries))
    }

    pub fn identity(n: usize) -> Self {
        Self {
            y: DMatrix::identity(n, n),
            input_det: 1.0,
        }
    }

    pub fn n(&self) -> usize {
        self.y.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.y
    }

    /// Whether construction had to rescale the input.
    pub fn was_renormalized(&self) -> bool {
        (self.input_det - 1.0).abs() > DET_TOL
    }

    pub fn input_determinant(&self) -> f64 {
        self.input_det
    }

    /// Upper-left `j × j` minors for `j = 1..n`.
    pub fn leading_minors(&self) -> Vec<f64> {
        (1..=self.n())
            .map(|j| self.y.view((0, 0), (j, j)).into_owned().determinant())
            .collect()
    }

    pub fn max_difference(&self, other: &Self) -> f64 {
        (&self.y - &other.y).amax()
    }
}

/// `(v, x, W)` of the partial Iwasawa decomposition.
#[derive(Clone, Debug, PartialEq)]
pub struct GrenierDecomposition {
    pub v: f64,
    pub x: DVector<f64>,
    pub w: SpecialPositiveMatrix,
}

pub fn decompose(y: &SpecialPositiveMatrix) -> Result<GrenierDecomposition> {
    let n = y.n();
    if n < 2 {
        return Err(Error::InvalidMatrix("X_1 has no decomposition".into()));
    }
    let m = &y.y;
    let y11 = m[(0, 0)];
    let y21 = m.view((1, 0), (n - 1, 1)).column(0).into_owned();
    let y22 = m.view((1, 1), (n - 1, n - 1)).into_owned();
    let v = 1.0 / y11;
    let x = &y21 / y11;
    let schur = y22 - &y21 * y21.transpose() / y11;
    let w = schur * v.powf(-1.0 / (n - 1) as f64);
    let w = (&w + w.transpose()) * 0.5;
    Ok(GrenierDecomposition {
        v,
        x,
        w: SpecialPositiveMatrix {
            y: w,
            input_det: 1.0,
        },
    })
}

pub fn recompose(d: &GrenierDecomposition) -> Result<SpecialPositiveMatrix> {
    let k = d.w.n();
    if d.x.len() != k {
        return Err(Error::DimensionMismatch {
            expected: k,
            got: d.x.len(),
        });
    }
    if !(d.v > 0.0) {
        return Err(Error::InvalidMatrix(format!("v = {} must be positive", d.v)));
    }
    let n = k + 1;
    let mut y = DMatrix::zeros(n, n);
    y[(0, 0)] = 1.0 / d.v;
    let col = &d.x / d.v;
    y.view_mut((1, 0), (k, 1)).copy_from(&col);
    y.view_mut((0, 1), (1, k)).copy_from(&col.transpose());
    let lower = &d.w.y * d.v.powf(1.0 / k as f64) + &d.x * d.x.transpose() / d.v;
    y.view_mut((1, 1), (k, k)).copy_from(&lower);
    Ok(SpecialPositiveMatrix {
        y: (&y + y.transpose()) * 0.5,
        input_det: 1.0,
    })
}

/// `s = (s₁, …, s_{n−1})` of the power function `p_{−s}` on `X_n`.
#[derive(Clone, Debug, PartialEq)]
pub struct PowerParameters {
    pub n: usize,
    pub s: Vec<Complex64>,
}

impl PowerParameters {
    pub fn new(n: usize, s: Vec<Complex64>) -> Result<Self> {
        if n == 0 || s.len() != n - 1 {
            return Err(Error::DimensionMismatch {
                expected: n.saturating_sub(1),
                got: s.len(),
            });
        }
        Ok(Self { n, s })
    }

    pub fn real(n: usize, s: &[f64]) -> Result<Self> {
        Self::new(n, s.iter().map(|&v| Complex64::new(v, 0.0)).collect())
    }

    /// `s₁ + ξ₁`, the exponent that normalises the Grenier limit.
    pub fn limit_exponent(&self) -> Complex64 {
        self.s.first().copied().unwrap_or_default() + xi1(self)
    }
}

/// `p_{−s}(Y) = Π_{j=1}^{n−1} det(Y_j)^{−s_j}` over the leading minors.
pub fn power_function(y: &SpecialPositiveMatrix, p: &PowerParameters) -> Result<Complex64> {
    if y.n() != p.n {
        return Err(Error::DimensionMismatch {
            expected: p.n,
            got: y.n(),
        });
    }
    let minors = y.leading_minors();
    let log: Complex64 = p
        .s
        .iter()
        .zip(&minors)
        .map(|(s, m)| -s * m.ln())
        .sum();
    Ok(log.exp())
}

/// `ξ₁ = (1/(n−1)) Σ_{k=2}^{n−1} (n − k) s_k`.
pub fn xi1(p: &PowerParameters) -> Complex64 {
    let n = p.n;
    if n < 3 {
        return Complex64::new(0.0, 0.0);
    }
    let sum: Complex64 = (2..n).map(|k| p.s[k - 1] * (n - k) as f64).sum();
    sum / (n - 1) as f64
}

/// `𝔏 p_{−s} = p_{−s′}` with `s′ = (s₂, …, s_{n−1})`.
pub fn grenier_l_power(p: &PowerParameters) -> Result<PowerParameters> {
    if p.n < 2 {
        return Err(Error::InvalidMatrix("the Grenier operator needs n ≥ 2".into()));
    }
    PowerParameters::new(p.n - 1, p.s[1..].to_vec())
}

/// Evaluates `v^{−s₁−ξ₁} f(recompose(v, x, W))` along an increasing
/// schedule of `v`.
pub fn grenier_l_numeric(
    f: &dyn Fn(&SpecialPositiveMatrix) -> Result<Complex64>,
    p: &PowerParameters,
    w: &SpecialPositiveMatrix,
    x: &DVector<f64>,
    schedule: &[f64],
) -> Result<LimitReport> {
    if p.n != w.n() + 1 {
        return Err(Error::DimensionMismatch {
            expected: p.n - 1,
            got: w.n(),
        });
    }
    if schedule.is_empty() || schedule.windows(2).any(|s| s[1] <= s[0]) || schedule[0] <= 0.0 {
        return Err(Error::InvalidMatrix("v schedule must be positive and increasing".into()));
    }
    let c = p.limit_exponent();
    let values = schedule
        .iter()
        .map(|&v| {
            let y = recompose(&GrenierDecomposition {
                v,
                x: x.clone(),
                w: w.clone(),
            })?;
            Ok((-c * v.ln()).exp() * f(&y)?)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(LimitReport::from_values(schedule.to_vec(), values, LIMIT_TOLERANCE))
}

/// `g∘Y = g Y ᵗg` for `det g = ±1`.
pub fn gl_action(g: &DMatrix<f64>, y: &SpecialPositiveMatrix) -> Result<SpecialPositiveMatrix> {
    let n = y.n();
    if g.shape() != (n, n) {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: g.nrows(),
        });
    }
    let det = g.determinant();
    if (det.abs() - 1.0).abs() > DET_TOL {
        return Err(Error::InvalidMatrix(format!("det g = {det} is not ±1")));
    }
    let m = g * &y.y * g.transpose();
    Ok(SpecialPositiveMatrix {
        y: (&m + m.transpose()) * 0.5,
        input_det: 1.0,
    })
}

/// A random element of `X_n`.
pub fn random_special<R: Rng + ?Sized>(n: usize, rng: &mut R) -> SpecialPositiveMatrix {
    let a = DMatrix::from_fn(n, n, |_, _| rng.gen_range(-1.0..1.0));
    let y = &a * a.transpose() + DMatrix::identity(n, n) * 0.5;
    SpecialPositiveMatrix::new(y).expect("a·ᵗa + I/2 is positive definite")
}
