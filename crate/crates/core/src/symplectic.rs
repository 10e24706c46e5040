//! Numerics on the Siegel upper half space `ℍ_n` and on `Sp(2n, ℝ)`.
//!
//! A Siegel modular form `f` of scalar weight `k` is moved to the group by
//! `(Q f)(g) = J(g, iI)^{-1} f(g·iI)` and back by `(P F)(Z) = J(g, iI) F(g)`
//! for any `g` with `g·iI = Z`, where `J(g, Z) = det(CZ + D)^k`. The group
//! Siegel operator `L_{m,n}` is the limit of `J_m(g, iI)^{-1} J_n(g_t, iI)
//! F(g_t)` along the family `g_t` that pads `g` with `t^{±1/2}` blocks; it is
//! evaluated on a finite schedule of `t` with a convergence report.

use std::fmt;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use num_traits::ToPrimitive;
use rand::Rng;

use crate::fourier::{enumerate_indices, Expansion};
use crate::{Error, Result};

pub type RMat = DMatrix<f64>;
pub type CMat = DMatrix<Complex64>;

const SYM_TOL: f64 = 1e-12;
const SYMPLECTIC_TOL: f64 = 1e-10;
const MAX_CONDITION: f64 = 1e12;

fn complexify(m: &RMat) -> CMat {
    m.map(|x| Complex64::new(x, 0.0))
}

fn symmetrize(m: &RMat) -> RMat {
    (m + m.transpose()) * 0.5
}

fn asymmetry(m: &RMat) -> f64 {
    (m - m.transpose()).amax() / m.amax().max(1.0)
}

/// `Y^{1/2}` and `Y^{-1/2}` of a symmetric positive definite `Y`.
fn sqrt_and_inverse_sqrt(y: &RMat) -> (RMat, RMat) {
    let eig = SymmetricEigen::new(y.clone());
    let v = &eig.eigenvectors;
    let s = RMat::from_diagonal(&eig.eigenvalues.map(f64::sqrt));
    let si = RMat::from_diagonal(&eig.eigenvalues.map(|l| 1.0 / l.sqrt()));
    (symmetrize(&(v * s * v.transpose())), symmetrize(&(v * si * v.transpose())))
}

fn min_eigenvalue(y: &RMat) -> f64 {
    SymmetricEigen::new(y.clone()).eigenvalues.min()
}

/// `Z = X + iY` with `X, Y` real symmetric and `Y` positive definite.
#[derive(Clone, Debug, PartialEq)]
pub struct SiegelPoint {
    x: RMat,
    y: RMat,
}

impl SiegelPoint {
    pub fn new(x: RMat, y: RMat) -> Result<Self> {
        let n = x.nrows();
        if !x.is_square() || y.shape() != (n, n) {
            return Err(Error::InvalidPoint("X and Y must be square of equal size".into()));
        }
        if asymmetry(&x) > SYM_TOL || asymmetry(&y) > SYM_TOL {
            return Err(Error::InvalidPoint("X and Y must be symmetric".into()));
        }
        let y = symmetrize(&y);
        if n > 0 && y.clone().cholesky().is_none() {
            return Err(Error::InvalidPoint("Y is not positive definite".into()));
        }
        Ok(Self { x: symmetrize(&x), y })
    }

    pub fn from_complex(z: &CMat) -> Result<Self> {
        Self::new(z.map(|c| c.re), z.map(|c| c.im))
    }

    /// `iI_n`.
    pub fn i_identity(n: usize) -> Self {
        Self {
            x: RMat::zeros(n, n),
            y: RMat::identity(n, n),
        }
    }

    /// `i·t·I_n`.
    pub fn i_scaled(n: usize, t: f64) -> Result<Self> {
        Self::new(RMat::zeros(n, n), RMat::identity(n, n) * t)
    }

    pub fn genus(&self) -> usize {
        self.x.nrows()
    }

    pub fn x(&self) -> &RMat {
        &self.x
    }

    pub fn y(&self) -> &RMat {
        &self.y
    }

    pub fn z(&self) -> CMat {
        let n = self.genus();
        CMat::from_fn(n, n, |i, j| Complex64::new(self.x[(i, j)], self.y[(i, j)]))
    }

    /// Smallest eigenvalue of `Y`.
    pub fn y_floor(&self) -> f64 {
        if self.genus() == 0 {
            f64::INFINITY
        } else {
            min_eigenvalue(&self.y)
        }
    }

    /// Largest entrywise difference.
    pub fn distance(&self, other: &Self) -> f64 {
        (self.z() - other.z()).iter().map(|c| c.norm()).fold(0.0, f64::max)
    }
}

/// `g = (A B; C D)` with `ᵗg J g = J`.
#[derive(Clone, Debug, PartialEq)]
pub struct SymplecticElement {
    a: RMat,
    b: RMat,
    c: RMat,
    d: RMat,
}

impl SymplecticElement {
    pub fn new(a: RMat, b: RMat, c: RMat, d: RMat) -> Result<Self> {
        let n = a.nrows();
        for m in [&a, &b, &c, &d] {
            if m.shape() != (n, n) {
                return Err(Error::InvalidMatrix("blocks must be n×n".into()));
            }
        }
        let g = Self { a, b, c, d };
        let dev = g.symplectic_deviation();
        if dev > SYMPLECTIC_TOL {
            return Err(Error::NotSymplectic(dev));
        }
        Ok(g)
    }

    pub fn genus(&self) -> usize {
        self.a.nrows()
    }

    pub fn blocks(&self) -> (&RMat, &RMat, &RMat, &RMat) {
        (&self.a, &self.b, &self.c, &self.d)
    }

    pub fn identity(n: usize) -> Self {
        Self {
            a: RMat::identity(n, n),
            b: RMat::zeros(n, n),
            c: RMat::zeros(n, n),
            d: RMat::identity(n, n),
        }
    }

    /// `(0 I; −I 0)`.
    pub fn j(n: usize) -> Self {
        Self {
            a: RMat::zeros(n, n),
            b: RMat::identity(n, n),
            c: -RMat::identity(n, n),
            d: RMat::zeros(n, n),
        }
    }

    /// `(I S; 0 I)` for symmetric `S`.
    pub fn translation(s: RMat) -> Result<Self> {
        let n = s.nrows();
        Self::new(RMat::identity(n, n), s, RMat::zeros(n, n), RMat::identity(n, n))
    }

    /// `(A 0; 0 ᵗA^{-1})` for invertible `A`.
    pub fn linear(a: RMat) -> Result<Self> {
        let n = a.nrows();
        let inv = a
            .clone()
            .try_inverse()
            .ok_or_else(|| Error::InvalidMatrix("A is singular".into()))?;
        Self::new(a, RMat::zeros(n, n), RMat::zeros(n, n), inv.transpose())
    }

    /// `(a −b; b a)` for a unitary `u = a + ib`: the stabiliser of `iI`.
    pub fn rotation(u: &CMat) -> Result<Self> {
        let a = u.map(|c| c.re);
        let b = u.map(|c| c.im);
        Self::new(a.clone(), -b.clone(), b, a)
    }

    /// The section `(Y^{1/2}, X Y^{-1/2}; 0, Y^{-1/2})`, which maps `iI` to `z`.
    pub fn section(z: &SiegelPoint) -> Self {
        let n = z.genus();
        let (s, si) = sqrt_and_inverse_sqrt(&z.y);
        Self {
            a: s,
            b: &z.x * &si,
            c: RMat::zeros(n, n),
            d: si,
        }
    }

    pub fn to_matrix(&self) -> RMat {
        let n = self.genus();
        let mut m = RMat::zeros(2 * n, 2 * n);
        m.view_mut((0, 0), (n, n)).copy_from(&self.a);
        m.view_mut((0, n), (n, n)).copy_from(&self.b);
        m.view_mut((n, 0), (n, n)).copy_from(&self.c);
        m.view_mut((n, n), (n, n)).copy_from(&self.d);
        m
    }

    fn from_matrix_unchecked(m: &RMat) -> Self {
        let n = m.nrows() / 2;
        Self {
            a: m.view((0, 0), (n, n)).into_owned(),
            b: m.view((0, n), (n, n)).into_owned(),
            c: m.view((n, 0), (n, n)).into_owned(),
            d: m.view((n, n), (n, n)).into_owned(),
        }
    }

    /// `max |ᵗg J g − J| / (1 + |g|²)`.
    pub fn symplectic_deviation(&self) -> f64 {
        let n = self.genus();
        let g = self.to_matrix();
        let j = Self::j(n).to_matrix();
        let scale = 1.0 + g.amax().powi(2);
        (g.transpose() * &j * &g - j).amax() / scale
    }

    pub fn mul(&self, other: &Self) -> Self {
        Self::from_matrix_unchecked(&(self.to_matrix() * other.to_matrix()))
    }

    pub fn inverse(&self) -> Self {
        // g^{-1} = (ᵗD −ᵗB; −ᵗC ᵗA).
        Self {
            a: self.d.transpose(),
            b: -self.b.transpose(),
            c: -self.c.transpose(),
            d: self.a.transpose(),
        }
    }

    /// Largest entrywise difference.
    pub fn distance(&self, other: &Self) -> f64 {
        (self.to_matrix() - other.to_matrix()).amax()
    }
}

/// The representation `det^k`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct ScalarWeight {
    pub k: u32,
}

impl ScalarWeight {
    pub fn new(k: u32) -> Self {
        Self { k }
    }

    pub fn apply(&self, det: Complex64) -> Complex64 {
        det.powi(self.k as i32)
    }
}

fn cz_plus_d(g: &SymplecticElement, z: &SiegelPoint) -> CMat {
    complexify(&g.c) * z.z() + complexify(&g.d)
}

fn condition(m: &CMat) -> f64 {
    let sv = m.clone().svd(false, false).singular_values;
    let max = sv.max();
    let min = sv.min();
    if min <= 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}

fn check_genus(g: &SymplecticElement, z: &SiegelPoint) -> Result<()> {
    if g.genus() != z.genus() {
        return Err(Error::DimensionMismatch {
            expected: g.genus(),
            got: z.genus(),
        });
    }
    Ok(())
}

/// `g·Z = (AZ + B)(CZ + D)^{-1}`.
pub fn act(g: &SymplecticElement, z: &SiegelPoint) -> Result<SiegelPoint> {
    check_genus(g, z)?;
    let m = cz_plus_d(g, z);
    let cond = condition(&m);
    if !(cond < MAX_CONDITION) {
        return Err(Error::IllConditioned { condition: cond });
    }
    let inv = m.try_inverse().ok_or(Error::IllConditioned {
        condition: f64::INFINITY,
    })?;
    let w = (complexify(&g.a) * z.z() + complexify(&g.b)) * inv;
    let w = (&w + w.transpose()) * Complex64::new(0.5, 0.0);
    let x = w.map(|c| c.re);
    let y = w.map(|c| c.im);
    if z.genus() > 0 && y.clone().cholesky().is_none() {
        return Err(Error::InvalidPoint("image left the upper half space".into()));
    }
    Ok(SiegelPoint { x, y })
}

/// `J(g, Z) = det(CZ + D)^k`.
pub fn automorphy_factor(g: &SymplecticElement, z: &SiegelPoint, w: ScalarWeight) -> Result<Complex64> {
    check_genus(g, z)?;
    let m = cz_plus_d(g, z);
    let cond = condition(&m);
    if !(cond < MAX_CONDITION) {
        return Err(Error::IllConditioned { condition: cond });
    }
    Ok(w.apply(m.determinant()))
}

/// A truncated expansion evaluated at a point, with a bound for the part of
/// the series beyond the trace bound.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Evaluation {
    pub value: Complex64,
    /// `N · max|a| · e^{−π y₀ (B + 2)}`, `N` the number of indices of trace
    /// `B + 2` and `y₀` the smallest eigenvalue of `Y`.
    pub tail_estimate: f64,
}

impl Evaluation {
    pub fn is_reliable(&self, tolerance: f64) -> bool {
        self.tail_estimate <= tolerance * self.value.norm().max(1.0)
    }
}

/// `Σ_T a(T) e^{πi tr(TZ)}` over the stored indices.
pub fn eval_expansion(a: &Expansion, z: &SiegelPoint) -> Result<Evaluation> {
    if a.genus() != z.genus() {
        return Err(Error::DimensionMismatch {
            expected: a.genus(),
            got: z.genus(),
        });
    }
    let n = z.genus();
    let zc = z.z();
    let mut value = Complex64::new(0.0, 0.0);
    for (t, c) in a.coefficients() {
        let mut tr = Complex64::new(0.0, 0.0);
        for i in 0..n {
            for j in 0..n {
                let e = t.entry(i, j);
                if e != 0 {
                    tr += zc[(i, j)] * e as f64;
                }
            }
        }
        let c = c.to_f64().unwrap_or(f64::INFINITY);
        value += (Complex64::new(0.0, std::f64::consts::PI) * tr).exp() * c;
    }
    let tail_estimate = if n == 0 {
        0.0
    } else {
        let next = a.trace_bound() + 2;
        let count = enumerate_indices(n, next)
            .iter()
            .filter(|t| t.trace() == next)
            .count() as f64;
        let amax = a.max_abs_coefficient().to_f64().unwrap_or(f64::INFINITY);
        count * amax * (-std::f64::consts::PI * z.y_floor() * next as f64).exp()
    };
    Ok(Evaluation { value, tail_estimate })
}

/// A function on `Sp(2n, ℝ)`.
pub trait GroupFunction: Sync {
    fn genus(&self) -> usize;
    fn eval(&self, g: &SymplecticElement) -> Result<Complex64>;
}

/// `Q f` for a truncated expansion `f` of integral weight.
pub struct ThetaLift<'a> {
    expansion: &'a Expansion,
    weight: ScalarWeight,
}

impl<'a> ThetaLift<'a> {
    pub fn new(expansion: &'a Expansion, weight: ScalarWeight) -> Result<Self> {
        if expansion.weight() != num_rational::Rational64::from(weight.k as i64) {
            return Err(Error::WeightMismatch {
                expansion: expansion.weight().to_string(),
                requested: weight.k,
            });
        }
        Ok(Self { expansion, weight })
    }
}

impl GroupFunction for ThetaLift<'_> {
    fn genus(&self) -> usize {
        self.expansion.genus()
    }

    fn eval(&self, g: &SymplecticElement) -> Result<Complex64> {
        lift_q(self.expansion, g, self.weight)
    }
}

/// A constant function on the group.
pub struct Constant {
    pub genus: usize,
    pub value: Complex64,
}

impl GroupFunction for Constant {
    fn genus(&self) -> usize {
        self.genus
    }

    fn eval(&self, g: &SymplecticElement) -> Result<Complex64> {
        if g.genus() != self.genus {
            return Err(Error::DimensionMismatch {
                expected: self.genus,
                got: g.genus(),
            });
        }
        Ok(self.value)
    }
}

/// `(Q f)(g) = J(g, iI)^{-1} f(g·iI)`.
pub fn lift_q(f: &Expansion, g: &SymplecticElement, w: ScalarWeight) -> Result<Complex64> {
    if f.weight() != num_rational::Rational64::from(w.k as i64) {
        return Err(Error::WeightMismatch {
            expansion: f.weight().to_string(),
            requested: w.k,
        });
    }
    let i = SiegelPoint::i_identity(g.genus());
    let z = act(g, &i)?;
    let j = automorphy_factor(g, &i, w)?;
    Ok(eval_expansion(f, &z)?.value / j)
}

/// `(P F)(Z) = J(g, iI) F(g)` with `g` the canonical section over `Z`.
pub fn descend_p(f: &dyn GroupFunction, z: &SiegelPoint, w: ScalarWeight) -> Result<Complex64> {
    descend_p_via(f, &SymplecticElement::section(z), z, w)
}

/// `(P F)(Z)` computed through a caller-supplied `g` with `g·iI = Z`.
pub fn descend_p_via(
    f: &dyn GroupFunction,
    g: &SymplecticElement,
    z: &SiegelPoint,
    w: ScalarWeight,
) -> Result<Complex64> {
    let i = SiegelPoint::i_identity(g.genus());
    let image = act(g, &i)?;
    let gap = image.distance(z);
    if gap > 1e-8 * (1.0 + z.z().iter().map(|c| c.norm()).fold(0.0, f64::max)) {
        return Err(Error::InvalidPoint(format!("g·iI misses Z by {gap:.3e}")));
    }
    Ok(automorphy_factor(g, &i, w)? * f.eval(g)?)
}

/// `π_{kl}` with the padding blocks `t^{1/2} I` and `t^{-1/2} I`; `t = 1` is
/// the plain embedding and general `t` gives the family `g_t`.
pub fn embed_group_scaled(g: &SymplecticElement, l: usize, t: f64) -> Result<SymplecticElement> {
    let k = g.genus();
    if l <= k {
        return Err(Error::InvalidGenus(format!("target genus {l} must exceed {k}")));
    }
    if !(t > 0.0) {
        return Err(Error::InvalidMatrix(format!("scale {t} must be positive")));
    }
    let pad = |m: &RMat, corner: f64| {
        let mut out = RMat::zeros(l, l);
        out.view_mut((0, 0), (k, k)).copy_from(m);
        for i in k..l {
            out[(i, i)] = corner;
        }
        out
    };
    Ok(SymplecticElement {
        a: pad(&g.a, t.sqrt()),
        b: pad(&g.b, 0.0),
        c: pad(&g.c, 0.0),
        d: pad(&g.d, 1.0 / t.sqrt()),
    })
}

/// `π_{kl}(A B; C D)`: each block padded, with identity corners on the
/// diagonal blocks.
pub fn embed_group(g: &SymplecticElement, l: usize) -> Result<SymplecticElement> {
    embed_group_scaled(g, l, 1.0)
}

/// `Z ↦ diag(Z, iI_{l−k})`.
pub fn embed_point(z: &SiegelPoint, l: usize) -> Result<SiegelPoint> {
    let k = z.genus();
    if l <= k {
        return Err(Error::InvalidGenus(format!("target genus {l} must exceed {k}")));
    }
    let mut x = RMat::zeros(l, l);
    let mut y = RMat::identity(l, l);
    x.view_mut((0, 0), (k, k)).copy_from(&z.x);
    y.view_mut((0, 0), (k, k)).copy_from(&z.y);
    Ok(SiegelPoint { x, y })
}

/// Values along a schedule and whether they settled.
#[derive(Clone, Debug, PartialEq)]
pub struct LimitReport {
    pub schedule: Vec<f64>,
    pub values: Vec<Complex64>,
    /// `|value_{i+1} − value_i|`.
    pub differences: Vec<f64>,
    pub converged: bool,
    pub warning: Option<String>,
}

impl LimitReport {
    pub fn value(&self) -> Complex64 {
        *self.values.last().expect("schedule is nonempty")
    }

    /// Builds the report; the schedule must be increasing and nonempty.
    pub fn from_values(schedule: Vec<f64>, values: Vec<Complex64>, tolerance: f64) -> Self {
        let differences: Vec<f64> = values.windows(2).map(|w| (w[1] - w[0]).norm()).collect();
        let scale = values.last().map_or(1.0, |v| v.norm().max(1.0));
        let mut warning = None;
        if schedule.len() < 2 {
            warning = Some("schedule has a single point; convergence cannot be assessed".into());
        } else if schedule[schedule.len() - 1] / schedule[0] < 100.0 {
            warning = Some("schedule spans less than two decades".into());
        }
        let monotone = differences
            .windows(2)
            .all(|w| w[1] <= w[0] + tolerance * scale * 1e-3);
        let small = differences.last().is_some_and(|&d| d <= tolerance * scale);
        if warning.is_none() && !monotone {
            warning = Some("successive differences are not decreasing".into());
        }
        let converged = warning.is_none() && small;
        if warning.is_none() && !small {
            warning = Some(format!(
                "last difference {:.3e} above tolerance",
                differences.last().copied().unwrap_or(f64::NAN)
            ));
        }
        Self {
            schedule,
            values,
            differences,
            converged,
            warning,
        }
    }
}

impl fmt::Display for LimitReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (t, v)) in self.schedule.iter().zip(&self.values).enumerate() {
            write!(f, "  t={t:<10.3e} value={:.12e}{:+.12e}i", v.re, v.im)?;
            if i > 0 {
                write!(f, "  diff={:.3e}", self.differences[i - 1])?;
            }
            writeln!(f)?;
        }
        match &self.warning {
            Some(w) => writeln!(f, "  warning: {w}"),
            None => writeln!(f, "  converged"),
        }
    }
}

fn check_schedule(schedule: &[f64]) -> Result<()> {
    if schedule.is_empty() || schedule.iter().any(|&t| !(t > 0.0)) {
        return Err(Error::InvalidMatrix("schedule needs positive entries".into()));
    }
    if schedule.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidMatrix("schedule must be increasing".into()));
    }
    Ok(())
}

/// Tolerance used for the convergence verdict of limit reports.
pub const LIMIT_TOLERANCE: f64 = 1e-6;

/// `(L_{m,n} F)(g) = J_m(g, iI)^{-1} lim_t J_n(g_t, iI) F(g_t)` along
/// `schedule`.
pub fn siegel_l(
    f: &dyn GroupFunction,
    g: &SymplecticElement,
    schedule: &[f64],
    w: ScalarWeight,
) -> Result<LimitReport> {
    check_schedule(schedule)?;
    let n = f.genus();
    let m = g.genus();
    if m >= n {
        return Err(Error::InvalidGenus(format!("need m < n, got m={m}, n={n}")));
    }
    let jm = automorphy_factor(g, &SiegelPoint::i_identity(m), w)?;
    let i_n = SiegelPoint::i_identity(n);
    let values = schedule
        .iter()
        .map(|&t| {
            let gt = embed_group_scaled(g, n, t)?;
            Ok(automorphy_factor(&gt, &i_n, w)? * f.eval(&gt)? / jm)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(LimitReport::from_values(schedule.to_vec(), values, LIMIT_TOLERANCE))
}

/// `max_t |det(Y^{-1/2})^k F(g(itI))|` along `Y = tI`, a boundedness
/// surrogate on the ray.
pub fn ray_bound(f: &dyn GroupFunction, schedule: &[f64], w: ScalarWeight) -> Result<f64> {
    check_schedule(schedule)?;
    let n = f.genus();
    let mut max = 0.0f64;
    for &t in schedule {
        let z = SiegelPoint::i_scaled(n, t)?;
        let g = SymplecticElement::section(&z);
        let rho = w.apply(Complex64::new(t.powf(-0.5 * n as f64), 0.0));
        max = max.max((rho * f.eval(&g)?).norm());
    }
    Ok(max)
}

/// A random symmetric matrix with entries in `[−scale, scale]`.
pub fn random_symmetric<R: Rng + ?Sized>(n: usize, scale: f64, rng: &mut R) -> RMat {
    let m = RMat::from_fn(n, n, |_, _| rng.gen_range(-scale..=scale));
    symmetrize(&m)
}

/// A random point with `Y` close to `y_center · I`.
pub fn random_point<R: Rng + ?Sized>(n: usize, y_center: f64, spread: f64, rng: &mut R) -> SiegelPoint {
    let x = random_symmetric(n, 0.5, rng);
    let p = RMat::identity(n, n) + random_symmetric(n, spread, rng);
    let y = &p * &p.transpose() * y_center;
    SiegelPoint::new(x, y).expect("p·ᵗp is positive definite for small spread")
}

/// A random real symplectic element built from linear, translation and
/// lower-translation factors with entries of size about `scale`.
pub fn random_symplectic<R: Rng + ?Sized>(n: usize, scale: f64, rng: &mut R) -> SymplecticElement {
    let a = RMat::identity(n, n) + RMat::from_fn(n, n, |_, _| rng.gen_range(-scale..=scale));
    let lin = SymplecticElement::linear(a).expect("near-identity matrix is invertible");
    let up = SymplecticElement::translation(random_symmetric(n, scale, rng)).expect("symmetric");
    let low = SymplecticElement::translation(random_symmetric(n, scale, rng))
        .expect("symmetric")
        .conjugate_by_j();
    lin.mul(&up).mul(&low)
}

impl SymplecticElement {
    fn conjugate_by_j(&self) -> Self {
        let j = Self::j(self.genus());
        j.mul(self).mul(&j.inverse())
    }
}

/// A random unitary matrix, from the QR factorisation of a complex Gaussian
/// matrix.
pub fn random_unitary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CMat {
    let m = CMat::from_fn(n, n, |_, _| {
        Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
    });
    m.qr().q()
}

/// Standard generators of `Sp(2n, ℤ)`: `J`, the elementary translations
/// `(I, E_ij + E_ji; 0, I)` and `E_ii`, and `(U, 0; 0, ᵗU^{-1})` for the
/// elementary unimodular `U = I + E_01`.
pub fn modular_generators(n: usize) -> Vec<SymplecticElement> {
    let mut out = vec![SymplecticElement::j(n)];
    for i in 0..n {
        for j in i..n {
            let mut s = RMat::zeros(n, n);
            s[(i, j)] = 1.0;
            s[(j, i)] = 1.0;
            out.push(SymplecticElement::translation(s).expect("symmetric"));
        }
    }
    if n >= 2 {
        let mut u = RMat::identity(n, n);
        u[(0, 1)] = 1.0;
        out.push(SymplecticElement::linear(u).expect("unimodular"));
    }
    out
}

/// `g ↦ (L_{m,n} F)(g)` as a function on the genus-`m` group, using the last
/// value of the schedule.
pub struct SiegelLimit<'a> {
    pub inner: &'a dyn GroupFunction,
    pub genus: usize,
    pub schedule: Vec<f64>,
    pub weight: ScalarWeight,
}

impl GroupFunction for SiegelLimit<'_> {
    fn genus(&self) -> usize {
        self.genus
    }

    fn eval(&self, g: &SymplecticElement) -> Result<Complex64> {
        Ok(siegel_l(self.inner, g, &self.schedule, self.weight)?.value())
    }
}

/// Sample sizes and schedule for [`operator_suite`].
#[derive(Clone, Debug)]
pub struct SuiteConfig {
    pub t_schedule: Vec<f64>,
    pub cocycle_pairs: usize,
    pub sample_points: usize,
    pub seed: u64,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            t_schedule: vec![1e2, 1e3, 1e4],
            cocycle_pairs: 100,
            sample_points: 20,
            seed: 2024,
        }
    }
}

/// Largest deviations found by [`operator_suite`]; all relative to
/// `max(1, |reference|)`.
#[derive(Clone, Debug, Default)]
pub struct SuiteReport {
    /// `(m, n, max |L_{m,n} Q_n f − Q_m Φ f|)`.
    pub lift_commutes: Vec<(usize, usize, f64)>,
    /// `(m, n, max |P_m L_{m,n} F − Φ P_n F|)`.
    pub descent_commutes: Vec<(usize, usize, f64)>,
    pub cocycle: f64,
    pub round_trip: f64,
    pub k_equivariance: f64,
    pub section_independence: f64,
    /// `max |det(Y^{-1/2})^k F|` over the ray `Y = tI`, `1 ≤ t ≤ 100`.
    pub ray_bound: f64,
    /// `|L F − c|` for a constant `c` at weight 0.
    pub constant_limit: f64,
    pub warnings: Vec<String>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.warnings.is_empty()
            && self.lift_commutes.iter().all(|e| e.2 <= 1e-6)
            && self.descent_commutes.iter().all(|e| e.2 <= 1e-6)
            && self.cocycle <= 1e-9
            && self.round_trip <= 1e-9
            && self.k_equivariance <= 1e-9
            && self.section_independence <= 1e-9
            && self.ray_bound.is_finite()
            && self.constant_limit == 0.0
    }
}

impl fmt::Display for SuiteReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (m, n, d) in &self.lift_commutes {
            writeln!(f, "L_{{{m},{n}}} Q_{n} = Q_{m} Phi      max deviation {d:.3e}")?;
        }
        for (m, n, d) in &self.descent_commutes {
            writeln!(f, "P_{m} L_{{{m},{n}}} = Phi P_{n}      max deviation {d:.3e}")?;
        }
        writeln!(f, "automorphy cocycle          max deviation {:.3e}", self.cocycle)?;
        writeln!(f, "P Q round trip              max deviation {:.3e}", self.round_trip)?;
        writeln!(f, "right K-equivariance        max deviation {:.3e}", self.k_equivariance)?;
        writeln!(f, "section independence        max deviation {:.3e}", self.section_independence)?;
        writeln!(f, "ray bound (Y = tI)          max value     {:.6e}", self.ray_bound)?;
        writeln!(f, "weight-0 constant limit     deviation     {:.3e}", self.constant_limit)?;
        for w in &self.warnings {
            writeln!(f, "warning: {w}")?;
        }
        Ok(())
    }
}

fn rel(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / b.norm().max(1.0)
}

/// Numeric checks of the operator calculus on a theta family.
///
/// `family[n]` must be the genus-`n` member, of integral weight `k`, for
/// consecutive `n` starting at 0. The commuting squares are checked for
/// every pair `(n−1, n)` with `n ≥ 2`; cocycle, round-trip and
/// equivariance checks run over the genera present.
pub fn operator_suite(family: &[Expansion], config: &SuiteConfig) -> Result<SuiteReport> {
    use rand::SeedableRng;
    if family.len() < 2 || family.iter().enumerate().any(|(n, e)| e.genus() != n) {
        return Err(Error::InvalidGenus("need consecutive genera 0, 1, …".into()));
    }
    let weight = family[0].weight();
    if !weight.is_integer() || *weight.numer() < 0 {
        return Err(Error::WeightMismatch {
            expansion: weight.to_string(),
            requested: 0,
        });
    }
    let w = ScalarWeight::new(*weight.numer() as u32);
    check_schedule(&config.t_schedule)?;
    let mut rng = rand::rngs::StdRng::seed_from_u64(config.seed);
    let mut report = SuiteReport::default();
    let top = family.len() - 1;

    for n in 2..=top {
        let m = n - 1;
        let upper = ThetaLift::new(&family[n], w)?;
        let lower = ThetaLift::new(&family[m], w)?;
        let phi = crate::siegel::siegel_phi(&family[n])?;
        let limit = SiegelLimit {
            inner: &upper,
            genus: m,
            schedule: config.t_schedule.clone(),
            weight: w,
        };
        let mut lift_dev = 0.0f64;
        let mut descent_dev = 0.0f64;
        for _ in 0..config.sample_points.max(1) {
            let g = random_symplectic(m, 0.2, &mut rng);
            let rep = siegel_l(&upper, &g, &config.t_schedule, w)?;
            if let Some(msg) = &rep.warning {
                if !report.warnings.contains(msg) {
                    report.warnings.push(msg.clone());
                }
            }
            lift_dev = lift_dev.max(rel(rep.value(), lower.eval(&g)?));
            let z = random_point(m, 1.0, 0.2, &mut rng);
            let lhs = descend_p(&limit, &z, w)?;
            descent_dev = descent_dev.max(rel(lhs, eval_expansion(&phi, &z)?.value));
        }
        report.lift_commutes.push((m, n, lift_dev));
        report.descent_commutes.push((m, n, descent_dev));
    }

    for i in 0..config.cocycle_pairs {
        let n = 1 + i % top;
        let g1 = random_symplectic(n, 0.5, &mut rng);
        let g2 = random_symplectic(n, 0.5, &mut rng);
        let z = random_point(n, 1.0, 0.3, &mut rng);
        let lhs = automorphy_factor(&g1.mul(&g2), &z, w)?;
        let rhs = automorphy_factor(&g1, &act(&g2, &z)?, w)? * automorphy_factor(&g2, &z, w)?;
        report.cocycle = report.cocycle.max((lhs - rhs).norm() / lhs.norm().max(f64::MIN_POSITIVE));
    }

    for i in 0..config.sample_points {
        let n = 1 + i % top;
        let f = ThetaLift::new(&family[n], w)?;
        let z = random_point(n, 1.0, 0.2, &mut rng);
        let direct = eval_expansion(&family[n], &z)?.value;
        report.round_trip = report.round_trip.max(rel(descend_p(&f, &z, w)?, direct));

        let g = SymplecticElement::section(&z);
        let k = SymplecticElement::rotation(&random_unitary(n, &mut rng))?;
        let jk = automorphy_factor(&k, &SiegelPoint::i_identity(n), w)?;
        let fg = f.eval(&g)?;
        report.k_equivariance = report.k_equivariance.max(rel(f.eval(&g.mul(&k))? * jk, fg));
        let via = descend_p_via(&f, &g.mul(&k), &z, w)?;
        report.section_independence = report.section_independence.max(rel(via, descend_p(&f, &z, w)?));
    }

    let ray: Vec<f64> = (0..=20).map(|i| 10f64.powf(i as f64 / 10.0)).collect();
    for n in 1..=top {
        let f = ThetaLift::new(&family[n], w)?;
        report.ray_bound = report.ray_bound.max(ray_bound(&f, &ray, w)?);
    }

    let c = Complex64::new(1.5, -0.25);
    let constant = Constant { genus: 2, value: c };
    let rep = siegel_l(&constant, &SymplecticElement::identity(1), &config.t_schedule, ScalarWeight::new(0))?;
    report.constant_limit = (rep.value() - c).norm();
    if let Some(msg) = rep.warning {
        if !report.warnings.contains(&msg) {
            report.warnings.push(msg);
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    fn rng() -> rand::rngs::StdRng {
        rand::rngs::StdRng::seed_from_u64(7)
    }

    #[test]
    fn identity_and_j_fix_i() {
        for n in 1..=3 {
            let i = SiegelPoint::i_identity(n);
            assert!(act(&SymplecticElement::identity(n), &i).unwrap().distance(&i) < 1e-15);
            assert!(act(&SymplecticElement::j(n), &i).unwrap().distance(&i) < 1e-14);
        }
    }

    #[test]
    fn action_is_a_group_action() {
        let mut r = rng();
        for n in 1..=3 {
            for _ in 0..20 {
                let g1 = random_symplectic(n, 0.5, &mut r);
                let g2 = random_symplectic(n, 0.5, &mut r);
                assert!(g1.symplectic_deviation() < 1e-12);
                let z = random_point(n, 1.0, 0.2, &mut r);
                let lhs = act(&g1.mul(&g2), &z).unwrap();
                let rhs = act(&g1, &act(&g2, &z).unwrap()).unwrap();
                assert!(lhs.distance(&rhs) < 1e-10);
            }
        }
    }

    #[test]
    fn section_and_rotation() {
        let mut r = rng();
        let z = random_point(2, 1.5, 0.3, &mut r);
        let g = SymplecticElement::section(&z);
        assert!(g.symplectic_deviation() < 1e-12);
        assert!(act(&g, &SiegelPoint::i_identity(2)).unwrap().distance(&z) < 1e-12);
        let k = SymplecticElement::rotation(&random_unitary(2, &mut r)).unwrap();
        let i = SiegelPoint::i_identity(2);
        assert!(act(&k, &i).unwrap().distance(&i) < 1e-12);
    }

    #[test]
    fn embeddings() {
        let g = SymplecticElement::identity(1);
        assert_eq!(embed_group(&g, 2).unwrap(), SymplecticElement::identity(2));
        let z = SiegelPoint::i_identity(1);
        assert_eq!(embed_point(&z, 2).unwrap(), SiegelPoint::i_identity(2));
        assert!(embed_point(&z, 1).is_err());
        let mut r = rng();
        let g = random_symplectic(2, 0.5, &mut r);
        assert!(embed_group(&g, 3).unwrap().symplectic_deviation() < 1e-12);
        assert!(embed_group_scaled(&g, 4, 1e4).unwrap().symplectic_deviation() < 1e-10);
    }

    #[test]
    fn not_symplectic_is_rejected() {
        let two = RMat::identity(1, 1) * 2.0;
        let one = RMat::identity(1, 1);
        let z = RMat::zeros(1, 1);
        assert!(matches!(
            SymplecticElement::new(two, z.clone(), z, one),
            Err(Error::NotSymplectic(_))
        ));
    }

    #[test]
    fn limit_report_flags_single_point() {
        let rep = LimitReport::from_values(vec![1e4], vec![Complex64::new(1.0, 0.0)], 1e-6);
        assert!(!rep.converged);
        assert!(rep.warning.is_some());
        let c = Constant {
            genus: 2,
            value: Complex64::new(3.0, 0.0),
        };
        let rep = siegel_l(&c, &SymplecticElement::identity(1), &[1e2, 1e3, 1e4], ScalarWeight::new(0)).unwrap();
        assert!(rep.converged);
        assert_eq!(rep.value(), Complex64::new(3.0, 0.0));
    }

    #[test]
    fn suite_on_e8_family() {
        let fam = crate::siegel::theta_stable_family(&crate::qforms::make_e8(), 3, 6).unwrap();
        let cfg = SuiteConfig {
            cocycle_pairs: 30,
            sample_points: 6,
            ..SuiteConfig::default()
        };
        let rep = operator_suite(fam.members(), &cfg).unwrap();
        assert!(rep.passed(), "{rep}");
        let short = SuiteConfig {
            t_schedule: vec![1e4],
            ..cfg
        };
        let rep = operator_suite(fam.members(), &short).unwrap();
        assert!(!rep.passed());
        assert!(!rep.warnings.is_empty());
    }
}
