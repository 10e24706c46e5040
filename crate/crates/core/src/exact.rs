//! Exact integer linear algebra on small dense matrices.
//!
//! Matrices are row-major `&[i64]` slices of an `n × n` matrix. Determinants
//! use fraction-free (Bareiss) elimination: every division is exact, so
//! intermediate values stay integral. A checked `i128` pass is tried first and
//! the computation falls back to [`BigInt`] on overflow.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Determinant by Bareiss elimination in `i128`, `None` on overflow.
pub fn det_i128(m: &[i64], n: usize) -> Option<i128> {
    debug_assert_eq!(m.len(), n * n);
    if n == 0 {
        return Some(1);
    }
    let mut a: Vec<i128> = m.iter().map(|&v| v as i128).collect();
    let mut sign = 1i128;
    let mut prev = 1i128;
    for k in 0..n - 1 {
        if a[k * n + k] == 0 {
            let Some(p) = (k + 1..n).find(|&r| a[r * n + k] != 0) else {
                return Some(0);
            };
            for c in 0..n {
                a.swap(k * n + c, p * n + c);
            }
            sign = -sign;
        }
        let pivot = a[k * n + k];
        for i in k + 1..n {
            for j in k + 1..n {
                let lhs = a[i * n + j].checked_mul(pivot)?;
                let rhs = a[i * n + k].checked_mul(a[k * n + j])?;
                a[i * n + j] = lhs.checked_sub(rhs)? / prev;
            }
            a[i * n + k] = 0;
        }
        prev = pivot;
    }
    Some(sign * a[n * n - 1])
}

/// Determinant by Bareiss elimination over arbitrary-precision integers.
pub fn det_bigint(m: &[BigInt], n: usize) -> BigInt {
    debug_assert_eq!(m.len(), n * n);
    if n == 0 {
        return BigInt::one();
    }
    let mut a = m.to_vec();
    let mut negate = false;
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if a[k * n + k].is_zero() {
            let Some(p) = (k + 1..n).find(|&r| !a[r * n + k].is_zero()) else {
                return BigInt::zero();
            };
            for c in 0..n {
                a.swap(k * n + c, p * n + c);
            }
            negate = !negate;
        }
        let pivot = a[k * n + k].clone();
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &a[i * n + j] * &pivot - &a[i * n + k] * &a[k * n + j];
                a[i * n + j] = v / &prev;
            }
            a[i * n + k] = BigInt::zero();
        }
        prev = pivot;
    }
    let d = a[n * n - 1].clone();
    if negate {
        -d
    } else {
        d
    }
}

/// Exact determinant of an integer matrix.
pub fn det(m: &[i64], n: usize) -> BigInt {
    match det_i128(m, n) {
        Some(d) => BigInt::from(d),
        None => {
            let big: Vec<BigInt> = m.iter().map(|&v| BigInt::from(v)).collect();
            det_bigint(&big, n)
        }
    }
}

/// Submatrix on the given row/column index set.
pub fn principal_submatrix(m: &[i64], n: usize, idx: &[usize]) -> Vec<i64> {
    let mut out = Vec::with_capacity(idx.len() * idx.len());
    for &i in idx {
        for &j in idx {
            out.push(m[i * n + j]);
        }
    }
    out
}

/// Leading principal minors `det M_1, …, det M_n`.
pub fn leading_minors(m: &[i64], n: usize) -> Vec<BigInt> {
    (1..=n)
        .map(|k| {
            let idx: Vec<usize> = (0..k).collect();
            det(&principal_submatrix(m, n, &idx), k)
        })
        .collect()
}

/// Positive semidefiniteness of a symmetric integer matrix: every principal
/// minor (all `2^n − 1` of them) is nonnegative.
pub fn is_psd(m: &[i64], n: usize) -> bool {
    if (0..n).any(|i| m[i * n + i] < 0) {
        return false;
    }
    let mut idx = Vec::with_capacity(n);
    for mask in 1u32..(1u32 << n) {
        if mask.count_ones() == 1 {
            continue;
        }
        idx.clear();
        idx.extend((0..n).filter(|&i| mask & (1 << i) != 0));
        let k = idx.len();
        let sub = principal_submatrix(m, n, &idx);
        let d = match det_i128(&sub, k) {
            Some(d) => d.signum(),
            None => {
                let big: Vec<BigInt> = sub.iter().map(|&v| BigInt::from(v)).collect();
                let d = det_bigint(&big, k);
                if d.is_negative() {
                    -1
                } else {
                    0
                }
            }
        };
        if d < 0 {
            return false;
        }
    }
    true
}

/// Positive definiteness via leading principal minors.
pub fn is_positive_definite(m: &[i64], n: usize) -> bool {
    leading_minors(m, n).iter().all(|d| d.is_positive())
}

/// A primitive integer vector in the kernel of a singular integer matrix, or
/// `None` if the matrix is nonsingular.
pub fn primitive_kernel_vector(m: &[i64], n: usize) -> Option<Vec<i64>> {
    // Reduced row echelon form over ℚ.
    let mut a: Vec<BigRational> = m
        .iter()
        .map(|&v| BigRational::from_integer(BigInt::from(v)))
        .collect();
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..n {
        let Some(p) = (row..n).find(|&r| !a[r * n + col].is_zero()) else {
            continue;
        };
        for c in 0..n {
            a.swap(row * n + c, p * n + c);
        }
        let inv = a[row * n + col].recip();
        for c in 0..n {
            a[row * n + c] = &a[row * n + c] * &inv;
        }
        for r in 0..n {
            if r != row && !a[r * n + col].is_zero() {
                let f = a[r * n + col].clone();
                for c in 0..n {
                    let delta = &f * &a[row * n + c];
                    a[r * n + c] -= delta;
                }
            }
        }
        pivots.push(col);
        row += 1;
        if row == n {
            break;
        }
    }
    let free = (0..n).find(|c| !pivots.contains(c))?;
    let mut v = vec![BigRational::zero(); n];
    v[free] = BigRational::one();
    for (r, &pc) in pivots.iter().enumerate() {
        v[pc] = -a[r * n + free].clone();
    }
    let mut lcm = BigInt::one();
    for x in &v {
        lcm = lcm.lcm(x.denom());
    }
    let ints: Vec<BigInt> = v.iter().map(|x| x.numer() * (&lcm / x.denom())).collect();
    let mut g = BigInt::zero();
    for x in &ints {
        g = g.gcd(x);
    }
    let out: Vec<i64> = ints
        .iter()
        .map(|x| i64::try_from(x / &g).expect("kernel vector entry fits in i64"))
        .collect();
    Some(out)
}

/// `ᵗU · M · U` for integer matrices.
pub fn congruence(m: &[i64], u: &[i64], n: usize) -> Vec<i64> {
    let mut mu = vec![0i64; n * n];
    for i in 0..n {
        for j in 0..n {
            mu[i * n + j] = (0..n).map(|k| m[i * n + k] * u[k * n + j]).sum();
        }
    }
    let mut out = vec![0i64; n * n];
    for i in 0..n {
        for j in 0..n {
            out[i * n + j] = (0..n).map(|k| u[k * n + i] * mu[k * n + j]).sum();
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_determinants() {
        assert_eq!(det(&[2, 0, 0, 2], 2), BigInt::from(4));
        assert_eq!(det(&[0, 1, 1, 0], 2), BigInt::from(-1));
        assert_eq!(det(&[1, 2, 3, 4, 5, 6, 7, 8, 9], 3), BigInt::zero());
        assert_eq!(det(&[], 0), BigInt::one());
    }

    #[test]
    fn bigint_path_agrees_with_i128() {
        let m = [3, 1, 4, 1, 5, 9, 2, 6, 5, 3, 5, 8, 9, 7, 9, 3];
        let big: Vec<BigInt> = m.iter().map(|&v| BigInt::from(v)).collect();
        assert_eq!(BigInt::from(det_i128(&m, 4).unwrap()), det_bigint(&big, 4));
    }

    #[test]
    fn psd_detection() {
        assert!(is_psd(&[2, 1, 1, 2], 2));
        assert!(is_psd(&[2, 2, 2, 2], 2));
        assert!(!is_psd(&[2, 1, 1, 0], 2));
        // leading minors nonnegative but not psd
        assert!(!is_psd(&[0, 0, 0, -2], 2));
    }

    #[test]
    fn kernel_vector_is_primitive() {
        let a2_dep = [2, -1, -1, -1, 2, -1, -1, -1, 2];
        let w = primitive_kernel_vector(&a2_dep, 3).unwrap();
        let mw: Vec<i64> = (0..3)
            .map(|i| (0..3).map(|j| a2_dep[i * 3 + j] * w[j]).sum())
            .collect();
        assert_eq!(mw, vec![0, 0, 0]);
        assert_eq!(w.iter().map(|x| x.abs()).max(), Some(1));
        assert!(primitive_kernel_vector(&[2, 1, 1, 2], 2).is_none());
    }
}
