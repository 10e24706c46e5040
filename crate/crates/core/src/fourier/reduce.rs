//! Integral equivalence reduction of Fourier indices before counting.
//!
//! `r(ᵗU T U, Q) = r(T, Q)` for unimodular `U` (the bijection `G ↦ GU`), and a
//! zero row/column of `T` forces the matching column of `G` to vanish because
//! `Q` is positive definite. So any psd `T` can be replaced by a positive
//! definite `T'` of rank `rank(T)` with the same representation number. The
//! reduction here removes the kernel exactly, then lowers the trace by
//! pairwise size reduction, and finally picks a representative under signed
//! permutations so equivalent indices share a memo entry.

use crate::exact;

/// A positive definite key: `k × k`, diagonal nonincreasing.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ReducedKey {
    pub k: usize,
    pub t: Vec<i64>,
}

impl ReducedKey {
    pub fn entry(&self, i: usize, j: usize) -> i64 {
        self.t[i * self.k + j]
    }

    pub fn diagonal(&self) -> Vec<i64> {
        (0..self.k).map(|i| self.entry(i, i)).collect()
    }
}

/// Reduce a psd integral matrix (row-major `n × n`).
pub fn reduce(t: &[i64], n: usize) -> ReducedKey {
    let mut m = t.to_vec();
    let mut k = n;
    loop {
        size_reduce(&mut m, k);
        let (m2, k2) = drop_zero_columns(&m, k);
        m = m2;
        k = k2;
        if k == 0 {
            break;
        }
        match exact::primitive_kernel_vector(&m, k) {
            None => break,
            Some(w) => {
                let u = completion(&w);
                let tm = exact::congruence(&m, &u, k);
                debug_assert!((0..k).all(|j| tm[(k - 1) * k + j] == 0));
                m = tm;
            }
        }
    }
    canonical(&m, k)
}

/// Pairwise size reduction: replace column `i` by `i − q·j` while that
/// strictly lowers `t_ii`. The trace decreases each step, so this terminates.
pub fn size_reduce(m: &mut [i64], k: usize) {
    loop {
        let mut changed = false;
        for i in 0..k {
            for j in 0..k {
                if i == j {
                    continue;
                }
                let tjj = m[j * k + j];
                if tjj == 0 {
                    continue;
                }
                let tij = m[i * k + j];
                if 2 * tij.abs() <= tjj {
                    continue;
                }
                let q = (2 * tij + tjj * tij.signum()) / (2 * tjj);
                if q == 0 {
                    continue;
                }
                let tii = m[i * k + i];
                let new_ii = tii - 2 * q * tij + q * q * tjj;
                if new_ii >= tii {
                    continue;
                }
                for l in 0..k {
                    if l != i {
                        let v = m[i * k + l] - q * m[j * k + l];
                        m[i * k + l] = v;
                        m[l * k + i] = v;
                    }
                }
                m[i * k + i] = new_ii;
                changed = true;
            }
        }
        if !changed {
            return;
        }
    }
}

fn drop_zero_columns(m: &[i64], k: usize) -> (Vec<i64>, usize) {
    let keep: Vec<usize> = (0..k).filter(|&i| m[i * k + i] != 0).collect();
    (exact::principal_submatrix(m, k, &keep), keep.len())
}

/// A unimodular `U` whose last column is the primitive vector `w`.
///
/// `w` is driven to `e_last` by integer row operations; `U` accumulates their
/// inverses as column operations, which keeps `U · w_current = w` invariant.
pub fn completion(w: &[i64]) -> Vec<i64> {
    let k = w.len();
    let mut a = w.to_vec();
    let mut u = vec![0i64; k * k];
    for i in 0..k {
        u[i * k + i] = 1;
    }
    loop {
        let nonzero: Vec<usize> = (0..k).filter(|&i| a[i] != 0).collect();
        if nonzero.len() == 1 {
            let p = nonzero[0];
            debug_assert_eq!(a[p].abs(), 1, "kernel vector must be primitive");
            if p != k - 1 {
                a.swap(p, k - 1);
                for r in 0..k {
                    u.swap(r * k + p, r * k + k - 1);
                }
            }
            if a[k - 1] < 0 {
                a[k - 1] = 1;
                for r in 0..k {
                    u[r * k + k - 1] = -u[r * k + k - 1];
                }
            }
            break;
        }
        let j = *nonzero.iter().min_by_key(|&&i| a[i].abs()).expect("nonempty");
        for &i in &nonzero {
            if i == j {
                continue;
            }
            let q = a[i].div_euclid(a[j]);
            if q == 0 {
                continue;
            }
            a[i] -= q * a[j];
            for r in 0..k {
                u[r * k + j] += q * u[r * k + i];
            }
        }
    }
    u
}

/// Representative under signed permutations: diagonal nonincreasing, then
/// the lexicographically smallest upper triangle.
fn canonical(m: &[i64], k: usize) -> ReducedKey {
    // Stable sort by nonincreasing diagonal first.
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| m[b * k + b].cmp(&m[a * k + a]));
    let sorted = exact::principal_submatrix(m, k, &order);
    let mut groups = 1u64;
    let mut run = 1u64;
    for i in 1..k {
        if sorted[i * k + i] == sorted[(i - 1) * k + i - 1] {
            run += 1;
            groups = groups.saturating_mul(run);
        } else {
            run = 1;
        }
    }
    let candidates = groups.saturating_mul(1u64 << k.min(63));
    if candidates > 200_000 {
        return ReducedKey { k, t: sorted };
    }
    let mut best: Option<Vec<i64>> = None;
    let mut perm: Vec<usize> = (0..k).collect();
    permutations_within_groups(&sorted, k, &mut perm, 0, &mut |p| {
        let pm = exact::principal_submatrix(&sorted, k, p);
        // Flipping the sign of column 0 is absorbed by flipping all others.
        for signs in 0u64..(1u64 << k.saturating_sub(1)) {
            let sign = |i: usize| if i > 0 && signs & (1 << (i - 1)) != 0 { -1 } else { 1 };
            let mut cand = Vec::with_capacity(k * (k + 1) / 2);
            for i in 0..k {
                for j in i..k {
                    cand.push(pm[i * k + j] * sign(i) * sign(j));
                }
            }
            if best.as_ref().is_none_or(|b| cand < *b) {
                best = Some(cand);
            }
        }
    });
    let upper = best.expect("at least the identity permutation");
    let mut t = vec![0i64; k * k];
    let mut it = upper.into_iter();
    for i in 0..k {
        for j in i..k {
            let v = it.next().expect("triangle length");
            t[i * k + j] = v;
            t[j * k + i] = v;
        }
    }
    ReducedKey { k, t }
}

fn permutations_within_groups(
    m: &[i64],
    k: usize,
    perm: &mut Vec<usize>,
    pos: usize,
    f: &mut impl FnMut(&[usize]),
) {
    if pos == k {
        f(perm);
        return;
    }
    for i in pos..k {
        if m[perm[i] * k + perm[i]] != m[perm[pos] * k + perm[pos]] {
            continue;
        }
        perm.swap(pos, i);
        permutations_within_groups(m, k, perm, pos + 1, f);
        perm.swap(pos, i);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Signed;

    #[test]
    fn completion_is_unimodular_with_last_column_w() {
        for w in [vec![3, 5], vec![2, -3, 7], vec![0, 0, 1], vec![-1, 0, 0], vec![6, 10, 15]] {
            let k = w.len();
            let u = completion(&w);
            let last: Vec<i64> = (0..k).map(|r| u[r * k + k - 1]).collect();
            assert_eq!(last, w);
            assert_eq!(exact::det(&u, k).abs(), num_bigint::BigInt::from(1));
        }
    }

    #[test]
    fn dependent_roots_reduce_to_a2() {
        // Gram of a, b, −(a+b) for an A2 pair.
        let key = reduce(&[2, -1, -1, -1, 2, -1, -1, -1, 2], 3);
        assert_eq!(key.k, 2);
        assert_eq!(key.diagonal(), vec![2, 2]);
        assert_eq!(key.entry(0, 1).abs(), 1);
    }

    #[test]
    fn zero_padding_is_dropped() {
        let key = reduce(&[4, 1, 0, 1, 2, 0, 0, 0, 0], 3);
        assert_eq!(key, reduce(&[4, 1, 1, 2], 2));
        assert_eq!(key.k, 2);
    }

    #[test]
    fn size_reduction_lowers_trace() {
        let key = reduce(&[2, 2, 2, 4], 2);
        assert_eq!(key.t, vec![2, 0, 0, 2]);
        let key = reduce(&[6, 3, 3, 2], 2);
        assert_eq!(key.diagonal(), vec![2, 2]);
    }

    #[test]
    fn signed_permutations_share_a_key() {
        let a = reduce(&[2, 1, 0, 1, 2, -1, 0, -1, 2], 3);
        let b = reduce(&[2, -1, 0, -1, 2, -1, 0, -1, 2], 3);
        let c = reduce(&[2, 0, 1, 0, 2, 1, 1, 1, 2], 3);
        assert_eq!(a, b);
        assert_eq!(a, c);
    }

    #[test]
    fn rank_one() {
        let key = reduce(&[2, 2, 2, 2, 2, 2, 2, 2, 2], 3);
        assert_eq!(key, ReducedKey { k: 1, t: vec![2] });
        assert_eq!(reduce(&[0; 4], 2).k, 0);
    }
}
