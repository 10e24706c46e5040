#![allow(dead_code)]

/// Number of vectors of norm `m` in the lattice `D_d ∪ (D_d + (½)^d)`, for
/// `d ≡ 0 mod 8`, counted in doubled coordinates `y = 2x`: every entry of
/// `y` has the same parity, `Σ y ≡ 0 mod 4` and `Σ y² = 4m`.
///
/// For `d = 8` this is E8 and for `d = 16` it is D16+.
pub fn coordinate_count(d: usize, m: u64) -> u64 {
    let target = 4 * m as usize;
    let mut total = 0;
    for parity in 0..2i64 {
        let values: Vec<i64> = (-(2 * m as i64 + 1)..=2 * m as i64 + 1)
            .filter(|v| v.rem_euclid(2) == parity && (v * v) as usize <= target)
            .collect();
        // ways[s][r]: partial vectors with square sum s and coordinate sum ≡ r mod 4.
        let mut ways = vec![[0u64; 4]; target + 1];
        ways[0][0] = 1;
        for _ in 0..d {
            let mut next = vec![[0u64; 4]; target + 1];
            for s in 0..=target {
                for r in 0..4 {
                    let w = ways[s][r];
                    if w == 0 {
                        continue;
                    }
                    for &v in &values {
                        let s2 = s + (v * v) as usize;
                        if s2 <= target {
                            next[s2][(r as i64 + v).rem_euclid(4) as usize] += w;
                        }
                    }
                }
            }
            ways = next;
        }
        total += ways[target][0];
    }
    total
}

/// `240 σ₃(m)` for `m ≥ 1`, and 1 for `m = 0`.
pub fn e8_theta_coefficient(m: u64) -> u64 {
    if m == 0 {
        return 1;
    }
    240 * (1..=m).filter(|d| m % d == 0).map(|d| d * d * d).sum::<u64>()
}

/// Norm-`m` count of E8 ⊕ E8 from the genus-1 counts of each summand.
pub fn e8e8_count(m: u64) -> u64 {
    (0..=m).map(|a| coordinate_count(8, a) * coordinate_count(8, m - a)).sum()
}
