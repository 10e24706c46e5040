mod common;

use std::collections::BTreeSet;

use common::{coordinate_count, e8_theta_coefficient, e8e8_count};
use nalgebra::DMatrix;
use proptest::prelude::*;
use stableforms::enumeration::{constrained_extend, count_by_norm, vectors_of_norm};
use stableforms::qforms::{make_d16_plus, make_e8, make_e8e8, verify_even_unimodular, QuadraticForm};

#[test]
fn coordinate_model_counts() {
    assert_eq!(coordinate_count(8, 2), 240);
    assert_eq!(coordinate_count(8, 4), 2160);
    assert_eq!(coordinate_count(16, 2), 480);
    assert_eq!(coordinate_count(16, 4), 61920);
    assert_eq!(e8e8_count(4), 61920);
    for m in 0..=5 {
        assert_eq!(coordinate_count(8, 2 * m), e8_theta_coefficient(m));
    }
}

#[test]
fn built_in_forms_match_coordinate_models() {
    let (e8, e8e8, d16) = (make_e8(), make_e8e8(), make_d16_plus());
    for q in [&e8, &e8e8, &d16] {
        assert!(verify_even_unimodular(q).passed(), "{}", q.label());
    }
    for m in [0u64, 2, 4, 6] {
        assert_eq!(count_by_norm(&e8, m as i64).unwrap(), coordinate_count(8, m));
        assert_eq!(count_by_norm(&d16, m as i64).unwrap(), coordinate_count(16, m));
        assert_eq!(count_by_norm(&e8e8, m as i64).unwrap(), e8e8_count(m));
    }
}

#[test]
fn e8_root_inner_products() {
    let q = make_e8();
    let roots = vectors_of_norm(&q, 2).unwrap();
    let rho = roots.vector(0);
    let mut hist = std::collections::BTreeMap::new();
    for v in roots.iter() {
        *hist.entry(q.evaluate(&rho, &v).unwrap()).or_insert(0) += 1;
    }
    assert_eq!(hist.into_iter().collect::<Vec<_>>(), vec![(-2, 1), (-1, 56), (0, 126), (1, 56), (2, 1)]);
    assert_eq!(constrained_extend(&q, std::slice::from_ref(&rho), 2, &[1]).unwrap().len(), 56);
    assert_eq!(constrained_extend(&q, std::slice::from_ref(&rho), 2, &[2]).unwrap(), vec![rho]);
}

/// Every integral `x` in the box `|x_i| ≤ √(m·(Q⁻¹)_ii)` of norm `m`.
fn box_enumeration(q: &QuadraticForm, m: i64) -> BTreeSet<Vec<i64>> {
    let n = q.rank();
    let g = DMatrix::from_fn(n, n, |i, j| q.entry(i, j) as f64);
    let inv = g.try_inverse().unwrap();
    let bounds: Vec<i64> = (0..n).map(|i| (m as f64 * inv[(i, i)]).sqrt().floor() as i64 + 1).collect();
    let mut out = BTreeSet::new();
    let mut x = vec![0i64; n];
    fn rec(q: &QuadraticForm, m: i64, bounds: &[i64], x: &mut Vec<i64>, i: usize, out: &mut BTreeSet<Vec<i64>>) {
        if i == x.len() {
            if q.norm(x).unwrap() == m {
                out.insert(x.clone());
            }
            return;
        }
        for v in -bounds[i]..=bounds[i] {
            x[i] = v;
            rec(q, m, bounds, x, i + 1, out);
        }
    }
    rec(q, m, &bounds, &mut x, 0, &mut out);
    out
}

fn d4() -> QuadraticForm {
    QuadraticForm::from_rows(
        "D4",
        &[vec![2, -1, 0, 0], vec![-1, 2, -1, -1], vec![0, -1, 2, 0], vec![0, -1, 0, 2]],
    )
    .unwrap()
}

#[test]
fn box_spot_checks_on_d4() {
    let q = d4();
    for m in [0, 2, 4, 6] {
        let shell: BTreeSet<Vec<i64>> = vectors_of_norm(&q, m).unwrap().iter().collect();
        assert_eq!(shell, box_enumeration(&q, m), "norm {m}");
    }
    assert_eq!(vectors_of_norm(&q, 2).unwrap().len(), 24);
}

fn even_form() -> impl Strategy<Value = QuadraticForm> {
    (2usize..=4)
        .prop_flat_map(|n| (Just(n), proptest::collection::vec(-1i64..=1, n * n), proptest::collection::vec(1i64..=3, n)))
        .prop_map(|(n, off, diag)| {
            let mut g = vec![0; n * n];
            for i in 0..n {
                for j in 0..i {
                    g[i * n + j] = off[i * n + j];
                    g[j * n + i] = off[i * n + j];
                }
                // Diagonal dominance keeps the form positive definite.
                g[i * n + i] = 2 * (diag[i] + n as i64 - 1);
            }
            QuadraticForm::new("random", n, g).unwrap()
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn shells_match_box_enumeration(q in even_form(), half in 0i64..=4) {
        let m = 2 * half;
        let shell = vectors_of_norm(&q, m).unwrap();
        let set: BTreeSet<Vec<i64>> = shell.iter().collect();
        prop_assert_eq!(set.len(), shell.len());
        prop_assert_eq!(&set, &box_enumeration(&q, m));
        prop_assert_eq!(count_by_norm(&q, m).unwrap(), shell.len() as u64);
    }

    #[test]
    fn shells_are_negation_symmetric_and_sorted(half in 1i64..=2, which in 0usize..3) {
        let q = [make_e8(), make_e8e8(), make_d16_plus()][which].clone();
        let shell = vectors_of_norm(&q, 2 * half).unwrap();
        prop_assert_eq!(shell.len() % 2, 0);
        let n = shell.len();
        for i in 0..n {
            let neg: Vec<i64> = shell.vector(n - 1 - i).iter().map(|c| -c).collect();
            prop_assert_eq!(shell.vector(i), neg);
        }
        prop_assert!((1..n).all(|i| shell.row(i - 1) < shell.row(i)));
    }

    #[test]
    fn norms_are_even(x in proptest::collection::vec(-20i64..=20, 16), which in 0usize..3) {
        let q = [make_e8(), make_e8e8(), make_d16_plus()][which].clone();
        let x = &x[..q.rank()];
        prop_assert_eq!(q.norm(x).unwrap() % 2, 0);
        let y: Vec<i64> = x.iter().rev().cloned().collect();
        prop_assert_eq!(q.evaluate(x, &y).unwrap(), q.evaluate(&y, x).unwrap());
    }

    #[test]
    fn shell_size_survives_basis_negation(signs in proptest::collection::vec(any::<bool>(), 4), half in 1i64..=3) {
        let q = d4();
        let s: Vec<i64> = signs.iter().map(|&b| if b { -1 } else { 1 }).collect();
        let g: Vec<i64> = (0..16).map(|k| q.gram()[k] * s[k / 4] * s[k % 4]).collect();
        let flipped = QuadraticForm::new("D4'", 4, g).unwrap();
        prop_assert_eq!(
            vectors_of_norm(&flipped, 2 * half).unwrap().len(),
            vectors_of_norm(&q, 2 * half).unwrap().len()
        );
    }
}
