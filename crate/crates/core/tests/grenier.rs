use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use stableforms::grenier::{
    decompose, gl_action, grenier_l_numeric, grenier_l_power, power_function, random_special, recompose, xi1,
    PowerParameters, SpecialPositiveMatrix,
};

fn params(n: usize, rng: &mut ChaCha8Rng) -> PowerParameters {
    let s = (0..n - 1)
        .map(|_| Complex64::new(rng.gen_range(-2.0..2.0), rng.gen_range(-1.0..1.0)))
        .collect();
    PowerParameters::new(n, s).unwrap()
}

fn unimodular(n: usize, rng: &mut ChaCha8Rng) -> DMatrix<f64> {
    let g = DMatrix::from_fn(n, n, |_, _| rng.gen_range(-0.3..0.3)) + DMatrix::<f64>::identity(n, n) * 2.0;
    let d: f64 = g.determinant();
    g * d.abs().powf(-1.0 / n as f64)
}

#[test]
fn round_trip_on_a_hundred_matrices() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut worst = 0.0f64;
    for i in 0..100 {
        let y = random_special(2 + i % 4, &mut rng);
        let d = decompose(&y).unwrap();
        assert!(d.v > 0.0);
        assert!((d.w.matrix().determinant() - 1.0).abs() < 1e-10);
        worst = worst.max(recompose(&d).unwrap().max_difference(&y));
    }
    assert!(worst <= 1e-12, "{worst}");
}

#[test]
fn shift_on_the_constant_fibre() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for n in 2..=5 {
        let p = params(n, &mut rng);
        let w = random_special(n - 1, &mut rng);
        let x = DVector::zeros(n - 1);
        let f = |y: &SpecialPositiveMatrix| power_function(y, &p);
        let report = grenier_l_numeric(&f, &p, &w, &x, &[1e1, 1e2, 1e4]).unwrap();
        let exact = power_function(&w, &grenier_l_power(&p).unwrap()).unwrap();
        for v in &report.values {
            assert!((v - exact).norm() <= 1e-12 * exact.norm().max(1.0), "n={n}");
        }
        assert!(report.converged);
    }
}

#[test]
fn composed_shifts() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let p = params(5, &mut rng);
    let twice = grenier_l_power(&grenier_l_power(&p).unwrap()).unwrap();
    assert_eq!(twice.n, 3);
    assert_eq!(twice.s, p.s[2..].to_vec());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn decomposition_round_trip(seed in any::<u64>(), n in 2usize..=5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let y = random_special(n, &mut rng);
        let back = recompose(&decompose(&y).unwrap()).unwrap();
        prop_assert!(back.max_difference(&y) <= 1e-12);
    }

    #[test]
    fn shift_with_offset(seed in any::<u64>(), n in 2usize..=5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = params(n, &mut rng);
        let w = random_special(n - 1, &mut rng);
        let x = DVector::from_fn(n - 1, |_, _| rng.gen_range(-2.0..2.0));
        let f = |y: &SpecialPositiveMatrix| power_function(y, &p);
        let report = grenier_l_numeric(&f, &p, &w, &x, &[1e2, 1e3, 1e4]).unwrap();
        let exact = power_function(&w, &grenier_l_power(&p).unwrap()).unwrap();
        prop_assert!((report.value() - exact).norm() <= 1e-6 * exact.norm().max(1.0));
    }

    #[test]
    fn limit_is_linear(seed in any::<u64>(), n in 3usize..=5, alpha in -3.0f64..3.0, beta in -3.0f64..3.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = params(n, &mut rng);
        // A second family with the same normalising exponent s₁ + ξ₁.
        let mut q = params(n, &mut rng);
        q.s[0] = p.s[0] + xi1(&p) - xi1(&q);
        let w = random_special(n - 1, &mut rng);
        let x = DVector::from_fn(n - 1, |_, _| rng.gen_range(-1.0..1.0));
        let sched = [1e2, 1e3, 1e4];
        let both = |y: &SpecialPositiveMatrix| Ok(power_function(y, &p)? * alpha + power_function(y, &q)? * beta);
        let lhs = grenier_l_numeric(&both, &p, &w, &x, &sched).unwrap().value();
        let lp = grenier_l_numeric(&|y: &SpecialPositiveMatrix| power_function(y, &p), &p, &w, &x, &sched).unwrap().value();
        let lq = grenier_l_numeric(&|y: &SpecialPositiveMatrix| power_function(y, &q), &q, &w, &x, &sched).unwrap().value();
        let rhs = lp * alpha + lq * beta;
        prop_assert!((lhs - rhs).norm() <= 1e-6 * rhs.norm().max(1.0));
    }

    #[test]
    fn gl_action_is_associative(seed in any::<u64>(), n in 1usize..=5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let y = random_special(n, &mut rng);
        let (g1, g2) = (unimodular(n, &mut rng), unimodular(n, &mut rng));
        let lhs = gl_action(&(&g1 * &g2), &y).unwrap();
        let rhs = gl_action(&g1, &gl_action(&g2, &y).unwrap()).unwrap();
        prop_assert!(lhs.max_difference(&rhs) <= 1e-12 * lhs.matrix().amax().max(1.0));
        prop_assert!(gl_action(&DMatrix::identity(n, n), &y).unwrap().max_difference(&y) == 0.0);
    }
}
