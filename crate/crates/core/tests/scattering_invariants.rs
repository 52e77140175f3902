mod common;

use delta_lab_core::linalg::norm_inf;
use delta_lab_core::scattering::{assemble_system, eval_eigenfunction, solve_coefficients};
use delta_lab_core::ScattererSet;
use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};

use common::random_set;

fn field_scale(sol: &delta_lab_core::ScatteringSolution) -> f64 {
    1.0 + sol.coefs.iter().map(|c| c.norm()).sum::<f64>()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(150))]

    #[test]
    fn flux_is_conserved(seed in any::<u64>(), n in 1usize..=8, k in 0.2f64..10.0) {
        let mut rng = rand::rngs::StdRng::seed_from_u64(seed);
        let set = random_set(&mut rng, n, 1e-3, (0.0, 5.0));
        let sol = solve_coefficients(&set, k).unwrap();
        prop_assert!((sol.abs_r2() + sol.abs_t2() - 1.0).abs() < 1e-8);
        let (_, rhs) = assemble_system(&set, k).unwrap();
        prop_assert!(sol.residual <= 1e-10 * (1.0 + norm_inf(&rhs)));
    }

    #[test]
    fn mirror_preserves_amplitudes(seed in any::<u64>(), n in 1usize..=6, k in 0.2f64..8.0) {
        let mut rng = rand::rngs::StdRng::seed_from_u64(seed);
        let set = random_set(&mut rng, n, 1e-3, (0.0, 5.0));
        let a = solve_coefficients(&set, k).unwrap();
        let b = solve_coefficients(&set.mirrored(), -k).unwrap();
        prop_assert!((a.reflection.norm() - b.reflection.norm()).abs() < 1e-10);
        prop_assert!((a.transmission.norm() - b.transmission.norm()).abs() < 1e-10);
    }
}

#[test]
fn eigenfunction_satisfies_free_equation_between_centres() {
    let mut rng = rand::rngs::StdRng::seed_from_u64(11);
    let h = 1e-3;
    for _ in 0..30 {
        let n = rng.gen_range(1..=6);
        let set = random_set(&mut rng, n, 0.3, (0.0, 5.0));
        let k = rng.gen_range(0.2..10.0);
        let sol = solve_coefficients(&set, k).unwrap();
        let scale = field_scale(&sol);
        let mut checked = 0;
        while checked < 25 {
            let x: f64 = rng.gen_range(-7.0..7.0);
            if set.positions().any(|p| (x - p).abs() < 0.1) {
                continue;
            }
            let psi = eval_eigenfunction(&set, &sol, x);
            let second = (eval_eigenfunction(&set, &sol, x + h) - 2.0 * psi
                + eval_eigenfunction(&set, &sol, x - h))
                / (h * h);
            let rel = (second + k * k * psi).norm() / (k * k * psi.norm().max(0.01 * scale));
            assert!(rel < 1e-4, "ODE residual {rel} at x = {x}, k = {k}");
            checked += 1;
        }
    }
}

#[test]
fn derivative_jump_matches_strength() {
    let mut rng = rand::rngs::StdRng::seed_from_u64(12);
    let h = 1e-6;
    for _ in 0..30 {
        let n = rng.gen_range(1..=6);
        let set = random_set(&mut rng, n, 0.3, (0.5, 5.0));
        let k = rng.gen_range(0.2..10.0);
        let sol = solve_coefficients(&set, k).unwrap();
        let scale = field_scale(&sol);
        let psi = |x: f64| eval_eigenfunction(&set, &sol, x);
        for (a, xa) in set.positions().enumerate() {
            let right = (-3.0 * psi(xa) + 4.0 * psi(xa + h) - psi(xa + 2.0 * h)) / (2.0 * h);
            let left = (3.0 * psi(xa) - 4.0 * psi(xa - h) + psi(xa - 2.0 * h)) / (2.0 * h);
            let alpha = set.effective_strength(a);
            let expected = alpha * psi(xa);
            let rel =
                (right - left - expected).norm() / (alpha.abs() * psi(xa).norm().max(0.01 * scale));
            assert!(rel < 1e-4, "jump mismatch {rel} at centre {a}");
        }
    }
}

#[test]
fn coefficients_are_linear_in_weak_coupling() {
    let mut rng = rand::rngs::StdRng::seed_from_u64(13);
    for _ in 0..10 {
        let base = random_set(&mut rng, 4, 0.2, (0.5, 3.0));
        let k = rng.gen_range(0.5..4.0);
        let deviation = |eps: f64| {
            let c1 = solve_coefficients(&base.with_coupling_scale(eps).unwrap(), k)
                .unwrap()
                .coefs;
            let c2 = solve_coefficients(&base.with_coupling_scale(2.0 * eps).unwrap(), k)
                .unwrap()
                .coefs;
            c1.iter()
                .zip(&c2)
                .map(|(a, b)| (a / eps - b / (2.0 * eps)).norm())
                .fold(0.0, f64::max)
        };
        let (d1, d2) = (deviation(1e-3), deviation(5e-4));
        let ratio = d2 / d1;
        assert!((ratio - 0.5).abs() < 0.05, "ratio {ratio}");
    }
}

#[test]
fn single_delta_closed_form_over_k() {
    for alpha in [-3.0, -0.5, 0.7, 2.0, 6.0] {
        for k in [0.2, 1.0, 3.3, 10.0] {
            let sol = solve_coefficients(&ScattererSet::single(0.4, alpha), k).unwrap();
            let i = Complex64::new(0.0, 1.0);
            let denom = 2.0 * i * k - alpha;
            let t = 2.0 * i * k / denom;
            let r = alpha * Complex64::from_polar(1.0, 2.0 * k * 0.4) / denom;
            assert!((sol.transmission - t).norm() < 1e-13);
            assert!((sol.reflection - r).norm() < 1e-13);
        }
    }
}
