//! Classical PU flow checked against exact solutions of `q⁗ = Ω⁴q` and the
//! algebra of the decoupling map.

use hdlab::pu::{
    canonical_flow, decouple, decouple_jacobian, fit_x_growth, fourth_difference_residual, hamiltonian_decoupled,
    hamiltonian_pu, hamiltonian_scale, integrate_flow, ostrogradsky_state, recouple, symplectic_defect,
    x_in_decoupled, x_observable, ClassicalSolutionCoeffs, PUParams, PhaseState,
};
use num_complex::Complex64 as C;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_state(rng: &mut ChaCha8Rng) -> PhaseState {
    PhaseState::new(
        rng.random_range(-2.0..2.0),
        rng.random_range(-2.0..2.0),
        rng.random_range(-2.0..2.0),
        rng.random_range(-2.0..2.0),
    )
}

fn grid(t_max: f64, n: usize) -> Vec<f64> {
    (0..=n).map(|i| t_max * i as f64 / n as f64).collect()
}

#[test]
fn decaying_solution_is_reproduced() {
    for w in [0.7, 1.0, 1.8] {
        let p = PUParams::new(w, 1.0).unwrap();
        let s0 = ostrogradsky_state(1.0, -w, w * w, -w * w * w);
        let ts = grid(5.0, 50);
        let states = integrate_flow(&s0, &p, &ts, 1e-10).unwrap();
        for (t, s) in ts.iter().zip(&states) {
            let exact = (-w * t).exp();
            // the e^{+Ωt} mode seeded by roundoff is what limits this
            assert!((s.q1 - exact).abs() <= 1e-8, "Ω={w} t={t}: {} vs {exact}", s.q1);
        }
    }
}

#[test]
fn integrated_trajectories_satisfy_the_fourth_order_equation() {
    let p = PUParams::new(1.0, 1.0).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..5 {
        let s0 = random_state(&mut rng);
        let h = 0.01;
        let ts = grid(5.0, 500);
        let q: Vec<f64> = integrate_flow(&s0, &p, &ts, 1e-12).unwrap().iter().map(|s| s.q1).collect();
        let r = fourth_difference_residual(&q, h, &p);
        assert!(r <= 1e-6, "{r:e}");
    }
}

#[test]
fn fourth_difference_residual_is_second_order_on_exact_solutions() {
    let p = PUParams::new(1.3, 1.0).unwrap();
    let c = ClassicalSolutionCoeffs::real(C::new(0.4, -0.2), 0.3, 0.5);
    // raw (unscaled) δ⁴q/h⁴ − Ω⁴q at t = 1
    let raw = |h: f64| {
        let q: Vec<f64> = (-2..=2).map(|k| c.derivatives(1.0 + k as f64 * h, &p)[0]).collect();
        let d4 = (q[0] - 4.0 * q[1] + 6.0 * q[2] - 4.0 * q[3] + q[4]) / h.powi(4);
        (d4 - p.omega_cap.powi(4) * q[2]).abs()
    };
    let ratio = raw(0.1) / raw(0.05);
    assert!((3.8..4.2).contains(&ratio), "{ratio}");
}

#[test]
fn energy_is_conserved_relative_to_its_terms() {
    let p = PUParams::new(1.0, 1.0).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..5 {
        let s0 = random_state(&mut rng);
        let ts = grid(10.0, 200);
        let states = integrate_flow(&s0, &p, &ts, 1e-10).unwrap();
        let e0 = hamiltonian_pu(&s0, &p);
        let drift = states
            .iter()
            .map(|s| (hamiltonian_pu(s, &p) - e0).abs() / hamiltonian_scale(s, &p).max(hamiltonian_scale(&s0, &p)))
            .fold(0.0, f64::max);
        assert!(drift <= 1e-9, "{drift:e}");
    }
}

#[test]
fn cosine_solution_conserves_energy_exactly() {
    let p = PUParams::new(1.0, 1.0).unwrap();
    let e0 = hamiltonian_pu(&ostrogradsky_state(1.0, 0.0, -1.0, 0.0), &p);
    for k in 0..50 {
        let t = 0.2 * k as f64;
        let s = ostrogradsky_state(t.cos(), -t.sin(), -t.cos(), t.sin());
        assert!((hamiltonian_pu(&s, &p) - e0).abs() <= 1e-14);
        assert!(x_observable(&s, &p).abs() <= 1e-14);
    }
}

#[test]
fn decoupling_identities_on_random_states() {
    let mut rng = ChaCha8Rng::seed_from_u64(1000);
    for _ in 0..1000 {
        let p = PUParams::new(rng.random_range(0.2..3.0), 1.0).unwrap();
        let s = random_state(&mut rng);
        let d = decouple(&s, &p);
        let h = hamiltonian_pu(&s, &p);
        let scale = hamiltonian_scale(&s, &p).max(f64::MIN_POSITIVE);
        assert!((hamiltonian_decoupled(&d, &p) - h).abs() <= 1e-12 * scale.max(h.abs()));
        let x = x_observable(&s, &p);
        let xs = s.pi1.abs() + p.omega_cap * s.pi2.abs() + p.omega_cap.powi(3) * s.q1.abs() + p.omega_cap.powi(2) * s.q2.abs();
        assert!((x_in_decoupled(&d, &p) - x).abs() <= 1e-12 * xs);
        let back = recouple(&d, &p);
        for (a, b) in back.to_array().iter().zip(s.to_array()) {
            assert!((a - b).abs() <= 1e-12 * b.abs().max(1.0));
        }
    }
}

#[test]
fn decoupling_is_canonical() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..10 {
        let p = PUParams::new(rng.random_range(0.1..5.0), 1.0).unwrap();
        assert!(symplectic_defect(&decouple_jacobian(&p)) <= 1e-12);
    }
}

#[test]
fn x_grows_at_rate_omega() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for w in [0.5, 1.0, 2.0] {
        let p = PUParams::new(w, 1.0).unwrap();
        let s0 = random_state(&mut rng);
        let fit = fit_x_growth(&s0, &p, 60).unwrap();
        assert!((fit.rate - w).abs() <= 1e-6 * w, "Ω={w}: {}", fit.rate);
        assert!(fit.max_residual <= 1e-6);
    }
}

#[test]
fn fixed_point() {
    let p = PUParams::new(1.0, 1.0).unwrap();
    let z = PhaseState::default();
    assert_eq!(canonical_flow(&z, &p), z);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    /// `Ω → sΩ, t → t/s` maps trajectories onto each other with
    /// `(q₂, Π₂, Π₁)` rescaled by `(s, s², s³)`.
    #[test]
    fn scaling_covariance(s in 0.3..3.0f64, q1 in -1.0..1.0f64, q2 in -1.0..1.0f64, pi1 in -1.0..1.0f64, pi2 in -1.0..1.0f64) {
        let p = PUParams::new(1.0, 1.0).unwrap();
        let ps = PUParams::new(s, 1.0).unwrap();
        let a0 = PhaseState::new(q1, q2, pi1, pi2);
        let b0 = PhaseState::new(q1, s * q2, s * s * s * pi1, s * s * pi2);
        let ts = [0.0, 0.7, 1.5];
        let tb: Vec<f64> = ts.iter().map(|t| t / s).collect();
        let a = integrate_flow(&a0, &p, &ts, 1e-12).unwrap();
        let b = integrate_flow(&b0, &ps, &tb, 1e-12).unwrap();
        for (x, y) in a.iter().zip(&b) {
            prop_assert!((y.q1 - x.q1).abs() <= 1e-9 * (1.0 + x.q1.abs()));
            prop_assert!((y.q2 - s * x.q2).abs() <= 1e-9 * s * (1.0 + x.q2.abs()));
            prop_assert!((y.pi2 - s * s * x.pi2).abs() <= 1e-9 * s * s * (1.0 + x.pi2.abs()));
            prop_assert!((y.pi1 - s * s * s * x.pi1).abs() <= 1e-9 * s * s * s * (1.0 + x.pi1.abs()));
        }
    }
}
