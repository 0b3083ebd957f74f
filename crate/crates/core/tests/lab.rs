//! Grid experiments: spectra, unitary evolution, the dilatation-rotation
//! generator, the divergence of position matrix elements and the
//! discrete commutator.

use hdlab::lab::{
    angular_sector_state, build_hamiltonian_dilrot, build_hamiltonian_harmonic, build_hamiltonian_inverted,
    classical_dilrot_flow, coherent_state, commutator_check, dilrot_jacobian, divergence_scan, evolve,
    gaussian_packet, radial_gaussian, symplectic_defect, DilrotPoint, Grid1D, Grid2D, ScanObservable,
    ScanVerdict, Stencil,
};
use hdlab::propagator::inverted_propagator;
use hdlab::pu::PUParams;
use hdlab::quadrature::integrate_complex;
use hdlab::special::{Branch, EigenLabel};
use nalgebra::DMatrix;
use num_complex::Complex64 as C;
use proptest::prelude::*;
use std::f64::consts::PI;

#[test]
fn sturm_eigenvalues_match_a_dense_solve() {
    let g = Grid1D::new(8.0, 160).unwrap();
    let h = build_hamiltonian_inverted(g, 1.0, 1.0).unwrap();
    let n = g.points;
    let m = DMatrix::from_fn(n, n, |i, j| {
        if i == j {
            h.diag[i]
        } else if i + 1 == j {
            h.off[i]
        } else if j + 1 == i {
            h.off[j]
        } else {
            0.0
        }
    });
    let mut dense: Vec<f64> = m.symmetric_eigen().eigenvalues.iter().copied().collect();
    dense.sort_by(f64::total_cmp);
    let lo = dense[0] - 1.0;
    let hi = dense[n - 1] + 1.0;
    let sturm = h.eigenvalues_in(lo, hi).unwrap();
    assert_eq!(sturm.len(), n);
    for (a, b) in sturm.iter().zip(&dense) {
        assert!((a - b).abs() <= 1e-9 * b.abs().max(1.0), "{a} vs {b}");
    }
}

#[test]
fn inverted_spectrum_has_no_gap_at_zero() {
    let g = Grid1D::new(30.0, 2048).unwrap();
    let h = build_hamiltonian_inverted(g, 1.0, 1.0).unwrap();
    let ev = h.eigenvalues_in(-5.0, 5.0).unwrap();
    let below: Vec<f64> = ev.iter().copied().filter(|&e| e < 0.0).collect();
    let above: Vec<f64> = ev.iter().copied().filter(|&e| e >= 0.0).collect();
    assert!(below.len() >= 5 && above.len() >= 5, "{ev:?}");
    let gap = above[0] - below[below.len() - 1];
    // mean spacing of the ten levels around zero, gap excluded
    let near: Vec<f64> = below[below.len() - 5..].iter().chain(&above[..5]).copied().collect();
    let spacings: Vec<f64> = near.windows(2).map(|w| w[1] - w[0]).filter(|d| *d != gap).collect();
    let local = spacings.iter().sum::<f64>() / spacings.len() as f64;
    println!("gap at zero {gap:.5}, local spacing {local:.5}");
    assert!(gap <= 3.0 * local);
}

#[test]
fn inverted_evolution_keeps_the_norm_for_2000_steps() {
    let g = Grid1D::new(30.0, 2048).unwrap();
    let s = gaussian_packet(g, 0.5, 1.0, 0.3).unwrap();
    let h = build_hamiltonian_inverted(g, 1.0, 1.0).unwrap();
    let r = evolve(&s, &h.into(), 1e-3, 2000, 1.0).unwrap();
    assert!(r.total_drift <= 1e-8, "{}", r.total_drift);
    assert!(r.max_step_drift <= 1e-12, "{}", r.max_step_drift);
    assert!(!r.contaminated, "{}", r.max_boundary_mass);
    // the packet does spread: ⟨x²⟩ grows roughly like cosh²
    assert!(r.state.second_moment() > 2.0 * s.second_moment());
}

#[test]
fn coherent_state_revives_after_one_period() {
    let (w, hbar) = (1.0, 1.0);
    let g = Grid1D::new(12.0, 1024).unwrap();
    let s = coherent_state(g, 2.0, 0.0, w, hbar).unwrap();
    let h = build_hamiltonian_harmonic(g, w, hbar).unwrap();
    let steps = 4000;
    let r = evolve(&s, &h.into(), 2.0 * PI / w / steps as f64, steps, hbar).unwrap();
    let fidelity = s.inner(&r.state).unwrap().norm_sqr();
    assert!(fidelity >= 0.999, "{fidelity}");
}

#[test]
fn grid_evolution_fixes_the_time_sign_of_the_inverted_factor() {
    // the PU Hamiltonian carries −h₂, so its inverted factor must evolve
    // with K(x, y; −t)
    let g = Grid1D::new(20.0, 1601).unwrap();
    let s = gaussian_packet(g, 0.3, 0.8, 0.5).unwrap();
    let h = build_hamiltonian_inverted(g, 1.0, 1.0).unwrap().scaled(-1.0);
    let t = 0.8;
    let r = evolve(&s, &h.into(), t / 800.0, 800, 1.0).unwrap();
    let init = |y: f64| C::from_polar((-(y - 0.3f64).powi(2) / (4.0 * 0.64)).exp(), 0.5 * y) * (2.0 * PI * 0.64).powf(-0.25);
    let by_kernel = |x: f64, sign: f64| integrate_complex(|y| inverted_propagator(x, y, sign * t, 1.0, 1.0).unwrap() * init(y), -7.0, 7.6, 80, 20);
    let (mut right, mut wrong) = (0.0f64, 0.0f64);
    for k in (600..1000).step_by(40) {
        let x = g.x(k);
        right = right.max((by_kernel(x, -1.0) - r.state.amplitudes[k]).norm());
        wrong = wrong.max((by_kernel(x, 1.0) - r.state.amplitudes[k]).norm());
    }
    assert!(right < 1e-3, "{right}");
    assert!(wrong > 0.1, "{wrong}");
}

#[test]
fn angular_sectors_give_the_rotation_ladder() {
    let g = Grid2D::new(8.0, 512).unwrap();
    let nu = 1.3;
    let pure = build_hamiltonian_dilrot(g, 0.0, nu, 1.0).unwrap();
    for n in [1, 2] {
        let s = angular_sector_state(g, n, 1.0).unwrap();
        let q = pure.rayleigh_quotient(&s.amplitudes);
        let expected = nu * n as f64;
        assert!((q.re - expected).abs() <= 0.01 * expected, "n={n}: {q}");
    }
    // with dilatation switched on the shift per unit n is still ħν
    let full = build_hamiltonian_dilrot(g, 0.7, nu, 1.0).unwrap();
    let q: Vec<f64> = (0..=2)
        .map(|n| full.rayleigh_quotient(&angular_sector_state(g, n, 1.0).unwrap().amplitudes).re)
        .collect();
    let slope = (q[2] - q[0]) / 2.0;
    let fit_residual = (q[1] - (q[0] + slope)).abs();
    assert!((slope - nu).abs() <= 0.02 * nu, "{q:?}");
    assert!(fit_residual <= 0.02 * nu, "{q:?}");
}

#[test]
fn dilatation_rescales_a_radial_gaussian() {
    let g = Grid2D::new(14.0, 256).unwrap();
    let mu = 0.5;
    let d = build_hamiltonian_dilrot(g, mu, 0.0, 1.0).unwrap();
    let s = radial_gaussian(g, 1.0).unwrap();
    let t = 1.5;
    let r = evolve(&s, &d.into(), t / 600.0, 600, 1.0).unwrap();
    let ratio = (r.state.second_moment() / s.second_moment()).sqrt();
    assert!((ratio / (mu * t).exp() - 1.0).abs() <= 0.01, "{ratio}");
    assert!(r.total_drift <= 1e-10);
}

#[test]
fn dilrot_evolution_keeps_the_norm_for_2000_steps() {
    let g = Grid2D::new(14.0, 128).unwrap();
    let d = build_hamiltonian_dilrot(g, 0.5, 1.0, 1.0).unwrap();
    assert_eq!(d.asymmetry(), 0.0);
    let s = radial_gaussian(g, 1.0).unwrap();
    let r = evolve(&s, &d.into(), 1e-3, 2000, 1.0).unwrap();
    assert!(r.total_drift <= 1e-8, "{}", r.total_drift);
    assert!(!r.contaminated, "{}", r.max_boundary_mass);
}

#[test]
fn classical_flow_envelopes_and_symplecticity() {
    let s = DilrotPoint::new(1.0, 0.5, -0.3, 0.8);
    for t in [0.5, 1.0, 3.0] {
        let f = classical_dilrot_flow(s, 0.3, 2.0, t).unwrap();
        assert!((f.q_norm() - (0.3 * t).exp() * s.q_norm()).abs() <= 1e-13 * f.q_norm());
        assert!((f.p_norm() - (-0.3 * t).exp() * s.p_norm()).abs() <= 1e-13 * s.p_norm());
        assert!(symplectic_defect(&dilrot_jacobian(0.3, 2.0, t).unwrap()) <= 1e-12);
    }
}

fn label(epsilon: f64) -> EigenLabel {
    EigenLabel { n: 0, epsilon, branch: Branch::Plus }
}

#[test]
fn position_matrix_elements_diverge_while_the_control_converges() {
    let p = PUParams::new(1.0, 1.0).unwrap();
    let cutoffs = [5.0, 10.0, 20.0, 40.0];
    let scan = divergence_scan(&label(0.3), &label(0.8), &cutoffs, ScanObservable::Position, &p).unwrap();
    for r in &scan.rows {
        println!("R={:>4}  |X|={:.6}  Δ={:?}", r.cutoff, r.magnitude, r.increment);
    }
    assert_eq!(scan.verdict, ScanVerdict::Divergent);
    let control =
        divergence_scan(&label(0.3), &label(0.8), &cutoffs, ScanObservable::DampedControl { width: 2.0 }, &p).unwrap();
    assert_eq!(control.verdict, ScanVerdict::Convergent, "{:?}", control.rows);
}

#[test]
fn mirrored_labels_cancel_between_the_two_half_lines() {
    // for ε′ = −ε the growing parts from x > 0 and x < 0 have equal size and
    // opposite sign, so the truncated element shrinks instead of growing
    let p = PUParams::new(1.0, 1.0).unwrap();
    let scan = divergence_scan(&label(-0.5), &label(0.5), &[5.0, 10.0, 20.0, 40.0], ScanObservable::Position, &p).unwrap();
    let m: Vec<f64> = scan.rows.iter().map(|r| r.magnitude).collect();
    assert!(m.windows(2).all(|w| w[1] < w[0]), "{m:?}");
    assert!(m[3] < 0.01);
}

#[test]
fn commutator_holds_at_the_operator_level() {
    let p = PUParams::new(1.0, 1.0).unwrap();
    let c = commutator_check(&p, Grid1D::new(20.0, 1024).unwrap(), Stencil::Eighth).unwrap();
    assert!(c.residual <= 1e-6, "{}", c.residual);
    let coarse = commutator_check(&p, Grid1D::new(20.0, 513).unwrap(), Stencil::Second).unwrap();
    let fine = commutator_check(&p, Grid1D::new(20.0, 1025).unwrap(), Stencil::Second).unwrap();
    let order = (coarse.residual / fine.residual).log2();
    assert!((order - 2.0).abs() <= 0.1, "{order}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn inverted_operator_is_exactly_symmetric(l in 2.0..40.0f64, n in 64usize..512, w in 0.0..3.0f64) {
        let h = build_hamiltonian_inverted(Grid1D::new(l, n).unwrap(), w, 1.0).unwrap();
        // one off-diagonal array serves both triangles
        prop_assert_eq!(h.off.len(), n - 1);
        prop_assert!(h.diag.iter().chain(&h.off).all(|v| v.is_finite()));
    }

    #[test]
    fn dilrot_operator_is_exactly_antisymmetric(mu in -2.0..2.0f64, nu in -2.0..2.0f64, l in 1.0..10.0f64) {
        let d = build_hamiltonian_dilrot(Grid2D::new(l, 64).unwrap(), mu, nu, 1.0).unwrap();
        prop_assert_eq!(d.asymmetry(), 0.0);
    }

    #[test]
    fn cayley_step_keeps_the_norm(x0 in -2.0..2.0f64, k0 in -2.0..2.0f64, dt in 1e-3..0.2f64) {
        let g = Grid1D::new(15.0, 256).unwrap();
        let s = gaussian_packet(g, x0, 1.0, k0).unwrap();
        let h = build_hamiltonian_inverted(g, 1.0, 1.0).unwrap();
        let r = evolve(&s, &h.into(), dt, 5, 1.0).unwrap();
        prop_assert!(r.max_step_drift <= 1e-13);
    }
}
