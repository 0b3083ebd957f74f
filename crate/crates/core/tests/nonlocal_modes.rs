//! Mode structure of `z² + ω²cosh(Tz)` checked against oracles that do not
//! reuse the production root search: phase unwrapping along circles, contour
//! residues in `u = z²`, and the two sides of the partial-fraction identity.

use hdlab::nonlocal::{
    characteristic_residual, find_modes, mode_trajectory, partial_fraction_eval, phi,
    spectrum_generators, ModeDecomposition, NonlocalParams, SpectrumGenerator,
};
use hdlab::Error;
use num_complex::Complex64 as C;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

fn unit() -> NonlocalParams {
    NonlocalParams::new(1.0, 1.0, 1.0).unwrap()
}

/// Zero count inside `|z| = r` from the accumulated phase of `Φ` on a dense
/// circle, one small unwrapped increment at a time.
fn winding_by_phase(p: &NonlocalParams, r: f64, samples: usize) -> i64 {
    let mut total = 0.0;
    let mut prev = phi(C::new(r, 0.0), p).unwrap().arg();
    for j in 1..=samples {
        let z = C::from_polar(r, 2.0 * PI * j as f64 / samples as f64);
        let a = phi(z, p).unwrap().arg();
        let mut d = a - prev;
        while d > PI {
            d -= 2.0 * PI;
        }
        while d < -PI {
            d += 2.0 * PI;
        }
        total += d;
        prev = a;
    }
    (total / (2.0 * PI)).round() as i64
}

fn count_inside(d: &ModeDecomposition, r: f64) -> i64 {
    d.roots().iter().filter(|z| z.norm() < r).count() as i64
}

#[test]
fn phi_matches_high_precision_value() {
    let p = NonlocalParams::new(1.3, 0.7, 1.0).unwrap();
    // mpmath, 30 digits
    let expected = C::new(-2.639_459_642_332_593, 5.263_352_916_015_891);
    let v = phi(C::new(1.0, 2.0), &p).unwrap();
    assert!((v - expected).norm() < 1e-14 * expected.norm());
}

#[test]
fn root_count_matches_phase_winding_up_to_radius_40() {
    let p = unit();
    let d = find_modes(&p, 8, 40.0).unwrap();
    for r in [1.0, 5.0, 12.0, 20.0, 33.0, 40.0] {
        let found = count_inside(&d, r);
        let oracle = winding_by_phase(&p, r, 200_000);
        assert_eq!(found, oracle, "radius {r}");
    }
    for z in d.roots() {
        assert!(characteristic_residual(z, &p).unwrap() <= 1e-10 * z.norm_sqr().max(1.0));
    }
}

#[test]
fn every_stored_root_is_a_zero_for_many_pairs() {
    let p = unit();
    let d = find_modes(&p, 64, 40.0).unwrap();
    assert_eq!(d.complex_modes.len(), 64);
    for z in d.roots() {
        let r = characteristic_residual(z, &p).unwrap();
        assert!(r <= 1e-10 * z.norm_sqr().max(1.0), "{z}: {r:e}");
    }
}

#[test]
fn residues_match_contour_integrals_in_u() {
    let p = unit();
    let d = find_modes(&p, 6, 20.0).unwrap();
    let w4 = p.omega.powi(4);
    // (1/2πi)∮ ω⁴/Φ(u) du on a small circle around u₀ equals η u₀²
    let residue = |u0: C| -> C {
        let rho = 1e-3 * u0.norm().max(1.0);
        let m = 256;
        (0..m)
            .map(|j| {
                let e = C::from_polar(1.0, 2.0 * PI * j as f64 / m as f64);
                let u = u0 + rho * e;
                w4 / phi(u.sqrt(), &p).unwrap() * rho * e
            })
            .sum::<C>()
            / m as f64
    };
    for m in &d.real_modes {
        let u0 = C::new(-m.omega_i * m.omega_i, 0.0);
        let eta = residue(u0) / (u0 * u0);
        assert!((eta.re - m.eta_i).abs() < 1e-9 * m.eta_i.abs());
        assert!(eta.im.abs() < 1e-9);
    }
    for m in &d.complex_modes {
        let u0 = -m.omega_k * m.omega_k;
        let eta = residue(u0) / (u0 * u0);
        assert!((eta - m.eta_k).norm() < 1e-9 * m.eta_k.norm());
        // the conjugate zero carries the conjugate weight
        let eta_bar = residue(u0.conj()) / (u0.conj() * u0.conj());
        assert!((eta_bar - m.eta_k.conj()).norm() < 1e-9 * m.eta_k.norm());
    }
}

#[test]
fn partial_fraction_error_falls_with_truncation() {
    let p = unit();
    let d = find_modes(&p, 64, 20.0).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let points: Vec<C> = (0..50)
        .map(|_| C::from_polar(2.0 * rng.random::<f64>().sqrt(), 2.0 * PI * rng.random::<f64>()))
        .collect();
    let mut prev = f64::INFINITY;
    for k in [4, 8, 16, 32, 64] {
        let dk = d.truncated(k);
        let err = points
            .iter()
            .map(|&z| {
                let lhs = p.omega.powi(4) / phi(z, &p).unwrap();
                (partial_fraction_eval(&dk, z).unwrap() - lhs).norm() / lhs.norm()
            })
            .fold(0.0, f64::max);
        assert!(err < prev, "K = {k}: {err:e} not below {prev:e}");
        prev = err;
    }
    assert!(prev <= 1e-3, "K = 64 error {prev:e}");
}

#[test]
fn partial_fraction_is_real_on_the_real_axis() {
    let d = find_modes(&unit(), 32, 20.0).unwrap();
    for x in [-1.7, -0.3, 0.0, 0.9, 2.0] {
        let v = partial_fraction_eval(&d, C::new(x, 0.0)).unwrap();
        assert!(v.im.abs() <= 1e-12 * v.norm());
    }
}

#[test]
fn inverse_square_increments_decrease() {
    let d = find_modes(&unit(), 40, 20.0).unwrap();
    let inc: Vec<f64> = d.complex_modes.iter().map(|m| m.omega_k.norm_sqr().recip()).collect();
    for w in inc[3..].windows(2) {
        assert!(w[1] < w[0]);
    }
    assert!(d.tail_bound > 0.0 && d.tail_bound < 1e-2);
}

#[test]
fn near_zero_delay_regression() {
    let p = NonlocalParams::new(1.0, 1e-8, 1.0).unwrap();
    let d = find_modes(&p, 4, 10.0).unwrap();
    assert_eq!(d.real_modes.len(), 1);
    assert!((d.real_modes[0].omega_i - 1.0).abs() < 1e-6);
    assert!((d.real_modes[0].eta_i - 1.0).abs() < 1e-6);
    let g = spectrum_generators(&d);
    assert_eq!(g[0], SpectrumGenerator::Oscillator { sign: 1, omega: d.real_modes[0].omega_i });
    // single-term fraction ω⁴/(ω² + z²)
    let z = C::new(0.3, 0.4);
    let v = partial_fraction_eval(&d.truncated(0), z).unwrap();
    assert!((v - 1.0 / (1.0 + z * z)).norm() < 1e-6);
}

#[test]
fn oscillatory_pair_gives_a_cosine() {
    let p = unit();
    let d = find_modes(&p, 4, 10.0).unwrap();
    let om = d.real_modes[0].omega_i;
    let a = C::from_polar(0.7, 0.3);
    let mut amps = vec![C::new(0.0, 0.0); d.roots().len()];
    amps[0] = a;
    amps[1] = a.conj();
    let t: Vec<f64> = (0..200).map(|i| 0.1 * i as f64).collect();
    let tr = mode_trajectory(&d, &amps, &t).unwrap();
    for (ti, qi) in t.iter().zip(&tr.q) {
        let expected = 2.0 * 0.7 * (om * ti + 0.3).cos();
        assert!((qi - expected).abs() < 1e-12);
    }
    assert!(tr.max_residual() <= 1e-10);
}

#[test]
fn complex_mode_envelope_grows_at_its_real_part() {
    let p = unit();
    let d = find_modes(&p, 4, 10.0).unwrap();
    let nr = 2 * d.real_modes.len();
    let z = d.roots()[nr];
    assert!(z.re > 0.0);
    let mut amps = vec![C::new(0.0, 0.0); d.roots().len()];
    amps[nr] = C::new(0.5, 0.0);
    amps[nr + 1] = C::new(0.5, 0.0);
    // local maxima of |q| trace the envelope 2·0.5·e^{Re z·t}
    let t: Vec<f64> = (0..20_000).map(|i| 1e-3 * i as f64).collect();
    let tr = mode_trajectory(&d, &amps, &t).unwrap();
    assert!(tr.max_residual() <= 1e-9);
    let peaks: Vec<(f64, f64)> = (1..t.len() - 1)
        .filter(|&i| tr.q[i].abs() > tr.q[i - 1].abs() && tr.q[i].abs() >= tr.q[i + 1].abs())
        .map(|i| (t[i], tr.q[i].abs().ln()))
        .collect();
    assert!(peaks.len() > 4);
    let n = peaks.len() as f64;
    let (st, sy) = peaks.iter().fold((0.0, 0.0), |a, p| (a.0 + p.0, a.1 + p.1));
    let (mt, my) = (st / n, sy / n);
    let slope = peaks.iter().map(|p| (p.0 - mt) * (p.1 - my)).sum::<f64>()
        / peaks.iter().map(|p| (p.0 - mt).powi(2)).sum::<f64>();
    assert!((slope - z.re).abs() < 1e-4, "slope {slope} vs {}", z.re);
    // the generator's dilatation rate is the same number
    let SpectrumGenerator::DilatationRotation { mu, .. } = spectrum_generators(&d)[d.real_modes.len()] else {
        panic!()
    };
    assert!((mu - z.re).abs() < 1e-14);
}

#[test]
fn runaway_exponent_is_refused() {
    let p = unit();
    let d = find_modes(&p, 2, 10.0).unwrap();
    let mut amps = vec![C::new(0.0, 0.0); d.roots().len()];
    let nr = 2 * d.real_modes.len();
    amps[nr] = C::new(1.0, 0.0);
    let err = mode_trajectory(&d, &amps, &[1e4]).unwrap_err();
    assert!(matches!(err, Error::Overflow(_)));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn real_modes_exist_and_are_zeros(omega in 0.2f64..3.0, delay in 0.0f64..4.0) {
        let p = NonlocalParams::new(omega, delay, 1.0).unwrap();
        match find_modes(&p, 3, 10.0) {
            Ok(d) => {
                prop_assert!(!d.real_modes.is_empty());
                for z in d.roots() {
                    prop_assert!(characteristic_residual(z, &p).unwrap() <= 1e-10 * z.norm_sqr().max(1.0));
                }
                for m in &d.real_modes {
                    prop_assert!(m.omega_i > 0.0 && m.omega_i <= omega);
                }
            }
            Err(e) => prop_assert!(e.is_degenerate(), "{e}"),
        }
    }
}
