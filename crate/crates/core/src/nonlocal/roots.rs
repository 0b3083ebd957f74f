//! Zeros of `Φ` and their argument-principle certification.
//!
//! `Φ` is even and real on both axes, so every zero is one of the orbit
//! `{z, −z, z̄, −z̄}`. The search runs in the closed first quadrant: real
//! modes by bracketing on the imaginary axis, complex modes by Newton from a
//! start grid inside the search radius plus seeds from the large-`|z|` ladder
//! `Tz ≈ ln(2z²/ω²) + iπ(2k+1)` beyond it.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use super::modes::{residues, ComplexMode, ModeDecomposition, RealMode};
use super::{phi, phi_prime_scale, phi_scaled, NonlocalParams};
use crate::error::{Error, Result};

/// Stored roots satisfy `|Φ(z)| ≤ ROOT_TOL·max(1, |z|²)`.
pub const ROOT_TOL: f64 = 1e-10;
/// A zero with `|Φ′| < DEGENERATE_TOL·scale` is treated as a double zero.
pub const DEGENERATE_TOL: f64 = 1e-8;
/// Extra ladder pairs beyond the requested truncation; they only serve the
/// outermost contour of the audit.
const LADDER_SLACK: usize = 6;

/// One contour of the argument-principle audit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContourAudit {
    pub radius: f64,
    pub winding: f64,
    pub found: usize,
}

/// Finds the oscillator modes and at least `pairs` complex pairs, every zero
/// with `|z| ≤ search_radius` included, and populates the residues.
pub fn find_modes(p: &NonlocalParams, pairs: usize, search_radius: f64) -> Result<ModeDecomposition> {
    if pairs == 0 {
        return Err(Error::InvalidParameter("at least one complex pair is required".into()));
    }
    if !(search_radius > 0.0 && search_radius.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "search radius must be positive, got {search_radius}"
        )));
    }
    let real = real_roots(p)?;
    let complex = if p.delay == 0.0 {
        Vec::new()
    } else {
        complex_roots(p, pairs, search_radius)?
    };
    for &z in &complex {
        check_simple(z, p)?;
    }

    let inside = complex.iter().filter(|z| z.norm() <= search_radius).count();
    let keep = pairs.max(inside).min(complex.len());
    audit_moduli(p, &real, &complex, keep)?;

    let d = ModeDecomposition {
        params: *p,
        real_modes: real
            .iter()
            .map(|&om| RealMode {
                omega_i: om,
                eta_i: f64::NAN,
                sign_i: 0,
            })
            .collect(),
        complex_modes: complex[..keep]
            .iter()
            .map(|&z| ComplexMode {
                omega_k: Complex64::new(z.im, -z.re),
                eta_k: Complex64::new(f64::NAN, f64::NAN),
            })
            .collect(),
        truncation_k: keep,
        tail_bound: 0.0,
    };
    let mut d = residues(&d)?;
    d.tail_bound = d.tail_estimate();
    Ok(d)
}

/// `f(Ω) = Ω² − ω²cos(ΩT)` vanishes at `z = iΩ`; every real mode lies in `(0, ω]`.
fn real_roots(p: &NonlocalParams) -> Result<Vec<f64>> {
    let (w, t) = (p.omega, p.delay);
    let f = |x: f64| x * x - w * w * (x * t).cos();
    let df = |x: f64| 2.0 * x + w * w * t * (x * t).sin();
    if t == 0.0 {
        return Ok(vec![w]);
    }
    let n = ((10.0 * w * t).ceil() as usize).max(256);
    let xs: Vec<f64> = (0..=n).map(|i| w * i as f64 / n as f64).collect();
    let mut roots = Vec::new();
    for win in xs.windows(2) {
        let (a, b) = (win[0], win[1]);
        let (fa, fb) = (f(a), f(b));
        if fb == 0.0 {
            roots.push(b);
        } else if fa != 0.0 && fa.signum() * fb.signum() < 0.0 {
            roots.push(bisect(&f, &df, a, b));
        } else {
            // a tangency without a sign change is a double zero
            let (da, db) = (df(a), df(b));
            if da.signum() * db.signum() < 0.0 {
                let xm = bisect(&df, &|_| f64::NAN, a, b);
                if f(xm).abs() <= 1e-14 * w * w {
                    return Err(Error::DegenerateModes(format!(
                        "double zero of Φ near z = {}i (ωT = {})",
                        xm,
                        w * t
                    )));
                }
            }
        }
    }
    for &om in &roots {
        check_simple(Complex64::new(0.0, om), p)?;
    }
    if roots.is_empty() {
        return Err(Error::AccuracyLoss(format!(
            "no real mode found for ω = {w}, T = {t}"
        )));
    }
    Ok(roots)
}

/// Bisection on a sign change, polished by guarded Newton steps when `df` is finite.
fn bisect(f: &dyn Fn(f64) -> f64, df: &dyn Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let fa = f(a);
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        if f(m).signum() == fa.signum() {
            a = m;
        } else {
            b = m;
        }
    }
    let mut x = 0.5 * (a + b);
    for _ in 0..2 {
        let d = df(x);
        if d.is_finite() && d != 0.0 {
            let nx = x - f(x) / d;
            if nx >= a && nx <= b {
                x = nx;
            }
        }
    }
    x
}

fn check_simple(z: Complex64, p: &NonlocalParams) -> Result<()> {
    let (_, fp, _) = phi_scaled(z, p);
    let scale = phi_prime_scale(z, p);
    if fp.norm() < DEGENERATE_TOL * scale {
        return Err(Error::DegenerateModes(format!(
            "|Φ′| = {:e} at the zero z = {z} (ωT = {} is on the excluded double-zero set)",
            fp.norm() * (p.delay * z.re).abs().exp(),
            p.omega * p.delay
        )));
    }
    Ok(())
}

fn newton(z0: Complex64, p: &NonlocalParams) -> Option<Complex64> {
    let mut z = z0;
    let mut converged = 0;
    for _ in 0..100 {
        let (f, fp, _) = phi_scaled(z, p);
        if fp.norm() == 0.0 || !f.re.is_finite() {
            return None;
        }
        let mut step = f / fp;
        let cap = 0.5 * (1.0 + z.norm());
        if step.norm() > cap {
            step *= cap / step.norm();
        }
        z -= step;
        if step.norm() <= 4.0 * f64::EPSILON * z.norm() {
            converged += 1;
            if converged >= 2 {
                break;
            }
        }
    }
    let r = phi(z, p).ok()?;
    (r.norm() <= ROOT_TOL * z.norm_sqr().max(1.0)).then_some(z)
}

/// Seeds for the `k`-th ladder zero from the fixed point of
/// `z = (ln(2z²/ω²) + iπ(2k+1))/T`.
fn ladder_seed(k: usize, p: &NonlocalParams) -> Complex64 {
    let t = p.delay;
    let shift = Complex64::new(0.0, PI * (2 * k + 1) as f64);
    // start with the logarithm's modulus part so that arg z² stays off ±π
    let y = PI * (2 * k + 1) as f64 / t;
    let mut z = (shift + (2.0 * y * y / (p.omega * p.omega)).ln()) / t;
    for _ in 0..60 {
        let next = ((2.0 * z * z / (p.omega * p.omega)).ln() + shift) / t;
        if (next - z).norm() <= 1e-15 * next.norm() {
            z = next;
            break;
        }
        z = next;
    }
    Complex64::new(z.re.abs(), z.im.abs())
}

fn complex_roots(
    p: &NonlocalParams,
    pairs: usize,
    search_radius: f64,
) -> Result<Vec<Complex64>> {
    let h = (search_radius / 48.0).min(PI / (3.0 * p.delay));
    let n = (search_radius / h).ceil() as usize;
    let mut starts: Vec<Complex64> = (0..n * n)
        .map(|i| {
            let (a, b) = (i % n, i / n);
            Complex64::new((a as f64 + 0.5) * h, (b as f64 + 0.5) * h)
        })
        .collect();
    starts.extend((0..pairs + LADDER_SLACK).map(|k| ladder_seed(k, p)));

    let found: Vec<Complex64> = starts
        .par_iter()
        .filter_map(|&z0| newton(z0, p))
        .map(|z| Complex64::new(z.re.abs(), z.im.abs()))
        .collect();

    let mut roots: Vec<Complex64> = Vec::new();
    let mut sorted = found;
    sorted.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    for z in sorted {
        // zeros on the imaginary axis are the real modes found by bracketing
        if z.re <= 1e-9 * z.norm() {
            continue;
        }
        if !roots.iter().any(|r| (r - z).norm() <= 1e-6 * (1.0 + z.norm())) {
            roots.push(z);
        }
    }
    roots.sort_by(|a, b| a.norm().total_cmp(&b.norm()).then(a.arg().total_cmp(&b.arg())));
    if roots.len() < pairs {
        return Err(Error::ContourMiss {
            expected: pairs as i64,
            found: roots.len(),
            radius: search_radius,
        });
    }
    Ok(roots)
}

/// Winding number `(1/2πi)∮ Φ′/Φ dz` over `|z| = r` by the trapezoidal rule,
/// refined until two successive node counts agree.
pub fn argument_principle_count(p: &NonlocalParams, r: f64) -> Result<f64> {
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::InvalidParameter(format!("contour radius must be positive, got {r}")));
    }
    let sum = |m: usize| -> f64 {
        (0..m)
            .into_par_iter()
            .map(|j| {
                let e = Complex64::from_polar(1.0, 2.0 * PI * j as f64 / m as f64);
                let z = e * r;
                let (f, fp, _) = phi_scaled(z, p);
                (fp / f * z).re
            })
            .sum::<f64>()
            / m as f64
    };
    let mut m = ((64.0 * (p.delay * r / PI + 4.0)).ceil() as usize).next_power_of_two();
    let mut prev = sum(m);
    while m < 1 << 24 {
        m *= 2;
        let next = sum(m);
        if (next - prev).abs() < 1e-6 && (next - next.round()).abs() < 1e-3 {
            return Ok(next);
        }
        prev = next;
    }
    Err(Error::AccuracyLoss(format!(
        "argument-principle integral on |z| = {r} did not settle (last value {prev})"
    )))
}

/// Nested contours midway between consecutive root moduli; the zero count
/// enclosed (with all symmetric copies) must equal the winding number.
fn audit_moduli(
    p: &NonlocalParams,
    real: &[f64],
    complex: &[Complex64],
    keep: usize,
) -> Result<Vec<ContourAudit>> {
    let mut moduli: Vec<(f64, usize)> = real.iter().map(|&o| (o, 2)).collect();
    moduli.extend(complex.iter().map(|z| (z.norm(), 4)));
    moduli.sort_by(|a, b| a.0.total_cmp(&b.0));
    let last = if keep == 0 {
        real.iter().cloned().fold(0.0, f64::max)
    } else {
        complex[keep - 1].norm()
    };
    let mut radii = vec![0.5 * moduli[0].0];
    for w in moduli.windows(2) {
        let (a, b) = (w[0].0, w[1].0);
        if a > last {
            break;
        }
        if b - a > 1e-6 * b {
            radii.push(0.5 * (a + b));
        }
    }
    if moduli.last().map(|m| m.0) == Some(last) {
        // no known zero beyond: step out by a quarter of the last gap
        let gap = moduli
            .iter()
            .rev()
            .map(|m| m.0)
            .find(|&m| last - m > 1e-6 * last)
            .map_or(0.05 * last, |prev| 0.25 * (last - prev));
        radii.push(last + gap);
    }
    let mut out = Vec::with_capacity(radii.len());
    for r in radii {
        let winding = argument_principle_count(p, r)?;
        let found: usize = moduli.iter().filter(|m| m.0 < r).map(|m| m.1).sum();
        if winding.round() as i64 != found as i64 {
            return Err(Error::ContourMiss {
                expected: winding.round() as i64,
                found,
                radius: r,
            });
        }
        out.push(ContourAudit { radius: r, winding, found });
    }
    Ok(out)
}

/// Re-runs the argument-principle audit on a decomposition.
pub fn audit(d: &ModeDecomposition) -> Result<Vec<ContourAudit>> {
    let real: Vec<f64> = d.real_modes.iter().map(|m| m.omega_i).collect();
    let complex: Vec<Complex64> = d
        .complex_modes
        .iter()
        .map(|m| Complex64::new(-m.omega_k.im, m.omega_k.re))
        .collect();
    audit_moduli(&d.params, &real, &complex, complex.len())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nonlocal::characteristic_residual;

    #[test]
    fn small_delay_has_one_real_mode() {
        let p = NonlocalParams::new(1.0, 1e-8, 1.0).unwrap();
        let d = find_modes(&p, 4, 10.0).unwrap();
        assert_eq!(d.real_modes.len(), 1);
        assert!((d.real_modes[0].omega_i - 1.0).abs() < 1e-6);
        assert!((d.real_modes[0].eta_i - 1.0).abs() < 1e-6);
    }

    #[test]
    fn unit_parameters_roots_are_zeros() {
        let p = NonlocalParams::new(1.0, 1.0, 1.0).unwrap();
        let d = find_modes(&p, 8, 20.0).unwrap();
        for z in d.roots() {
            let r = characteristic_residual(z, &p).unwrap();
            assert!(r <= ROOT_TOL * z.norm_sqr().max(1.0), "{z}: {r:e}");
        }
        // Ω² = cos Ω has the single positive solution 0.8241323123…
        assert_eq!(d.real_modes.len(), 1);
        assert!((d.real_modes[0].omega_i - 0.824_132_312_302_522_9).abs() < 1e-13);
    }

    #[test]
    fn zero_delay_has_no_complex_modes() {
        let p = NonlocalParams::new(2.0, 0.0, 1.0).unwrap();
        let d = find_modes(&p, 3, 5.0).unwrap();
        assert!(d.complex_modes.is_empty());
        assert_eq!(d.real_modes[0].omega_i, 2.0);
        assert_eq!(d.tail_bound, 0.0);
    }

    #[test]
    fn ladder_seed_lands_near_a_zero() {
        let p = NonlocalParams::new(1.0, 1.0, 1.0).unwrap();
        let z = ladder_seed(10, &p);
        let r = newton(z, &p).unwrap();
        assert!((r - z).norm() < 0.05 * z.norm());
    }
}
