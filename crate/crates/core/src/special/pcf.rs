//! Parabolic cylinder functions `D_ν(z)` for complex order and argument.
//!
//! `D_ν` solves `y'' = (z²/4 − ν − ½) y` with `D_ν(z) ~ z^ν e^{−z²/4}` for
//! `|arg z| < 3π/4`. Four evaluation routes are combined, each carrying its
//! own a-posteriori error estimate:
//!
//! * Maclaurin series from the exact values `D_ν(0)`, `D'_ν(0)` (small `|z|`);
//! * the large-`|z|` asymptotic expansion (right half-plane);
//! * analytic continuation of the ODE by re-expanded Taylor series, run
//!   outward from the origin where `D_ν` is dominant and inward from an
//!   asymptotic anchor where `D_ν` is recessive (`|arg z| < π/4`);
//! * the connection formula to reach the left half-plane from values at
//!   `−z` and `±iz`.
//!
//! Values are carried with a separate logarithmic scale so the continuation
//! never overflows on the way to a representable result.

use num_complex::Complex64;
use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use super::gamma::recip_gamma;
use crate::error::{Error, Result};

/// Supported region: `|z| ≤ MAX_ABS_Z` and `|ν| ≤ MAX_ABS_NU`.
pub const MAX_ABS_Z: f64 = 50.0;
pub const MAX_ABS_NU: f64 = 50.0;

/// Beyond this radius the Maclaurin route is not attempted. Chosen from the
/// series/asymptotic agreement scan (`tests/pcf_switch.rs`): on the rays the
/// artifact uses the two routes overlap to better than 1e-10 for
/// `6 ≤ |z| ≤ 8`.
pub const MACLAURIN_MAX_RADIUS: f64 = 8.0;

/// Estimated relative error below which a route is accepted outright.
const ACCEPT: f64 = 1e-10;
/// Estimated relative error above which evaluation is refused.
const REFUSE: f64 = 1e-6;

const EPS: f64 = f64::EPSILON;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PcfRoute {
    Maclaurin,
    Asymptotic,
    OutwardContinuation,
    InwardContinuation,
    Connection,
}

/// `D_ν(z)` and `D'_ν(z)` with the route used and its error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PcfValue {
    pub value: Complex64,
    pub derivative: Complex64,
    pub route: PcfRoute,
    pub error_estimate: f64,
}

/// Local amplitude `√(|y|² + |y'|²/k²)` with `k² = max(1, |z²/4 − ν − ½|)`.
/// Error estimates are relative to it, so they stay finite at zeros of `D_ν`.
fn amplitude(y: Complex64, dy: Complex64, nu: Complex64, z: Complex64) -> f64 {
    let k = (z * z * 0.25 - nu - 0.5).norm().max(1.0).sqrt();
    y.norm().hypot(dy.norm() / k)
}

/// `(y, y')·e^{log_scale}`.
#[derive(Debug, Clone, Copy)]
struct Scaled {
    y: Complex64,
    dy: Complex64,
    log_scale: f64,
    err: f64,
}

impl Scaled {
    fn renormalize(&mut self) {
        let m = self.y.norm().max(self.dy.norm());
        if m > 0.0 && !(1e-100..=1e100).contains(&m) {
            self.y /= m;
            self.dy /= m;
            self.log_scale += m.ln();
        }
    }

    fn log_amp(&self, nu: Complex64, z: Complex64) -> f64 {
        self.log_scale + amplitude(self.y, self.dy, nu, z).ln()
    }

    fn finish(self, route: PcfRoute) -> Result<PcfValue> {
        let m = self.y.norm().max(self.dy.norm());
        if m == 0.0 {
            return Ok(PcfValue {
                value: self.y,
                derivative: self.dy,
                route,
                error_estimate: self.err,
            });
        }
        if self.log_scale + m.ln() > 709.0 {
            return Err(Error::Overflow(format!(
                "parabolic cylinder value of magnitude e^{:.1} is not representable",
                self.log_scale + m.ln()
            )));
        }
        let s = self.log_scale.exp();
        let (value, derivative) = if s.is_finite() && s > 0.0 {
            (self.y * s, self.dy * s)
        } else {
            // split the scale to avoid intermediate overflow/underflow
            let half = (0.5 * self.log_scale).exp();
            (self.y * half * half, self.dy * half * half)
        };
        Ok(PcfValue {
            value,
            derivative,
            route,
            error_estimate: self.err,
        })
    }
}

/// `D_ν(z)`.
pub fn parabolic_cylinder_d(nu: Complex64, z: Complex64) -> Result<Complex64> {
    Ok(parabolic_cylinder_full(nu, z)?.value)
}

/// `D_ν(z)`, `D'_ν(z)`, route and error estimate.
pub fn parabolic_cylinder_full(nu: Complex64, z: Complex64) -> Result<PcfValue> {
    if !(nu.re.is_finite() && nu.im.is_finite() && z.re.is_finite() && z.im.is_finite()) {
        return Err(Error::InvalidParameter("non-finite input".into()));
    }
    if nu.norm() > MAX_ABS_NU {
        return Err(Error::InvalidParameter(format!(
            "|ν| = {} outside the supported region |ν| ≤ {MAX_ABS_NU}",
            nu.norm()
        )));
    }
    let out = if z.norm() > MAX_ABS_Z {
        // outside the supported disc only certified asymptotic values are returned
        if z.re < 0.0 {
            connection(nu, z)?
        } else {
            match asymptotic_right(nu, z) {
                Some(s) if s.err <= ACCEPT => s.finish(PcfRoute::Asymptotic)?,
                _ => {
                    return Err(Error::InvalidParameter(format!(
                        "|z| = {} outside the supported region |z| ≤ {MAX_ABS_Z}",
                        z.norm()
                    )))
                }
            }
        }
    } else if z.re >= 0.0 {
        let (s, route) = eval_right(nu, z)?;
        s.finish(route)?
    } else {
        left(nu, z)?
    };
    if out.error_estimate > REFUSE || !out.error_estimate.is_finite() {
        return Err(Error::AccuracyLoss(format!(
            "D_ν(z) at ν = {nu}, z = {z}: estimated relative error {:e} via {:?}",
            out.error_estimate, out.route
        )));
    }
    Ok(out)
}

/// Left half-plane: the series near the origin, otherwise the connection formula.
fn left(nu: Complex64, z: Complex64) -> Result<PcfValue> {
    let series = (z.norm() <= MACLAURIN_MAX_RADIUS).then(|| maclaurin(nu, z));
    if let Some(s) = series.filter(|s| s.err <= ACCEPT) {
        return s.finish(PcfRoute::Maclaurin);
    }
    let c = connection(nu, z)?;
    match series {
        Some(s) if s.err < c.error_estimate => s.finish(PcfRoute::Maclaurin),
        _ => Ok(c),
    }
}

/// Evaluation in the closed right half-plane.
fn eval_right(nu: Complex64, z: Complex64) -> Result<(Scaled, PcfRoute)> {
    let r = z.norm();
    let mut best: Option<(Scaled, PcfRoute)> = None;
    let consider = |cand: Scaled, route: PcfRoute, best: &mut Option<(Scaled, PcfRoute)>| {
        if best.as_ref().is_none_or(|(b, _)| cand.err < b.err) {
            *best = Some((cand, route));
        }
    };

    if r <= MACLAURIN_MAX_RADIUS {
        let s = maclaurin(nu, z);
        if s.err <= ACCEPT {
            return Ok((s, PcfRoute::Maclaurin));
        }
        consider(s, PcfRoute::Maclaurin, &mut best);
    }
    if r > 0.0 {
        if let Some(s) = asymptotic_right(nu, z) {
            if s.err <= ACCEPT {
                return Ok((s, PcfRoute::Asymptotic));
            }
            consider(s, PcfRoute::Asymptotic, &mut best);
        }
    }
    let theta = z.arg().abs();
    let cont = if theta <= FRAC_PI_4 {
        inward(nu, z).map(|s| (s, PcfRoute::InwardContinuation))
    } else {
        Some((outward(nu, z), PcfRoute::OutwardContinuation))
    };
    if let Some((s, route)) = cont {
        consider(s, route, &mut best);
    }
    best.ok_or_else(|| Error::AccuracyLoss(format!("no evaluation route for ν = {nu}, z = {z}")))
}

/// `D_ν(0)` and `D'_ν(0)`.
fn origin_values(nu: Complex64) -> (Complex64, Complex64) {
    let sqrt_pi = PI.sqrt();
    let ln2 = std::f64::consts::LN_2;
    let d0 = sqrt_pi * (0.5 * nu * ln2).exp() * recip_gamma((1.0 - nu) * 0.5);
    let d1 = -sqrt_pi * (0.5 * (nu + 1.0) * ln2).exp() * recip_gamma(-nu * 0.5);
    (d0, d1)
}

/// Maclaurin series `Σ c_n zⁿ` from the ODE recurrence
/// `(n+1)(n+2)c_{n+2} = c_{n−2}/4 − (ν+½)c_n`.
fn maclaurin(nu: Complex64, z: Complex64) -> Scaled {
    let (c0, c1) = origin_values(nu);
    let a = nu + 0.5;
    // scaled terms b_n = c_n zⁿ
    let z2 = z * z;
    let z4 = z2 * z2;
    let mut sum = c0 + c1 * z;
    let mut dsum = c1;
    let mut abs_sum = c0.norm() + (c1 * z).norm();
    // keep b_{n-2}, b_{n-1}, b_n, b_{n+1} explicitly
    let (mut bm2, mut bm1, mut b0, mut b1) =
        (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0), c0, c1 * z);
    let mut n = 0usize;
    let mut quiet = 0;
    loop {
        // b_{n+2} = (b_{n-2} z⁴/4 − a b_n z²)/((n+1)(n+2))
        let denom = ((n + 1) * (n + 2)) as f64;
        let b2 = (bm2 * z4 * 0.25 - a * b0 * z2) / denom;
        let k = n + 2;
        sum += b2;
        if z.norm() > 0.0 {
            dsum += b2 * (k as f64) / z;
        }
        let m = b2.norm();
        abs_sum += m;
        let tiny = 1e-18 * sum.norm().max(dsum.norm() * z.norm()).max(f64::MIN_POSITIVE);
        if m <= tiny && k > 4 && (k as f64) > z.norm_sqr() * 0.5 {
            quiet += 1;
            if quiet >= 4 {
                break;
            }
        } else {
            quiet = 0;
        }
        if k > 4000 || !m.is_finite() {
            break;
        }
        bm2 = bm1;
        bm1 = b0;
        b0 = b1;
        b1 = b2;
        n += 1;
    }
    let amp = amplitude(sum, dsum, nu, z);
    let err = if amp > 0.0 {
        8.0 * EPS * abs_sum / amp
    } else {
        f64::INFINITY
    };
    let mut s = Scaled {
        y: sum,
        dy: dsum,
        log_scale: 0.0,
        err: if err.is_finite() { err } else { f64::INFINITY },
    };
    s.renormalize();
    s
}

/// Principal asymptotic expansion, valid for `|arg z| ≤ π/2`:
/// `D_ν(z) ≈ e^{−z²/4} z^ν Σ_s (−1)^s (−ν)_{2s} / (s! (2z²)^s)`.
fn asymptotic_right(nu: Complex64, z: Complex64) -> Option<Scaled> {
    if z.norm() == 0.0 || z.arg().abs() > FRAC_PI_2 + 1e-12 {
        return None;
    }
    let inv2z2 = 1.0 / (2.0 * z * z);
    let mut term = Complex64::new(1.0, 0.0);
    let mut sum = term;
    let mut dsum = Complex64::new(0.0, 0.0);
    let mut last = 1.0f64;
    let mut err = 0.0;
    for s in 0..400usize {
        let sf = s as f64;
        let next = -term * (-nu + 2.0 * sf) * (-nu + 2.0 * sf + 1.0) * inv2z2 / (sf + 1.0);
        let m = next.norm();
        if m == 0.0 {
            err = 0.0;
            break;
        }
        if m > last && s > 0 {
            // smallest term reached; it bounds the truncation error
            err = last / sum.norm();
            break;
        }
        sum += next;
        dsum += next * (-2.0 * (sf + 1.0)) / z;
        term = next;
        last = m;
        err = m / sum.norm();
        if m < 1e-17 * sum.norm() {
            break;
        }
    }
    // D = e^{L} S with L = −z²/4 + ν ln z
    let lz = z.ln();
    let big_l = -z * z * 0.25 + nu * lz;
    let phase = Complex64::from_polar(1.0, big_l.im);
    let y = phase * sum;
    let dy = phase * ((-z * 0.5 + nu / z) * sum + dsum);
    let mut out = Scaled {
        y,
        dy,
        log_scale: big_l.re,
        err: err + 16.0 * EPS,
    };
    out.renormalize();
    Some(out)
}

/// Largest continuation step keeping `|Q|·|w|² ≲ 1` for `Q = z²/4 − ν − ½`.
fn step_limit(nu: Complex64, z: Complex64) -> f64 {
    let q0 = (z * z * 0.25 - nu - 0.5).norm();
    let q1 = 0.5 * z.norm();
    let a = if q0 > 0.0 { 0.9 / q0.sqrt() } else { f64::INFINITY };
    let b = if q1 > 0.0 { 0.9 / q1.cbrt() } else { f64::INFINITY };
    a.min(b).min(0.5)
}

/// One re-expanded Taylor step of the ODE from `z0` by `w`.
fn taylor_step(nu: Complex64, z0: Complex64, w: Complex64, y: Complex64, dy: Complex64) -> (Complex64, Complex64) {
    let q0 = z0 * z0 * 0.25 - nu - 0.5;
    let q1 = z0 * 0.5;
    let w2 = w * w;
    let (c0, c1, c2) = (q0 * w2, q1 * w2 * w, 0.25 * w2 * w2);
    // scaled coefficients b_k = a_k w^k
    let (mut bm2, mut bm1, mut b0, mut b1) = (
        Complex64::new(0.0, 0.0),
        Complex64::new(0.0, 0.0),
        y,
        dy * w,
    );
    let mut val = b0 + b1;
    let mut dval = b1;
    let mut quiet = 0;
    let mut k = 0usize;
    loop {
        let b2 = (c0 * b0 + c1 * bm1 + c2 * bm2) / (((k + 1) * (k + 2)) as f64);
        val += b2;
        dval += b2 * (k + 2) as f64;
        let tiny = 1e-19 * (val.norm() + dval.norm());
        if b2.norm() <= tiny {
            quiet += 1;
            if quiet >= 3 {
                break;
            }
        } else {
            quiet = 0;
        }
        if k > 200 {
            break;
        }
        bm2 = bm1;
        bm1 = b0;
        b0 = b1;
        b1 = b2;
        k += 1;
    }
    (val, dval / w)
}

/// Continues the solution in `start` from `from` to `to` along a straight line.
/// Rounding injected at `ζ` can excite the other solution, which grows by at
/// most `|e^{±(z²−ζ²)/4}|` before reaching `to`; the error estimate carries
/// the worst such amplification over the path.
fn continue_along(nu: Complex64, mut start: Scaled, from: Complex64, to: Complex64) -> Scaled {
    let mut z = from;
    let mut steps = 0usize;
    let growth = |zeta: Complex64| 0.25 * (to * to - zeta * zeta).re.abs();
    let mut worst = start.log_amp(nu, from) + growth(from);
    let local_err = start.err;
    while (to - z).norm() > 0.0 {
        let remaining = to - z;
        let h = step_limit(nu, z);
        let w = if remaining.norm() <= h {
            remaining
        } else {
            remaining / remaining.norm() * h
        };
        let (y, dy) = taylor_step(nu, z, w, start.y, start.dy);
        start.y = y;
        start.dy = dy;
        start.renormalize();
        z = if remaining.norm() <= h { to } else { z + w };
        steps += 1;
        worst = worst.max(start.log_amp(nu, z) + growth(z));
    }
    let decay = (worst - start.log_amp(nu, to)).max(0.0);
    start.err = (local_err + 16.0 * EPS * (steps as f64 + 4.0)) * decay.exp();
    start
}

/// Continuation from the origin, stable where `D_ν` is dominant or oscillatory.
fn outward(nu: Complex64, z: Complex64) -> Scaled {
    let (d0, d1) = origin_values(nu);
    let start = Scaled {
        y: d0,
        dy: d1,
        log_scale: 0.0,
        err: 4.0 * EPS,
    };
    let mut s = start;
    s.renormalize();
    continue_along(nu, s, Complex64::new(0.0, 0.0), z)
}

/// Continuation inward from an asymptotic anchor on the same ray, stable
/// where `D_ν` is recessive.
fn inward(nu: Complex64, z: Complex64) -> Option<Scaled> {
    let dir = if z.norm() > 0.0 {
        z / z.norm()
    } else {
        Complex64::new(1.0, 0.0)
    };
    let mut radius = z.norm().max(8.0);
    let mut anchor = None;
    for _ in 0..40 {
        let za = dir * radius;
        if let Some(s) = asymptotic_right(nu, za) {
            if s.err <= 1e-14 {
                anchor = Some((s, za));
                break;
            }
        }
        radius *= 1.2;
        if radius > 2000.0 {
            break;
        }
    }
    let (s, za) = anchor?;
    Some(continue_along(nu, s, za, z))
}

/// Left half-plane via
/// `D_ν(z) = e^{∓iπν} D_ν(−z) + √(2π)/Γ(−ν) e^{∓iπ(ν+1)/2} D_{−ν−1}(±iz)`,
/// with the sign chosen so that both arguments lie in the right half-plane.
fn connection(nu: Complex64, z: Complex64) -> Result<PcfValue> {
    let i = Complex64::new(0.0, 1.0);
    // lower sign (−iz, e^{+iπν}) when Im z ≥ 0, upper sign otherwise
    let sgn = if z.im >= 0.0 { -1.0 } else { 1.0 };
    let rot = i * sgn; // ±i
    let a = right_or_asymptotic(nu, -z)?;
    let mu = -nu - 1.0;
    let rg = recip_gamma(-nu);
    let c1 = (-i * sgn * PI * nu).exp();
    let c2 = (2.0 * PI).sqrt() * rg * (-i * sgn * PI * (nu + 1.0) * 0.5).exp();
    let t1 = c1 * a.value;
    let dt1 = -c1 * a.derivative;
    let (t2, dt2, e2) = if rg.norm() == 0.0 {
        (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0), 0.0)
    } else {
        let b = right_or_asymptotic(mu, rot * z)?;
        (c2 * b.value, c2 * rot * b.derivative, b.error_estimate)
    };
    let value = t1 + t2;
    let derivative = dt1 + dt2;
    let scale = amplitude(value, derivative, nu, z);
    let err = if scale > 0.0 {
        let (m1, m2) = (amplitude(t1, dt1, nu, z), amplitude(t2, dt2, nu, z));
        (a.error_estimate * m1 + e2 * m2 + 8.0 * EPS * (m1 + m2))
            / scale
    } else {
        f64::INFINITY
    };
    Ok(PcfValue {
        value,
        derivative,
        route: PcfRoute::Connection,
        error_estimate: err,
    })
}

fn right_or_asymptotic(nu: Complex64, z: Complex64) -> Result<PcfValue> {
    if z.norm() > MAX_ABS_Z {
        if let Some(s) = asymptotic_right(nu, z) {
            if s.err <= ACCEPT {
                return s.finish(PcfRoute::Asymptotic);
            }
        }
    }
    let (s, route) = eval_right(nu, z)?;
    s.finish(route)
}

/// Two independent evaluations of `D_ν(z)` for cross-validation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PcfCrossCheck {
    pub primary: PcfValue,
    pub secondary: Option<(Complex64, PcfRoute)>,
    /// Relative difference between the two routes (None without a second route).
    pub relative_difference: Option<f64>,
}

/// Evaluates `D_ν(z)` by the primary route and, where available, by a second
/// route independent of it (series vs. asymptotic, or a continuation).
pub fn cross_validate(nu: Complex64, z: Complex64) -> Result<PcfCrossCheck> {
    let primary = parabolic_cylinder_full(nu, z)?;
    let secondary = if z.re >= 0.0 {
        let candidates: Vec<(Scaled, PcfRoute)> = [
            (z.norm() <= MACLAURIN_MAX_RADIUS).then(|| (maclaurin(nu, z), PcfRoute::Maclaurin)),
            asymptotic_right(nu, z).map(|s| (s, PcfRoute::Asymptotic)),
            Some((outward(nu, z), PcfRoute::OutwardContinuation)),
            inward(nu, z).map(|s| (s, PcfRoute::InwardContinuation)),
        ]
        .into_iter()
        .flatten()
        .filter(|(s, r)| *r != primary.route && s.err <= REFUSE)
        .collect();
        candidates
            .into_iter()
            .min_by(|a, b| a.0.err.total_cmp(&b.0.err))
            .and_then(|(s, r)| s.finish(r).ok())
            .map(|v| (v.value, v.route))
    } else {
        // continuation straight from the origin as the independent route
        let s = outward(nu, z);
        (s.err <= REFUSE)
            .then(|| s.finish(PcfRoute::OutwardContinuation).ok())
            .flatten()
            .map(|v| (v.value, v.route))
    };
    let relative_difference = secondary.map(|(v, _)| {
        let d = (v - primary.value).norm();
        let m = primary.value.norm().max(v.norm());
        if m == 0.0 {
            0.0
        } else {
            d / m
        }
    });
    Ok(PcfCrossCheck {
        primary,
        secondary,
        relative_difference,
    })
}
