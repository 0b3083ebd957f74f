//! Closed-form kernels `K(x, y; t) = ⟨x|e^{−iHt/ħ}|y⟩`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use super::kernel::QuadraticKernel;
use super::{check_nonnegative, check_positive};
use crate::error::{Error, Result};
use crate::pu::PUParams;

/// Free kernel `(1 − i sgn t)/(2√(πħ|t|)) · e^{i(x−y)²/(2ħt)}`.
pub fn free_propagator(x: f64, y: f64, t: f64, hbar: f64) -> Result<Complex64> {
    check_positive("hbar", hbar)?;
    nonzero_time(t)?;
    let pre = Complex64::new(1.0, -t.signum()) / (2.0 * (PI * hbar * t.abs()).sqrt());
    Ok(pre * Complex64::new(0.0, (x - y).powi(2) / (2.0 * hbar * t)).exp())
}

fn nonzero_time(t: f64) -> Result<()> {
    if t == 0.0 || !t.is_finite() {
        return Err(Error::InvalidParameter(format!("propagator needs finite t ≠ 0, got {t}")));
    }
    Ok(())
}

/// Kernel of `½P² − ½ω²X²` as its quadratic-phase parameters.
pub fn inverted_kernel(t: f64, omega: f64, hbar: f64) -> Result<QuadraticKernel> {
    check_nonnegative("omega", omega)?;
    check_positive("hbar", hbar)?;
    nonzero_time(t)?;
    let wt = omega * t;
    // √(ωt/sinh ωt) and ω/sinh ωt, cosh ωt with the ω → 0 limits kept exact
    let (ratio, w_over_sh, ch) = if wt.abs() < 1e-4 {
        let w2 = wt * wt;
        let r = 1.0 - w2 / 12.0 + 7.0 * w2 * w2 / 1440.0;
        (r, (1.0 - w2 / 6.0) / t, 1.0 + w2 / 2.0)
    } else if wt.abs() > 700.0 {
        return Err(Error::Overflow(format!("sinh(ωt) with ωt = {wt}")));
    } else {
        let sh = wt.sinh();
        ((wt / sh).sqrt(), omega / sh, wt.cosh())
    };
    let pre = Complex64::new(1.0, -t.signum()) / (2.0 * (PI * hbar * t.abs()).sqrt()) * ratio;
    let k = w_over_sh / (2.0 * hbar);
    Ok(QuadraticKernel {
        coeff_xx: Complex64::new(k * ch, 0.0),
        coeff_yy: Complex64::new(k * ch, 0.0),
        coeff_xy: Complex64::new(-2.0 * k, 0.0),
        prefactor: pre,
    })
}

/// `K = ((1 − i sgn t)/(2√(πħ|t|)))·√(ωt/sinh ωt)·exp{(iω/(2ħ sinh ωt))((x²+y²)cosh ωt − 2xy)}`.
pub fn inverted_propagator(x: f64, y: f64, t: f64, omega: f64, hbar: f64) -> Result<Complex64> {
    Ok(inverted_kernel(t, omega, hbar)?.eval(x, y))
}

/// `K(0, 0; t)` for `t > 0`: `((1 − i)/2)·√(ω/(πħ sinh ωt))`.
pub fn inverted_diagonal_origin(t: f64, omega: f64, hbar: f64) -> Result<Complex64> {
    check_positive("t", t)?;
    check_positive("omega", omega)?;
    check_positive("hbar", hbar)?;
    Ok(Complex64::new(0.5, -0.5) * (omega / (PI * hbar * (omega * t).sinh())).sqrt())
}

/// Value of a kernel together with the quadratic form that produced it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComplexKernelSample {
    pub x: f64,
    pub y: f64,
    pub t: f64,
    pub value: Complex64,
    pub kernel: QuadraticKernel,
}

pub fn inverted_sample(x: f64, y: f64, t: f64, omega: f64, hbar: f64) -> Result<ComplexKernelSample> {
    let kernel = inverted_kernel(t, omega, hbar)?;
    Ok(ComplexKernelSample {
        x,
        y,
        t,
        value: kernel.eval(x, y),
        kernel,
    })
}

/// The inverted closed form evaluated at complex frequency with principal
/// square roots; reduces to the Mehler kernel at `ω → iω` for `0 < |ωt| < π`.
pub fn inverted_propagator_complex_omega(
    x: f64,
    y: f64,
    t: f64,
    omega: Complex64,
    hbar: f64,
) -> Result<Complex64> {
    check_positive("hbar", hbar)?;
    nonzero_time(t)?;
    let wt = omega * t;
    let sh = wt.sinh();
    if sh.norm() == 0.0 {
        return Err(Error::Caustic(format!("sinh(ωt) = 0 at ωt = {wt}")));
    }
    let pre = Complex64::new(1.0, -t.signum()) / (2.0 * (PI * hbar * t.abs()).sqrt()) * (wt / sh).sqrt();
    let i = Complex64::new(0.0, 1.0);
    let phase = i * omega / (2.0 * hbar * sh) * ((x * x + y * y) * wt.cosh() - 2.0 * x * y);
    Ok(pre * phase.exp())
}

/// Kernel of `½P² + ½ω²X²` (Mehler), with the Maslov phase
/// `e^{−iπ/4}e^{−iπm/2}`, `m = ⌊ωt/π⌋`, for `t > 0`; `K(−t) = K̄(t)`.
pub fn harmonic_kernel(t: f64, omega: f64, hbar: f64) -> Result<QuadraticKernel> {
    check_nonnegative("omega", omega)?;
    check_positive("hbar", hbar)?;
    nonzero_time(t)?;
    if t < 0.0 {
        return Ok(harmonic_kernel(-t, omega, hbar)?.conj());
    }
    let wt = omega * t;
    if wt < 1e-4 {
        let w2 = wt * wt;
        let ratio = 1.0 + w2 / 12.0 + 7.0 * w2 * w2 / 1440.0;
        let k = (1.0 + w2 / 6.0) / (2.0 * hbar * t);
        let pre = Complex64::from_polar(ratio / (2.0 * PI * hbar * t).sqrt(), -FRAC_PI_4);
        return Ok(QuadraticKernel {
            coeff_xx: Complex64::new(k * (1.0 - w2 / 2.0), 0.0),
            coeff_yy: Complex64::new(k * (1.0 - w2 / 2.0), 0.0),
            coeff_xy: Complex64::new(-2.0 * k, 0.0),
            prefactor: pre,
        });
    }
    let m = (wt / PI).floor();
    let s = wt.sin();
    if (wt - PI * (wt / PI).round()).abs() < 1e-12 * wt.max(1.0) || s == 0.0 {
        return Err(Error::Caustic(format!("ωt = {wt} is a multiple of π")));
    }
    let pre = Complex64::from_polar(
        (omega / (2.0 * PI * hbar * s.abs())).sqrt(),
        -FRAC_PI_4 - FRAC_PI_2 * m,
    );
    let k = omega / (2.0 * hbar * s);
    Ok(QuadraticKernel {
        coeff_xx: Complex64::new(k * wt.cos(), 0.0),
        coeff_yy: Complex64::new(k * wt.cos(), 0.0),
        coeff_xy: Complex64::new(-2.0 * k, 0.0),
        prefactor: pre,
    })
}

pub fn harmonic_propagator(x: f64, y: f64, t: f64, omega: f64, hbar: f64) -> Result<Complex64> {
    Ok(harmonic_kernel(t, omega, hbar)?.eval(x, y))
}

/// `⟨x₁′, x₂′|e^{−iHt/ħ}|x₁, x₂⟩` for `H = h_osc(X₁) − h_inv(X₂)`: the
/// inverted factor runs backwards in time.
pub fn pu_propagator(
    x1p: f64,
    x2p: f64,
    x1: f64,
    x2: f64,
    t: f64,
    params: &PUParams,
) -> Result<Complex64> {
    let h = harmonic_propagator(x1p, x1, t, params.omega_cap, params.hbar)?;
    let v = inverted_propagator(x2p, x2, -t, params.omega_cap, params.hbar)?;
    Ok(h * v)
}
