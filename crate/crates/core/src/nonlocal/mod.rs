//! Nonlocal oscillator `q̈ + (ω²/2)(q(t−T) + q(t+T)) = 0`.
//!
//! Its modes are the zeros of `Φ(z) = z² + ω²cosh(Tz)`. Zeros on the
//! imaginary axis `z = ±iΩᵢ` are ordinary (possibly sign-flipped) oscillator
//! modes; the rest come in quadruples `±iω_k, ±iω̄_k` and each quadruple
//! contributes one dilatation–rotation generator.

mod modes;
mod roots;

pub use modes::{
    mode_trajectory, partial_fraction_eval, residues, spectrum_generators, ComplexMode,
    ModeDecomposition, ModeTrajectory, RealMode, SpectrumGenerator,
};
pub use roots::{argument_principle_count, audit, find_modes, ContourAudit};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest `|Re(Tz)|` for which `Φ` is evaluated unscaled.
pub const MAX_EXPONENT: f64 = 700.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NonlocalParams {
    pub omega: f64,
    /// Delay `T ≥ 0`.
    pub delay: f64,
    pub hbar: f64,
}

impl NonlocalParams {
    pub fn new(omega: f64, delay: f64, hbar: f64) -> Result<Self> {
        if !(omega > 0.0 && omega.is_finite()) {
            return Err(Error::InvalidParameter(format!("ω must be positive, got {omega}")));
        }
        if !(delay >= 0.0 && delay.is_finite()) {
            return Err(Error::InvalidParameter(format!("delay must be ≥ 0, got {delay}")));
        }
        if !(hbar > 0.0 && hbar.is_finite()) {
            return Err(Error::InvalidParameter(format!("hbar must be positive, got {hbar}")));
        }
        Ok(Self { omega, delay, hbar })
    }
}

fn check_exponent(z: Complex64, p: &NonlocalParams) -> Result<()> {
    let e = (p.delay * z.re).abs();
    if e > MAX_EXPONENT || !e.is_finite() {
        return Err(Error::Overflow(format!(
            "|Re(Tz)| = {e} exceeds {MAX_EXPONENT} at z = {z}"
        )));
    }
    Ok(())
}

/// `Φ(z) = z² + ω²cosh(Tz)`.
pub fn phi(z: Complex64, p: &NonlocalParams) -> Result<Complex64> {
    check_exponent(z, p)?;
    Ok(z * z + p.omega * p.omega * (p.delay * z).cosh())
}

/// `dΦ/dz = 2z + ω²T sinh(Tz)`.
pub fn phi_prime(z: Complex64, p: &NonlocalParams) -> Result<Complex64> {
    check_exponent(z, p)?;
    Ok(2.0 * z + p.omega * p.omega * p.delay * (p.delay * z).sinh())
}

/// `|z² + (ω²/2)(e^{−zT} + e^{zT})|`; zero exactly when `e^{zt}` solves the
/// equation of motion.
pub fn characteristic_residual(z: Complex64, p: &NonlocalParams) -> Result<f64> {
    Ok(phi(z, p)?.norm())
}

/// `(Φ, Φ′)·e^{−|Re(Tz)|}`, finite for every finite `z`.
pub(crate) fn phi_scaled(z: Complex64, p: &NonlocalParams) -> (Complex64, Complex64, f64) {
    let w = p.delay * z;
    let s = w.re.abs();
    let ep = (w - s).exp();
    let em = (-w - s).exp();
    let w2 = p.omega * p.omega;
    let damp = (-s).exp();
    let f = z * z * damp + w2 * 0.5 * (ep + em);
    let fp = 2.0 * z * damp + w2 * p.delay * 0.5 * (ep - em);
    (f, fp, s)
}

/// Scale of the two terms of `Φ′`, used for the double-zero test.
pub(crate) fn phi_prime_scale(z: Complex64, p: &NonlocalParams) -> f64 {
    let (_, _, s) = phi_scaled(z, p);
    let w = p.delay * z;
    let sinh_scaled = 0.5 * ((w - s).exp() - (-w - s).exp());
    2.0 * z.norm() * (-s).exp() + p.omega * p.omega * p.delay * sinh_scaled.norm()
}
