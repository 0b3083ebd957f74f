//! Exact eigenfunctions of the decoupled PU Hamiltonian: a normalized
//! oscillator state in `X₁` times an inverted-oscillator continuum state
//! in `X₂` built from `D_{−iε/(ħΩ)−½}` on the 45° ray.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_4, PI};

use super::hermite::hermite_function;
use super::pcf::parabolic_cylinder_full;
use crate::error::{Error, Result};
use crate::pu::PUParams;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Branch {
    Plus,
    Minus,
}

impl Branch {
    pub fn sign(self) -> f64 {
        match self {
            Branch::Plus => 1.0,
            Branch::Minus => -1.0,
        }
    }

    pub fn from_sign(s: i32) -> Result<Self> {
        match s {
            1 => Ok(Branch::Plus),
            -1 => Ok(Branch::Minus),
            _ => Err(Error::InvalidParameter(format!("branch must be ±1, got {s}"))),
        }
    }

    pub const BOTH: [Branch; 2] = [Branch::Plus, Branch::Minus];
}

/// Labels `|n, ε; ±⟩` of the PU eigenstates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EigenLabel {
    pub n: u32,
    pub epsilon: f64,
    pub branch: Branch,
}

impl EigenLabel {
    /// `E(n, ε) = ħΩ(n + ½) − ε`.
    pub fn energy(&self, params: &PUParams) -> f64 {
        params.hbar * params.omega_cap * (self.n as f64 + 0.5) - self.epsilon
    }
}

/// Normalized oscillator factor `(Ω/ħ)^{1/4} φ_n(√(Ω/ħ) x)`.
pub fn oscillator_factor(n: u32, x: f64, params: &PUParams) -> f64 {
    let k = params.omega_cap / params.hbar;
    k.powf(0.25) * hermite_function(n, k.sqrt() * x)
}

fn ln_cosh(a: f64) -> f64 {
    let a = a.abs();
    a + (-2.0 * a).exp().ln_1p() - std::f64::consts::LN_2
}

/// Inverted-oscillator state with eigenvalue `ε` of `½P² − ½Ω²X²`:
/// `(2Ω/ħ)^{1/4} e^{πε/(4ħΩ)} / √(4π cosh(πε/ħΩ)) · D_{−iε/(ħΩ)−½}(±√(2Ω/ħ) e^{iπ/4} x)`.
pub fn inverted_eigenfunction(
    epsilon: f64,
    branch: Branch,
    x: f64,
    params: &PUParams,
) -> Result<Complex64> {
    Ok(inverted_eigenfunction_with_derivative(epsilon, branch, x, params)?.0)
}

/// Value and `d/dx` of [`inverted_eigenfunction`].
pub fn inverted_eigenfunction_with_derivative(
    epsilon: f64,
    branch: Branch,
    x: f64,
    params: &PUParams,
) -> Result<(Complex64, Complex64)> {
    let hw = params.hbar * params.omega_cap;
    let e = epsilon / hw;
    let nu = Complex64::new(-0.5, -e);
    let scale = (2.0 * params.omega_cap / params.hbar).sqrt();
    let c = branch.sign() * scale * Complex64::from_polar(1.0, FRAC_PI_4);
    let log_norm = 0.25 * (2.0 * params.omega_cap / params.hbar).ln() + PI * e / 4.0
        - 0.5 * ((4.0 * PI).ln() + ln_cosh(PI * e));
    let norm = log_norm.exp();
    let d = parabolic_cylinder_full(nu, c * x)?;
    Ok((norm * d.value, norm * c * d.derivative))
}

/// `⟨X₁, X₂ | n, ε; ±⟩`.
pub fn pu_eigenfunction(label: &EigenLabel, x1: f64, x2: f64, params: &PUParams) -> Result<Complex64> {
    let osc = oscillator_factor(label.n, x1, params);
    Ok(osc * inverted_eigenfunction(label.epsilon, label.branch, x2, params)?)
}
