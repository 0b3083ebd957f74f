//! Mode decomposition of `ω⁴/Φ`: residues, the partial-fraction sum, the
//! commuting generators of the mode-sum Hamiltonian and exponential
//! mode trajectories.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use super::{phi, NonlocalParams, MAX_EXPONENT};
use crate::error::{Error, Result};
use crate::quadrature::KahanComplex;

/// Zero `z² = −Ωᵢ²` on the imaginary axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RealMode {
    #[serde(rename = "Omega_i")]
    pub omega_i: f64,
    pub eta_i: f64,
    /// `sgn ηᵢ`, 0 until residues are populated.
    pub sign_i: i8,
}

/// Representative `ω_k` of the pair `z² = −ω_k², −ω̄_k²`, chosen with
/// `Re ω_k > 0 > Im ω_k` so that `z = iω_k` lies in the first quadrant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComplexMode {
    pub omega_k: Complex64,
    pub eta_k: Complex64,
}

impl ComplexMode {
    /// The first-quadrant zero `z = iω_k`.
    pub fn zero(&self) -> Complex64 {
        Complex64::new(-self.omega_k.im, self.omega_k.re)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeDecomposition {
    pub params: NonlocalParams,
    pub real_modes: Vec<RealMode>,
    pub complex_modes: Vec<ComplexMode>,
    #[serde(rename = "truncation_K")]
    pub truncation_k: usize,
    /// Bound on `Σ_{k>K} |ω_k|⁻²` for the dropped pairs.
    pub tail_bound: f64,
}

impl ModeDecomposition {
    /// All stored zeros in `z`: `±iΩᵢ` per real mode, then
    /// `z_k, z̄_k, −z_k, −z̄_k` per complex pair.
    pub fn roots(&self) -> Vec<Complex64> {
        let mut out = Vec::with_capacity(2 * self.real_modes.len() + 4 * self.complex_modes.len());
        for m in &self.real_modes {
            out.push(Complex64::new(0.0, m.omega_i));
            out.push(Complex64::new(0.0, -m.omega_i));
        }
        for m in &self.complex_modes {
            let z = m.zero();
            out.extend([z, z.conj(), -z, -z.conj()]);
        }
        out
    }

    /// Keeps the first `k` complex pairs.
    pub fn truncated(&self, k: usize) -> Self {
        let k = k.min(self.complex_modes.len());
        let mut d = self.clone();
        d.complex_modes.truncate(k);
        d.truncation_k = k;
        d.tail_bound = d.tail_estimate();
        d
    }

    /// Pair moduli grow by about `2π/T` per pair, so the dropped part of
    /// `Σ|ω_k|⁻²` is at most `∫ dx/(|ω_K| + 2πx/T)² = T/(2π|ω_K|)`; reported
    /// with a factor 2 margin.
    pub(crate) fn tail_estimate(&self) -> f64 {
        match self.complex_modes.last() {
            Some(m) if self.params.delay > 0.0 => self.params.delay / (PI * m.omega_k.norm()),
            _ => 0.0,
        }
    }

    /// `Σ_k |ω_k|⁻²` over the stored pairs.
    pub fn inverse_square_sum(&self) -> f64 {
        self.complex_modes.iter().map(|m| m.omega_k.norm_sqr().recip()).sum()
    }
}

/// `dΦ/du` at `u = z²`: `1 + ω²T sinh(Tz)/(2z)`.
fn phi_u_prime(z: Complex64, p: &NonlocalParams) -> Result<Complex64> {
    if (p.delay * z.re).abs() > MAX_EXPONENT {
        return Err(Error::Overflow(format!("residue at z = {z} out of range")));
    }
    if p.delay == 0.0 {
        return Ok(Complex64::new(1.0, 0.0));
    }
    Ok(1.0 + p.omega * p.omega * p.delay * (p.delay * z).sinh() / (2.0 * z))
}

/// Residue weights `η = ω⁴/(u²·Φ_u′(u))` at each zero `u`.
///
/// Near a zero `ω⁴/Φ ≈ ω⁴/(Φ_u′·(u − u₀))`, while the matching partial
/// fraction term is `ηΩ²/(1 + u/Ω²) = ηu₀²/(u − u₀)`.
pub fn residues(d: &ModeDecomposition) -> Result<ModeDecomposition> {
    let p = &d.params;
    let w4 = p.omega.powi(4);
    let mut out = d.clone();
    for m in &mut out.real_modes {
        let z = Complex64::new(0.0, m.omega_i);
        let dp = phi_u_prime(z, p)?;
        check_weight(dp, z, p)?;
        m.eta_i = w4 / (m.omega_i.powi(4) * dp.re);
        m.sign_i = if m.eta_i >= 0.0 { 1 } else { -1 };
    }
    for m in &mut out.complex_modes {
        let z = m.zero();
        let u = z * z;
        let dp = phi_u_prime(z, p)?;
        check_weight(dp, z, p)?;
        m.eta_k = w4 / (u * u * dp);
    }
    Ok(out)
}

fn check_weight(dp: Complex64, z: Complex64, p: &NonlocalParams) -> Result<()> {
    let scale = 1.0 + p.omega * p.omega * p.delay * (p.delay * z).sinh().norm() / (2.0 * z.norm());
    if dp.norm() < super::roots::DEGENERATE_TOL * scale {
        return Err(Error::DegenerateModes(format!("vanishing Φ_u′ at z = {z}")));
    }
    Ok(())
}

/// Truncated right-hand side
/// `Σᵢ ηᵢΩᵢ²/(1 + z²/Ωᵢ²) + Σ_k [η_kω_k²/(1 + z²/ω_k²) + c.c.]`.
pub fn partial_fraction_eval(d: &ModeDecomposition, z: Complex64) -> Result<Complex64> {
    let z2 = z * z;
    let mut acc = KahanComplex::default();
    let mut term = |eta: Complex64, w2: Complex64| -> Result<()> {
        let den = 1.0 + z2 / w2;
        if den.norm() <= 1e-13 {
            return Err(Error::PoleHit(format!("z = {z} sits on the mode z² = {}", -w2)));
        }
        acc.add(eta * w2 / den);
        Ok(())
    };
    for m in &d.real_modes {
        term(Complex64::new(m.eta_i, 0.0), Complex64::new(m.omega_i * m.omega_i, 0.0))?;
    }
    for m in d.complex_modes.iter().take(d.truncation_k) {
        let w2 = m.omega_k * m.omega_k;
        term(m.eta_k, w2)?;
        term(m.eta_k.conj(), w2.conj())?;
    }
    Ok(acc.sum())
}

/// One commuting summand of the mode-sum Hamiltonian.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SpectrumGenerator {
    /// `(sign/2)(P² + Ω²Q²)`.
    Oscillator { sign: i8, omega: f64 },
    /// `μ·D + ν·L` with `D` the symmetrized dilatation and `L = q₁p₂ − q₂p₁`.
    DilatationRotation { mu: f64, nu: f64 },
}

impl SpectrumGenerator {
    /// Energy level: `sign·ħΩ(n + ½)` (`n ≥ 0`) or `ħ(μλ + νn)`.
    pub fn level(&self, n: i64, lambda: f64, hbar: f64) -> Result<f64> {
        match *self {
            SpectrumGenerator::Oscillator { sign, omega } => {
                if n < 0 {
                    return Err(Error::InvalidParameter(format!(
                        "oscillator levels need n ≥ 0, got {n}"
                    )));
                }
                Ok(sign as f64 * hbar * omega * (n as f64 + 0.5))
            }
            SpectrumGenerator::DilatationRotation { mu, nu } => Ok(hbar * (mu * lambda + nu * n as f64)),
        }
    }
}

/// Oscillator generators for the real modes, then `(μ, ν) = (−Im ω_k, −Re ω_k)`
/// per complex pair. With this sign the dilatation rate `μ` equals `Re z` of the
/// growing zero, matching the classical mode trajectories.
pub fn spectrum_generators(d: &ModeDecomposition) -> Vec<SpectrumGenerator> {
    let mut out: Vec<SpectrumGenerator> = d
        .real_modes
        .iter()
        .map(|m| SpectrumGenerator::Oscillator {
            sign: if m.eta_i >= 0.0 { 1 } else { -1 },
            omega: m.omega_i,
        })
        .collect();
    out.extend(d.complex_modes.iter().take(d.truncation_k).map(|m| {
        SpectrumGenerator::DilatationRotation {
            mu: -m.omega_k.im,
            nu: -m.omega_k.re,
        }
    }));
    out
}

/// Samples of `q(t) = Re Σ a_r e^{z_r t}` and the scaled residual of the
/// equation of motion at each time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeTrajectory {
    pub t: Vec<f64>,
    pub q: Vec<f64>,
    /// `|Σ a_r Φ(z_r) e^{z_r t}| / Σ |a_r|(|z_r|² + ω²|cosh Tz_r|)|e^{z_r t}|`.
    pub residual: Vec<f64>,
}

impl ModeTrajectory {
    pub fn max_residual(&self) -> f64 {
        self.residual.iter().cloned().fold(0.0, f64::max)
    }
}

/// `amplitudes` pairs with [`ModeDecomposition::roots`] entry by entry.
pub fn mode_trajectory(
    d: &ModeDecomposition,
    amplitudes: &[Complex64],
    t_grid: &[f64],
) -> Result<ModeTrajectory> {
    let roots = d.roots();
    if amplitudes.len() != roots.len() {
        return Err(Error::InvalidParameter(format!(
            "{} amplitudes for {} roots",
            amplitudes.len(),
            roots.len()
        )));
    }
    let p = &d.params;
    let active: Vec<(Complex64, Complex64, Complex64, f64)> = roots
        .iter()
        .zip(amplitudes)
        .filter(|(_, a)| a.norm() > 0.0)
        .map(|(&z, &a)| {
            let f = phi(z, p)?;
            let scale = z.norm_sqr() + p.omega * p.omega * (p.delay * z).cosh().norm();
            Ok((z, a, f, scale))
        })
        .collect::<Result<_>>()?;
    for &t in t_grid {
        for (z, ..) in &active {
            if (z.re * t).abs() > MAX_EXPONENT {
                return Err(Error::Overflow(format!(
                    "e^{{zt}} with Re(z)·t = {} at t = {t}",
                    z.re * t
                )));
            }
        }
    }
    let mut q = Vec::with_capacity(t_grid.len());
    let mut residual = Vec::with_capacity(t_grid.len());
    for &t in t_grid {
        let mut sum = KahanComplex::default();
        let mut res = KahanComplex::default();
        let mut scale = 0.0;
        for &(z, a, f, s) in &active {
            let e = (z * t).exp();
            sum.add(a * e);
            res.add(a * f * e);
            scale += a.norm() * s * e.norm();
        }
        q.push(sum.sum().re);
        residual.push(if scale > 0.0 { res.sum().norm() / scale } else { 0.0 });
    }
    Ok(ModeTrajectory {
        t: t_grid.to_vec(),
        q,
        residual,
    })
}
