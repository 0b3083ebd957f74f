//! Fourier transform of `K(0, 0; t)` against the eigenfunctions at the origin.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use super::closed::inverted_diagonal_origin;
use super::check_positive;
use crate::error::{Error, Result};
use crate::pu::PUParams;
use crate::quadrature::{gauss_legendre, KahanComplex};
use crate::special::{inverted_eigenfunction, Branch};

/// Cosine roll-off over the outer `fraction` of `[−t_max, t_max]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Taper {
    pub fraction: f64,
}

impl Default for Taper {
    fn default() -> Self {
        Self { fraction: 0.2 }
    }
}

impl Taper {
    pub fn weight(&self, t: f64, t_max: f64) -> f64 {
        let start = (1.0 - self.fraction) * t_max;
        let a = t.abs();
        if a <= start {
            1.0
        } else if a >= t_max {
            0.0
        } else {
            let u = (a - start) / (t_max - start);
            0.5 * (1.0 + (PI * u).cos())
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralIdentity {
    pub e_tilde: f64,
    pub t_max: f64,
    pub lhs: Complex64,
    pub rhs: f64,
    /// `Re lhs / rhs`
    pub ratio: f64,
    /// bound on what the window leaves out or distorts
    pub tail_estimate: f64,
    pub tail_warning: bool,
}

const PANELS: usize = 512;
const ORDER: usize = 16;

/// `lhs = ∫ e^{iẼt/ħ} K(0,0;t) w(t) dt` over `[−t_max, t_max]`,
/// `rhs = (2π/ω) Σ_± |ψ_{Ẽ,±}(0)|²`.
pub fn spectral_identity(
    e_tilde: f64,
    t_max: f64,
    window: Taper,
    params: &PUParams,
) -> Result<SpectralIdentity> {
    let omega = params.omega_cap;
    let hbar = params.hbar;
    check_positive("t_max", t_max)?;
    if t_max * omega < 20.0 {
        return Err(Error::InvalidParameter(format!(
            "t_max·ω = {} is below 20; K(0,0;t) has not decayed",
            t_max * omega
        )));
    }
    if !(window.fraction > 0.0 && window.fraction <= 1.0) {
        return Err(Error::InvalidParameter(format!("taper fraction {} outside (0, 1]", window.fraction)));
    }
    if !e_tilde.is_finite() {
        return Err(Error::InvalidParameter("Ẽ must be finite".into()));
    }

    // K(−t) = K̄(t), so the symmetric integral is 2 Re of the half line;
    // t = s² removes the t^{−1/2} endpoint singularity
    let s_max = t_max.sqrt();
    let (xs, ws) = gauss_legendre(ORDER);
    let width = s_max / PANELS as f64;
    let panel_sums: Vec<Result<Complex64>> = (0..PANELS)
        .into_par_iter()
        .map(|p| {
            let mid = (p as f64 + 0.5) * width;
            let mut acc = KahanComplex::default();
            for (x, w) in xs.iter().zip(&ws) {
                let s = mid + 0.5 * width * x;
                let t = s * s;
                let k = inverted_diagonal_origin(t, omega, hbar)?;
                let phase = Complex64::from_polar(1.0, e_tilde * t / hbar);
                acc.add(phase * k * (2.0 * s * window.weight(t, t_max) * 0.5 * width * w));
            }
            Ok(acc.sum())
        })
        .collect();
    let mut acc = KahanComplex::default();
    for v in panel_sums {
        acc.add(v?);
    }
    let half = acc.sum();
    let lhs = Complex64::new(2.0 * half.re, 0.0);

    let mut rhs = 0.0;
    for b in Branch::BOTH {
        rhs += inverted_eigenfunction(e_tilde, b, 0.0, params)?.norm_sqr();
    }
    rhs *= 2.0 * PI / omega;

    // |K(0,0;t)| ≈ e^{−ωt/2}/√(πħ) for large t; integrate from the taper start
    let t0 = (1.0 - window.fraction) * t_max;
    let tail_estimate = 2.0 * 2.0 / omega * inverted_diagonal_origin(t0, omega, hbar)?.norm();
    let tail_warning = tail_estimate > 0.01 * lhs.norm();
    Ok(SpectralIdentity {
        e_tilde,
        t_max,
        lhs,
        rhs,
        ratio: lhs.re / rhs,
        tail_estimate,
        tail_warning,
    })
}
