//! The naive rotation `t → −iτ` of `K(0, 0; t)`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use super::check_positive;
use crate::error::{Error, Result};

// |sin ωτ| below this is treated as a pole
const POLE_MASK: f64 = 1e-6;
const PEAK_THRESHOLD: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EuclideanSample {
    pub tau: f64,
    /// inverted `K(0,0;−iτ)`, `None` at a masked pole
    pub inverted: Option<Complex64>,
    /// harmonic `K(0,0;−iτ) = √(ω/(2πħ sinh ωτ))`
    pub harmonic: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EuclideanReport {
    pub omega: f64,
    pub hbar: f64,
    pub samples: Vec<EuclideanSample>,
    pub masked_points: usize,
    pub detected_period: Option<f64>,
    pub expected_period: f64,
    pub grid_resolution: f64,
    pub periodic: bool,
    pub harmonic_ground_energy: f64,
    pub expected_ground_energy: f64,
    pub verdict: String,
}

/// Evaluates both continued kernels on `tau_grid` (strictly increasing,
/// positive, uniformly spaced to 1e-6), then looks for a period in
/// `ln|K|` of the inverted one and fits `−ħ d ln K/dτ` on the upper half
/// of the grid for the harmonic one.
pub fn euclidean_pitfall(tau_grid: &[f64], omega: f64, hbar: f64) -> Result<EuclideanReport> {
    check_positive("omega", omega)?;
    check_positive("hbar", hbar)?;
    if tau_grid.len() < 16 {
        return Err(Error::InvalidParameter("τ grid needs at least 16 points".into()));
    }
    if tau_grid[0] <= 0.0 || tau_grid.iter().any(|t| !t.is_finite()) {
        return Err(Error::InvalidParameter("τ grid must be positive and finite".into()));
    }
    let h = (tau_grid[tau_grid.len() - 1] - tau_grid[0]) / (tau_grid.len() - 1) as f64;
    if h <= 0.0 || tau_grid.windows(2).any(|w| ((w[1] - w[0]) - h).abs() > 1e-6 * h.max(1.0)) {
        return Err(Error::InvalidParameter("τ grid must be increasing and uniform".into()));
    }

    let pre = Complex64::new(0.5, -0.5);
    let mut samples = Vec::with_capacity(tau_grid.len());
    for &tau in tau_grid {
        let wt = omega * tau;
        let s = wt.sin();
        let inverted = if s.abs() < POLE_MASK {
            None
        } else {
            // sinh(−iωτ) = −i sin ωτ
            let denom = Complex64::new(0.0, -PI * hbar * s);
            Some(pre * (Complex64::new(omega, 0.0) / denom).sqrt())
        };
        let harmonic = if wt > 700.0 {
            (omega / (PI * hbar)).sqrt() * (-0.5 * wt).exp()
        } else {
            (omega / (2.0 * PI * hbar * wt.sinh())).sqrt()
        };
        samples.push(EuclideanSample { tau, inverted, harmonic });
    }
    let masked_points = samples.iter().filter(|s| s.inverted.is_none()).count();

    let logs: Vec<Option<f64>> = samples.iter().map(|s| s.inverted.map(|k| k.norm().ln())).collect();
    let detected_period = autocorrelation_period(&logs).map(|lag| lag * h);
    let expected_period = PI / omega;
    let periodic = detected_period.is_some();

    let upper = &samples[samples.len() / 2..];
    let slope = linear_slope(
        &upper.iter().map(|s| s.tau).collect::<Vec<_>>(),
        &upper.iter().map(|s| s.harmonic.ln()).collect::<Vec<_>>(),
    );
    let harmonic_ground_energy = -hbar * slope;
    let expected_ground_energy = 0.5 * hbar * omega;

    let verdict = match detected_period {
        Some(p) => format!(
            "Inverted K(0,0;−iτ) ∝ |sin ωτ|^(-1/2) repeats with period {p:.6} (π/ω = {expected_period:.6}); \
             a periodic Euclidean kernel corresponds to imaginary energies. The Hamiltonian is unbounded \
             below, so the naive t → −iτ rotation does not give a spectrum. The harmonic control decays \
             monotonically and yields E₀ = {harmonic_ground_energy:.6} (ħω/2 = {expected_ground_energy:.6})."
        ),
        None => format!(
            "No period found in the continued inverted kernel on this grid; the harmonic control yields \
             E₀ = {harmonic_ground_energy:.6} (ħω/2 = {expected_ground_energy:.6})."
        ),
    };

    Ok(EuclideanReport {
        omega,
        hbar,
        samples,
        masked_points,
        detected_period,
        expected_period,
        grid_resolution: h,
        periodic,
        harmonic_ground_energy,
        expected_ground_energy,
        verdict,
    })
}

/// First autocorrelation peak (in fractional lags) after the curve has
/// gone negative, over lags up to half the series. Masked entries are skipped.
fn autocorrelation_period(f: &[Option<f64>]) -> Option<f64> {
    let vals: Vec<f64> = f.iter().flatten().copied().collect();
    if vals.len() < 8 {
        return None;
    }
    let mean = vals.iter().sum::<f64>() / vals.len() as f64;
    let n = f.len();
    let corr = |lag: usize| -> f64 {
        let (mut num, mut da, mut db) = (0.0, 0.0, 0.0);
        for i in 0..n - lag {
            if let (Some(a), Some(b)) = (f[i], f[i + lag]) {
                let (a, b) = (a - mean, b - mean);
                num += a * b;
                da += a * a;
                db += b * b;
            }
        }
        if da == 0.0 || db == 0.0 {
            0.0
        } else {
            num / (da * db).sqrt()
        }
    };
    let max_lag = n / 2;
    let c: Vec<f64> = (0..=max_lag).map(corr).collect();
    let first_negative = c.iter().position(|&v| v < 0.0)?;
    let mut best: Option<usize> = None;
    for l in first_negative.max(1)..max_lag {
        if c[l] > PEAK_THRESHOLD && c[l] >= c[l - 1] && c[l] >= c[l + 1] {
            best = Some(l);
            break;
        }
    }
    let l = best?;
    // parabolic refinement of the peak
    let (a, b, d) = (c[l - 1], c[l], c[l + 1]);
    let denom = a - 2.0 * b + d;
    let shift = if denom.abs() > 0.0 { 0.5 * (a - d) / denom } else { 0.0 };
    Some(l as f64 + shift.clamp(-0.5, 0.5))
}

fn linear_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
    }
    sxy / sxx
}
