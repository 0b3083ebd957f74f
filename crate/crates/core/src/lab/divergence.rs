//! Truncated matrix elements `⟨n′ε′|X̂|nε⟩` over `|x₂| ≤ R`.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::SQRT_2;

use crate::error::{Error, Result};
use crate::pu::PUParams;
use crate::quadrature::{gauss_legendre, KahanComplex};
use crate::special::{inverted_eigenfunction_with_derivative, EigenLabel};

const ORDER: usize = 16;
// panel width in units of √(ħ/Ω); resolves the e^{±iΩx²/ħ} cross terms to R ≈ 60
const PANEL: f64 = 0.04;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ScanObservable {
    /// `X̂ = √2Ω(P̂₂ − ΩX̂₂)` on the inverted factor
    Position,
    /// `X̂₂ e^{−x₂²/(2w²)}`, convergent by construction
    DampedControl { width: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DivergenceRow {
    pub cutoff: f64,
    pub value: Complex64,
    pub magnitude: f64,
    /// `|value(R_k) − value(R_{k−1})|`, absent for the first row
    pub increment: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScanVerdict {
    /// every increment exceeds half the previous one
    Divergent,
    /// every increment shrinks by 4× or falls below roundoff
    Convergent,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DivergenceScan {
    pub bra: EigenLabel,
    pub ket: EigenLabel,
    pub observable: ScanObservable,
    /// `⟨n′|n⟩` of the oscillator factors
    pub oscillator_overlap: f64,
    pub rows: Vec<DivergenceRow>,
    pub verdict: ScanVerdict,
}

/// `δ_{n′n}·∫_{−R}^{R} ψ̄_{ε′}(x) (Ôψ_ε)(x) dx` for each cutoff `R`.
pub fn divergence_scan(
    bra: &EigenLabel,
    ket: &EigenLabel,
    cutoffs: &[f64],
    observable: ScanObservable,
    params: &PUParams,
) -> Result<DivergenceScan> {
    if cutoffs.is_empty() || cutoffs.iter().any(|r| !(r.is_finite() && *r > 0.0)) {
        return Err(Error::InvalidParameter("cutoffs must be positive and finite".into()));
    }
    if cutoffs.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidParameter("cutoffs must be increasing".into()));
    }
    if let ScanObservable::DampedControl { width } = observable {
        if !(width > 0.0 && width.is_finite()) {
            return Err(Error::InvalidParameter(format!("damping width must be positive, got {width}")));
        }
    }
    let overlap = if bra.n == ket.n { 1.0 } else { 0.0 };
    let w = params.omega_cap;
    let hbar = params.hbar;
    let (xs, ws) = gauss_legendre(ORDER);
    let panel = PANEL * (hbar / w).sqrt();

    let integrand = |x: f64| -> Result<Complex64> {
        let (l, _) = inverted_eigenfunction_with_derivative(bra.epsilon, bra.branch, x, params)?;
        let (r, dr) = inverted_eigenfunction_with_derivative(ket.epsilon, ket.branch, x, params)?;
        let o = match observable {
            ScanObservable::Position => SQRT_2 * w * (Complex64::new(0.0, -hbar) * dr - w * x * r),
            ScanObservable::DampedControl { width } => x * (-x * x / (2.0 * width * width)).exp() * r,
        };
        Ok(l.conj() * o)
    };
    // ∫ over a ≤ |x| ≤ b, both sides
    let shell = |a: f64, b: f64| -> Result<Complex64> {
        let panels = ((b - a) / panel).ceil().max(1.0) as usize;
        let width = (b - a) / panels as f64;
        let parts: Vec<Result<Complex64>> = (0..panels)
            .into_par_iter()
            .map(|p| {
                let mid = a + (p as f64 + 0.5) * width;
                let mut acc = KahanComplex::default();
                for (t, wt) in xs.iter().zip(&ws) {
                    let x = mid + 0.5 * width * t;
                    acc.add((integrand(x)? + integrand(-x)?) * (0.5 * width * wt));
                }
                Ok(acc.sum())
            })
            .collect();
        let mut acc = KahanComplex::default();
        for v in parts {
            acc.add(v?);
        }
        Ok(acc.sum())
    };

    let mut rows = Vec::with_capacity(cutoffs.len());
    let mut total = KahanComplex::default();
    let mut inner = 0.0;
    let mut prev: Option<Complex64> = None;
    for &r in cutoffs {
        if overlap != 0.0 {
            total.add(shell(inner, r)?);
        }
        inner = r;
        let value = total.sum() * overlap;
        rows.push(DivergenceRow {
            cutoff: r,
            value,
            magnitude: value.norm(),
            increment: prev.map(|p| (value - p).norm()),
        });
        prev = Some(value);
    }
    let verdict = classify(&rows);
    Ok(DivergenceScan {
        bra: *bra,
        ket: *ket,
        observable,
        oscillator_overlap: overlap,
        rows,
        verdict,
    })
}

fn classify(rows: &[DivergenceRow]) -> ScanVerdict {
    let inc: Vec<f64> = rows.iter().filter_map(|r| r.increment).collect();
    if inc.len() < 2 {
        return ScanVerdict::Inconclusive;
    }
    let scale = rows.iter().map(|r| r.magnitude).fold(0.0, f64::max);
    let negligible = |d: f64| d <= 1e-12 * scale.max(f64::MIN_POSITIVE);
    if inc.iter().all(|&d| negligible(d)) || inc.windows(2).all(|p| p[1] <= 0.25 * p[0] || negligible(p[1])) {
        return ScanVerdict::Convergent;
    }
    if inc.windows(2).all(|p| p[1] > 0.5 * p[0]) {
        return ScanVerdict::Divergent;
    }
    ScanVerdict::Inconclusive
}
