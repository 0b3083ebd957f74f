//! Gaussian kernels `A·exp{i(a x² + b y² + c xy)}` and their composition.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_4, PI};

use super::{check_nonnegative, check_positive};
use crate::error::{Error, Result};

/// `K(x, y) = prefactor · exp{i(coeff_xx x² + coeff_yy y² + coeff_xy xy)}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadraticKernel {
    pub coeff_xx: Complex64,
    pub coeff_yy: Complex64,
    pub coeff_xy: Complex64,
    pub prefactor: Complex64,
}

/// Sign of the quadratic potential in the short-time step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PotentialSign {
    /// `½P² − ½ω²X²`
    Inverted,
    /// `½P² + ½ω²X²`
    Harmonic,
}

impl PotentialSign {
    fn factor(self) -> f64 {
        match self {
            PotentialSign::Inverted => 1.0,
            PotentialSign::Harmonic => -1.0,
        }
    }
}

// below this |Im a| counts as zero when checking integrability
const FRESNEL_SLACK: f64 = 1e-12;

impl QuadraticKernel {
    pub fn eval(&self, x: f64, y: f64) -> Complex64 {
        let q = self.coeff_xx * (x * x) + self.coeff_yy * (y * y) + self.coeff_xy * (x * y);
        self.prefactor * (Complex64::i() * q).exp()
    }

    pub fn conj(&self) -> Self {
        Self {
            coeff_xx: -self.coeff_xx.conj(),
            coeff_yy: -self.coeff_yy.conj(),
            coeff_xy: -self.coeff_xy.conj(),
            prefactor: self.prefactor.conj(),
        }
    }

    /// Short-time kernel over a step `eps` (any sign, nonzero) with the
    /// potential split evenly between the endpoints:
    /// `(2πiħε)^{−1/2} exp{(i/ħ)[(x−y)²/(2ε) ± ¼ω²(x² + y²)ε]}`.
    /// A midpoint `x̄ = (x+y)/2` potential would only be first order in `1/N`.
    pub fn short_time(eps: f64, omega: f64, hbar: f64, sign: PotentialSign) -> Result<Self> {
        check_positive("hbar", hbar)?;
        check_nonnegative("omega", omega)?;
        if eps == 0.0 || !eps.is_finite() {
            return Err(Error::InvalidParameter(format!("time step must be finite and nonzero, got {eps}")));
        }
        let v = sign.factor() * omega * omega * eps;
        let diag = (0.5 / eps + v / 4.0) / hbar;
        let cross = -1.0 / (eps * hbar);
        let prefactor = Complex64::from_polar(
            1.0 / (2.0 * PI * hbar * eps.abs()).sqrt(),
            -FRAC_PI_4 * eps.signum(),
        );
        Ok(Self {
            coeff_xx: diag.into(),
            coeff_yy: diag.into(),
            coeff_xy: cross.into(),
            prefactor,
        })
    }

    /// `∫ self(x, z) next(z, y) dz`, done as an exact Fresnel integral.
    /// Needs `Im(b₁ + a₂) ≥ 0` and `b₁ + a₂ ≠ 0`.
    pub fn compose(&self, next: &Self) -> Result<Self> {
        let a = self.coeff_yy + next.coeff_xx;
        let scale = self.coeff_yy.norm().max(next.coeff_xx.norm()).max(f64::MIN_POSITIVE);
        if a.im < -FRESNEL_SLACK * scale {
            return Err(Error::NotIntegrable(format!("Gaussian weight grows: Im a = {:e}", a.im)));
        }
        if a.norm() <= 1e-14 * scale {
            return Err(Error::Caustic(format!("vanishing quadratic coefficient {a}")));
        }
        let g1 = self.coeff_xy;
        let g2 = next.coeff_xy;
        let four_a = 4.0 * a;
        let gauss = (Complex64::new(PI, 0.0) / (-Complex64::i() * a)).sqrt();
        Ok(Self {
            coeff_xx: self.coeff_xx - g1 * g1 / four_a,
            coeff_yy: next.coeff_yy - g2 * g2 / four_a,
            coeff_xy: -g1 * g2 / (2.0 * a),
            prefactor: self.prefactor * next.prefactor * gauss,
        })
    }

    /// `n`-fold self-composition by repeated squaring.
    pub fn power(&self, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("kernel power needs n ≥ 1".into()));
        }
        let mut base = *self;
        let mut acc: Option<Self> = None;
        let mut k = n;
        loop {
            if k & 1 == 1 {
                acc = Some(match acc {
                    None => base,
                    Some(a) => a.compose(&base)?,
                });
            }
            k >>= 1;
            if k == 0 {
                break;
            }
            base = base.compose(&base)?;
        }
        Ok(acc.expect("n ≥ 1"))
    }
}

/// The `steps`-slice Trotter kernel for time `t`.
pub fn trotter_kernel(t: f64, omega: f64, hbar: f64, steps: usize, sign: PotentialSign) -> Result<QuadraticKernel> {
    if steps < 2 {
        return Err(Error::InvalidParameter(format!("Trotter chain needs ≥ 2 steps, got {steps}")));
    }
    QuadraticKernel::short_time(t / steps as f64, omega, hbar, sign)?.power(steps)
}

/// Inverted-oscillator kernel from a `steps`-slice Trotter chain.
pub fn trotter_propagator(x: f64, y: f64, t: f64, omega: f64, hbar: f64, steps: usize) -> Result<Complex64> {
    Ok(trotter_kernel(t, omega, hbar, steps, PotentialSign::Inverted)?.eval(x, y))
}
