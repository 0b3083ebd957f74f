//! Physicists' Hermite polynomials and the normalized oscillator functions.

use crate::error::{Error, Result};

pub const MAX_HERMITE_DEGREE: u32 = 200;

/// `H_n(x)` by the three-term recurrence `H_{k+1} = 2xH_k − 2kH_{k−1}`.
pub fn hermite(n: u32, x: f64) -> Result<f64> {
    if n > MAX_HERMITE_DEGREE {
        return Err(Error::Overflow(format!(
            "Hermite degree {n} exceeds {MAX_HERMITE_DEGREE}"
        )));
    }
    let (mut h0, mut h1) = (1.0, 2.0 * x);
    if n == 0 {
        return Ok(h0);
    }
    for k in 1..n {
        let h2 = 2.0 * x * h1 - 2.0 * k as f64 * h0;
        h0 = h1;
        h1 = h2;
    }
    if h1.is_finite() {
        Ok(h1)
    } else {
        Err(Error::Overflow(format!("H_{n}({x}) is not representable")))
    }
}

/// `H_n(ξ)e^{−ξ²/2}/√(√π 2ⁿ n!)`, unit-normalized in ξ, via the stable
/// recurrence of the normalized functions (no overflow for large `n`).
pub fn hermite_function(n: u32, xi: f64) -> f64 {
    let mut f0 = std::f64::consts::PI.powf(-0.25) * (-0.5 * xi * xi).exp();
    if n == 0 {
        return f0;
    }
    let mut f1 = std::f64::consts::SQRT_2 * xi * f0;
    for k in 1..n {
        let k = k as f64;
        let f2 = (2.0 / (k + 1.0)).sqrt() * xi * f1 - (k / (k + 1.0)).sqrt() * f0;
        f0 = f1;
        f1 = f2;
    }
    f1
}
