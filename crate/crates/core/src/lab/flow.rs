//! Classical flow of the dilatation-rotation generator.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct DilrotPoint {
    pub q1: f64,
    pub q2: f64,
    pub p1: f64,
    pub p2: f64,
}

impl DilrotPoint {
    pub fn new(q1: f64, q2: f64, p1: f64, p2: f64) -> Self {
        Self { q1, q2, p1, p2 }
    }

    pub fn q_norm(&self) -> f64 {
        self.q1.hypot(self.q2)
    }

    pub fn p_norm(&self) -> f64 {
        self.p1.hypot(self.p2)
    }
}

/// Hamilton's equations of `h = μ(q·p) + ν(q₁p₂ − q₂p₁)`, solved exactly:
/// `q(t) = e^{μt}R(νt)q(0)`, `p(t) = e^{−μt}R(νt)p(0)`.
pub fn classical_dilrot_flow(s: DilrotPoint, mu: f64, nu: f64, t: f64) -> Result<DilrotPoint> {
    let m = dilrot_jacobian(mu, nu, t)?;
    let v = [s.q1, s.q2, s.p1, s.p2];
    let mut out = [0.0; 4];
    for (r, o) in m.iter().zip(out.iter_mut()) {
        *o = r.iter().zip(&v).map(|(a, b)| a * b).sum();
    }
    Ok(DilrotPoint::new(out[0], out[1], out[2], out[3]))
}

/// Linear map of the flow in `(q₁, q₂, p₁, p₂)` ordering.
pub fn dilrot_jacobian(mu: f64, nu: f64, t: f64) -> Result<[[f64; 4]; 4]> {
    if !(mu.is_finite() && nu.is_finite() && t.is_finite()) {
        return Err(Error::InvalidParameter("non-finite flow parameters".into()));
    }
    if (mu * t).abs() > 700.0 {
        return Err(Error::Overflow(format!("e^(μt) with μt = {}", mu * t)));
    }
    let (s, c) = (nu * t).sin_cos();
    let g = (mu * t).exp();
    let d = 1.0 / g;
    Ok([
        [g * c, -g * s, 0.0, 0.0],
        [g * s, g * c, 0.0, 0.0],
        [0.0, 0.0, d * c, -d * s],
        [0.0, 0.0, d * s, d * c],
    ])
}

/// `max |MᵀJM − J|` for the canonical `J` in `(q₁, q₂, p₁, p₂)` ordering.
pub fn symplectic_defect(m: &[[f64; 4]; 4]) -> f64 {
    let j = [
        [0.0, 0.0, 1.0, 0.0],
        [0.0, 0.0, 0.0, 1.0],
        [-1.0, 0.0, 0.0, 0.0],
        [0.0, -1.0, 0.0, 0.0],
    ];
    let mut worst = 0.0f64;
    for a in 0..4 {
        for b in 0..4 {
            let mut s = 0.0;
            for k in 0..4 {
                for l in 0..4 {
                    s += m[k][a] * j[k][l] * m[l][b];
                }
            }
            worst = worst.max((s - j[a][b]).abs());
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn envelopes_are_exponential() {
        let s = DilrotPoint::new(0.3, -1.2, 0.8, 0.5);
        let f = classical_dilrot_flow(s, 0.4, 1.7, 2.5).unwrap();
        assert!((f.q_norm() - (1.0f64).exp() * s.q_norm()).abs() < 1e-13);
        assert!((f.p_norm() - (-1.0f64).exp() * s.p_norm()).abs() < 1e-13);
    }

    #[test]
    fn pure_rotation_keeps_radius() {
        let s = DilrotPoint::new(0.3, -1.2, 0.8, 0.5);
        let f = classical_dilrot_flow(s, 0.0, 2.0, 9.0).unwrap();
        assert!((f.q_norm() - s.q_norm()).abs() < 1e-14);
    }

    #[test]
    fn flow_is_symplectic() {
        for (mu, nu, t) in [(0.4, 1.7, 2.5), (-1.0, 0.3, 4.0), (2.0, -3.0, 1.1)] {
            assert!(symplectic_defect(&dilrot_jacobian(mu, nu, t).unwrap()) < 1e-12);
        }
    }

    #[test]
    fn matches_hamilton_equations() {
        // central difference of the flow against the vector field
        let (mu, nu) = (0.6, -1.1);
        let s = DilrotPoint::new(0.7, 0.2, -0.4, 1.0);
        let h = 1e-5;
        let a = classical_dilrot_flow(s, mu, nu, h).unwrap();
        let b = classical_dilrot_flow(s, mu, nu, -h).unwrap();
        let d = |x: f64, y: f64| (x - y) / (2.0 * h);
        let field = [
            mu * s.q1 - nu * s.q2,
            mu * s.q2 + nu * s.q1,
            -mu * s.p1 - nu * s.p2,
            -mu * s.p2 + nu * s.p1,
        ];
        let num = [d(a.q1, b.q1), d(a.q2, b.q2), d(a.p1, b.p1), d(a.p2, b.p2)];
        for k in 0..4 {
            assert!((num[k] - field[k]).abs() < 1e-8);
        }
    }

    #[test]
    fn overflow_guard() {
        assert!(matches!(classical_dilrot_flow(DilrotPoint::default(), 10.0, 0.0, 100.0), Err(Error::Overflow(_))));
    }
}
