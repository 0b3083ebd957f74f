//! Finite-difference check of `[X̂, Ĥ] = iħΩX̂` on the inverted factor.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::SQRT_2;

use super::grid::Grid1D;
use crate::error::Result;
use crate::pu::PUParams;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stencil {
    /// three-point second and centered first differences
    Second,
    /// nine-point central differences
    Eighth,
}

impl Stencil {
    // (first-derivative weights for offsets 1.., second-derivative center and offsets 1..)
    fn weights(self) -> (&'static [f64], f64, &'static [f64]) {
        match self {
            Stencil::Second => (&[0.5], -2.0, &[1.0]),
            Stencil::Eighth => (
                &[4.0 / 5.0, -1.0 / 5.0, 4.0 / 105.0, -1.0 / 280.0],
                -205.0 / 72.0,
                &[8.0 / 5.0, -1.0 / 5.0, 8.0 / 315.0, -1.0 / 560.0],
            ),
        }
    }

    pub fn half_width(self) -> usize {
        self.weights().0.len()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CommutatorCheck {
    pub grid: Grid1D,
    pub stencil: Stencil,
    pub spacing: f64,
    /// `max |([X̂,Ĥ] − iħΩX̂)g| / max |iħΩX̂g|` over interior points
    pub residual: f64,
}

struct Ops<'a> {
    x: &'a [f64],
    h: f64,
    stencil: Stencil,
}

impl Ops<'_> {
    fn d1(&self, v: &[Complex64]) -> Vec<Complex64> {
        let (w1, _, _) = self.stencil.weights();
        let n = v.len();
        (0..n)
            .map(|i| {
                let mut s = Complex64::default();
                for (k, w) in w1.iter().enumerate() {
                    let o = k + 1;
                    let up = if i + o < n { v[i + o] } else { Complex64::default() };
                    let dn = if i >= o { v[i - o] } else { Complex64::default() };
                    s += *w * (up - dn);
                }
                s / self.h
            })
            .collect()
    }

    fn d2(&self, v: &[Complex64]) -> Vec<Complex64> {
        let (_, c, w2) = self.stencil.weights();
        let n = v.len();
        (0..n)
            .map(|i| {
                let mut s = c * v[i];
                for (k, w) in w2.iter().enumerate() {
                    let o = k + 1;
                    let up = if i + o < n { v[i + o] } else { Complex64::default() };
                    let dn = if i >= o { v[i - o] } else { Complex64::default() };
                    s += *w * (up + dn);
                }
                s / (self.h * self.h)
            })
            .collect()
    }

    /// `X̂ = √2Ω(P̂ − ΩQ̂)`, `P̂ = −iħD`.
    fn x_op(&self, v: &[Complex64], p: &PUParams) -> Vec<Complex64> {
        let d = self.d1(v);
        let c = SQRT_2 * p.omega_cap;
        v.iter()
            .zip(&d)
            .zip(self.x)
            .map(|((a, da), x)| c * (Complex64::new(0.0, -p.hbar) * da - p.omega_cap * x * a))
            .collect()
    }

    /// The PU Hamiltonian's inverted piece `−(½P̂² − ½Ω²Q̂²)`.
    fn h_op(&self, v: &[Complex64], p: &PUParams) -> Vec<Complex64> {
        let l = self.d2(v);
        let w2 = p.omega_cap * p.omega_cap;
        v.iter()
            .zip(&l)
            .zip(self.x)
            .map(|((a, la), x)| 0.5 * p.hbar * p.hbar * la + 0.5 * w2 * x * x * a)
            .collect()
    }
}

/// Applies `[X̂, Ĥ] − iħΩX̂` to a smooth packet and reports the interior
/// relative residual.
pub fn commutator_check(params: &PUParams, grid: Grid1D, stencil: Stencil) -> Result<CommutatorCheck> {
    let x = grid.coordinates();
    let ops = Ops {
        x: &x,
        h: grid.spacing(),
        stencil,
    };
    let g: Vec<Complex64> = x
        .iter()
        .map(|&t| Complex64::from_polar((-0.5 * (t - 0.4).powi(2)).exp(), 0.7 * t))
        .collect();
    let xg = ops.x_op(&g, params);
    let hg = ops.h_op(&g, params);
    let xhg = ops.x_op(&hg, params);
    let hxg = ops.h_op(&xg, params);
    let i_hw = Complex64::new(0.0, params.hbar * params.omega_cap);
    let skip = 2 * stencil.half_width();
    let (mut num, mut den) = (0.0f64, 0.0f64);
    for k in skip..x.len() - skip {
        let target = i_hw * xg[k];
        num = num.max((xhg[k] - hxg[k] - target).norm());
        den = den.max(target.norm());
    }
    let residual = if den == 0.0 { num } else { num / den };
    Ok(CommutatorCheck {
        grid,
        stencil,
        spacing: grid.spacing(),
        residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn degenerate_frequency_gives_zero() {
        let p = PUParams::new(1.0, 1.0).unwrap();
        let p0 = PUParams { omega_cap: 0.0, ..p };
        let c = commutator_check(&p0, Grid1D::new(10.0, 256).unwrap(), Stencil::Second).unwrap();
        assert_eq!(c.residual, 0.0);
    }

    #[test]
    fn stencils_are_consistent() {
        // both stencils differentiate a quadratic exactly
        for s in [Stencil::Second, Stencil::Eighth] {
            let g = Grid1D::new(3.0, 65).unwrap();
            let x = g.coordinates();
            let ops = Ops { x: &x, h: g.spacing(), stencil: s };
            let v: Vec<Complex64> = x.iter().map(|t| Complex64::new(t * t, 0.0)).collect();
            let d1 = ops.d1(&v);
            let d2 = ops.d2(&v);
            for k in 8..57 {
                assert!((d1[k].re - 2.0 * x[k]).abs() < 1e-11);
                assert!((d2[k].re - 2.0).abs() < 1e-9);
            }
        }
    }
}
