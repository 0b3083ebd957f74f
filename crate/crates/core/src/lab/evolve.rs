//! Cayley (Crank–Nicolson) time stepping.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::grid::{Domain, WaveState};
use super::operator::{DilrotOperator, DiscreteOperator};
use crate::error::{Error, Result};

const CG_TOL: f64 = 1e-15;
const CG_MAX_ITER: usize = 1000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvolveReport {
    pub state: WaveState,
    pub dt: f64,
    pub steps: usize,
    /// `‖ψ_k‖` after each step, starting with the initial norm
    pub norms: Vec<f64>,
    pub max_step_drift: f64,
    pub total_drift: f64,
    /// `dt·ρ/ħ` with ρ the spectral-radius estimate
    pub stiffness: f64,
    pub max_boundary_mass: f64,
    pub contaminated: bool,
}

/// Advances `state` by `steps` applications of
/// `(1 + iH dt/2ħ)⁻¹(1 − iH dt/2ħ)`.
pub fn evolve(state: &WaveState, op: &DiscreteOperator, dt: f64, steps: usize, hbar: f64) -> Result<EvolveReport> {
    if !(dt.is_finite() && dt != 0.0) {
        return Err(Error::InvalidParameter(format!("dt must be finite and nonzero, got {dt}")));
    }
    if !(hbar > 0.0 && hbar.is_finite()) {
        return Err(Error::InvalidParameter(format!("ħ must be positive, got {hbar}")));
    }
    match (op, &state.domain) {
        (DiscreteOperator::Tridiagonal(t), Domain::Line(g)) if t.grid == *g => {}
        (DiscreteOperator::Dilrot(d), Domain::Plane(g)) if d.grid == *g => {
            if (d.hbar - hbar).abs() > 1e-15 * hbar {
                return Err(Error::InvalidParameter("ħ differs from the operator's".into()));
            }
        }
        _ => return Err(Error::InvalidParameter("operator and state live on different grids".into())),
    }

    let sigma = dt / (2.0 * hbar);
    let mut psi = state.amplitudes.clone();
    let cell = state.domain.cell();
    let norm_of = |v: &[Complex64]| (v.iter().map(|a| a.norm_sqr()).sum::<f64>() * cell).sqrt();
    let n0 = norm_of(&psi);
    let mut norms = Vec::with_capacity(steps + 1);
    norms.push(n0);
    let mut max_step_drift = 0.0f64;
    let mut max_boundary_mass = 0.0f64;
    let mut current = state.clone();

    for _ in 0..steps {
        psi = match op {
            DiscreteOperator::Tridiagonal(t) => {
                let hv = t.apply(&psi);
                let rhs: Vec<Complex64> = psi
                    .iter()
                    .zip(&hv)
                    .map(|(p, h)| p - Complex64::i() * sigma * h)
                    .collect();
                t.solve_shifted(sigma, &rhs)?
            }
            DiscreteOperator::Dilrot(d) => cayley_antisymmetric(d, 0.5 * dt, &psi)?,
        };
        let n = norm_of(&psi);
        let prev = *norms.last().expect("seeded");
        max_step_drift = max_step_drift.max((n - prev).abs() / prev);
        norms.push(n);
        current.amplitudes.clone_from(&psi);
        max_boundary_mass = max_boundary_mass.max(current.boundary_mass());
    }

    current.norm = current.recompute_norm();
    let total_drift = (current.norm - n0).abs() / n0;
    let contaminated = max_boundary_mass > super::grid::CONTAMINATION_LIMIT * n0 * n0;
    Ok(EvolveReport {
        state: current,
        dt,
        steps,
        norms,
        max_step_drift,
        total_drift,
        stiffness: dt.abs() * op.spectral_radius_bound() / hbar,
        max_boundary_mass,
        contaminated,
    })
}

/// `x = (I + τA)⁻¹(I − τA)ψ` for real antisymmetric `A`, by conjugate
/// gradients on the normal equations `(I − τ²A²)x = (I − τA)b`.
fn cayley_antisymmetric(d: &DilrotOperator, tau: f64, psi: &[Complex64]) -> Result<Vec<Complex64>> {
    let a = |v: &[Complex64]| d.apply_generator(v);
    let ap = a(psi);
    let b: Vec<Complex64> = psi.iter().zip(&ap).map(|(p, q)| p - tau * q).collect();
    // Mᵀb with M = I + τA, Mᵀ = I − τA
    let ab = a(&b);
    let rhs: Vec<Complex64> = b.iter().zip(&ab).map(|(p, q)| p - tau * q).collect();
    let normal = |v: &[Complex64]| -> Vec<Complex64> {
        let av = a(v);
        let aav = a(&av);
        v.iter().zip(&aav).map(|(x, y)| x - tau * tau * y).collect()
    };
    let dot = |u: &[Complex64], v: &[Complex64]| -> f64 { u.iter().zip(v).map(|(x, y)| (x.conj() * y).re).sum() };

    // (I + τA)⁻¹ ≈ I − τA, so b − τAb is a good start
    let mut x = rhs.clone();
    let nx = normal(&x);
    let mut r: Vec<Complex64> = rhs.iter().zip(&nx).map(|(p, q)| p - q).collect();
    let mut p = r.clone();
    let mut rr = dot(&r, &r);
    let target = CG_TOL * CG_TOL * dot(&rhs, &rhs);
    let mut it = 0;
    while rr > target {
        if it == CG_MAX_ITER {
            return Err(Error::SolverDivergence {
                iterations: it,
                residual: (rr / dot(&rhs, &rhs)).sqrt(),
            });
        }
        let np = normal(&p);
        let alpha = rr / dot(&p, &np);
        for k in 0..x.len() {
            x[k] += alpha * p[k];
            r[k] -= alpha * np[k];
        }
        let rr_new = dot(&r, &r);
        let beta = rr_new / rr;
        for k in 0..p.len() {
            p[k] = r[k] + beta * p[k];
        }
        rr = rr_new;
        it += 1;
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lab::grid::{Grid1D, Grid2D};
    use crate::lab::operator::{build_hamiltonian_dilrot, build_hamiltonian_inverted, TridiagonalOperator};

    #[test]
    fn zero_hamiltonian_is_identity() {
        let g = Grid1D::new(5.0, 128).unwrap();
        let s = WaveState::from_fn_1d(g, |x| Complex64::from_polar((-x * x).exp(), 2.0 * x)).unwrap();
        let r = evolve(&s, &TridiagonalOperator::zero(g).into(), 0.1, 50, 1.0).unwrap();
        assert_eq!(r.state.amplitudes, s.amplitudes);
    }

    #[test]
    fn short_inverted_run_keeps_norm() {
        let g = Grid1D::new(20.0, 512).unwrap();
        let s = WaveState::from_fn_1d(g, |x| (-(x - 1.0).powi(2)).exp().into()).unwrap();
        let h = build_hamiltonian_inverted(g, 1.0, 1.0).unwrap();
        let r = evolve(&s, &h.into(), 0.01, 100, 1.0).unwrap();
        assert!(r.total_drift < 1e-12, "{}", r.total_drift);
        assert!(!r.contaminated);
    }

    #[test]
    fn dilrot_step_is_unitary() {
        let g = Grid2D::new(6.0, 64).unwrap();
        let s = WaveState::from_fn_2d(g, |x, y| Complex64::new((-(x * x + y * y)).exp(), 0.1 * x)).unwrap();
        let d = build_hamiltonian_dilrot(g, 0.5, 1.0, 1.0).unwrap();
        let r = evolve(&s, &d.into(), 0.01, 10, 1.0).unwrap();
        assert!(r.max_step_drift < 1e-13, "{}", r.max_step_drift);
    }

    #[test]
    fn mismatched_grid_is_rejected() {
        let g = Grid1D::new(5.0, 128).unwrap();
        let s = WaveState::from_fn_1d(Grid1D::new(5.0, 129).unwrap(), |_| Complex64::new(1.0, 0.0)).unwrap();
        assert!(evolve(&s, &TridiagonalOperator::zero(g).into(), 0.1, 1, 1.0).is_err());
    }
}
