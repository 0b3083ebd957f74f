//! Classical Pais–Uhlenbeck oscillator `L = ½(q̈² − Ω⁴q²)`: Ostrogradsky
//! phase space, Hamilton's equations, the decoupling canonical map onto an
//! oscillator ⊖ inverted-oscillator pair, and the exponentially growing
//! observable `X = Π₁ − ΩΠ₂ − Ω³q₁ − Ω²q₂`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::SQRT_2;

use crate::error::{Error, Result};
use crate::ode::Dopri5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PUParams {
    /// Frequency Ω, strictly positive.
    pub omega_cap: f64,
    pub hbar: f64,
}

impl PUParams {
    pub fn new(omega_cap: f64, hbar: f64) -> Result<Self> {
        if !(omega_cap > 0.0 && omega_cap.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "frequency must be positive, got {omega_cap}"
            )));
        }
        if !(hbar > 0.0 && hbar.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "hbar must be positive, got {hbar}"
            )));
        }
        Ok(Self { omega_cap, hbar })
    }
}

/// Ostrogradsky phase point `(q₁, q₂, Π₁, Π₂) = (q, q̇, −q⃛, q̈)`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct PhaseState {
    pub q1: f64,
    pub q2: f64,
    pub pi1: f64,
    pub pi2: f64,
}

impl PhaseState {
    pub fn new(q1: f64, q2: f64, pi1: f64, pi2: f64) -> Self {
        Self { q1, q2, pi1, pi2 }
    }

    pub fn to_array(self) -> [f64; 4] {
        [self.q1, self.q2, self.pi1, self.pi2]
    }

    pub fn from_array(a: [f64; 4]) -> Self {
        Self::new(a[0], a[1], a[2], a[3])
    }

    pub fn is_finite(&self) -> bool {
        self.to_array().iter().all(|v| v.is_finite())
    }
}

/// Coordinates after the decoupling map: `(X₁, P₁)` oscillate,
/// `(X₂, P₂)` belong to the inverted oscillator.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct DecoupledState {
    pub x1: f64,
    pub p1: f64,
    pub x2: f64,
    pub p2: f64,
}

impl DecoupledState {
    pub fn to_array(self) -> [f64; 4] {
        [self.x1, self.p1, self.x2, self.p2]
    }

    pub fn from_array(a: [f64; 4]) -> Self {
        Self {
            x1: a[0],
            p1: a[1],
            x2: a[2],
            p2: a[3],
        }
    }
}

/// Amplitudes of the general solution
/// `q(t) = c₊e^{iΩt} + c₋e^{−iΩt} + c_grow e^{Ωt} + c_decay e^{−Ωt}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassicalSolutionCoeffs {
    c_osc_plus: Complex64,
    c_osc_minus: Complex64,
    pub c_grow: f64,
    pub c_decay: f64,
}

impl ClassicalSolutionCoeffs {
    /// Real trajectory: the oscillatory amplitudes are tied by conjugation.
    pub fn real(c_osc_plus: Complex64, c_grow: f64, c_decay: f64) -> Self {
        Self {
            c_osc_plus,
            c_osc_minus: c_osc_plus.conj(),
            c_grow,
            c_decay,
        }
    }

    pub fn c_osc_plus(&self) -> Complex64 {
        self.c_osc_plus
    }

    pub fn c_osc_minus(&self) -> Complex64 {
        self.c_osc_minus
    }

    /// `[q, q̇, q̈, q⃛]` at time `t`.
    pub fn derivatives(&self, t: f64, params: &PUParams) -> [f64; 4] {
        let w = params.omega_cap;
        let mut out = [0.0; 4];
        let iw = Complex64::new(0.0, w);
        let mut fac_p = self.c_osc_plus * (iw * t).exp();
        let mut fac_m = self.c_osc_minus * (-iw * t).exp();
        let mut g = self.c_grow * (w * t).exp();
        let mut d = self.c_decay * (-w * t).exp();
        for slot in out.iter_mut() {
            *slot = (fac_p + fac_m).re + g + d;
            fac_p *= iw;
            fac_m *= -iw;
            g *= w;
            d *= -w;
        }
        out
    }

    pub fn phase_state(&self, t: f64, params: &PUParams) -> PhaseState {
        let [q, qd, qdd, qddd] = self.derivatives(t, params);
        ostrogradsky_state(q, qd, qdd, qddd)
    }
}

pub fn lagrangian_pu(q_ddot: f64, q: f64, params: &PUParams) -> f64 {
    0.5 * (q_ddot * q_ddot - params.omega_cap.powi(4) * q * q)
}

pub fn ostrogradsky_state(q: f64, q_dot: f64, q_ddot: f64, q_dddot: f64) -> PhaseState {
    PhaseState {
        q1: q,
        q2: q_dot,
        pi1: -q_dddot,
        pi2: q_ddot,
    }
}

pub fn hamiltonian_pu(s: &PhaseState, params: &PUParams) -> f64 {
    s.pi1 * s.q2 + 0.5 * s.pi2 * s.pi2 + 0.5 * params.omega_cap.powi(4) * s.q1 * s.q1
}

/// `|Π₁q₂| + ½Π₂² + ½Ω⁴q₁²`: the size of the terms that cancel in
/// [`hamiltonian_pu`]. Drift along a growing trajectory is measured against it.
pub fn hamiltonian_scale(s: &PhaseState, params: &PUParams) -> f64 {
    (s.pi1 * s.q2).abs() + 0.5 * s.pi2 * s.pi2 + 0.5 * params.omega_cap.powi(4) * s.q1 * s.q1
}

/// Right-hand side of Hamilton's equations, returned as a phase-space vector.
pub fn canonical_flow(s: &PhaseState, params: &PUParams) -> PhaseState {
    PhaseState {
        q1: s.q2,
        q2: s.pi2,
        pi1: -params.omega_cap.powi(4) * s.q1,
        pi2: -s.pi1,
    }
}

/// New coordinates in terms of the Ostrogradsky ones.
pub fn decouple(s: &PhaseState, params: &PUParams) -> DecoupledState {
    let w = params.omega_cap;
    DecoupledState {
        x1: (w * s.q1 - s.pi2 / w) / SQRT_2,
        p1: (w * s.q2 + s.pi1 / w) / SQRT_2,
        x2: (w * s.q1 + s.pi2 / w) / SQRT_2,
        p2: (s.pi1 / w - w * s.q2) / SQRT_2,
    }
}

/// Ostrogradsky coordinates in terms of the decoupled ones.
pub fn recouple(d: &DecoupledState, params: &PUParams) -> PhaseState {
    let w = params.omega_cap;
    PhaseState {
        q1: (d.x1 + d.x2) / (SQRT_2 * w),
        q2: (d.p1 - d.p2) / (SQRT_2 * w),
        pi1: w * (d.p1 + d.p2) / SQRT_2,
        pi2: w * (d.x2 - d.x1) / SQRT_2,
    }
}

/// Jacobian ∂(X₁,P₁,X₂,P₂)/∂(q₁,q₂,Π₁,Π₂) of [`decouple`]; the map is linear so
/// this is the map itself.
pub fn decouple_jacobian(params: &PUParams) -> [[f64; 4]; 4] {
    let w = params.omega_cap;
    let r = 1.0 / SQRT_2;
    [
        [w * r, 0.0, 0.0, -r / w],
        [0.0, w * r, r / w, 0.0],
        [w * r, 0.0, 0.0, r / w],
        [0.0, -w * r, r / w, 0.0],
    ]
}

/// `(½P₁² + ½Ω²X₁²) − (½P₂² − ½Ω²X₂²)`.
///
/// The potential coefficients carry Ω² so that this equals
/// [`hamiltonian_pu`] under [`decouple`]; the eigenfunctions and energies of
/// the quantum problem use the same convention.
pub fn hamiltonian_decoupled(d: &DecoupledState, params: &PUParams) -> f64 {
    oscillator_energy(d.x1, d.p1, params) - inverted_energy(d.x2, d.p2, params)
}

pub fn oscillator_energy(x: f64, p: f64, params: &PUParams) -> f64 {
    0.5 * p * p + 0.5 * params.omega_cap.powi(2) * x * x
}

pub fn inverted_energy(x: f64, p: f64, params: &PUParams) -> f64 {
    0.5 * p * p - 0.5 * params.omega_cap.powi(2) * x * x
}

pub fn x_observable(s: &PhaseState, params: &PUParams) -> f64 {
    let w = params.omega_cap;
    s.pi1 - w * s.pi2 - w.powi(3) * s.q1 - w * w * s.q2
}

pub fn x_in_decoupled(d: &DecoupledState, params: &PUParams) -> f64 {
    let w = params.omega_cap;
    SQRT_2 * w * (d.p2 - w * d.x2)
}

/// Integrates the canonical flow from `s0` at t = 0 and samples it on `t_grid`.
pub fn integrate_flow(
    s0: &PhaseState,
    params: &PUParams,
    t_grid: &[f64],
    rtol: f64,
) -> Result<Vec<PhaseState>> {
    let rhs = |_t: f64, y: &[f64; 4]| {
        canonical_flow(&PhaseState::from_array(*y), params).to_array()
    };
    let (ys, _) = Dopri5::with_rtol(rtol).integrate(rhs, 0.0, s0.to_array(), t_grid)?;
    Ok(ys.into_iter().map(PhaseState::from_array).collect())
}

/// Largest stencil-scaled residual of `q⁗ − Ω⁴q = 0` on a uniformly sampled
/// trajectory: `|δ⁴q − h⁴Ω⁴q| / Σ|stencil terms|` over interior points.
pub fn fourth_difference_residual(q: &[f64], h: f64, params: &PUParams) -> f64 {
    let w4h4 = params.omega_cap.powi(4) * h.powi(4);
    q.windows(5)
        .map(|v| {
            let d4 = v[0] - 4.0 * v[1] + 6.0 * v[2] - 4.0 * v[3] + v[4];
            let scale = v[0].abs()
                + 4.0 * v[1].abs()
                + 6.0 * v[2].abs()
                + 4.0 * v[3].abs()
                + v[4].abs()
                + w4h4 * v[2].abs();
            if scale == 0.0 {
                0.0
            } else {
                (d4 - w4h4 * v[2]).abs() / scale
            }
        })
        .fold(0.0, f64::max)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GrowthFit {
    pub rate: f64,
    pub intercept: f64,
    /// Largest absolute deviation of `log|X|` from the fitted line.
    pub max_residual: f64,
}

/// Least-squares fit of `log|X(t)|` along the flow on `t ∈ [0.5, 3]/Ω`.
pub fn fit_x_growth(s0: &PhaseState, params: &PUParams, samples: usize) -> Result<GrowthFit> {
    let w = params.omega_cap;
    let (t0, t1) = (0.5 / w, 3.0 / w);
    let ts: Vec<f64> = (0..samples)
        .map(|i| t0 + (t1 - t0) * i as f64 / (samples - 1) as f64)
        .collect();
    let states = integrate_flow(s0, params, &ts, 1e-12)?;
    let logs: Vec<f64> = states
        .iter()
        .map(|s| x_observable(s, params).abs().ln())
        .collect();
    if logs.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidParameter(
            "X vanishes along the trajectory; no growth mode to fit".into(),
        ));
    }
    Ok(linear_fit(&ts, &logs))
}

pub(crate) fn linear_fit(xs: &[f64], ys: &[f64]) -> GrowthFit {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let rate = sxy / sxx;
    let intercept = my - rate * mx;
    let max_residual = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| (y - intercept - rate * x).abs())
        .fold(0.0, f64::max);
    GrowthFit {
        rate,
        intercept,
        max_residual,
    }
}

/// `JᵀΣJ − Σ` in max norm for a 4×4 Jacobian in (x₁, p₁, x₂, p₂)-pair ordering
/// of the target and (q₁, q₂, Π₁, Π₂) ordering of the source.
pub fn symplectic_defect(j: &[[f64; 4]; 4]) -> f64 {
    // source form: {q_i, Π_j} = δ_ij with ordering (q1, q2, pi1, pi2)
    let sigma_src = [
        [0.0, 0.0, 1.0, 0.0],
        [0.0, 0.0, 0.0, 1.0],
        [-1.0, 0.0, 0.0, 0.0],
        [0.0, -1.0, 0.0, 0.0],
    ];
    // target form with ordering (x1, p1, x2, p2)
    let sigma_dst = [
        [0.0, 1.0, 0.0, 0.0],
        [-1.0, 0.0, 0.0, 0.0],
        [0.0, 0.0, 0.0, 1.0],
        [0.0, 0.0, -1.0, 0.0],
    ];
    // Poisson brackets of new coordinates: J Σ_src Jᵀ must equal Σ_dst
    let mut worst: f64 = 0.0;
    for a in 0..4 {
        for b in 0..4 {
            let mut acc = 0.0;
            for k in 0..4 {
                for l in 0..4 {
                    acc += j[a][k] * sigma_src[k][l] * j[b][l];
                }
            }
            worst = worst.max((acc - sigma_dst[a][b]).abs());
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit() -> PUParams {
        PUParams::new(1.0, 1.0).unwrap()
    }

    #[test]
    fn lagrangian_values() {
        assert_eq!(lagrangian_pu(0.0, 0.0, &unit()), 0.0);
        assert_eq!(lagrangian_pu(1.0, 0.0, &unit()), 0.5);
        // ½(4 − 1.5⁴·9) = ½(4 − 45.5625) = −20.78125
        let p = PUParams::new(1.5, 1.0).unwrap();
        assert!((lagrangian_pu(2.0, 3.0, &p) + 20.78125).abs() < 1e-13);
    }

    #[test]
    fn ostrogradsky_slots() {
        assert_eq!(
            ostrogradsky_state(1.0, 2.0, 3.0, 4.0),
            PhaseState::new(1.0, 2.0, -4.0, 3.0)
        );
        assert_eq!(ostrogradsky_state(0.0, 0.0, 0.0, 0.0), PhaseState::default());
        // q = cos t at t = 0: (q, q̇, q̈, q⃛) = (1, 0, −1, 0)
        let s = ostrogradsky_state(1.0, 0.0, -1.0, 0.0);
        assert_eq!(s, PhaseState::new(1.0, 0.0, 0.0, -1.0));
    }

    #[test]
    fn hamiltonian_simple_values() {
        assert_eq!(hamiltonian_pu(&PhaseState::new(1.0, 0.0, 0.0, 0.0), &unit()), 0.5);
        assert_eq!(hamiltonian_pu(&PhaseState::default(), &unit()), 0.0);
    }

    #[test]
    fn decoupled_hamiltonian_values() {
        let p = PUParams::new(2.0, 1.0).unwrap();
        let d = DecoupledState {
            x1: 1.0,
            ..Default::default()
        };
        // ½Ω²X₁² with Ω = 2
        assert_eq!(hamiltonian_decoupled(&d, &p), 2.0);
        assert_eq!(hamiltonian_decoupled(&DecoupledState::default(), &p), 0.0);
    }

    #[test]
    fn zero_state_maps_to_zero() {
        assert_eq!(decouple(&PhaseState::default(), &unit()), DecoupledState::default());
        assert_eq!(canonical_flow(&PhaseState::default(), &unit()), PhaseState::default());
        assert_eq!(x_observable(&PhaseState::default(), &unit()), 0.0);
        assert_eq!(x_in_decoupled(&DecoupledState::default(), &unit()), 0.0);
    }

    #[test]
    fn x_in_decoupled_simple() {
        let d = DecoupledState {
            p2: 1.0,
            ..Default::default()
        };
        assert!((x_in_decoupled(&d, &unit()) - SQRT_2).abs() < 1e-15);
    }

    #[test]
    fn cosine_trajectory_energy_and_x() {
        let p = unit();
        let sol = ClassicalSolutionCoeffs::real(Complex64::new(0.5, 0.0), 0.0, 0.0);
        let e0 = hamiltonian_pu(&sol.phase_state(0.0, &p), &p);
        for i in 0..50 {
            let t = i as f64 * 0.2;
            let s = sol.phase_state(t, &p);
            assert!((hamiltonian_pu(&s, &p) - e0).abs() < 1e-13);
            assert!(x_observable(&s, &p).abs() < 1e-13);
        }
    }

    #[test]
    fn real_coefficients_are_conjugate() {
        let c = ClassicalSolutionCoeffs::real(Complex64::new(0.3, -0.7), 1.0, 2.0);
        assert_eq!(c.c_osc_minus(), c.c_osc_plus().conj());
    }

    #[test]
    fn jacobian_is_symplectic() {
        for w in [0.3, 1.0, 2.5] {
            let p = PUParams::new(w, 1.0).unwrap();
            assert!(symplectic_defect(&decouple_jacobian(&p)) < 1e-14);
        }
    }

    #[test]
    fn invalid_params_rejected() {
        assert!(PUParams::new(0.0, 1.0).is_err());
        assert!(PUParams::new(1.0, -1.0).is_err());
        assert!(PUParams::new(f64::NAN, 1.0).is_err());
    }
}
