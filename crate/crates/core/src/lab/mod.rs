//! Direct numerical checks on grids: Cayley evolution under the inverted
//! oscillator and the dilatation-rotation generator, the divergent
//! matrix elements of the PU position, and the discretized commutator.

mod commutator;
mod divergence;
mod evolve;
mod flow;
mod grid;
mod operator;

pub use commutator::{commutator_check, CommutatorCheck, Stencil};
pub use divergence::{divergence_scan, DivergenceRow, DivergenceScan, ScanObservable, ScanVerdict};
pub use evolve::{evolve, EvolveReport};
pub use flow::{classical_dilrot_flow, dilrot_jacobian, symplectic_defect, DilrotPoint};
pub use grid::{Domain, Grid1D, Grid2D, WaveState, BOUNDARY_CELLS, CONTAMINATION_LIMIT, MIN_POINTS};
pub use operator::{
    build_hamiltonian_dilrot, build_hamiltonian_harmonic, build_hamiltonian_inverted, DilrotOperator,
    DiscreteOperator, TridiagonalOperator,
};

use num_complex::Complex64;

use crate::error::Result;

/// Normalized `(2πσ²)^{−1/4} e^{−(x−x₀)²/(4σ²) + ik₀x}`.
pub fn gaussian_packet(grid: Grid1D, x0: f64, sigma: f64, k0: f64) -> Result<WaveState> {
    WaveState::from_fn_1d(grid, |x| {
        Complex64::from_polar((-(x - x0).powi(2) / (4.0 * sigma * sigma)).exp(), k0 * x)
    })?
    .normalized()
}

/// Harmonic-oscillator coherent state centered at `x0` with mean momentum `p0`.
pub fn coherent_state(grid: Grid1D, x0: f64, p0: f64, omega: f64, hbar: f64) -> Result<WaveState> {
    let sigma = (hbar / (2.0 * omega)).sqrt();
    gaussian_packet(grid, x0, sigma, p0 / hbar)
}

/// `e^{inθ}·r²e^{−r²/(2s²)}`, the same radial profile for every `n`.
pub fn angular_sector_state(grid: Grid2D, n: i32, s: f64) -> Result<WaveState> {
    WaveState::from_fn_2d(grid, |x, y| {
        let r2 = x * x + y * y;
        let theta = y.atan2(x);
        Complex64::from_polar(r2 * (-r2 / (2.0 * s * s)).exp(), n as f64 * theta)
    })?
    .normalized()
}

/// Normalized radial Gaussian `e^{−r²/(2s²)}`.
pub fn radial_gaussian(grid: Grid2D, s: f64) -> Result<WaveState> {
    WaveState::from_fn_2d(grid, |x, y| (-(x * x + y * y) / (2.0 * s * s)).exp().into())?.normalized()
}
