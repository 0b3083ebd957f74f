//! Numerical laboratory for two higher-derivative / nonlocal quantum systems:
//! the Pais–Uhlenbeck oscillator and the nonlocal harmonic oscillator.
//!
//! * [`pu`]: Ostrogradsky phase space, classical flow and decoupling map.
//! * [`nonlocal`]: zeros and residues of `z² + ω²cosh(Tz)`, partial
//!   fractions, mode generators and exponential mode trajectories.
//! * [`special`]: Hermite and parabolic cylinder functions, PU eigenfunctions.
//! * [`propagator`]: closed-form, Trotter-composed and product propagators,
//!   the spectral identity and the Euclidean-continuation check.
//! * [`lab`]: grid Hamiltonians, norm-preserving evolution, matrix-element
//!   divergence scans and the discrete commutator check.

pub mod error;
pub mod lab;
pub mod nonlocal;
pub mod ode;
pub mod propagator;
pub mod pu;
pub mod quadrature;
pub mod special;

pub use error::{Error, Result};

/// Version string embedded in every emitted artifact.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
