//! Propagators of the inverted and harmonic oscillators, their product for
//! the PU system, Trotter composition in the algebra of Gaussian kernels,
//! the Fourier check against the eigenfunctions, and the naive Euclidean
//! continuation.

mod closed;
mod euclid;
mod kernel;
mod spectral;

pub use closed::{
    free_propagator, harmonic_kernel, harmonic_propagator, inverted_kernel, inverted_diagonal_origin, inverted_propagator,
    inverted_propagator_complex_omega, inverted_sample, pu_propagator, ComplexKernelSample,
};
pub use euclid::{euclidean_pitfall, EuclideanReport, EuclideanSample};
pub use kernel::{trotter_kernel, trotter_propagator, PotentialSign, QuadraticKernel};
pub use spectral::{spectral_identity, SpectralIdentity, Taper};

use crate::error::{Error, Result};

pub(crate) fn check_positive(name: &str, v: f64) -> Result<()> {
    if !(v > 0.0 && v.is_finite()) {
        return Err(Error::InvalidParameter(format!("{name} must be positive, got {v}")));
    }
    Ok(())
}

pub(crate) fn check_nonnegative(name: &str, v: f64) -> Result<()> {
    if !(v >= 0.0 && v.is_finite()) {
        return Err(Error::InvalidParameter(format!("{name} must be ≥ 0, got {v}")));
    }
    Ok(())
}
