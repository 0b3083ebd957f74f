//! Special functions needed for the exact PU eigenfunctions: Hermite
//! polynomials, complex gamma, and parabolic cylinder functions.

pub mod eigen;
pub mod gamma;
pub mod hermite;
pub mod pcf;

pub use eigen::{
    inverted_eigenfunction, inverted_eigenfunction_with_derivative, oscillator_factor,
    pu_eigenfunction, Branch, EigenLabel,
};
pub use gamma::{gamma, recip_gamma};
pub use hermite::{hermite, hermite_function};
pub use pcf::{cross_validate, parabolic_cylinder_d, parabolic_cylinder_full, PcfRoute, PcfValue};
