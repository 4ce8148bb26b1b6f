//! Spectral toolkit for surfaces immersed in R^3 through a conformal chart:
//! chart construction, dual-route curvature, the surface Dirac operator built
//! from the conformal factor and the mean-curvature potential, biorthogonal
//! spectra, heat/zeta kernels, and heat-coefficient (anomaly) extraction.

pub mod anomaly;
pub mod catalog;
pub mod dirac;
pub mod error;
pub mod geometry;
pub mod grid;
pub mod spectra;

use num_complex::Complex64;

/// Real scalar field sampled on a chart grid, indexed `[i1, i2]`.
pub type RField = ndarray::Array2<f64>;
/// Complex scalar field sampled on a chart grid, indexed `[i1, i2]`.
pub type CField = ndarray::Array2<Complex64>;
/// Complex scalar.
pub type C64 = Complex64;

pub use error::CoreError;
