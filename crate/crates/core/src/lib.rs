//! Spectral and probabilistic numerics on the Riemann sphere.
//!
//! The crate computes exact eigenvalue families of Toeplitz compressions
//! `T_{f,p}` acting on degree-`p` holomorphic sections, draws Gaussian random
//! sections as complex polynomials, finds their roots, and evaluates the
//! downstream zero statistics: radial equidistribution, linear-statistic
//! expectation and variance, a central-limit check, hole frequencies, and the
//! mass distribution.
//!
//! Everything is `no_std` + `alloc`. All transcendental functions route
//! through `libm`, so every result is bit-identical across platforms and
//! independent of the host math library.

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod basis;
pub mod geometry;
mod linalg;
pub mod math;
pub mod quad;
pub mod rng;
pub mod roots;
pub mod sampling;
pub mod spectra;
pub mod stats;

pub use num_complex::Complex64;

/// Crate version string, embedded for run manifests.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
