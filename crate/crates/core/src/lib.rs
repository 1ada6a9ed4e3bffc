//! Filtered subspace iteration for eigenvalue clusters of the 2D Dirichlet
//! Laplacian.
//!
//! The crate combines four ingredients:
//!
//! * [`filter`] — rational filters built from contour quadrature (the
//!   Butterworth filter in particular), with diagnostics for the contraction
//!   factor that governs convergence of the iteration;
//! * [`mesh`] / [`fem`] — structured triangulations of the unit square, the
//!   L-shaped domain and a dumbbell domain, degree 1–3 Lagrange elements,
//!   and sparse complex-shifted solves realizing the discrete resolvent;
//! * [`feast`] — the subspace iteration driver: repeated application of the
//!   filtered operator, Rayleigh–Ritz extraction, truncation and stopping;
//! * [`metrics`] — Hausdorff distances, subspace gaps and observed
//!   convergence rates used to assess the computed spectra.
//!
//! The crate is `no_std`-compatible (it needs only `alloc`); file formats,
//! CLI plumbing and parallel drivers live in the companion CLI crate.

#![cfg_attr(not(feature = "std"), no_std)]
#![deny(unsafe_code)]

extern crate alloc;
#[cfg(feature = "std")]
extern crate std;

pub mod error;
pub mod feast;
pub mod fem;
pub mod filter;
pub mod linalg;
pub mod mesh;
pub mod metrics;
pub mod sparse;

pub use error::Error;
pub use num_complex::Complex64;

/// Crate-wide result alias.
pub type Result<T> = core::result::Result<T, Error>;
