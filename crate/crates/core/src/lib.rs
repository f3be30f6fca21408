//! Simulation and analysis of sub-fractional and bi-fractional Brownian
//! motion under scaled Lamperti transforms.
//!
//! The crate is organised bottom-up:
//!
//! * [`kernels`]: closed-form covariances, stationary autocovariances of the
//!   Lamperti images and their exponential mixing rates.
//! * [`sampler`]: time grids, covariance assembly, jittered Cholesky and
//!   seeded ensemble generation (plus an exact Toeplitz sampler for long
//!   stationary paths).
//! * [`lamperti`]: path-level forward and inverse transforms.
//! * [`langevin`]: power-law integrals against the Gaussian drivers, their
//!   covariances by singular double quadrature, and pathwise sampling.
//! * [`ergodics`]: time averages, empirical characteristic functions,
//!   empirical autocovariances, decay-rate fits and mixing tails.
//!
//! Data-parallel loops go through [`exec`], which uses rayon when the
//! `parallel` feature is enabled and always reduces in a fixed order, so
//! results do not depend on the number of threads.

// `!(x > 0.0)` style checks are meant to reject NaN too
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod ergodics;
pub mod error;
pub mod exec;
pub mod gauss;
pub mod kernels;
pub mod lamperti;
pub mod langevin;
pub mod rng;
pub mod sampler;

pub use error::{Error, Result};
pub use kernels::{AcfEvaluator, AcfFamily, Autocovariance, HurstParams};
pub use lamperti::LampertiMap;
pub use langevin::{LangevinSpec, QuadratureConfig};
pub use sampler::{Family, GridKind, ModelSpec, PathEnsemble, TimeGrid};

/// Library version, recorded in experiment manifests.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
