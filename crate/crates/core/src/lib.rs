//! Stationary measures of geometric last passage percolation and the
//! log-gamma polymer on a strip.
//!
//! The crate is organised bottom-up: [`numerics`] provides special functions
//! and contour quadrature, [`schur`] and [`whittaker`] the symmetric-function
//! layer, [`twolayer`] the two-layer Gibbs measures with their Markov kernels,
//! [`strip_models`] the growth models themselves, [`formulas`] the closed-form
//! Laplace transforms and [`kpz`] the open-KPZ growth rate.

pub mod cli;
pub mod error;
pub mod formulas;
pub mod kpz;
pub mod numerics;
pub mod schur;
pub mod stats;
pub mod strip_models;
pub mod twolayer;
pub mod whittaker;

pub use error::{Error, Result};
pub use num_complex::Complex64;

/// Version string embedded in every emitted artifact.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
