//! Multivariate linear regression with bootstrap inference.
//!
//! The crate fits `Y_i = B x_i + e_i` with vector responses by least
//! squares and quantifies the uncertainty of `vec(B_hat)` four ways:
//! residual bootstrap and its closed-form normal limit for fixed designs,
//! pairs bootstrap and the sandwich normal limit for random designs. A
//! simulation layer reproduces the calibration tables and coverage
//! studies, and a transport-distance module checks the contraction bounds
//! that make residual resampling work.
//!
//! The kernels are generic over the scalar type through [`num_traits`];
//! the crate root re-exports `f64` aliases, which is what everything
//! downstream uses.
//!
//! Determinism contract: every random quantity is a pure function of a
//! `u64` master seed and a fixed stream/path tag, so any result can be
//! reproduced bitwise regardless of thread count.

// Dense kernels index in storage order on purpose: the loops mirror the
// stride arithmetic their invariant comments reason about.
#![allow(clippy::needless_range_loop)]

pub mod assignment;
pub mod asymptotics;
pub mod bootstrap;
pub mod cli;
pub mod error;
pub mod intervals;
pub mod mallows;
pub mod model;
pub mod rng;
pub mod simulate;
pub mod stats;
pub mod tensorlinalg;

pub use error::{Error, Result};
pub use intervals::{ComponentInterval, IntervalMethod, IntervalTable};
pub use model::{fit_ols, Dataset, FitResult};
pub use tensorlinalg::{Mat, SpdMat};

/// Column-major `f64` matrix, the working type throughout the crate.
pub type MatF64 = tensorlinalg::Mat<f64>;
/// Column-major `f32` matrix for callers that trade precision for space.
pub type MatF32 = tensorlinalg::Mat<f32>;
