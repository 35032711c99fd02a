//! Estimation of the difference between the inverse power spectral
//! densities of two stationary multivariate time series.
//!
//! The entry difference `Sy(f)^{-1} - Sx(f)^{-1}` encodes, for Gaussian
//! series, the change in the conditional-independence graph between the two
//! samples. This crate estimates that difference directly, without
//! estimating either inverse: block-averaged periodograms on a frequency
//! grid feed a group-penalized complex D-trace loss whose groups stack each
//! matrix entry across frequencies, solved by ADMM with optional
//! reweighting for non-convex penalty families. Supporting modules simulate
//! benchmark processes with known graphs, select the penalty level, score
//! recovered edge sets, and evaluate sample-size requirements of the
//! consistency guarantees.
//!
//! All numerics are generic over the floating-point scalar through
//! [`scalar::Real`]; the `*64` aliases fix `f64` for the common case.

pub mod error;
pub mod evaluation;
pub mod matrix;
pub mod penalty;
pub mod scalar;
pub mod solver;
pub mod spectral;
pub mod synth;
pub mod tuning;

pub use error::{CoreError, Result};
pub use scalar::Real;

/// Double-precision aliases for the main entry points.
pub type Matrix64 = matrix::CMatrix<f64>;
pub type RealMatrix64 = matrix::RMatrix<f64>;
pub type Hermitian64 = matrix::HermitianMatrix<f64>;
pub type TimeSeries64 = spectral::TimeSeries<f64>;
pub type SpectralStatistics64 = spectral::SpectralStatistics<f64>;
pub type PenaltySpec64 = penalty::PenaltySpec<f64>;
pub type WeightMatrix64 = penalty::WeightMatrix<f64>;
pub type SolverConfig64 = solver::SolverConfig<f64>;
pub type DifferentialEstimate64 = solver::DifferentialEstimate<f64>;
