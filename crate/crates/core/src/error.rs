//! Error type shared by every module in this crate.
//!
//! Numeric payloads are carried as `f64` regardless of the working scalar
//! type so that errors stay displayable and comparable without dragging the
//! scalar parameter through every signature.

use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, CoreError>;

/// Failures surfaced by construction, factorization, estimation, and
/// generation routines.
#[derive(Debug, Error)]
pub enum CoreError {
    /// Operands have incompatible shapes.
    #[error("dimension mismatch in {context}: expected {expected}, found {found}")]
    DimensionMismatch {
        context: &'static str,
        expected: String,
        found: String,
    },

    /// A matrix handed to a Hermitian constructor deviates from conjugate
    /// symmetry by more than the allowed tolerance.
    #[error("matrix is not Hermitian: max |a_ij - conj(a_ji)| = {max_asymmetry:.3e} exceeds tolerance {tolerance:.3e}")]
    NotHermitian { max_asymmetry: f64, tolerance: f64 },

    /// A Cholesky pivot was non-positive; the matrix is not positive
    /// definite (after any shift the caller applied).
    #[error("matrix is not positive definite: pivot {pivot} has value {value:.3e}")]
    NotPositiveDefinite { pivot: usize, value: f64 },

    /// The cyclic Jacobi eigensolver failed to reduce the off-diagonal mass
    /// within its sweep budget. Practically unreachable for finite Hermitian
    /// input; reported rather than silently returning a bad factorization.
    #[error("eigendecomposition did not converge for a {dim}x{dim} matrix after {sweeps} sweeps")]
    EigenNonConvergence { dim: usize, sweeps: usize },

    /// An LU pivot was negligible relative to the matrix scale.
    #[error("singular matrix in {context}: pivot magnitude {pivot:.3e} below threshold {threshold:.3e}")]
    SingularMatrix {
        context: &'static str,
        pivot: f64,
        threshold: f64,
    },

    /// The dense reference solver produced a solution whose residual is too
    /// large to trust as an oracle.
    #[error("reference solve residual {residual:.3e} exceeds {tolerance:.3e}")]
    OracleResidual { residual: f64, tolerance: f64 },

    /// The default frequency-grid rule cannot produce a usable span.
    #[error("no usable frequency grid for n = {n}, blocks = {blocks}: span would be {span}; reduce the number of blocks or pass an explicit span")]
    GridInfeasible { n: usize, blocks: usize, span: isize },

    /// A caller-supplied parameter violates a documented precondition.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// Input data contains NaN or infinite values.
    #[error("non-finite input: {0}")]
    NonFiniteInput(String),

    /// An ADMM iterate lost finiteness (overflow or NaN propagation).
    #[error("solver iterate became non-finite at iteration {iteration}")]
    NonFiniteIterate { iteration: usize },

    /// The regularization-path search could not bracket the smallest
    /// all-zero penalty level inside the allowed window.
    #[error("penalty search failed to bracket an empty model within [{lo:.3e}, {hi:.3e}]")]
    BracketFailure { lo: f64, hi: f64 },

    /// An operation that needs a non-empty reference edge set received an
    /// empty one.
    #[error("ground-truth edge set is empty: {context}")]
    DegenerateTruth { context: &'static str },

    /// Random model generation exhausted its retry budget.
    #[error("model generation failed after {attempts} attempts: {reason}")]
    ModelGeneration { attempts: usize, reason: String },
}
