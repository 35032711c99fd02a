//! Group penalty families and their local-linear-approximation weights.
//!
//! The estimator penalizes each index pair `(i, j)` through the Euclidean
//! norm of the group that stacks entry `(i, j)` across all frequency blocks.
//! Three concave-or-convex families are supported; the two non-convex ones
//! are handled by majorizing them with weighted group lasso passes, where
//! the per-group weight is the penalty's derivative at the previous
//! estimate's group norm:
//!
//! - lasso: `h(u) = lambda * u`, weight `lambda`;
//! - log-sum: `h(u) = lambda * eps * ln(1 + u/eps)`, weight
//!   `lambda * eps / (norm + eps)`;
//! - SCAD: quadratic spline with knees at `lambda` and `a * lambda`, weight
//!   `lambda`, `(a*lambda - norm)/(a - 1)`, or `0` on the three segments.
//!
//! Weights always lie in `[0, lambda]` and never increase as the group norm
//! grows; an all-zero previous estimate reproduces the plain lasso weights
//! for every family, which is what makes the first pass family-independent.

use crate::error::{CoreError, Result};
use crate::matrix::RMatrix;
use crate::scalar::{fl, Real};

/// Penalty family selector.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PenaltyKind {
    Lasso,
    LogSum,
    Scad,
}

impl PenaltyKind {
    pub fn as_str(self) -> &'static str {
        match self {
            PenaltyKind::Lasso => "lasso",
            PenaltyKind::LogSum => "logsum",
            PenaltyKind::Scad => "scad",
        }
    }
}

impl std::str::FromStr for PenaltyKind {
    type Err = CoreError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "lasso" => Ok(PenaltyKind::Lasso),
            "logsum" | "log-sum" => Ok(PenaltyKind::LogSum),
            "scad" => Ok(PenaltyKind::Scad),
            other => Err(CoreError::InvalidArgument(format!(
                "unknown penalty '{other}' (expected lasso, logsum, or scad)"
            ))),
        }
    }
}

impl std::fmt::Display for PenaltyKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Default log-sum curvature parameter.
pub const DEFAULT_LOG_SUM_EPSILON: f64 = 1e-3;
/// Default SCAD shape parameter.
pub const DEFAULT_SCAD_A: f64 = 3.7;

/// Fully parameterized penalty: family, level, and shape constants.
#[derive(Clone, Copy, Debug)]
pub struct PenaltySpec<T> {
    pub kind: PenaltyKind,
    /// Penalty level `lambda > 0`.
    pub lambda: T,
    /// Log-sum curvature `eps > 0` (ignored by the other families).
    pub epsilon: T,
    /// SCAD shape `a > 2` (ignored by the other families).
    pub scad_a: T,
}

impl<T: Real> PenaltySpec<T> {
    /// Builds a spec with the given family and default shape constants.
    pub fn new(kind: PenaltyKind, lambda: T) -> Result<Self> {
        Self::with_shape(kind, lambda, fl(DEFAULT_LOG_SUM_EPSILON), fl(DEFAULT_SCAD_A))
    }

    /// Builds a spec with explicit shape constants.
    pub fn with_shape(kind: PenaltyKind, lambda: T, epsilon: T, scad_a: T) -> Result<Self> {
        if !(lambda > T::zero()) || !lambda.is_finite() {
            return Err(CoreError::InvalidArgument(format!(
                "penalty level must be positive and finite, got {lambda}"
            )));
        }
        if !(epsilon > T::zero()) || !epsilon.is_finite() {
            return Err(CoreError::InvalidArgument(format!(
                "log-sum epsilon must be positive and finite, got {epsilon}"
            )));
        }
        if !(scad_a > fl(2.0)) || !scad_a.is_finite() {
            return Err(CoreError::InvalidArgument(format!(
                "SCAD shape parameter must exceed 2, got {scad_a}"
            )));
        }
        Ok(Self {
            kind,
            lambda,
            epsilon,
            scad_a,
        })
    }

    /// Same spec at a different penalty level (for path sweeps).
    pub fn at_lambda(&self, lambda: T) -> Result<Self> {
        Self::with_shape(self.kind, lambda, self.epsilon, self.scad_a)
    }
}

/// Scalar penalty value `h(u)` at a group norm `u >= 0`.
pub fn penalty_value<T: Real>(spec: &PenaltySpec<T>, u: T) -> T {
    debug_assert!(u >= T::zero(), "group norms are nonnegative");
    let lambda = spec.lambda;
    match spec.kind {
        PenaltyKind::Lasso => lambda * u,
        PenaltyKind::LogSum => {
            let eps = spec.epsilon;
            lambda * eps * (T::one() + u / eps).ln()
        }
        PenaltyKind::Scad => {
            let a = spec.scad_a;
            let two = fl::<T>(2.0);
            if u <= lambda {
                lambda * u
            } else if u < a * lambda {
                (two * a * lambda * u - u * u - lambda * lambda) / (two * (a - T::one()))
            } else {
                lambda * lambda * (a + T::one()) / two
            }
        }
    }
}

/// Per-group weights `lambda_ij >= 0` for the weighted group-lasso
/// subproblem. Entry `(i, j)` applies to the group stacking index `(i, j)`
/// across frequency blocks.
#[derive(Clone, Debug)]
pub struct WeightMatrix<T> {
    w: RMatrix<T>,
}

impl<T: Real> WeightMatrix<T> {
    /// Uniform weights `lambda` on every group (diagonal included).
    pub fn uniform(p: usize, lambda: T) -> Self {
        Self {
            w: RMatrix::from_fn(p, p, |_, _| lambda),
        }
    }

    /// Wraps explicit weights; all must be finite and nonnegative.
    pub fn from_matrix(w: RMatrix<T>) -> Result<Self> {
        if w.rows() != w.cols() {
            return Err(CoreError::DimensionMismatch {
                context: "WeightMatrix::from_matrix",
                expected: "square matrix".into(),
                found: format!("{}x{}", w.rows(), w.cols()),
            });
        }
        if !w.is_finite() || w.data().iter().any(|&v| v < T::zero()) {
            return Err(CoreError::InvalidArgument(
                "penalty weights must be finite and nonnegative".into(),
            ));
        }
        Ok(Self { w })
    }

    pub fn p(&self) -> usize {
        self.w.rows()
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> T {
        self.w.get(i, j)
    }

    pub fn max(&self) -> T {
        self.w.max_abs()
    }

    pub fn as_matrix(&self) -> &RMatrix<T> {
        &self.w
    }
}

/// Weights for the next majorization pass, evaluated at the previous
/// estimate's group norms (`norms` is the `p x p` matrix of stacked group
/// norms, which is symmetric for a symmetrized estimate).
pub fn lla_weights<T: Real>(spec: &PenaltySpec<T>, norms: &RMatrix<T>) -> WeightMatrix<T> {
    let p = norms.rows();
    debug_assert_eq!(norms.cols(), p);
    let lambda = spec.lambda;
    let w = RMatrix::from_fn(p, p, |i, j| {
        let u = norms.get(i, j);
        match spec.kind {
            PenaltyKind::Lasso => lambda,
            PenaltyKind::LogSum => lambda * spec.epsilon / (u + spec.epsilon),
            PenaltyKind::Scad => {
                let a = spec.scad_a;
                if u <= lambda {
                    lambda
                } else if u <= a * lambda {
                    (a * lambda - u) / (a - T::one())
                } else {
                    T::zero()
                }
            }
        }
    });
    WeightMatrix { w }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn spec(kind: PenaltyKind, lambda: f64) -> PenaltySpec<f64> {
        PenaltySpec::new(kind, lambda).unwrap()
    }

    #[test]
    fn lasso_value_is_linear() {
        let s = spec(PenaltyKind::Lasso, 0.5);
        assert_abs_diff_eq!(penalty_value(&s, 2.0), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn log_sum_matches_closed_form_and_slope() {
        let s = PenaltySpec::<f64>::with_shape(PenaltyKind::LogSum, 2.0, 0.001, 3.7).unwrap();
        let u = 0.05;
        assert_abs_diff_eq!(
            penalty_value(&s, u),
            2.0 * 0.001 * (1.0 + u / 0.001).ln(),
            epsilon = 1e-15
        );
        // Slope at zero equals lambda for every family.
        let h = 1e-9;
        let slope = penalty_value(&s, h) / h;
        assert_abs_diff_eq!(slope, 2.0, epsilon = 1e-4);
    }

    #[test]
    fn scad_segments_join_continuously() {
        let lambda = 0.8;
        let a = 3.7;
        let s = PenaltySpec::with_shape(PenaltyKind::Scad, lambda, 0.001, a).unwrap();
        let at_knee1 = penalty_value(&s, lambda);
        assert_abs_diff_eq!(at_knee1, lambda * lambda, epsilon = 1e-12);
        let just_above = penalty_value(&s, lambda + 1e-10);
        assert_abs_diff_eq!(just_above, at_knee1, epsilon = 1e-8);
        let at_knee2 = penalty_value(&s, a * lambda);
        assert_abs_diff_eq!(at_knee2, lambda * lambda * (a + 1.0) / 2.0, epsilon = 1e-12);
        let plateau = penalty_value(&s, 10.0 * a * lambda);
        assert_abs_diff_eq!(plateau, at_knee2, epsilon = 1e-15);
    }

    #[test]
    fn weights_at_zero_norms_equal_lambda_for_all_families() {
        let norms = RMatrix::zeros(3, 3);
        for kind in [PenaltyKind::Lasso, PenaltyKind::LogSum, PenaltyKind::Scad] {
            let w = lla_weights(&spec(kind, 1.3), &norms);
            for i in 0..3 {
                for j in 0..3 {
                    assert_abs_diff_eq!(w.get(i, j), 1.3, epsilon = 1e-15);
                }
            }
        }
    }

    #[test]
    fn weights_are_bounded_and_non_increasing_in_the_norm() {
        let lambda = 1.0;
        for kind in [PenaltyKind::Lasso, PenaltyKind::LogSum, PenaltyKind::Scad] {
            let s = spec(kind, lambda);
            let mut prev = f64::INFINITY;
            for step in 0..200 {
                let u = step as f64 * 0.05;
                let norms = RMatrix::from_fn(1, 1, |_, _| u);
                let w = lla_weights(&s, &norms).get(0, 0);
                assert!((0.0..=lambda + 1e-15).contains(&w), "{kind}: w = {w}");
                assert!(w <= prev + 1e-15, "{kind}: weight increased at u = {u}");
                prev = w;
            }
        }
    }

    #[test]
    fn scad_weights_hit_documented_segments() {
        let s = PenaltySpec::with_shape(PenaltyKind::Scad, 1.0, 0.001, 3.7).unwrap();
        let w_at = |u: f64| lla_weights(&s, &RMatrix::from_fn(1, 1, |_, _| u)).get(0, 0);
        assert_abs_diff_eq!(w_at(0.5), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(w_at(1.0), 1.0, epsilon = 1e-15); // boundary uses lambda
        assert_abs_diff_eq!(w_at(2.0), (3.7 - 2.0) / 2.7, epsilon = 1e-15);
        assert_abs_diff_eq!(w_at(3.7), 0.0, epsilon = 1e-15); // boundary of last segment
        assert_abs_diff_eq!(w_at(5.0), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn log_sum_weights_match_derivative() {
        let s = PenaltySpec::with_shape(PenaltyKind::LogSum, 2.0, 0.01, 3.7).unwrap();
        let u = 0.3;
        let w = lla_weights(&s, &RMatrix::from_fn(1, 1, |_, _| u)).get(0, 0);
        let h = 1e-7;
        let fd = (penalty_value(&s, u + h) - penalty_value(&s, u - h)) / (2.0 * h);
        assert_abs_diff_eq!(w, fd, epsilon = 1e-7);
    }

    #[test]
    fn invalid_parameters_are_rejected() {
        assert!(PenaltySpec::<f64>::new(PenaltyKind::Lasso, 0.0).is_err());
        assert!(PenaltySpec::<f64>::new(PenaltyKind::Lasso, -1.0).is_err());
        assert!(PenaltySpec::<f64>::with_shape(PenaltyKind::LogSum, 1.0, 0.0, 3.7).is_err());
        assert!(PenaltySpec::<f64>::with_shape(PenaltyKind::Scad, 1.0, 0.001, 2.0).is_err());
        assert!("ridge".parse::<PenaltyKind>().is_err());
        assert_eq!("logsum".parse::<PenaltyKind>().unwrap(), PenaltyKind::LogSum);
    }
}
