//! Group-penalized complex D-trace estimation of the difference between two
//! inverse power spectral densities.
//!
//! Per frequency block the smooth loss is
//! `L(D) = Re tr(Sx D Sy D^H) - 2 Re tr(D (Sx - Sy))`,
//! whose unique minimizer over Hermitian matrices is `Sy^{-1} - Sx^{-1}`
//! when both spectra are invertible. The penalty couples blocks through the
//! Euclidean norm of each entry group stacked across frequencies, with a
//! per-group level from a [`WeightMatrix`]. The solver alternates an exact
//! eigendecomposition-based update of the smooth iterate, a group
//! soft-threshold update of the splitting iterate, and a scaled dual ascent,
//! with an adaptive augmented-Lagrangian parameter. Non-convex penalty
//! families run the same loop under reweighting passes that refresh the
//! weights from the previous pass.

use num_complex::Complex;

use crate::error::{CoreError, Result};
use crate::matrix::{CMatrix, EigenFactorization, HermitianMatrix, RMatrix};
use crate::penalty::{lla_weights, PenaltyKind, PenaltySpec, WeightMatrix};
use crate::scalar::{fl, Real};
use crate::spectral::{sample_covariance, SpectralStatistics, TimeSeries};

/// Lower clamp for the adaptive augmented-Lagrangian parameter.
pub const RHO_MIN: f64 = 1e-4;
/// Upper clamp for the adaptive augmented-Lagrangian parameter.
pub const RHO_MAX: f64 = 1e6;

/// Tunable constants of the inner and outer solver loops.
#[derive(Clone, Debug)]
pub struct SolverConfig<T> {
    /// Augmented-Lagrangian parameter at the start of every solve, including
    /// warm-started ones.
    pub rho_init: T,
    /// Residual imbalance ratio that triggers doubling or halving of the
    /// augmented-Lagrangian parameter.
    pub mu_bar: T,
    /// Absolute floor term of the stopping thresholds.
    pub tau_abs: T,
    /// Relative term of the stopping thresholds.
    pub tau_rel: T,
    /// Inner iteration cap. Reaching it yields `converged = false`, not an
    /// error.
    pub max_iterations: usize,
    /// Reweighting passes for the non-convex families; `None` selects the
    /// default of two. The convex family always runs exactly one pass.
    pub max_reweight_passes: Option<usize>,
}

impl<T: Real> Default for SolverConfig<T> {
    fn default() -> Self {
        Self {
            rho_init: fl(2.0),
            mu_bar: fl(10.0),
            tau_abs: fl(1e-4),
            tau_rel: fl(1e-4),
            max_iterations: 200,
            max_reweight_passes: None,
        }
    }
}

impl<T: Real> SolverConfig<T> {
    fn validate(&self) -> Result<()> {
        if !(self.rho_init > T::zero()) || !self.rho_init.is_finite() {
            return Err(CoreError::InvalidArgument(format!(
                "initial rho must be positive and finite, got {}",
                self.rho_init
            )));
        }
        if !(self.mu_bar >= T::one()) || !self.mu_bar.is_finite() {
            return Err(CoreError::InvalidArgument(format!(
                "residual ratio threshold must be at least 1, got {}",
                self.mu_bar
            )));
        }
        for (name, v) in [("tau_abs", self.tau_abs), ("tau_rel", self.tau_rel)] {
            if !(v >= T::zero()) || !v.is_finite() {
                return Err(CoreError::InvalidArgument(format!(
                    "{name} must be non-negative and finite, got {v}"
                )));
            }
        }
        if self.max_iterations == 0 {
            return Err(CoreError::InvalidArgument(
                "iteration cap must be at least 1".into(),
            ));
        }
        if self.max_reweight_passes == Some(0) {
            return Err(CoreError::InvalidArgument(
                "reweighting pass cap must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

/// Full iterate triple of the splitting scheme, one matrix of each kind per
/// frequency block. Passing a returned state back in warm-starts the next
/// solve.
#[derive(Clone, Debug)]
pub struct AdmmState<T> {
    /// Smooth primal iterate.
    pub delta: Vec<CMatrix<T>>,
    /// Splitting iterate; carries the exact zero pattern produced by the
    /// group threshold.
    pub w: Vec<CMatrix<T>>,
    /// Scaled dual iterate.
    pub u: Vec<CMatrix<T>>,
    /// Augmented-Lagrangian parameter at termination. Ignored on input;
    /// every solve restarts from `cfg.rho_init`.
    pub rho: T,
    /// Iterations executed by the solve that produced this state.
    pub iterations: usize,
}

impl<T: Real> AdmmState<T> {
    /// All-zero triple for a `p`-variable problem with the given number of
    /// frequency blocks.
    pub fn zeros(p: usize, blocks: usize) -> Self {
        let z = || (0..blocks).map(|_| CMatrix::zeros(p, p)).collect();
        Self {
            delta: z(),
            w: z(),
            u: z(),
            rho: T::one(),
            iterations: 0,
        }
    }

    /// State seeded with an initial guess for the smooth iterate; the
    /// splitting iterate starts equal to it and the dual at zero.
    pub fn from_delta(delta: Vec<CMatrix<T>>) -> Self {
        let w = delta.clone();
        let u = delta
            .iter()
            .map(|m| CMatrix::zeros(m.rows(), m.cols()))
            .collect();
        Self {
            delta,
            w,
            u,
            rho: T::one(),
            iterations: 0,
        }
    }
}

/// Residuals and thresholds of the final inner iteration.
#[derive(Clone, Debug)]
pub struct AdmmDiagnostics<T> {
    /// Whether both residuals fell below their thresholds within the cap.
    pub converged: bool,
    /// Iterations executed.
    pub iterations: usize,
    /// Frobenius norm of the stacked primal residual.
    pub primal_residual: T,
    /// Frobenius norm of the stacked dual residual.
    pub dual_residual: T,
    /// Primal stopping threshold at termination.
    pub tau_primal: T,
    /// Dual stopping threshold at termination.
    pub tau_dual: T,
    /// Augmented-Lagrangian parameter at termination.
    pub final_rho: T,
}

/// Estimated difference of inverse spectra with its support.
#[derive(Clone, Debug)]
pub struct DifferentialEstimate<T> {
    /// Hermitian projection of the smooth iterate, one matrix per block.
    pub delta: Vec<HermitianMatrix<T>>,
    /// Symmetrized splitting iterate; exact zeros encode the support.
    pub sparse: Vec<CMatrix<T>>,
    /// Euclidean norm of each entry group of `sparse` stacked across blocks.
    pub group_norms: RMatrix<T>,
    /// Pairs `(i, j)` with `i < j` whose group in `sparse` is nonzero.
    /// Diagonal groups are penalized like any other but never reported.
    pub edges: Vec<(usize, usize)>,
    /// Whether the final pass converged within the iteration cap.
    pub converged: bool,
    /// Inner iteration count of each reweighting pass, in order.
    pub inner_iterations: Vec<usize>,
}

/// Frequency-indexed problem data with cached eigendecompositions.
///
/// Preparing once and reusing the preparation across penalty levels,
/// reweighting passes, and warm starts amortizes the only superlinear setup
/// cost; every solver iteration then needs four matrix products per block.
pub struct PreparedProblem<T> {
    p: usize,
    blocks: usize,
    sx: Vec<CMatrix<T>>,
    sy: Vec<CMatrix<T>>,
    g: Vec<CMatrix<T>>,
    qx: Vec<CMatrix<T>>,
    qxh: Vec<CMatrix<T>>,
    dx: Vec<Vec<T>>,
    qy: Vec<CMatrix<T>>,
    qyh: Vec<CMatrix<T>>,
    dy: Vec<Vec<T>>,
}

impl<T: Real> PreparedProblem<T> {
    /// Prepares the smoothed spectra of a two-sample statistic.
    pub fn from_stats(stats: &SpectralStatistics<T>) -> Result<Self> {
        Self::from_pair(&stats.sx, &stats.sy)
    }

    /// Prepares an explicit pair of per-block spectra.
    pub fn from_pair(sx: &[HermitianMatrix<T>], sy: &[HermitianMatrix<T>]) -> Result<Self> {
        if sx.is_empty() || sx.len() != sy.len() {
            return Err(CoreError::DimensionMismatch {
                context: "PreparedProblem::from_pair",
                expected: "equal nonzero block counts".into(),
                found: format!("sx: {}, sy: {}", sx.len(), sy.len()),
            });
        }
        let p = sx[0].dim();
        if sx.iter().chain(sy.iter()).any(|m| m.dim() != p) {
            return Err(CoreError::DimensionMismatch {
                context: "PreparedProblem::from_pair",
                expected: format!("all blocks {p}x{p}"),
                found: "mixed dimensions".into(),
            });
        }
        let blocks = sx.len();
        let mut prep = Self {
            p,
            blocks,
            sx: Vec::with_capacity(blocks),
            sy: Vec::with_capacity(blocks),
            g: Vec::with_capacity(blocks),
            qx: Vec::with_capacity(blocks),
            qxh: Vec::with_capacity(blocks),
            dx: Vec::with_capacity(blocks),
            qy: Vec::with_capacity(blocks),
            qyh: Vec::with_capacity(blocks),
            dy: Vec::with_capacity(blocks),
        };
        for k in 0..blocks {
            let ex = sx[k].eigendecompose()?;
            let ey = sy[k].eigendecompose()?;
            prep.sx.push(sx[k].as_matrix().clone());
            prep.sy.push(sy[k].as_matrix().clone());
            prep.g.push(sx[k].as_matrix().sub(sy[k].as_matrix()));
            prep.qxh.push(ex.q.adjoint());
            prep.qx.push(ex.q);
            prep.dx.push(ex.eigenvalues);
            prep.qyh.push(ey.q.adjoint());
            prep.qy.push(ey.q);
            prep.dy.push(ey.eigenvalues);
        }
        Ok(prep)
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn blocks(&self) -> usize {
        self.blocks
    }

    /// First spectrum of block `k` as a plain matrix.
    pub fn sx_matrix(&self, k: usize) -> &CMatrix<T> {
        &self.sx[k]
    }

    /// Second spectrum of block `k` as a plain matrix.
    pub fn sy_matrix(&self, k: usize) -> &CMatrix<T> {
        &self.sy[k]
    }

    /// Spectral difference `Sx - Sy` of block `k`.
    pub fn difference(&self, k: usize) -> &CMatrix<T> {
        &self.g[k]
    }

    /// Exact solution of `Sx D Sy + (rho/2) D = C` for block `k`.
    fn delta_solve(&self, k: usize, c: &CMatrix<T>, rho: T) -> CMatrix<T> {
        eigen_solve(
            &self.qx[k], &self.qxh[k], &self.dx[k], &self.qy[k], &self.qyh[k], &self.dy[k], c, rho,
        )
    }

    /// Smallest uniform penalty level at which the all-zero matrix minimizes
    /// the penalized objective: twice the largest group norm of the stacked
    /// spectral differences, from the group-subgradient optimality condition
    /// at zero. Levels strictly above it drive every group of the splitting
    /// iterate to exact zero in finitely many iterations; at exact equality
    /// the boundary group reaches zero only in the limit.
    pub fn lambda_zero_bound(&self) -> T {
        fl::<T>(2.0) * group_norms(&self.g).max_abs()
    }
}

/// `Qx [H ./ (dx dy^T + rho/2)] Qy^H` where `H = Qx^H C Qy`; the exact
/// minimizer of the smooth block subproblem.
#[allow(clippy::too_many_arguments)]
fn eigen_solve<T: Real>(
    qx: &CMatrix<T>,
    qxh: &CMatrix<T>,
    dx: &[T],
    qy: &CMatrix<T>,
    qyh: &CMatrix<T>,
    dy: &[T],
    c: &CMatrix<T>,
    rho: T,
) -> CMatrix<T> {
    let p = qx.rows();
    let half_rho = rho * fl::<T>(0.5);
    let mut t = qxh.matmul(c).matmul(qy);
    for j in 0..p {
        for l in 0..p {
            let denom = dx[j] * dy[l] + half_rho;
            t.set(j, l, t.get(j, l).unscale(denom));
        }
    }
    qx.matmul(&t).matmul(qyh)
}

/// Smooth loss of one frequency block:
/// `Re tr(Sx D Sy D^H) - 2 Re tr(D (Sx - Sy))`.
pub fn dtrace_loss<T: Real>(
    delta: &CMatrix<T>,
    sx: &HermitianMatrix<T>,
    sy: &HermitianMatrix<T>,
) -> Result<T> {
    let p = sx.dim();
    if sy.dim() != p || delta.rows() != p || delta.cols() != p {
        return Err(CoreError::DimensionMismatch {
            context: "dtrace_loss",
            expected: format!("{p}x{p} inputs"),
            found: format!("delta {}x{}, sy {}x{}", delta.rows(), delta.cols(), sy.dim(), sy.dim()),
        });
    }
    let sxd = sx.as_matrix().matmul(delta);
    let sydh = sy.as_matrix().matmul(&delta.adjoint());
    let quad = sxd.trace_product(&sydh).re;
    let g = sx.as_matrix().sub(sy.as_matrix());
    let lin = delta.trace_product(&g).re;
    Ok(quad - fl::<T>(2.0) * lin)
}

/// Conjugate gradient of [`dtrace_loss`] in the complex entries:
/// `Sx D Sy - (Sx - Sy)`. Vanishes at `D = Sy^{-1} - Sx^{-1}`. Derivatives
/// with respect to real and imaginary parts are twice its real and
/// imaginary parts.
pub fn dtrace_gradient<T: Real>(
    delta: &CMatrix<T>,
    sx: &HermitianMatrix<T>,
    sy: &HermitianMatrix<T>,
) -> Result<CMatrix<T>> {
    let p = sx.dim();
    if sy.dim() != p || delta.rows() != p || delta.cols() != p {
        return Err(CoreError::DimensionMismatch {
            context: "dtrace_gradient",
            expected: format!("{p}x{p} inputs"),
            found: format!("delta {}x{}, sy {}x{}", delta.rows(), delta.cols(), sy.dim(), sy.dim()),
        });
    }
    Ok(sx
        .as_matrix()
        .matmul(delta)
        .matmul(sy.as_matrix())
        .sub(&sx.as_matrix().sub(sy.as_matrix())))
}

/// Exact minimizer of the block subproblem
/// `Sx D Sy + (rho/2) D = Sx - Sy + (rho/2)(W - U)`
/// computed through the cached eigendecompositions.
pub fn delta_update<T: Real>(
    ex: &EigenFactorization<T>,
    ey: &EigenFactorization<T>,
    sx: &HermitianMatrix<T>,
    sy: &HermitianMatrix<T>,
    w_minus_u: &CMatrix<T>,
    rho: T,
) -> Result<CMatrix<T>> {
    let p = sx.dim();
    if sy.dim() != p
        || w_minus_u.rows() != p
        || w_minus_u.cols() != p
        || ex.q.rows() != p
        || ey.q.rows() != p
    {
        return Err(CoreError::DimensionMismatch {
            context: "delta_update",
            expected: format!("{p}x{p} inputs"),
            found: "mixed dimensions".into(),
        });
    }
    if !(rho > T::zero()) || !rho.is_finite() {
        return Err(CoreError::InvalidArgument(format!(
            "rho must be positive and finite, got {rho}"
        )));
    }
    let c = sx
        .as_matrix()
        .sub(sy.as_matrix())
        .add(&w_minus_u.scale(rho * fl::<T>(0.5)));
    Ok(eigen_solve(
        &ex.q,
        &ex.q.adjoint(),
        &ex.eigenvalues,
        &ey.q,
        &ey.q.adjoint(),
        &ey.eigenvalues,
        &c,
        rho,
    ))
}

/// Group soft threshold across stacked blocks:
/// `[W_k]_ij = (1 - w_ij / (rho ||a^(ij)||))_+ [A_k]_ij` where `a^(ij)`
/// stacks `[A_k]_ij` over `k`. Groups with `||a^(ij)|| <= w_ij / rho`
/// become exactly zero in every block.
pub fn group_soft_threshold<T: Real>(
    a: &[CMatrix<T>],
    weights: &WeightMatrix<T>,
    rho: T,
) -> Result<Vec<CMatrix<T>>> {
    let p = weights.p();
    if a.is_empty() || a.iter().any(|m| m.rows() != p || m.cols() != p) {
        return Err(CoreError::DimensionMismatch {
            context: "group_soft_threshold",
            expected: format!("nonzero count of {p}x{p} blocks"),
            found: format!("{} blocks", a.len()),
        });
    }
    if !(rho > T::zero()) || !rho.is_finite() {
        return Err(CoreError::InvalidArgument(format!(
            "rho must be positive and finite, got {rho}"
        )));
    }
    let mut out = a.to_vec();
    let zero = Complex::new(T::zero(), T::zero());
    for i in 0..p {
        for j in 0..p {
            let idx = i * p + j;
            let level = weights.get(i, j);
            if level == T::zero() {
                continue;
            }
            let mut norm_sqr = T::zero();
            for block in a {
                norm_sqr += block.data()[idx].norm_sqr();
            }
            let norm = norm_sqr.sqrt();
            if rho * norm <= level {
                for block in &mut out {
                    block.data_mut()[idx] = zero;
                }
            } else {
                let factor = T::one() - level / (rho * norm);
                for block in &mut out {
                    let v = block.data()[idx];
                    block.data_mut()[idx] = v.scale(factor);
                }
            }
        }
    }
    Ok(out)
}

/// Euclidean norm of each entry group stacked across blocks.
pub fn group_norms<T: Real>(blocks: &[CMatrix<T>]) -> RMatrix<T> {
    let p = blocks.first().map_or(0, CMatrix::rows);
    RMatrix::from_fn(p, p, |i, j| {
        blocks
            .iter()
            .map(|m| m.get(i, j).norm_sqr())
            .sum::<T>()
            .sqrt()
    })
}

/// Smooth loss summed over blocks plus the weighted group penalty
/// `sum_ij w_ij ||d^(ij)||` over all entry groups, diagonal included.
pub fn penalized_objective<T: Real>(
    sx: &[HermitianMatrix<T>],
    sy: &[HermitianMatrix<T>],
    delta: &[CMatrix<T>],
    weights: &WeightMatrix<T>,
) -> Result<T> {
    if sx.len() != sy.len() || sx.len() != delta.len() {
        return Err(CoreError::DimensionMismatch {
            context: "penalized_objective",
            expected: "equal block counts".into(),
            found: format!("sx: {}, sy: {}, delta: {}", sx.len(), sy.len(), delta.len()),
        });
    }
    let mut total = T::zero();
    for k in 0..sx.len() {
        total += dtrace_loss(&delta[k], &sx[k], &sy[k])?;
    }
    let norms = group_norms(delta);
    let p = weights.p();
    for i in 0..p {
        for j in 0..p {
            total += weights.get(i, j) * norms.get(i, j);
        }
    }
    Ok(total)
}

/// Runs the splitting iteration on prepared data until both stacked
/// residuals fall below their thresholds or the iteration cap is reached.
///
/// Thresholds after each iteration, with `e1, e2, e3` the stacked norms of
/// the three iterates:
/// `tau_pri = p sqrt(M) tau_abs + tau_rel max(e1, e2)` and
/// `tau_dual = p sqrt(M) tau_abs + tau_rel e3 / rho`.
/// Convergence is checked on the residuals of the iteration just completed;
/// an imbalance by more than `mu_bar` then doubles or halves `rho` (clamped
/// to `[RHO_MIN, RHO_MAX]`) and rescales the dual iterate by the inverse
/// factor, affecting subsequent iterations only.
pub fn admm_solve_prepared<T: Real>(
    prep: &PreparedProblem<T>,
    weights: &WeightMatrix<T>,
    cfg: &SolverConfig<T>,
    init: Option<&AdmmState<T>>,
) -> Result<(AdmmState<T>, AdmmDiagnostics<T>)> {
    cfg.validate()?;
    let p = prep.p;
    let blocks = prep.blocks;
    if weights.p() != p {
        return Err(CoreError::DimensionMismatch {
            context: "admm_solve",
            expected: format!("{p}x{p} weights"),
            found: format!("{0}x{0}", weights.p()),
        });
    }
    let (mut delta, mut w, mut u) = match init {
        Some(state) => {
            let ok = |ms: &Vec<CMatrix<T>>| {
                ms.len() == blocks && ms.iter().all(|m| m.rows() == p && m.cols() == p)
            };
            if !ok(&state.delta) || !ok(&state.w) || !ok(&state.u) {
                return Err(CoreError::DimensionMismatch {
                    context: "admm_solve",
                    expected: format!("{blocks} blocks of {p}x{p} in the initial state"),
                    found: "mismatched initial state".into(),
                });
            }
            (state.delta.clone(), state.w.clone(), state.u.clone())
        }
        None => {
            let s = AdmmState::zeros(p, blocks);
            (s.delta, s.w, s.u)
        }
    };
    let mut rho = cfg.rho_init;
    let half = fl::<T>(0.5);
    let two = fl::<T>(2.0);
    let dim_term = fl::<T>(p as f64) * fl::<T>(blocks as f64).sqrt();
    let mut converged = false;
    let mut iterations = 0;
    let mut primal = T::infinity();
    let mut dual = T::infinity();
    let mut tau_primal = T::zero();
    let mut tau_dual = T::zero();

    for m in 1..=cfg.max_iterations {
        iterations = m;
        let half_rho = rho * half;
        for k in 0..blocks {
            let mut c = prep.g[k].clone();
            {
                let cd = c.data_mut();
                let wd = w[k].data();
                let ud = u[k].data();
                for idx in 0..cd.len() {
                    cd[idx] += (wd[idx] - ud[idx]).scale(half_rho);
                }
            }
            delta[k] = prep.delta_solve(k, &c, rho);
        }
        let a: Vec<CMatrix<T>> = (0..blocks).map(|k| delta[k].add(&u[k])).collect();
        let w_next = group_soft_threshold(&a, weights, rho)?;
        let mut dual_sqr = T::zero();
        for k in 0..blocks {
            dual_sqr += w_next[k].sub(&w[k]).frobenius_norm_sqr();
        }
        dual = rho * dual_sqr.sqrt();
        w = w_next;
        let mut primal_sqr = T::zero();
        let mut e1_sqr = T::zero();
        let mut e2_sqr = T::zero();
        let mut e3_sqr = T::zero();
        for k in 0..blocks {
            {
                let ud = u[k].data_mut();
                let dd = delta[k].data();
                let wd = w[k].data();
                for idx in 0..ud.len() {
                    ud[idx] += dd[idx] - wd[idx];
                }
            }
            primal_sqr += delta[k].sub(&w[k]).frobenius_norm_sqr();
            e1_sqr += delta[k].frobenius_norm_sqr();
            e2_sqr += w[k].frobenius_norm_sqr();
            e3_sqr += u[k].frobenius_norm_sqr();
        }
        primal = primal_sqr.sqrt();
        let e1 = e1_sqr.sqrt();
        let e2 = e2_sqr.sqrt();
        let e3 = e3_sqr.sqrt();
        tau_primal = dim_term * cfg.tau_abs + cfg.tau_rel * e1.max(e2);
        tau_dual = dim_term * cfg.tau_abs + cfg.tau_rel * e3 / rho;
        if !primal.is_finite() || !dual.is_finite() || !e1.is_finite() || !e3.is_finite() {
            return Err(CoreError::NonFiniteIterate { iteration: m });
        }
        if primal <= tau_primal && dual <= tau_dual {
            converged = true;
            break;
        }
        let candidate = if primal > cfg.mu_bar * dual {
            rho * two
        } else if dual > cfg.mu_bar * primal {
            rho * half
        } else {
            rho
        };
        let clamped = candidate.max(fl(RHO_MIN)).min(fl(RHO_MAX));
        if clamped != rho {
            let rescale = rho / clamped;
            for uk in &mut u {
                for v in uk.data_mut() {
                    *v = v.scale(rescale);
                }
            }
            rho = clamped;
        }
    }

    let state = AdmmState {
        delta,
        w,
        u,
        rho,
        iterations,
    };
    let diagnostics = AdmmDiagnostics {
        converged,
        iterations,
        primal_residual: primal,
        dual_residual: dual,
        tau_primal,
        tau_dual,
        final_rho: rho,
    };
    Ok((state, diagnostics))
}

/// [`admm_solve_prepared`] on freshly prepared two-sample statistics.
pub fn admm_solve<T: Real>(
    stats: &SpectralStatistics<T>,
    weights: &WeightMatrix<T>,
    cfg: &SolverConfig<T>,
    init: Option<&AdmmState<T>>,
) -> Result<(AdmmState<T>, AdmmDiagnostics<T>)> {
    let prep = PreparedProblem::from_stats(stats)?;
    admm_solve_prepared(&prep, weights, cfg, init)
}

/// `(M + M^H) / 2` with exact zeros preserved: an entry is exactly zero in
/// the output iff both mirrored entries are exactly zero in the input.
fn symmetrize_sparse<T: Real>(m: &CMatrix<T>) -> CMatrix<T> {
    let p = m.rows();
    let half = fl::<T>(0.5);
    let zero = Complex::new(T::zero(), T::zero());
    CMatrix::from_fn(p, p, |i, j| {
        let a = m.get(i, j);
        let b = m.get(j, i).conj();
        if a == zero && b == zero {
            zero
        } else {
            (a + b).scale(half)
        }
    })
}

/// [`estimate_prepared`] with an explicit initial state, returning the
/// terminal state alongside the estimate so callers sweeping a penalty path
/// can chain solves.
pub fn estimate_warm<T: Real>(
    prep: &PreparedProblem<T>,
    penalty: &PenaltySpec<T>,
    cfg: &SolverConfig<T>,
    init: Option<&AdmmState<T>>,
) -> Result<(DifferentialEstimate<T>, AdmmState<T>, Vec<AdmmDiagnostics<T>>)> {
    cfg.validate()?;
    let passes = match penalty.kind {
        PenaltyKind::Lasso => 1,
        _ => cfg.max_reweight_passes.unwrap_or(2),
    };
    let mut weights = WeightMatrix::uniform(prep.p, penalty.lambda);
    let mut state: Option<AdmmState<T>> = None;
    let mut diagnostics = Vec::with_capacity(passes);
    let mut inner_iterations = Vec::with_capacity(passes);
    for pass in 0..passes {
        if pass > 0 {
            let previous = state.as_ref().expect("state set by the prior pass");
            let symmetrized: Vec<CMatrix<T>> = previous.w.iter().map(symmetrize_sparse).collect();
            weights = lla_weights(penalty, &group_norms(&symmetrized));
        }
        let (next, diag) =
            admm_solve_prepared(prep, &weights, cfg, state.as_ref().or(init))?;
        inner_iterations.push(diag.iterations);
        diagnostics.push(diag);
        state = Some(next);
    }
    let state = state.expect("at least one pass runs");
    let delta = state
        .delta
        .iter()
        .map(|m| HermitianMatrix::symmetrize(m.clone()))
        .collect();
    let sparse: Vec<CMatrix<T>> = state.w.iter().map(symmetrize_sparse).collect();
    let norms = group_norms(&sparse);
    let mut edges = Vec::new();
    for i in 0..prep.p {
        for j in (i + 1)..prep.p {
            if norms.get(i, j) > T::zero() {
                edges.push((i, j));
            }
        }
    }
    let converged = diagnostics.last().map_or(false, |d| d.converged);
    Ok((
        DifferentialEstimate {
            delta,
            sparse,
            group_norms: norms,
            edges,
            converged,
            inner_iterations,
        },
        state,
        diagnostics,
    ))
}

/// Full estimator: one solver pass per reweighting round, warm-started from
/// the previous round's terminal state, with weights refreshed from the
/// symmetrized sparse iterate. The convex family runs exactly one pass.
pub fn estimate_prepared<T: Real>(
    prep: &PreparedProblem<T>,
    penalty: &PenaltySpec<T>,
    cfg: &SolverConfig<T>,
) -> Result<(DifferentialEstimate<T>, Vec<AdmmDiagnostics<T>>)> {
    let (est, _, diagnostics) = estimate_warm(prep, penalty, cfg, None)?;
    Ok((est, diagnostics))
}

/// [`estimate_prepared`] on freshly prepared two-sample statistics.
pub fn estimate<T: Real>(
    stats: &SpectralStatistics<T>,
    penalty: &PenaltySpec<T>,
    cfg: &SolverConfig<T>,
) -> Result<(DifferentialEstimate<T>, Vec<AdmmDiagnostics<T>>)> {
    let prep = PreparedProblem::from_stats(stats)?;
    estimate_prepared(&prep, penalty, cfg)
}

/// Baseline for independent observations: uncentered sample covariances of
/// both series enter the same solver as a single block with zero imaginary
/// parts, so each penalty group has one member.
pub fn estimate_iid<T: Real>(
    x: &TimeSeries<T>,
    y: &TimeSeries<T>,
    penalty: &PenaltySpec<T>,
    cfg: &SolverConfig<T>,
) -> Result<(DifferentialEstimate<T>, Vec<AdmmDiagnostics<T>>)> {
    if x.p() != y.p() {
        return Err(CoreError::DimensionMismatch {
            context: "estimate_iid",
            expected: format!("{} variables in both series", x.p()),
            found: format!("{} in the second", y.p()),
        });
    }
    let cx = sample_covariance(x);
    let cy = sample_covariance(y);
    let prep = PreparedProblem::from_pair(&[cx], &[cy])?;
    estimate_prepared(&prep, penalty, cfg)
}
