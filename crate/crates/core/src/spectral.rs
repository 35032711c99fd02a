//! Time series container, DFT, frequency grid, and smoothed spectral
//! statistics.
//!
//! The estimation pipeline turns two length-`n` multivariate records into
//! `M` pairs of smoothed power-spectral-density matrices. Each PSD estimate
//! averages `K` consecutive rank-one periodogram terms
//! `d(f_m) d(f_m)^H`, where `d(f_m)` is the normalized DFT
//! `n^{-1/2} sum_t x(t) exp(-i 2 pi f_m (t-1))` and the `M` blocks tile the
//! DFT indices `1 ..= M*K` (the zero-frequency term is excluded and all
//! indices stay strictly below `n/2`).
//!
//! Key behaviors:
//! - the default grid rule picks the largest odd `K <= n/(2M)` and then
//!   steps down by 2 if needed so that `M*K <= n/2 - 1` holds;
//! - an expert constructor accepts any odd `K >= 1` satisfying the same
//!   index bound;
//! - smoothed PSD matrices are built exactly Hermitian (upper triangle plus
//!   conjugate mirror) and probed for positive semidefiniteness at rounding
//!   tolerance.

use num_complex::Complex;
use rustfft::FftPlanner;

use crate::error::{CoreError, Result};
use crate::matrix::{CMatrix, HermitianMatrix};
use crate::scalar::{fl, Real};

/// Multivariate real time series: `p` variables observed at `n` time
/// points. Stored row-major per variable.
#[derive(Clone, Debug)]
pub struct TimeSeries<T> {
    p: usize,
    n: usize,
    data: Vec<T>,
}

impl<T: Real> TimeSeries<T> {
    /// Wraps a `p * n` buffer laid out variable-major
    /// (`data[i * n + t] = x_i(t)`). All values must be finite.
    pub fn new(p: usize, n: usize, data: Vec<T>) -> Result<Self> {
        if p == 0 || n == 0 {
            return Err(CoreError::InvalidArgument(format!(
                "time series needs p >= 1 and n >= 1, got p = {p}, n = {n}"
            )));
        }
        if data.len() != p * n {
            return Err(CoreError::DimensionMismatch {
                context: "TimeSeries::new",
                expected: format!("{} values", p * n),
                found: format!("{}", data.len()),
            });
        }
        if !data.iter().all(|v| v.is_finite()) {
            return Err(CoreError::NonFiniteInput(
                "time series contains NaN or infinite values".into(),
            ));
        }
        Ok(Self { p, n, data })
    }

    /// Builds from per-variable rows of equal length.
    pub fn from_rows(rows: Vec<Vec<T>>) -> Result<Self> {
        let p = rows.len();
        let n = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != n) {
            return Err(CoreError::DimensionMismatch {
                context: "TimeSeries::from_rows",
                expected: format!("rows of length {n}"),
                found: "ragged rows".into(),
            });
        }
        Self::new(p, n, rows.into_iter().flatten().collect())
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Variable `i` as a contiguous slice of length `n`.
    pub fn variable(&self, i: usize) -> &[T] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    #[inline]
    pub fn value(&self, i: usize, t: usize) -> T {
        self.data[i * self.n + t]
    }
}

/// Normalized DFT of every variable: returns a `p x n` complex matrix whose
/// row `i`, column `m` holds `n^{-1/2} sum_t x_i(t) exp(-i 2 pi m (t-1)/n)`.
pub fn compute_dft<T: Real>(x: &TimeSeries<T>) -> CMatrix<T> {
    let (p, n) = (x.p(), x.n());
    let mut planner = FftPlanner::<T>::new();
    let fft = planner.plan_fft_forward(n);
    let scale = T::one() / fl::<T>(n as f64).sqrt();
    let mut out = Vec::with_capacity(p * n);
    let mut buf: Vec<Complex<T>> = Vec::with_capacity(n);
    for i in 0..p {
        buf.clear();
        buf.extend(x.variable(i).iter().map(|&v| Complex::new(v, T::zero())));
        fft.process(&mut buf);
        out.extend(buf.iter().map(|&v| v * scale));
    }
    CMatrix::from_buffer(p, n, out)
}

/// Partition of the low-frequency DFT indices into `M` smoothing blocks of
/// odd span `K`.
#[derive(Clone, Debug, PartialEq)]
pub struct FrequencyGrid<T> {
    /// Series length the grid was built for.
    pub n: usize,
    /// Number of blocks `M` (one PSD pair per block).
    pub blocks: usize,
    /// Block span `K` (odd; periodogram terms averaged per block).
    pub span: usize,
    /// Half-span `m_t = (K - 1) / 2`.
    pub half_span: usize,
    /// Center frequency of each block, `f_k = ((k-1)K + m_t + 1) / n` for
    /// 1-based `k`.
    pub centers: Vec<T>,
}

impl<T: Real> FrequencyGrid<T> {
    fn assemble(n: usize, blocks: usize, span: usize) -> Self {
        let half_span = (span - 1) / 2;
        let centers = (0..blocks)
            .map(|k| fl::<T>((k * span + half_span + 1) as f64) / fl::<T>(n as f64))
            .collect();
        Self {
            n,
            blocks,
            span,
            half_span,
            centers,
        }
    }

    /// DFT indices belonging to block `k` (0-based block): the `K`
    /// consecutive indices `k*K + 1 ..= (k+1)*K`. Index 0 (the DC term) is
    /// never included and every index is `<= n/2 - 1`.
    pub fn block_indices(&self, k: usize) -> std::ops::RangeInclusive<usize> {
        debug_assert!(k < self.blocks);
        (k * self.span + 1)..=((k + 1) * self.span)
    }

    /// DFT index at the center of block `k`.
    pub fn center_index(&self, k: usize) -> usize {
        k * self.span + self.half_span + 1
    }
}

/// Default grid rule: the largest odd `K <= n/(2M)`, reduced by 2 if that
/// still lands on the excluded index `n/2`. Errors when the resulting span
/// would fall below 3.
pub fn build_grid<T: Real>(n: usize, blocks: usize) -> Result<FrequencyGrid<T>> {
    if blocks == 0 {
        return Err(CoreError::InvalidArgument(
            "frequency grid needs at least one block".into(),
        ));
    }
    if n < 2 || n % 2 != 0 {
        return Err(CoreError::InvalidArgument(format!(
            "frequency grid requires even n >= 2, got n = {n}"
        )));
    }
    let cap = n / (2 * blocks);
    let mut span = if cap % 2 == 0 { cap.saturating_sub(1) } else { cap };
    if span >= 1 && blocks * span > n / 2 - 1 {
        span = span.saturating_sub(2);
    }
    if span < 3 {
        return Err(CoreError::GridInfeasible {
            n,
            blocks,
            span: span as isize,
        });
    }
    Ok(FrequencyGrid::assemble(n, blocks, span))
}

/// Expert grid rule: accepts any odd span `K >= 1` with `M*K <= n/2 - 1`.
pub fn build_grid_with_span<T: Real>(n: usize, blocks: usize, span: usize) -> Result<FrequencyGrid<T>> {
    if blocks == 0 {
        return Err(CoreError::InvalidArgument(
            "frequency grid needs at least one block".into(),
        ));
    }
    if n < 2 || n % 2 != 0 {
        return Err(CoreError::InvalidArgument(format!(
            "frequency grid requires even n >= 2, got n = {n}"
        )));
    }
    if span % 2 == 0 || span == 0 {
        return Err(CoreError::InvalidArgument(format!(
            "block span must be odd and positive, got {span}"
        )));
    }
    if blocks * span > n / 2 - 1 {
        return Err(CoreError::InvalidArgument(format!(
            "blocks * span = {} exceeds n/2 - 1 = {}; indices must stay below n/2",
            blocks * span,
            n / 2 - 1
        )));
    }
    Ok(FrequencyGrid::assemble(n, blocks, span))
}

/// Smoothed PSD estimates for both series on a shared grid.
#[derive(Clone, Debug)]
pub struct SpectralStatistics<T> {
    pub grid: FrequencyGrid<T>,
    /// One PSD matrix per block for the first series.
    pub sx: Vec<HermitianMatrix<T>>,
    /// One PSD matrix per block for the second series.
    pub sy: Vec<HermitianMatrix<T>>,
}

impl<T: Real> SpectralStatistics<T> {
    /// Validates matching block counts and dimensions.
    pub fn new(
        grid: FrequencyGrid<T>,
        sx: Vec<HermitianMatrix<T>>,
        sy: Vec<HermitianMatrix<T>>,
    ) -> Result<Self> {
        if sx.len() != grid.blocks || sy.len() != grid.blocks {
            return Err(CoreError::DimensionMismatch {
                context: "SpectralStatistics::new",
                expected: format!("{} matrices per series", grid.blocks),
                found: format!("sx: {}, sy: {}", sx.len(), sy.len()),
            });
        }
        let p = sx.first().map_or(0, HermitianMatrix::dim);
        if p == 0 || sx.iter().chain(sy.iter()).any(|m| m.dim() != p) {
            return Err(CoreError::DimensionMismatch {
                context: "SpectralStatistics::new",
                expected: "equal positive dimensions".into(),
                found: "mixed or zero dimensions".into(),
            });
        }
        Ok(Self { grid, sx, sy })
    }

    pub fn p(&self) -> usize {
        self.sx[0].dim()
    }
}

fn block_average<T: Real>(dft: &CMatrix<T>, grid: &FrequencyGrid<T>, k: usize) -> HermitianMatrix<T> {
    let p = dft.rows();
    let inv_span = T::one() / fl::<T>(grid.span as f64);
    HermitianMatrix::from_upper(p, |i, j| {
        let mut acc = Complex::<T>::new(T::zero(), T::zero());
        for m in grid.block_indices(k) {
            acc = acc + dft.get(i, m) * dft.get(j, m).conj();
        }
        acc * inv_span
    })
}

/// Averages periodogram terms over each block for both DFT matrices.
///
/// Every returned matrix is exactly Hermitian and positive semidefinite up
/// to rounding (each is an average of rank-one Hermitian terms).
pub fn smoothed_psd<T: Real>(
    dft_x: &CMatrix<T>,
    dft_y: &CMatrix<T>,
    grid: &FrequencyGrid<T>,
) -> Result<SpectralStatistics<T>> {
    if dft_x.cols() != grid.n || dft_y.cols() != grid.n {
        return Err(CoreError::DimensionMismatch {
            context: "smoothed_psd",
            expected: format!("DFT matrices with {} columns", grid.n),
            found: format!("{} and {}", dft_x.cols(), dft_y.cols()),
        });
    }
    if dft_x.rows() != dft_y.rows() || dft_x.rows() == 0 {
        return Err(CoreError::DimensionMismatch {
            context: "smoothed_psd",
            expected: "equal positive variable counts".into(),
            found: format!("{} and {}", dft_x.rows(), dft_y.rows()),
        });
    }
    let mut sx = Vec::with_capacity(grid.blocks);
    let mut sy = Vec::with_capacity(grid.blocks);
    for k in 0..grid.blocks {
        sx.push(block_average(dft_x, grid, k));
        sy.push(block_average(dft_y, grid, k));
    }
    for m in sx.iter().chain(sy.iter()) {
        let shift = fl::<T>(1e-10)
            * (T::one()
                + (0..m.dim())
                    .map(|i| m.get(i, i).re)
                    .fold(T::zero(), |a, b| if b > a { b } else { a }));
        if !m.is_positive_definite_shifted(shift) {
            return Err(CoreError::NonFiniteInput(
                "smoothed PSD failed the positive-semidefiniteness probe".into(),
            ));
        }
    }
    SpectralStatistics::new(grid.clone(), sx, sy)
}

/// Full pipeline: DFT both series (which must share `p` and even `n`),
/// build the default grid, and average the periodograms.
pub fn spectral_statistics<T: Real>(
    x: &TimeSeries<T>,
    y: &TimeSeries<T>,
    blocks: usize,
) -> Result<SpectralStatistics<T>> {
    if x.p() != y.p() || x.n() != y.n() {
        return Err(CoreError::DimensionMismatch {
            context: "spectral_statistics",
            expected: format!("matching shapes ({}x{})", x.p(), x.n()),
            found: format!("{}x{}", y.p(), y.n()),
        });
    }
    let grid = build_grid::<T>(x.n(), blocks)?;
    let dx = compute_dft(x);
    let dy = compute_dft(y);
    smoothed_psd(&dx, &dy, &grid)
}

/// Expert-span variant of [`spectral_statistics`].
pub fn spectral_statistics_with_span<T: Real>(
    x: &TimeSeries<T>,
    y: &TimeSeries<T>,
    blocks: usize,
    span: usize,
) -> Result<SpectralStatistics<T>> {
    if x.p() != y.p() || x.n() != y.n() {
        return Err(CoreError::DimensionMismatch {
            context: "spectral_statistics",
            expected: format!("matching shapes ({}x{})", x.p(), x.n()),
            found: format!("{}x{}", y.p(), y.n()),
        });
    }
    let grid = build_grid_with_span::<T>(x.n(), blocks, span)?;
    let dx = compute_dft(x);
    let dy = compute_dft(y);
    smoothed_psd(&dx, &dy, &grid)
}

/// Uncentered sample covariance `(1/n) sum_t x(t) x(t)^T` as a Hermitian
/// matrix with zero imaginary parts. This is the time-domain statistic used
/// by the i.i.d. estimator and by information-criterion scaling.
pub fn sample_covariance<T: Real>(x: &TimeSeries<T>) -> HermitianMatrix<T> {
    let (p, n) = (x.p(), x.n());
    let inv_n = T::one() / fl::<T>(n as f64);
    HermitianMatrix::from_upper(p, |i, j| {
        let xi = x.variable(i);
        let xj = x.variable(j);
        let dot: T = xi.iter().zip(xj.iter()).map(|(&a, &b)| a * b).sum();
        Complex::new(dot * inv_n, T::zero())
    })
}
