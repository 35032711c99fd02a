//! Dense matrix types and factorizations.
//!
//! Everything the estimator needs is small and dense (dimensions up to a few
//! hundred), so this module provides straightforward row-major storage with
//! cache-friendly kernels rather than wrapping an external linear-algebra
//! stack:
//!
//! - [`CMatrix`]: complex dense matrix, the workhorse type.
//! - [`RMatrix`]: real dense matrix (group norms, penalty weights,
//!   autoregressive companion blocks).
//! - [`HermitianMatrix`]: validated conjugate-symmetric wrapper around
//!   [`CMatrix`]; spectral density matrices and covariance matrices live
//!   here.
//! - [`EigenFactorization`]: unitary eigendecomposition of a Hermitian
//!   matrix (cyclic Jacobi), eigenvalues sorted descending.
//! - LU solve/inverse, Cholesky, and a dense Kronecker-system reference
//!   solver used to cross-check the fast per-frequency update.
//!
//! Conventions: indices are 0-based; `vec` stacking is column-major, so
//! `vec(A X B) = (B^T kron A) vec(X)`.

mod chol;
mod eigen;
mod kron;
mod lu;

pub use chol::cholesky_lower;
pub use kron::{kron, kronecker_solve_oracle};
pub use lu::{lu_inverse, lu_solve};

use num_complex::Complex;
use num_traits::Zero;

use crate::error::{CoreError, Result};
use crate::scalar::{fl, Real};

/// Dense complex matrix, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct CMatrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<Complex<T>>,
}

/// Dense real matrix, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct RMatrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Real> CMatrix<T> {
    /// All-zero matrix.
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Complex::zero(); rows * cols],
        }
    }

    /// Identity matrix.
    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = Complex::new(T::one(), T::zero());
        }
        m
    }

    /// Builds a matrix entry by entry.
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex<T>) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    /// Wraps an existing row-major buffer. `data.len()` must equal
    /// `rows * cols`.
    pub fn from_buffer(rows: usize, cols: usize, data: Vec<Complex<T>>) -> Self {
        assert_eq!(data.len(), rows * cols, "buffer length must match shape");
        Self { rows, cols, data }
    }

    /// Embeds a real matrix with zero imaginary parts.
    pub fn from_real(r: &RMatrix<T>) -> Self {
        Self {
            rows: r.rows,
            cols: r.cols,
            data: r.data.iter().map(|&v| Complex::new(v, T::zero())).collect(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex<T> {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Complex<T>) {
        self.data[i * self.cols + j] = v;
    }

    /// Row `i` as a contiguous slice.
    #[inline]
    pub fn row(&self, i: usize) -> &[Complex<T>] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn data(&self) -> &[Complex<T>] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [Complex<T>] {
        &mut self.data
    }

    /// Matrix product `self * rhs`.
    pub fn matmul(&self, rhs: &Self) -> Self {
        assert_eq!(
            self.cols, rhs.rows,
            "matmul shape mismatch: {}x{} * {}x{}",
            self.rows, self.cols, rhs.rows, rhs.cols
        );
        let (m, inner, n) = (self.rows, self.cols, rhs.cols);
        let mut out = vec![Complex::<T>::zero(); m * n];
        for i in 0..m {
            let arow = &self.data[i * inner..(i + 1) * inner];
            let orow = &mut out[i * n..(i + 1) * n];
            for (k, aik) in arow.iter().enumerate() {
                if aik.re.is_zero() && aik.im.is_zero() {
                    continue;
                }
                let brow = &rhs.data[k * n..(k + 1) * n];
                for (o, b) in orow.iter_mut().zip(brow.iter()) {
                    *o = *o + *aik * *b;
                }
            }
        }
        Self {
            rows: m,
            cols: n,
            data: out,
        }
    }

    /// Entry-wise sum.
    pub fn add(&self, rhs: &Self) -> Self {
        self.zip_with(rhs, |a, b| a + b)
    }

    /// Entry-wise difference.
    pub fn sub(&self, rhs: &Self) -> Self {
        self.zip_with(rhs, |a, b| a - b)
    }

    fn zip_with(&self, rhs: &Self, f: impl Fn(Complex<T>, Complex<T>) -> Complex<T>) -> Self {
        assert_eq!(self.rows, rhs.rows, "shape mismatch");
        assert_eq!(self.cols, rhs.cols, "shape mismatch");
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(rhs.data.iter())
                .map(|(&a, &b)| f(a, b))
                .collect(),
        }
    }

    /// Scales every entry by a real factor.
    pub fn scale(&self, s: T) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&v| v * s).collect(),
        }
    }

    /// Scales every entry by a complex factor.
    pub fn scale_complex(&self, s: Complex<T>) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&v| v * s).collect(),
        }
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i).conj())
    }

    /// Transpose without conjugation.
    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i))
    }

    /// Entry-wise conjugate.
    pub fn conj(&self) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|v| v.conj()).collect(),
        }
    }

    /// Sum of diagonal entries.
    pub fn trace(&self) -> Complex<T> {
        assert!(self.is_square(), "trace requires a square matrix");
        (0..self.rows).map(|i| self.get(i, i)).fold(Complex::zero(), |a, b| a + b)
    }

    /// `tr(self * rhs)` computed without forming the product.
    pub fn trace_product(&self, rhs: &Self) -> Complex<T> {
        assert_eq!(self.cols, rhs.rows, "shape mismatch");
        assert_eq!(self.rows, rhs.cols, "shape mismatch");
        let mut acc = Complex::<T>::zero();
        for i in 0..self.rows {
            for (j, &aij) in self.row(i).iter().enumerate() {
                acc = acc + aij * rhs.get(j, i);
            }
        }
        acc
    }

    /// Squared Frobenius norm.
    pub fn frobenius_norm_sqr(&self) -> T {
        self.data.iter().map(|v| v.norm_sqr()).fold(T::zero(), |a, b| a + b)
    }

    /// Frobenius norm.
    pub fn frobenius_norm(&self) -> T {
        self.frobenius_norm_sqr().sqrt()
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> T {
        self.data
            .iter()
            .map(|v| v.norm_sqr())
            .fold(T::zero(), |a, b| if b > a { b } else { a })
            .sqrt()
    }

    /// True when every entry is finite.
    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.re.is_finite() && v.im.is_finite())
    }

    /// Largest deviation from conjugate symmetry,
    /// `max_ij |a_ij - conj(a_ji)|`.
    pub fn hermitian_error(&self) -> T {
        assert!(self.is_square(), "hermitian_error requires a square matrix");
        let mut worst = T::zero();
        for i in 0..self.rows {
            for j in i..self.cols {
                let d = (self.get(i, j) - self.get(j, i).conj()).norm_sqr();
                if d > worst {
                    worst = d;
                }
            }
        }
        worst.sqrt()
    }

    /// Column-major stacking of the entries (`out[j * rows + i] = a_ij`).
    pub fn vec_col_major(&self) -> Vec<Complex<T>> {
        let mut v = Vec::with_capacity(self.rows * self.cols);
        for j in 0..self.cols {
            for i in 0..self.rows {
                v.push(self.get(i, j));
            }
        }
        v
    }

    /// Inverse of [`CMatrix::vec_col_major`].
    pub fn from_vec_col_major(rows: usize, cols: usize, v: &[Complex<T>]) -> Self {
        assert_eq!(v.len(), rows * cols, "buffer length must match shape");
        Self::from_fn(rows, cols, |i, j| v[j * rows + i])
    }

    /// Real parts as an [`RMatrix`].
    pub fn real_part(&self) -> RMatrix<T> {
        RMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|v| v.re).collect(),
        }
    }

    /// Number of entries that are exactly zero in both parts.
    pub fn count_nonzero(&self) -> usize {
        self.data
            .iter()
            .filter(|v| !(v.re.is_zero() && v.im.is_zero()))
            .count()
    }
}

impl<T: Real> RMatrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![T::zero(); rows * cols],
        }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> T {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: T) {
        self.data[i * self.cols + j] = v;
    }

    pub fn data(&self) -> &[T] {
        &self.data
    }

    pub fn matmul(&self, rhs: &Self) -> Self {
        assert_eq!(self.cols, rhs.rows, "matmul shape mismatch");
        let (m, inner, n) = (self.rows, self.cols, rhs.cols);
        let mut out = vec![T::zero(); m * n];
        for i in 0..m {
            let arow = &self.data[i * inner..(i + 1) * inner];
            let orow = &mut out[i * n..(i + 1) * n];
            for (k, &aik) in arow.iter().enumerate() {
                if aik.is_zero() {
                    continue;
                }
                let brow = &rhs.data[k * n..(k + 1) * n];
                for (o, &b) in orow.iter_mut().zip(brow.iter()) {
                    *o += aik * b;
                }
            }
        }
        Self {
            rows: m,
            cols: n,
            data: out,
        }
    }

    /// Matrix-vector product.
    pub fn matvec(&self, x: &[T]) -> Vec<T> {
        assert_eq!(x.len(), self.cols, "matvec shape mismatch");
        let mut out = vec![T::zero(); self.rows];
        for (i, o) in out.iter_mut().enumerate() {
            let row = &self.data[i * self.cols..(i + 1) * self.cols];
            *o = row.iter().zip(x.iter()).map(|(&a, &b)| a * b).sum();
        }
        out
    }

    pub fn scale(&self, s: T) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&v| v * s).collect(),
        }
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i))
    }

    pub fn frobenius_norm(&self) -> T {
        self.data
            .iter()
            .map(|&v| v * v)
            .fold(T::zero(), |a, b| a + b)
            .sqrt()
    }

    pub fn max_abs(&self) -> T {
        self.data
            .iter()
            .map(|v| v.abs())
            .fold(T::zero(), |a, b| if b > a { b } else { a })
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }
}

/// Default absolute tolerance for accepting a matrix as Hermitian.
pub const HERMITIAN_TOLERANCE: f64 = 1e-12;

/// Complex matrix guaranteed to satisfy `a_ij = conj(a_ji)` exactly, with a
/// real diagonal.
///
/// Construction either validates (ingested data must already be conjugate
/// symmetric within [`HERMITIAN_TOLERANCE`], then gets the residual averaged
/// away) or force-symmetrizes (for products that are Hermitian by
/// construction, where accumulated rounding may exceed the strict absolute
/// gate without indicating a caller bug).
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianMatrix<T> {
    mat: CMatrix<T>,
}

impl<T: Real> HermitianMatrix<T> {
    /// Validates conjugate symmetry within `tolerance`, then stores the
    /// exactly symmetrized matrix `(A + A^H) / 2`.
    pub fn new(mat: CMatrix<T>, tolerance: T) -> Result<Self> {
        if !mat.is_square() {
            return Err(CoreError::DimensionMismatch {
                context: "HermitianMatrix::new",
                expected: "square matrix".into(),
                found: format!("{}x{}", mat.rows(), mat.cols()),
            });
        }
        if !mat.is_finite() {
            return Err(CoreError::NonFiniteInput(
                "HermitianMatrix::new received NaN or infinite entries".into(),
            ));
        }
        let err = mat.hermitian_error();
        if err > tolerance {
            return Err(CoreError::NotHermitian {
                max_asymmetry: err.to_f64_lossy(),
                tolerance: tolerance.to_f64_lossy(),
            });
        }
        Ok(Self::symmetrize(mat))
    }

    /// [`HermitianMatrix::new`] with the default tolerance.
    pub fn from_matrix(mat: CMatrix<T>) -> Result<Self> {
        let tol = fl(HERMITIAN_TOLERANCE);
        Self::new(mat, tol)
    }

    /// Forces `(A + A^H) / 2` without a symmetry gate. Intended for matrices
    /// that are Hermitian in exact arithmetic (quadratic forms, averaged
    /// outer products) where rounding is the only source of asymmetry.
    pub fn symmetrize(mat: CMatrix<T>) -> Self {
        assert!(mat.is_square(), "symmetrize requires a square matrix");
        let p = mat.rows();
        let half = fl::<T>(0.5);
        let mut out = CMatrix::zeros(p, p);
        for i in 0..p {
            out.set(i, i, Complex::new(mat.get(i, i).re, T::zero()));
            for j in (i + 1)..p {
                let v = (mat.get(i, j) + mat.get(j, i).conj()) * half;
                out.set(i, j, v);
                out.set(j, i, v.conj());
            }
        }
        Self { mat: out }
    }

    /// Builds an exactly Hermitian matrix from its upper triangle: `f(i, j)`
    /// is consulted for `i <= j`, the diagonal keeps only its real part, and
    /// the lower triangle is the conjugate mirror.
    pub fn from_upper(p: usize, mut f: impl FnMut(usize, usize) -> Complex<T>) -> Self {
        let mut out = CMatrix::zeros(p, p);
        for i in 0..p {
            out.set(i, i, Complex::new(f(i, i).re, T::zero()));
            for j in (i + 1)..p {
                let v = f(i, j);
                out.set(i, j, v);
                out.set(j, i, v.conj());
            }
        }
        Self { mat: out }
    }

    /// Embeds a real symmetric matrix (symmetry forced by averaging).
    pub fn from_real_symmetric(r: &RMatrix<T>) -> Self {
        Self::symmetrize(CMatrix::from_real(r))
    }

    pub fn dim(&self) -> usize {
        self.mat.rows()
    }

    pub fn as_matrix(&self) -> &CMatrix<T> {
        &self.mat
    }

    pub fn into_matrix(self) -> CMatrix<T> {
        self.mat
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex<T> {
        self.mat.get(i, j)
    }

    /// Unitary eigendecomposition with eigenvalues sorted descending.
    pub fn eigendecompose(&self) -> Result<EigenFactorization<T>> {
        eigen::jacobi_hermitian(&self.mat)
    }

    /// Smallest eigenvalue.
    pub fn min_eigenvalue(&self) -> Result<T> {
        let f = self.eigendecompose()?;
        Ok(*f.eigenvalues.last().expect("non-empty spectrum"))
    }

    /// Cheap positive-definiteness probe: succeeds iff `A + shift * I` has a
    /// Cholesky factorization. Pass a negative shift to require
    /// `min_eig > -shift`, a positive one to tolerate slightly negative
    /// rounding-level eigenvalues.
    pub fn is_positive_definite_shifted(&self, shift: T) -> bool {
        let p = self.dim();
        let mut shifted = self.mat.clone();
        for i in 0..p {
            let d = shifted.get(i, i);
            shifted.set(i, i, Complex::new(d.re + shift, T::zero()));
        }
        chol::cholesky_lower(&shifted).is_ok()
    }

    /// Cholesky factor `L` with `A = L L^H`.
    pub fn cholesky(&self) -> Result<CMatrix<T>> {
        chol::cholesky_lower(&self.mat)
    }
}

/// Unitary eigendecomposition `A = Q diag(d) Q^H` of a Hermitian matrix.
///
/// Invariants: `Q` unitary to working precision, eigenvalues real and sorted
/// in descending order, reconstruction accurate to a small multiple of
/// machine epsilon relative to `||A||`.
#[derive(Clone, Debug)]
pub struct EigenFactorization<T> {
    /// Eigenvector matrix, one eigenvector per column.
    pub q: CMatrix<T>,
    /// Eigenvalues, descending.
    pub eigenvalues: Vec<T>,
}

impl<T: Real> EigenFactorization<T> {
    /// `Q diag(d) Q^H`, for verification.
    pub fn reconstruct(&self) -> CMatrix<T> {
        let p = self.q.rows();
        let mut qd = self.q.clone();
        for j in 0..p {
            let d = self.eigenvalues[j];
            for i in 0..p {
                qd.set(i, j, qd.get(i, j) * d);
            }
        }
        qd.matmul(&self.q.adjoint())
    }

    /// `||Q^H Q - I||_F`, for verification.
    pub fn unitary_error(&self) -> T {
        let p = self.q.rows();
        self.q
            .adjoint()
            .matmul(&self.q)
            .sub(&CMatrix::identity(p))
            .frobenius_norm()
    }

    pub fn max_eigenvalue(&self) -> T {
        self.eigenvalues[0]
    }

    pub fn min_eigenvalue(&self) -> T {
        *self.eigenvalues.last().expect("non-empty spectrum")
    }
}
