//! Cholesky factorization for Hermitian positive-definite matrices.
//!
//! Serves two roles: a fast definiteness probe (a failed pivot localizes the
//! violation) and the sampling transform for correlated Gaussian innovations
//! in the synthetic generators.

use num_complex::Complex;

use crate::error::{CoreError, Result};
use crate::matrix::CMatrix;
use crate::scalar::Real;

/// Lower-triangular factor `L` with `A = L L^H`.
///
/// Only the lower triangle of `A` is read. Fails with the offending pivot
/// index and value when the matrix is not positive definite.
pub fn cholesky_lower<T: Real>(a: &CMatrix<T>) -> Result<CMatrix<T>> {
    assert!(a.is_square(), "cholesky requires a square matrix");
    let n = a.rows();
    let mut l = CMatrix::<T>::zeros(n, n);
    for j in 0..n {
        let mut d = a.get(j, j).re;
        for k in 0..j {
            d = d - l.get(j, k).norm_sqr();
        }
        if !(d > T::zero()) || !d.is_finite() {
            return Err(CoreError::NotPositiveDefinite {
                pivot: j,
                value: d.to_f64_lossy(),
            });
        }
        let djj = d.sqrt();
        l.set(j, j, Complex::new(djj, T::zero()));
        for i in (j + 1)..n {
            let mut s = a.get(i, j);
            for k in 0..j {
                s = s - l.get(i, k) * l.get(j, k).conj();
            }
            l.set(i, j, s / djj);
        }
    }
    Ok(l)
}
