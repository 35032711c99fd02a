//! LU factorization with partial pivoting for complex dense systems.
//!
//! Used for general square solves where no structure is available: the
//! Kronecker reference system, transfer-function inversion when evaluating
//! model spectra, and precision-matrix inversion during synthetic model
//! construction.

use num_complex::Complex;

use crate::error::{CoreError, Result};
use crate::matrix::CMatrix;
use crate::scalar::{fl, Real};

struct LuFactors<T> {
    lu: Vec<Complex<T>>,
    pivots: Vec<usize>,
    n: usize,
}

fn factor<T: Real>(a: &CMatrix<T>, context: &'static str) -> Result<LuFactors<T>> {
    assert!(a.is_square(), "LU requires a square matrix");
    let n = a.rows();
    let mut lu = a.data().to_vec();
    let mut pivots = Vec::with_capacity(n);
    // Relative singularity threshold: pivots this small leave no trustworthy
    // digits at working precision.
    let threshold = a.max_abs() * T::epsilon() * fl((n.max(1)) as f64);

    for col in 0..n {
        let mut best = col;
        let mut best_mag = lu[col * n + col].norm_sqr();
        for r in (col + 1)..n {
            let mag = lu[r * n + col].norm_sqr();
            if mag > best_mag {
                best_mag = mag;
                best = r;
            }
        }
        let pivot_mag = best_mag.sqrt();
        if pivot_mag <= threshold {
            return Err(CoreError::SingularMatrix {
                context,
                pivot: pivot_mag.to_f64_lossy(),
                threshold: threshold.to_f64_lossy(),
            });
        }
        if best != col {
            for j in 0..n {
                lu.swap(col * n + j, best * n + j);
            }
        }
        pivots.push(best);
        let pivot = lu[col * n + col];
        for r in (col + 1)..n {
            let factor = lu[r * n + col] / pivot;
            lu[r * n + col] = factor;
            if factor.re.is_zero() && factor.im.is_zero() {
                continue;
            }
            let (upper, lower) = lu.split_at_mut(r * n);
            let src = &upper[col * n + col + 1..col * n + n];
            let dst = &mut lower[col + 1..n];
            for (d, &u) in dst.iter_mut().zip(src.iter()) {
                *d = *d - factor * u;
            }
        }
    }
    Ok(LuFactors { lu, pivots, n })
}

fn solve_in_place<T: Real>(f: &LuFactors<T>, b: &mut CMatrix<T>) {
    let n = f.n;
    let m = b.cols();
    for (col, &piv) in f.pivots.iter().enumerate() {
        if piv != col {
            for j in 0..m {
                let x = b.get(col, j);
                let y = b.get(piv, j);
                b.set(col, j, y);
                b.set(piv, j, x);
            }
        }
    }
    // Forward: L y = P b (unit lower triangle).
    for r in 1..n {
        for k in 0..r {
            let l = f.lu[r * n + k];
            if l.re.is_zero() && l.im.is_zero() {
                continue;
            }
            for j in 0..m {
                let v = b.get(r, j) - l * b.get(k, j);
                b.set(r, j, v);
            }
        }
    }
    // Backward: U x = y.
    for r in (0..n).rev() {
        for k in (r + 1)..n {
            let u = f.lu[r * n + k];
            if u.re.is_zero() && u.im.is_zero() {
                continue;
            }
            for j in 0..m {
                let v = b.get(r, j) - u * b.get(k, j);
                b.set(r, j, v);
            }
        }
        let d = f.lu[r * n + r];
        for j in 0..m {
            b.set(r, j, b.get(r, j) / d);
        }
    }
}

/// Solves `A X = B` by LU with partial pivoting.
pub fn lu_solve<T: Real>(a: &CMatrix<T>, b: &CMatrix<T>) -> Result<CMatrix<T>> {
    if a.rows() != b.rows() {
        return Err(CoreError::DimensionMismatch {
            context: "lu_solve",
            expected: format!("rhs with {} rows", a.rows()),
            found: format!("{} rows", b.rows()),
        });
    }
    let f = factor(a, "lu_solve")?;
    let mut x = b.clone();
    solve_in_place(&f, &mut x);
    Ok(x)
}

/// Matrix inverse by LU with partial pivoting.
pub fn lu_inverse<T: Real>(a: &CMatrix<T>) -> Result<CMatrix<T>> {
    let f = factor(a, "lu_inverse")?;
    let mut x = CMatrix::identity(a.rows());
    solve_in_place(&f, &mut x);
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::testutil::random_cmatrix;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    #[test]
    fn solve_recovers_known_solution() {
        let mut rng = ChaCha20Rng::seed_from_u64(3);
        for &n in &[1usize, 2, 5, 12] {
            let a = random_cmatrix::<f64, _>(n, n, &mut rng);
            let x_true = random_cmatrix::<f64, _>(n, 3, &mut rng);
            let b = a.matmul(&x_true);
            let x = lu_solve(&a, &b).unwrap();
            let err = x.sub(&x_true).frobenius_norm() / x_true.frobenius_norm();
            assert!(err < 1e-10, "n = {n}: relative error {err:.3e}");
        }
    }

    #[test]
    fn inverse_times_original_is_identity() {
        let mut rng = ChaCha20Rng::seed_from_u64(4);
        let a = random_cmatrix::<f64, _>(8, 8, &mut rng);
        let inv = lu_inverse(&a).unwrap();
        let err = a
            .matmul(&inv)
            .sub(&CMatrix::identity(8))
            .frobenius_norm();
        assert!(err < 1e-10, "identity residual {err:.3e}");
    }

    #[test]
    fn singular_matrix_is_reported() {
        let a = CMatrix::from_fn(2, 2, |i, _| {
            Complex::new(if i == 0 { 1.0 } else { 2.0 }, 0.0)
        });
        assert!(matches!(
            lu_inverse(&a),
            Err(CoreError::SingularMatrix { .. })
        ));
    }

    use num_complex::Complex;
}
