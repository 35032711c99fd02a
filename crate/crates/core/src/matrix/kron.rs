//! Dense Kronecker-product reference solver.
//!
//! The per-frequency subproblem `S_x D S_y + (rho/2) D = C` vectorizes (with
//! column-major stacking) to
//!
//! `(S_y^T kron S_x + (rho/2) I) vec(D) = vec(C)`,
//!
//! and `S_y^T = conj(S_y)` because `S_y` is Hermitian. This module builds
//! that p^2 x p^2 system explicitly and solves it by LU. It exists purely as
//! an independent cross-check for the fast eigenbasis update, so it is
//! restricted to small dimensions and verifies its own residual before
//! returning.

use num_complex::Complex;

use crate::error::{CoreError, Result};
use crate::matrix::{lu_solve, CMatrix, HermitianMatrix};
use crate::scalar::Real;

/// Kronecker product `a kron b`.
pub fn kron<T: Real>(a: &CMatrix<T>, b: &CMatrix<T>) -> CMatrix<T> {
    let (ar, ac) = (a.rows(), a.cols());
    let (br, bc) = (b.rows(), b.cols());
    CMatrix::from_fn(ar * br, ac * bc, |i, j| {
        a.get(i / br, j / bc) * b.get(i % br, j % bc)
    })
}

/// Solves `S_x D S_y + (rho/2) D = rhs` through the explicit Kronecker
/// system. Restricted to `p <= 8`; the solution's residual in the original
/// matrix equation must be below `1e-10` relative to `||rhs||` or an error
/// is returned instead of an untrustworthy oracle value.
pub fn kronecker_solve_oracle<T: Real>(
    sx: &HermitianMatrix<T>,
    sy: &HermitianMatrix<T>,
    rhs: &CMatrix<T>,
    rho: T,
) -> Result<CMatrix<T>> {
    let p = sx.dim();
    if p > 8 {
        return Err(CoreError::InvalidArgument(format!(
            "kronecker_solve_oracle is a reference path for p <= 8, got p = {p}"
        )));
    }
    if sy.dim() != p || rhs.rows() != p || rhs.cols() != p {
        return Err(CoreError::DimensionMismatch {
            context: "kronecker_solve_oracle",
            expected: format!("{p}x{p} operands"),
            found: format!(
                "sy {}x{}, rhs {}x{}",
                sy.dim(),
                sy.dim(),
                rhs.rows(),
                rhs.cols()
            ),
        });
    }
    let half_rho = rho / (T::one() + T::one());
    let mut system = kron(&sy.as_matrix().conj(), sx.as_matrix());
    for i in 0..p * p {
        let d = system.get(i, i);
        system.set(i, i, d + Complex::new(half_rho, T::zero()));
    }
    let b = CMatrix::from_buffer(p * p, 1, rhs.vec_col_major());
    let x = lu_solve(&system, &b)?;
    let solution = CMatrix::from_vec_col_major(p, p, x.data());

    // Verify in the original (un-vectorized) equation.
    let residual = sx
        .as_matrix()
        .matmul(&solution)
        .matmul(sy.as_matrix())
        .add(&solution.scale(half_rho))
        .sub(rhs)
        .frobenius_norm();
    let scale = rhs.frobenius_norm();
    let rel = if scale.is_zero() { residual } else { residual / scale };
    let tol = T::from_f64_lossy(1e-10);
    if rel > tol {
        return Err(CoreError::OracleResidual {
            residual: rel.to_f64_lossy(),
            tolerance: 1e-10,
        });
    }
    Ok(solution)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::testutil::{random_cmatrix, random_hpd};
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    #[test]
    fn kron_matches_hand_example() {
        // [[1, 2], [3, 4]] kron [[0, 1], [1, 0]]
        let a = CMatrix::from_fn(2, 2, |i, j| Complex::new((1 + 2 * i + j) as f64, 0.0));
        let b = CMatrix::from_fn(2, 2, |i, j| Complex::new(if i == j { 0.0 } else { 1.0 }, 0.0));
        let k = kron(&a, &b);
        assert_eq!(k.rows(), 4);
        assert_eq!(k.get(0, 1).re, 1.0);
        assert_eq!(k.get(0, 3).re, 2.0);
        assert_eq!(k.get(3, 0).re, 3.0);
        assert_eq!(k.get(2, 1).re, 3.0);
        assert_eq!(k.get(2, 0).re, 0.0);
    }

    #[test]
    fn kron_respects_vec_identity() {
        // vec(A X B) = (B^T kron A) vec(X) with column-major vec.
        let mut rng = ChaCha20Rng::seed_from_u64(6);
        let a = random_cmatrix::<f64, _>(3, 3, &mut rng);
        let x = random_cmatrix::<f64, _>(3, 3, &mut rng);
        let b = random_cmatrix::<f64, _>(3, 3, &mut rng);
        let lhs = a.matmul(&x).matmul(&b).vec_col_major();
        let rhs = kron(&b.transpose(), &a)
            .matmul(&CMatrix::from_buffer(9, 1, x.vec_col_major()));
        for (l, r) in lhs.iter().zip(rhs.data().iter()) {
            assert!((l - r).norm() < 1e-12);
        }
    }

    #[test]
    fn oracle_satisfies_matrix_equation() {
        let mut rng = ChaCha20Rng::seed_from_u64(7);
        let sx = random_hpd::<f64, _>(4, 0.3, &mut rng);
        let sy = random_hpd::<f64, _>(4, 0.3, &mut rng);
        let rhs = random_cmatrix::<f64, _>(4, 4, &mut rng);
        let d = kronecker_solve_oracle(&sx, &sy, &rhs, 2.0).unwrap();
        let lhs = sx
            .as_matrix()
            .matmul(&d)
            .matmul(sy.as_matrix())
            .add(&d.scale(1.0));
        assert!(lhs.sub(&rhs).frobenius_norm() / rhs.frobenius_norm() < 1e-11);
    }

    #[test]
    fn oracle_rejects_large_dimensions() {
        let mut rng = ChaCha20Rng::seed_from_u64(8);
        let sx = random_hpd::<f64, _>(9, 0.3, &mut rng);
        let sy = random_hpd::<f64, _>(9, 0.3, &mut rng);
        let rhs = random_cmatrix::<f64, _>(9, 9, &mut rng);
        assert!(matches!(
            kronecker_solve_oracle(&sx, &sy, &rhs, 2.0),
            Err(CoreError::InvalidArgument(_))
        ));
    }
}
