//! Cyclic Jacobi eigensolver for Hermitian matrices.
//!
//! Each rotation annihilates one off-diagonal pair with a complex Givens
//! rotation `U = P(phi) R(theta)`: the phase factor rotates the pivot entry
//! onto the real axis, and the real Jacobi angle then zeroes it. Sweeps run
//! row by row until the off-diagonal Frobenius mass falls to rounding level.
//! Jacobi converges unconditionally on Hermitian input and delivers small
//! relative errors, which is what the downstream solver cross-checks demand;
//! cubic cost per sweep is acceptable at the dimensions used here.

use num_complex::Complex;
use num_traits::Zero;

use crate::error::{CoreError, Result};
use crate::matrix::{CMatrix, EigenFactorization};
use crate::scalar::{fl, Real};

const MAX_SWEEPS: usize = 60;

/// Off-diagonal Frobenius mass `sqrt(2 sum_{i<j} |a_ij|^2)`.
fn off_norm<T: Real>(a: &CMatrix<T>) -> T {
    let p = a.rows();
    let mut acc = T::zero();
    for i in 0..p {
        for j in (i + 1)..p {
            acc += a.get(i, j).norm_sqr();
        }
    }
    (acc + acc).sqrt()
}

/// Eigendecomposition of a Hermitian matrix; eigenvalues descending.
///
/// The input must be exactly Hermitian (as produced by
/// [`crate::matrix::HermitianMatrix`]); only its upper triangle influences
/// the rotations, and diagonals are maintained as reals throughout.
pub(super) fn jacobi_hermitian<T: Real>(a: &CMatrix<T>) -> Result<EigenFactorization<T>> {
    let p = a.rows();
    debug_assert!(a.is_square());
    if p == 0 {
        return Ok(EigenFactorization {
            q: CMatrix::zeros(0, 0),
            eigenvalues: Vec::new(),
        });
    }

    let mut m = a.clone();
    let mut q = CMatrix::<T>::identity(p);
    let scale = m.frobenius_norm();
    if scale.is_zero() {
        return Ok(EigenFactorization {
            q,
            eigenvalues: vec![T::zero(); p],
        });
    }
    // Rounding-level target: reconstruction error is bounded by the residual
    // off-diagonal mass, so stopping at a small multiple of eps * ||A||
    // leaves the factorization accurate to working precision.
    let tol = T::epsilon() * scale * fl(p as f64);

    let mut converged = false;
    for _ in 0..MAX_SWEEPS {
        if off_norm(&m) <= tol {
            converged = true;
            break;
        }
        for i in 0..p.saturating_sub(1) {
            for j in (i + 1)..p {
                let b = m.get(i, j);
                let absb = b.norm();
                if absb.is_zero() {
                    continue;
                }
                let phase = b / absb; // e^{i phi}
                let aii = m.get(i, i).re;
                let ajj = m.get(j, j).re;
                let theta = (ajj - aii) / (absb + absb);
                let t = if theta >= T::zero() {
                    T::one() / (theta + (theta * theta + T::one()).sqrt())
                } else {
                    -T::one() / (-theta + (theta * theta + T::one()).sqrt())
                };
                let c = T::one() / (t * t + T::one()).sqrt();
                let s = t * c;
                // U = [[c, s], [-s * conj(phase), c * conj(phase)]] acts on
                // columns (i, j); U^H acts on rows (i, j).
                let u10 = phase.conj() * (-s);
                let u11 = phase.conj() * c;
                for r in 0..p {
                    let x = m.get(r, i);
                    let y = m.get(r, j);
                    m.set(r, i, x * c + y * u10);
                    m.set(r, j, x * s + y * u11);
                }
                let u10c = u10.conj();
                let u11c = u11.conj();
                for col in 0..p {
                    let x = m.get(i, col);
                    let y = m.get(j, col);
                    m.set(i, col, x * c + y * u10c);
                    m.set(j, col, x * s + y * u11c);
                }
                // The transformed 2x2 block is known in closed form; writing
                // it directly avoids cancellation in the rotated diagonal.
                m.set(i, i, Complex::new(aii - t * absb, T::zero()));
                m.set(j, j, Complex::new(ajj + t * absb, T::zero()));
                m.set(i, j, Complex::zero());
                m.set(j, i, Complex::zero());
                for r in 0..p {
                    let x = q.get(r, i);
                    let y = q.get(r, j);
                    q.set(r, i, x * c + y * u10);
                    q.set(r, j, x * s + y * u11);
                }
            }
        }
    }
    if !converged && off_norm(&m) > tol {
        return Err(CoreError::EigenNonConvergence {
            dim: p,
            sweeps: MAX_SWEEPS,
        });
    }

    let mut order: Vec<usize> = (0..p).collect();
    let diag: Vec<T> = (0..p).map(|i| m.get(i, i).re).collect();
    order.sort_by(|&x, &y| diag[y].partial_cmp(&diag[x]).expect("finite eigenvalues"));
    let eigenvalues: Vec<T> = order.iter().map(|&k| diag[k]).collect();
    let q_sorted = CMatrix::from_fn(p, p, |i, j| q.get(i, order[j]));
    Ok(EigenFactorization {
        q: q_sorted,
        eigenvalues,
    })
}

#[cfg(test)]
mod tests {
    use crate::matrix::testutil::random_hpd;
    use crate::matrix::{CMatrix, HermitianMatrix};
    use num_complex::Complex;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    #[test]
    fn diagonalizes_a_known_two_by_two() {
        // [[2, i], [-i, 2]] has eigenvalues 3 and 1.
        let m = HermitianMatrix::<f64>::from_upper(2, |i, j| {
            if i == j {
                Complex::new(2.0, 0.0)
            } else {
                Complex::new(0.0, 1.0)
            }
        });
        let f = m.eigendecompose().unwrap();
        assert!((f.eigenvalues[0] - 3.0).abs() < 1e-12);
        assert!((f.eigenvalues[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn reconstruction_and_unitarity_hold_on_random_input() {
        let mut rng = ChaCha20Rng::seed_from_u64(11);
        for &p in &[1usize, 2, 3, 7, 20] {
            let h = random_hpd::<f64, _>(p, 0.5, &mut rng);
            let f = h.eigendecompose().unwrap();
            let scale = h.as_matrix().frobenius_norm();
            let recon_err = f.reconstruct().sub(h.as_matrix()).frobenius_norm();
            assert!(
                recon_err <= 1e-10 * scale.max(1.0),
                "p = {p}: reconstruction error {recon_err:.3e}"
            );
            assert!(
                f.unitary_error() <= 1e-10,
                "p = {p}: unitary error {:.3e}",
                f.unitary_error()
            );
            for w in f.eigenvalues.windows(2) {
                assert!(w[0] >= w[1], "eigenvalues must be sorted descending");
            }
        }
    }

    #[test]
    fn handles_zero_and_identity() {
        let z = HermitianMatrix::from_matrix(CMatrix::<f64>::zeros(3, 3)).unwrap();
        let f = z.eigendecompose().unwrap();
        assert_eq!(f.eigenvalues, vec![0.0; 3]);
        assert!(f.unitary_error() < 1e-14);

        let id = HermitianMatrix::from_matrix(CMatrix::<f64>::identity(4)).unwrap();
        let f = id.eigendecompose().unwrap();
        assert_eq!(f.eigenvalues, vec![1.0; 4]);
    }

    #[test]
    fn rotates_zero_diagonal_pivots() {
        // [[0, 1], [1, 0]]: eigenvalues +1 and -1; exercises theta = 0.
        let m = HermitianMatrix::<f64>::from_upper(2, |i, j| {
            if i == j {
                Complex::new(0.0, 0.0)
            } else {
                Complex::new(1.0, 0.0)
            }
        });
        let f = m.eigendecompose().unwrap();
        assert!((f.eigenvalues[0] - 1.0).abs() < 1e-14);
        assert!((f.eigenvalues[1] + 1.0).abs() < 1e-14);
    }

    #[test]
    fn indefinite_spectra_are_supported() {
        let mut rng = ChaCha20Rng::seed_from_u64(12);
        let a = crate::matrix::testutil::random_cmatrix::<f64, _>(6, 6, &mut rng);
        let h = HermitianMatrix::symmetrize(a); // indefinite in general
        let f = h.eigendecompose().unwrap();
        let scale = h.as_matrix().frobenius_norm().max(1.0);
        assert!(f.reconstruct().sub(h.as_matrix()).frobenius_norm() <= 1e-10 * scale);
        assert!(f.eigenvalues.iter().any(|&d| d < 0.0));
    }
}
