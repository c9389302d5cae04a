//! Positive-definiteness probe for the reduced mass matrix.

use super::matrix::DenseMatrix;

/// Pivots at or below this multiple of `dim * max_diag` count as zero.
const PIVOT_RTOL: f64 = 1e-14;

/// Attempts a Cholesky factorization of a Hermitian matrix and reports
/// whether every pivot is positive.
///
/// A pivot is treated as positive only if it exceeds
/// `dim * 1e-14 * max_diag`; a literal `> 0` test would accept pivots that
/// are pure rounding noise on exactly singular Gram matrices.
pub fn cholesky_posdef_check(b: &DenseMatrix) -> bool {
    let n = b.rows();
    if n != b.cols() || n == 0 {
        return false;
    }
    let max_diag = (0..n).map(|i| b[(i, i)].re).fold(0.0f64, f64::max);
    if max_diag <= 0.0 {
        return false;
    }
    let floor = PIVOT_RTOL * n as f64 * max_diag;
    let mut l = DenseMatrix::zeros(n, n);
    for j in 0..n {
        let mut d = b[(j, j)].re;
        for k in 0..j {
            d -= l[(j, k)].norm_sqr();
        }
        if !(d > floor) {
            return false;
        }
        let djj = d.sqrt();
        l[(j, j)] = djj.into();
        for i in j + 1..n {
            let mut s = b[(i, j)];
            for k in 0..j {
                s -= l[(i, k)] * l[(j, k)].conj();
            }
            l[(i, j)] = s / djj;
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64 as C64;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn identity_passes() {
        assert!(cholesky_posdef_check(&DenseMatrix::identity(3)));
    }

    #[test]
    fn zero_pivot_fails() {
        assert!(!cholesky_posdef_check(&DenseMatrix::from_diag(&[1.0, 0.0])));
    }

    #[test]
    fn rank_deficient_gram_fails() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let v = DenseMatrix::from_fn(3, 5, |_, _| {
            C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
        });
        let gram = v.adjoint_mul(&v);
        assert!(!cholesky_posdef_check(&gram));
    }

    #[test]
    fn full_rank_gram_passes() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let v = DenseMatrix::from_fn(8, 5, |_, _| C64::new(rng.random_range(-1.0..1.0), 0.0));
        assert!(cholesky_posdef_check(&v.adjoint_mul(&v)));
    }
}
