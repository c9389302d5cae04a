//! Thin QR, one-sided Jacobi SVD, rank revelation and canonical angles.

use num_complex::Complex64 as C64;

use super::matrix::{dot, norm2, DenseMatrix};
use super::DenseError;

const MAX_SWEEPS: usize = 60;

/// Thin Householder QR of a tall matrix: `X = Q R`, `Q` is `n x k` with
/// orthonormal columns and `R` is `k x k` upper triangular.
pub fn thin_qr(x: &DenseMatrix) -> (DenseMatrix, DenseMatrix) {
    let n = x.rows();
    let k = x.cols();
    assert!(n >= k, "thin_qr needs rows >= cols");
    let mut a = x.clone();
    let mut reflectors: Vec<Vec<C64>> = Vec::with_capacity(k);

    for j in 0..k {
        let col = &a.col(j)[j..];
        let alpha_norm = norm2(col);
        let mut v: Vec<C64> = col.to_vec();
        if alpha_norm == 0.0 {
            reflectors.push(Vec::new());
            continue;
        }
        let x0 = v[0];
        let phase = if x0.norm() == 0.0 {
            C64::new(1.0, 0.0)
        } else {
            x0 / x0.norm()
        };
        let alpha = -phase * alpha_norm;
        v[0] -= alpha;
        let vn = norm2(&v);
        if vn == 0.0 {
            reflectors.push(Vec::new());
            continue;
        }
        for z in &mut v {
            *z /= vn;
        }
        for c in j..k {
            let target = &mut a.col_mut(c)[j..];
            let proj = dot(&v, target) * 2.0;
            for (t, vi) in target.iter_mut().zip(&v) {
                *t -= proj * vi;
            }
        }
        reflectors.push(v);
    }

    let r = DenseMatrix::from_fn(k, k, |i, j| {
        if i <= j {
            a[(i, j)]
        } else {
            C64::new(0.0, 0.0)
        }
    });
    let mut q = DenseMatrix::from_fn(n, k, |i, j| {
        if i == j {
            C64::new(1.0, 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    });
    for j in (0..k).rev() {
        let v = &reflectors[j];
        if v.is_empty() {
            continue;
        }
        for c in 0..k {
            let target = &mut q.col_mut(c)[j..];
            let proj = dot(v, target) * 2.0;
            for (t, vi) in target.iter_mut().zip(v) {
                *t -= proj * vi;
            }
        }
    }
    (q, r)
}

/// Singular value decomposition `G = U Σ V^H` of a matrix with at least as
/// many rows as columns. Singular values descend.
#[derive(Debug, Clone)]
pub struct Svd {
    pub u: DenseMatrix,
    pub singular_values: Vec<f64>,
    pub v: DenseMatrix,
}

/// One-sided (Hestenes) Jacobi SVD.
///
/// Columns of zero norm produce zero columns in `u`.
pub fn jacobi_svd(g: &DenseMatrix) -> Result<Svd, DenseError> {
    let k = g.cols();
    if g.rows() < k {
        return Err(DenseError::DimensionMismatch {
            expected: k,
            got: g.rows(),
        });
    }
    let mut w = g.clone();
    let mut v = DenseMatrix::identity(k);
    let tol = f64::EPSILON * 4.0;
    let mut converged = k < 2;
    for _ in 0..MAX_SWEEPS {
        if converged {
            break;
        }
        let mut rotated = false;
        for p in 0..k - 1 {
            for q in p + 1..k {
                let alpha = norm2(w.col(p)).powi(2);
                let beta = norm2(w.col(q)).powi(2);
                let gamma = dot(w.col(p), w.col(q));
                let gm = gamma.norm();
                if gm == 0.0 || gm <= tol * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let phase = gamma / gm;
                let zeta = (beta - alpha) / (2.0 * gm);
                let t = if zeta >= 0.0 {
                    1.0 / (zeta + (1.0 + zeta * zeta).sqrt())
                } else {
                    -1.0 / (-zeta + (1.0 + zeta * zeta).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                let em = phase.conj();
                apply_pair(&mut w, p, q, c, s, em);
                apply_pair(&mut v, p, q, c, s, em);
            }
        }
        converged = !rotated;
    }
    if !converged {
        return Err(DenseError::NoConvergence {
            iterations: MAX_SWEEPS,
        });
    }

    let norms: Vec<f64> = (0..k).map(|j| norm2(w.col(j))).collect();
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| norms[b].total_cmp(&norms[a]).then(a.cmp(&b)));
    let mut u = w.select_columns(&order);
    let singular_values: Vec<f64> = order.iter().map(|&j| norms[j]).collect();
    for (j, &s) in singular_values.iter().enumerate() {
        if s > 0.0 {
            for z in u.col_mut(j) {
                *z /= s;
            }
        }
    }
    Ok(Svd {
        u,
        singular_values,
        v: v.select_columns(&order),
    })
}

// [x_p, x_q] <- [c x_p - s e^{-iφ} x_q, s x_p + c e^{-iφ} x_q]
fn apply_pair(m: &mut DenseMatrix, p: usize, q: usize, c: f64, s: f64, em: C64) {
    let (cp, cq) = m.col_pair_mut(p, q);
    for (xp, xq) in cp.iter_mut().zip(cq.iter_mut()) {
        let a = *xp;
        let b = *xq * em;
        *xp = a * c - b * s;
        *xq = a * s + b * c;
    }
}

/// SVD of a tall matrix via QR followed by Jacobi on the triangular factor.
pub fn thin_svd(x: &DenseMatrix) -> Result<Svd, DenseError> {
    let (q, r) = thin_qr(x);
    let inner = jacobi_svd(&r)?;
    Ok(Svd {
        u: q.matmul(&inner.u),
        singular_values: inner.singular_values,
        v: inner.v,
    })
}

/// Orthonormal basis of the numerical column space of a tall matrix.
#[derive(Debug, Clone)]
pub struct RankRevealed {
    /// `n x rank`, orthonormal.
    pub basis: DenseMatrix,
    pub rank: usize,
    pub singular_values: Vec<f64>,
}

/// Keeps the left singular vectors whose singular values exceed
/// `tol * σ_max`.
pub fn rank_revealing_basis(u: &DenseMatrix, tol: f64) -> Result<RankRevealed, DenseError> {
    if u.rows() < u.cols() {
        return Err(DenseError::DimensionMismatch {
            expected: u.cols(),
            got: u.rows(),
        });
    }
    let svd = thin_svd(u)?;
    let smax = svd.singular_values.first().copied().unwrap_or(0.0);
    if smax == 0.0 {
        return Err(DenseError::ZeroMatrix);
    }
    let rank = svd
        .singular_values
        .iter()
        .take_while(|&&s| s > tol * smax)
        .count();
    let keep: Vec<usize> = (0..rank).collect();
    Ok(RankRevealed {
        basis: svd.u.select_columns(&keep),
        rank,
        singular_values: svd.singular_values,
    })
}

const FULL_RANK_TOL: f64 = 1e-12;

fn orthonormal_basis(x: &DenseMatrix) -> Result<DenseMatrix, DenseError> {
    match rank_revealing_basis(x, FULL_RANK_TOL) {
        Ok(r) if r.rank == x.cols() => Ok(r.basis),
        _ => Err(DenseError::RankDeficientInput),
    }
}

/// Largest canonical angle between `span(x1)` and `span(x2)`, in degrees.
///
/// For subspaces of different dimension this is the largest angle of the
/// smaller one relative to the larger one. Small angles are taken from the
/// sine route `‖(I - Q_L Q_L^H) Q_S‖_2`, large ones from the cosine route
/// (smallest singular value of `Q_S^H Q_L`), each where it is accurate.
pub fn principal_angle(x1: &DenseMatrix, x2: &DenseMatrix) -> Result<f64, DenseError> {
    if x1.rows() != x2.rows() {
        return Err(DenseError::DimensionMismatch {
            expected: x1.rows(),
            got: x2.rows(),
        });
    }
    let q1 = orthonormal_basis(x1)?;
    let q2 = orthonormal_basis(x2)?;
    let (small, large) = if q1.cols() <= q2.cols() {
        (q1, q2)
    } else {
        (q2, q1)
    };

    let proj = large.matmul(&large.adjoint_mul(&small));
    let residual = small.sub(&proj);
    let sin_max = thin_svd(&residual)?.singular_values[0].min(1.0);
    let angle = if sin_max < std::f64::consts::FRAC_1_SQRT_2 {
        sin_max.asin()
    } else {
        let cross = small.adjoint_mul(&large).adjoint();
        let svd = jacobi_svd(&cross)?;
        let cos_min = svd.singular_values.last().copied().unwrap_or(0.0).min(1.0);
        cos_min.acos()
    };
    Ok(angle.to_degrees())
}

/// Cosine-route angle only; kept for cross-checking the two routes.
pub fn principal_angle_cosine(x1: &DenseMatrix, x2: &DenseMatrix) -> Result<f64, DenseError> {
    let q1 = orthonormal_basis(x1)?;
    let q2 = orthonormal_basis(x2)?;
    let (small, large) = if q1.cols() <= q2.cols() {
        (q1, q2)
    } else {
        (q2, q1)
    };
    let cross = small.adjoint_mul(&large).adjoint();
    let svd = jacobi_svd(&cross)?;
    let cos_min = svd.singular_values.last().copied().unwrap_or(0.0).min(1.0);
    Ok(cos_min.acos().to_degrees())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random(n: usize, k: usize, rng: &mut impl Rng) -> DenseMatrix {
        DenseMatrix::from_fn(n, k, |_, _| {
            C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
        })
    }

    fn unit(n: usize, idx: &[usize]) -> DenseMatrix {
        DenseMatrix::from_fn(n, idx.len(), |i, j| {
            C64::new(if i == idx[j] { 1.0 } else { 0.0 }, 0.0)
        })
    }

    #[test]
    fn qr_reconstructs() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let x = random(12, 5, &mut rng);
        let (q, r) = thin_qr(&x);
        assert!(q.matmul(&r).sub(&x).max_abs() < 1e-13);
        assert!(q.adjoint_mul(&q).sub(&DenseMatrix::identity(5)).max_abs() < 1e-14);
    }

    #[test]
    fn svd_matches_nalgebra() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let x = random(9, 6, &mut rng);
        let ours = thin_svd(&x).unwrap();
        let na = nalgebra::DMatrix::from_fn(9, 6, |i, j| x[(i, j)]);
        let mut theirs: Vec<f64> = na.singular_values().iter().copied().collect();
        theirs.sort_by(|a, b| b.total_cmp(a));
        for (a, b) in ours.singular_values.iter().zip(&theirs) {
            assert!((a - b).abs() < 1e-13, "{a} vs {b}");
        }
        let mut us = ours.u.clone();
        for (j, &s) in ours.singular_values.iter().enumerate() {
            for z in us.col_mut(j) {
                *z *= s;
            }
        }
        assert!(us.matmul(&ours.v.adjoint()).sub(&x).max_abs() < 1e-13);
    }

    #[test]
    fn rank_reveal_orthonormal_input() {
        let q = unit(10, &[0, 4, 7]);
        let r = rank_revealing_basis(&q, 1e-10).unwrap();
        assert_eq!(r.rank, 3);
        let p1 = q.matmul(&q.adjoint());
        let p2 = r.basis.matmul(&r.basis.adjoint());
        assert!(p1.sub(&p2).frobenius_norm() < 1e-12);
    }

    #[test]
    fn rank_reveal_planted_dependency() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let mut x = random(10, 4, &mut rng);
        for i in 0..10 {
            x[(i, 3)] = x[(i, 0)] + x[(i, 1)];
        }
        let r = rank_revealing_basis(&x, 1e-10).unwrap();
        assert_eq!(r.rank, 3);
        // Projector onto the revealed span agrees with the span of the
        // three independent columns.
        let (q3, _) = thin_qr(&x.select_columns(&[0, 1, 2]));
        let diff = q3
            .matmul(&q3.adjoint())
            .sub(&r.basis.matmul(&r.basis.adjoint()));
        assert!(diff.frobenius_norm() <= 1e-12);
    }

    #[test]
    fn rank_reveal_zero_matrix() {
        assert_eq!(
            rank_revealing_basis(&DenseMatrix::zeros(10, 2), 1e-10).unwrap_err(),
            DenseError::ZeroMatrix
        );
    }

    #[test]
    fn angle_identical_and_orthogonal() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let (q, _) = thin_qr(&random(8, 3, &mut rng));
        assert!(principal_angle(&q, &q).unwrap() < 1e-6);
        let a = principal_angle(&unit(8, &[0, 1, 2]), &unit(8, &[3, 4, 5])).unwrap();
        assert!((a - 90.0).abs() < 1e-12);
    }

    #[test]
    fn angle_forty_five_degrees() {
        let x1 = unit(3, &[0, 1]);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let x2 = DenseMatrix::from_real_rows(&[&[1.0, 0.0], &[0.0, h], &[0.0, h]]);
        let a = principal_angle(&x1, &x2).unwrap();
        assert!((a - 45.0).abs() < 1e-12, "{a}");
        let c = principal_angle_cosine(&x1, &x2).unwrap();
        assert!((c - 45.0).abs() < 1e-10);
    }

    #[test]
    fn angle_rejects_rank_deficient() {
        let mut x = unit(5, &[0, 1]);
        for i in 0..5 {
            x[(i, 1)] = x[(i, 0)] * 2.0;
        }
        assert_eq!(
            principal_angle(&x, &unit(5, &[2])).unwrap_err(),
            DenseError::RankDeficientInput
        );
    }
}
