//! Hermitian eigensolvers for the reduced (Rayleigh quotient) problems.
//!
//! The standard problem is solved with cyclic complex Jacobi rotations. The
//! generalized problem `A W = B W Λ` with a possibly singular `B` is reduced
//! to a standard one on the numerical range of `B` (spectral truncation), so
//! that oversized search subspaces never require a Cholesky factor of `B`.

use num_complex::Complex64 as C64;

use super::matrix::DenseMatrix;
use super::DenseError;

/// Relative symmetry tolerance for inputs to the Hermitian solvers.
pub const HERMITIAN_TOL: f64 = 1e-12;

const MAX_SWEEPS: usize = 80;

/// Eigenvalues in ascending order with orthonormal eigenvectors.
#[derive(Debug, Clone)]
pub struct SpectralFactorization {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: DenseMatrix,
}

impl SpectralFactorization {
    /// `V diag(λ) V^H`.
    pub fn reassemble(&self) -> DenseMatrix {
        let v = &self.eigenvectors;
        let mut scaled = v.clone();
        for (j, &l) in self.eigenvalues.iter().enumerate() {
            for z in scaled.col_mut(j) {
                *z *= l;
            }
        }
        scaled.matmul(&v.adjoint())
    }
}

/// Full spectral factorization of a Hermitian matrix.
pub fn hermitian_eigensolve(s: &DenseMatrix) -> Result<SpectralFactorization, DenseError> {
    if s.rows() != s.cols() {
        return Err(DenseError::NotSquare {
            rows: s.rows(),
            cols: s.cols(),
        });
    }
    if !s.is_hermitian(HERMITIAN_TOL) {
        return Err(DenseError::NotHermitian);
    }
    let n = s.rows();
    let mut a = s.hermitian_part();
    let mut v = DenseMatrix::identity(n);
    jacobi_sweeps(&mut a, &mut v)?;

    let mut values: Vec<f64> = (0..n).map(|i| a[(i, i)].re).collect();
    for j in 0..n {
        normalize_phase(v.col_mut(j));
    }
    let lead: Vec<usize> = (0..n).map(|j| first_nonzero(v.col(j))).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&p, &q| {
        values[p]
            .total_cmp(&values[q])
            .then_with(|| lead[p].cmp(&lead[q]))
    });
    let sorted = order.iter().map(|&i| values[i]).collect();
    values = sorted;
    Ok(SpectralFactorization {
        eigenvalues: values,
        eigenvectors: v.select_columns(&order),
    })
}

fn off_diagonal_norm(a: &DenseMatrix) -> f64 {
    let n = a.rows();
    let mut s = 0.0;
    for j in 0..n {
        for i in 0..n {
            if i != j {
                s += a[(i, j)].norm_sqr();
            }
        }
    }
    s.sqrt()
}

fn jacobi_sweeps(a: &mut DenseMatrix, v: &mut DenseMatrix) -> Result<(), DenseError> {
    let n = a.rows();
    if n < 2 {
        return Ok(());
    }
    let total = a.frobenius_norm();
    if total == 0.0 {
        return Ok(());
    }
    for _ in 0..MAX_SWEEPS {
        if off_diagonal_norm(a) <= f64::EPSILON * 1e-2 * total {
            return Ok(());
        }
        for p in 0..n - 1 {
            for q in p + 1..n {
                rotate(a, v, p, q);
            }
        }
    }
    if off_diagonal_norm(a) <= 1e2 * f64::EPSILON * total {
        Ok(())
    } else {
        Err(DenseError::NoConvergence {
            iterations: MAX_SWEEPS,
        })
    }
}

/// Annihilates `a[p][q]` with the unitary rotation `G = diag(1, e^{-iφ}) R(θ)`.
fn rotate(a: &mut DenseMatrix, v: &mut DenseMatrix, p: usize, q: usize) {
    let apq = a[(p, q)];
    let mag = apq.norm();
    if mag == 0.0 {
        return;
    }
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    // Skip entries already below the rounding level of the diagonal.
    if mag < f64::EPSILON * 1e-3 * (app.abs() + aqq.abs()) {
        a[(p, q)] = C64::new(0.0, 0.0);
        a[(q, p)] = C64::new(0.0, 0.0);
        return;
    }
    let phase = apq / mag;
    let tau = (aqq - app) / (2.0 * mag);
    let t = if tau >= 0.0 {
        1.0 / (tau + (1.0 + tau * tau).sqrt())
    } else {
        -1.0 / (-tau + (1.0 + tau * tau).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;
    // G_pp = c, G_pq = s, G_qp = -s e^{-iφ}, G_qq = c e^{-iφ}
    let em = phase.conj();
    let gqp = -em * s;
    let gqq = em * c;

    let n = a.rows();
    // A <- A G (columns)
    {
        let (cp, cq) = a.col_pair_mut(p, q);
        for k in 0..n {
            let xp = cp[k];
            let xq = cq[k];
            cp[k] = xp * c + xq * gqp;
            cq[k] = xp * s + xq * gqq;
        }
    }
    // A <- G^H A (rows)
    for k in 0..n {
        let xp = a[(p, k)];
        let xq = a[(q, k)];
        a[(p, k)] = xp * c + xq * gqp.conj();
        a[(q, k)] = xp * s + xq * gqq.conj();
    }
    a[(p, q)] = C64::new(0.0, 0.0);
    a[(q, p)] = C64::new(0.0, 0.0);
    a[(p, p)] = C64::new(a[(p, p)].re, 0.0);
    a[(q, q)] = C64::new(a[(q, q)].re, 0.0);

    let (vp, vq) = v.col_pair_mut(p, q);
    for k in 0..vp.len() {
        let xp = vp[k];
        let xq = vq[k];
        vp[k] = xp * c + xq * gqp;
        vq[k] = xp * s + xq * gqq;
    }
}

/// Rotates `x` so that its dominant entry is real and positive.
pub(crate) fn normalize_phase(x: &mut [C64]) {
    let max = x.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if max == 0.0 {
        return;
    }
    let k = x
        .iter()
        .position(|z| z.norm() >= (1.0 - 1e-8) * max)
        .unwrap_or(0);
    let ph = x[k].conj() / x[k].norm();
    if ph == C64::new(1.0, 0.0) {
        return;
    }
    for z in x.iter_mut() {
        *z *= ph;
    }
}

fn first_nonzero(x: &[C64]) -> usize {
    let max = x.iter().map(|z| z.norm()).fold(0.0, f64::max);
    x.iter()
        .position(|z| z.norm() > 1e-12 * max)
        .unwrap_or(x.len())
}

/// Primitive Ritz pairs of `A_U W = B_U W Λ` on the numerical range of `B_U`.
#[derive(Debug, Clone)]
pub struct ReducedSolution {
    /// Ascending eigenvalues, one per retained direction.
    pub values: Vec<f64>,
    /// `m x rank`, `B_U`-orthonormal columns.
    pub vectors: DenseMatrix,
    pub effective_rank: usize,
    /// Orthonormal eigen-directions of `B_U` that were dropped (`m x (m - rank)`).
    pub discarded: DenseMatrix,
    /// Eigenvalues of `B_U` for the dropped directions.
    pub discarded_weights: Vec<f64>,
}

/// Default truncation threshold for a reduced problem of dimension `m`.
pub fn default_rank_tol(m: usize) -> f64 {
    1e-12 * m.max(1) as f64
}

/// Solves `A_U W = B_U W Λ` for Hermitian `A_U` and Hermitian positive
/// semidefinite `B_U`.
///
/// `B_U = V D V^H` is factored and only directions with
/// `D_ii > rank_tol * max(D)` are kept; the standard problem
/// `D_r^{-1/2} V_r^H A_U V_r D_r^{-1/2} Z = Z Λ` is solved and
/// `W = V_r D_r^{-1/2} Z` is returned.
pub fn generalized_eigensolve(
    a_u: &DenseMatrix,
    b_u: &DenseMatrix,
    rank_tol: f64,
) -> Result<ReducedSolution, DenseError> {
    let m = a_u.rows();
    if a_u.cols() != m || b_u.rows() != m || b_u.cols() != m {
        return Err(DenseError::DimensionMismatch {
            expected: m,
            got: b_u.rows(),
        });
    }
    if !a_u.is_hermitian(HERMITIAN_TOL) || !b_u.is_hermitian(HERMITIAN_TOL) {
        return Err(DenseError::NotHermitian);
    }
    let bf = hermitian_eigensolve(b_u)?;
    let dmax = bf
        .eigenvalues
        .iter()
        .fold(0.0f64, |acc, &d| acc.max(d.abs()));
    if dmax == 0.0 {
        return Ok(ReducedSolution {
            values: Vec::new(),
            vectors: DenseMatrix::zeros(m, 0),
            effective_rank: 0,
            discarded: bf.eigenvectors,
            discarded_weights: bf.eigenvalues,
        });
    }
    let dmin = bf.eigenvalues[0];
    if dmin < -(1e3 * f64::EPSILON * m as f64).max(rank_tol) * dmax
        || *bf.eigenvalues.last().unwrap() <= 0.0
    {
        return Err(DenseError::IndefiniteB {
            min_eigenvalue: dmin,
        });
    }

    let threshold = rank_tol * dmax;
    let keep: Vec<usize> = (0..m).filter(|&i| bf.eigenvalues[i] > threshold).collect();
    let drop: Vec<usize> = (0..m).filter(|&i| bf.eigenvalues[i] <= threshold).collect();
    let r = keep.len();

    // V_r D_r^{-1/2}
    let mut scaled = bf.eigenvectors.select_columns(&keep);
    for (j, &i) in keep.iter().enumerate() {
        let s = 1.0 / bf.eigenvalues[i].sqrt();
        for z in scaled.col_mut(j) {
            *z *= s;
        }
    }
    let reduced = scaled.adjoint_mul(&a_u.matmul(&scaled)).hermitian_part();
    let rf = hermitian_eigensolve(&reduced)?;
    let mut w = scaled.matmul(&rf.eigenvectors);
    for j in 0..r {
        normalize_phase(w.col_mut(j));
    }

    Ok(ReducedSolution {
        values: rf.eigenvalues,
        vectors: w,
        effective_rank: r,
        discarded: bf.eigenvectors.select_columns(&drop),
        discarded_weights: drop.iter().map(|&i| bf.eigenvalues[i]).collect(),
    })
}
