//! Small dense kernels sized by the subspace dimension.

mod chol;
mod eigen;
mod matrix;
mod svd;

use thiserror::Error;

pub use chol::cholesky_posdef_check;
pub use eigen::{
    default_rank_tol, generalized_eigensolve, hermitian_eigensolve, ReducedSolution,
    SpectralFactorization, HERMITIAN_TOL,
};
pub use matrix::{axpy, dot, norm2, DenseMatrix};
pub use svd::{
    jacobi_svd, principal_angle, principal_angle_cosine, rank_revealing_basis, thin_qr, thin_svd,
    RankRevealed, Svd,
};

use crate::sparse::BMatrix;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DenseError {
    #[error("matrix has zero rows or columns")]
    EmptyMatrix,
    #[error("{len} entries cannot fill a {rows}x{cols} matrix")]
    InvalidShape {
        rows: usize,
        cols: usize,
        len: usize,
    },
    #[error("matrix is {rows}x{cols}, expected square")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix is not Hermitian within tolerance")]
    NotHermitian,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("reduced mass matrix is indefinite (eigenvalue {min_eigenvalue:e})")]
    IndefiniteB { min_eigenvalue: f64 },
    #[error("no convergence after {iterations} sweeps")]
    NoConvergence { iterations: usize },
    #[error("matrix is zero")]
    ZeroMatrix,
    #[error("input does not have full column rank")]
    RankDeficientInput,
}

/// Worst B-inner product between distinct columns, `max_{i!=j} |x_i^H B x_j|`.
///
/// Columns are expected to be B-normalized already.
pub fn b_orthogonality(x: &DenseMatrix, b: &BMatrix) -> f64 {
    if x.cols() < 2 {
        return 0.0;
    }
    let bx = b.apply_block(x);
    let gram = x.adjoint_mul(&bx);
    let mut worst = 0.0f64;
    for j in 0..gram.cols() {
        for i in 0..gram.rows() {
            if i != j {
                worst = worst.max(gram[(i, j)].norm());
            }
        }
    }
    worst
}
