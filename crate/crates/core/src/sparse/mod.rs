//! Sparse storage, the pencil `(A, B)`, Matrix Market I/O and test-matrix
//! generators.

mod csr;
mod mm;
pub mod synth;

use num_complex::Complex64 as C64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use thiserror::Error;

pub use csr::SparseMatrixCsr;
pub use mm::{
    parse_matrix_market, read_matrix_market, write_matrix_market, write_matrix_market_to,
};
pub use synth::{synthesize_test_matrix, ClusterInfo, SyntheticPencil, TestMatrixKind};

use crate::dense::DenseMatrix;

const HERMITIAN_TOL: f64 = 1e-12;
const POSDEF_PROBES: usize = 20;

#[derive(Debug, Error, PartialEq)]
pub enum SparseError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("invalid CSR structure: {0}")]
    InvalidStructure(String),
    #[error("line {line}: {reason}")]
    ParseError { line: usize, reason: String },
    #[error("unsupported Matrix Market format: {0}")]
    UnsupportedFormat(String),
    #[error("i/o error: {0}")]
    Io(String),
    #[error("invalid generator parameters: {0}")]
    InvalidParams(String),
    #[error("{0} is not Hermitian")]
    NotHermitian(&'static str),
    #[error("B is not positive definite")]
    NotPositiveDefinite,
}

/// The right-hand matrix of the pencil; the identity is a tag, not storage.
#[derive(Debug, Clone, PartialEq)]
pub enum BMatrix {
    Identity(usize),
    Sparse(SparseMatrixCsr),
}

impl BMatrix {
    pub fn n(&self) -> usize {
        match self {
            BMatrix::Identity(n) => *n,
            BMatrix::Sparse(s) => s.n(),
        }
    }

    pub fn is_identity(&self) -> bool {
        matches!(self, BMatrix::Identity(_))
    }

    pub fn is_real(&self) -> bool {
        match self {
            BMatrix::Identity(_) => true,
            BMatrix::Sparse(s) => s.is_real(),
        }
    }

    pub fn max_abs(&self) -> f64 {
        match self {
            BMatrix::Identity(_) => 1.0,
            BMatrix::Sparse(s) => s.max_abs(),
        }
    }

    pub fn apply(&self, x: &[C64]) -> Vec<C64> {
        match self {
            BMatrix::Identity(_) => x.to_vec(),
            BMatrix::Sparse(s) => {
                let mut y = vec![C64::new(0.0, 0.0); s.n()];
                s.spmv_into(x, &mut y);
                y
            }
        }
    }

    pub fn apply_block(&self, x: &DenseMatrix) -> DenseMatrix {
        match self {
            BMatrix::Identity(_) => x.clone(),
            BMatrix::Sparse(s) => s.spmm(x).expect("B block dimension"),
        }
    }

    pub fn to_csr(&self) -> SparseMatrixCsr {
        match self {
            BMatrix::Identity(n) => SparseMatrixCsr::identity(*n),
            BMatrix::Sparse(s) => s.clone(),
        }
    }
}

/// Hermitian-definite pencil `A x = λ B x`.
#[derive(Debug, Clone)]
pub struct SparseHermitianPencil {
    a: SparseMatrixCsr,
    b: BMatrix,
}

impl SparseHermitianPencil {
    /// Checks dimensions, Hermiticity of both matrices and positivity of
    /// `x^H B x` on 20 seeded Gaussian probes.
    pub fn new(a: SparseMatrixCsr, b: BMatrix) -> Result<Self, SparseError> {
        if a.n() != b.n() {
            return Err(SparseError::DimensionMismatch {
                expected: a.n(),
                got: b.n(),
            });
        }
        if !a.is_hermitian(HERMITIAN_TOL) {
            return Err(SparseError::NotHermitian("A"));
        }
        if let BMatrix::Sparse(s) = &b {
            if !s.is_hermitian(HERMITIAN_TOL) {
                return Err(SparseError::NotHermitian("B"));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
            for _ in 0..POSDEF_PROBES {
                let x: Vec<C64> = (0..s.n())
                    .map(|_| {
                        C64::new(
                            StandardNormal.sample(&mut rng),
                            StandardNormal.sample(&mut rng),
                        )
                    })
                    .collect();
                let bx = b.apply(&x);
                if crate::dense::dot(&x, &bx).re <= 0.0 {
                    return Err(SparseError::NotPositiveDefinite);
                }
            }
        }
        Ok(Self { a, b })
    }

    pub fn standard(a: SparseMatrixCsr) -> Result<Self, SparseError> {
        let n = a.n();
        Self::new(a, BMatrix::Identity(n))
    }

    pub fn n(&self) -> usize {
        self.a.n()
    }

    pub fn a(&self) -> &SparseMatrixCsr {
        &self.a
    }

    pub fn b(&self) -> &BMatrix {
        &self.b
    }

    pub fn is_real(&self) -> bool {
        self.a.is_real() && self.b.is_real()
    }

    /// Dense `A` and `B`, for oracle computations at small size.
    pub fn to_dense(&self) -> (DenseMatrix, DenseMatrix) {
        (self.a.to_dense(), self.b.to_csr().to_dense())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pencil_rejects_mismatch_and_nonhermitian() {
        let a = SparseMatrixCsr::identity(3);
        assert!(matches!(
            SparseHermitianPencil::new(a.clone(), BMatrix::Identity(4)),
            Err(SparseError::DimensionMismatch { .. })
        ));
        let skew = SparseMatrixCsr::from_real_triplets(2, &[(0, 1, 1.0), (1, 0, -1.0)]).unwrap();
        assert_eq!(
            SparseHermitianPencil::standard(skew).unwrap_err(),
            SparseError::NotHermitian("A")
        );
        let neg = SparseMatrixCsr::from_diag(&[1.0, -1.0, -1.0]);
        assert_eq!(
            SparseHermitianPencil::new(a, BMatrix::Sparse(neg)).unwrap_err(),
            SparseError::NotPositiveDefinite
        );
    }
}
