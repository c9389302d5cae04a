use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::dense::{rank_revealing_basis, DenseMatrix};
use crate::sparse::BMatrix;
use crate::C64;

use super::FeastError;

const START_RANK_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub enum StartOrigin {
    Random {
        seed: u64,
    },
    UserSupplied,
    /// Random block with `projected_out` reference directions removed.
    Deflated {
        seed: u64,
        projected_out: usize,
    },
}

/// The initial block `Y` with `M̃` columns.
#[derive(Debug, Clone, PartialEq)]
pub struct StartingBasis {
    pub y: DenseMatrix,
    pub origin: StartOrigin,
}

fn gaussian_block(n: usize, m: usize, seed: u64) -> DenseMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    DenseMatrix::from_fn(n, m, |_, _| C64::new(StandardNormal.sample(&mut rng), 0.0))
}

impl StartingBasis {
    /// Real Gaussian entries.
    pub fn random(n: usize, m: usize, seed: u64) -> Self {
        Self {
            y: gaussian_block(n, m, seed),
            origin: StartOrigin::Random { seed },
        }
    }

    /// Rejects blocks without full numerical column rank.
    pub fn user(y: DenseMatrix) -> Result<Self, FeastError> {
        check_rank(&y)?;
        Ok(Self {
            y,
            origin: StartOrigin::UserSupplied,
        })
    }

    /// `Y := (I - X X^H B) Y` for a random `Y`, where the columns of
    /// `reference` are B-orthonormal. With zero reference columns this is
    /// exactly the random basis of the same seed.
    pub fn deflated(
        n: usize,
        m: usize,
        seed: u64,
        reference: &DenseMatrix,
        b: &BMatrix,
    ) -> Result<Self, FeastError> {
        let mut y = gaussian_block(n, m, seed);
        if reference.cols() > 0 {
            let coeff = reference.adjoint_mul(&b.apply_block(&y));
            y = y.sub(&reference.matmul(&coeff));
        }
        Ok(Self {
            y,
            origin: StartOrigin::Deflated {
                seed,
                projected_out: reference.cols(),
            },
        })
    }

    pub fn cols(&self) -> usize {
        self.y.cols()
    }
}

pub(crate) fn check_rank(y: &DenseMatrix) -> Result<(), FeastError> {
    let rank = match rank_revealing_basis(y, START_RANK_TOL) {
        Ok(r) => r.rank,
        Err(_) => 0,
    };
    if rank < y.cols() {
        return Err(FeastError::InvalidStartingBasis {
            rank,
            expected: y.cols(),
        });
    }
    Ok(())
}
