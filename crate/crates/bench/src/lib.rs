//! Inputs shared by the criterion benches in `benches/`.

use feast_core::dense::DenseMatrix;
use feast_core::sparse::{synthesize_test_matrix, SparseHermitianPencil, TestMatrixKind};
use feast_core::C64;

/// Weighted graph Laplacian of size `n` with `B = I`.
pub fn laplacian(n: usize, seed: u64) -> SparseHermitianPencil {
    synthesize_test_matrix(
        &TestMatrixKind::GraphLaplacian {
            n,
            edge_density: 0.05,
        },
        seed,
    )
    .expect("valid generator parameters")
    .pencil
}

/// Deterministic well-conditioned Hermitian matrix of order `m`.
pub fn hermitian(m: usize) -> DenseMatrix {
    DenseMatrix::from_fn(m, m, |i, j| {
        if i == j {
            C64::new(i as f64 + 1.0, 0.0)
        } else {
            let x = 1.0 / (1.0 + (i as f64 - j as f64).abs());
            C64::new(x, if i < j { 0.1 * x } else { -0.1 * x })
        }
    })
}
