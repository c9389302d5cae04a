use nalgebra::DMatrix;

use crate::dense::DenseMatrix;
use crate::sparse::SparseHermitianPencil;
use crate::C64;

use super::ExperimentError;

/// Full dense reference eigendecomposition of a pencil, independent of the
/// solver's own kernels. Eigenvalues ascending, eigenvectors B-orthonormal.
#[derive(Debug, Clone)]
pub struct DenseOracle {
    pub values: Vec<f64>,
    pub vectors: DenseMatrix,
}

pub fn dense_oracle(pencil: &SparseHermitianPencil) -> Result<DenseOracle, ExperimentError> {
    let (a, b) = pencil.to_dense();
    let n = a.rows();
    let am = DMatrix::from_fn(n, n, |i, j| a[(i, j)]);
    let (values, vecs) = if pencil.b().is_identity() {
        let e = am.symmetric_eigen();
        (
            e.eigenvalues.iter().copied().collect::<Vec<f64>>(),
            e.eigenvectors,
        )
    } else {
        let bm = DMatrix::from_fn(n, n, |i, j| b[(i, j)]);
        let chol = bm
            .cholesky()
            .ok_or_else(|| ExperimentError::Oracle("B is not positive definite".into()))?;
        let l = chol.l();
        // C = L^{-1} A L^{-H}
        let la = l
            .solve_lower_triangular(&am)
            .ok_or_else(|| ExperimentError::Oracle("singular Cholesky factor".into()))?;
        let c = l
            .solve_lower_triangular(&la.adjoint())
            .ok_or_else(|| ExperimentError::Oracle("singular Cholesky factor".into()))?
            .adjoint();
        let c = (&c + c.adjoint()) * C64::new(0.5, 0.0);
        let e = c.symmetric_eigen();
        let x = l
            .adjoint()
            .solve_upper_triangular(&e.eigenvectors)
            .ok_or_else(|| ExperimentError::Oracle("singular Cholesky factor".into()))?;
        (e.eigenvalues.iter().copied().collect::<Vec<f64>>(), x)
    };
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| values[i].total_cmp(&values[j]));
    let vectors = DenseMatrix::from_fn(n, n, |i, j| vecs[(i, order[j])]);
    Ok(DenseOracle {
        values: order.iter().map(|&i| values[i]).collect(),
        vectors,
    })
}

impl DenseOracle {
    pub fn indices_in(&self, lo: f64, hi: f64) -> Vec<usize> {
        (0..self.values.len())
            .filter(|&i| self.values[i] >= lo && self.values[i] <= hi)
            .collect()
    }

    pub fn count_in(&self, lo: f64, hi: f64) -> usize {
        self.indices_in(lo, hi).len()
    }

    pub fn values_in(&self, lo: f64, hi: f64) -> Vec<f64> {
        self.indices_in(lo, hi)
            .iter()
            .map(|&i| self.values[i])
            .collect()
    }

    pub fn vectors_in(&self, lo: f64, hi: f64) -> DenseMatrix {
        self.vectors.select_columns(&self.indices_in(lo, hi))
    }

    /// Interval enclosing exactly the eigenvalues with sorted indices
    /// `first..=last`; interior ends sit halfway to the neighbours, open ends
    /// extend by a tenth of the enclosed span.
    pub fn interval_for(&self, first: usize, last: usize) -> (f64, f64) {
        let v = &self.values;
        let span = (v[last] - v[first]).max(1e-3 * v[last].abs().max(v[first].abs()).max(1.0));
        let lo = if first > 0 {
            0.5 * (v[first - 1] + v[first])
        } else {
            v[first] - 0.1 * span
        };
        let hi = if last + 1 < v.len() {
            0.5 * (v[last] + v[last + 1])
        } else {
            v[last] + 0.1 * span
        };
        (lo, hi)
    }
}
