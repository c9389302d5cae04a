use num_complex::Complex64 as C64;

use super::SparseError;
use crate::dense::DenseMatrix;

/// Square sparse matrix in compressed sparse row form.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrixCsr {
    n: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<C64>,
}

impl SparseMatrixCsr {
    /// Validates raw CSR arrays.
    pub fn new(
        n: usize,
        row_ptr: Vec<usize>,
        col_idx: Vec<usize>,
        values: Vec<C64>,
    ) -> Result<Self, SparseError> {
        if row_ptr.len() != n + 1 || row_ptr[0] != 0 {
            return Err(SparseError::InvalidStructure(
                "row_ptr must have length n+1 and start at 0".into(),
            ));
        }
        if col_idx.len() != values.len() || *row_ptr.last().unwrap() != col_idx.len() {
            return Err(SparseError::InvalidStructure(
                "row_ptr end does not match nnz".into(),
            ));
        }
        for i in 0..n {
            if row_ptr[i] > row_ptr[i + 1] {
                return Err(SparseError::InvalidStructure(format!(
                    "row_ptr decreases at row {i}"
                )));
            }
            let cols = &col_idx[row_ptr[i]..row_ptr[i + 1]];
            if cols.iter().any(|&c| c >= n) {
                return Err(SparseError::InvalidStructure(format!(
                    "column index out of range in row {i}"
                )));
            }
            if cols.windows(2).any(|w| w[0] >= w[1]) {
                return Err(SparseError::InvalidStructure(format!(
                    "columns not strictly increasing in row {i}"
                )));
            }
        }
        Ok(Self {
            n,
            row_ptr,
            col_idx,
            values,
        })
    }

    /// Builds from `(row, col, value)` triplets; duplicates are summed.
    pub fn from_triplets(n: usize, triplets: &[(usize, usize, C64)]) -> Result<Self, SparseError> {
        let mut sorted: Vec<(usize, usize, C64)> = triplets.to_vec();
        if let Some(&(r, c, _)) = sorted.iter().find(|t| t.0 >= n || t.1 >= n) {
            return Err(SparseError::InvalidStructure(format!(
                "entry ({r}, {c}) outside {n}x{n}"
            )));
        }
        sorted.sort_by_key(|t| (t.0, t.1));
        let mut row_ptr = vec![0usize; n + 1];
        let mut col_idx = Vec::with_capacity(sorted.len());
        let mut values: Vec<C64> = Vec::with_capacity(sorted.len());
        let mut last: Option<(usize, usize)> = None;
        for (r, c, v) in sorted {
            if last == Some((r, c)) {
                *values.last_mut().unwrap() += v;
                continue;
            }
            row_ptr[r + 1] += 1;
            col_idx.push(c);
            values.push(v);
            last = Some((r, c));
        }
        for i in 0..n {
            row_ptr[i + 1] += row_ptr[i];
        }
        Self::new(n, row_ptr, col_idx, values)
    }

    pub fn from_real_triplets(
        n: usize,
        triplets: &[(usize, usize, f64)],
    ) -> Result<Self, SparseError> {
        let t: Vec<_> = triplets
            .iter()
            .map(|&(r, c, v)| (r, c, C64::new(v, 0.0)))
            .collect();
        Self::from_triplets(n, &t)
    }

    pub fn identity(n: usize) -> Self {
        Self {
            n,
            row_ptr: (0..=n).collect(),
            col_idx: (0..n).collect(),
            values: vec![C64::new(1.0, 0.0); n],
        }
    }

    pub fn from_diag(d: &[f64]) -> Self {
        let n = d.len();
        Self {
            n,
            row_ptr: (0..=n).collect(),
            col_idx: (0..n).collect(),
            values: d.iter().map(|&x| C64::new(x, 0.0)).collect(),
        }
    }

    /// Keeps the nonzero entries of a square dense matrix.
    pub fn from_dense(m: &DenseMatrix) -> Result<Self, SparseError> {
        if m.rows() != m.cols() {
            return Err(SparseError::DimensionMismatch {
                expected: m.rows(),
                got: m.cols(),
            });
        }
        let n = m.rows();
        let mut t = Vec::new();
        for i in 0..n {
            for j in 0..n {
                if m[(i, j)] != C64::new(0.0, 0.0) {
                    t.push((i, j, m[(i, j)]));
                }
            }
        }
        Self::from_triplets(n, &t)
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row_ptr(&self) -> &[usize] {
        &self.row_ptr
    }

    pub fn col_idx(&self) -> &[usize] {
        &self.col_idx
    }

    pub fn values(&self) -> &[C64] {
        &self.values
    }

    /// Iterates `(row, col, value)` in row-major order.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, C64)> + '_ {
        (0..self.n).flat_map(move |i| {
            (self.row_ptr[i]..self.row_ptr[i + 1])
                .map(move |k| (i, self.col_idx[k], self.values[k]))
        })
    }

    pub fn to_dense(&self) -> DenseMatrix {
        let mut d = DenseMatrix::zeros(self.n, self.n);
        for (i, j, v) in self.entries() {
            d[(i, j)] = v;
        }
        d
    }

    pub fn diagonal(&self) -> Vec<C64> {
        let mut d = vec![C64::new(0.0, 0.0); self.n];
        for (i, j, v) in self.entries() {
            if i == j {
                d[i] = v;
            }
        }
        d
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn is_real(&self) -> bool {
        self.values.iter().all(|z| z.im == 0.0)
    }

    /// `(lower, upper)` bandwidth.
    pub fn bandwidth(&self) -> (usize, usize) {
        let mut lo = 0;
        let mut up = 0;
        for (i, j, _) in self.entries() {
            if i > j {
                lo = lo.max(i - j);
            } else {
                up = up.max(j - i);
            }
        }
        (lo, up)
    }

    /// Entry lookup by binary search within the row.
    pub fn get(&self, i: usize, j: usize) -> C64 {
        let cols = &self.col_idx[self.row_ptr[i]..self.row_ptr[i + 1]];
        match cols.binary_search(&j) {
            Ok(k) => self.values[self.row_ptr[i] + k],
            Err(_) => C64::new(0.0, 0.0),
        }
    }

    /// `‖S - S^H‖_max <= tol * ‖S‖_max`.
    pub fn is_hermitian(&self, tol: f64) -> bool {
        let scale = self.max_abs();
        let bound = tol * scale;
        self.entries()
            .all(|(i, j, v)| (v - self.get(j, i).conj()).norm() <= bound)
    }

    pub fn spmv(&self, x: &[C64]) -> Result<Vec<C64>, SparseError> {
        if x.len() != self.n {
            return Err(SparseError::DimensionMismatch {
                expected: self.n,
                got: x.len(),
            });
        }
        let mut y = vec![C64::new(0.0, 0.0); self.n];
        self.spmv_into(x, &mut y);
        Ok(y)
    }

    /// `y = S x` with lengths already checked by the caller.
    #[inline]
    pub fn spmv_into(&self, x: &[C64], y: &mut [C64]) {
        for (i, yi) in y.iter_mut().enumerate() {
            let mut s = C64::new(0.0, 0.0);
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                s += self.values[k] * x[self.col_idx[k]];
            }
            *yi = s;
        }
    }

    pub fn spmm(&self, x: &DenseMatrix) -> Result<DenseMatrix, SparseError> {
        if x.rows() != self.n {
            return Err(SparseError::DimensionMismatch {
                expected: self.n,
                got: x.rows(),
            });
        }
        let mut out = DenseMatrix::zeros(self.n, x.cols());
        for j in 0..x.cols() {
            self.spmv_into(x.col(j), out.col_mut(j));
        }
        Ok(out)
    }

    pub fn scaled(&self, s: f64) -> Self {
        let mut out = self.clone();
        for v in &mut out.values {
            *v *= s;
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn tridiag(n: usize) -> SparseMatrixCsr {
        let mut t = Vec::new();
        for i in 0..n {
            t.push((i, i, 2.0));
            if i + 1 < n {
                t.push((i, i + 1, -1.0));
                t.push((i + 1, i, -1.0));
            }
        }
        SparseMatrixCsr::from_real_triplets(n, &t).unwrap()
    }

    fn random_sparse(n: usize, density: f64, rng: &mut impl Rng) -> SparseMatrixCsr {
        let mut t = Vec::new();
        for i in 0..n {
            for j in 0..n {
                if rng.random_bool(density) {
                    t.push((
                        i,
                        j,
                        C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)),
                    ));
                }
            }
        }
        SparseMatrixCsr::from_triplets(n, &t).unwrap()
    }

    #[test]
    fn identity_spmv() {
        let x: Vec<C64> = (0..5).map(|i| C64::new(i as f64, -1.0)).collect();
        assert_eq!(SparseMatrixCsr::identity(5).spmv(&x).unwrap(), x);
    }

    #[test]
    fn tridiagonal_telescopes() {
        let y = tridiag(4).spmv(&[C64::new(1.0, 0.0); 4]).unwrap();
        let re: Vec<f64> = y.iter().map(|z| z.re).collect();
        assert_eq!(re, vec![1.0, 0.0, 0.0, 1.0]);
    }

    #[test]
    fn spmv_matches_dense() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let s = random_sparse(50, 0.1, &mut rng);
        let x = DenseMatrix::from_fn(50, 1, |_, _| C64::new(rng.random_range(-1.0..1.0), 0.3));
        let y = s.spmv(x.col(0)).unwrap();
        let oracle = s.to_dense().matmul(&x);
        let scale = oracle.frobenius_norm();
        let err: f64 = y
            .iter()
            .zip(oracle.col(0))
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt();
        assert!(err <= 1e-13 * scale);
    }

    #[test]
    fn spmm_matches_dense_and_spmv() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let s = random_sparse(40, 0.15, &mut rng);
        let x = DenseMatrix::from_fn(40, 7, |_, _| {
            C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
        });
        let y = s.spmm(&x).unwrap();
        let oracle = s.to_dense().matmul(&x);
        assert!(y.sub(&oracle).frobenius_norm() <= 1e-13 * oracle.frobenius_norm());
        assert_eq!(y.col(3), s.spmv(x.col(3)).unwrap().as_slice());
        assert_eq!(SparseMatrixCsr::identity(40).spmm(&x).unwrap(), x);
    }

    #[test]
    fn spmv_dimension_mismatch() {
        assert_eq!(
            tridiag(4).spmv(&[C64::new(1.0, 0.0); 3]),
            Err(SparseError::DimensionMismatch {
                expected: 4,
                got: 3
            })
        );
    }

    #[test]
    fn duplicates_are_summed() {
        let s = SparseMatrixCsr::from_real_triplets(2, &[(0, 0, 1.0), (0, 0, 2.5), (1, 0, 1.0)])
            .unwrap();
        assert_eq!(s.nnz(), 2);
        assert_eq!(s.get(0, 0).re, 3.5);
    }

    #[test]
    fn invalid_structure_rejected() {
        let bad = SparseMatrixCsr::new(2, vec![0, 2, 2], vec![1, 0], vec![C64::new(1.0, 0.0); 2]);
        assert!(matches!(bad, Err(SparseError::InvalidStructure(_))));
    }

    #[test]
    fn hermitian_check() {
        assert!(tridiag(6).is_hermitian(1e-12));
        let s = SparseMatrixCsr::from_triplets(
            2,
            &[(0, 1, C64::new(0.0, 1.0)), (1, 0, C64::new(0.0, 1.0))],
        )
        .unwrap();
        assert!(!s.is_hermitian(1e-12));
    }

    #[test]
    fn columns_reproduced_by_unit_vectors() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let s = random_sparse(30, 0.2, &mut rng);
        let d = s.to_dense();
        for j in 0..30 {
            let mut e = vec![C64::new(0.0, 0.0); 30];
            e[j] = C64::new(1.0, 0.0);
            assert_eq!(s.spmv(&e).unwrap().as_slice(), d.col(j));
        }
    }
}
