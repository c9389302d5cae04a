//! Dense LU with partial pivoting for the shifted system `zB - A`.
//!
//! Row interchanges are applied only to the trailing columns, as in banded
//! LAPACK factorizations, so loops stay within the band when `zB - A` is
//! banded and `L` keeps its bandwidth.

use num_complex::Complex64 as C64;

use super::{LinSolveError, ShiftedOperator};

const PIVOT_FLOOR: f64 = 1e-300;

#[derive(Debug, Clone)]
pub struct DenseLu {
    n: usize,
    kl: usize,
    ku: usize,
    data: Vec<C64>,
    piv: Vec<usize>,
}

impl DenseLu {
    /// Densifies `zB - A` and factors it.
    pub fn factor(op: &ShiftedOperator<'_>, dense_cap: usize) -> Result<Self, LinSolveError> {
        let n = op.n();
        if n > dense_cap {
            return Err(LinSolveError::TooLargeForDense { n, cap: dense_cap });
        }
        let mut data = vec![C64::new(0.0, 0.0); n * n];
        let a = op.pencil.a();
        for (i, j, v) in a.entries() {
            data[j * n + i] -= v;
        }
        let b = op.pencil.b().to_csr();
        for (i, j, v) in b.entries() {
            data[j * n + i] += op.shift * v;
        }
        let (la, ua) = a.bandwidth();
        let (lb, ub) = b.bandwidth();
        Self::factor_dense(n, data, la.max(lb), ua.max(ub))
    }

    /// Factors a column-major `n x n` matrix with the given bandwidths.
    pub fn factor_dense(
        n: usize,
        mut data: Vec<C64>,
        kl: usize,
        ku: usize,
    ) -> Result<Self, LinSolveError> {
        let mut piv = vec![0usize; n];
        let kv = (kl + ku).min(n.saturating_sub(1));
        for j in 0..n {
            let last_row = (j + kl).min(n - 1);
            let mut p = j;
            let mut best = data[j * n + j].norm();
            for i in j + 1..=last_row {
                let v = data[j * n + i].norm();
                if v > best {
                    best = v;
                    p = i;
                }
            }
            if best < PIVOT_FLOOR {
                return Err(LinSolveError::SingularSystem { pivot: j });
            }
            piv[j] = p;
            let last_col = (j + kv).min(n - 1);
            if p != j {
                for c in j..=last_col {
                    data.swap(c * n + j, c * n + p);
                }
            }
            let inv = C64::new(1.0, 0.0) / data[j * n + j];
            for i in j + 1..=last_row {
                data[j * n + i] *= inv;
            }
            for c in j + 1..=last_col {
                let ujc = data[c * n + j];
                if ujc == C64::new(0.0, 0.0) {
                    continue;
                }
                let (left, right) = data.split_at_mut(c * n);
                let lcol = &left[j * n..j * n + n];
                let ccol = &mut right[..n];
                for i in j + 1..=last_row {
                    ccol[i] -= lcol[i] * ujc;
                }
            }
        }
        Ok(Self {
            n,
            kl,
            ku: kv,
            data,
            piv,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Solves `M x = b` in place.
    pub fn solve_in_place(&self, b: &mut [C64]) {
        let n = self.n;
        for j in 0..n {
            b.swap(j, self.piv[j]);
            let bj = b[j];
            if bj == C64::new(0.0, 0.0) {
                continue;
            }
            let last = (j + self.kl).min(n - 1);
            let col = &self.data[j * n..j * n + n];
            for i in j + 1..=last {
                b[i] -= col[i] * bj;
            }
        }
        for j in (0..n).rev() {
            let col = &self.data[j * n..j * n + n];
            b[j] /= col[j];
            let bj = b[j];
            let first = j.saturating_sub(self.ku);
            for i in first..j {
                b[i] -= col[i] * bj;
            }
        }
    }

    /// Solves `M^H x = b` in place.
    pub fn solve_adjoint_in_place(&self, b: &mut [C64]) {
        let n = self.n;
        // U^H y = b, forward.
        for j in 0..n {
            let col = &self.data[j * n..j * n + n];
            let first = j.saturating_sub(self.ku);
            let mut s = b[j];
            for i in first..j {
                s -= col[i].conj() * b[i];
            }
            b[j] = s / col[j].conj();
        }
        // Undo the eliminations in reverse order.
        for j in (0..n).rev() {
            let last = (j + self.kl).min(n - 1);
            let col = &self.data[j * n..j * n + n];
            let mut s = b[j];
            for i in j + 1..=last {
                s -= col[i].conj() * b[i];
            }
            b[j] = s;
            b.swap(j, self.piv[j]);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dense::DenseMatrix;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_dense(n: usize, rng: &mut impl Rng) -> DenseMatrix {
        DenseMatrix::from_fn(n, n, |_, _| {
            C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
        })
    }

    fn residual(m: &DenseMatrix, x: &[C64], b: &[C64]) -> f64 {
        let xm = DenseMatrix::from_columns(x.len(), &[x.to_vec()]);
        let r = m.matmul(&xm);
        r.col(0)
            .iter()
            .zip(b)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    #[test]
    fn solves_and_adjoint_solves_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let n = 30;
        let m = random_dense(n, &mut rng);
        let lu = DenseLu::factor_dense(n, m.as_slice().to_vec(), n - 1, n - 1).unwrap();
        let b: Vec<C64> = (0..n).map(|i| C64::new(i as f64, 1.0)).collect();
        let mut x = b.clone();
        lu.solve_in_place(&mut x);
        assert!(residual(&m, &x, &b) < 1e-12);
        let mut y = b.clone();
        lu.solve_adjoint_in_place(&mut y);
        assert!(residual(&m.adjoint(), &y, &b) < 1e-12);
    }

    #[test]
    fn banded_matches_full() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let n = 40;
        let (kl, ku) = (2, 3);
        let m = DenseMatrix::from_fn(n, n, |i, j| {
            if i <= j + kl && j <= i + ku {
                C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
            } else {
                C64::new(0.0, 0.0)
            }
        });
        let band = DenseLu::factor_dense(n, m.as_slice().to_vec(), kl, ku).unwrap();
        let b: Vec<C64> = (0..n).map(|i| C64::new(1.0, i as f64 * 0.1)).collect();
        let mut x = b.clone();
        band.solve_in_place(&mut x);
        assert!(residual(&m, &x, &b) < 1e-12);
        let mut y = b.clone();
        band.solve_adjoint_in_place(&mut y);
        assert!(residual(&m.adjoint(), &y, &b) < 1e-12);
    }

    #[test]
    fn singular_detected() {
        let m = DenseMatrix::from_diag(&[1.0, 0.0, 2.0]);
        assert_eq!(
            DenseLu::factor_dense(3, m.as_slice().to_vec(), 0, 0).unwrap_err(),
            LinSolveError::SingularSystem { pivot: 1 }
        );
    }
}
