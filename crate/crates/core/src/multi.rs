//! Spectrum slicing: independent solves on subintervals, merge and
//! cross-interval orthogonality diagnostics.

use rayon::prelude::*;
use thiserror::Error;

use crate::contour::{ContourError, SearchInterval};
use crate::dense::{b_orthogonality, dot, DenseMatrix};
use crate::feast::{FeastConfig, FeastSolver, FeastStatus, RitzSet, StartingBasis};
use crate::sparse::SparseHermitianPencil;

/// Relative distance to a shared boundary within which a pair found by both
/// neighbours counts as a duplicate.
pub const BOUNDARY_DUP_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MultiError {
    #[error("invalid partition: {0}")]
    InvalidPartition(String),
    #[error(transparent)]
    Contour(#[from] ContourError),
}

/// `K` consecutive subintervals of `[boundaries[0], boundaries[K]]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Partition {
    boundaries: Vec<f64>,
    m_estimates: Vec<usize>,
}

impl Partition {
    pub fn new(boundaries: Vec<f64>, m_estimates: Vec<usize>) -> Result<Self, MultiError> {
        if boundaries.len() < 2 {
            return Err(MultiError::InvalidPartition(
                "need at least two boundaries".into(),
            ));
        }
        if m_estimates.len() != boundaries.len() - 1 {
            return Err(MultiError::InvalidPartition(format!(
                "{} subintervals but {} estimates",
                boundaries.len() - 1,
                m_estimates.len()
            )));
        }
        if boundaries.iter().any(|b| !b.is_finite()) || boundaries.windows(2).any(|w| w[0] >= w[1])
        {
            return Err(MultiError::InvalidPartition(
                "boundaries must be finite and strictly ascending".into(),
            ));
        }
        if m_estimates.contains(&0) {
            return Err(MultiError::InvalidPartition(
                "every estimate must be positive".into(),
            ));
        }
        Ok(Self {
            boundaries,
            m_estimates,
        })
    }

    /// `k` equal-width pieces with the same estimate each.
    pub fn uniform(lo: f64, hi: f64, k: usize, m_each: usize) -> Result<Self, MultiError> {
        if k == 0 {
            return Err(MultiError::InvalidPartition("k must be positive".into()));
        }
        let mut b: Vec<f64> = (0..=k)
            .map(|i| lo + (hi - lo) * i as f64 / k as f64)
            .collect();
        b[k] = hi;
        Self::new(b, vec![m_each; k])
    }

    pub fn k(&self) -> usize {
        self.m_estimates.len()
    }

    pub fn boundaries(&self) -> &[f64] {
        &self.boundaries
    }

    pub fn m_estimates(&self) -> &[usize] {
        &self.m_estimates
    }

    pub fn subinterval(&self, k: usize) -> Result<SearchInterval, MultiError> {
        Ok(SearchInterval::new(
            self.boundaries[k],
            self.boundaries[k + 1],
            self.m_estimates[k],
        )?)
    }
}

/// Outcome of one subinterval solve.
#[derive(Debug, Clone)]
pub enum SubStatus {
    Finished(FeastStatus),
    Failed(String),
}

impl SubStatus {
    pub fn as_str(&self) -> &str {
        match self {
            SubStatus::Finished(s) => s.as_str(),
            SubStatus::Failed(_) => "failed",
        }
    }

    pub fn is_converged(&self) -> bool {
        matches!(self, SubStatus::Finished(FeastStatus::Converged))
    }
}

#[derive(Debug, Clone)]
pub struct SubintervalRun {
    pub index: usize,
    pub interval: SearchInterval,
    pub seed: u64,
    pub status: SubStatus,
    pub iterations: usize,
    /// Full Ritz set of the last iteration, `None` if the solve failed.
    pub ritz: Option<RitzSet>,
    /// Worst B-inner product among the pairs this subinterval contributed.
    pub orth_local: f64,
}

#[derive(Debug, Clone)]
pub struct MergedSpectrum {
    pub runs: Vec<SubintervalRun>,
    /// Ascending.
    pub values: Vec<f64>,
    pub vectors: DenseMatrix,
    pub residuals: Vec<f64>,
    /// Subinterval index of each merged pair.
    pub provenance: Vec<usize>,
    pub orth_local: Vec<f64>,
    pub orth_global: f64,
    pub orth_matrix: Vec<Vec<f64>>,
}

impl MergedSpectrum {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn max_orth_local(&self) -> f64 {
        self.orth_local.iter().copied().fold(0.0, f64::max)
    }

    pub fn all_converged(&self) -> bool {
        self.runs.iter().all(|r| r.status.is_converged())
    }
}

/// Seed used for subinterval `k`; subinterval 0 uses the base seed.
pub fn subinterval_seed(seed: u64, k: usize) -> u64 {
    seed.wrapping_add(k as u64)
}

/// Runs one solve per subinterval concurrently and merges the in-interval
/// pairs. Subinterval failures are recorded, not propagated.
pub fn solve_partitioned(
    pencil: &SparseHermitianPencil,
    partition: &Partition,
    template: &FeastConfig,
    seed: u64,
) -> Result<MergedSpectrum, MultiError> {
    let intervals: Vec<SearchInterval> = (0..partition.k())
        .map(|k| partition.subinterval(k))
        .collect::<Result<_, _>>()?;
    let n = pencil.n();

    let raw: Vec<(SubStatus, usize, Option<RitzSet>)> = intervals
        .par_iter()
        .enumerate()
        .map(|(k, iv)| {
            let mut cfg = template.clone();
            cfg.interval = *iv;
            let start = StartingBasis::random(n, iv.m_estimate, subinterval_seed(seed, k));
            match FeastSolver::new(pencil, cfg).and_then(|s| s.solve(&start)) {
                Ok(out) => (
                    SubStatus::Finished(out.status),
                    out.iterations,
                    Some(out.ritz),
                ),
                Err(e) => (SubStatus::Failed(e.to_string()), 0, None),
            }
        })
        .collect();

    let width = partition.boundaries[partition.k()] - partition.boundaries[0];
    let mut kept: Vec<Vec<usize>> = Vec::with_capacity(raw.len());
    for (k, (_, _, ritz)) in raw.iter().enumerate() {
        let Some(ritz) = ritz else {
            kept.push(Vec::new());
            continue;
        };
        let mut idx = ritz.in_interval_indices();
        if k > 0 {
            let b = partition.boundaries[k];
            let tol = BOUNDARY_DUP_TOL * if b != 0.0 { b.abs() } else { width };
            let below_claims = match &raw[k - 1].2 {
                Some(prev) => kept[k - 1]
                    .iter()
                    .any(|&i| (prev.values[i] - b).abs() <= tol),
                None => false,
            };
            if below_claims {
                idx.retain(|&i| (ritz.values[i] - b).abs() > tol);
            }
        }
        kept.push(idx);
    }

    let mut entries: Vec<(f64, usize, usize)> = Vec::new();
    for (k, idx) in kept.iter().enumerate() {
        for &i in idx {
            entries.push((raw[k].2.as_ref().unwrap().values[i], k, i));
        }
    }
    entries.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));

    let columns: Vec<Vec<_>> = entries
        .iter()
        .map(|&(_, k, i)| raw[k].2.as_ref().unwrap().vectors.col(i).to_vec())
        .collect();
    let vectors = DenseMatrix::from_columns(n, &columns);
    let values: Vec<f64> = entries.iter().map(|e| e.0).collect();
    let residuals: Vec<f64> = entries
        .iter()
        .map(|&(_, k, i)| raw[k].2.as_ref().unwrap().residuals[i])
        .collect();
    let provenance: Vec<usize> = entries.iter().map(|e| e.1).collect();

    let orth_matrix = orthogonality_matrix(&vectors, pencil);
    let mut orth_local = vec![0.0f64; raw.len()];
    let mut orth_global = 0.0f64;
    for i in 0..values.len() {
        for j in 0..values.len() {
            if i == j {
                continue;
            }
            orth_global = orth_global.max(orth_matrix[i][j]);
            if provenance[i] == provenance[j] {
                let k = provenance[i];
                orth_local[k] = orth_local[k].max(orth_matrix[i][j]);
            }
        }
    }

    let runs = raw
        .into_iter()
        .zip(intervals)
        .enumerate()
        .map(
            |(k, ((status, iterations, ritz), interval))| SubintervalRun {
                index: k,
                interval,
                seed: subinterval_seed(seed, k),
                status,
                iterations,
                ritz,
                orth_local: orth_local[k],
            },
        )
        .collect();

    Ok(MergedSpectrum {
        runs,
        values,
        vectors,
        residuals,
        provenance,
        orth_local,
        orth_global,
        orth_matrix,
    })
}

/// `|x_i^H B x_j|` for all column pairs.
pub fn orthogonality_matrix(x: &DenseMatrix, pencil: &SparseHermitianPencil) -> Vec<Vec<f64>> {
    let bx = pencil.b().apply_block(x);
    let m = x.cols();
    let mut out = vec![vec![0.0; m]; m];
    for j in 0..m {
        for i in 0..=j {
            let v = dot(x.col(i), bx.col(j)).norm();
            out[i][j] = v;
            out[j][i] = v;
        }
    }
    out
}

/// Worst B-inner product among the given columns; `0` for fewer than two.
pub fn orth_level(x: &DenseMatrix, pencil: &SparseHermitianPencil) -> f64 {
    b_orthogonality(x, pencil.b())
}
