//! The contour-integration eigensolver: subspace construction, Rayleigh–Ritz,
//! rank handling, stopping criteria and the per-iteration trace.

mod criteria;
mod solver;
mod start;

use thiserror::Error;

pub use criteria::{residual_bound, residual_criterion, trace_change, trace_criterion};
pub use solver::{build_subspace, feast_solve, rayleigh_quotients, FeastSolver};
pub use start::{StartOrigin, StartingBasis};

use crate::contour::{ContourError, SearchInterval, DEFAULT_ASPECT, DEFAULT_QUAD_NODES};
use crate::dense::{DenseError, DenseMatrix};
use crate::linsolve::{LinSolveConfig, LinSolveError};

pub const DEFAULT_MAX_ITERS: usize = 20;
pub const DEFAULT_REVEAL_TOL: f64 = 1e-6;
/// Consecutive near-zero subspace angles that count as stagnation.
pub const STAGNATION_WINDOW: usize = 3;
pub const STAGNATION_ANGLE_DEG: f64 = 1e-14;

#[derive(Debug, Error)]
pub enum FeastError {
    #[error(transparent)]
    Contour(#[from] ContourError),
    #[error(transparent)]
    LinSolve(#[from] LinSolveError),
    #[error(transparent)]
    Dense(#[from] DenseError),
    #[error("starting basis has rank {rank}, expected {expected}")]
    InvalidStartingBasis { rank: usize, expected: usize },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("filtered subspace is zero")]
    EmptySubspace,
    #[error("residual bound scale is zero")]
    ZeroScale,
    #[error("trace is zero; relative change undefined")]
    DegenerateDenominator,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Criterion {
    /// Relative change of the in-interval trace below `tol`.
    Trace { tol: f64 },
    /// Every in-interval pair satisfies `‖Ax - λBx‖ <= eps·n·scale`.
    Residual { eps: f64 },
}

impl Default for Criterion {
    fn default() -> Self {
        Criterion::Residual { eps: f64::EPSILON }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RankStrategy {
    /// Probe `B_U` with a Cholesky factorization and record the outcome.
    CholeskyCheck,
    /// Replace `U` by an orthonormal basis of its numerical range and shrink
    /// the subspace to the revealed rank for all later iterations.
    SvdReveal { tol: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct FeastConfig {
    pub interval: SearchInterval,
    pub quadrature_m: usize,
    pub aspect: f64,
    pub lin: LinSolveConfig,
    pub max_feast_iters: usize,
    pub criterion: Criterion,
    pub rank_strategy: RankStrategy,
    /// Lower bound for the residual scale, e.g. an estimate of `‖B⁻¹A‖`.
    pub residual_scale_floor: Option<f64>,
    /// Truncation level for `B_U`; `None` means `1e-12·M̃`.
    pub rank_tol: Option<f64>,
    /// Stop at the first iteration where the active criterion holds.
    pub stop_on_convergence: bool,
    /// Take the complex assembly path even for real data.
    pub force_complex: bool,
}

impl FeastConfig {
    pub fn new(interval: SearchInterval) -> Self {
        Self {
            interval,
            quadrature_m: DEFAULT_QUAD_NODES,
            aspect: DEFAULT_ASPECT,
            lin: LinSolveConfig::default(),
            max_feast_iters: DEFAULT_MAX_ITERS,
            criterion: Criterion::default(),
            rank_strategy: RankStrategy::CholeskyCheck,
            residual_scale_floor: None,
            rank_tol: None,
            stop_on_convergence: true,
            force_complex: false,
        }
    }

    pub fn validate(&self) -> Result<(), FeastError> {
        if self.max_feast_iters == 0 {
            return Err(FeastError::InvalidConfig(
                "max_feast_iters must be at least 1".into(),
            ));
        }
        match self.criterion {
            Criterion::Trace { tol } if !(tol > 0.0) => {
                return Err(FeastError::InvalidConfig(format!(
                    "trace tolerance {tol} must be positive"
                )))
            }
            Criterion::Residual { eps } if !(eps > 0.0) => {
                return Err(FeastError::InvalidConfig(format!(
                    "residual eps {eps} must be positive"
                )))
            }
            _ => {}
        }
        if let RankStrategy::SvdReveal { tol } = self.rank_strategy {
            if !(tol > 0.0 && tol < 1.0) {
                return Err(FeastError::InvalidConfig(format!(
                    "reveal tolerance {tol} outside (0, 1)"
                )));
            }
        }
        self.lin.validate()?;
        Ok(())
    }

    pub fn residual_eps(&self) -> f64 {
        match self.criterion {
            Criterion::Residual { eps } => eps,
            Criterion::Trace { .. } => f64::EPSILON,
        }
    }
}

/// Ritz pairs of one iteration.
#[derive(Debug, Clone, PartialEq)]
pub struct RitzSet {
    pub values: Vec<f64>,
    /// B-normalized Ritz vectors, one column per value.
    pub vectors: DenseMatrix,
    /// `‖A x - λ B x‖`, from full-size products.
    pub residuals: Vec<f64>,
    pub in_interval: Vec<bool>,
    pub converged: Vec<bool>,
}

impl RitzSet {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn in_interval_indices(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.in_interval[i]).collect()
    }

    pub fn in_interval_count(&self) -> usize {
        self.in_interval.iter().filter(|&&f| f).count()
    }

    pub fn converged_count(&self) -> usize {
        self.converged.iter().filter(|&&f| f).count()
    }

    pub fn in_interval_values(&self) -> Vec<f64> {
        self.in_interval_indices()
            .iter()
            .map(|&i| self.values[i])
            .collect()
    }

    pub fn in_interval_vectors(&self) -> DenseMatrix {
        self.vectors.select_columns(&self.in_interval_indices())
    }

    /// `(min, max)` residual over in-interval pairs; `None` if there are none.
    pub fn residual_range(&self) -> Option<(f64, f64)> {
        let r: Vec<f64> = self
            .in_interval_indices()
            .iter()
            .map(|&i| self.residuals[i])
            .collect();
        if r.is_empty() {
            return None;
        }
        Some((
            r.iter().copied().fold(f64::INFINITY, f64::min),
            r.iter().copied().fold(0.0, f64::max),
        ))
    }
}

/// Diagnostics of one iteration.
#[derive(Debug, Clone, PartialEq)]
pub struct IterationRecord {
    pub iteration: usize,
    /// Columns of the starting block of this iteration.
    pub subspace_dim: usize,
    /// Rank reported by the SVD reveal, when that strategy is active.
    pub revealed_rank: Option<usize>,
    /// Outcome of the Cholesky probe of `B_U`.
    pub b_posdef: bool,
    /// Directions of `B_U` kept by the reduced solve.
    pub effective_rank: usize,
    /// Sum of the in-interval Ritz values.
    pub trace: f64,
    /// `|trace_k - trace_{k-1}| / |trace_k|`; `None` on the first iteration
    /// or when the denominator vanishes.
    pub trace_change: Option<f64>,
    pub residual_min: f64,
    pub residual_max: f64,
    pub residual_bound: f64,
    pub in_interval: usize,
    pub converged: usize,
    pub trace_fired: bool,
    pub residual_fired: bool,
    /// Largest canonical angle (degrees) to the previous in-interval span.
    pub angle_to_prev: Option<f64>,
    /// Largest canonical angle (degrees) to the reference eigenspace.
    pub angle_to_reference: Option<f64>,
    pub values: Vec<f64>,
    pub residuals: Vec<f64>,
    pub in_interval_flags: Vec<bool>,
    pub lin_max_residual: f64,
    pub lin_iterations: usize,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct IterationTrace {
    pub records: Vec<IterationRecord>,
}

impl IterationTrace {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn last(&self) -> Option<&IterationRecord> {
        self.records.last()
    }

    /// First iteration at which the trace criterion held.
    pub fn trace_fired_at(&self) -> Option<usize> {
        self.records
            .iter()
            .find(|r| r.trace_fired)
            .map(|r| r.iteration)
    }

    /// First iteration at which the residual criterion held.
    pub fn residual_fired_at(&self) -> Option<usize> {
        self.records
            .iter()
            .find(|r| r.residual_fired)
            .map(|r| r.iteration)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FeastStatus {
    Converged,
    MaxIters,
    Stagnated,
}

impl FeastStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            FeastStatus::Converged => "converged",
            FeastStatus::MaxIters => "max_iters",
            FeastStatus::Stagnated => "stagnated",
        }
    }
}

#[derive(Debug, Clone)]
pub struct FeastOutcome {
    pub ritz: RitzSet,
    pub trace: IterationTrace,
    pub status: FeastStatus,
    pub iterations: usize,
    /// First iteration at which the active criterion held.
    pub converged_at: Option<usize>,
}
