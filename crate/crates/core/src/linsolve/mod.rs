//! Shifted linear systems `(zB - A) V = R` per quadrature node.

mod gmres;
mod lu;

use num_complex::Complex64 as C64;
use rayon::prelude::*;
use thiserror::Error;

pub use gmres::{gmres_solve, gmres_solve_preconditioned, IdentityPreconditioner};
pub use lu::DenseLu;

use crate::dense::DenseMatrix;
use crate::sparse::SparseHermitianPencil;

pub const DEFAULT_RESTART: usize = 50;
pub const DEFAULT_DENSE_CAP: usize = 4000;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LinSolveError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("right-hand side is zero")]
    ZeroRhs,
    #[error("GMRES breakdown after {iteration} iterations without reaching the tolerance")]
    Breakdown { iteration: usize },
    #[error("singular system: pivot {pivot} below 1e-300")]
    SingularSystem { pivot: usize },
    #[error("dense solve of size {n} exceeds the cap {cap}")]
    TooLargeForDense { n: usize, cap: usize },
    #[error("invalid solver configuration: {0}")]
    InvalidConfig(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Backend {
    Gmres,
    DirectDense,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinSolveConfig {
    /// Relative tolerance against the starting residual.
    pub tol: f64,
    /// `None` means `10 n`.
    pub max_iters: Option<usize>,
    pub restart: usize,
    pub backend: Backend,
    pub dense_cap: usize,
}

impl Default for LinSolveConfig {
    fn default() -> Self {
        Self {
            tol: 1e-12,
            max_iters: None,
            restart: DEFAULT_RESTART,
            backend: Backend::DirectDense,
            dense_cap: DEFAULT_DENSE_CAP,
        }
    }
}

impl LinSolveConfig {
    pub fn gmres(tol: f64) -> Self {
        Self {
            tol,
            backend: Backend::Gmres,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<(), LinSolveError> {
        if !(self.tol > 0.0 && self.tol < 1.0) {
            return Err(LinSolveError::InvalidConfig(format!(
                "tol {} outside (0, 1)",
                self.tol
            )));
        }
        if self.restart == 0 {
            return Err(LinSolveError::InvalidConfig(
                "restart must be at least 1".into(),
            ));
        }
        Ok(())
    }

    pub fn max_iters_for(&self, n: usize) -> usize {
        self.max_iters.unwrap_or(10 * n)
    }
}

/// Optional right preconditioner for GMRES.
pub trait Preconditioner: Sync {
    fn apply(&self, r: &[C64]) -> Vec<C64>;
}

/// `x -> (zB - A) x`.
#[derive(Debug, Clone, Copy)]
pub struct ShiftedOperator<'a> {
    pub pencil: &'a SparseHermitianPencil,
    pub shift: C64,
}

impl<'a> ShiftedOperator<'a> {
    pub fn new(pencil: &'a SparseHermitianPencil, shift: C64) -> Self {
        Self { pencil, shift }
    }

    pub fn n(&self) -> usize {
        self.pencil.n()
    }

    pub fn apply(&self, x: &[C64]) -> Vec<C64> {
        let mut ax = vec![C64::new(0.0, 0.0); x.len()];
        self.pencil.a().spmv_into(x, &mut ax);
        let bx = self.pencil.b().apply(x);
        bx.iter()
            .zip(&ax)
            .map(|(b, a)| self.shift * b - a)
            .collect()
    }

    pub fn conj(&self) -> Self {
        Self {
            pencil: self.pencil,
            shift: self.shift.conj(),
        }
    }
}

/// Outcome for one right-hand side.
#[derive(Debug, Clone, PartialEq)]
pub struct ColumnReport {
    pub iterations: usize,
    /// `‖op x - rhs‖ / ‖r0‖`, recomputed from the returned solution.
    pub residual: f64,
    pub converged: bool,
    /// Relative residual estimates per restart cycle; each cycle starts with
    /// the true residual.
    pub history: Vec<Vec<f64>>,
}

impl ColumnReport {
    fn exact() -> Self {
        Self {
            iterations: 0,
            residual: 0.0,
            converged: true,
            history: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct LinSolveReport {
    pub iterations: Vec<usize>,
    pub residuals: Vec<f64>,
    pub converged: Vec<bool>,
}

impl LinSolveReport {
    fn push(&mut self, c: &ColumnReport) {
        self.iterations.push(c.iterations);
        self.residuals.push(c.residual);
        self.converged.push(c.converged);
    }

    pub fn extend(&mut self, other: &LinSolveReport) {
        self.iterations.extend_from_slice(&other.iterations);
        self.residuals.extend_from_slice(&other.residuals);
        self.converged.extend_from_slice(&other.converged);
    }

    pub fn all_converged(&self) -> bool {
        self.converged.iter().all(|&c| c)
    }

    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().copied().fold(0.0, f64::max)
    }

    pub fn total_iterations(&self) -> usize {
        self.iterations.iter().sum()
    }
}

fn relative_residual(op: &ShiftedOperator<'_>, x: &[C64], rhs: &[C64]) -> f64 {
    let r0: f64 = rhs.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if r0 == 0.0 {
        return 0.0;
    }
    let ax = op.apply(x);
    ax.iter()
        .zip(rhs)
        .map(|(a, b)| (a - b).norm_sqr())
        .sum::<f64>()
        .sqrt()
        / r0
}

/// LU solve of a block; convenience wrapper that factors every call.
pub fn direct_dense_solve(
    op: &ShiftedOperator<'_>,
    rhs: &DenseMatrix,
) -> Result<DenseMatrix, LinSolveError> {
    if rhs.rows() != op.n() {
        return Err(LinSolveError::DimensionMismatch {
            expected: op.n(),
            got: rhs.rows(),
        });
    }
    let lu = DenseLu::factor(op, DEFAULT_DENSE_CAP)?;
    let mut out = rhs.clone();
    for j in 0..out.cols() {
        lu.solve_in_place(out.col_mut(j));
    }
    Ok(out)
}

/// Solves every column of `rhs`; GMRES columns run concurrently, results
/// stay in column order.
pub fn solve_block(
    op: &ShiftedOperator<'_>,
    rhs: &DenseMatrix,
    cfg: &LinSolveConfig,
) -> Result<(DenseMatrix, LinSolveReport), LinSolveError> {
    cfg.validate()?;
    if rhs.rows() != op.n() {
        return Err(LinSolveError::DimensionMismatch {
            expected: op.n(),
            got: rhs.rows(),
        });
    }
    match cfg.backend {
        Backend::DirectDense => {
            let lu = DenseLu::factor(op, cfg.dense_cap)?;
            Ok(lu_block(&lu, op, rhs, false))
        }
        Backend::Gmres => gmres_block(op, rhs, cfg),
    }
}

fn lu_block(
    lu: &DenseLu,
    op: &ShiftedOperator<'_>,
    rhs: &DenseMatrix,
    adjoint: bool,
) -> (DenseMatrix, LinSolveReport) {
    let cols: Vec<(Vec<C64>, ColumnReport)> = (0..rhs.cols())
        .into_par_iter()
        .map(|j| {
            let b = rhs.col(j);
            let mut x = b.to_vec();
            if b.iter().all(|z| *z == C64::new(0.0, 0.0)) {
                return (x, ColumnReport::exact());
            }
            if adjoint {
                lu.solve_adjoint_in_place(&mut x);
            } else {
                lu.solve_in_place(&mut x);
            }
            let residual = relative_residual(op, &x, b);
            let report = ColumnReport {
                iterations: 1,
                residual,
                converged: true,
                history: Vec::new(),
            };
            (x, report)
        })
        .collect();
    assemble(rhs.rows(), cols)
}

fn gmres_block(
    op: &ShiftedOperator<'_>,
    rhs: &DenseMatrix,
    cfg: &LinSolveConfig,
) -> Result<(DenseMatrix, LinSolveReport), LinSolveError> {
    let cols: Result<Vec<(Vec<C64>, ColumnReport)>, LinSolveError> = (0..rhs.cols())
        .into_par_iter()
        .map(|j| {
            let b = rhs.col(j);
            if b.iter().all(|z| *z == C64::new(0.0, 0.0)) {
                return Ok((b.to_vec(), ColumnReport::exact()));
            }
            gmres_solve(op, b, cfg, None)
        })
        .collect();
    Ok(assemble(rhs.rows(), cols?))
}

fn assemble(n: usize, cols: Vec<(Vec<C64>, ColumnReport)>) -> (DenseMatrix, LinSolveReport) {
    let mut report = LinSolveReport::default();
    let mut data = Vec::with_capacity(cols.len());
    for (x, c) in cols {
        report.push(&c);
        data.push(x);
    }
    (DenseMatrix::from_columns(n, &data), report)
}

/// Solver for a fixed pencil and a fixed set of shifts. With the direct
/// backend every shift is factored once, and solves at the conjugate shift
/// reuse that factorization through the adjoint.
#[derive(Debug)]
pub struct ShiftedSolver<'p> {
    pencil: &'p SparseHermitianPencil,
    shifts: Vec<C64>,
    cfg: LinSolveConfig,
    factors: Option<Vec<DenseLu>>,
}

impl<'p> ShiftedSolver<'p> {
    pub fn new(
        pencil: &'p SparseHermitianPencil,
        shifts: &[C64],
        cfg: &LinSolveConfig,
    ) -> Result<Self, LinSolveError> {
        cfg.validate()?;
        let factors = match cfg.backend {
            Backend::DirectDense => {
                let f: Result<Vec<DenseLu>, LinSolveError> = shifts
                    .par_iter()
                    .map(|&z| DenseLu::factor(&ShiftedOperator::new(pencil, z), cfg.dense_cap))
                    .collect();
                Some(f?)
            }
            Backend::Gmres => None,
        };
        Ok(Self {
            pencil,
            shifts: shifts.to_vec(),
            cfg: cfg.clone(),
            factors,
        })
    }

    pub fn config(&self) -> &LinSolveConfig {
        &self.cfg
    }

    pub fn shifts(&self) -> &[C64] {
        &self.shifts
    }

    /// Solves `(z_k B - A) V = rhs`, or the system at `conj(z_k)` when
    /// `conjugate` is set.
    pub fn solve(
        &self,
        k: usize,
        conjugate: bool,
        rhs: &DenseMatrix,
    ) -> Result<(DenseMatrix, LinSolveReport), LinSolveError> {
        if rhs.rows() != self.pencil.n() {
            return Err(LinSolveError::DimensionMismatch {
                expected: self.pencil.n(),
                got: rhs.rows(),
            });
        }
        let z = if conjugate {
            self.shifts[k].conj()
        } else {
            self.shifts[k]
        };
        let op = ShiftedOperator::new(self.pencil, z);
        match &self.factors {
            Some(f) => Ok(lu_block(&f[k], &op, rhs, conjugate)),
            None => gmres_block(&op, rhs, &self.cfg),
        }
    }
}
