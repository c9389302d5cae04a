use std::f64::consts::PI;

use rayon::prelude::*;

use crate::contour::{build_contour, Contour};
use crate::dense::{
    cholesky_posdef_check, default_rank_tol, dot, generalized_eigensolve, norm2, principal_angle,
    rank_revealing_basis, DenseError, DenseMatrix, HERMITIAN_TOL,
};
use crate::linsolve::{LinSolveConfig, LinSolveReport, ShiftedSolver};
use crate::sparse::SparseHermitianPencil;
use crate::C64;

use super::criteria::{residual_bound, trace_change};
use super::start::check_rank;
use super::{
    Criterion, FeastConfig, FeastError, FeastOutcome, FeastStatus, IterationRecord, IterationTrace,
    RankStrategy, RitzSet, StartingBasis, STAGNATION_ANGLE_DEG, STAGNATION_WINDOW,
};

/// Trace tolerance used for the recorded trace signal when the residual
/// criterion is the active one.
const RECORD_TRACE_TOL: f64 = 1e-13;

/// A pencil, a configuration and the prepared shifted solvers. Reusable
/// across starting bases and subspace sizes for the same interval.
pub struct FeastSolver<'p> {
    pencil: &'p SparseHermitianPencil,
    cfg: FeastConfig,
    contour: Contour,
    lin: ShiftedSolver<'p>,
    reference: Option<DenseMatrix>,
}

impl<'p> FeastSolver<'p> {
    pub fn new(pencil: &'p SparseHermitianPencil, cfg: FeastConfig) -> Result<Self, FeastError> {
        cfg.validate()?;
        let contour = build_contour(&cfg.interval, cfg.quadrature_m, cfg.aspect)?;
        let lin = ShiftedSolver::new(pencil, &contour.nodes, &cfg.lin)?;
        Ok(Self {
            pencil,
            cfg,
            contour,
            lin,
            reference: None,
        })
    }

    /// Reference eigenspace for the per-iteration angle diagnostic.
    pub fn with_reference(mut self, reference: DenseMatrix) -> Self {
        self.reference = Some(reference);
        self
    }

    pub fn set_m_estimate(&mut self, m: usize) {
        self.cfg.interval.m_estimate = m;
    }

    pub fn config(&self) -> &FeastConfig {
        &self.cfg
    }

    pub fn contour(&self) -> &Contour {
        &self.contour
    }

    pub fn pencil(&self) -> &SparseHermitianPencil {
        self.pencil
    }

    /// Quadrature approximation of the filtered block
    /// `(1/2πi) Σ_k [w_k (z_k B - A)⁻¹ - conj(w_k) (conj(z_k) B - A)⁻¹] B Y`.
    pub fn build_subspace(
        &self,
        y: &DenseMatrix,
    ) -> Result<(DenseMatrix, LinSolveReport), FeastError> {
        assemble_subspace(
            self.pencil,
            &self.contour,
            &self.lin,
            y,
            self.cfg.force_complex,
        )
    }

    pub fn solve(&self, start: &StartingBasis) -> Result<FeastOutcome, FeastError> {
        let pencil = self.pencil;
        let cfg = &self.cfg;
        let n = pencil.n();
        if start.y.rows() != n {
            return Err(DenseError::DimensionMismatch {
                expected: n,
                got: start.y.rows(),
            }
            .into());
        }
        if start.cols() != cfg.interval.m_estimate {
            return Err(FeastError::InvalidConfig(format!(
                "starting basis has {} columns but the estimate is {}",
                start.cols(),
                cfg.interval.m_estimate
            )));
        }
        if start.cols() > n {
            return Err(FeastError::InvalidConfig(format!(
                "subspace size {} exceeds the dimension {n}",
                start.cols()
            )));
        }
        check_rank(&start.y)?;
        let bound = residual_bound(
            &cfg.interval,
            n,
            cfg.residual_eps(),
            cfg.residual_scale_floor,
        )?;
        let trace_tol = match cfg.criterion {
            Criterion::Trace { tol } => tol,
            Criterion::Residual { .. } => RECORD_TRACE_TOL,
        };

        let mut y = start.y.clone();
        let mut records = Vec::new();
        let mut prev_span: Option<DenseMatrix> = None;
        let mut prev_trace: Option<f64> = None;
        let mut stagnant = 0;
        let mut status = FeastStatus::MaxIters;
        let mut converged_at = None;
        let mut ritz = None;

        for it in 1..=cfg.max_feast_iters {
            let subspace_dim = y.cols();
            let (mut u, lin_report) = self.build_subspace(&y)?;
            if u.max_abs() == 0.0 {
                return Err(FeastError::EmptySubspace);
            }
            let mut revealed_rank = None;
            if let RankStrategy::SvdReveal { tol } = cfg.rank_strategy {
                let rr = rank_revealing_basis(&u, tol)?;
                revealed_rank = Some(rr.rank);
                u = rr.basis;
            }

            let (a_u, b_u) = rayleigh_quotients(&u, pencil)?;
            let b_posdef = cholesky_posdef_check(&b_u);
            let rank_tol = cfg.rank_tol.unwrap_or_else(|| default_rank_tol(u.cols()));
            let reduced = generalized_eigensolve(&a_u, &b_u, rank_tol)?;
            if reduced.effective_rank == 0 {
                return Err(FeastError::EmptySubspace);
            }

            let mut x = u.matmul(&reduced.vectors);
            let mut bx = pencil.b().apply_block(&x);
            for j in 0..x.cols() {
                let s = dot(x.col(j), bx.col(j)).re.max(0.0).sqrt();
                if s > 0.0 {
                    x.col_mut(j).iter_mut().for_each(|z| *z /= s);
                    bx.col_mut(j).iter_mut().for_each(|z| *z /= s);
                }
            }
            let ax = pencil.a().spmm(&x).expect("pencil dimension");
            // Full-size Rayleigh quotients of the assembled vectors; same
            // values as the reduced solve up to its conditioning error.
            let values: Vec<f64> = (0..x.cols())
                .map(|j| {
                    let den = dot(x.col(j), bx.col(j)).re;
                    if den > 0.0 {
                        dot(x.col(j), ax.col(j)).re / den
                    } else {
                        reduced.values[j]
                    }
                })
                .collect();
            let residuals: Vec<f64> = (0..x.cols())
                .map(|j| {
                    let l = values[j];
                    ax.col(j)
                        .iter()
                        .zip(bx.col(j))
                        .map(|(a, b)| (a - b * l).norm_sqr())
                        .sum::<f64>()
                        .sqrt()
                })
                .collect();
            let in_interval: Vec<bool> = values.iter().map(|&l| cfg.interval.contains(l)).collect();
            let converged: Vec<bool> = residuals
                .iter()
                .zip(&in_interval)
                .map(|(&r, &inside)| inside && r <= bound)
                .collect();
            let set = RitzSet {
                values,
                vectors: x,
                residuals,
                in_interval,
                converged,
            };

            let in_count = set.in_interval_count();
            let trace: f64 = set.in_interval_values().iter().sum();
            let change = prev_trace.and_then(|p| trace_change(trace, p).ok());
            let trace_fired = change.is_some_and(|c| c < trace_tol);
            let residual_fired = in_count > 0 && set.converged_count() == in_count;
            let fired = match cfg.criterion {
                Criterion::Trace { .. } => trace_fired,
                Criterion::Residual { .. } => residual_fired,
            };

            let span = set.in_interval_vectors();
            let angle_to_prev = match &prev_span {
                Some(p) if span.cols() > 0 && p.cols() > 0 => principal_angle(&span, p).ok(),
                _ => None,
            };
            let angle_to_reference = match &self.reference {
                Some(r) if span.cols() > 0 && r.cols() > 0 => principal_angle(&span, r).ok(),
                _ => None,
            };
            let (residual_min, residual_max) = set.residual_range().unwrap_or((f64::NAN, f64::NAN));
            records.push(IterationRecord {
                iteration: it,
                subspace_dim,
                revealed_rank,
                b_posdef,
                effective_rank: reduced.effective_rank,
                trace,
                trace_change: change,
                residual_min,
                residual_max,
                residual_bound: bound,
                in_interval: in_count,
                converged: set.converged_count(),
                trace_fired,
                residual_fired,
                angle_to_prev,
                angle_to_reference,
                values: set.values.clone(),
                residuals: set.residuals.clone(),
                in_interval_flags: set.in_interval.clone(),
                lin_max_residual: lin_report.max_residual(),
                lin_iterations: lin_report.total_iterations(),
            });

            if fired && converged_at.is_none() {
                converged_at = Some(it);
            }
            let last = it == cfg.max_feast_iters;
            if fired && (cfg.stop_on_convergence || last) {
                status = FeastStatus::Converged;
                ritz = Some(set);
                break;
            }
            if !fired && angle_to_prev.is_some_and(|a| a < STAGNATION_ANGLE_DEG) {
                stagnant += 1;
            } else {
                stagnant = 0;
            }
            if stagnant >= STAGNATION_WINDOW {
                status = FeastStatus::Stagnated;
                ritz = Some(set);
                break;
            }

            y = match cfg.rank_strategy {
                RankStrategy::CholeskyCheck if reduced.effective_rank < u.cols() => {
                    // Keep M̃ columns: refill with the discarded directions.
                    let mut extra = u.matmul(&reduced.discarded);
                    for j in 0..extra.cols() {
                        let s = norm2(extra.col(j));
                        if s > 0.0 {
                            extra.col_mut(j).iter_mut().for_each(|z| *z /= s);
                        }
                    }
                    set.vectors.hstack(&extra)
                }
                _ => set.vectors.clone(),
            };
            prev_span = Some(span);
            prev_trace = Some(trace);
            ritz = Some(set);
        }

        let ritz = ritz.expect("at least one iteration");
        Ok(FeastOutcome {
            iterations: records.len(),
            ritz,
            trace: IterationTrace { records },
            status,
            converged_at,
        })
    }
}

fn assemble_subspace(
    pencil: &SparseHermitianPencil,
    contour: &Contour,
    lin: &ShiftedSolver<'_>,
    y: &DenseMatrix,
    force_complex: bool,
) -> Result<(DenseMatrix, LinSolveReport), FeastError> {
    if y.rows() != pencil.n() {
        return Err(DenseError::DimensionMismatch {
            expected: pencil.n(),
            got: y.rows(),
        }
        .into());
    }
    let by = pencil.b().apply_block(y);
    let real = !force_complex && pencil.is_real() && y.is_real();
    let parts: Result<Vec<_>, FeastError> = (0..contour.len())
        .into_par_iter()
        .map(|k| {
            let (v, mut rep) = lin.solve(k, false, &by)?;
            let vc = if real {
                None
            } else {
                let (vc, r2) = lin.solve(k, true, &by)?;
                rep.extend(&r2);
                Some(vc)
            };
            Ok((v, vc, rep))
        })
        .collect();

    let n = pencil.n();
    let m = y.cols();
    let mut acc = DenseMatrix::zeros(n, m);
    let mut report = LinSolveReport::default();
    let scale = C64::new(0.0, -1.0 / (2.0 * PI));
    for (k, (v, vc, rep)) in parts?.into_iter().enumerate() {
        let w = contour.weights[k];
        report.extend(&rep);
        for j in 0..m {
            let out = acc.col_mut(j);
            match &vc {
                None => {
                    for (o, x) in out.iter_mut().zip(v.col(j)) {
                        *o += w * x;
                    }
                }
                Some(vc) => {
                    let wc = w.conj();
                    for ((o, x), xc) in out.iter_mut().zip(v.col(j)).zip(vc.col(j)) {
                        *o += (w * x - wc * xc) * scale;
                    }
                }
            }
        }
    }
    if real {
        // (1/2πi)(S - conj(S)) = Im(S)/π.
        let u = DenseMatrix::from_fn(n, m, |i, j| C64::new(acc[(i, j)].im / PI, 0.0));
        return Ok((u, report));
    }
    Ok((acc, report))
}

/// Standalone filtered-subspace construction for a single call.
pub fn build_subspace(
    pencil: &SparseHermitianPencil,
    contour: &Contour,
    y: &DenseMatrix,
    lin_cfg: &LinSolveConfig,
) -> Result<(DenseMatrix, LinSolveReport), FeastError> {
    let lin = ShiftedSolver::new(pencil, &contour.nodes, lin_cfg)?;
    assemble_subspace(pencil, contour, &lin, y, false)
}

/// `(U^H A U, U^H B U)`, symmetrized after checking the asymmetry.
///
/// The asymmetry is rounding of size `ε·|M|·|u_i|·|u_j|`, so it is measured
/// against `max|M|·max_j |u_j|^2` as well as the largest reduced entry;
/// columns with tiny norms would otherwise fail a purely relative check.
pub fn rayleigh_quotients(
    u: &DenseMatrix,
    pencil: &SparseHermitianPencil,
) -> Result<(DenseMatrix, DenseMatrix), FeastError> {
    if u.rows() != pencil.n() {
        return Err(DenseError::DimensionMismatch {
            expected: pencil.n(),
            got: u.rows(),
        }
        .into());
    }
    let au = pencil.a().spmm(u).expect("pencil dimension");
    let bu = pencil.b().apply_block(u);
    let a_u = u.adjoint_mul(&au);
    let b_u = u.adjoint_mul(&bu);
    let col_sq = u.columns().map(|c| norm2(c).powi(2)).fold(0.0, f64::max);
    let ok = |s: &DenseMatrix, m_scale: f64| {
        s.hermitian_defect() <= HERMITIAN_TOL * s.max_abs().max(m_scale * col_sq)
    };
    if !ok(&a_u, pencil.a().max_abs()) || !ok(&b_u, pencil.b().max_abs()) {
        return Err(DenseError::NotHermitian.into());
    }
    Ok((a_u.hermitian_part(), b_u.hermitian_part()))
}

/// One-call driver.
pub fn feast_solve(
    pencil: &SparseHermitianPencil,
    cfg: &FeastConfig,
    start: &StartingBasis,
) -> Result<FeastOutcome, FeastError> {
    FeastSolver::new(pencil, cfg.clone())?.solve(start)
}
