use rayon::prelude::*;

use crate::contour::SearchInterval;
use crate::feast::{
    Criterion, FeastError, FeastOutcome, FeastSolver, IterationRecord, StartingBasis,
};
use crate::multi::{orth_level, solve_partitioned, MergedSpectrum, Partition};

use super::{
    dense_oracle, feast_config, load_input, resolve_interval, Cell, Config, CsvReport, DenseOracle,
    ExperimentError, ExperimentKind, RunnerOutput, SolverDefaults,
};

const NAN: f64 = f64::NAN;

fn solve_one(
    input_pencil: &crate::sparse::SparseHermitianPencil,
    fc: &crate::feast::FeastConfig,
    m: usize,
    start: Result<StartingBasis, FeastError>,
    reference: Option<&crate::dense::DenseMatrix>,
) -> Result<FeastOutcome, FeastError> {
    let mut fc = fc.clone();
    fc.interval = SearchInterval::new(fc.interval.lo, fc.interval.hi, m)?;
    let mut solver = FeastSolver::new(input_pencil, fc)?;
    if let Some(r) = reference.filter(|r| r.cols() > 0) {
        solver = solver.with_reference(r.clone());
    }
    solver.solve(&start?)
}

fn res_range(o: &FeastOutcome) -> (f64, f64) {
    o.ritz.residual_range().unwrap_or((NAN, NAN))
}

pub(super) fn subspace_sweep(cfg: &mut Config) -> Result<RunnerOutput, ExperimentError> {
    let input = load_input(cfg)?;
    let seed = cfg.req_u64("seed")?;
    let oracle = dense_oracle(&input.pencil)?;
    let (lo, hi) = resolve_interval(cfg, &oracle)?;
    let ms = cfg.usize_list("m_tilde", None)?;
    let fc = feast_config(
        cfg,
        SearchInterval::new(lo, hi, 1).map_err(FeastError::from)?,
        SolverDefaults::default(),
    )?;
    let reference = oracle.vectors_in(lo, hi);
    let m_exact = reference.cols();
    let n = input.pencil.n();

    let results: Vec<Result<FeastOutcome, FeastError>> = ms
        .par_iter()
        .map(|&m| {
            solve_one(
                &input.pencil,
                &fc,
                m,
                Ok(StartingBasis::random(n, m, seed)),
                Some(&reference),
            )
        })
        .collect();

    let mut sweep = CsvReport::new(
        "sweep",
        &[
            "m_tilde",
            "status",
            "iters",
            "converged_at",
            "in_interval",
            "converged",
            "m_exact",
            "res_min",
            "res_max",
            "residual_bound",
            "angle_to_exact_deg",
        ],
    );
    let mut angles = CsvReport::new(
        "angles",
        &[
            "m_tilde",
            "iteration",
            "angle_to_exact_deg",
            "angle_to_prev_deg",
            "res_min",
            "res_max",
        ],
    );
    let mut completed = true;
    for (&m, r) in ms.iter().zip(&results) {
        match r {
            Ok(o) => {
                let (rmin, rmax) = res_range(o);
                let last = o.trace.last();
                sweep.push(vec![
                    m.into(),
                    o.status.as_str().into(),
                    o.iterations.into(),
                    o.converged_at.into(),
                    o.ritz.in_interval_count().into(),
                    o.ritz.converged_count().into(),
                    m_exact.into(),
                    rmin.into(),
                    rmax.into(),
                    last.map_or(NAN, |l| l.residual_bound).into(),
                    last.and_then(|l| l.angle_to_reference).into(),
                ]);
                for rec in &o.trace.records {
                    angles.push(vec![
                        m.into(),
                        rec.iteration.into(),
                        rec.angle_to_reference.into(),
                        rec.angle_to_prev.into(),
                        rec.residual_min.into(),
                        rec.residual_max.into(),
                    ]);
                }
            }
            Err(e) => {
                completed = false;
                sweep.push(vec![
                    m.into(),
                    format!("error: {e}").into(),
                    0usize.into(),
                    None::<usize>.into(),
                    0usize.into(),
                    0usize.into(),
                    m_exact.into(),
                    NAN.into(),
                    NAN.into(),
                    NAN.into(),
                    NAN.into(),
                ]);
            }
        }
    }
    Ok(RunnerOutput {
        tables: vec![sweep, angles],
        completed,
    })
}

/// For each target eigenvalue, the nearest unused in-interval Ritz value
/// within `tol·max(1, |λ|)`.
pub(crate) fn match_targets(
    rec: &IterationRecord,
    targets: &[f64],
    tol: f64,
) -> Vec<Option<usize>> {
    let mut used = vec![false; rec.values.len()];
    targets
        .iter()
        .map(|&lam| {
            let best = (0..rec.values.len())
                .filter(|&i| rec.in_interval_flags[i] && !used[i])
                .map(|i| (i, (rec.values[i] - lam).abs()))
                .filter(|&(_, d)| d <= tol * lam.abs().max(1.0))
                .min_by(|a, b| a.1.total_cmp(&b.1))
                .map(|(i, _)| i);
            if let Some(i) = best {
                used[i] = true;
            }
            best
        })
        .collect()
}

pub(super) fn deflated_start(cfg: &mut Config) -> Result<RunnerOutput, ExperimentError> {
    let input = load_input(cfg)?;
    let seed = cfg.req_u64("seed")?;
    let oracle = dense_oracle(&input.pencil)?;
    let (lo, hi) = resolve_interval(cfg, &oracle)?;
    let m = cfg.req_usize("m_tilde")?;
    let deflate = cfg.usize_or("deflate", 10)?;
    let tol = cfg.f64_or("match_tol", 1e-6)?;
    let fc = feast_config(
        cfg,
        SearchInterval::new(lo, hi, 1).map_err(FeastError::from)?,
        SolverDefaults::default(),
    )?;
    let targets = oracle.values_in(lo, hi);
    let reference = oracle.vectors_in(lo, hi);
    let deflate = deflate.min(targets.len());
    let removed = reference.select_columns(&(0..deflate).collect::<Vec<_>>());
    let n = input.pencil.n();
    let b = input.pencil.b();

    let runs = [
        ("plain", Ok(StartingBasis::random(n, m, seed))),
        ("deflated", StartingBasis::deflated(n, m, seed, &removed, b)),
    ];
    let results: Vec<(&str, Result<FeastOutcome, FeastError>)> = runs
        .into_par_iter()
        .map(|(name, start)| {
            (
                name,
                solve_one(&input.pencil, &fc, m, start, Some(&reference)),
            )
        })
        .collect();

    let mut per_iter = CsvReport::new(
        "convergence",
        &[
            "run",
            "iteration",
            "eig_index",
            "eigenvalue",
            "ritz_value",
            "residual",
            "converged",
        ],
    );
    let mut first = CsvReport::new(
        "first_converged",
        &[
            "run",
            "eig_index",
            "eigenvalue",
            "deflated",
            "first_converged_iter",
        ],
    );
    let mut summary = CsvReport::new(
        "summary",
        &[
            "run",
            "status",
            "iters",
            "converged_at",
            "converged",
            "m_exact",
        ],
    );
    let mut completed = true;
    for (name, r) in &results {
        let o = match r {
            Ok(o) => o,
            Err(e) => {
                completed = false;
                summary.push(vec![
                    (*name).into(),
                    format!("error: {e}").into(),
                    0usize.into(),
                    None::<usize>.into(),
                    0usize.into(),
                    targets.len().into(),
                ]);
                continue;
            }
        };
        let mut first_at: Vec<Option<usize>> = vec![None; targets.len()];
        for rec in &o.trace.records {
            let matched = match_targets(rec, &targets, tol);
            for (j, mi) in matched.iter().enumerate() {
                let (val, res) = mi.map_or((NAN, NAN), |i| (rec.values[i], rec.residuals[i]));
                let conv = mi.is_some() && res <= rec.residual_bound;
                if conv && first_at[j].is_none() {
                    first_at[j] = Some(rec.iteration);
                }
                per_iter.push(vec![
                    (*name).into(),
                    rec.iteration.into(),
                    j.into(),
                    targets[j].into(),
                    val.into(),
                    res.into(),
                    conv.into(),
                ]);
            }
        }
        for (j, f) in first_at.iter().enumerate() {
            first.push(vec![
                (*name).into(),
                j.into(),
                targets[j].into(),
                (*name == "deflated" && j < deflate).into(),
                (*f).into(),
            ]);
        }
        summary.push(vec![
            (*name).into(),
            o.status.as_str().into(),
            o.iterations.into(),
            o.converged_at.into(),
            first_at.iter().filter(|f| f.is_some()).count().into(),
            targets.len().into(),
        ]);
    }
    Ok(RunnerOutput {
        tables: vec![per_iter, first, summary],
        completed,
    })
}

pub(super) fn stopping_demo(cfg: &mut Config) -> Result<RunnerOutput, ExperimentError> {
    let input = load_input(cfg)?;
    let seed = cfg.req_u64("seed")?;
    let oracle = dense_oracle(&input.pencil)?;
    let (lo, hi) = resolve_interval(cfg, &oracle)?;
    let m = cfg.req_usize("m_tilde")?;
    let defaults = SolverDefaults {
        criterion: "trace",
        ..SolverDefaults::default()
    };
    let fc = feast_config(
        cfg,
        SearchInterval::new(lo, hi, 1).map_err(FeastError::from)?,
        defaults,
    )?;
    let reference = oracle.vectors_in(lo, hi);
    let n = input.pencil.n();
    let r = solve_one(
        &input.pencil,
        &fc,
        m,
        Ok(StartingBasis::random(n, m, seed)),
        Some(&reference),
    );

    let mut trace = CsvReport::new(
        "trace",
        &[
            "iteration",
            "trace",
            "trace_change",
            "res_min",
            "res_max",
            "residual_bound",
            "in_interval",
            "converged",
            "trace_fired",
            "residual_fired",
            "angle_to_exact_deg",
        ],
    );
    let mut summary = CsvReport::new(
        "summary",
        &[
            "criterion",
            "status",
            "iters",
            "stopped_at",
            "res_max_at_stop",
            "residual_bound",
            "ratio",
            "converged_at_stop",
            "in_interval_at_stop",
            "m_exact",
            "false_convergence",
        ],
    );
    let crit = match fc.criterion {
        Criterion::Trace { .. } => "trace",
        Criterion::Residual { .. } => "residual",
    };
    let completed = match &r {
        Ok(o) => {
            for rec in &o.trace.records {
                trace.push(vec![
                    rec.iteration.into(),
                    rec.trace.into(),
                    rec.trace_change.into(),
                    rec.residual_min.into(),
                    rec.residual_max.into(),
                    rec.residual_bound.into(),
                    rec.in_interval.into(),
                    rec.converged.into(),
                    rec.trace_fired.into(),
                    rec.residual_fired.into(),
                    rec.angle_to_reference.into(),
                ]);
            }
            let stop = o
                .converged_at
                .and_then(|k| o.trace.records.iter().find(|r| r.iteration == k));
            let (rmax, bound, conv, inn, false_conv) = match stop {
                Some(s) => (
                    s.residual_max,
                    s.residual_bound,
                    s.converged,
                    s.in_interval,
                    !s.residual_fired,
                ),
                None => (NAN, NAN, 0, 0, false),
            };
            summary.push(vec![
                crit.into(),
                o.status.as_str().into(),
                o.iterations.into(),
                o.converged_at.into(),
                rmax.into(),
                bound.into(),
                (rmax / bound).into(),
                conv.into(),
                inn.into(),
                reference.cols().into(),
                false_conv.into(),
            ]);
            true
        }
        Err(e) => {
            summary.push(vec![
                crit.into(),
                format!("error: {e}").into(),
                0usize.into(),
                None::<usize>.into(),
                NAN.into(),
                NAN.into(),
                NAN.into(),
                0usize.into(),
                0usize.into(),
                reference.cols().into(),
                false.into(),
            ]);
            false
        }
    };
    Ok(RunnerOutput {
        tables: vec![trace, summary],
        completed,
    })
}

pub(super) fn linsolve_tol_sweep(cfg: &mut Config) -> Result<RunnerOutput, ExperimentError> {
    let input = load_input(cfg)?;
    let seed = cfg.req_u64("seed")?;
    let oracle = dense_oracle(&input.pencil)?;
    let (lo, hi) = resolve_interval(cfg, &oracle)?;
    let m = cfg.req_usize("m_tilde")?;
    let tols = cfg.f64_list_or("lin_tols", &[1e-6, 1e-8, 1e-10, 1e-12])?;
    let defaults = SolverDefaults {
        criterion: "trace",
        backend: "gmres",
        stop_on_convergence: false,
    };
    let fc = feast_config(
        cfg,
        SearchInterval::new(lo, hi, 1).map_err(FeastError::from)?,
        defaults,
    )?;
    let reference = oracle.vectors_in(lo, hi);
    let n = input.pencil.n();

    let results: Vec<Result<FeastOutcome, FeastError>> = tols
        .par_iter()
        .map(|&t| {
            let mut f = fc.clone();
            f.lin.tol = t;
            solve_one(
                &input.pencil,
                &f,
                m,
                Ok(StartingBasis::random(n, m, seed)),
                Some(&reference),
            )
        })
        .collect();

    let mut sweep = CsvReport::new(
        "sweep",
        &[
            "lin_tol",
            "status",
            "iters",
            "in_interval",
            "m_exact",
            "res_min",
            "res_max",
            "orth",
            "lin_max_residual",
            "lin_iterations_total",
            "trace_fired_at",
            "residual_fired_at",
            "angle_to_exact_deg",
        ],
    );
    let mut history = CsvReport::new(
        "history",
        &[
            "lin_tol",
            "iteration",
            "res_min",
            "res_max",
            "lin_max_residual",
            "lin_iterations",
        ],
    );
    let mut completed = true;
    for (&t, r) in tols.iter().zip(&results) {
        match r {
            Ok(o) => {
                let (rmin, rmax) = res_range(o);
                let orth = orth_level(&o.ritz.in_interval_vectors(), &input.pencil);
                let last = o.trace.last();
                sweep.push(vec![
                    t.into(),
                    o.status.as_str().into(),
                    o.iterations.into(),
                    o.ritz.in_interval_count().into(),
                    reference.cols().into(),
                    rmin.into(),
                    rmax.into(),
                    orth.into(),
                    last.map_or(NAN, |l| l.lin_max_residual).into(),
                    o.trace
                        .records
                        .iter()
                        .map(|r| r.lin_iterations)
                        .sum::<usize>()
                        .into(),
                    o.trace.trace_fired_at().into(),
                    o.trace.residual_fired_at().into(),
                    last.and_then(|l| l.angle_to_reference).into(),
                ]);
                for rec in &o.trace.records {
                    history.push(vec![
                        t.into(),
                        rec.iteration.into(),
                        rec.residual_min.into(),
                        rec.residual_max.into(),
                        rec.lin_max_residual.into(),
                        rec.lin_iterations.into(),
                    ]);
                }
            }
            Err(e) => {
                completed = false;
                let mut row: Vec<Cell> = vec![t.into(), format!("error: {e}").into()];
                row.extend([0usize.into(), 0usize.into(), reference.cols().into()]);
                row.extend([
                    NAN.into(),
                    NAN.into(),
                    NAN.into(),
                    NAN.into(),
                    0usize.into(),
                ]);
                row.extend([None::<usize>.into(), None::<usize>.into(), NAN.into()]);
                sweep.push(row);
            }
        }
    }
    Ok(RunnerOutput {
        tables: vec![sweep, history],
        completed,
    })
}

/// Subspace estimates `c + max(margin, ⌊factor·c⌋)` where `c` counts the
/// oracle eigenvalues in the subinterval widened by `window` of its width,
/// capped at `n`.
#[derive(Debug, Clone, Copy)]
struct EstimateRule {
    window: f64,
    margin: usize,
    factor: f64,
}

impl EstimateRule {
    fn from_config(cfg: &mut Config, d: EstimateRule) -> Result<Self, ExperimentError> {
        Ok(Self {
            window: cfg.f64_or("m_window", d.window)?,
            margin: cfg.usize_or("m_margin", d.margin)?,
            factor: cfg.f64_or("m_factor", d.factor)?,
        })
    }

    fn estimates(&self, oracle: &DenseOracle, boundaries: &[f64]) -> Vec<usize> {
        boundaries
            .windows(2)
            .map(|w| {
                let pad = self.window * (w[1] - w[0]);
                let c = oracle.count_in(w[0] - pad, w[1] + pad);
                (c + self.margin.max((self.factor * c as f64).floor() as usize))
                    .clamp(1, oracle.values.len())
            })
            .collect()
    }
}

struct PartitionCase {
    label: String,
    partition: Partition,
}

fn uniform_boundaries(lo: f64, hi: f64, k: usize) -> Vec<f64> {
    let mut b: Vec<f64> = (0..=k)
        .map(|i| lo + (hi - lo) * i as f64 / k as f64)
        .collect();
    b[k] = hi;
    b
}

/// Midpoint of the widest gap between consecutive values; `None` for fewer
/// than two values.
fn widest_gap_midpoint(values: &[f64]) -> Option<f64> {
    values
        .windows(2)
        .max_by(|a, b| (a[1] - a[0]).total_cmp(&(b[1] - b[0])))
        .map(|w| 0.5 * (w[0] + w[1]))
}

pub(super) fn multi_interval_orth(cfg: &mut Config) -> Result<RunnerOutput, ExperimentError> {
    let input = load_input(cfg)?;
    let seed = cfg.req_u64("seed")?;
    let oracle = dense_oracle(&input.pencil)?;
    let mode = cfg.str_or("mode", "k_sweep");
    let mut cases = Vec::new();
    let mut cluster_range = None;
    let (lo, hi, write_matrix_default);
    match mode.as_str() {
        "k_sweep" => {
            (lo, hi) = resolve_interval(cfg, &oracle)?;
            let ks = cfg.usize_list("ks", Some(&[1, 2, 3, 4, 5, 10]))?;
            let rule = EstimateRule::from_config(
                cfg,
                EstimateRule {
                    window: 0.0,
                    margin: 4,
                    factor: 0.5,
                },
            )?;
            for k in ks {
                let b = uniform_boundaries(lo, hi, k.max(1));
                let m = rule.estimates(&oracle, &b);
                cases.push(PartitionCase {
                    label: format!("k{k}"),
                    partition: Partition::new(b, m)?,
                });
            }
            write_matrix_default = false;
        }
        "boundaries" => {
            let b = cfg.f64_list_or("boundaries", &[])?;
            let rule = EstimateRule::from_config(
                cfg,
                EstimateRule {
                    window: 0.0,
                    margin: 4,
                    factor: 0.5,
                },
            )?;
            let m = match cfg.contains("m_estimates") {
                true => cfg.usize_list("m_estimates", None)?,
                false => rule.estimates(&oracle, &b),
            };
            (lo, hi) = (b[0], *b.last().unwrap_or(&b[0]));
            cfg.set_resolved("interval_lo", lo);
            cfg.set_resolved("interval_hi", hi);
            cases.push(PartitionCase {
                label: "custom".into(),
                partition: Partition::new(b, m)?,
            });
            write_matrix_default = true;
        }
        "cluster" => {
            let c = input.cluster.clone().ok_or_else(|| {
                ExperimentError::Config(
                    "mode = cluster needs generator = clustered_tridiagonal".into(),
                )
            })?;
            let span = c.above - c.below;
            let wf = cfg.f64_or("cluster_window", 2.0)?;
            (lo, hi) = match (cfg.opt_f64("interval_lo")?, cfg.opt_f64("interval_hi")?) {
                (Some(a), Some(b)) => (a, b),
                _ => (c.center - wf * span, c.center + wf * span),
            };
            cfg.set_resolved("interval_lo", lo);
            cfg.set_resolved("interval_hi", hi);
            let cmin = c.values[0];
            let cmax = c.values[c.values.len() - 1];
            let rule = EstimateRule::from_config(
                cfg,
                EstimateRule {
                    window: 0.2,
                    margin: 10,
                    factor: 0.0,
                },
            )?;
            let half = c.values.len() / 2;
            let split = if c.values.len() >= 2 {
                0.5 * (c.values[half - 1] + c.values[half])
            } else {
                c.center
            };
            let below: Vec<f64> = oracle
                .values_in(lo, hi)
                .into_iter()
                .filter(|&v| v < cmin)
                .collect();
            let above: Vec<f64> = oracle
                .values_in(lo, hi)
                .into_iter()
                .filter(|&v| v > cmax)
                .collect();
            let (Some(b1), Some(b2)) = (widest_gap_midpoint(&below), widest_gap_midpoint(&above))
            else {
                return Err(ExperimentError::Config(
                    "cluster window needs at least two eigenvalues on each side of the cluster"
                        .into(),
                ));
            };
            for (label, b) in [
                ("single", vec![lo, hi]),
                ("split", vec![lo, split, hi]),
                ("respecting", vec![lo, b1, b2, hi]),
            ] {
                let m = rule.estimates(&oracle, &b);
                cases.push(PartitionCase {
                    label: label.into(),
                    partition: Partition::new(b, m)?,
                });
            }
            let pad = 1e-8 * c.center.abs().max(1.0);
            cluster_range = Some((cmin - pad, cmax + pad));
            write_matrix_default = true;
        }
        other => {
            return Err(ExperimentError::Config(format!(
                "mode {other}: expected k_sweep, boundaries or cluster"
            )))
        }
    }
    let write_matrix = cfg.bool_or("write_matrix", write_matrix_default)?;
    let template = feast_config(
        cfg,
        SearchInterval::new(lo, hi, 1).map_err(FeastError::from)?,
        SolverDefaults::default(),
    )?;
    let expected = oracle.count_in(lo, hi);

    let results: Vec<Result<MergedSpectrum, ExperimentError>> = cases
        .par_iter()
        .map(|c| {
            solve_partitioned(&input.pencil, &c.partition, &template, seed)
                .map_err(ExperimentError::from)
        })
        .collect();

    let mut orth = CsvReport::new(
        "orth",
        &[
            "label",
            "k",
            "boundaries",
            "merged",
            "expected",
            "all_converged",
            "orth_global",
            "orth_local_min",
            "orth_local_max",
            "max_iters",
        ],
    );
    let mut local = CsvReport::new(
        "local",
        &[
            "label",
            "k",
            "sub",
            "lo",
            "hi",
            "m_estimate",
            "seed",
            "status",
            "iters",
            "in_interval",
            "orth_local",
        ],
    );
    let mut cluster = CsvReport::new(
        "cluster",
        &[
            "label",
            "cluster_first",
            "cluster_last",
            "orth_within_cluster",
            "orth_outside_cluster",
        ],
    );
    let mut tables = Vec::new();
    let mut completed = true;
    for (case, r) in cases.iter().zip(results) {
        let k = case.partition.k();
        let bstr = case
            .partition
            .boundaries()
            .iter()
            .map(|b| format!("{b:.16e}"))
            .collect::<Vec<_>>()
            .join(";");
        let merged = match r {
            Ok(m) => m,
            Err(e) => {
                completed = false;
                orth.push(vec![
                    case.label.as_str().into(),
                    k.into(),
                    format!("error: {e}").into(),
                    0usize.into(),
                    expected.into(),
                    false.into(),
                    NAN.into(),
                    NAN.into(),
                    NAN.into(),
                    0usize.into(),
                ]);
                continue;
            }
        };
        orth.push(vec![
            case.label.as_str().into(),
            k.into(),
            bstr.into(),
            merged.len().into(),
            expected.into(),
            merged.all_converged().into(),
            merged.orth_global.into(),
            merged.orth_local.iter().copied().reduce(f64::min).into(),
            merged.max_orth_local().into(),
            merged
                .runs
                .iter()
                .map(|r| r.iterations)
                .max()
                .unwrap_or(0)
                .into(),
        ]);
        for run in &merged.runs {
            local.push(vec![
                case.label.as_str().into(),
                k.into(),
                run.index.into(),
                run.interval.lo.into(),
                run.interval.hi.into(),
                run.interval.m_estimate.into(),
                (run.seed as usize).into(),
                run.status.as_str().into(),
                run.iterations.into(),
                run.ritz
                    .as_ref()
                    .map_or(0, |r| r.in_interval_count())
                    .into(),
                run.orth_local.into(),
            ]);
        }
        if let Some((cl, ch)) = cluster_range {
            let inside: Vec<bool> = merged.values.iter().map(|&v| v >= cl && v <= ch).collect();
            let (mut within, mut outside) = (0.0f64, 0.0f64);
            for i in 0..merged.len() {
                for j in 0..i {
                    let v = merged.orth_matrix[i][j];
                    if inside[i] && inside[j] {
                        within = within.max(v);
                    } else {
                        outside = outside.max(v);
                    }
                }
            }
            let first = inside.iter().position(|&b| b);
            let last = inside.iter().rposition(|&b| b);
            cluster.push(vec![
                case.label.as_str().into(),
                first.into(),
                last.into(),
                within.into(),
                outside.into(),
            ]);
        }
        if write_matrix {
            let mut t =
                CsvReport::new(&format!("orth_matrix_{}", case.label), &["i", "j", "value"]);
            for i in 0..merged.len() {
                for j in 0..merged.len() {
                    t.push(vec![i.into(), j.into(), merged.orth_matrix[i][j].into()]);
                }
            }
            tables.push(t);
        }
    }
    let mut out = vec![orth, local];
    if cluster_range.is_some() {
        out.push(cluster);
    }
    out.extend(tables);
    Ok(RunnerOutput {
        tables: out,
        completed,
    })
}

pub(super) fn gnuplot_script(kind: ExperimentKind) -> String {
    let head = "set datafile separator ','\nset terminal pngcairo size 900,600\nset key autotitle columnhead\n";
    let body = match kind {
        ExperimentKind::SubspaceSweep => {
            "set output 'sweep.png'\nset logscale y\nset xlabel 'm_tilde'\n\
             plot 'sweep.csv' using 1:9 with linespoints title 'max residual', \
             '' using 1:10 with lines title 'bound'\n"
        }
        ExperimentKind::DeflatedStart => {
            "set output 'first_converged.png'\nset xlabel 'eigenvalue index'\nset ylabel 'first converged iteration'\n\
             plot 'first_converged.csv' using 2:(strcol(1) eq 'plain'?$5:1/0) title 'plain', \
             '' using 2:(strcol(1) eq 'deflated'?$5:1/0) title 'deflated'\n"
        }
        ExperimentKind::StoppingDemo => {
            "set output 'trace.png'\nset logscale y\nset xlabel 'iteration'\n\
             plot 'trace.csv' using 1:(abs($3)) with linespoints title 'trace change', \
             '' using 1:5 with linespoints title 'max residual', '' using 1:6 with lines title 'bound'\n"
        }
        ExperimentKind::LinsolveTolSweep => {
            "set output 'history.png'\nset logscale y\nset xlabel 'iteration'\n\
             plot for [t in '1e-06 1e-08 1e-10 1e-12'] 'history.csv' using 2:(abs($1/t-1)<1e-6?$4:1/0) \
             with linespoints title 'lin_tol='.t\n"
        }
        ExperimentKind::MultiIntervalOrth => {
            "set output 'orth.png'\nset logscale y\nset xlabel 'k'\n\
             plot 'orth.csv' using 2:7 with linespoints title 'global', '' using 2:8 with linespoints title 'local min', '' using 2:9 with linespoints title 'local max'\n"
        }
    };
    format!("{head}{body}")
}
