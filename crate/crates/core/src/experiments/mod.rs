//! Config-driven experiment runners producing CSV tables.

mod config;
mod csv;
mod input;
mod oracle;
mod runners;

use std::fmt;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use thiserror::Error;

use crate::contour::SearchInterval;
use crate::feast::{Criterion, FeastConfig, FeastError, RankStrategy};
use crate::linsolve::{Backend, LinSolveConfig};
use crate::multi::MultiError;
use crate::sparse::SparseError;

pub use config::Config;
pub use csv::{Cell, CsvReport};
pub use input::{load_input, planted_bands, Input};
pub use oracle::{dense_oracle, DenseOracle};

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("config: {0}")]
    Config(String),
    #[error("io: {0}")]
    Io(String),
    #[error("oracle: {0}")]
    Oracle(String),
    #[error(transparent)]
    Sparse(#[from] SparseError),
    #[error(transparent)]
    Feast(#[from] FeastError),
    #[error(transparent)]
    Multi(#[from] MultiError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExperimentKind {
    SubspaceSweep,
    DeflatedStart,
    StoppingDemo,
    LinsolveTolSweep,
    MultiIntervalOrth,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 5] = [
        ExperimentKind::SubspaceSweep,
        ExperimentKind::DeflatedStart,
        ExperimentKind::StoppingDemo,
        ExperimentKind::LinsolveTolSweep,
        ExperimentKind::MultiIntervalOrth,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            ExperimentKind::SubspaceSweep => "subspace_sweep",
            ExperimentKind::DeflatedStart => "deflated_start",
            ExperimentKind::StoppingDemo => "stopping_demo",
            ExperimentKind::LinsolveTolSweep => "linsolve_tol_sweep",
            ExperimentKind::MultiIntervalOrth => "multi_interval_orth",
        }
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ExperimentKind {
    type Err = ExperimentError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| ExperimentError::Config(format!("unknown experiment kind {s}")))
    }
}

/// Tables of one experiment. `completed` is false when some run inside the
/// experiment errored; non-convergence is recorded in the tables instead.
#[derive(Debug, Clone)]
pub struct ExperimentReport {
    pub kind: ExperimentKind,
    pub tables: Vec<CsvReport>,
    pub gnuplot: Option<String>,
    pub completed: bool,
    /// Fully resolved parameters, `key = value` per line.
    pub config_echo: String,
}

impl ExperimentReport {
    pub fn table(&self, name: &str) -> Option<&CsvReport> {
        self.tables.iter().find(|t| t.name == name)
    }

    /// Writes every table, `config.txt` and the optional `plot.gp`.
    pub fn write_to(&self, dir: &Path) -> Result<(), ExperimentError> {
        let io = |e: std::io::Error| ExperimentError::Io(format!("{}: {e}", dir.display()));
        fs::create_dir_all(dir).map_err(io)?;
        fs::write(
            dir.join("config.txt"),
            format!("kind = {}\n{}", self.kind, self.config_echo),
        )
        .map_err(io)?;
        for t in &self.tables {
            t.write_to(dir)?;
        }
        if let Some(g) = &self.gnuplot {
            fs::write(dir.join("plot.gp"), g).map_err(io)?;
        }
        Ok(())
    }
}

/// Runs one experiment on a pool of `jobs` threads. Rows come out in grid
/// order regardless of `jobs`. Unknown config keys are rejected after the
/// run has resolved every key it reads.
pub fn run_experiment(
    kind: ExperimentKind,
    cfg: &mut Config,
    jobs: usize,
) -> Result<ExperimentReport, ExperimentError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| ExperimentError::Config(format!("thread pool: {e}")))?;
    let gnuplot = cfg.bool_or("gnuplot", false)?;
    let out = pool.install(|| match kind {
        ExperimentKind::SubspaceSweep => runners::subspace_sweep(cfg),
        ExperimentKind::DeflatedStart => runners::deflated_start(cfg),
        ExperimentKind::StoppingDemo => runners::stopping_demo(cfg),
        ExperimentKind::LinsolveTolSweep => runners::linsolve_tol_sweep(cfg),
        ExperimentKind::MultiIntervalOrth => runners::multi_interval_orth(cfg),
    })?;
    cfg.finish()?;
    Ok(ExperimentReport {
        kind,
        gnuplot: gnuplot.then(|| runners::gnuplot_script(kind)),
        tables: out.tables,
        completed: out.completed,
        config_echo: cfg.echo(),
    })
}

/// Solver defaults that differ between experiment kinds.
#[derive(Debug, Clone, Copy)]
pub(crate) struct SolverDefaults {
    pub criterion: &'static str,
    pub backend: &'static str,
    pub stop_on_convergence: bool,
}

impl Default for SolverDefaults {
    fn default() -> Self {
        Self {
            criterion: "residual",
            backend: "direct",
            stop_on_convergence: true,
        }
    }
}

/// Reads the solver keys shared by all experiments.
pub(crate) fn feast_config(
    cfg: &mut Config,
    interval: SearchInterval,
    d: SolverDefaults,
) -> Result<FeastConfig, ExperimentError> {
    let mut fc = FeastConfig::new(interval);
    fc.quadrature_m = cfg.usize_or("quad_nodes", fc.quadrature_m)?;
    fc.aspect = cfg.f64_or("aspect", fc.aspect)?;
    fc.max_feast_iters = cfg.usize_or("max_iters", fc.max_feast_iters)?;
    fc.criterion = match cfg.str_or("criterion", d.criterion).as_str() {
        "residual" => Criterion::Residual {
            eps: cfg.f64_or("eps", f64::EPSILON)?,
        },
        "trace" => Criterion::Trace {
            tol: cfg.f64_or("trace_tol", 1e-13)?,
        },
        other => {
            return Err(ExperimentError::Config(format!(
                "criterion {other}: expected residual or trace"
            )))
        }
    };
    let backend = match cfg.str_or("backend", d.backend).as_str() {
        "direct" => Backend::DirectDense,
        "gmres" => Backend::Gmres,
        other => {
            return Err(ExperimentError::Config(format!(
                "backend {other}: expected direct or gmres"
            )))
        }
    };
    fc.lin = LinSolveConfig {
        tol: cfg.f64_or("lin_tol", 1e-12)?,
        max_iters: cfg.opt_usize("gmres_max_iters")?,
        restart: cfg.usize_or("gmres_restart", fc.lin.restart)?,
        backend,
        dense_cap: cfg.usize_or("dense_cap", fc.lin.dense_cap)?,
    };
    fc.rank_strategy = match cfg.str_or("rank_strategy", "cholesky").as_str() {
        "cholesky" => RankStrategy::CholeskyCheck,
        "svd" => RankStrategy::SvdReveal {
            tol: cfg.f64_or("reveal_tol", crate::feast::DEFAULT_REVEAL_TOL)?,
        },
        other => {
            return Err(ExperimentError::Config(format!(
                "rank_strategy {other}: expected cholesky or svd"
            )))
        }
    };
    fc.residual_scale_floor = cfg.opt_f64("residual_scale_floor")?;
    fc.rank_tol = cfg.opt_f64("rank_tol")?;
    fc.stop_on_convergence = cfg.bool_or("stop_on_convergence", d.stop_on_convergence)?;
    fc.force_complex = cfg.bool_or("force_complex", false)?;
    fc.validate()?;
    Ok(fc)
}

/// Search interval from `interval_lo`/`interval_hi`, or from the oracle via
/// `lowest = k` / `largest = k`.
pub(crate) fn resolve_interval(
    cfg: &mut Config,
    oracle: &DenseOracle,
) -> Result<(f64, f64), ExperimentError> {
    let n = oracle.values.len();
    let lo = cfg.opt_f64("interval_lo")?;
    let hi = cfg.opt_f64("interval_hi")?;
    let (lo, hi) = match (lo, hi) {
        (Some(lo), Some(hi)) => (lo, hi),
        (None, None) => {
            if let Some(k) = cfg.opt_usize("lowest")?.filter(|&k| k >= 1 && k <= n) {
                oracle.interval_for(0, k - 1)
            } else if let Some(k) = cfg.opt_usize("largest")?.filter(|&k| k >= 1 && k <= n) {
                oracle.interval_for(n - k, n - 1)
            } else {
                return Err(ExperimentError::Config(
                    "need interval_lo and interval_hi, or lowest/largest = k with 1 <= k <= n"
                        .into(),
                ));
            }
        }
        _ => {
            return Err(ExperimentError::Config(
                "interval_lo and interval_hi go together".into(),
            ))
        }
    };
    if !(lo < hi) {
        return Err(ExperimentError::Config(format!(
            "empty interval [{lo}, {hi}]"
        )));
    }
    cfg.set_resolved("interval_lo", lo);
    cfg.set_resolved("interval_hi", hi);
    Ok((lo, hi))
}

pub(crate) struct RunnerOutput {
    pub tables: Vec<CsvReport>,
    pub completed: bool,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn col(t: &CsvReport, name: &str) -> Vec<Cell> {
        let c = t.column(name).unwrap();
        t.rows().iter().map(|r| r[c].clone()).collect()
    }

    fn planted(extra: &str) -> Config {
        Config::parse(&format!(
            "seed = 1\ngenerator = planted\nbands = 1:2:4, 5:9:26\ninterval_lo = 0.5\ninterval_hi = 2.5\n{extra}"
        ))
        .unwrap()
    }

    #[test]
    fn kinds_round_trip() {
        for k in ExperimentKind::ALL {
            assert_eq!(k.as_str().parse::<ExperimentKind>().unwrap(), k);
        }
        assert!("nope".parse::<ExperimentKind>().is_err());
    }

    #[test]
    fn subspace_sweep_small() {
        let mut c = planted("m_tilde = 2, 6..7");
        let r = run_experiment(ExperimentKind::SubspaceSweep, &mut c, 1).unwrap();
        assert!(r.completed);
        let s = r.table("sweep").unwrap();
        assert_eq!(s.len(), 3);
        assert_eq!(col(s, "status")[1], Cell::Text("converged".into()));
        assert_eq!(col(s, "m_exact")[0], Cell::Int(4));
        assert!(r.config_echo.contains("quad_nodes = 8"));
        assert!(!r.table("angles").unwrap().is_empty());
    }

    #[test]
    fn jobs_do_not_change_output() {
        let run = |jobs| {
            let mut c = planted("m_tilde = 5..8");
            let r = run_experiment(ExperimentKind::SubspaceSweep, &mut c, jobs).unwrap();
            r.tables.iter().map(CsvReport::render).collect::<Vec<_>>()
        };
        assert_eq!(run(1), run(3));
    }

    #[test]
    fn oversized_estimate_is_recorded_not_raised() {
        let mut c = planted("m_tilde = 6, 31");
        let r = run_experiment(ExperimentKind::SubspaceSweep, &mut c, 1).unwrap();
        assert!(!r.completed);
        let st = col(r.table("sweep").unwrap(), "status");
        assert!(matches!(&st[1], Cell::Text(s) if s.starts_with("error")));
    }

    #[test]
    fn unknown_key_rejected() {
        let mut c = planted("m_tilde = 6\nquad_node = 8");
        assert!(matches!(
            run_experiment(ExperimentKind::SubspaceSweep, &mut c, 1),
            Err(ExperimentError::Config(_))
        ));
    }

    #[test]
    fn deflated_start_small() {
        let mut c = planted("m_tilde = 7\ndeflate = 2");
        let r = run_experiment(ExperimentKind::DeflatedStart, &mut c, 1).unwrap();
        assert!(r.completed);
        assert_eq!(r.table("first_converged").unwrap().len(), 8);
        assert_eq!(r.table("summary").unwrap().len(), 2);
    }

    #[test]
    fn zero_deflation_matches_plain() {
        let mut c = planted("m_tilde = 7\ndeflate = 0");
        let r = run_experiment(ExperimentKind::DeflatedStart, &mut c, 1).unwrap();
        let t = r.table("convergence").unwrap();
        let rows = t.rows();
        let half = rows.len() / 2;
        for (p, d) in rows[..half].iter().zip(&rows[half..]) {
            assert_eq!(p[0], Cell::Text("plain".into()));
            assert_eq!(p[1..], d[1..]);
        }
    }

    #[test]
    fn stopping_demo_small() {
        let mut c = planted("m_tilde = 7");
        let r = run_experiment(ExperimentKind::StoppingDemo, &mut c, 1).unwrap();
        let s = r.table("summary").unwrap();
        assert_eq!(col(s, "criterion")[0], Cell::Text("trace".into()));
        assert!(r.table("trace").unwrap().len() >= 2);
    }

    #[test]
    fn linsolve_sweep_small() {
        let mut c = Config::parse(
            "seed = 1\ngenerator = diag_pencil\nn = 40\nlargest = 3\nm_tilde = 6\nmax_iters = 4\nlin_tols = 1e-6, 1e-10\n",
        )
        .unwrap();
        let r = run_experiment(ExperimentKind::LinsolveTolSweep, &mut c, 1).unwrap();
        let s = r.table("sweep").unwrap();
        assert_eq!(s.len(), 2);
        assert_eq!(col(s, "iters")[0], Cell::Int(4));
        assert_eq!(r.table("history").unwrap().len(), 8);
        assert!(r.config_echo.contains("backend = gmres"));
    }

    #[test]
    fn multi_interval_modes() {
        let mut c = Config::parse("seed = 1\ngenerator = planted\nbands = 0:10:20\ninterval_lo = -0.5\ninterval_hi = 10.5\nks = 1, 2\n")
            .unwrap();
        let r = run_experiment(ExperimentKind::MultiIntervalOrth, &mut c, 1).unwrap();
        let o = r.table("orth").unwrap();
        assert_eq!(col(o, "merged"), vec![Cell::Int(20), Cell::Int(20)]);
        assert!(r.table("orth_matrix_k1").is_none());

        let mut c = Config::parse(
            "seed = 1\ngenerator = clustered_tridiagonal\nn = 60\ncluster_size = 5\ncluster_gap = 1e-10\n",
        )
        .unwrap();
        c.set("mode", "cluster");
        let r = run_experiment(ExperimentKind::MultiIntervalOrth, &mut c, 1).unwrap();
        assert_eq!(r.table("orth").unwrap().len(), 3);
        assert_eq!(r.table("cluster").unwrap().len(), 3);
        assert!(r.table("orth_matrix_respecting").is_some());
    }

    #[test]
    fn report_written_to_disk() {
        let mut c = planted("m_tilde = 6\ngnuplot = true");
        let r = run_experiment(ExperimentKind::SubspaceSweep, &mut c, 1).unwrap();
        let dir = tempfile::tempdir().unwrap();
        r.write_to(dir.path()).unwrap();
        for f in ["config.txt", "sweep.csv", "angles.csv", "plot.gp"] {
            assert!(dir.path().join(f).exists(), "{f}");
        }
        let echo = std::fs::read_to_string(dir.path().join("config.txt")).unwrap();
        assert!(echo.starts_with("kind = subspace_sweep\n"));
    }
}
