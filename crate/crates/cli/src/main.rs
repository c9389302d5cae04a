use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use feast_core::contour::SearchInterval;
use feast_core::experiments::{run_experiment, Cell, Config, CsvReport, ExperimentKind};
use feast_core::feast::{
    Criterion, FeastConfig, FeastError, FeastOutcome, FeastSolver, StartingBasis,
};
use feast_core::linsolve::Backend;
use feast_core::sparse::{read_matrix_market, BMatrix, SparseHermitianPencil};

#[derive(Parser)]
#[command(
    name = "feast",
    version,
    about = "Contour-integration eigensolver for Hermitian-definite pencils"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Eigenpairs of A x = λ B x inside an interval.
    Solve(SolveArgs),
    /// Run one experiment from a key = value config file.
    Experiment(ExperimentArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum CriterionArg {
    Residual,
    Trace,
}

#[derive(Clone, Copy, ValueEnum)]
enum BackendArg {
    Direct,
    Gmres,
}

#[derive(Args)]
struct SolveArgs {
    /// Matrix Market file with A.
    #[arg(long)]
    matrix: PathBuf,
    /// Matrix Market file with B (identity when omitted).
    #[arg(long)]
    mass: Option<PathBuf>,
    #[arg(long, num_args = 2, value_names = ["LO", "HI"], allow_negative_numbers = true)]
    interval: Vec<f64>,
    /// Subspace size M̃.
    #[arg(long)]
    m_estimate: usize,
    #[arg(long, default_value_t = 8)]
    quad_nodes: usize,
    #[arg(long, value_enum, default_value = "residual")]
    criterion: CriterionArg,
    /// Residual criterion epsilon (machine epsilon by default).
    #[arg(long)]
    eps: Option<f64>,
    /// Trace criterion tolerance.
    #[arg(long, default_value_t = 1e-13)]
    trace_tol: f64,
    #[arg(long, default_value_t = 1e-12)]
    lin_tol: f64,
    #[arg(long, value_enum, default_value = "direct")]
    backend: BackendArg,
    #[arg(long, default_value_t = 20)]
    max_iters: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Threads for the per-node linear solves.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    /// Also write the in-interval eigenvectors.
    #[arg(long)]
    write_vectors: bool,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct ExperimentArgs {
    #[arg(value_parser = parse_kind)]
    kind: ExperimentKind,
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// Concurrent grid points; output order does not depend on it.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    /// Also write a gnuplot script (same as `gnuplot = true` in the config).
    #[arg(long)]
    gnuplot: bool,
}

fn parse_kind(s: &str) -> Result<ExperimentKind, String> {
    s.parse().map_err(|e| format!("{e}"))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Solve(a) => solve(a),
        Command::Experiment(a) => experiment(a),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

type CliResult<T> = Result<T, Box<dyn std::error::Error>>;

fn solve(a: SolveArgs) -> CliResult<bool> {
    let matrix = read_matrix_market(&a.matrix)?;
    let b = match &a.mass {
        Some(p) => BMatrix::Sparse(read_matrix_market(p)?),
        None => BMatrix::Identity(matrix.n()),
    };
    let pencil = SparseHermitianPencil::new(matrix, b)?;
    let interval = SearchInterval::new(a.interval[0], a.interval[1], a.m_estimate)?;
    let mut cfg = FeastConfig::new(interval);
    cfg.quadrature_m = a.quad_nodes;
    cfg.max_feast_iters = a.max_iters;
    cfg.criterion = match a.criterion {
        CriterionArg::Residual => Criterion::Residual {
            eps: a.eps.unwrap_or(f64::EPSILON),
        },
        CriterionArg::Trace => Criterion::Trace { tol: a.trace_tol },
    };
    cfg.lin.tol = a.lin_tol;
    cfg.lin.backend = match a.backend {
        BackendArg::Direct => Backend::DirectDense,
        BackendArg::Gmres => Backend::Gmres,
    };
    let pool = rayon_pool(a.jobs)?;
    let outcome = pool.install(|| -> Result<FeastOutcome, FeastError> {
        let solver = FeastSolver::new(&pencil, cfg.clone())?;
        solver.solve(&StartingBasis::random(pencil.n(), a.m_estimate, a.seed))
    })?;

    fs::create_dir_all(&a.out)?;
    write_solve_echo(&a, &cfg, pencil.n(), &a.out)?;
    let ritz = &outcome.ritz;
    let mut pairs = CsvReport::new(
        "eigenpairs",
        &["index", "eigenvalue", "residual", "converged"],
    );
    let inside = ritz.in_interval_indices();
    for (k, &i) in inside.iter().enumerate() {
        pairs.push(vec![
            k.into(),
            ritz.values[i].into(),
            ritz.residuals[i].into(),
            ritz.converged[i].into(),
        ]);
    }
    pairs.write_to(&a.out)?;
    let mut iters = CsvReport::new(
        "iterations",
        &[
            "iteration",
            "subspace_dim",
            "trace",
            "trace_change",
            "res_min",
            "res_max",
            "residual_bound",
            "in_interval",
            "converged",
            "trace_fired",
            "residual_fired",
            "lin_max_residual",
        ],
    );
    for r in &outcome.trace.records {
        iters.push(vec![
            r.iteration.into(),
            r.subspace_dim.into(),
            r.trace.into(),
            r.trace_change.into(),
            r.residual_min.into(),
            r.residual_max.into(),
            r.residual_bound.into(),
            r.in_interval.into(),
            r.converged.into(),
            r.trace_fired.into(),
            r.residual_fired.into(),
            r.lin_max_residual.into(),
        ]);
    }
    iters.write_to(&a.out)?;
    let mut summary = CsvReport::new(
        "summary",
        &[
            "status",
            "iters",
            "converged_at",
            "in_interval",
            "converged",
        ],
    );
    summary.push(vec![
        outcome.status.as_str().into(),
        outcome.iterations.into(),
        outcome.converged_at.into(),
        inside.len().into(),
        ritz.converged_count().into(),
    ]);
    summary.write_to(&a.out)?;
    if a.write_vectors {
        let x = ritz.in_interval_vectors();
        let mut v = CsvReport::new("eigenvectors", &["row", "col", "re", "im"]);
        for j in 0..x.cols() {
            for i in 0..x.rows() {
                let z = x[(i, j)];
                v.push(vec![
                    i.into(),
                    j.into(),
                    Cell::Float(z.re),
                    Cell::Float(z.im),
                ]);
            }
        }
        v.write_to(&a.out)?;
    }
    println!(
        "{}: {} iterations, {} eigenpairs in [{}, {}], {} converged",
        outcome.status.as_str(),
        outcome.iterations,
        inside.len(),
        a.interval[0],
        a.interval[1],
        ritz.converged_count()
    );
    Ok(true)
}

fn write_solve_echo(a: &SolveArgs, cfg: &FeastConfig, n: usize, dir: &Path) -> CliResult<()> {
    let crit = match cfg.criterion {
        Criterion::Residual { eps } => format!("criterion = residual\neps = {eps:e}\n"),
        Criterion::Trace { tol } => format!("criterion = trace\ntrace_tol = {tol:e}\n"),
    };
    let backend = match cfg.lin.backend {
        Backend::DirectDense => "direct",
        Backend::Gmres => "gmres",
    };
    let mass = a
        .mass
        .as_ref()
        .map_or("identity".to_string(), |p| p.display().to_string());
    let text = format!(
        "kind = solve\nmatrix = {}\nmass = {mass}\nn = {n}\ninterval_lo = {:e}\ninterval_hi = {:e}\nm_estimate = {}\n\
         quad_nodes = {}\naspect = {:e}\n{crit}lin_tol = {:e}\nbackend = {backend}\ngmres_restart = {}\n\
         max_iters = {}\nseed = {}\n",
        a.matrix.display(),
        cfg.interval.lo,
        cfg.interval.hi,
        cfg.interval.m_estimate,
        cfg.quadrature_m,
        cfg.aspect,
        cfg.lin.tol,
        cfg.lin.restart,
        cfg.max_feast_iters,
        a.seed,
    );
    fs::write(dir.join("config.txt"), text)?;
    Ok(())
}

fn rayon_pool(jobs: usize) -> CliResult<rayon::ThreadPool> {
    Ok(rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()?)
}

fn experiment(a: ExperimentArgs) -> CliResult<bool> {
    let text = fs::read_to_string(&a.config).map_err(|e| format!("{}: {e}", a.config.display()))?;
    let mut cfg = Config::parse(&text)?;
    if a.gnuplot {
        cfg.set("gnuplot", "true");
    }
    let report = run_experiment(a.kind, &mut cfg, a.jobs)?;
    report.write_to(&a.out)?;
    for t in &report.tables {
        println!(
            "{}: {} rows -> {}",
            t.name,
            t.len(),
            a.out.join(format!("{}.csv", t.name)).display()
        );
    }
    if !report.completed {
        eprintln!("some runs did not complete; see the status columns");
    }
    Ok(report.completed)
}
