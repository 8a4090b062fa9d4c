//! Command-line front end: problem setup, solver runs, benchmark sweeps and
//! CSV output.

use std::fs::File;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use log::error;

use crate::error::{Error, Result};
use crate::lanczos::ReorthPolicy;
use crate::operators::{
    gaussian_rhs, kron_sum_laplacian, laplacian_extreme_eigenvalues, load_matrix_market, load_vector,
    normalize_problem, GeneralizedOperator, Ordering, SpectralInterval, SymmetricOperator,
};
use crate::solvers::{
    compress_solve, reference_solve_adaptive, true_residual_fro, two_pass_solve, LowRankSolution, SolveReport,
    SolverConfig, SpectrumPolicy, Termination,
};
use crate::zolotarev::{raterr, zolotarev_bound, zolotarev_poles, DEFAULT_GRID_POINTS};

pub const EXIT_OK: u8 = 0;
pub const EXIT_CAP: u8 = 2;
pub const EXIT_INPUT: u8 = 3;

pub const CSV_HEADER: [&str; 9] = [
    "N",
    "tol",
    "k",
    "matvecs",
    "time_s",
    "scaled_residual",
    "cycles",
    "peak_vectors",
    "method",
];

#[derive(Debug, Parser)]
#[command(name = "lyapcomp", version, about = "Low-memory Lanczos solvers for A X + X A = c cᵀ")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve one problem and write a CSV row.
    Solve(SolveArgs),
    /// Sweep Laplacian sizes and methods.
    Bench(BenchArgs),
    /// Print Zolotarev poles and their error bound.
    Poles(PolesArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ProblemKind {
    Lap4d,
    Mtx,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Compress,
    TwoPass,
    Reference,
}

impl Method {
    pub fn label(self) -> &'static str {
        match self {
            Method::Compress => "compress",
            Method::TwoPass => "two-pass",
            Method::Reference => "reference",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ReorthArg {
    FirstCycle,
    /// Every step; stores all Lanczos vectors, so maxmem is not honoured.
    Full,
    None,
}

impl From<ReorthArg> for ReorthPolicy {
    fn from(r: ReorthArg) -> Self {
        match r {
            ReorthArg::FirstCycle => ReorthPolicy::FirstCycle,
            ReorthArg::Full => ReorthPolicy::Full,
            ReorthArg::None => ReorthPolicy::None,
        }
    }
}

/// Options shared by `solve` and `bench`.
#[derive(Debug, Clone, Args)]
pub struct SolverArgs {
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
    #[arg(long, default_value_t = 120)]
    pub maxmem: usize,
    #[arg(long, default_value_t = 100_000)]
    pub max_matvecs: usize,
    #[arg(long, value_enum, default_value_t = ReorthArg::FirstCycle)]
    pub reorth: ReorthArg,
    /// Write 0 in the time column so repeated runs give identical files.
    #[arg(long)]
    pub no_timing: bool,
    /// Output CSV file (standard output if omitted).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct SolveArgs {
    #[arg(long, value_enum)]
    pub problem: ProblemKind,
    /// Grid points per side for `lap4d`.
    #[arg(long)]
    pub n_side: Option<usize>,
    /// Matrix Market file for `mtx`.
    #[arg(long)]
    pub matrix: Option<PathBuf>,
    /// Mass matrix; turns the problem into the generalized equation.
    #[arg(long)]
    pub mass: Option<PathBuf>,
    /// `gaussian` or `file PATH`.
    #[arg(long, num_args = 1..=2, value_names = ["KIND", "PATH"], default_values_t = ["gaussian".to_string()])]
    pub rhs: Vec<String>,
    #[arg(long, value_enum, default_value_t = Method::Compress)]
    pub method: Method,
    /// Extreme eigenvalues `a,b` of the operator before scaling.
    #[arg(long, value_delimiter = ',', value_name = "A,B")]
    pub eigs: Option<Vec<f64>>,
    #[command(flatten)]
    pub solver: SolverArgs,
}

#[derive(Debug, Clone, Args)]
pub struct BenchArgs {
    /// Grid points per side of each `lap4d` problem.
    #[arg(long, value_delimiter = ',', default_values_t = [16usize, 64])]
    pub sizes: Vec<usize>,
    #[arg(long, value_enum, value_delimiter = ',', default_values_t = [Method::Compress, Method::TwoPass])]
    pub methods: Vec<Method>,
    #[command(flatten)]
    pub solver: SolverArgs,
}

#[derive(Debug, Clone, Args)]
pub struct PolesArgs {
    #[arg(long)]
    pub k: usize,
    #[arg(long)]
    pub a: f64,
    #[arg(long)]
    pub b: f64,
    #[arg(long, default_value_t = DEFAULT_GRID_POINTS)]
    pub grid: usize,
}

/// A normalized problem ready for the solvers.
pub struct Problem {
    pub op: SymmetricOperator,
    pub c: Vec<f64>,
    /// Exact extreme eigenvalues of `op`, if known.
    pub interval: Option<SpectralInterval>,
}

/// One line of the results table.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentRow {
    pub n: usize,
    pub tol: f64,
    pub k: usize,
    pub matvecs: u64,
    pub time_s: f64,
    pub scaled_residual: f64,
    pub cycles: usize,
    pub peak_vectors: usize,
    pub method: &'static str,
}

impl ExperimentRow {
    fn record(&self) -> [String; 9] {
        [
            self.n.to_string(),
            format!("{:e}", self.tol),
            self.k.to_string(),
            self.matvecs.to_string(),
            format!("{:.6}", self.time_s),
            format!("{:.6e}", self.scaled_residual),
            self.cycles.to_string(),
            self.peak_vectors.to_string(),
            self.method.to_string(),
        ]
    }
}

pub fn write_rows(out: impl Write, rows: &[ExperimentRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let to_io = |e: csv::Error| Error::Io {
        path: PathBuf::from("<csv>"),
        source: io::Error::other(e),
    };
    w.write_record(CSV_HEADER).map_err(to_io)?;
    for row in rows {
        w.write_record(row.record()).map_err(to_io)?;
    }
    w.flush().map_err(|e| Error::Io {
        path: PathBuf::from("<csv>"),
        source: e,
    })
}

fn emit(path: Option<&Path>, rows: &[ExperimentRow]) -> Result<()> {
    match path {
        Some(p) => {
            let f = File::create(p).map_err(|e| Error::Io {
                path: p.to_path_buf(),
                source: e,
            })?;
            write_rows(f, rows)
        }
        None => write_rows(io::stdout().lock(), rows),
    }
}

pub fn lap4d_problem(n_side: usize) -> Result<Problem> {
    let op = SymmetricOperator::new(kron_sum_laplacian(n_side)?)
        .with_spectral_hint(laplacian_extreme_eigenvalues(n_side)?);
    let (op, c) = normalize_problem(&op, &gaussian_rhs(n_side)?)?;
    let interval = op.spectral_hint();
    Ok(Problem { op, c, interval })
}

fn parse_eigs(eigs: &Option<Vec<f64>>) -> Result<Option<SpectralInterval>> {
    match eigs.as_deref() {
        None => Ok(None),
        Some([a, b]) => SpectralInterval::new(*a, *b).map(Some),
        Some(_) => Err(Error::Usage("--eigs expects two values a,b".into())),
    }
}

pub fn build_problem(args: &SolveArgs) -> Result<Problem> {
    let eigs = parse_eigs(&args.eigs)?;
    let rhs_file = match args.rhs.as_slice() {
        [kind] if kind == "gaussian" => None,
        [kind, path] if kind == "file" => Some(PathBuf::from(path)),
        other => {
            return Err(Error::Usage(format!(
                "--rhs expects `gaussian` or `file PATH`, got {other:?}"
            )))
        }
    };
    let (op, c) = match args.problem {
        ProblemKind::Lap4d => {
            if args.matrix.is_some() || args.mass.is_some() {
                return Err(Error::Usage("--matrix/--mass do not apply to lap4d".into()));
            }
            let n_side = args
                .n_side
                .ok_or_else(|| Error::Usage("lap4d needs --n-side".into()))?;
            let op = SymmetricOperator::new(kron_sum_laplacian(n_side)?);
            let op = match eigs {
                Some(iv) => op.with_spectral_hint(iv),
                None => op.with_spectral_hint(laplacian_extreme_eigenvalues(n_side)?),
            };
            let c = match &rhs_file {
                Some(p) => load_vector(p)?,
                None => gaussian_rhs(n_side)?,
            };
            (op, c)
        }
        ProblemKind::Mtx => {
            if args.n_side.is_some() {
                return Err(Error::Usage("--n-side does not apply to mtx".into()));
            }
            let path = args
                .matrix
                .as_ref()
                .ok_or_else(|| Error::Usage("mtx needs --matrix".into()))?;
            let matrix = load_matrix_market(path)?;
            let n = matrix.dimension();
            let b = match &rhs_file {
                Some(p) => load_vector(p)?,
                None => {
                    let side = (n as f64).sqrt().round() as usize;
                    if side * side != n {
                        return Err(Error::Usage(format!(
                            "gaussian right-hand side needs a square grid; N = {n} is not a square, use --rhs file PATH"
                        )));
                    }
                    gaussian_rhs(side)?
                }
            };
            let (op, c) = match &args.mass {
                Some(mass_path) => {
                    let mass = load_matrix_market(mass_path)?;
                    let gen = GeneralizedOperator::new(matrix, &mass, Ordering::ReverseCuthillMcKee)?;
                    let c = gen.transform_rhs(&b)?;
                    (SymmetricOperator::new(gen), c)
                }
                None => (SymmetricOperator::new(matrix), b),
            };
            let op = match eigs {
                Some(iv) => op.with_spectral_hint(iv),
                None => op,
            };
            (op, c)
        }
    };
    let (op, c) = normalize_problem(&op, &c)?;
    let interval = op.spectral_hint();
    Ok(Problem { op, c, interval })
}

pub fn solver_config(args: &SolverArgs, interval: Option<SpectralInterval>) -> SolverConfig {
    SolverConfig {
        tol: args.tol,
        maxmem: args.maxmem,
        max_matvecs: args.max_matvecs,
        poles: None,
        spectrum: interval.map_or(SpectrumPolicy::FirstCycleRitz, SpectrumPolicy::Exact),
        reorth: args.reorth.into(),
    }
}

pub struct MethodRun {
    pub solution: LowRankSolution,
    pub report: SolveReport,
    pub row: ExperimentRow,
}

/// Solves with one method and verifies the result; verification matvecs
/// are not included in the row.
pub fn run_method(problem: &Problem, config: &SolverConfig, method: Method, timing: bool) -> Result<MethodRun> {
    let op = &problem.op;
    let start = Instant::now();
    let (solution, report) = match method {
        Method::Compress => compress_solve(op, &problem.c, config)?,
        Method::TwoPass => two_pass_solve(op, &problem.c, config)?,
        Method::Reference => reference_solve_adaptive(op, &problem.c, config)?,
    };
    let elapsed = start.elapsed().as_secs_f64();
    let residual = true_residual_fro(op, &solution, &problem.c)?;
    let row = ExperimentRow {
        n: op.dimension(),
        tol: config.tol,
        k: report.k,
        matvecs: report.matvecs,
        time_s: if timing { elapsed } else { 0.0 },
        scaled_residual: residual / solution.c_norm2(),
        cycles: report.cycles,
        peak_vectors: report.peak_vectors,
        method: method.label(),
    };
    Ok(MethodRun { solution, report, row })
}

fn termination_label(t: Termination) -> &'static str {
    match t {
        Termination::Tolerance => "tolerance reached",
        Termination::Breakdown => "Lanczos breakdown (exact solution)",
        Termination::MatvecCap => "matvec cap reached",
    }
}

fn cmd_solve(args: &SolveArgs) -> Result<u8> {
    let problem = build_problem(args)?;
    let config = solver_config(&args.solver, problem.interval);
    let run = run_method(&problem, &config, args.method, !args.solver.no_timing)?;
    let r = &run.report;
    let summary = format!(
        "{}: N = {}, k = {}, m = {}, cycles = {}, steps = {}, matvecs = {}, peak vectors = {}\n\
         interval [{:.6e}, {:.6e}], {}, scaled residual {:.3e} (last estimate {:.3e})",
        args.method.label(),
        run.row.n,
        r.k,
        r.m,
        r.cycles,
        r.total_steps,
        r.matvecs,
        r.peak_vectors,
        r.interval.lo,
        r.interval.hi,
        termination_label(r.termination),
        run.row.scaled_residual,
        r.estimates.last().copied().unwrap_or(f64::NAN),
    );
    eprintln!("{summary}");
    emit(args.solver.out.as_deref(), std::slice::from_ref(&run.row))?;
    Ok(match r.termination {
        Termination::MatvecCap => EXIT_CAP,
        _ => EXIT_OK,
    })
}

fn cmd_bench(args: &BenchArgs) -> Result<u8> {
    if args.methods.is_empty() {
        return Err(Error::Usage("no methods given".into()));
    }
    if args.sizes.is_empty() || args.sizes.contains(&0) {
        return Err(Error::Usage("sizes must be a non-empty list of positive integers".into()));
    }
    let mut rows = Vec::new();
    let mut capped = false;
    for &n_side in &args.sizes {
        let problem = match lap4d_problem(n_side) {
            Ok(p) => p,
            Err(e) => {
                error!("n_side {n_side}: {e}");
                capped = true;
                continue;
            }
        };
        let config = solver_config(&args.solver, problem.interval);
        for &method in &args.methods {
            match run_method(&problem, &config, method, !args.solver.no_timing) {
                Ok(run) => {
                    capped |= run.report.termination == Termination::MatvecCap;
                    rows.push(run.row);
                }
                Err(e) => {
                    error!("n_side {n_side}, {}: {e}", method.label());
                    capped = true;
                }
            }
        }
    }
    eprint!("{}", bench_tables(&rows, &args.methods));
    emit(args.solver.out.as_deref(), &rows)?;
    Ok(if capped { EXIT_CAP } else { EXIT_OK })
}

/// Matvec and time tables (one row per size) plus the two-pass to compress ratio.
pub fn bench_tables(rows: &[ExperimentRow], methods: &[Method]) -> String {
    let mut sizes: Vec<usize> = rows.iter().map(|r| r.n).collect();
    sizes.dedup();
    let find = |n: usize, m: Method| rows.iter().find(|r| r.n == n && r.method == m.label());
    let mut out = String::new();
    let header: String = methods.iter().map(|m| format!("{:>14}", m.label())).collect();
    out.push_str(&format!("matvecs\n{:>8}{header}{:>14}\n", "N", "ratio"));
    for &n in &sizes {
        out.push_str(&format!("{n:>8}"));
        for &m in methods {
            match find(n, m) {
                Some(r) => out.push_str(&format!("{:>14}", r.matvecs)),
                None => out.push_str(&format!("{:>14}", "-")),
            }
        }
        let ratio = match (find(n, Method::Compress), find(n, Method::TwoPass)) {
            (Some(c), Some(t)) => format!("{:.3}", c.matvecs as f64 / t.matvecs as f64),
            _ => "-".into(),
        };
        out.push_str(&format!("{ratio:>14}\n"));
    }
    out.push_str(&format!("time [s]\n{:>8}{header}\n", "N"));
    for &n in &sizes {
        out.push_str(&format!("{n:>8}"));
        for &m in methods {
            match find(n, m) {
                Some(r) => out.push_str(&format!("{:>14.3}", r.time_s)),
                None => out.push_str(&format!("{:>14}", "-")),
            }
        }
        out.push('\n');
    }
    out
}

fn cmd_poles(args: &PolesArgs) -> Result<u8> {
    if args.k == 0 {
        return Err(Error::Usage("k must be positive".into()));
    }
    if !(args.a > 0.0) || args.a > args.b {
        return Err(Error::Usage(format!(
            "need 0 < a <= b, got a = {}, b = {}",
            args.a, args.b
        )));
    }
    let poles = zolotarev_poles(args.k, args.a, args.b)?;
    let mut out = io::stdout().lock();
    let io_err = |e| Error::Io {
        path: PathBuf::from("<stdout>"),
        source: e,
    };
    for p in poles.poles() {
        writeln!(out, "{p:.16e}").map_err(io_err)?;
    }
    writeln!(out, "bound  {:.6e}", zolotarev_bound(args.k, args.a, args.b)).map_err(io_err)?;
    writeln!(out, "raterr {:.6e}", raterr(poles.poles(), args.a, args.b, args.grid)?).map_err(io_err)?;
    Ok(EXIT_OK)
}

/// Runs a parsed command and returns the process exit code.
pub fn run(cli: &Cli) -> u8 {
    let result = match &cli.command {
        Command::Solve(a) => cmd_solve(a),
        Command::Bench(a) => cmd_bench(a),
        Command::Poles(a) => cmd_poles(a),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_INPUT
        }
    }
}

/// Parses `args` (including the program name) and runs; argument errors
/// map to exit code 3, help and version to 0.
pub fn main_with_args<I, T>(args: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => run(&cli),
        Err(e) => {
            let _ = e.print();
            if e.use_stderr() {
                EXIT_INPUT
            } else {
                EXIT_OK
            }
        }
    }
}
