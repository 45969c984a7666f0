mod commands;
mod repro;

use std::path::PathBuf;
use std::process::ExitCode;

use bpfail_core::Error;
use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(
    name = "bpfail",
    version,
    about = "Certificates for basis pursuit failure on structured matrices"
)]
struct Cli {
    /// Output directory; BPFAIL_OUT replaces the default.
    #[arg(long, global = true, env = "BPFAIL_OUT", default_value = ".")]
    out: PathBuf,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate a structured matrix or a steering instance.
    Gen(GenArgs),
    /// Test a structural property of a matrix or a sequence.
    Check(CheckArgs),
    /// Compute failure certificates and the p-vector.
    Certify(CertifyArgs),
    /// Solve basis pursuit with a dual optimality check.
    SolveBp(SolveArgs),
    /// Exhaustive minimum-cardinality search.
    SolveL0(L0Args),
    /// Regenerate a reference case and compare against stored values.
    Repro(ReproArgs),
}

#[derive(Args, Debug)]
pub struct GenArgs {
    #[command(subcommand)]
    pub kind: GenKind,
}

#[derive(Args, Debug, Clone)]
pub struct SystemArgs {
    /// Diagonal state matrix, comma separated; b is the ones vector.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true, conflicts_with_all = ["a", "b"])]
    pub diag: Option<Vec<f64>>,
    /// State matrix as CSV.
    #[arg(long, requires = "b")]
    pub a: Option<PathBuf>,
    /// Input vector as CSV.
    #[arg(long, requires = "a")]
    pub b: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
pub enum GenKind {
    /// Controllability matrix [b, Ab, ..., A^{N-1} b].
    Ctrb {
        #[command(flatten)]
        system: SystemArgs,
        #[arg(long = "N")]
        n: usize,
    },
    /// Hankel matrix of a strictly proper transfer function.
    Hankel {
        /// Numerator coefficients, highest power first.
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        num: Vec<f64>,
        /// Denominator coefficients, highest power first.
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        den: Vec<f64>,
        #[arg(long = "M")]
        m: usize,
        #[arg(long = "N")]
        n: usize,
    },
    /// Bernstein basis sampled at points in [0, 1].
    Bernstein {
        #[arg(long)]
        degree: usize,
        #[arg(long, value_delimiter = ',')]
        points: Vec<f64>,
    },
    /// Fuel-optimal steering instance with a planted impulse input.
    Fuel {
        #[command(flatten)]
        system: SystemArgs,
        #[arg(long = "N")]
        n: usize,
        /// Impulses as time:value pairs, e.g. 0:+1,9:-1.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, value_parser = commands::parse_impulse)]
        impulse: Vec<(usize, f64)>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum PropertyArg {
    Sc,
    Ssc,
    Tp,
    Stp,
    Vb,
    LogConcave,
    Unimodal,
}

#[derive(Args, Debug)]
pub struct CheckArgs {
    /// Matrix (or vector) CSV.
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, value_enum)]
    pub property: PropertyArg,
    /// Order of the matrix property.
    #[arg(long)]
    pub order: Option<usize>,
    /// Check the transpose.
    #[arg(long)]
    pub transpose: bool,
    /// Check the row forward difference (after any transpose).
    #[arg(long)]
    pub difference: bool,
}

#[derive(Args, Debug, Clone)]
pub struct InputArgs {
    /// Matrix V as CSV.
    #[arg(long, conflicts_with = "instance")]
    pub input: Option<PathBuf>,
    /// Instance JSON written by `gen fuel`.
    #[arg(long)]
    pub instance: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct CertifyArgs {
    #[command(flatten)]
    pub source: InputArgs,
    /// Failure margin: p_k counts only when 1 - p_k exceeds it.
    #[arg(long, default_value_t = bpfail_core::certify::P_TOL)]
    pub p_tol: f64,
    /// Skip the unimodality test and scan every column.
    #[arg(long)]
    pub full_scan: bool,
}

#[derive(Args, Debug)]
pub struct SolveArgs {
    #[command(flatten)]
    pub source: InputArgs,
    /// Right-hand side y as CSV (with --input).
    #[arg(long, requires = "input")]
    pub rhs: Option<PathBuf>,
    /// Support threshold relative to the largest magnitude.
    #[arg(long, default_value_t = bpfail_core::solvers::DEFAULT_SUPPORT_THRESHOLD)]
    pub threshold: f64,
    #[arg(long, default_value_t = bpfail_core::solvers::DEFAULT_FEAS_TOL)]
    pub feas_tol: f64,
}

#[derive(Args, Debug)]
pub struct L0Args {
    #[command(flatten)]
    pub source: InputArgs,
    /// Right-hand side y as CSV (with --input).
    #[arg(long, requires = "input")]
    pub rhs: Option<PathBuf>,
    /// Largest cardinality searched; defaults to the number of rows.
    #[arg(long)]
    pub max_card: Option<usize>,
    #[arg(long, default_value_t = bpfail_core::solvers::DEFAULT_RES_TOL)]
    pub res_tol: f64,
    /// Maximum number of supports tested.
    #[arg(long, default_value_t = bpfail_core::solvers::DEFAULT_L0_BUDGET)]
    pub budget: u128,
}

#[derive(Args, Debug)]
pub struct ReproArgs {
    #[arg(value_enum)]
    pub target: repro::Target,
}

/// Failure modes with their process exit codes.
#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Precondition(String),
    Infeasible(String),
    Mismatch(Vec<String>),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Precondition(_) => 2,
            Failure::Infeasible(_) => 3,
            Failure::Mismatch(_) => 4,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Parse(_)
            | Error::Io(_)
            | Error::Csv(_)
            | Error::InvalidInput(_)
            | Error::PointOutOfDomain(_)
            | Error::DerivativeUnsupported(_) => Failure::Usage(e.to_string()),
            _ => Failure::Precondition(e.to_string()),
        }
    }
}

fn check_tolerance(name: &str, v: f64) -> Result<(), Failure> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Failure::Usage(format!("{name} must be positive, got {v}")))
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    std::fs::create_dir_all(&cli.out)
        .map_err(|e| Failure::Usage(format!("cannot create {}: {e}", cli.out.display())))?;
    match cli.command {
        Command::Gen(args) => commands::generate(&args, &cli.out),
        Command::Check(args) => commands::check(&args, &cli.out),
        Command::Certify(args) => {
            check_tolerance("--p-tol", args.p_tol)?;
            commands::certify(&args, &cli.out)
        }
        Command::SolveBp(args) => {
            check_tolerance("--threshold", args.threshold)?;
            check_tolerance("--feas-tol", args.feas_tol)?;
            commands::solve_bp(&args, &cli.out)
        }
        Command::SolveL0(args) => {
            check_tolerance("--res-tol", args.res_tol)?;
            commands::solve_l0(&args, &cli.out)
        }
        Command::Repro(args) => repro::run(args.target, &cli.out),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            match &f {
                Failure::Usage(m) | Failure::Precondition(m) | Failure::Infeasible(m) => {
                    eprintln!("error: {m}")
                }
                Failure::Mismatch(deltas) => {
                    eprintln!("reproduction mismatch:");
                    for d in deltas {
                        eprintln!("  {d}");
                    }
                }
            }
            ExitCode::from(f.code())
        }
    }
}
