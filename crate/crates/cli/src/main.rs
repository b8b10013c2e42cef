//! `volmin` command-line tool. Every run prints one JSON report on stdout;
//! errors also go to stderr as a single line.

mod commands;
mod report;
mod schema;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use report::{exit, RunReport};

pub const DEFAULT_SEED: u64 = 20_240_917;

#[derive(Parser, Debug)]
#[command(name = "volmin", version, about = "Reeb vector volume minimization on toric cones")]
#[command(subcommand_required = false, arg_required_else_help = true)]
struct Cli {
    /// Print the JSON schema of the run report and exit.
    #[arg(long)]
    schema: bool,

    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check a cone spec: rays, goodness per face, Calabi-Yau vector.
    Validate {
        cone: PathBuf,
    },
    /// Minimize the (coupled) volume functional over the Reeb slice.
    Minimize(MinimizeArgs),
    /// Twist a decomposition to another Reeb vector and compare the
    /// Minkowski sum of the twisted pieces with the true slice.
    TwistDemo {
        cone: PathBuf,
        decomposition: PathBuf,
        /// Target Reeb vector as comma-separated rationals, e.g. `3,2,1`.
        /// Chosen automatically when absent.
        #[arg(long, allow_hyphen_values = true)]
        xi: Option<String>,
    },
    /// Monte Carlo moments and finite-difference derivatives against the
    /// exact formulas.
    Oracle(OracleArgs),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Exact,
    Float,
}

#[derive(Args, Debug)]
pub struct MinimizeArgs {
    pub cone: PathBuf,
    pub decomposition: Option<PathBuf>,
    #[arg(long, default_value_t = 1e-10)]
    pub grad_tol: f64,
    #[arg(long, default_value_t = 100)]
    pub max_iter: usize,
    /// Grid resolution per chart axis for the grid certificate (m <= 3).
    #[arg(long)]
    pub grid_certify: Option<usize>,
    /// Monte Carlo samples for the oracle cross-check at the minimizer.
    #[arg(long)]
    pub oracle_samples: Option<usize>,
    #[arg(long, env = "VOLMIN_SEED", default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = Mode::Exact)]
    pub mode: Mode,
    /// Include wall-clock timing (makes output run-dependent).
    #[arg(long)]
    pub timing: bool,
}

#[derive(Args, Debug)]
pub struct OracleArgs {
    pub cone: PathBuf,
    /// Reeb vector as comma-separated rationals; defaults to the base point
    /// of the Reeb chart.
    #[arg(long, allow_hyphen_values = true)]
    pub xi: Option<String>,
    #[arg(long, default_value_t = 1_000_000)]
    pub samples: usize,
    #[arg(long, env = "VOLMIN_SEED", default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    #[arg(long, default_value_t = 1e-5)]
    pub fd_step: f64,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp
                | ErrorKind::DisplayVersion
                | ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand => {
                    let _ = e.print();
                    return ExitCode::from(0);
                }
                _ => exit::USAGE,
            };
            let _ = e.print();
            let mut r = RunReport::new("usage");
            r.fail_with("Usage", e.kind().to_string(), code);
            return emit(&r);
        }
    };
    if cli.schema {
        println!("{}", serde_json::to_string_pretty(&schema::run_report_schema()).expect("schema serializes"));
        return ExitCode::from(0);
    }
    let report = match cli.command {
        Some(Command::Validate { cone }) => commands::validate(&cone),
        Some(Command::Minimize(args)) => commands::minimize(&args),
        Some(Command::TwistDemo { cone, decomposition, xi }) => {
            commands::twist_demo(&cone, &decomposition, xi.as_deref())
        }
        Some(Command::Oracle(args)) => commands::oracle(&args),
        None => {
            let mut r = RunReport::new("usage");
            r.fail_with("Usage", "no command given".into(), exit::USAGE);
            r
        }
    };
    emit(&report)
}

fn emit(report: &RunReport) -> ExitCode {
    if let Some(e) = &report.error {
        eprintln!("volmin: {}: {}", e.kind, e.message);
    }
    println!("{}", serde_json::to_string_pretty(report).expect("report serializes"));
    ExitCode::from(report.exit_code)
}
