use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use prandtl_cli::commands::{cmd_compare_oracle, cmd_convergence, cmd_solve, cmd_verify_kernels};
use prandtl_cli::{CliError, CliResult};

#[derive(Parser)]
#[command(name = "prandtl", about = "Mild-solution solver for the Robin-wall Prandtl system")]
struct Cli {
    /// Reserved: the solver uses no random numbers, so this is rejected.
    #[arg(long, global = true)]
    seedless: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve a scenario and write trajectory CSVs and a run report.
    Solve {
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check every kernel identity against its tolerance.
    VerifyKernels {
        /// Run a single identity.
        #[arg(long)]
        filter: Option<String>,
        /// Override every tolerance.
        #[arg(long)]
        tolerance: Option<f64>,
    },
    /// Refinement study with observed orders.
    Convergence {
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long, default_value_t = 3)]
        levels: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compare the mild solution with the finite-difference oracle.
    CompareOracle {
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn run(cli: Cli) -> CliResult<()> {
    if cli.seedless {
        return Err(CliError::Usage("--seedless is reserved: no random number generator exists".into()));
    }
    let stdout = std::io::stdout();
    let mut w = stdout.lock();
    match cli.command {
        Command::Solve { scenario, out } => cmd_solve(&scenario, out.as_deref(), &mut w),
        Command::VerifyKernels { filter, tolerance } => cmd_verify_kernels(filter.as_deref(), tolerance, &mut w),
        Command::Convergence { scenario, levels, out } => cmd_convergence(&scenario, levels, out.as_deref(), &mut w),
        Command::CompareOracle { scenario, out } => cmd_compare_oracle(&scenario, out.as_deref(), &mut w),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let _ = std::io::stdout().flush();
            eprintln!("error: {}: {e}", e.code());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
