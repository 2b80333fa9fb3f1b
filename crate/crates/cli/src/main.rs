use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use curvint::{CliError, Outcome, Outputs, EXIT_INPUT};

#[derive(Parser)]
#[command(
    name = "curvint",
    version,
    about = "Verify integral curvature identities numerically and exactly"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every check of a scenario once.
    Run {
        scenario: PathBuf,
        /// CSV destination (default: the scenario's [output] csv, else stdout).
        #[arg(long)]
        csv: Option<PathBuf>,
        /// Plot-data destination.
        #[arg(long)]
        plot: Option<PathBuf>,
    },
    /// Re-run a scenario at doubled resolutions and estimate decay orders.
    Convergence {
        scenario: PathBuf,
        #[arg(long, default_value_t = 3)]
        levels: usize,
        #[arg(long)]
        csv: Option<PathBuf>,
        #[arg(long)]
        plot: Option<PathBuf>,
    },
    /// Exact frame-algebra identities for 2 ≤ n ≤ nmax.
    Algebra {
        #[arg(long, default_value_t = 4)]
        nmax: usize,
        #[arg(long)]
        csv: Option<PathBuf>,
        #[arg(long)]
        plot: Option<PathBuf>,
        /// Use a wrong composition convention (negative control).
        #[arg(long, hide = true)]
        perturb: bool,
    },
}

fn execute(cli: Cli) -> Result<i32, CliError> {
    curvint::configure_threads()?;
    let (outcome, outputs): (Outcome, Outputs) = match cli.command {
        Command::Run {
            scenario,
            csv,
            plot,
        } => {
            let s = curvint::load(&scenario)?;
            (
                curvint::run(&s)?,
                Outputs::resolve(Outputs { csv, plot }, &s),
            )
        }
        Command::Convergence {
            scenario,
            levels,
            csv,
            plot,
        } => {
            let s = curvint::load(&scenario)?;
            (
                curvint::convergence(&s, levels)?,
                Outputs::resolve(Outputs { csv, plot }, &s),
            )
        }
        Command::Algebra {
            nmax,
            csv,
            plot,
            perturb,
        } => (curvint::algebra(nmax, perturb)?, Outputs { csv, plot }),
    };
    eprint!("{}", outcome.summary);
    outcome.emit(&outputs)?;
    Ok(outcome.exit_code())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { 0 };
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    match execute(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_INPUT as u8)
        }
    }
}
