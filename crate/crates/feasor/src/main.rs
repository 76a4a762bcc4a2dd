use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use feasor::cli::{cmd_compare, cmd_plot, cmd_run, RunOverrides};
use feasor::engine::Scheme;

/// Projection and Douglas-Rachford methods for convex feasibility problems.
#[derive(Parser)]
#[command(name = "feasor", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct ThresholdArgs {
    /// Cycle budget before the run is declared inconclusive.
    #[arg(long)]
    max_cycles: Option<u64>,
    /// Fixed-point residual threshold.
    #[arg(long)]
    fix_tol: Option<f64>,
    /// Norm threshold for the divergence alternative.
    #[arg(long)]
    blowup_norm: Option<f64>,
    /// Record every n-th cycle in the trace.
    #[arg(long)]
    stride: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Run one scheme; writes trace.csv and summary.json.
    ///
    /// Exit code: 0 fixed points exist, 2 norm blow-up, 3 inconclusive.
    Run {
        /// Problem description (JSON, format version 1).
        problem: PathBuf,
        /// Output directory.
        #[arg(long, default_value = ".")]
        out: PathBuf,
        #[command(flatten)]
        thresholds: ThresholdArgs,
        /// Override the scheme from the problem file
        /// (cyclic_dr | cyclic_projections | classical_dr).
        #[arg(long)]
        scheme: Option<Scheme>,
        /// Verify the problem's projectors with sampled oracle checks
        /// before running (seeded by FEASOR_SEED).
        #[arg(long)]
        self_test: bool,
    },
    /// Run all applicable schemes from the same start; writes compare.csv.
    Compare {
        problem: PathBuf,
        #[arg(long, default_value = ".")]
        out: PathBuf,
        #[command(flatten)]
        thresholds: ThresholdArgs,
    },
    /// Render a 2-D trace to SVG.
    Plot {
        /// A trace.csv produced by `feasor run`.
        trace: PathBuf,
        /// Problem file; supplies the set boundaries to draw.
        #[arg(long)]
        problem: Option<PathBuf>,
        /// Output SVG path.
        #[arg(long, default_value = "trace.svg")]
        out: PathBuf,
    },
}

impl ThresholdArgs {
    fn into_overrides(self, scheme: Option<Scheme>, self_test: bool) -> RunOverrides {
        RunOverrides {
            max_cycles: self.max_cycles,
            fix_tol: self.fix_tol,
            blowup_norm: self.blowup_norm,
            stride: self.stride,
            scheme,
            self_test,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run {
            problem,
            out,
            thresholds,
            scheme,
            self_test,
        } => cmd_run(
            &problem,
            &out,
            &thresholds.into_overrides(scheme, self_test),
        ),
        Command::Compare {
            problem,
            out,
            thresholds,
        } => cmd_compare(&problem, &out, &thresholds.into_overrides(None, false)),
        Command::Plot {
            trace,
            problem,
            out,
        } => cmd_plot(&trace, problem.as_deref(), &out),
    };
    match result {
        Ok(code) => ExitCode::from(code as u8),
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(1)
        }
    }
}
