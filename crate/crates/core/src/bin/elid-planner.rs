use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use elid_planner::cli::{self, SolveOptions, SweepOptions, EXIT_ERROR};
use elid_planner::WidthRule;

#[derive(Parser)]
#[command(name = "elid-planner", version, about = "Elevated LiDAR placement planner")]
struct Args {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Width {
    AsWritten,
    NearEdge,
}

impl From<Width> for WidthRule {
    fn from(w: Width) -> Self {
        match w {
            Width::AsWritten => WidthRule::AsWritten,
            Width::NearEdge => WidthRule::NearEdge,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Optimize placements with the particle swarm.
    Solve {
        scenario: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        #[arg(long, value_enum)]
        width_rule: Option<Width>,
    },
    /// Evaluate a fixed placement file without solving.
    Evaluate {
        scenario: PathBuf,
        #[arg(long)]
        placements: PathBuf,
        #[arg(long, value_enum)]
        width_rule: Option<Width>,
    },
    /// Solve over a grid of octree depths and throughput caps.
    Sweep {
        scenario: PathBuf,
        #[arg(long, value_delimiter = ',', default_value = "5,6,7,8,9")]
        depths: Vec<u32>,
        #[arg(long, value_delimiter = ',', default_value = "5,10")]
        bandwidths_gbps: Vec<f64>,
        #[arg(long, default_value_t = 10)]
        seeds: usize,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        /// Run sweep cells concurrently.
        #[arg(long)]
        parallel: bool,
    },
    /// Compare analytic coverage against the raster oracle on random plans.
    OracleCheck {
        scenario: PathBuf,
        #[arg(long, default_value_t = 0.05)]
        resolution: f64,
        #[arg(long, default_value_t = 100)]
        trials: usize,
    },
}

fn run(args: Args) -> elid_planner::Result<u8> {
    match args.command {
        Command::Solve {
            scenario,
            seed,
            out,
            width_rule,
        } => {
            let outcome = cli::cmd_solve(&SolveOptions {
                scenario,
                seed,
                out_dir: out,
                width_rule: width_rule.map(Into::into),
            })?;
            print!("{}", outcome.summary);
            Ok(outcome.exit_code())
        }
        Command::Evaluate {
            scenario,
            placements,
            width_rule,
        } => {
            let outcome = cli::cmd_evaluate(&scenario, &placements, width_rule.map(Into::into))?;
            print!("{}", outcome.report);
            Ok(outcome.exit_code())
        }
        Command::Sweep {
            scenario,
            depths,
            bandwidths_gbps,
            seeds,
            seed,
            out,
            parallel,
        } => {
            let outcome = cli::cmd_sweep(&SweepOptions {
                scenario,
                depths,
                bandwidths_gbps,
                seeds,
                master_seed: seed,
                out_dir: out.clone(),
                parallel,
            })?;
            println!("{} runs written to {}", outcome.rows.len(), out.join("sweep.csv").display());
            Ok(cli::EXIT_FEASIBLE)
        }
        Command::OracleCheck {
            scenario,
            resolution,
            trials,
        } => {
            let outcome = cli::cmd_oracle_check(&scenario, resolution, trials, &mut std::io::stdout())?;
            Ok(outcome.exit_code())
        }
    }
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(args) => args,
        Err(e) => {
            let _ = e.print();
            // Usage errors share the operational-error code; 2 means infeasible.
            return if e.use_stderr() {
                ExitCode::from(EXIT_ERROR)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(args) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_ERROR)
        }
    }
}
