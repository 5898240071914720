use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use e91_eve::attack_model::DEFAULT_GRID;
use e91_eve::cli::{self, CliError, SimulateArgs};
use e91_eve::qmath::DEFAULT_TOL;

#[derive(Parser, Debug)]
#[command(name = "e91-eve")]
#[command(about = "E91 key distribution against a source-controlling symmetric eavesdropper")]
struct Args {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Write the guess-probability / error-rate tradeoff curve as CSV
    Tradeoff {
        #[arg(long)]
        eps_min: f64,
        #[arg(long)]
        eps_max: f64,
        #[arg(long)]
        steps: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Monte Carlo run against the optimal attack; exits 1 if any empirical
    /// rate is more than 4 sigma from its analytic value
    Simulate {
        #[arg(long)]
        eps: f64,
        #[arg(long)]
        pairs: u64,
        #[arg(long, default_value_t = 0.1)]
        disclose: f64,
        #[arg(long, default_value_t = 0.11)]
        threshold: f64,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        /// Worker shards; the report does not depend on this
        #[arg(long, default_value_t = 1)]
        shards: usize,
    },
    /// Optimal attack at a given average error rate, checked by grid search
    Optimize {
        #[arg(long)]
        eps: f64,
        #[arg(long, default_value_t = DEFAULT_GRID)]
        grid: usize,
    },
    /// Run the invariant suites
    Verify {
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
        #[arg(long, default_value_t = 91)]
        seed: u64,
    },
}

fn run(args: Args) -> Result<bool, CliError> {
    match args.command {
        Command::Tradeoff {
            eps_min,
            eps_max,
            steps,
            out,
        } => {
            cli::cmd_tradeoff(eps_min, eps_max, steps, &out)?;
            Ok(true)
        }
        Command::Simulate {
            eps,
            pairs,
            disclose,
            threshold,
            seed,
            out,
            shards,
        } => {
            let sim = SimulateArgs {
                eps,
                pairs,
                disclose,
                threshold,
                seed,
                shards,
            };
            let (report, ok) = cli::cmd_simulate(&sim, &out)?;
            let worst = report.sigma_distances.max().unwrap_or(0.0);
            println!(
                "wrote {}; max sigma distance {worst:.3}; accept {}",
                out.display(),
                report.accept
            );
            Ok(ok)
        }
        Command::Optimize { eps, grid } => {
            let report = cli::cmd_optimize(eps, grid)?;
            println!("{}", serde_json::to_string_pretty(&report)?);
            Ok(true)
        }
        Command::Verify { tol, seed } => {
            let results = cli::run_verify(tol, seed)?;
            for r in &results {
                println!("{}", r.line());
            }
            let failed = results.iter().filter(|r| !r.passed).count();
            println!("{} suites, {failed} failed", results.len());
            Ok(failed == 0)
        }
    }
}

fn main() -> ExitCode {
    match run(Args::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
