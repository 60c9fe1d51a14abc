//! `biclique`: build null exposure graphs, decompose them and run
//! conditional randomization tests and power studies from the shell.

mod commands;
mod error;
mod input;
mod report;

use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::Serialize;

use commands::{decompose, graph, sim, test};
use error::{CliError, CliResult};

#[derive(Parser, Debug)]
#[command(name = "biclique", version, about = "Biclique randomization tests under interference")]
struct Cli {
    /// Worker threads for parallel stages.
    #[arg(long, global = true, env = "NEG_THREADS")]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug, Serialize)]
enum Command {
    /// Build a null exposure graph snapshot and its JSON summary.
    Graph(graph::GraphArgs),
    /// Decompose a graph into bicliques.
    Decompose(decompose::DecomposeArgs),
    /// Randomization test within the biclique of the observed assignment.
    Test(test::TestArgs),
    /// Confidence interval for an additive effect by test inversion.
    Ci(test::CiArgs),
    /// Power curve of a scenario as CSV.
    Power(sim::ScenarioArgs),
    /// Full Monte Carlo report of a scenario as JSON.
    Simulate(sim::ScenarioArgs),
    /// Power surface over two-zone Bernoulli designs as CSV.
    DesignGrid(sim::GridArgs),
}

fn run(cli: Cli) -> CliResult<()> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(CliError::validation("--threads must be at least 1"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::validation(e.to_string()))?;
    }
    match &cli.command {
        Command::Graph(a) => graph::run(a),
        Command::Decompose(a) => decompose::run(a),
        Command::Test(a) => test::run_test(a),
        Command::Ci(a) => test::run_ci(a),
        Command::Power(a) => sim::run_power(a),
        Command::Simulate(a) => sim::run_simulate(a),
        Command::DesignGrid(a) => sim::run_design_grid(a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            // --help and --version
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let err = CliError::validation(e.render().to_string().trim());
            eprintln!("{}", err.to_json());
            return err.exit_code();
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.to_json());
            e.exit_code()
        }
    }
}
