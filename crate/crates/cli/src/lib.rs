//! The `horizon` command-line tool: value tables, small-game solving,
//! benchmark runs with CSV and SVG output, and the acceptance checks.

pub mod commands;
pub mod config;
pub mod criteria;
pub mod csvio;
pub mod error;
pub mod svg;

use clap::{Parser, Subcommand};

use crate::error::exit;

#[derive(Debug, Parser)]
#[command(
    name = "horizon",
    version,
    about = "Horizon-free online learning toolkit"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Tabulate V(0,T), R(0,T) and the c_N sqrt(T) bound.
    Value(commands::value::ValueArgs),
    /// Small-game computations: lower bound, worked examples, loss-space comparison.
    Solve(commands::solve::SolveArgs),
    /// Run a max-regret experiment and write CSV and SVG.
    Bench(commands::bench::BenchArgs),
    /// Run the acceptance criteria.
    Verify(commands::verify::VerifyArgs),
    /// Re-render an SVG plot from a max-regret CSV.
    Plot(commands::plot::PlotArgs),
}

/// Parses `args` and runs the command, returning the exit status.
pub fn run<I, T>(args: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                exit::CONFIG
            } else {
                exit::OK
            };
        }
    };
    let result = match cli.command {
        Command::Value(a) => commands::value::run(&a),
        Command::Solve(a) => commands::solve::run(&a),
        Command::Bench(a) => commands::bench::run(&a),
        Command::Verify(a) => commands::verify::run(&a),
        Command::Plot(a) => commands::plot::run(&a),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
