//! `embdebias`: debias word embedding tables and measure what bias
//! remains. Every run is deterministic given its seed; reports carry the
//! tool version, the seed, and a hash of the effective configuration so
//! results can be traced back to the exact settings that produced them.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(name = "embdebias", version, about = "Debias word embeddings and measure residual bias")]
struct Cli {
    /// TOML file with default values for any long option; flags win.
    #[arg(long, value_name = "FILE", global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Remove gender bias from a table and write the result.
    Debias(commands::DebiasArgs),
    /// Score candidate frequency components without changing anything.
    Discover(commands::DiscoverArgs),
    /// Measure bias and quality metrics of a table.
    Eval(commands::EvalArgs),
    /// Write selected words as 2-D plot data (CSV).
    ExportProjection(commands::ExportArgs),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let file = match config::FileConfig::load(cli.config.as_deref()) {
        Ok(f) => f,
        Err(e) => return fail(&e),
    };
    let result = match cli.command {
        Command::Debias(args) => commands::debias(args, &file),
        Command::Discover(args) => commands::discover(args, &file),
        Command::Eval(args) => commands::eval(args, &file),
        Command::ExportProjection(args) => commands::export_projection(args, &file),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => fail(&e),
    }
}

fn fail(e: &commands::CliError) -> ExitCode {
    eprintln!("error: {e}");
    ExitCode::from(e.exit_code())
}
