//! Command-line driver: network generation, model fitting, diagnosis and
//! replicated studies, all seeded and file based.

pub mod commands;
pub mod config;
pub mod error;
pub mod manifest;

use clap::{Parser, Subcommand};

pub use error::{CliError, Result};

#[derive(Debug, Parser)]
#[command(name = "asbm", version, about = "Bayesian block-model community detection")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate networks with planted communities.
    Generate(commands::generate::GenerateCmd),
    /// Run sampler chains on an edge list.
    Fit(commands::fit::FitCmd),
    /// Check convergence and summarize chain traces.
    Diagnose(commands::diagnose::DiagnoseCmd),
    /// Generate, fit and diagnose over a benchmark grid.
    Replicate(commands::replicate::ReplicateCmd),
}

pub fn run(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Generate(c) => commands::generate::run(c),
        Command::Fit(c) => commands::fit::run(c),
        Command::Diagnose(c) => commands::diagnose::run(c),
        Command::Replicate(c) => commands::replicate::run(c),
    }
}
