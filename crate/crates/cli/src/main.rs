mod commands;
mod config;
mod fields;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use thiserror::Error;

/// Build, verify and sample generalized Calabi type surfaces.
#[derive(Parser)]
#[command(name = "gcalabi", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve α′ = ½α² + D and print the profile.
    Alpha {
        #[arg(long = "D", allow_hyphen_values = true)]
        d: f64,
        /// tan, coth, tanh or semi
        #[arg(long)]
        branch: Option<String>,
    },
    /// Build the surface described by a config and run the check suite.
    BuildVerify { config: PathBuf },
    /// Solve the H equation of a config on a grid.
    Pde {
        config: PathBuf,
        /// Treat `pde.u` as the exact solution and report convergence orders.
        #[arg(long)]
        manufactured: bool,
    },
    /// Evaluate named fields of a built surface on a lattice.
    Sample {
        config: PathBuf,
        /// Comma-separated field names.
        #[arg(long, value_delimiter = ',', required = true)]
        fields: Vec<String>,
        /// Points per axis as NX,NY,NZ,NT.
        #[arg(long, value_delimiter = ',', default_value = "5,5,5,1")]
        grid: Vec<usize>,
    },
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("config error: {0}")]
    Config(String),
    #[error("build rejected: {0}")]
    Build(String),
    #[error("{0}")]
    Check(String),
    #[error("solver failed: {0}")]
    Divergence(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Check(_) => 1,
            CliError::Usage(_) | CliError::Config(_) | CliError::Io(_) => 2,
            CliError::Build(_) => 3,
            CliError::Divergence(_) => 4,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let r = match cli.command {
        Command::Alpha { d, branch } => commands::alpha(d, branch.as_deref()),
        Command::BuildVerify { config } => commands::build_verify(&config),
        Command::Pde { config, manufactured } => commands::pde(&config, manufactured),
        Command::Sample { config, fields, grid } => commands::sample(&config, &fields, &grid),
    };
    match r {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("gcalabi: {e}");
            ExitCode::from(e.code())
        }
    }
}
