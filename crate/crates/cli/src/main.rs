//! Batch driver for the roof shape studies: solves, optimization runs,
//! geometry certification and convergence studies, all configured from
//! plain TOML files and emitting CSV/VTK/key-value outputs.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

/// Exit status contract: 0 success, 1 failed checks or infeasибility,
/// 2 usage or configuration errors.
pub enum Outcome {
    Pass,
    Fail(String),
}

#[derive(Debug)]
pub enum CliError {
    /// Bad usage, unreadable or invalid configuration: exit 2.
    Config(String),
    /// Runtime failure of a study (solver breakdown etc.): exit 1.
    Run(String),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "{m}"),
            CliError::Run(m) => write!(f, "{m}"),
        }
    }
}

impl From<roofopt_core::Error> for CliError {
    fn from(e: roofopt_core::Error) -> Self {
        use roofopt_core::Error as E;
        match e {
            E::Parse(_) | E::Io(_) => CliError::Config(e.to_string()),
            other => CliError::Run(other.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Run(format!("io error: {e}"))
    }
}

#[derive(Parser)]
#[command(
    name = "roofopt",
    version,
    about = "Elastic roof cross-sections: solves, shape search, certification and convergence studies"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one roof problem and export displacement and energy report.
    Solve {
        #[arg(long)]
        config: PathBuf,
    },
    /// Search the admissible class for an energy-minimizing profile.
    Optimize {
        #[arg(long)]
        config: PathBuf,
    },
    /// Certify the cone property of a polygon at a given aperture.
    CheckGeometry {
        /// Vertex list file, one `x y` per line.
        #[arg(long)]
        polygon: PathBuf,
        #[arg(long)]
        eps: f64,
        /// Boundary sampling step; defaults to eps/20.
        #[arg(long)]
        boundary_step: Option<f64>,
        #[arg(long, default_value_t = 64)]
        directions: usize,
        #[arg(long, default_value_t = 200)]
        cone_samples: usize,
        /// Optional report file.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Estimate the discrete Korn and Poincare constants under refinement.
    Korn {
        #[arg(long)]
        config: PathBuf,
    },
    /// Check the boundary Green identity residual and its refinement rate.
    GreenCheck {
        #[arg(long)]
        config: PathBuf,
    },
    /// Run a Robin-form convergence study on a domain sequence.
    Mosco {
        #[arg(long)]
        config: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Solve { config } => commands::solve::run(&config),
        Command::Optimize { config } => commands::optimize::run(&config),
        Command::CheckGeometry {
            polygon,
            eps,
            boundary_step,
            directions,
            cone_samples,
            report,
        } => commands::check_geometry::run(
            &polygon,
            eps,
            boundary_step,
            directions,
            cone_samples,
            report.as_deref(),
        ),
        Command::Korn { config } => commands::korn::run(&config),
        Command::GreenCheck { config } => commands::green_check::run(&config),
        Command::Mosco { config } => commands::mosco::run(&config),
    };
    match result {
        Ok(Outcome::Pass) => ExitCode::SUCCESS,
        Ok(Outcome::Fail(message)) => {
            eprintln!("check failed: {message}");
            ExitCode::from(1)
        }
        Err(CliError::Run(message)) => {
            eprintln!("error: {message}");
            ExitCode::from(1)
        }
        Err(CliError::Config(message)) => {
            eprintln!("config error: {message}");
            ExitCode::from(2)
        }
    }
}
