//! `fujiwara`: batch runner for Fujiwara Laplacian experiments.
//!
//! Exit status: 0 on success, 1 on domain errors or failed numeric checks,
//! 2 on usage or parse errors.

mod commands;
mod input;
mod output;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use fujiwara::linalg::DEFAULT_TOL;
use fujiwara::reduce::ReduceConfig;
use fujiwara::{Edge, OptimizeConfig, SweepConfig};
use thiserror::Error;

use commands::{parse_decades, parse_edge, Decades};
use output::{Format, Report};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Parse(String),

    #[error("cannot read {0}")]
    Input(String),

    #[error("{0}")]
    Usage(String),

    #[error(transparent)]
    Domain(#[from] fujiwara::Error),

    #[error("cannot write report: {0}")]
    Output(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Parse(_) | CliError::Input(_) | CliError::Usage(_) => 2,
            CliError::Domain(_) | CliError::Output(_) => 1,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "fujiwara", version, about = "Spectral experiments on length-weighted graphs")]
struct Cli {
    /// Report format.
    #[arg(long, value_enum, default_value_t = Format::Csv, global = true)]
    format: Format,

    /// Write the report here instead of stdout.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Full spectrum, λ1, normalized λ1 and a multiplicity flag.
    Spectrum {
        file: PathBuf,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
    },

    /// Sweep the degenerating cycle family and fit the exponents of λ1, λ2.
    CycleAsymptotics {
        #[arg(long, value_parser = clap::value_parser!(u64).range(3..))]
        n: u64,
        /// Range of t as HI:LO.
        #[arg(long, default_value = "1e-1:1e-6", value_parser = parse_decades)]
        t_decades: Decades,
        #[arg(long, default_value_t = 10, value_parser = clap::value_parser!(u64).range(1..))]
        per_decade: u64,
        /// Largest-t samples left out of the slope fits.
        #[arg(long, default_value_t = 2)]
        drop: usize,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
    },

    /// Pendant and cut operations.
    Surgery {
        #[command(subcommand)]
        op: SurgeryCmd,
    },

    /// Multi-start ascent of λ1·(Σ m0)² over edge lengths.
    Maximize {
        file: PathBuf,
        /// Iterations per start.
        #[arg(long, default_value_t = 200)]
        budget: usize,
        /// Objective value treated as divergence.
        #[arg(long, default_value_t = 1e8)]
        cap: f64,
        #[arg(long, default_value_t = 8, value_parser = clap::value_parser!(u64).range(1..))]
        starts: u64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
}

#[derive(Debug, Subcommand)]
enum SurgeryCmd {
    /// Attach a pendant edge of length t at a vertex.
    Attach {
        file: PathBuf,
        #[arg(long)]
        at: usize,
        #[arg(long)]
        t: f64,
    },
    /// Contract a pendant vertex into its neighbour.
    Contract {
        file: PathBuf,
        #[arg(long)]
        vertex: usize,
    },
    /// Cut a vertex, keeping one incident edge on the original.
    Cut {
        file: PathBuf,
        #[arg(long)]
        vertex: usize,
        /// Edge kept at the vertex, as U,V.
        #[arg(long, value_parser = parse_edge)]
        keep: Edge,
    },
    /// Spectrum of G plus a shrinking pendant against the spectrum of G.
    Converge {
        file: PathBuf,
        #[arg(long)]
        at: usize,
        #[arg(long, default_value = "1e-3:1e-6", value_parser = parse_decades)]
        t_decades: Decades,
        #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u64).range(1..))]
        per_decade: u64,
    },
    /// Cut and contract down to a girth cycle, checking each step.
    Reduce {
        file: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
    },
}

fn run(cli: &Cli) -> Result<Report, CliError> {
    match &cli.command {
        Command::Spectrum { file, tol } => commands::spectrum(&input::read_graph(file)?, positive(*tol, "tol")?),
        Command::CycleAsymptotics { n, t_decades, per_decade, drop, tol } => {
            let config = SweepConfig { drop_largest: *drop, tol: positive(*tol, "tol")? };
            commands::cycle_asymptotics(*n as usize, &t_decades.grid(*per_decade as usize), &config)
        }
        Command::Surgery { op } => match op {
            SurgeryCmd::Attach { file, at, t } => commands::attach(&input::read_graph(file)?, *at, *t),
            SurgeryCmd::Contract { file, vertex } => commands::contract(&input::read_graph(file)?, *vertex),
            SurgeryCmd::Cut { file, vertex, keep } => commands::cut(&input::read_graph(file)?, *vertex, *keep),
            SurgeryCmd::Converge { file, at, t_decades, per_decade } => {
                commands::converge(&input::read_graph(file)?, *at, &t_decades.grid(*per_decade as usize))
            }
            SurgeryCmd::Reduce { file, seed } => {
                let mut config = ReduceConfig::default();
                if let Some(s) = seed {
                    config.seed = *s;
                }
                commands::reduce(&input::read_graph(file)?, &config)
            }
        },
        Command::Maximize { file, budget, cap, starts, seed } => {
            let config = OptimizeConfig {
                budget: *budget,
                cap: positive(*cap, "cap")?,
                starts: *starts as usize,
                seed: *seed,
                ..OptimizeConfig::default()
            };
            commands::maximize(&input::read_graph(file)?.graph, &config)
        }
    }
}

fn positive(x: f64, name: &str) -> Result<f64, CliError> {
    if x > 0.0 && x.is_finite() {
        Ok(x)
    } else {
        Err(CliError::Usage(format!("--{name} must be a positive number, got {x}")))
    }
}

fn emit(cli: &Cli, report: &Report) -> Result<(), CliError> {
    let bytes = report.render(cli.format)?;
    let written = match &cli.output {
        Some(path) => std::fs::write(path, &bytes).map_err(|e| format!("{}: {e}", path.display())),
        None => std::io::stdout().lock().write_all(&bytes).map_err(|e| e.to_string()),
    };
    written.map_err(CliError::Output)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = run(&cli).and_then(|r| emit(&cli, &r).map(|_| r.passed));
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("fujiwara: numeric checks failed (see report)");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("fujiwara: error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
