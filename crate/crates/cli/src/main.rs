//! `su11`: single-point evaluation, sweeps, difference maps, region
//! boundaries and oracle validation for the SU(1,1) sensitivity model.
//!
//! Parameters are `key=value` pairs after the subcommand, optionally read
//! from a `--config` file of the same pairs (one per line, `#` comments).
//! Pairs on the command line override the file.
//!
//! Exit status: 0 success, 1 runtime failure, 2 bad configuration,
//! 3 infeasible `eval` point, 4 oracle validation failure.

mod commands;
mod error;
mod output;
mod params;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};

use crate::error::Result;
use crate::params::Params;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Command {
    /// Bounds at one parameter point
    Eval,
    /// 1-D or 2-D table of bounds
    Sweep,
    /// Two-axis table of qcrb - hl
    Map,
    /// Squeezing fractions where qcrb - hl changes sign
    Regions,
    /// Compare every closed form against the Fock-space oracle
    Validate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Parser)]
#[command(name = "su11", version, about = "Phase-sensitivity bounds of an SU(1,1) interferometer")]
struct Cli {
    command: Command,

    /// Parameters as key=value
    params: Vec<String>,

    /// File of key=value lines
    #[arg(long)]
    config: Option<PathBuf>,

    #[arg(long, value_enum, default_value = "csv")]
    format: Format,

    /// Write here instead of standard output
    #[arg(long, short)]
    output: Option<PathBuf>,
}

fn execute(cli: &Cli) -> Result<()> {
    let mut params = Params::load(cli.config.as_deref(), &cli.params)?;
    let mut out: Box<dyn Write> = match &cli.output {
        Some(path) => Box::new(BufWriter::new(File::create(path)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    };
    let result = commands::run(cli.command, &mut params, cli.format, out.as_mut());
    out.flush()?;
    result
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("su11: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
