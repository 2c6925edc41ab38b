//! `qes`: command-line front end for the radial-equation toolkit.
//!
//! Every command writes CSV/JSON artifacts plus a `manifest.json` into the
//! output directory (`--out-dir`, or `QES_OUT_DIR`). Exit codes: 0 success,
//! 2 usage or argument error, 3 numerical consistency failure, 1 anything else.

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crate::commands::{ConditionalArgs, ExactArgs, OracleArgs, RefuteArgs, ReplayArgs, SweepArgs};

#[derive(Debug, Parser)]
#[command(name = "qes", version, about = "Polynomial solutions and numerical spectra of the radial oscillator with Coulomb and linear terms")]
pub struct Cli {
    /// Directory for CSV/JSON artifacts and the run manifest.
    #[arg(long, global = true, env = "QES_OUT_DIR", default_value = "qes-output")]
    pub out_dir: PathBuf,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Closed-form spectrum and eigenfunctions for a = b = 0.
    Exact(ExactArgs),
    /// Admissible a-values and polynomial solutions of degree n at fixed b.
    Conditional(ConditionalArgs),
    /// Numerical spectrum, optionally with a Hellmann-Feynman check.
    Oracle(OracleArgs),
    /// Check a model's claimed closed-form energy against the numerical spectrum.
    Refute(RefuteArgs),
    /// Admissible a^(n,i)(b) curves over a grid of b.
    Sweep(SweepArgs),
    /// Re-run a previous invocation from its manifest.
    Replay(ReplayArgs),
}

fn exit_code(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<qes_core::Error>() {
        Some(qes_core::Error::Argument(_) | qes_core::Error::Domain(_)) => 2,
        Some(qes_core::Error::Consistency(_)) => 3,
        None => 1,
    }
}

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().collect();
    let cli = Cli::parse_from(&argv);
    match commands::run(cli, commands::strip_out_dir(&argv[1..])) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}
