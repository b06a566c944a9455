//! `polariton` — cavity-magnon polariton workflows on the command line.
//!
//! Subcommands cover the full pipeline: synthesize transmission maps,
//! extract ridge points, fit hybrid-mode models in stages, predict
//! coupling rates from cavity field maps, rescale couplings between
//! materials, and locate magnetically insensitive (double-magic)
//! operating points.
//!
//! Every output embeds a digest of the effective configuration —
//! flags override a `--config` JSON file, which overrides built-in
//! defaults; `POLARITON_SEED` overrides every other seed source — and
//! all files are written atomically.  Exit codes: 0 success, 2 usage or
//! validation failure, 3 I/O failure.

mod cmd_couple;
mod cmd_extract;
mod cmd_fit;
mod cmd_magic;
mod cmd_predict;
mod cmd_report;
mod cmd_synth;
mod error;
mod io;
mod parse;

use clap::{Parser, Subcommand};

use error::AppError;

#[derive(Debug, Parser)]
#[command(
    name = "polariton",
    version,
    about = "Cavity-magnon polariton toolkit: spectroscopy, coupling, metrology"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Synthesize a two-tone transmission map for a hybrid model.
    Synth(cmd_synth::SynthArgs),
    /// Extract per-branch ridge points from a transmission map.
    Extract(cmd_extract::ExtractArgs),
    /// Fit a hybrid-mode model to ridge data (stages a, b, c).
    Fit(cmd_fit::FitArgs),
    /// First-principles coupling rates from a cavity field map.
    Couple(cmd_couple::CoupleArgs),
    /// Rescale a measured coupling to another material.
    Predict(cmd_predict::PredictArgs),
    /// Locate a double-magic operating point and its sensitivity budget.
    Magic(cmd_magic::MagicArgs),
    /// Summarize artifact JSONs.
    Report(cmd_report::ReportArgs),
}

fn dispatch(cli: &Cli) -> Result<(), AppError> {
    match &cli.command {
        Command::Synth(args) => cmd_synth::run(args),
        Command::Extract(args) => cmd_extract::run(args),
        Command::Fit(args) => cmd_fit::run(args),
        Command::Couple(args) => cmd_couple::run(args),
        Command::Predict(args) => cmd_predict::run(args),
        Command::Magic(args) => cmd_magic::run(args),
        Command::Report(args) => cmd_report::run(args),
    }
}

/// Restore the default SIGPIPE disposition so the process dies silently
/// when a downstream pipe closes, like other command-line filters, instead
/// of panicking on the resulting write error.
#[cfg(unix)]
fn reset_sigpipe() {
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
}

#[cfg(not(unix))]
fn reset_sigpipe() {}

fn main() {
    reset_sigpipe();
    let cli = Cli::parse();
    if let Err(err) = dispatch(&cli) {
        eprintln!("{err}");
        std::process::exit(err.exit_code());
    }
}
