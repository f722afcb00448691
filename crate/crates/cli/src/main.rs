//! Batch front end for the noisy interference-optimization laboratory.
//!
//! Subcommands: `gen` (instance files), `predict` (closed-form rows),
//! `simulate` (exact and sampled noisy scores), `sweep` (prediction next to
//! simulation), `decode-lab` (imperfect-decoder lower-bound experiments)
//! and `verify` (the enumeration-backed identity suite).
//!
//! Exit codes: 0 success, 1 usage error, 2 computation error,
//! 3 verification failure.

mod commands;
mod options;
mod report;

use clap::error::ErrorKind;
use clap::Parser;

use options::Cli;

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = err.print();
            std::process::exit(code);
        }
    };
    match commands::run(cli) {
        Ok(commands::Outcome::Success) => {}
        Ok(commands::Outcome::VerificationFailed) => std::process::exit(3),
        Err(err) => {
            if is_broken_pipe(&err) {
                std::process::exit(0);
            }
            eprintln!("error: {err:#}");
            std::process::exit(2);
        }
    }
}

fn is_broken_pipe(err: &anyhow::Error) -> bool {
    err.chain().any(|cause| {
        cause
            .downcast_ref::<std::io::Error>()
            .is_some_and(|io| io.kind() == std::io::ErrorKind::BrokenPipe)
    })
}
