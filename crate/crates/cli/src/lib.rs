//! Command-line front end: argument and config handling, parallel sweeps,
//! CSV output and the verification harness.

pub mod cli;
pub mod commands;
pub mod config;
pub mod error;
pub mod output;
pub mod params;
pub mod runner;
pub mod verify;

use clap::Parser;

use crate::cli::{Cli, Command};
use crate::error::CliError;
use crate::output::{emit, RunManifest};
use crate::params::Resolver;

/// Executes one parsed invocation, writing its CSV.
pub fn execute(cli: &Cli) -> Result<(), CliError> {
    let common = match &cli.command {
        Command::Coeffs(a) => &a.common,
        Command::Trace(a) => &a.common,
        Command::Verify(a) => &a.common,
        Command::SweepTruncation(a)
        | Command::SweepSize(a)
        | Command::Oracle(a)
        | Command::Evolve(a) => a,
    };
    let mut resolver = Resolver::new(common)?;
    let outcome = match &cli.command {
        Command::Coeffs(a) => commands::coeffs(a, &mut resolver)?,
        Command::SweepTruncation(_) => commands::sweep_truncation(&mut resolver)?,
        Command::SweepSize(_) => commands::sweep_size(&mut resolver)?,
        Command::Trace(a) => commands::trace(a, &mut resolver)?,
        Command::Verify(a) => verify::verify(a, &mut resolver)?,
        Command::Oracle(a) => commands::oracle(a, &mut resolver)?,
        Command::Evolve(_) => commands::evolve(&mut resolver)?,
    };
    let out = resolver.out()?;
    let manifest = RunManifest::new(cli.command.name(), resolver.record);
    emit(&outcome.table.render(&manifest), out.as_deref())?;
    match outcome.failure {
        Some(msg) => Err(CliError::Verification(msg)),
        None => Ok(()),
    }
}

/// Parses `args` and runs; returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
