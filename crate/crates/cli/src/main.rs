mod args;
mod commands;
mod serve;
mod style;

use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;

use args::{Cli, Command};
use style::Style;

/// Usage errors, matching BSD `EX_USAGE`.
const EXIT_USAGE: u8 = 64;
const EXIT_UNREADABLE: u8 = 2;
const EXIT_FAILURE: u8 = 1;

/// An input file that could not be read.
#[derive(Debug)]
pub struct Unreadable {
    pub path: PathBuf,
    pub source: io::Error,
}

impl std::fmt::Display for Unreadable {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "cannot read {}", self.path.display())
    }
}

impl std::error::Error for Unreadable {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        Some(&self.source)
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(EXIT_USAGE),
            };
        }
    };

    let style = Style::detect();
    let stdout = io::stdout();
    let mut out = stdout.lock();
    let result = match &cli.command {
        Command::Validate(a) => commands::validate(a, &style, &mut out),
        Command::Convert(a) => commands::convert(a, &style, &mut out),
        Command::Stats(a) => commands::stats(a, &mut out),
        Command::InferLabels(a) => commands::infer_labels(a, &mut out),
        Command::ExportMachamp(a) => commands::export_machamp(a, &style, &mut out),
        Command::ServeUi(a) => serve::run(a, &mut out),
    };
    let _ = out.flush();
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("{} {e:#}", style.error("error:"));
            if e.downcast_ref::<Unreadable>().is_some() {
                ExitCode::from(EXIT_UNREADABLE)
            } else {
                ExitCode::from(EXIT_FAILURE)
            }
        }
    }
}
