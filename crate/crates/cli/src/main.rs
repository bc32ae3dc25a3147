//! `dlo`: trace DLO scenes, generate synthetic datasets, run benchmarks.
//!
//! Exit codes: 0 success, 2 usage, 3 some images or scenes failed, 4 I/O.
//! Diagnostics go to stderr as one JSON object per line.

mod args;
mod bench;
mod diag;
mod error;
mod gen;
mod run;

use std::process::ExitCode;

use clap::Parser;

use crate::args::{Cli, Command};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code();
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    let outcome = match cli.command {
        Command::Run(a) => run::run(a),
        Command::Gen(a) => gen::gen(a),
        Command::Bench(a) => bench::bench(a),
    };
    let status = match outcome {
        Ok(s) => s,
        Err(e) => {
            diag::error(&e);
            e.status()
        }
    };
    ExitCode::from(status as u8)
}
