mod args;
mod commands;
mod envelope;

use std::process::ExitCode;

use clap::Parser;

use crate::args::Cli;
use crate::envelope::{Failure, EXIT_ASSERTION, EXIT_PARSE};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_PARSE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Some(t) = cli.common.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t.max(1)).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_PARSE);
        }
    }
    match commands::run(&cli) {
        Ok(pass) => ExitCode::from(if pass { 0 } else { EXIT_ASSERTION }),
        Err(Failure { code, message }) => {
            eprintln!("error: {message}");
            ExitCode::from(code)
        }
    }
}
