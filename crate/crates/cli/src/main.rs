use std::process::ExitCode;

use clap::Parser;

use gblearn::Error;

mod args;
mod commands;
mod config;

/// Process exit status for a failed command: 2 for unreadable input, 3 for
/// an exhausted pair budget, 4 for mismatched shapes, 1 otherwise.
fn exit_code(err: &Error) -> u8 {
    match err {
        Error::Parse { .. } | Error::Version { .. } | Error::MalformedEncoding(_) => 2,
        Error::BudgetExceeded { .. } => 3,
        Error::Shape { .. } | Error::Dimension { .. } => 4,
        _ => 1,
    }
}

fn main() -> ExitCode {
    let argv = match config::expand(std::env::args_os().collect()) {
        Ok(argv) => argv,
        Err(msg) => {
            eprintln!("error: {msg}");
            return ExitCode::from(2);
        }
    };
    let cli = args::Cli::parse_from(argv);
    match commands::run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code(&err))
        }
    }
}
