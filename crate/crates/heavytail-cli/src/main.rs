//! Entry point: parse, dispatch, map failures to exit codes
//! (0 success, 1 internal, 2 input/parse, 3 numerical).

mod cli;
mod commands;
mod io;
mod report;

use clap::Parser;

fn main() {
    let parsed = cli::Cli::parse();
    let result = match &parsed.command {
        cli::Command::Fit(args) => commands::fit::run(args),
        cli::Command::Nu(args) => commands::nu::run(args),
        cli::Command::Simulate(args) => commands::simulate::run(args),
        cli::Command::Bench(args) => commands::bench::run(args),
    };
    if let Err(e) = result {
        eprintln!("error: {e}");
        std::process::exit(e.kind.exit_code());
    }
}
