use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use disjhull_cli::{run, Cli};

fn main() -> ExitCode {
    let outcome = run(Cli::parse());
    print!("{}", outcome.stdout);
    eprint!("{}", outcome.stderr);
    let _ = std::io::stdout().flush();
    ExitCode::from(outcome.code as u8)
}
