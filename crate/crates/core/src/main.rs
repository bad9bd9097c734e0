use std::process::ExitCode;

use bass_serre::cli::{run, Cli, EXIT_ERROR};
use clap::Parser;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let source = match std::fs::read_to_string(&cli.file) {
        Ok(s) => s,
        Err(e) => {
            println!("ERROR: cannot read {}: {e}", cli.file.display());
            return ExitCode::from(EXIT_ERROR as u8);
        }
    };
    let report = run(&cli.command, &source, cli.depth);
    print!("{}", report.text);
    ExitCode::from(report.code as u8)
}
