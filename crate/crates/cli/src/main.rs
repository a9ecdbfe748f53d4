use std::process::ExitCode;

use clap::Parser;
use qibench::Cli;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (mut out, mut err) = (std::io::stdout().lock(), std::io::stderr());
    match qibench::run(&cli, &mut out, &mut err) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("qibench: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
