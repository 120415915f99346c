use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use treedim::cli::{run, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(outcome) => {
            for d in &outcome.diagnostics {
                eprintln!("treedim: {d}");
            }
            let mut stdout = std::io::stdout().lock();
            if stdout.write_all(outcome.output.as_bytes()).is_err() {
                return ExitCode::from(2);
            }
            ExitCode::from(outcome.code as u8)
        }
        Err(f) => {
            eprintln!("treedim: error: {}", f.message);
            ExitCode::from(f.code as u8)
        }
    }
}
