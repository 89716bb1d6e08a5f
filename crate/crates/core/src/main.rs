use std::process::ExitCode;

use clap::Parser;
use hurwitz_cx::cli::{run, RunConfig, EXIT_USAGE};

fn main() -> ExitCode {
    let config = match RunConfig::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { 0 });
        }
    };
    match run(&config) {
        Ok(outcome) => {
            match &config.output {
                Some(path) => {
                    if let Err(e) = std::fs::write(path, &outcome.output) {
                        eprintln!("error: cannot write {}: {e}", path.display());
                        return ExitCode::from(EXIT_USAGE);
                    }
                }
                None => print!("{}", outcome.output),
            }
            ExitCode::from(outcome.status)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_USAGE)
        }
    }
}
