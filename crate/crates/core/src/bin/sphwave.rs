use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use sphwave::cli::{error_code, run, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.workers {
        if n > 0 {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
    }
    match run(&cli) {
        Ok(o) => {
            let _ = std::io::stdout().write_all(o.stdout.as_bytes());
            ExitCode::from(o.code as u8)
        }
        Err(e) => {
            eprintln!("sphwave: {e}");
            ExitCode::from(error_code(&e) as u8)
        }
    }
}
