use std::io;
use std::process::ExitCode;

use clap::Parser;
use clonecast_cli::{run, RunConfig};

fn main() -> ExitCode {
    let config = RunConfig::parse();
    let stdout = io::stdout();
    let mut lock = stdout.lock();
    match run(config, &mut lock) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("clonecast: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
