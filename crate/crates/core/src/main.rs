use std::process::ExitCode;

use bbm_core::cli::{exit_code, run, Cli};
use clap::Parser;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut stdout = std::io::stdout().lock();
    match run(&cli, &mut stdout) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("bbm-lab {}: error: {e}", cli.command.name());
            ExitCode::from(exit_code(&e) as u8)
        }
    }
}
