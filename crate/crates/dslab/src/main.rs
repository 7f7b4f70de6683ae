use std::process::ExitCode;

use clap::Parser;
use dslab::{execute, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(summary) => {
            println!("{summary}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("dslab: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
