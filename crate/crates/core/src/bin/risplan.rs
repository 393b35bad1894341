use std::process::ExitCode;

use clap::Parser;
use risplan::cli::{exit_code, run, Cli};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Prints help/version to stdout with status 0, usage errors with 2.
            let _ = e.print();
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    match run(&cli) {
        Ok(out) => {
            if !out.message.is_empty() {
                print!("{}", out.message);
                if !out.message.ends_with('\n') {
                    println!();
                }
            }
            for f in &out.files {
                eprintln!("wrote {}", f.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("risplan: {e}");
            ExitCode::from(exit_code(&e) as u8)
        }
    }
}
