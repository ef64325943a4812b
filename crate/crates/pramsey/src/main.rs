use std::process::ExitCode;

use clap::Parser;
use pramsey::commands::{run, Cli};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            // --help and --version are not errors.
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(&cli) {
        Ok(o) => {
            if cli.global.out.is_some() {
                println!("{}", o.message);
            } else {
                eprintln!("{}", o.message);
            }
            if o.passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            match e.stage() {
                Some(stage) => eprintln!("error [{stage}] {}: {e}", e.kind()),
                None => eprintln!("error {}: {e}", e.kind()),
            }
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
