use std::process::exit;

use clap::Parser;
use rvfl::cli::{exit_code, Cli};

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            exit(code);
        }
    };
    match cli.run() {
        Ok(code) => exit(code),
        Err(err) => {
            eprintln!("error: {err}");
            exit(exit_code(&err));
        }
    }
}
