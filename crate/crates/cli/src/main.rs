use std::process::ExitCode;
use std::time::Instant;

use alignfree_cli::{render, run, Cli};
use clap::Parser;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let start = Instant::now();
    match run(&cli) {
        Ok(rep) => {
            print!("{}", render(&rep, cli.format));
            // wall time stays out of the report so reports are byte-stable
            eprintln!("wall time: {:.2} s", start.elapsed().as_secs_f64());
            if rep.pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(3)
        }
    }
}
