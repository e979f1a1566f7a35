use std::process::ExitCode;

use clap::Parser;
use ovalbound::cli::{self, Cli};

fn main() -> ExitCode {
    let args = Cli::parse();
    if let Some(n) = cli::thread_cap() {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("warning: could not size thread pool: {e}");
        }
    }
    match cli::run(&args) {
        Ok(report) => {
            print!("{}", report.to_json());
            if report.all_passed() {
                ExitCode::SUCCESS
            } else {
                for c in report.checks.iter().filter(|c| !c.passed) {
                    eprintln!("check failed: {} (margin {:e})", c.name, c.margin);
                }
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
