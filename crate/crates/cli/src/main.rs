//! `virstag`: command-line access to the staggered module computations.

use std::process::ExitCode;

use clap::Parser;
use virstag_cli::{commands, exit_for, Cli};

fn configure_threads() {
    if let Some(n) = std::env::var("VIRSTAG_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        // Fails only if a pool already exists, which cannot happen this early.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    configure_threads();
    match commands::run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            if cli.json {
                println!("{}", serde_json::json!({"error": e.to_string()}));
            } else {
                eprintln!("error: {e}");
            }
            ExitCode::from(exit_for(&e))
        }
    }
}
