//! `fatpoints` — exact fat-point computations on weighted projective
//! planes, from the command line.
//!
//! The binary is a thin shell around the library crate:
//!   * `opts` declares the flags and parses the small textual formats
//!   * `run` executes commands and assembles CSV/JSON output
//!   * `cache` persists (h0, rank) cells between runs
//!   * `report` fixes the JSON shapes
//!
//! Exit codes: 0 on success, 2 for invalid input (including flag parse
//! errors), 3 when an internal invariant check fails — the latter signals
//! a bug, never a user error.

mod cache;
mod opts;
mod report;
mod run;

use clap::Parser;
use fatpoints::Error;

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::InvalidInput(_) => 2,
        Error::Invariant(_) => 3,
    }
}

fn main() {
    let argv: Vec<String> = std::env::args().collect();
    let argv = match opts::merge_config_args(argv) {
        Ok(v) => v,
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(exit_code(&e));
        }
    };
    let cli = opts::Cli::parse_from(&argv);
    if let Err(e) = run::dispatch(cli) {
        eprintln!("error: {e}");
        std::process::exit(exit_code(&e));
    }
}
