use std::fs;
use std::io::{self, Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use modgraph::cli::{run, CommandRequest, ProfileSource, Verb, DEFAULT_MAX_FLAGS};

/// Stable marked modular graphs: validation, stabilization, pullbacks,
/// isogenies and cartesian families.
#[derive(Parser)]
#[command(name = "modgraph", version)]
struct Args {
    /// One of: validate, invariants, stabilize, pushforward, contract, cut,
    /// glue, forget, compose, pullback, cartesian, boundary, dim, deg,
    /// export-dot.
    verb: Verb,
    /// Read the payload from this file instead of stdin.
    #[arg(long = "in")]
    input: Option<PathBuf>,
    /// Write the result to this file instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// P1, P2, P3, point, or a path to a profile JSON file.
    #[arg(long)]
    profile: Option<String>,
    #[arg(long, default_value_t = DEFAULT_MAX_FLAGS)]
    max_flags: usize,
    /// Accepted for symmetry with the randomized suites; no verb draws
    /// random numbers.
    #[arg(long)]
    seed: Option<u64>,
}

fn main() -> ExitCode {
    let args = Args::parse();
    let payload = match &args.input {
        Some(p) => fs::read_to_string(p),
        None => {
            let mut s = String::new();
            io::stdin().read_to_string(&mut s).map(|_| s)
        }
    };
    let payload = match payload {
        Ok(p) => p,
        Err(e) => {
            eprintln!("modgraph: cannot read input: {e}");
            return ExitCode::from(2);
        }
    };
    let profile = match args.profile.as_deref() {
        None => None,
        Some(name @ ("P1" | "P2" | "P3" | "point")) => Some(ProfileSource::Named(name.into())),
        Some(path) => match fs::read_to_string(path) {
            Ok(text) => Some(ProfileSource::Document(text)),
            Err(e) => {
                eprintln!("modgraph: cannot read profile {path}: {e}");
                return ExitCode::from(2);
            }
        },
    };
    let _ = args.seed;
    let result = run(&CommandRequest {
        verb: args.verb,
        payload,
        profile,
        max_flags: args.max_flags,
    });
    let written = match &args.out {
        Some(p) => fs::write(p, &result.text),
        None => io::stdout().write_all(result.text.as_bytes()),
    };
    if let Err(e) = written {
        eprintln!("modgraph: cannot write output: {e}");
        return ExitCode::from(2);
    }
    ExitCode::from(result.code as u8)
}
