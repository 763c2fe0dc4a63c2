//! Golden files for the `modgraph` binary.
//!
//! Each case reads `tests/golden/<name>.json` and compares the binary's
//! output with `tests/golden/<name>.out`. Setting `MODGRAPH_UPDATE_GOLDEN=1`
//! rewrites the expected files from the current output.

#![allow(dead_code)]

use std::fs;
use std::path::PathBuf;
use std::process::Command;

pub struct Case {
    pub name: &'static str,
    pub verb: &'static str,
    pub args: &'static [&'static str],
    pub code: i32,
}

const fn case(
    name: &'static str,
    verb: &'static str,
    args: &'static [&'static str],
    code: i32,
) -> Case {
    Case {
        name,
        verb,
        args,
        code,
    }
}

pub fn cases() -> Vec<Case> {
    vec![
        case("validate_tripod", "validate", &[], 0),
        case("validate_bad_involution", "validate", &[], 3),
        case("validate_contraction", "validate", &[], 0),
        case("invariants_tripod", "invariants", &[], 0),
        case("invariants_two_loops", "invariants", &[], 0),
        case("stabilize_chain", "stabilize", &[], 0),
        case("pushforward_forget_class", "pushforward", &[], 0),
        case("contract_split", "contract", &[], 0),
        case("cut_loop", "cut", &[], 0),
        case("glue_tails", "glue", &[], 0),
        case("forget_type_two", "forget", &[], 0),
        case("compose_contractions", "compose", &[], 0),
        case("pullback_split", "pullback", &[], 0),
        case("cartesian_case_two", "cartesian", &["--profile", "P2"], 0),
        case("boundary_four_points", "boundary", &["--profile", "P1"], 0),
        case("dim_conic", "dim", &["--profile", "P2"], 0),
        case("deg_conic", "deg", &["--profile", "P2"], 0),
        case("export_dot_split", "export-dot", &[], 0),
        case("schema_error", "invariants", &[], 2),
        case("size_cap", "invariants", &["--max-flags", "2"], 4),
    ]
}

fn dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden")
}

pub fn input(case: &Case) -> PathBuf {
    dir().join(format!("{}.json", case.name))
}

/// Runs the binary on the case; returns stdout and the exit code.
pub fn invoke(case: &Case) -> (String, i32) {
    let out = Command::new(env!("CARGO_BIN_EXE_modgraph"))
        .arg(case.verb)
        .arg("--in")
        .arg(input(case))
        .args(case.args)
        .output()
        .expect("binary runs");
    (
        String::from_utf8(out.stdout).expect("utf-8 output"),
        out.status.code().unwrap_or(-1),
    )
}

pub fn expected(case: &Case) -> String {
    let path = dir().join(format!("{}.out", case.name));
    if std::env::var_os("MODGRAPH_UPDATE_GOLDEN").is_some() {
        fs::write(&path, invoke(case).0).expect("write golden");
    }
    fs::read_to_string(&path).unwrap_or_default()
}
