//! Reference invocations whose CSV output is committed under
//! `crates/cli/tests/goldens`. `qcat --seed-goldens DIR` rewrites them.

use std::path::Path;

use clap::Parser;

use crate::error::{CliError, CliResult};
use crate::{execute, render, Cli};

pub const CASES: &[(&str, &[&str])] = &[
    (
        "state_even",
        &[
            "state", "--q", "0.5", "--charge", "1", "--xi", "0.8", "--parity", "even",
        ],
    ),
    (
        "state_full_undeformed",
        &[
            "state", "--q", "1.0", "--charge", "2", "--xi", "0.5", "--parity", "full",
        ],
    ),
    (
        "state_odd_negative",
        &[
            "state", "--q", "0.7", "--charge", "-2", "--xi", "1.2", "--theta", "pi/3", "--parity", "odd",
        ],
    ),
    (
        "scan_reference",
        &[
            "scan",
            "--q",
            "0.2",
            "--charge",
            "0",
            "--predicate",
            "j-negative",
            "--paper-check",
        ],
    ),
    (
        "scan_coth",
        &["scan", "--q", "0.5", "--charge", "1", "--predicate", "coth-lt-1"],
    ),
    (
        "scan_empty",
        &["scan", "--q", "0.9", "--charge", "5", "--predicate", "j-negative"],
    ),
    (
        "table_g",
        &[
            "table",
            "g",
            "--qs",
            "0.2,0.5,0.9",
            "--charges",
            "-1,0,2",
            "--moduli",
            "0.5,1.5",
            "--thetas",
            "0",
            "--parities",
            "even,odd,full",
        ],
    ),
    (
        "table_variances",
        &[
            "table",
            "variances",
            "--q",
            "0.5",
            "--charges",
            "0,1",
            "--moduli",
            "0,0.5",
            "--thetas",
            "pi/2",
            "--parities",
            "even,odd",
        ],
    ),
    ("verify_algebra", &["verify", "--suite", "algebra", "--q", "0.5"]),
];

/// Full argument vector of a case, as passed to the binary.
pub fn argv(args: &[&str]) -> Vec<String> {
    ["qcat", "--format", "csv", "--no-timestamp"]
        .iter()
        .chain(args)
        .map(|s| s.to_string())
        .collect()
}

pub fn seed(dir: &Path) -> CliResult<()> {
    std::fs::create_dir_all(dir)?;
    for (name, args) in CASES {
        let cli = Cli::try_parse_from(argv(args)).map_err(|e| CliError::Usage(e.to_string()))?;
        let mut cfg = crate::config_for(&cli)?;
        cfg.timestamp = false;
        let (doc, _) = execute(&cli, &cfg)?;
        std::fs::write(dir.join(format!("{name}.csv")), render(&doc, &cfg)?)?;
    }
    let manifest: String = CASES
        .iter()
        .map(|(name, args)| format!("{name}\t{}\n", argv(args)[1..].join(" ")))
        .collect();
    std::fs::write(dir.join("manifest.tsv"), manifest)?;
    Ok(())
}
