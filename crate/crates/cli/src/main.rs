//! `qcat`: construct q-deformed charge coherent states, run the verification
//! suites, scan for squeezing windows and tabulate observables.
//!
//! Exit codes: 0 success, 1 verification failure, 2 input or construction error.

mod config;
mod error;
mod goldens;
mod output;
mod scan;
mod state;
mod table;
mod verify;

use std::f64::consts::PI;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use qcat_core::observables::{Predicate, DEFAULT_SCAN_RESOLUTION};
use qcat_core::states::Parity;

use config::{FileConfig, Format, Overrides, PrecisionMode, RunConfig};
use error::{CliError, CliResult};
use output::Document;

#[derive(Debug, Parser)]
#[command(name = "qcat", version, about = "q-deformed even/odd charge coherent states")]
pub struct Cli {
    #[command(flatten)]
    globals: Globals,

    /// Regenerate the golden reference outputs into DIR and exit.
    #[arg(long, value_name = "DIR")]
    seed_goldens: Option<PathBuf>,

    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Debug, Args)]
struct Globals {
    /// Deformation parameter, 0 < q <= 1.
    #[arg(long, global = true, env = "QCAT_Q")]
    q: Option<f64>,
    /// Series truncation tolerance [default: 1e-12].
    #[arg(long, global = true, env = "QCAT_TOL")]
    tol: Option<f64>,
    /// Fock-space cutoff per mode [default: 40].
    #[arg(long, global = true, env = "QCAT_NMAX")]
    nmax: Option<usize>,
    #[arg(long, global = true, env = "QCAT_FORMAT", value_enum)]
    format: Option<Format>,
    /// Write output to PATH instead of standard output.
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    precision: Option<PrecisionMode>,
    /// Omit the generated_at line so output is byte-reproducible.
    #[arg(long, global = true)]
    no_timestamp: bool,
    /// TOML file with any of: q, tol, nmax, format, out, precision.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Dump the coefficients of one state with its eigen residuals.
    #[command(allow_negative_numbers = true)]
    State {
        #[arg(long, default_value_t = 0)]
        charge: i64,
        /// |xi|.
        #[arg(long)]
        xi: f64,
        /// Phase of xi; accepts numbers and forms like pi/2.
        #[arg(long, default_value = "0", allow_hyphen_values = true, value_parser = parse_angle)]
        theta: f64,
        #[arg(long, default_value = "full")]
        parity: Parity,
    },
    /// Run a verification suite; exits 1 if any check fails.
    Verify {
        #[arg(long, value_enum, default_value = "all")]
        suite: verify::Suite,
    },
    /// Find |xi| intervals where a predicate holds.
    #[command(allow_negative_numbers = true)]
    Scan {
        #[arg(long, default_value_t = 0)]
        charge: i64,
        /// coth-lt-1, j-negative, j-negative-unscaled or su11-squeezed.
        #[arg(long, default_value = "j-negative")]
        predicate: Predicate,
        #[arg(long, default_value_t = 0.0)]
        lo: f64,
        #[arg(long, default_value_t = 10.0)]
        hi: f64,
        #[arg(long, default_value_t = DEFAULT_SCAN_RESOLUTION)]
        resolution: f64,
        /// Also compare against the built-in reference windows; exits 1 on a mismatch.
        #[arg(long)]
        paper_check: bool,
    },
    /// Tabulate g or the quadrature variances over a grid, both routes side by side.
    #[command(allow_negative_numbers = true)]
    Table {
        #[arg(value_enum)]
        observable: table::Observable,
        /// Comma-separated deformations [default: --q]. An empty list gives an empty table.
        #[arg(long, allow_hyphen_values = true, value_parser = parse_list::<f64>)]
        qs: Option<List<f64>>,
        #[arg(long, allow_hyphen_values = true, default_value = "-2,-1,0,1,2", value_parser = parse_list::<i64>)]
        charges: List<i64>,
        #[arg(long, default_value = "0.3,0.8,1.5,3.0", value_parser = parse_list::<f64>)]
        moduli: List<f64>,
        #[arg(long, allow_hyphen_values = true, default_value = "0", value_parser = parse_angles)]
        thetas: List<f64>,
        #[arg(long, default_value = "even,odd,full", value_parser = parse_list::<Parity>)]
        parities: List<Parity>,
    },
}

/// Comma-separated grid axis.
#[derive(Debug, Clone, PartialEq)]
pub struct List<T>(Vec<T>);

fn split_list<T>(s: &str, item: impl Fn(&str) -> Result<T, String>) -> Result<List<T>, String> {
    let s = s.trim();
    if s.is_empty() {
        return Ok(List(Vec::new()));
    }
    s.split(',').map(|x| item(x.trim())).collect::<Result<_, _>>().map(List)
}

fn parse_list<T: std::str::FromStr>(s: &str) -> Result<List<T>, String>
where
    T::Err: std::fmt::Display,
{
    split_list(s, |x| x.parse::<T>().map_err(|e| format!("{x:?}: {e}")))
}

fn parse_angles(s: &str) -> Result<List<f64>, String> {
    split_list(s, parse_angle)
}

/// A float, `pi`, or `[k]pi/n` with optional sign.
fn parse_angle(s: &str) -> Result<f64, String> {
    let s = s.trim();
    if let Ok(v) = s.parse::<f64>() {
        return Ok(v);
    }
    let (num, den) = match s.split_once('/') {
        Some((a, b)) => (a, b.trim().parse::<f64>().map_err(|e| format!("bad angle {s:?}: {e}"))?),
        None => (s, 1.0),
    };
    let coef = match num.trim().strip_suffix("pi").map(|c| c.trim().trim_end_matches('*')) {
        Some("") | Some("+") => 1.0,
        Some("-") => -1.0,
        Some(c) => c.parse::<f64>().map_err(|e| format!("bad angle {s:?}: {e}"))?,
        None => return Err(format!("bad angle {s:?}")),
    };
    Ok(coef * PI / den)
}

pub enum Status {
    Ok,
    Failed,
}

fn config_for(cli: &Cli) -> CliResult<RunConfig> {
    let g = &cli.globals;
    let file = match &g.config {
        Some(p) => FileConfig::load(p)?,
        None => FileConfig::default(),
    };
    let over = Overrides {
        q: g.q,
        tol: g.tol,
        nmax: g.nmax,
        format: g.format,
        out: g.out.clone(),
        precision: g.precision,
    };
    Ok(RunConfig::resolve(over, file, !g.no_timestamp))
}

pub fn execute(cli: &Cli, cfg: &RunConfig) -> CliResult<(Document, Status)> {
    let status = |ok: bool| if ok { Status::Ok } else { Status::Failed };
    match cli.command.as_ref() {
        None => Err(CliError::Usage("a subcommand is required (see --help)".into())),
        Some(Command::State {
            charge,
            xi,
            theta,
            parity,
        }) => {
            let args = state::StateArgs {
                charge: *charge,
                xi: *xi,
                theta: *theta,
                parity: *parity,
            };
            Ok((state::run(cfg, &args)?, Status::Ok))
        }
        Some(Command::Verify { suite }) => {
            let (doc, failed) = verify::run(cfg, *suite)?;
            Ok((doc, status(failed == 0)))
        }
        Some(Command::Scan {
            charge,
            predicate,
            lo,
            hi,
            resolution,
            paper_check,
        }) => {
            if lo.is_nan() || hi.is_nan() || lo >= hi {
                return Err(CliError::Usage(format!("scan needs lo < hi, got [{lo}, {hi}]")));
            }
            let args = scan::ScanArgs {
                charge: *charge,
                predicate: *predicate,
                lo: *lo,
                hi: *hi,
                resolution: *resolution,
                paper_check: *paper_check,
            };
            let (doc, ok) = scan::run(cfg, &args)?;
            Ok((doc, status(ok)))
        }
        Some(Command::Table {
            observable,
            qs,
            charges,
            moduli,
            thetas,
            parities,
        }) => {
            let qs = match qs {
                Some(v) => v.0.clone(),
                None => vec![cfg.require_q()?],
            };
            let grid = table::Grid {
                qs,
                charges: charges.0.clone(),
                moduli: moduli.0.clone(),
                thetas: thetas.0.clone(),
                parities: parities.0.clone(),
            };
            Ok((table::run(cfg, *observable, &grid)?, Status::Ok))
        }
    }
}

pub fn render(doc: &Document, cfg: &RunConfig) -> CliResult<Vec<u8>> {
    let stamp = cfg
        .timestamp
        .then(|| chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true));
    let mut buf = Vec::new();
    doc.render(cfg.format, stamp.as_deref(), &mut buf)?;
    Ok(buf)
}

fn run(cli: &Cli) -> CliResult<Status> {
    if let Some(dir) = &cli.seed_goldens {
        goldens::seed(dir)?;
        return Ok(Status::Ok);
    }
    let cfg = config_for(cli)?;
    let (doc, status) = execute(cli, &cfg)?;
    let bytes = render(&doc, &cfg)?;
    match &cfg.out {
        Some(path) => std::fs::write(path, bytes)?,
        None => std::io::stdout().lock().write_all(&bytes)?,
    }
    Ok(status)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(Status::Ok) => ExitCode::SUCCESS,
        Ok(Status::Failed) => ExitCode::from(1),
        Err(e) => {
            eprintln!("{}", e.record());
            ExitCode::from(2)
        }
    }
}
