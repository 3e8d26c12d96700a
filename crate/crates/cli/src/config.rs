//! Run configuration: flags > `QCAT_*` environment > TOML config file > defaults.

use std::path::{Path, PathBuf};

use clap::ValueEnum;
use serde::Deserialize;

use qcat_core::{Precision, QContext};

use crate::error::{CliError, CliResult};
use crate::output::Document;

pub const DEFAULT_TOL: f64 = 1e-12;
pub const DEFAULT_NMAX: usize = 40;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
    #[default]
    Plain,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum PrecisionMode {
    #[default]
    Standard,
    Extended,
}

impl From<PrecisionMode> for Precision {
    fn from(p: PrecisionMode) -> Self {
        match p {
            PrecisionMode::Standard => Precision::Standard,
            PrecisionMode::Extended => Precision::Extended,
        }
    }
}

/// Values given on the command line or through the environment (clap
/// merges those two already).
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub q: Option<f64>,
    pub tol: Option<f64>,
    pub nmax: Option<usize>,
    pub format: Option<Format>,
    pub out: Option<PathBuf>,
    pub precision: Option<PrecisionMode>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub q: Option<f64>,
    pub tol: Option<f64>,
    pub nmax: Option<usize>,
    pub format: Option<Format>,
    pub out: Option<PathBuf>,
    pub precision: Option<PrecisionMode>,
}

impl FileConfig {
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub q: Option<f64>,
    pub series_tol: f64,
    pub n_max: usize,
    pub format: Format,
    pub out: Option<PathBuf>,
    pub precision: PrecisionMode,
    pub timestamp: bool,
}

impl RunConfig {
    pub fn resolve(over: Overrides, file: FileConfig, timestamp: bool) -> Self {
        RunConfig {
            q: over.q.or(file.q),
            series_tol: over.tol.or(file.tol).unwrap_or(DEFAULT_TOL),
            n_max: over.nmax.or(file.nmax).unwrap_or(DEFAULT_NMAX),
            format: over.format.or(file.format).unwrap_or_default(),
            out: over.out.or(file.out),
            precision: over.precision.or(file.precision).unwrap_or_default(),
            timestamp,
        }
    }

    pub fn require_q(&self) -> CliResult<f64> {
        self.q
            .ok_or_else(|| CliError::Usage("q is required (--q, QCAT_Q or the config file)".into()))
    }

    pub fn context(&self, q: f64) -> CliResult<QContext> {
        Ok(QContext::builder(q)
            .series_tol(self.series_tol)
            .precision(self.precision.into())
            .build()?)
    }

    /// Config echo placed at the top of every document.
    pub fn echo(&self, doc: &mut Document) {
        doc.meta("q", self.q);
        doc.meta("tol", self.series_tol);
        doc.meta("n_max", self.n_max);
        doc.meta(
            "precision",
            match self.precision {
                PrecisionMode::Standard => "standard",
                PrecisionMode::Extended => "extended",
            },
        );
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn overrides_beat_file_beat_defaults() {
        let file: FileConfig = toml::from_str("q = 0.3\ntol = 1e-10\nformat = \"json\"").unwrap();
        let over = Overrides {
            q: Some(0.7),
            ..Default::default()
        };
        let c = RunConfig::resolve(over, file, false);
        assert_eq!(c.q, Some(0.7));
        assert_eq!(c.series_tol, 1e-10);
        assert_eq!(c.format, Format::Json);
        assert_eq!(c.n_max, DEFAULT_NMAX);
        assert_eq!(c.precision, PrecisionMode::Standard);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(toml::from_str::<FileConfig>("qq = 1").is_err());
    }
}
