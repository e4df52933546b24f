//! Run configuration: flags and environment over a TOML file over defaults.

use std::fs;
use std::path::{Path, PathBuf};

use chrono::NaiveDate;
use recurconnect::analysis::{
    BinThresholds, TestConfig, WindowSpec, DEFAULT_MODERATE, DEFAULT_STEP, DEFAULT_STRONG, DEFAULT_WINDOW,
};
use recurconnect::recurrence::{Norm, RecurrenceConfig, DEFAULT_EPSILON};
use recurconnect::surrogate::{DEFAULT_ALPHA, DEFAULT_SURROGATES};
use serde::Deserialize;

use crate::args::CommonArgs;
use crate::error::CliError;

pub const DEFAULT_OUT: &str = "recurconnect_out";

/// Keys accepted in the config file.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub inputs: Option<Vec<PathBuf>>,
    pub window: Option<usize>,
    pub step: Option<usize>,
    pub epsilon: Option<f64>,
    pub surrogates: Option<usize>,
    pub alpha: Option<f64>,
    pub strong: Option<f64>,
    pub moderate: Option<f64>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub workers: Option<usize>,
    pub tau_max_fraction: Option<f64>,
    pub symmetric: Option<bool>,
    pub search_from: Option<String>,
    pub search_to: Option<String>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        let mut cfg: FileConfig =
            toml::from_str(&text).map_err(|e| CliError::Usage(format!("bad config {}: {e}", path.display())))?;
        // Relative paths in the file are relative to the file.
        let base = path.parent().unwrap_or(Path::new(""));
        if let Some(inputs) = cfg.inputs.as_mut() {
            for p in inputs.iter_mut() {
                if p.is_relative() {
                    *p = base.join(&*p);
                }
            }
        }
        if let Some(out) = cfg.out.as_mut() {
            if out.is_relative() {
                *out = base.join(&*out);
            }
        }
        Ok(cfg)
    }
}

/// Fully resolved parameters of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub inputs: Vec<PathBuf>,
    pub window: WindowSpec,
    pub test: TestConfig,
    pub thresholds: BinThresholds,
    pub seed: u64,
    pub out: PathBuf,
    pub workers: Option<usize>,
    pub search: (NaiveDate, NaiveDate),
}

pub fn default_search() -> (NaiveDate, NaiveDate) {
    (
        NaiveDate::from_ymd_opt(1999, 1, 1).unwrap(),
        NaiveDate::from_ymd_opt(2001, 12, 31).unwrap(),
    )
}

fn usage<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Usage(e.to_string())
}

fn parse_date(key: &str, s: &str) -> Result<NaiveDate, CliError> {
    NaiveDate::parse_from_str(s, "%Y-%m-%d").map_err(|e| CliError::Usage(format!("{key}: {e}")))
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            inputs: Vec::new(),
            window: WindowSpec::new(DEFAULT_WINDOW, DEFAULT_STEP).unwrap(),
            test: TestConfig::default(),
            thresholds: BinThresholds::default(),
            seed: 0,
            out: PathBuf::from(DEFAULT_OUT),
            workers: None,
            search: default_search(),
        }
    }
}

impl RunConfig {
    /// Merges command-line values (flags or environment) over the config
    /// file named by `args.config`, over defaults. Invalid values are usage
    /// errors.
    pub fn resolve(
        args: &CommonArgs,
        inputs: &[PathBuf],
        search: (Option<NaiveDate>, Option<NaiveDate>),
    ) -> Result<Self, CliError> {
        let file = match &args.config {
            Some(p) => FileConfig::load(p)?,
            None => FileConfig::default(),
        };
        let inputs = if inputs.is_empty() {
            file.inputs.clone().unwrap_or_default()
        } else {
            inputs.to_vec()
        };
        let window = args.window.or(file.window).unwrap_or(DEFAULT_WINDOW);
        let step = args.step.or(file.step).unwrap_or(DEFAULT_STEP);
        let epsilon = args.epsilon.or(file.epsilon).unwrap_or(DEFAULT_EPSILON);
        let test = TestConfig {
            recurrence: RecurrenceConfig::new(epsilon, Norm::Absolute).map_err(usage)?,
            n_surrogates: args.surrogates.or(file.surrogates).unwrap_or(DEFAULT_SURROGATES),
            alpha: args.alpha.or(file.alpha).unwrap_or(DEFAULT_ALPHA),
            tau_max_fraction: args.tau_max_fraction.or(file.tau_max_fraction).unwrap_or(1.0),
            symmetric: args.symmetric.or(file.symmetric).unwrap_or(false),
        };
        test.validate().map_err(usage)?;
        let thresholds = BinThresholds::new(
            args.strong.or(file.strong).unwrap_or(DEFAULT_STRONG),
            args.moderate.or(file.moderate).unwrap_or(DEFAULT_MODERATE),
        )
        .map_err(usage)?;
        let workers = args.workers.or(file.workers);
        if workers == Some(0) {
            return Err(CliError::Usage("workers must be >= 1".into()));
        }
        let (default_from, default_to) = default_search();
        let from = match (search.0, &file.search_from) {
            (Some(d), _) => d,
            (None, Some(s)) => parse_date("search_from", s)?,
            (None, None) => default_from,
        };
        let to = match (search.1, &file.search_to) {
            (Some(d), _) => d,
            (None, Some(s)) => parse_date("search_to", s)?,
            (None, None) => default_to,
        };
        if from > to {
            return Err(CliError::Usage(format!("search interval {from}..{to} is empty")));
        }
        Ok(Self {
            inputs,
            window: WindowSpec::new(window, step).map_err(usage)?,
            test,
            thresholds,
            seed: args.seed.or(file.seed).unwrap_or(0),
            out: args.out.clone().or(file.out).unwrap_or_else(|| PathBuf::from(DEFAULT_OUT)),
            workers,
            search: (from, to),
        })
    }
}
