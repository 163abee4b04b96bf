//! Experiment configuration and the flat `key = value` file format.
//!
//! Precedence: command-line flag, then file value, then built-in default.

use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};

/// Keys accepted in configuration files.
pub const KNOWN_KEYS: &[&str] = &[
    "q", "c", "kappa", "n", "replicas", "seed", "times", "depth", "format", "output", "tol_var", "tol_ks",
    "tol_se", "tol_profile", "tol_sep", "tol_kernel", "window", "k_top", "samples",
    "theta", "r", "grid", "thresholds", "probe",
];

/// Pass/fail thresholds of the experiments.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Tolerances {
    /// Relative tolerance on variances.
    pub var_rel: f64,
    /// Kolmogorov–Smirnov distance.
    pub ks: f64,
    /// Multiple of the standard error for mean-type statistics.
    pub n_se: f64,
    /// Absolute tolerance on the concentration profile.
    pub profile: f64,
    /// Fraction of paired replicas in which the separation must grow.
    pub separation: f64,
    /// Final kernel error in convergence studies.
    pub kernel: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { var_rel: 0.15, ks: 0.08, n_se: 3.0, profile: 0.02, separation: 0.95, kernel: 0.05 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub q: f64,
    pub c: f64,
    pub kappa: Option<f64>,
    pub n: Vec<usize>,
    pub replicas: usize,
    pub seed: u64,
    pub times: Vec<f64>,
    pub tol: Tolerances,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            q: 0.5,
            c: 1.4,
            kappa: None,
            n: vec![500],
            replicas: 2000,
            seed: 7,
            times: vec![0.2, 0.4, 0.6, 0.8],
            tol: Tolerances::default(),
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.q > 0.0 && self.q < 1.0) {
            return Err(Error::invalid("q", format!("{} is outside (0, 1)", self.q)));
        }
        if !(self.c >= 0.0 && self.c < 1.0 / self.q) {
            return Err(Error::invalid("c", format!("{} is outside [0, 1/q)", self.c)));
        }
        if let Some(k) = self.kappa {
            if !(k > 0.0 && k < 1.0) {
                return Err(Error::invalid("kappa", format!("{k} is outside (0, 1)")));
            }
        }
        if self.n.is_empty() || self.n.contains(&0) {
            return Err(Error::invalid("n", "need a nonempty list of positive sizes"));
        }
        if self.replicas == 0 {
            return Err(Error::invalid("replicas", "must be positive"));
        }
        Ok(())
    }
}

/// Parsed configuration file: key, value and source line.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct FileConfig {
    path: String,
    values: BTreeMap<String, (usize, String)>,
}

pub fn load_config(path: &Path) -> Result<FileConfig> {
    let text = std::fs::read_to_string(path)?;
    parse_config(&text, &path.display().to_string())
}

/// Parses `key = value` lines; `#` starts a comment, blank lines are skipped.
pub fn parse_config(text: &str, label: &str) -> Result<FileConfig> {
    let mut values = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let err = |msg: String| Error::Config { path: label.into(), line, msg };
        let (k, v) = body.split_once('=').ok_or_else(|| err(format!("expected `key = value`, got `{body}`")))?;
        let (k, v) = (k.trim().to_ascii_lowercase(), v.trim().to_string());
        if !KNOWN_KEYS.contains(&k.as_str()) {
            return Err(err(format!("unknown key `{k}`")));
        }
        if v.is_empty() {
            return Err(err(format!("empty value for `{k}`")));
        }
        if values.insert(k.clone(), (line, v)).is_some() {
            return Err(err(format!("duplicate key `{k}`")));
        }
    }
    Ok(FileConfig { path: label.into(), values })
}

impl FileConfig {
    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(|(_, v)| v.as_str())
    }

    fn bad(&self, key: &str, msg: String) -> Error {
        let line = self.values.get(key).map(|(l, _)| *l).unwrap_or(0);
        Error::Config { path: self.path.clone(), line, msg: format!("`{key}`: {msg}") }
    }

    pub fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>> {
        match self.raw(key) {
            None => Ok(None),
            Some(v) => v.parse().map(Some).map_err(|_| self.bad(key, format!("cannot parse `{v}`"))),
        }
    }

    /// Comma-separated list.
    pub fn list<T: FromStr>(&self, key: &str) -> Result<Option<Vec<T>>> {
        match self.raw(key) {
            None => Ok(None),
            Some(v) => v
                .split(',')
                .map(|p| p.trim().parse().map_err(|_| self.bad(key, format!("cannot parse `{}`", p.trim()))))
                .collect::<Result<Vec<T>>>()
                .map(Some),
        }
    }
}

/// Flag, then file, then default.
pub fn layered<T: FromStr>(flag: Option<T>, file: &FileConfig, key: &str, default: T) -> Result<T> {
    Ok(match flag {
        Some(v) => v,
        None => file.get(key)?.unwrap_or(default),
    })
}

pub fn layered_opt<T: FromStr>(flag: Option<T>, file: &FileConfig, key: &str) -> Result<Option<T>> {
    Ok(match flag {
        Some(v) => Some(v),
        None => file.get(key)?,
    })
}

pub fn layered_list<T: FromStr>(flag: Option<Vec<T>>, file: &FileConfig, key: &str, default: Vec<T>) -> Result<Vec<T>> {
    Ok(match flag {
        Some(v) => v,
        None => file.list(key)?.unwrap_or(default),
    })
}

/// Worker count: `--threads`, then `HSLPP_THREADS`, else the rayon default.
pub fn thread_count(flag: Option<usize>) -> Result<Option<usize>> {
    if flag.is_some() {
        return Ok(flag);
    }
    match std::env::var("HSLPP_THREADS") {
        Ok(v) => v.trim().parse().map(Some).map_err(|_| Error::invalid("HSLPP_THREADS", format!("cannot parse `{v}`"))),
        Err(_) => Ok(None),
    }
}
