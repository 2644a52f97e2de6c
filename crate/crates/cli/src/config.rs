//! Optional JSON config. Keys mirror the long flags (`max_input` or
//! `max-input`); a flag given on the command line always wins.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::Deserialize;

pub const ENDPOINT_ENV: &str = "CEMAINT_ENDPOINT";
pub const DEFAULT_OUT: &str = "cemaint-out";

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub corpus: Option<PathBuf>,
    pub ratings: Option<PathBuf>,
    pub scores: Option<Vec<PathBuf>>,
    pub endpoint: Option<String>,
    pub builtin: Option<String>,
    #[serde(alias = "max-input")]
    pub max_input: Option<usize>,
    #[serde(alias = "prepend-bos")]
    pub prepend_bos: Option<bool>,
    pub concurrency: Option<usize>,
    #[serde(alias = "ext")]
    pub extensions: Option<Vec<String>>,
    pub model: Option<String>,
    pub dimension: Option<String>,
    pub features: Option<String>,
    pub classifier: Option<String>,
    pub folds: Option<usize>,
    pub seed: Option<u64>,
    pub shuffle: Option<bool>,
    pub scaling: Option<String>,
    pub trees: Option<usize>,
    pub out: Option<PathBuf>,
}

impl FileConfig {
    pub fn load(path: Option<&Path>) -> Result<FileConfig> {
        let Some(path) = path else {
            return Ok(FileConfig::default());
        };
        let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("parsing config {}", path.display()))
    }

    pub fn out(&self, flag: Option<PathBuf>) -> PathBuf {
        flag.or_else(|| self.out.clone()).unwrap_or_else(|| PathBuf::from(DEFAULT_OUT))
    }
}

pub fn required<T>(flag: Option<T>, config: Option<T>, name: &str) -> Result<T> {
    match flag.or(config) {
        Some(v) => Ok(v),
        None => bail!("missing --{name} (flag or config key)"),
    }
}

pub fn parse_or<T: std::str::FromStr<Err = String>>(flag: Option<String>, config: Option<String>, default: T) -> Result<T> {
    match flag.or(config) {
        Some(s) => s.parse().map_err(anyhow::Error::msg),
        None => Ok(default),
    }
}
