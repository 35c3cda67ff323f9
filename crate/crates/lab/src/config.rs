//! Experiment configuration: CLI flags layered over an optional flat
//! `key=value` file.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("exactly one of k or c must be set")]
    KOrC,
    #[error("trials must be at least 1")]
    NoTrials,
    #[error("area n must be positive and finite, got {0}")]
    BadArea(f64),
    #[error("k must be at least 1")]
    ZeroK,
    #[error("c must be positive, got {0}")]
    BadC(f64),
    #[error("threads must be at least 1")]
    NoThreads,
    #[error("invalid c grid `{0}`: expected a:b:step with step > 0 and a <= b")]
    BadGrid(String),
    #[error("config file line {line}: {msg}")]
    File { line: usize, msg: String },
    #[error("unknown config key `{0}`")]
    UnknownKey(String),
    #[error("invalid value `{value}` for `{key}`")]
    BadValue { key: String, value: String },
    #[error("unknown format `{0}` (expected csv or json)")]
    BadFormat(String),
    #[error("reading config file: {0}")]
    Io(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = ConfigError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(ConfigError::BadFormat(other.to_string())),
        }
    }
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Format::Csv => "csv",
            Format::Json => "json",
        })
    }
}

/// Neighbour count given directly or as `k = ceil(c ln n)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum KSpec {
    K(usize),
    C(f64),
}

/// `ceil(c ln n)`, at least 1.
pub fn k_from_c(c: f64, area_n: f64) -> usize {
    ((c * area_n.ln()).ceil() as usize).max(1)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub area_n: f64,
    pub k: KSpec,
    pub trials: u64,
    pub master_seed: u64,
    /// Strip width near the boundary; `ln n` when unset.
    pub boundary_strip: Option<f64>,
    pub small_coeff: f64,
    /// Multiplier on the `2 small_coeff sqrt(ln n)` side margin used to pick
    /// the audit mode.
    pub side_multiple: f64,
    pub threads: usize,
    pub out: Option<PathBuf>,
    pub format: Format,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            area_n: 1e4,
            k: KSpec::C(0.5),
            trials: 100,
            master_seed: 1,
            boundary_strip: None,
            small_coeff: 1.0,
            side_multiple: 1.0,
            threads: default_threads(),
            out: None,
            format: Format::Csv,
        }
    }
}

fn default_threads() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if !(self.area_n.is_finite() && self.area_n > 1.0) {
            return Err(ConfigError::BadArea(self.area_n));
        }
        match self.k {
            KSpec::K(0) => return Err(ConfigError::ZeroK),
            KSpec::C(c) if !(c > 0.0 && c.is_finite()) => return Err(ConfigError::BadC(c)),
            _ => {}
        }
        if self.trials == 0 {
            return Err(ConfigError::NoTrials);
        }
        if self.threads == 0 {
            return Err(ConfigError::NoThreads);
        }
        Ok(())
    }

    pub fn k(&self) -> usize {
        match self.k {
            KSpec::K(k) => k,
            KSpec::C(c) => k_from_c(c, self.area_n),
        }
    }

    /// `c` as configured, or `k / ln n` when `k` was set directly.
    pub fn c(&self) -> f64 {
        match self.k {
            KSpec::K(k) => k as f64 / self.area_n.ln(),
            KSpec::C(c) => c,
        }
    }

    pub fn strip(&self) -> f64 {
        self.boundary_strip.unwrap_or_else(|| self.area_n.ln())
    }

    /// Settings that determine the output, for the reproducibility header.
    /// Thread count is left out: it never changes a result.
    pub fn describe(&self) -> String {
        let k = match self.k {
            KSpec::K(k) => format!("k={k}"),
            KSpec::C(c) => format!("c={c}"),
        };
        format!("{k} {}", self.describe_without_k())
    }

    /// [`describe`](Self::describe) minus the `k`/`c` setting, for runs over
    /// a `c` grid.
    pub fn describe_without_k(&self) -> String {
        format!(
            "n={} trials={} strip={} small_coeff={} side_multiple={}",
            self.area_n,
            self.trials,
            self.strip(),
            self.small_coeff,
            self.side_multiple
        )
    }
}

/// Parses `a:b:step` into `a, a + step, ..., <= b` (endpoint included up to
/// rounding). Values are rounded to 12 decimals so `0.1:0.9:0.1` prints
/// cleanly.
pub fn parse_c_grid(s: &str) -> Result<Vec<f64>, ConfigError> {
    let bad = || ConfigError::BadGrid(s.to_string());
    let parts: Vec<&str> = s.split(':').collect();
    let nums: Vec<f64> = parts
        .iter()
        .map(|p| p.trim().parse::<f64>().map_err(|_| bad()))
        .collect::<Result<_, _>>()?;
    let (a, b, step) = match nums.as_slice() {
        [a] => (*a, *a, 1.0),
        [a, b, step] => (*a, *b, *step),
        _ => return Err(bad()),
    };
    if !(a.is_finite() && b.is_finite() && step > 0.0 && a <= b && a > 0.0) {
        return Err(bad());
    }
    let count = ((b - a) / step + 1e-9).floor() as usize + 1;
    Ok((0..count)
        .map(|i| ((a + i as f64 * step) * 1e12).round() / 1e12)
        .collect())
}

/// Flat `key=value` file; blank lines and `#` comments are skipped. Keys are
/// the long flag names without dashes prefix (`n`, `k`, `c`, `c-grid`,
/// `trials`, `seed`, `threads`, `strip`, `small-coeff`, `side-multiple`,
/// `out`, `format`, `configs`).
pub fn parse_config_text(text: &str) -> Result<BTreeMap<String, String>, ConfigError> {
    let mut map = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| ConfigError::File {
            line: i + 1,
            msg: "expected key=value".into(),
        })?;
        let key = key.trim().trim_start_matches("--").replace('_', "-");
        if !KNOWN_KEYS.contains(&key.as_str()) {
            return Err(ConfigError::UnknownKey(key));
        }
        map.insert(key, value.trim().to_string());
    }
    Ok(map)
}

pub const KNOWN_KEYS: &[&str] = &[
    "n",
    "k",
    "c",
    "c-grid",
    "trials",
    "seed",
    "threads",
    "strip",
    "small-coeff",
    "side-multiple",
    "out",
    "format",
    "configs",
];

pub fn read_config_file(path: &Path) -> Result<BTreeMap<String, String>, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Io(e.to_string()))?;
    parse_config_text(&text)
}

/// Typed lookup in a parsed config file.
pub fn file_value<T: FromStr>(
    map: &BTreeMap<String, String>,
    key: &str,
) -> Result<Option<T>, ConfigError> {
    match map.get(key) {
        None => Ok(None),
        Some(v) => v.parse::<T>().map(Some).map_err(|_| ConfigError::BadValue {
            key: key.to_string(),
            value: v.clone(),
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_parsing() {
        let g = parse_c_grid("0.1:0.9:0.1").unwrap();
        assert_eq!(g.len(), 9);
        assert_eq!(g[2], 0.3);
        assert_eq!(g[8], 0.9);
        assert_eq!(parse_c_grid("0.5").unwrap(), vec![0.5]);
        assert!(parse_c_grid("0.9:0.1:0.1").is_err());
        assert!(parse_c_grid("0.1:0.9:0").is_err());
        assert!(parse_c_grid("a:b").is_err());
    }

    #[test]
    fn k_rounds_up() {
        assert_eq!(k_from_c(0.3, 1e5), 4);
        assert_eq!(k_from_c(0.9, 1e4), 9);
        let cfg = ExperimentConfig { k: KSpec::C(0.3), area_n: 1e5, ..Default::default() };
        assert_eq!(cfg.k(), 4);
    }

    #[test]
    fn validation() {
        let ok = ExperimentConfig::default();
        assert!(ok.validate().is_ok());
        let zero = ExperimentConfig { trials: 0, ..Default::default() };
        assert_eq!(zero.validate(), Err(ConfigError::NoTrials));
        let k0 = ExperimentConfig { k: KSpec::K(0), ..Default::default() };
        assert_eq!(k0.validate(), Err(ConfigError::ZeroK));
    }

    #[test]
    fn config_text() {
        let m = parse_config_text("# comment\nn = 1000\nsmall_coeff=2\n\nc-grid=0.1:0.2:0.1\n").unwrap();
        assert_eq!(m["n"], "1000");
        assert_eq!(m["small-coeff"], "2");
        assert_eq!(file_value::<f64>(&m, "n").unwrap(), Some(1000.0));
        assert!(matches!(parse_config_text("bogus=1"), Err(ConfigError::UnknownKey(_))));
        assert!(matches!(parse_config_text("n"), Err(ConfigError::File { line: 1, .. })));
    }
}
