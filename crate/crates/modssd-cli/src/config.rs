//! `key=value` config file named by `MODSSD_CONFIG`, and the merged settings.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::path::PathBuf;

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl std::str::FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            _ => Err(format!("unknown format {s:?} (expected csv or json)")),
        }
    }
}

/// Accepts `sqrt-pi` as well as plain numbers.
pub fn parse_alpha(s: &str) -> Result<f64, String> {
    let v = match s.trim() {
        "sqrt-pi" => PI.sqrt(),
        other => other.parse::<f64>().map_err(|e| format!("alpha {other:?}: {e}"))?,
    };
    if !(v > 0.0 && v.is_finite()) {
        return Err(format!("alpha must be positive, got {s}"));
    }
    Ok(v)
}

/// Values that may come from flags, the config file or defaults.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub alpha: Option<f64>,
    pub d: Option<i64>,
    pub format: Option<Format>,
    pub output: Option<PathBuf>,
    pub jobs: Option<usize>,
    pub tolerance: Option<f64>,
    pub m_max: Option<i64>,
    pub points_per_bin: Option<usize>,
    pub oracle_tolerance: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct Settings {
    pub alpha: f64,
    pub d: i64,
    pub format: Format,
    pub output: Option<PathBuf>,
    pub jobs: usize,
    /// Rows with a larger quadrature residual get a non-ok status.
    pub tolerance: f64,
    pub m_max: i64,
    pub points_per_bin: usize,
    pub oracle_tolerance: f64,
}

fn parse_value<T: std::str::FromStr>(key: &str, v: &str) -> Result<T, CliError>
where
    T::Err: std::fmt::Display,
{
    v.parse::<T>().map_err(|e| CliError::Args(format!("config key {key}: {e}")))
}

pub fn read_config(text: &str) -> Result<Overrides, CliError> {
    let mut map = BTreeMap::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| CliError::Args(format!("config line {}: expected key=value", n + 1)))?;
        map.insert(k.trim().to_string(), v.trim().to_string());
    }
    let mut o = Overrides::default();
    for (k, v) in &map {
        match k.as_str() {
            "alpha" => o.alpha = Some(parse_alpha(v).map_err(CliError::Args)?),
            "d" => o.d = Some(parse_value(k, v)?),
            "format" => o.format = Some(v.parse().map_err(CliError::Args)?),
            "output" => o.output = Some(PathBuf::from(v)),
            "jobs" => o.jobs = Some(parse_value(k, v)?),
            "tolerance" => o.tolerance = Some(parse_value(k, v)?),
            "m_max" => o.m_max = Some(parse_value(k, v)?),
            "points_per_bin" => o.points_per_bin = Some(parse_value(k, v)?),
            "oracle_tolerance" => o.oracle_tolerance = Some(parse_value(k, v)?),
            _ => return Err(CliError::Args(format!("unknown config key {k:?}"))),
        }
    }
    Ok(o)
}

pub fn load_env_config() -> Result<Overrides, CliError> {
    match std::env::var_os("MODSSD_CONFIG") {
        None => Ok(Overrides::default()),
        Some(path) => {
            let text = std::fs::read_to_string(&path)
                .map_err(|e| CliError::Io(format!("config {}: {e}", PathBuf::from(&path).display())))?;
            read_config(&text)
        }
    }
}

impl Settings {
    /// Flags win over the config file, which wins over defaults.
    pub fn merge(flags: &Overrides, file: &Overrides, default_format: Format) -> Result<Settings, CliError> {
        let jobs = flags
            .jobs
            .or(file.jobs)
            .unwrap_or_else(|| std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1));
        let s = Settings {
            alpha: flags.alpha.or(file.alpha).unwrap_or(PI.sqrt()),
            d: flags.d.or(file.d).unwrap_or(2),
            format: flags.format.or(file.format).unwrap_or(default_format),
            output: flags.output.clone().or(file.output.clone()),
            jobs,
            tolerance: flags.tolerance.or(file.tolerance).unwrap_or(1e-8),
            m_max: flags.m_max.or(file.m_max).unwrap_or(32),
            points_per_bin: flags.points_per_bin.or(file.points_per_bin).unwrap_or(257),
            oracle_tolerance: flags.oracle_tolerance.or(file.oracle_tolerance).unwrap_or(1e-4),
        };
        if s.jobs == 0 {
            return Err(CliError::Args("jobs must be at least 1".into()));
        }
        if s.d < 2 {
            return Err(CliError::Args(format!("d must be at least 2, got {}", s.d)));
        }
        if !(s.tolerance > 0.0 && s.oracle_tolerance > 0.0) {
            return Err(CliError::Args("tolerances must be positive".into()));
        }
        Ok(s)
    }
}
