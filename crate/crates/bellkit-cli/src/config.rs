//! Flat key=value run configuration.
//!
//! Keys: `theta1, theta2, theta1p, theta2p` (polarizer angles in radians, a
//! `deg` suffix switches a value to degrees), `table` (path to an outcome
//! table, resolved relative to the config file), `pl1, pr1` (setting
//! probabilities, default 0.5), `trials`, `seed` (default 0), `shards`
//! (default 1). Exactly one of the angle quadruple or `table` selects the
//! correlation source. Blank lines and `#` comments are skipped.

use std::collections::HashMap;
use std::path::Path;

use bellkit::chsh::SettingDistribution;
use bellkit::quantum::PolarizationSetting;
use bellkit::sim::CorrelationSource;

use crate::files;
use crate::CliError;

const ANGLE_KEYS: [&str; 4] = ["theta1", "theta2", "theta1p", "theta2p"];
const KNOWN_KEYS: [&str; 10] = [
    "theta1", "theta2", "theta1p", "theta2p", "table", "pl1", "pr1", "trials", "seed", "shards",
];

/// A fully resolved run configuration: any referenced table file is already
/// loaded and all values are validated.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub source: CorrelationSource,
    pub settings: SettingDistribution,
    pub trials: Option<u64>,
    pub seed: u64,
    pub shards: u64,
}

pub fn load(path: &Path) -> Result<RunConfig, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::validation(format!("cannot read config {}: {e}", path.display())))?;
    let base = path.parent().unwrap_or_else(|| Path::new("."));
    parse(&text, base)
}

fn parse(text: &str, base: &Path) -> Result<RunConfig, CliError> {
    let mut entries: HashMap<&str, &str> = HashMap::new();
    for (number, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(CliError::validation(format!(
                "config line {}: expected key=value, got {line:?}",
                number + 1
            )));
        };
        let key = key.trim();
        let value = value.trim();
        if !KNOWN_KEYS.contains(&key) {
            return Err(CliError::validation(format!(
                "config line {}: unknown key {key:?}",
                number + 1
            )));
        }
        if entries.insert(key, value).is_some() {
            return Err(CliError::validation(format!(
                "config line {}: duplicate key {key:?}",
                number + 1
            )));
        }
    }

    let angle_count = ANGLE_KEYS.iter().filter(|k| entries.contains_key(*k)).count();
    let source = match (angle_count, entries.get("table")) {
        (4, None) => {
            let mut angles = [PolarizationSetting::from_radians(0.0).unwrap(); 4];
            for (slot, key) in angles.iter_mut().zip(ANGLE_KEYS) {
                *slot = parse_angle(key, entries[key])?;
            }
            CorrelationSource::Angles {
                theta1: angles[0],
                theta2: angles[1],
                theta1p: angles[2],
                theta2p: angles[3],
            }
        }
        (0, Some(value)) => {
            let path = base.join(value);
            let text = std::fs::read_to_string(&path).map_err(|e| {
                CliError::validation(format!("cannot read table {}: {e}", path.display()))
            })?;
            CorrelationSource::Table(files::parse_table(&text)?)
        }
        (0, None) => {
            return Err(CliError::validation(
                "config needs either the four angle keys or a table path".into(),
            ))
        }
        (_, Some(_)) => {
            return Err(CliError::validation(
                "config must not mix angle keys with a table path".into(),
            ))
        }
        (n, None) => {
            return Err(CliError::validation(format!(
                "config has {n} of the four angle keys; all of theta1, theta2, theta1p, theta2p are required",
            )))
        }
    };

    let pl1 = parse_probability("pl1", entries.get("pl1").copied())?;
    let pr1 = parse_probability("pr1", entries.get("pr1").copied())?;
    let settings = SettingDistribution::new(pl1, pr1)
        .map_err(|e| CliError::validation(e.to_string()))?;

    Ok(RunConfig {
        source,
        settings,
        trials: parse_count("trials", entries.get("trials").copied())?,
        seed: parse_count("seed", entries.get("seed").copied())?.unwrap_or(0),
        shards: parse_count("shards", entries.get("shards").copied())?.unwrap_or(1),
    })
}

fn parse_angle(key: &str, value: &str) -> Result<PolarizationSetting, CliError> {
    let (number, degrees) = match value.strip_suffix("deg") {
        Some(rest) => (rest.trim_end(), true),
        None => (value, false),
    };
    let raw: f64 = number.parse().map_err(|_| {
        CliError::validation(format!("config key {key}: {value:?} is not an angle"))
    })?;
    let radians = if degrees { raw.to_radians() } else { raw };
    PolarizationSetting::from_radians(radians)
        .map_err(|e| CliError::validation(format!("config key {key}: {e}")))
}

fn parse_probability(key: &str, value: Option<&str>) -> Result<f64, CliError> {
    match value {
        None => Ok(0.5),
        Some(text) => text.parse().map_err(|_| {
            CliError::validation(format!("config key {key}: {text:?} is not a probability"))
        }),
    }
}

fn parse_count(key: &str, value: Option<&str>) -> Result<Option<u64>, CliError> {
    match value {
        None => Ok(None),
        Some(text) => text.parse().map(Some).map_err(|_| {
            CliError::validation(format!("config key {key}: {text:?} is not a count"))
        }),
    }
}
