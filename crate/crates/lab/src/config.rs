//! `key=value` experiment configuration.

use std::collections::BTreeMap;
use std::str::FromStr;

use unsieved_core::Budget;

use crate::error::{config_err, LabResult};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Json,
    Csv,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Json => "json",
            Format::Csv => "csv",
        }
    }
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            _ => Err(format!("unknown format {s:?}, expected json or csv")),
        }
    }
}

impl std::fmt::Display for Format {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.extension())
    }
}

/// Everything that determines a report. `jobs` only changes scheduling and
/// is not echoed.
#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub experiment: String,
    pub params: BTreeMap<String, String>,
    pub format: Format,
    pub seed: u64,
    pub budget: Budget,
    pub jobs: usize,
}

impl ExperimentConfig {
    pub fn new(experiment: &str) -> Self {
        ExperimentConfig {
            experiment: experiment.to_string(),
            params: BTreeMap::new(),
            format: Format::Json,
            seed: 0,
            budget: Budget::default(),
            jobs: 1,
        }
    }

    /// Builder-style parameter setter.
    pub fn with(mut self, key: &str, value: impl ToString) -> Self {
        self.params.insert(key.to_string(), value.to_string());
        self
    }

    /// Applies one `key=value` pair, routing the reserved keys.
    pub fn set(&mut self, key: &str, value: &str) -> LabResult<()> {
        let key = key.trim();
        let value = value.trim();
        match key {
            "experiment" => self.experiment = value.to_string(),
            "format" => self.format = value.parse().map_err(config_err)?,
            "seed" => self.seed = parse_u64(key, value)?,
            "budget.prime_ceiling" => self.budget.prime_ceiling = parse_u64(key, value)?,
            "budget.sieve_ceiling" => self.budget.sieve_ceiling = parse_u64(key, value)?,
            "budget.dfs_nodes" => self.budget.dfs_nodes = parse_u64(key, value)?,
            "budget.segment_len" => self.budget.segment_len = parse_u64(key, value)? as usize,
            "" => return Err(config_err("empty key")),
            _ => {
                self.params.insert(key.to_string(), value.to_string());
            }
        }
        Ok(())
    }

    /// Applies `key=value`.
    pub fn set_pair(&mut self, pair: &str) -> LabResult<()> {
        let (k, v) = pair
            .split_once('=')
            .ok_or_else(|| config_err(format!("expected key=value, got {pair:?}")))?;
        self.set(k, v)
    }

    /// `--budget` shorthand: comma-separated `prime=..,sieve=..,dfs=..,segment=..`.
    pub fn set_budget(&mut self, spec: &str) -> LabResult<()> {
        for part in spec.split(',').filter(|p| !p.trim().is_empty()) {
            let (k, v) = part
                .split_once('=')
                .ok_or_else(|| config_err(format!("budget entry {part:?} is not key=value")))?;
            let key = match k.trim() {
                "prime" => "budget.prime_ceiling",
                "sieve" => "budget.sieve_ceiling",
                "dfs" => "budget.dfs_nodes",
                "segment" => "budget.segment_len",
                other => return Err(config_err(format!("unknown budget entry {other:?}"))),
            };
            self.set(key, v)?;
        }
        Ok(())
    }

    /// Reads a config file: one `key=value` per line, `#` comments.
    pub fn parse(text: &str) -> LabResult<Self> {
        let mut cfg = ExperimentConfig::new("");
        cfg.merge_text(text)?;
        Ok(cfg)
    }

    pub fn merge_text(&mut self, text: &str) -> LabResult<()> {
        for line in text.lines() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            self.set_pair(line)?;
        }
        Ok(())
    }

    /// The echoed form: every key that affects the report, sorted.
    pub fn echo(&self) -> BTreeMap<String, String> {
        let mut m = self.params.clone();
        m.insert("experiment".into(), self.experiment.clone());
        m.insert("format".into(), self.format.to_string());
        m.insert("seed".into(), self.seed.to_string());
        m.insert(
            "budget.prime_ceiling".into(),
            self.budget.prime_ceiling.to_string(),
        );
        m.insert(
            "budget.sieve_ceiling".into(),
            self.budget.sieve_ceiling.to_string(),
        );
        m.insert("budget.dfs_nodes".into(), self.budget.dfs_nodes.to_string());
        m.insert(
            "budget.segment_len".into(),
            self.budget.segment_len.to_string(),
        );
        m
    }

    pub fn to_text(&self) -> String {
        self.echo()
            .iter()
            .map(|(k, v)| format!("{k}={v}\n"))
            .collect()
    }

    /// Rebuilds a config from an echoed map.
    pub fn from_echo(map: &BTreeMap<String, String>) -> LabResult<Self> {
        let mut cfg = ExperimentConfig::new("");
        for (k, v) in map {
            cfg.set(k, v)?;
        }
        Ok(cfg)
    }

    /// Fills defaults and rejects keys the experiment does not know.
    pub fn resolve(&mut self, keys: &[(&str, &str)]) -> LabResult<()> {
        for k in self.params.keys() {
            if !keys.iter().any(|(name, _)| name == k) {
                let known: Vec<&str> = keys.iter().map(|(n, _)| *n).collect();
                return Err(config_err(format!(
                    "unknown parameter {k:?} for {}; known: {}",
                    self.experiment,
                    known.join(", ")
                )));
            }
        }
        for (name, default) in keys {
            self.params
                .entry(name.to_string())
                .or_insert_with(|| default.to_string());
        }
        Ok(())
    }

    pub fn str(&self, key: &str) -> LabResult<&str> {
        self.params
            .get(key)
            .map(String::as_str)
            .ok_or_else(|| config_err(format!("missing parameter {key:?}")))
    }

    pub fn u64(&self, key: &str) -> LabResult<u64> {
        parse_u64(key, self.str(key)?)
    }

    pub fn f64(&self, key: &str) -> LabResult<f64> {
        let s = self.str(key)?;
        s.parse::<f64>()
            .ok()
            .filter(|v| v.is_finite())
            .ok_or_else(|| config_err(format!("{key}={s:?} is not a finite number")))
    }

    pub fn bool(&self, key: &str) -> LabResult<bool> {
        match self.str(key)? {
            "true" | "1" | "yes" => Ok(true),
            "false" | "0" | "no" => Ok(false),
            s => Err(config_err(format!("{key}={s:?} is not a boolean"))),
        }
    }

    /// Comma-separated integers.
    pub fn u64_list(&self, key: &str) -> LabResult<Vec<u64>> {
        self.str(key)?
            .split(',')
            .filter(|p| !p.trim().is_empty())
            .map(|p| parse_u64(key, p.trim()))
            .collect()
    }
}

/// Integers, also in `1e8` or `2.5e6` notation when the value is integral.
pub fn parse_u64(key: &str, s: &str) -> LabResult<u64> {
    let s = s.trim().replace('_', "");
    if let Ok(v) = s.parse::<u64>() {
        return Ok(v);
    }
    match s.parse::<f64>() {
        Ok(f) if f >= 0.0 && f.fract() == 0.0 && f < 1.8e19 => Ok(f as u64),
        _ => Err(config_err(format!(
            "{key}={s:?} is not a nonnegative integer"
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_through_text() {
        let mut c = ExperimentConfig::new("psi")
            .with("x", "1e6")
            .with("set", "list:2,3");
        c.seed = 9;
        c.set_budget("dfs=1000,sieve=1e7").unwrap();
        let back = ExperimentConfig::parse(&c.to_text()).unwrap();
        assert_eq!(back, c);
        assert_eq!(back.u64("x").unwrap(), 1_000_000);
        assert_eq!(back.budget.dfs_nodes, 1000);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let mut c = ExperimentConfig::new("psi").with("y", "1");
        assert!(c.resolve(&[("x", "10")]).is_err());
        let mut c = ExperimentConfig::new("psi");
        c.resolve(&[("x", "10")]).unwrap();
        assert_eq!(c.u64("x").unwrap(), 10);
    }

    #[test]
    fn comments_and_blank_lines() {
        let c = ExperimentConfig::parse("# hi\n\nexperiment=dickman\nu_max = 5\n").unwrap();
        assert_eq!(c.experiment, "dickman");
        assert_eq!(c.str("u_max").unwrap(), "5");
        assert!(ExperimentConfig::parse("novalue").is_err());
        assert!(parse_u64("x", "1.5").is_err());
    }
}
