//! Versioned JSON and CSV reports.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::config::{ExperimentConfig, Format};
use crate::error::{LabError, LabResult};

pub const SCHEMA: &str = "unsieved-report/1";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Ok,
    /// The hypothesis' antecedent does not hold for this instance.
    PreconditionFail,
    /// A guaranteed property failed: always a bug.
    InvariantViolation,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Ok => crate::error::EXIT_OK,
            Status::PreconditionFail => crate::error::EXIT_PRECONDITION,
            Status::InvariantViolation => crate::error::EXIT_INVARIANT,
        }
    }
}

/// A self-contained experiment result: re-running [`Report::config`]
/// reproduces it byte for byte. Wall-clock time is kept out of it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema: String,
    pub library_version: String,
    pub experiment: String,
    pub config: BTreeMap<String, String>,
    pub status: Status,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Value>>,
    pub derived: BTreeMap<String, Value>,
    /// FNV-1a checksums of the sets involved, as `0x` hex.
    pub checksums: BTreeMap<String, String>,
    pub notes: Vec<String>,
}

impl Report {
    pub fn new(cfg: &ExperimentConfig, columns: &[&str]) -> Self {
        Report {
            schema: SCHEMA.to_string(),
            library_version: env!("CARGO_PKG_VERSION").to_string(),
            experiment: cfg.experiment.clone(),
            config: cfg.echo(),
            status: Status::Ok,
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
            derived: BTreeMap::new(),
            checksums: BTreeMap::new(),
            notes: Vec::new(),
        }
    }

    pub fn push_row(&mut self, row: Vec<Value>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn derive(&mut self, key: &str, value: impl Into<Value>) {
        self.derived.insert(key.to_string(), value.into());
    }

    pub fn checksum(&mut self, key: &str, value: u64) {
        self.checksums
            .insert(key.to_string(), format!("{value:#018x}"));
    }

    pub fn note(&mut self, text: impl Into<String>) {
        self.notes.push(text.into());
    }

    /// Raises the status; an invariant violation is never downgraded.
    pub fn flag(&mut self, status: Status) {
        if self.status != Status::InvariantViolation {
            self.status = status;
        }
    }

    pub fn column(&self, name: &str) -> Option<Vec<&Value>> {
        let i = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| &r[i]).collect())
    }

    pub fn column_f64(&self, name: &str) -> Option<Vec<f64>> {
        self.column(name)
            .map(|c| c.iter().map(|v| v.as_f64().unwrap_or(f64::NAN)).collect())
    }

    pub fn to_json(&self) -> LabResult<String> {
        let mut s =
            serde_json::to_string_pretty(self).map_err(|e| LabError::Format(e.to_string()))?;
        s.push('\n');
        Ok(s)
    }

    pub fn from_json(s: &str) -> LabResult<Self> {
        let r: Report = serde_json::from_str(s).map_err(|e| LabError::Format(e.to_string()))?;
        if r.schema != SCHEMA {
            return Err(LabError::Format(format!(
                "unsupported schema {:?}",
                r.schema
            )));
        }
        Ok(r)
    }

    /// `#`-prefixed metadata lines (config, status, derived values,
    /// checksums, notes), then the rows as CSV.
    pub fn to_csv(&self) -> LabResult<String> {
        let mut out = String::new();
        out.push_str(&format!("# schema={}\n", self.schema));
        out.push_str(&format!("# library_version={}\n", self.library_version));
        for (k, v) in &self.config {
            out.push_str(&format!("# config.{k}={v}\n"));
        }
        out.push_str(&format!(
            "# status={}\n",
            json_scalar(&serde_json::to_value(self.status).expect("enum"))
        ));
        for (k, v) in &self.derived {
            out.push_str(&format!("# derived.{k}={}\n", json_scalar(v)));
        }
        for (k, v) in &self.checksums {
            out.push_str(&format!("# checksum.{k}={v}\n"));
        }
        for n in &self.notes {
            out.push_str(&format!("# note={n}\n"));
        }
        let mut w = csv::Writer::from_writer(Vec::new());
        let fmt = |e: csv::Error| LabError::Format(e.to_string());
        w.write_record(&self.columns).map_err(fmt)?;
        for row in &self.rows {
            w.write_record(row.iter().map(json_scalar)).map_err(fmt)?;
        }
        let bytes = w
            .into_inner()
            .map_err(|e| LabError::Format(e.to_string()))?;
        out.push_str(&String::from_utf8(bytes).map_err(|e| LabError::Format(e.to_string()))?);
        Ok(out)
    }

    /// Echoed config from a CSV report.
    pub fn config_from_csv(s: &str) -> LabResult<BTreeMap<String, String>> {
        let mut m = BTreeMap::new();
        for line in s.lines().take_while(|l| l.starts_with('#')) {
            if let Some(rest) = line.strip_prefix("# config.") {
                let (k, v) = rest
                    .split_once('=')
                    .ok_or_else(|| LabError::Format(format!("bad config line {line:?}")))?;
                m.insert(k.to_string(), v.to_string());
            }
        }
        Ok(m)
    }

    pub fn render(&self, format: Format) -> LabResult<String> {
        match format {
            Format::Json => self.to_json(),
            Format::Csv => self.to_csv(),
        }
    }
}

fn json_scalar(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

/// JSON number for finite values, `null` otherwise.
pub fn num(x: f64) -> Value {
    serde_json::Number::from_f64(x).map_or(Value::Null, Value::Number)
}
