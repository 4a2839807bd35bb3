use std::collections::BTreeMap;
use std::path::Path;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::config::AnalysisConfig;
use crate::error::{Error, Result};

/// Overall status of a command; decides the process exit code.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Success,
    /// a witness contradicts convexity (or a reproduction mismatched)
    Negative,
    Inconclusive,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Success => 0,
            Status::Negative => 1,
            Status::Inconclusive => 3,
        }
    }
}

/// Exit code for a failed command: 2 for bad input, 3 for numerical trouble.
pub fn error_exit_code(e: &Error) -> i32 {
    match e {
        Error::Parse { .. }
        | Error::Io(_)
        | Error::Json(_)
        | Error::Context(_)
        | Error::Shape(_)
        | Error::Hermitian(_)
        | Error::Symmetry(_)
        | Error::Config(_) => 2,
        _ => 3,
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Report {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub config: AnalysisConfig,
    pub status: Status,
    pub results: BTreeMap<String, Value>,
    /// seconds per step; the only nondeterministic field
    pub timings: BTreeMap<String, f64>,
}

impl Report {
    pub fn new(command: &str, config: &AnalysisConfig) -> Self {
        Report {
            tool: "ncconvex".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            command: command.into(),
            config: config.clone(),
            status: Status::Success,
            results: BTreeMap::new(),
            timings: BTreeMap::new(),
        }
    }

    pub fn insert<T: Serialize>(&mut self, key: &str, value: &T) -> Result<()> {
        self.results.insert(key.into(), serde_json::to_value(value)?);
        Ok(())
    }

    /// Runs `f`, records its wall time under `key` and stores the result.
    pub fn timed<T: Serialize>(&mut self, key: &str, f: impl FnOnce() -> Result<T>) -> Result<T> {
        let t0 = Instant::now();
        let v = f()?;
        self.timings.insert(key.into(), t0.elapsed().as_secs_f64());
        self.insert(key, &v)?;
        Ok(v)
    }

    /// Keeps the worst status seen so far.
    pub fn degrade(&mut self, s: Status) {
        let rank = |s: Status| match s {
            Status::Success => 0,
            Status::Inconclusive => 1,
            Status::Negative => 2,
        };
        if rank(s) > rank(self.status) {
            self.status = s;
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// JSON with timings cleared, for determinism checks.
    pub fn to_json_untimed(&self) -> Result<String> {
        let mut r = self.clone();
        r.timings.clear();
        r.to_json()
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()? + "\n")?;
        Ok(())
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn status_ordering() {
        let mut r = Report::new("t", &AnalysisConfig::default());
        r.degrade(Status::Inconclusive);
        r.degrade(Status::Success);
        assert_eq!(r.status, Status::Inconclusive);
        r.degrade(Status::Negative);
        assert_eq!(r.status.exit_code(), 1);
    }

    #[test]
    fn json_round_trip() {
        let mut r = Report::new("t", &AnalysisConfig::default());
        r.timed("x", || Ok(3)).unwrap();
        let back = Report::from_json(&r.to_json().unwrap()).unwrap();
        assert_eq!(back.results["x"], Value::from(3));
        assert!(Report::from_json(&r.to_json_untimed().unwrap()).unwrap().timings.is_empty());
    }
}
