//! Deterministic JSON verdict reports and CSV tables.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::Value;

use crate::error::Result;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub verdict: bool,
    pub values: Value,
}

/// Results of one suite run, with the seed and configuration that produced
/// them.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub schema_version: u32,
    pub suite: String,
    pub seed: u64,
    pub config: Value,
    pub checks: Vec<CheckResult>,
}

impl Report {
    pub fn new(suite: &str, seed: u64, config: Value) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            suite: suite.to_string(),
            seed,
            config,
            checks: Vec::new(),
        }
    }

    pub fn push(
        &mut self,
        name: impl Into<String>,
        verdict: bool,
        values: impl Serialize,
    ) -> Result<()> {
        self.checks.push(CheckResult {
            name: name.into(),
            verdict,
            values: serde_json::to_value(values)?,
        });
        Ok(())
    }

    pub fn extend(&mut self, other: Report) {
        self.checks.extend(other.checks);
    }

    /// Conjunction of all verdicts; true for an empty report.
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.verdict)
    }

    /// Pretty JSON with object keys in sorted order.
    pub fn to_json_string(&self) -> Result<String> {
        // Value maps are ordered by key, so a round trip through Value sorts
        // every nested object.
        let value = serde_json::to_value(self)?;
        let mut s = serde_json::to_string_pretty(&value)?;
        s.push('\n');
        Ok(s)
    }
}

/// Writes `report.json` into `dir`, creating it if needed.
pub fn emit_report(report: &Report, dir: &Path) -> Result<PathBuf> {
    fs::create_dir_all(dir)?;
    let path = dir.join("report.json");
    fs::write(&path, report.to_json_string()?)?;
    Ok(path)
}

/// Writes a CSV table with a header row.
pub fn write_csv<R, I>(path: &Path, header: &[&str], rows: R) -> Result<()>
where
    R: IntoIterator<Item = I>,
    I: IntoIterator<Item = String>,
{
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent)?;
    }
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(header)?;
    for row in rows {
        w.write_record(row)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn empty_report_is_valid() {
        let r = Report::new("measure", 7, json!({}));
        assert!(r.all_pass());
        let v: Value = serde_json::from_str(&r.to_json_string().unwrap()).unwrap();
        assert_eq!(v["checks"], json!([]));
        assert_eq!(v["schema_version"], json!(SCHEMA_VERSION));
    }

    #[test]
    fn keys_are_sorted_and_config_echoed() {
        let mut r = Report::new("flow", 3, json!({"zeta": 1, "alpha": {"y": 2, "b": 3}}));
        r.push("tau", true, json!({"value": 0.5, "expected": 0.5}))
            .unwrap();
        let s = r.to_json_string().unwrap();
        assert!(s.find("\"alpha\"").unwrap() < s.find("\"zeta\"").unwrap());
        assert!(s.find("\"b\"").unwrap() < s.find("\"y\"").unwrap());
        assert!(s.find("\"expected\"").unwrap() < s.find("\"value\"").unwrap());
        assert_eq!(s, r.clone().to_json_string().unwrap());
    }

    #[test]
    fn verdict_conjunction() {
        let mut r = Report::new("x", 0, Value::Null);
        r.push("a", true, 1.0).unwrap();
        assert!(r.all_pass());
        r.push("b", false, 2.0).unwrap();
        assert!(!r.all_pass());
    }

    #[test]
    fn files_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let mut r = Report::new("x", 1, Value::Null);
        r.push("a", true, json!({"v": 1.5})).unwrap();
        let path = emit_report(&r, dir.path()).unwrap();
        let v: Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
        assert_eq!(v["checks"][0]["values"]["v"], json!(1.5));
        let csv = dir.path().join("t.csv");
        write_csv(
            &csv,
            &["a", "b"],
            vec![vec!["1".to_string(), "2".to_string()]],
        )
        .unwrap();
        assert_eq!(std::fs::read_to_string(csv).unwrap(), "a,b\n1,2\n");
    }
}
