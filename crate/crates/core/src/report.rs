//! Verification reports: a flat list of checks, each a measured value
//! against a bound.

use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::Result;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportEntry {
    pub check: String,
    pub params: Value,
    pub value: f64,
    pub bound: f64,
    /// Signed slack, positive when the check holds with room to spare.
    pub margin: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Report {
    pub entries: Vec<ReportEntry>,
}

impl Report {
    pub fn new() -> Self {
        Self::default()
    }

    /// `value <= bound + tol`.
    pub fn upper(&mut self, check: &str, params: Value, value: f64, bound: f64, tol: f64) -> bool {
        let pass = value <= bound + tol;
        self.push(check, params, value, bound, bound - value, pass)
    }

    /// `value >= bound - tol`.
    pub fn lower(&mut self, check: &str, params: Value, value: f64, bound: f64, tol: f64) -> bool {
        let pass = value >= bound - tol;
        self.push(check, params, value, bound, value - bound, pass)
    }

    /// `|value - target| <= tol`; the bound column holds the target.
    pub fn close(&mut self, check: &str, params: Value, value: f64, target: f64, tol: f64) -> bool {
        let err = (value - target).abs();
        let pass = err <= tol;
        self.push(check, params, value, target, tol - err, pass)
    }

    pub fn push(&mut self, check: &str, params: Value, value: f64, bound: f64, margin: f64, pass: bool) -> bool {
        self.entries.push(ReportEntry {
            check: check.to_string(),
            params,
            value,
            bound,
            margin,
            pass,
        });
        pass
    }

    pub fn extend(&mut self, other: Report) {
        self.entries.extend(other.entries);
    }

    pub fn pass(&self) -> bool {
        self.entries.iter().all(|e| e.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &ReportEntry> {
        self.entries.iter().filter(|e| !e.pass)
    }

    /// Entries whose check name starts with `prefix`.
    pub fn matching<'a>(&'a self, prefix: &'a str) -> impl Iterator<Item = &'a ReportEntry> + 'a {
        self.entries.iter().filter(move |e| e.check.starts_with(prefix))
    }

    pub fn write_json(&self, path: &Path) -> Result<()> {
        let text = serde_json::to_string_pretty(self)?;
        std::fs::write(path, text + "\n")?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn margins_and_pass() {
        let mut r = Report::new();
        assert!(r.upper("a", json!({}), 1.0, 2.0, 0.0));
        assert!(!r.lower("b", json!({}), 1.0, 2.0, 0.5));
        assert!(r.close("c", json!({"k": 1}), 1.0, 1.1, 0.2));
        assert_eq!(r.entries[0].margin, 1.0);
        assert_eq!(r.entries[1].margin, -1.0);
        assert!(!r.pass());
        assert_eq!(r.failures().count(), 1);
        assert_eq!(r.matching("c").count(), 1);
    }

    #[test]
    fn serializes_as_a_list() {
        let mut r = Report::new();
        r.upper("x", json!({"n": 4}), 0.5, 1.0, 0.0);
        let v = serde_json::to_value(&r).unwrap();
        assert!(v.is_array());
        assert_eq!(v[0]["check"], "x");
        let back: Report = serde_json::from_value(v).unwrap();
        assert_eq!(back, r);
    }
}
