//! Pass/fail records and their CSV/JSON serialisation.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::Result;

/// Whether a record carries pass/fail semantics.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RecordKind {
    Check,
    /// Measured value reported for information; never fails a run.
    Diagnostic,
}

/// How `lhs`, `rhs` and `tolerance` are compared.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Comparison {
    /// `lhs <= rhs + tolerance`
    AtMost,
    /// `lhs >= rhs - tolerance`
    AtLeast,
    /// `|lhs - rhs| <= tolerance`
    Near,
}

impl Comparison {
    pub fn holds(self, lhs: f64, rhs: f64, tolerance: f64) -> bool {
        match self {
            Comparison::AtMost => lhs <= rhs + tolerance,
            Comparison::AtLeast => lhs >= rhs - tolerance,
            Comparison::Near => (lhs - rhs).abs() <= tolerance,
        }
    }

    fn formula(self) -> &'static str {
        match self {
            Comparison::AtMost => "lhs <= rhs + tolerance",
            Comparison::AtLeast => "lhs >= rhs - tolerance",
            Comparison::Near => "|lhs - rhs| <= tolerance",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    pub tolerance: f64,
    pub passed: bool,
    /// Short name of the statement the record tests.
    pub anchor: String,
    pub kind: RecordKind,
    /// Set for negative controls, whose failure is the desired outcome.
    #[serde(default)]
    pub expect_fail: bool,
    #[serde(default)]
    pub metadata: BTreeMap<String, String>,
}

impl CheckRecord {
    pub fn check(name: impl Into<String>, anchor: &str, cmp: Comparison, lhs: f64, rhs: f64, tolerance: f64) -> Self {
        let mut metadata = BTreeMap::new();
        metadata.insert("comparison".to_string(), cmp.formula().to_string());
        Self {
            name: name.into(),
            lhs,
            rhs,
            tolerance,
            passed: cmp.holds(lhs, rhs, tolerance),
            anchor: anchor.to_string(),
            kind: RecordKind::Check,
            expect_fail: false,
            metadata,
        }
    }

    /// Boolean outcome stored as `lhs = 1` (true) against `rhs = 1`.
    pub fn flag(name: impl Into<String>, anchor: &str, value: bool) -> Self {
        let v = if value { 1.0 } else { 0.0 };
        Self::check(name, anchor, Comparison::Near, v, 1.0, 0.0)
    }

    pub fn diagnostic(name: impl Into<String>, anchor: &str, lhs: f64, rhs: f64) -> Self {
        Self {
            name: name.into(),
            lhs,
            rhs,
            tolerance: 0.0,
            passed: true,
            anchor: anchor.to_string(),
            kind: RecordKind::Diagnostic,
            expect_fail: false,
            metadata: BTreeMap::new(),
        }
    }

    pub fn with_meta(mut self, key: &str, value: impl ToString) -> Self {
        self.metadata.insert(key.to_string(), value.to_string());
        self
    }

    /// Outcome after applying the expected-failure flag. Diagnostics are
    /// always acceptable.
    pub fn acceptable(&self) -> bool {
        match self.kind {
            RecordKind::Diagnostic => true,
            RecordKind::Check => self.passed != self.expect_fail,
        }
    }
}

/// Does `name` match `pattern`, where a trailing `*` matches any suffix?
pub fn name_matches(pattern: &str, name: &str) -> bool {
    match pattern.strip_suffix('*') {
        Some(prefix) => name.starts_with(prefix),
        None => pattern == name,
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub scenario: String,
    pub seed: u64,
    pub records: Vec<CheckRecord>,
}

/// Flat CSV row; metadata goes to the JSON report only.
#[derive(Serialize)]
struct CsvRow<'a> {
    name: &'a str,
    lhs: f64,
    rhs: f64,
    tolerance: f64,
    passed: bool,
    anchor: &'a str,
    kind: RecordKind,
    expect_fail: bool,
}

impl Report {
    pub fn new(scenario: impl Into<String>, seed: u64) -> Self {
        Self { scenario: scenario.into(), seed, records: Vec::new() }
    }

    pub fn extend(&mut self, records: impl IntoIterator<Item = CheckRecord>) {
        self.records.extend(records);
    }

    /// Mark every record whose name matches one of `patterns`.
    pub fn apply_expect_fail(&mut self, patterns: &[String]) {
        for r in &mut self.records {
            if patterns.iter().any(|p| name_matches(p, &r.name)) {
                r.expect_fail = true;
            }
        }
    }

    /// Order records by name so output does not depend on execution order.
    pub fn sort(&mut self) {
        self.records.sort_by(|a, b| a.name.cmp(&b.name));
    }

    pub fn all_acceptable(&self) -> bool {
        self.records.iter().all(CheckRecord::acceptable)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckRecord> {
        self.records.iter().filter(|r| !r.acceptable())
    }

    pub fn passing_checks(&self) -> usize {
        self.records.iter().filter(|r| r.kind == RecordKind::Check && r.passed).count()
    }

    pub fn find(&self, name: &str) -> Option<&CheckRecord> {
        self.records.iter().find(|r| r.name == name)
    }

    pub fn to_csv(&self) -> Result<Vec<u8>> {
        let mut w = csv::Writer::from_writer(Vec::new());
        for r in &self.records {
            w.serialize(CsvRow {
                name: &r.name,
                lhs: r.lhs,
                rhs: r.rhs,
                tolerance: r.tolerance,
                passed: r.passed,
                anchor: &r.anchor,
                kind: r.kind,
                expect_fail: r.expect_fail,
            })?;
        }
        Ok(w.into_inner().map_err(|e| e.into_error())?)
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_csv()?)?;
        Ok(())
    }

    pub fn write_json(&self, path: &Path) -> Result<()> {
        fs::write(path, serde_json::to_vec_pretty(self)?)?;
        Ok(())
    }
}

/// Two-column series for external plotting.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct PlotSeries {
    pub name: String,
    pub x_label: String,
    pub y_label: String,
    pub points: Vec<(f64, f64)>,
}

impl PlotSeries {
    pub fn new(name: &str, x_label: &str, y_label: &str, points: Vec<(f64, f64)>) -> Self {
        Self { name: name.to_string(), x_label: x_label.to_string(), y_label: y_label.to_string(), points }
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record([&self.x_label, &self.y_label])?;
        for &(x, y) in &self.points {
            w.serialize((x, y))?;
        }
        w.flush()?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn comparisons() {
        assert!(CheckRecord::check("a", "x", Comparison::AtMost, 1.0, 1.0, 0.0).passed);
        assert!(!CheckRecord::check("a", "x", Comparison::AtMost, 1.1, 1.0, 0.05).passed);
        assert!(CheckRecord::check("a", "x", Comparison::AtLeast, 0.96, 1.0, 0.05).passed);
        assert!(CheckRecord::check("a", "x", Comparison::Near, 0.96, 1.0, 0.05).passed);
        assert!(!CheckRecord::check("a", "x", Comparison::Near, f64::NAN, 1.0, 0.05).passed);
        assert!(CheckRecord::flag("f", "x", true).passed);
        assert!(!CheckRecord::flag("f", "x", false).passed);
    }

    #[test]
    fn expect_fail_inverts() {
        let mut rep = Report::new("s", 0);
        rep.extend([
            CheckRecord::flag("contour.connected.0.5", "x", false),
            CheckRecord::flag("energy", "x", true),
            CheckRecord::diagnostic("d", "x", 1.0, 0.0),
        ]);
        assert!(!rep.all_acceptable());
        rep.apply_expect_fail(&["contour.connected*".to_string()]);
        assert!(rep.all_acceptable());
        rep.apply_expect_fail(&["energy".to_string()]);
        assert!(!rep.all_acceptable());
    }

    #[test]
    fn csv_has_header_and_rows() {
        let mut rep = Report::new("s", 0);
        rep.extend([CheckRecord::check("b", "x", Comparison::AtMost, 0.5, 1.0, 0.0)]);
        let text = String::from_utf8(rep.to_csv().unwrap()).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("name,lhs,rhs,tolerance,passed,anchor,kind,expect_fail"));
        assert_eq!(lines.next(), Some("b,0.5,1.0,0.0,true,x,check,false"));
    }
}
