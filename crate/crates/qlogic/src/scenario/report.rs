//! Report records and the text/CSV emitters.

use std::fmt;

/// Outcome of a single check row.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CheckStatus {
    Pass,
    Fail,
    /// The check had no data to act on (for example an empty sub-ensemble).
    Skipped,
}

impl fmt::Display for CheckStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            CheckStatus::Pass => "pass",
            CheckStatus::Fail => "fail",
            CheckStatus::Skipped => "skipped",
        };
        f.write_str(s)
    }
}

/// One comparison between an exact value and an empirical one.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckRecord {
    pub name: String,
    pub exact: f64,
    /// Missing when the check was skipped.
    pub empirical: Option<f64>,
    pub tolerance: f64,
    pub status: CheckStatus,
}

impl CheckRecord {
    /// Passes when the empirical value sits within `tolerance` of the
    /// exact one.
    pub fn evaluate(name: impl Into<String>, exact: f64, empirical: f64, tolerance: f64) -> Self {
        let status = if (empirical - exact).abs() <= tolerance {
            CheckStatus::Pass
        } else {
            CheckStatus::Fail
        };
        CheckRecord { name: name.into(), exact, empirical: Some(empirical), tolerance, status }
    }

    pub fn skipped(name: impl Into<String>, exact: f64) -> Self {
        CheckRecord {
            name: name.into(),
            exact,
            empirical: None,
            tolerance: 0.0,
            status: CheckStatus::Skipped,
        }
    }
}

/// Full result of a scenario run.
#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub scenario: &'static str,
    /// Digest of the effective config, echoed so runs can be traced back
    /// to their exact inputs.
    pub digest: String,
    pub seed: u64,
    pub trials: u64,
    /// Free-form context lines for the text emitter.
    pub notes: Vec<String>,
    pub checks: Vec<CheckRecord>,
}

/// Output formats of the report emitters.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Text,
    Csv,
}

impl Report {
    /// True when no check failed. Skipped checks do not fail a report.
    pub fn verdict(&self) -> bool {
        self.checks.iter().all(|c| c.status != CheckStatus::Fail)
    }

    pub fn emit(&self, format: Format) -> String {
        match format {
            Format::Text => self.to_text(),
            Format::Csv => self.to_csv(),
        }
    }

    /// CSV with fixed columns `check_name,exact,empirical,tolerance,pass`.
    /// Skipped rows leave the empirical column empty.
    pub fn to_csv(&self) -> String {
        let mut writer = csv::Writer::from_writer(Vec::new());
        writer
            .write_record(["check_name", "exact", "empirical", "tolerance", "pass"])
            .expect("csv header");
        for check in &self.checks {
            let empirical = check.empirical.map(|v| v.to_string()).unwrap_or_default();
            writer
                .write_record([
                    check.name.as_str(),
                    &check.exact.to_string(),
                    &empirical,
                    &check.tolerance.to_string(),
                    &check.status.to_string(),
                ])
                .expect("csv row");
        }
        let bytes = writer.into_inner().expect("csv buffer");
        String::from_utf8(bytes).expect("csv is utf8")
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("scenario: {}\n", self.scenario));
        out.push_str(&format!("config digest: {}\n", self.digest));
        out.push_str(&format!("seed: {}\n", self.seed));
        out.push_str(&format!("trials: {}\n", self.trials));
        for note in &self.notes {
            out.push_str(&format!("note: {note}\n"));
        }
        let name_width = self
            .checks
            .iter()
            .map(|c| c.name.len())
            .chain(["check".len()])
            .max()
            .unwrap_or(5);
        out.push_str(&format!(
            "{:<name_width$}  {:<22}  {:<22}  {:<22}  status\n",
            "check", "exact", "empirical", "tolerance"
        ));
        for check in &self.checks {
            let empirical = check.empirical.map(|v| v.to_string()).unwrap_or_else(|| "-".into());
            out.push_str(&format!(
                "{:<name_width$}  {:<22}  {:<22}  {:<22}  {}\n",
                check.name,
                check.exact.to_string(),
                empirical,
                check.tolerance.to_string(),
                check.status
            ));
        }
        out.push_str(&format!(
            "verdict: {}\n",
            if self.verdict() { "pass" } else { "fail" }
        ));
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Report {
        Report {
            scenario: "eprb",
            digest: "0011223344556677".to_string(),
            seed: 42,
            trials: 1000,
            notes: vec!["order: 1-then-2".to_string()],
            checks: vec![
                CheckRecord::evaluate("cell[0,0]", 0.5, 0.498, 0.0063),
                CheckRecord::evaluate("cell[0,1]", 0.0, 0.0, 0.0),
                CheckRecord::skipped("retrodiction[1]", 1.0),
            ],
        }
    }

    #[test]
    fn csv_quotes_names_and_leaves_skipped_empirical_empty() {
        let csv = sample().to_csv();
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("check_name,exact,empirical,tolerance,pass"));
        assert_eq!(lines.next(), Some("\"cell[0,0]\",0.5,0.498,0.0063,pass"));
        assert_eq!(lines.next(), Some("\"cell[0,1]\",0,0,0,pass"));
        assert_eq!(lines.next(), Some("retrodiction[1],1,,0,skipped"));
        assert_eq!(lines.next(), None);
    }

    #[test]
    fn text_report_echoes_digest_seed_and_verdict() {
        let text = sample().to_text();
        assert!(text.contains("config digest: 0011223344556677"));
        assert!(text.contains("seed: 42"));
        assert!(text.contains("note: order: 1-then-2"));
        assert!(text.ends_with("verdict: pass\n"));
    }

    #[test]
    fn one_failure_flips_the_verdict() {
        let mut report = sample();
        report.checks.push(CheckRecord::evaluate("off", 1.0, 0.2, 0.1));
        assert!(!report.verdict());
        assert!(report.to_text().ends_with("verdict: fail\n"));
    }

    #[test]
    fn evaluate_compares_within_tolerance() {
        assert_eq!(CheckRecord::evaluate("x", 1.0, 1.25, 0.25).status, CheckStatus::Pass);
        assert_eq!(CheckRecord::evaluate("x", 1.0, 1.5, 0.25).status, CheckStatus::Fail);
        assert_eq!(CheckRecord::skipped("x", 1.0).status, CheckStatus::Skipped);
    }
}
