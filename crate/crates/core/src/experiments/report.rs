use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Duration;

use serde::{Deserialize, Serialize};

use super::ExperimentConfig;
use crate::error::{Error, Result};

/// One verified statement.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub id: String,
    /// The limit statement or identity being checked.
    pub anchor: String,
    pub alpha: Option<f64>,
    /// Replicas that entered the statistic.
    pub n: usize,
    pub statistic: f64,
    /// Theoretical value the statistic is compared with, if any.
    pub reference: Option<f64>,
    pub threshold: f64,
    /// How statistic, reference and threshold are combined.
    pub rule: Rule,
    pub passed: bool,
    /// Diagnostics are reported but do not decide the exit status.
    pub gate: bool,
    pub note: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Rule {
    /// `statistic < threshold`
    Below,
    /// `statistic >= threshold`
    AtLeast,
    /// `statistic <= threshold`
    AtMost,
    /// `|statistic - reference| <= threshold`
    AbsoluteError,
    /// `|statistic / reference - 1| <= threshold`
    RelativeError,
    /// `statistic == reference`
    Equal,
}

impl Rule {
    pub fn evaluate(self, statistic: f64, reference: Option<f64>, threshold: f64) -> bool {
        let r = reference.unwrap_or(f64::NAN);
        match self {
            Rule::Below => statistic < threshold,
            Rule::AtLeast => statistic >= threshold,
            Rule::AtMost => statistic <= threshold,
            Rule::AbsoluteError => (statistic - r).abs() <= threshold,
            Rule::RelativeError => (statistic / r - 1.0).abs() <= threshold,
            Rule::Equal => statistic == r,
        }
    }

    fn symbol(self) -> &'static str {
        match self {
            Rule::Below => "<",
            Rule::AtLeast => ">=",
            Rule::AtMost => "<=",
            Rule::AbsoluteError => "±",
            Rule::RelativeError => "±rel",
            Rule::Equal => "==",
        }
    }
}

impl CheckRecord {
    pub fn new(id: impl Into<String>, anchor: impl Into<String>, alpha: Option<f64>) -> CheckBuilder {
        CheckBuilder {
            record: CheckRecord {
                id: id.into(),
                anchor: anchor.into(),
                alpha,
                n: 0,
                statistic: f64::NAN,
                reference: None,
                threshold: f64::NAN,
                rule: Rule::Below,
                passed: false,
                gate: true,
                note: None,
            },
        }
    }
}

pub struct CheckBuilder {
    record: CheckRecord,
}

impl CheckBuilder {
    pub fn n(mut self, n: usize) -> Self {
        self.record.n = n;
        self
    }

    pub fn reference(mut self, r: f64) -> Self {
        self.record.reference = Some(r);
        self
    }

    pub fn diagnostic(mut self) -> Self {
        self.record.gate = false;
        self
    }

    pub fn note(mut self, note: impl Into<String>) -> Self {
        self.record.note = Some(note.into());
        self
    }

    pub fn finish(mut self, statistic: f64, rule: Rule, threshold: f64) -> CheckRecord {
        let r = &mut self.record;
        r.statistic = statistic;
        r.rule = rule;
        r.threshold = threshold;
        r.passed = statistic.is_finite() && rule.evaluate(statistic, r.reference, threshold);
        self.record
    }
}

/// A named numeric series attached to a report, e.g. a crossing profile.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Series {
    pub label: String,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub seed: u64,
    pub config_hash: String,
    pub crate_version: String,
    pub config: ExperimentConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub suite: String,
    pub checks: Vec<CheckRecord>,
    pub series: Vec<Series>,
    pub notes: Vec<String>,
    /// Replicas dropped because a path exceeded its point budget.
    pub failed_replicas: usize,
    pub provenance: Provenance,
}

/// Wall-clock time per check, kept out of the report so reports stay
/// reproducible byte for byte.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub suite: String,
    pub seconds: Vec<(String, f64)>,
}

impl Timing {
    pub fn record(&mut self, id: impl Into<String>, elapsed: Duration) {
        self.seconds.push((id.into(), elapsed.as_secs_f64()));
    }
}

impl ExperimentReport {
    pub fn new(suite: &str, config: &ExperimentConfig) -> Self {
        ExperimentReport {
            suite: suite.to_string(),
            checks: Vec::new(),
            series: Vec::new(),
            notes: Vec::new(),
            failed_replicas: 0,
            provenance: Provenance {
                seed: config.seed,
                config_hash: config.hash(),
                crate_version: env!("CARGO_PKG_VERSION").to_string(),
                config: config.clone(),
            },
        }
    }

    /// True when every gating check passed.
    pub fn passed(&self) -> bool {
        self.checks.iter().filter(|c| c.gate).all(|c| c.passed)
    }

    pub fn check(&self, id: &str, alpha: Option<f64>) -> Option<&CheckRecord> {
        self.checks.iter().find(|c| c.id == id && c.alpha == alpha)
    }

    /// File stem embedding suite, indices and seed.
    pub fn file_stem(&self) -> String {
        let alphas: Vec<String> = self.provenance.config.alphas.iter().map(|a| a.to_string()).collect();
        format!("{}_alpha-{}_seed-{}", self.suite, alphas.join("-"), self.provenance.seed)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)? + "\n")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    /// Flat check table with a header row.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("suite,check,alpha,n,statistic,reference,threshold,rule,passed,gate\n");
        for c in &self.checks {
            let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
            let rule = serde_json::to_value(c.rule).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default();
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{},{},{}",
                self.suite,
                c.id,
                opt(c.alpha),
                c.n,
                c.statistic,
                opt(c.reference),
                c.threshold,
                rule,
                c.passed,
                c.gate
            );
        }
        out
    }

    /// Human-readable table.
    pub fn render(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "suite {} (seed {}, config {})",
            self.suite,
            self.provenance.seed,
            &self.provenance.config_hash[..12]
        );
        for c in &self.checks {
            let status = match (c.gate, c.passed) {
                (true, true) => "PASS",
                (true, false) => "FAIL",
                (false, true) => "ok  ",
                (false, false) => "warn",
            };
            let alpha = c.alpha.map(|a| format!("α={a}")).unwrap_or_default();
            let reference = c.reference.map(|r| format!(" ref {r:.6}")).unwrap_or_default();
            let _ = writeln!(
                out,
                "  {status} {:<28} {:<7} stat {:.6}{reference} {} {} (n={})",
                c.id,
                alpha,
                c.statistic,
                c.rule.symbol(),
                c.threshold,
                c.n
            );
            let _ = writeln!(out, "       {}", c.anchor);
            if let Some(note) = &c.note {
                let _ = writeln!(out, "       note: {note}");
            }
        }
        if self.failed_replicas > 0 {
            let _ = writeln!(out, "  replicas dropped for exceeding the point budget: {}", self.failed_replicas);
        }
        for note in &self.notes {
            let _ = writeln!(out, "  note: {note}");
        }
        let verdict = if self.passed() { "all gating checks passed" } else { "some gating checks failed" };
        let _ = writeln!(out, "  {verdict}");
        out
    }

    /// Write `<stem>.json`, `<stem>.csv` and `<stem>.timing.json` under `dir`.
    pub fn write(&self, dir: &Path, timing: &Timing) -> Result<Vec<PathBuf>> {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let stem = self.file_stem();
        let files = [
            (dir.join(format!("{stem}.json")), self.to_json()?),
            (dir.join(format!("{stem}.csv")), self.to_csv()),
            (dir.join(format!("{stem}.timing.json")), serde_json::to_string_pretty(timing)? + "\n"),
        ];
        let mut written = Vec::new();
        for (path, text) in files {
            std::fs::write(&path, text).map_err(|e| Error::io(&path, e))?;
            written.push(path);
        }
        Ok(written)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> ExperimentReport {
        let mut r = ExperimentReport::new("demo", &ExperimentConfig::default());
        r.checks.push(CheckRecord::new("a", "identity", Some(1.0)).n(10).reference(1.0).finish(
            1.01,
            Rule::RelativeError,
            0.05,
        ));
        r.checks.push(CheckRecord::new("b", "bound", None).n(10).diagnostic().finish(0.3, Rule::Below, 0.1));
        r
    }

    #[test]
    fn rules() {
        assert!(Rule::Below.evaluate(0.01, None, 0.05));
        assert!(!Rule::Below.evaluate(0.05, None, 0.05));
        assert!(Rule::AtLeast.evaluate(0.95, None, 0.95));
        assert!(Rule::AbsoluteError.evaluate(0.9, Some(0.8427), 0.1));
        assert!(!Rule::RelativeError.evaluate(1.3, Some(1.0), 0.25));
        assert!(Rule::Equal.evaluate(1.0, Some(1.0), 0.0));
    }

    #[test]
    fn diagnostics_do_not_gate() {
        let r = sample();
        assert!(!r.checks[1].passed);
        assert!(r.passed());
        assert!(r.render().contains("PASS"));
    }

    #[test]
    fn json_round_trip_and_csv() {
        let r = sample();
        let back = ExperimentReport::from_json(&r.to_json().unwrap()).unwrap();
        assert_eq!(r, back);
        let csv = r.to_csv();
        assert!(csv.starts_with("suite,check,alpha,n,statistic"));
        assert!(csv.contains("demo,a,1,10,1.01,1,0.05,relative_error,true,true"));
    }

    #[test]
    fn writes_three_files() {
        let dir = tempfile::tempdir().unwrap();
        let r = sample();
        let files = r.write(dir.path(), &Timing::default()).unwrap();
        assert_eq!(files.len(), 3);
        assert!(files[0].file_name().unwrap().to_str().unwrap().starts_with("demo_alpha-1_seed-1"));
        assert!(files.iter().all(|f| f.exists()));
    }
}
