use serde::{Deserialize, Serialize};

use super::{TrialConfig, VerifyError};

/// One inequality `lhs ≤ rhs` observed in a trial.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub trial: usize,
    pub label: String,
    pub lhs: f64,
    pub rhs: f64,
    /// `(rhs − lhs) / max(1, |rhs|)`.
    pub margin: f64,
    pub witness: String,
    /// Set when Monte-Carlo noise is too large to decide the inequality.
    #[serde(default)]
    pub inconclusive: bool,
}

impl TrialRecord {
    pub fn new(trial: usize, label: impl Into<String>, lhs: f64, rhs: f64) -> Result<Self, VerifyError> {
        let label = label.into();
        if !lhs.is_finite() || !rhs.is_finite() {
            return Err(VerifyError::NonFinite { label, lhs, rhs });
        }
        Ok(Self {
            trial,
            label,
            lhs,
            rhs,
            margin: relative_margin(lhs, rhs),
            witness: String::new(),
            inconclusive: false,
        })
    }

    pub fn with_witness(mut self, witness: impl Into<String>) -> Self {
        self.witness = witness.into();
        self
    }

    pub fn inconclusive(mut self, flag: bool) -> Self {
        self.inconclusive = flag;
        self
    }

    pub fn is_violation(&self, tolerance: f64) -> bool {
        !self.inconclusive && self.margin < -tolerance
    }
}

pub fn relative_margin(lhs: f64, rhs: f64) -> f64 {
    (rhs - lhs) / rhs.abs().max(1.0)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Violation,
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Aggregate {
    pub min_margin: f64,
    pub violations: usize,
    pub inconclusive: usize,
    pub records: usize,
    /// Wall-clock time, only when requested; omitted by default so that
    /// reports are reproducible byte for byte.
    pub runtime_ms: Option<u64>,
}

/// A row of a convergence table.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TableRow {
    pub depth: usize,
    pub value: f64,
    pub limit: f64,
    pub gap: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub check: String,
    pub claim: String,
    pub config: TrialConfig,
    pub seed: u64,
    pub trials: Vec<TrialRecord>,
    pub aggregate: Aggregate,
    pub status: Status,
    pub pass: bool,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub table: Option<Vec<TableRow>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub manifest_hash: Option<String>,
}

impl VerificationReport {
    pub fn new(
        check: &str,
        claim: &str,
        config: &TrialConfig,
        trials: Vec<TrialRecord>,
        runtime_ms: Option<u64>,
    ) -> Self {
        let tol = config.tolerance;
        let violations = trials.iter().filter(|r| r.is_violation(tol)).count();
        let inconclusive = trials.iter().filter(|r| r.inconclusive).count();
        let min_margin = trials
            .iter()
            .filter(|r| !r.inconclusive)
            .map(|r| r.margin)
            .fold(f64::INFINITY, f64::min);
        let status = if violations > 0 {
            Status::Violation
        } else if inconclusive > 0 {
            Status::Inconclusive
        } else {
            Status::Pass
        };
        Self {
            check: check.to_string(),
            claim: claim.to_string(),
            config: config.clone(),
            seed: config.seed,
            aggregate: Aggregate {
                min_margin: if min_margin.is_finite() { min_margin } else { 0.0 },
                violations,
                inconclusive,
                records: trials.len(),
                runtime_ms,
            },
            trials,
            status,
            pass: violations == 0,
            notes: Vec::new(),
            table: None,
            manifest_hash: None,
        }
    }

    pub fn with_notes(mut self, notes: Vec<String>) -> Self {
        self.notes = notes;
        self
    }

    pub fn with_table(mut self, table: Vec<TableRow>) -> Self {
        self.table = Some(table);
        self
    }

    /// Records with the given label.
    pub fn records<'a>(&'a self, label: &'a str) -> impl Iterator<Item = &'a TrialRecord> + 'a {
        self.trials.iter().filter(move |r| r.label == label)
    }

    /// One-line human summary.
    pub fn summary_line(&self) -> String {
        format!(
            "{:<10} {:<12} records={:<5} violations={:<3} inconclusive={:<3} min_margin={:.3e}",
            self.check,
            match self.status {
                Status::Pass => "PASS",
                Status::Violation => "VIOLATION",
                Status::Inconclusive => "INCONCLUSIVE",
            },
            self.aggregate.records,
            self.aggregate.violations,
            self.aggregate.inconclusive,
            self.aggregate.min_margin,
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn margins_and_status() {
        let cfg = TrialConfig::default();
        let ok = TrialRecord::new(0, "a", 1.0, 2.0).unwrap();
        assert!((ok.margin - 0.5).abs() < 1e-15);
        let small = TrialRecord::new(0, "b", 0.3, 0.2).unwrap();
        assert!((small.margin + 0.1).abs() < 1e-15);
        let report = VerificationReport::new("x", "", &cfg, vec![ok.clone(), small.clone()], None);
        assert_eq!(report.status, Status::Violation);
        assert!(!report.pass);
        let noisy = small.inconclusive(true);
        let report = VerificationReport::new("x", "", &cfg, vec![ok, noisy], None);
        assert_eq!(report.status, Status::Inconclusive);
        assert!(report.pass);
        assert!(TrialRecord::new(0, "c", f64::NAN, 1.0).is_err());
    }
}
