//! Seeded verification harness.
//!
//! Each check samples random instances, evaluates both sides of a family of
//! inequalities `lhs ≤ rhs`, and reports the relative margin of every one.
//! Estimates are arranged so that a reported violation is real: quantities
//! on the large side are exact or over-estimates (dual upper certificates,
//! theoretical caps), quantities on the small side are exact or
//! under-estimates (ascent values for `‖u‖`, dual lower certificates,
//! compressions). Norms of explicit finite operators are computed to
//! relative accuracy `1e-10` and treated as exact.
//!
//! Trials draw from independent seeded streams and run in parallel; records
//! are merged in trial order, so a configuration always yields the same
//! report.

mod bounded;
mod free_product;
mod khintchine;
mod maps;
mod montecarlo;
mod regular;
mod report;
mod semicircular;

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fock::FockError;
use crate::freegroup::FreeGroupError;
use crate::freeprod::FreeProdError;
use crate::linalg::LinalgError;
use crate::opspace::OpSpaceError;
use crate::sampling::trial_rng;

pub use bounded::{four_norm_display, verify_lemma_1_4, verify_theorem_0k};
pub use free_product::verify_prop_4_9;
pub use khintchine::{khintchine_lower_constant, khintchine_records, verify_khintchine, verify_lemma_3_2};
pub use maps::{estimate_map_norm, MapNormEstimate, MatrixMap};
pub use montecarlo::{steinhaus_integral, MonteCarloEstimate};
pub use regular::verify_prop_1_1;
pub use report::{relative_margin, Aggregate, Status, TableRow, TrialRecord, VerificationReport};
pub use semicircular::{cuntz_table, semicircular_table, verify_lemma_4_2, verify_prop_4_8};

/// Largest operator side (basis size times `d`) any check will build.
pub const MAX_OPERATOR_DIM: usize = 4_000_000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum VerifyError {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("{check}: precondition failed: {reason}")]
    Precondition { check: String, reason: String },
    #[error("size guard: {0}")]
    SizeGuard(String),
    #[error("non-finite value in '{label}': lhs = {lhs}, rhs = {rhs}")]
    NonFinite { label: String, lhs: f64, rhs: f64 },
    #[error("computation failed: {0}")]
    Computation(String),
}

impl From<LinalgError> for VerifyError {
    fn from(e: LinalgError) -> Self {
        Self::Computation(e.to_string())
    }
}

impl From<OpSpaceError> for VerifyError {
    fn from(e: OpSpaceError) -> Self {
        match e {
            OpSpaceError::TooLarge { .. } => Self::SizeGuard(e.to_string()),
            _ => Self::Computation(e.to_string()),
        }
    }
}

impl From<FreeGroupError> for VerifyError {
    fn from(e: FreeGroupError) -> Self {
        match e {
            FreeGroupError::BallTooLarge { .. } => Self::SizeGuard(e.to_string()),
            _ => Self::Computation(e.to_string()),
        }
    }
}

impl From<FockError> for VerifyError {
    fn from(e: FockError) -> Self {
        match e {
            FockError::TooLarge { .. } => Self::SizeGuard(e.to_string()),
            _ => Self::Computation(e.to_string()),
        }
    }
}

impl From<FreeProdError> for VerifyError {
    fn from(e: FreeProdError) -> Self {
        match e {
            FreeProdError::TooLarge { .. } => Self::SizeGuard(e.to_string()),
            _ => Self::Computation(e.to_string()),
        }
    }
}

/// Sizes, trial count and seed for one check.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialConfig {
    pub n: usize,
    pub k: usize,
    pub d: usize,
    pub radius: usize,
    pub depth: usize,
    pub trials: usize,
    pub seed: u64,
    pub tolerance: f64,
    pub mc_samples: usize,
    #[serde(default)]
    pub record_runtime: bool,
}

impl Default for TrialConfig {
    fn default() -> Self {
        Self {
            n: 2,
            k: 2,
            d: 2,
            radius: 5,
            depth: 8,
            trials: 20,
            seed: 0,
            tolerance: 1e-8,
            mc_samples: 20_000,
            record_runtime: false,
        }
    }
}

impl TrialConfig {
    pub fn validate(&self) -> Result<(), VerifyError> {
        for (name, v) in [
            ("n", self.n),
            ("k", self.k),
            ("d", self.d),
            ("trials", self.trials),
            ("mc_samples", self.mc_samples),
        ] {
            if v == 0 {
                return Err(VerifyError::InvalidConfig(format!("{name} must be at least 1")));
            }
        }
        if !(self.tolerance > 0.0 && self.tolerance.is_finite()) {
            return Err(VerifyError::InvalidConfig(format!(
                "tolerance must be positive, got {}",
                self.tolerance
            )));
        }
        if self.trials > u32::MAX as usize {
            return Err(VerifyError::InvalidConfig("too many trials".into()));
        }
        Ok(())
    }
}

/// The available checks.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Check {
    Prop11,
    Lemma14,
    Theorem0k,
    Khintchine,
    Lemma32,
    Lemma42,
    Prop48,
    Prop49,
}

impl Check {
    pub const ALL: [Check; 8] = [
        Check::Prop11,
        Check::Lemma14,
        Check::Theorem0k,
        Check::Khintchine,
        Check::Lemma32,
        Check::Lemma42,
        Check::Prop48,
        Check::Prop49,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Check::Prop11 => "prop11",
            Check::Lemma14 => "lemma14",
            Check::Theorem0k => "theorem0k",
            Check::Khintchine => "khintchine",
            Check::Lemma32 => "lemma32",
            Check::Lemma42 => "lemma42",
            Check::Prop48 => "prop48",
            Check::Prop49 => "prop49",
        }
    }

    /// Stream index used to derive per-trial generators.
    fn stream(self) -> u32 {
        self as u32 + 1
    }

    /// Sizes used when nothing is overridden.
    pub fn default_config(self) -> TrialConfig {
        let base = TrialConfig::default();
        match self {
            Check::Prop11 => TrialConfig {
                k: 1,
                trials: 50,
                ..base
            },
            Check::Lemma14 => TrialConfig {
                n: 4,
                k: 1,
                d: 3,
                trials: 50,
                ..base
            },
            Check::Theorem0k => TrialConfig { trials: 50, ..base },
            Check::Khintchine | Check::Lemma32 => base,
            Check::Lemma42 => TrialConfig {
                n: 4,
                k: 1,
                depth: 14,
                ..base
            },
            Check::Prop48 => TrialConfig {
                n: 3,
                k: 1,
                depth: 10,
                trials: 50,
                ..base
            },
            Check::Prop49 => TrialConfig {
                k: 1,
                depth: 4,
                trials: 10,
                ..base
            },
        }
    }

    /// Reduced sizes for a fast full run.
    pub fn quick_config(self) -> TrialConfig {
        let base = TrialConfig {
            trials: 6,
            mc_samples: 10_000,
            ..self.default_config()
        };
        match self {
            Check::Prop11 => TrialConfig { radius: 4, ..base },
            Check::Lemma14 => TrialConfig { n: 3, d: 2, ..base },
            Check::Theorem0k => base,
            Check::Khintchine => TrialConfig { trials: 4, ..base },
            Check::Lemma32 => TrialConfig { trials: 4, ..base },
            Check::Lemma42 => base,
            Check::Prop48 => TrialConfig {
                n: 2,
                depth: 7,
                trials: 4,
                ..base
            },
            Check::Prop49 => TrialConfig {
                depth: 3,
                trials: 4,
                ..base
            },
        }
    }

    pub fn run(self, cfg: &TrialConfig) -> Result<VerificationReport, VerifyError> {
        cfg.validate()?;
        let start = Instant::now();
        let mut report = match self {
            Check::Prop11 => verify_prop_1_1(cfg),
            Check::Lemma14 => verify_lemma_1_4(cfg),
            Check::Theorem0k => verify_theorem_0k(cfg),
            Check::Khintchine => verify_khintchine(cfg),
            Check::Lemma32 => verify_lemma_3_2(cfg),
            Check::Lemma42 => verify_lemma_4_2(cfg),
            Check::Prop48 => verify_prop_4_8(cfg),
            Check::Prop49 => verify_prop_4_9(cfg),
        }?;
        if cfg.record_runtime {
            report.aggregate.runtime_ms = Some(start.elapsed().as_millis() as u64);
        }
        Ok(report)
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Check {
    type Err = VerifyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Check::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| VerifyError::InvalidConfig(format!("unknown check '{s}'")))
    }
}

fn precondition(check: Check, reason: impl Into<String>) -> VerifyError {
    VerifyError::Precondition {
        check: check.name().to_string(),
        reason: reason.into(),
    }
}

/// Runs `trial` for every index on its own stream and concatenates the
/// records in index order.
fn run_trials<F>(check: Check, cfg: &TrialConfig, trial: F) -> Result<Vec<TrialRecord>, VerifyError>
where
    F: Fn(usize, &mut ChaCha8Rng) -> Result<Vec<TrialRecord>, VerifyError> + Sync,
{
    let per_trial: Vec<Result<Vec<TrialRecord>, VerifyError>> = (0..cfg.trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = trial_rng(cfg.seed, check.stream(), t as u32);
            trial(t, &mut rng)
        })
        .collect();
    let mut out = Vec::new();
    for r in per_trial {
        out.extend(r?);
    }
    Ok(out)
}
