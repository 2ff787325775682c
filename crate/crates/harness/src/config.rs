//! JSON experiment configuration.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use tracerec_core::{BitString, ClassSpecQ, ClassSpecS};

use crate::error::{HarnessError, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Montecarlo,
    Exact,
    Asymptotic,
    Sweep,
    Audit,
}

/// How the source string is produced.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum StringSpec {
    /// A literal string such as `"0011"`; its length fixes `n`.
    Bits { bits: String },
    /// A block `A^{floor(ell n^a)}` padded with an alternating filler.
    Q { pattern: String, ell: f64, a: f64 },
    /// `M` alternating runs with lengths `ell_i n`.
    S {
        #[serde(default)]
        first_bit: u8,
        fractions: Vec<f64>,
    },
}

/// Number of traces: a fixed count, or `exp(c n^a)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged, deny_unknown_fields)]
pub enum TraceSchedule {
    Count(u64),
    Exponential {
        c: f64,
        #[serde(default = "one")]
        a: f64,
    },
}

fn one() -> f64 {
    1.0
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Estimator {
    Difficulty,
    Events,
    MrError,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Must agree with the subcommand when present.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode: Option<Mode>,
    pub string: StringSpec,
    pub p: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub traces: Option<TraceSchedule>,
    #[serde(default = "default_trials")]
    pub trials: u64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_grid: Option<Vec<usize>>,
    /// Sweep values of `c`, absolute.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c_grid: Option<Vec<f64>>,
    /// Sweep values of `c` as multiples of the threshold `c*`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c_factors: Option<Vec<f64>>,
    /// Monte Carlo estimators to run; defaults to every feasible one.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub estimators: Option<Vec<Estimator>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub oracle_cap: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
}

fn default_trials() -> u64 {
    1000
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let config: Self = serde_json::from_str(text).map_err(|e| HarnessError::Config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| HarnessError::Read {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_json(&text)
    }

    /// Canonical JSON of the effective configuration (after overrides).
    pub fn canonical_json(&self) -> String {
        serde_json::to_string(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(HarnessError::Config(m));
        if !(0.0..=1.0).contains(&self.p) {
            return bad(format!("p = {} outside [0, 1]", self.p));
        }
        if self.trials == 0 {
            return bad("trials must be positive".into());
        }
        match &self.string {
            StringSpec::Bits { bits } => {
                let s: BitString = bits.parse().map_err(|e| HarnessError::Config(format!("{e}")))?;
                if s.is_empty() {
                    return bad("bits must be nonempty".into());
                }
            }
            StringSpec::Q { pattern, ell, a } => {
                let unit: BitString = pattern.parse().map_err(|e| HarnessError::Config(format!("{e}")))?;
                ClassSpecQ::new(unit, *ell, *a).map_err(|e| HarnessError::Config(e.to_string()))?;
            }
            StringSpec::S { first_bit, fractions } => {
                if *first_bit > 1 {
                    return bad("first_bit must be 0 or 1".into());
                }
                ClassSpecS::new(*first_bit == 1, fractions.clone())
                    .map_err(|e| HarnessError::Config(e.to_string()))?;
            }
        }
        match self.traces {
            Some(TraceSchedule::Count(0)) => return bad("traces must be at least 1".into()),
            Some(TraceSchedule::Exponential { c, a }) if c.is_nan() || c <= 0.0 || !(a > 0.0 && a <= 1.0) => {
                return bad(format!("exponential schedule needs c > 0 and a in (0, 1], got c = {c}, a = {a}"))
            }
            _ => {}
        }
        if self.n.is_some() && self.n_grid.is_some() {
            return bad("give either n or n_grid, not both".into());
        }
        if self.n == Some(0) || self.n_grid.as_ref().is_some_and(|g| g.is_empty() || g.contains(&0)) {
            return bad("n values must be positive".into());
        }
        if self.c_grid.is_some() && self.c_factors.is_some() {
            return bad("give either c_grid or c_factors, not both".into());
        }
        for c in self.c_grid.iter().chain(&self.c_factors).flatten() {
            if !(*c > 0.0 && c.is_finite()) {
                return bad(format!("c value {c} must be positive"));
            }
        }
        Ok(())
    }

    pub fn check_mode(&self, wanted: Mode) -> Result<()> {
        match self.mode {
            Some(m) if m != wanted => Err(HarnessError::Config(format!(
                "config mode {m:?} does not match the requested {wanted:?}"
            ))),
            _ => Ok(()),
        }
    }

    /// Source lengths to evaluate. A literal string fixes its own length.
    pub fn n_values(&self) -> Result<Vec<usize>> {
        let given = match (&self.n, &self.n_grid) {
            (Some(n), _) => Some(vec![*n]),
            (_, Some(g)) => Some(g.clone()),
            _ => None,
        };
        match (&self.string, given) {
            (StringSpec::Bits { bits }, None) => Ok(vec![bits.len()]),
            (StringSpec::Bits { bits }, Some(g)) if g.iter().all(|&n| n == bits.len()) => Ok(g),
            (StringSpec::Bits { bits }, Some(_)) => Err(HarnessError::Config(format!(
                "n must equal the literal string length {}",
                bits.len()
            ))),
            (_, Some(g)) => Ok(g),
            (_, None) => Err(HarnessError::Config("n or n_grid is required for class specs".into())),
        }
    }
}
