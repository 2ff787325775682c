//! Concrete source strings produced from a [`StringSpec`].

use serde::Serialize;
use tracerec_core::{run_decompose, BitString, ClassSpecQ, ClassSpecS, PatternSpan, RunProfile};

use crate::config::StringSpec;
use crate::error::{HarnessError, Result};

/// A source string together with the spans declared by its generator.
#[derive(Clone, Debug)]
pub struct Instance {
    pub source: BitString,
    pub profile: RunProfile,
    /// Repeated blocks for the E1 detector: the class-Q block, or every run.
    pub spans: Vec<PatternSpan>,
    pub shape: Shape,
}

/// What the analytic formulas need to know about the generator.
#[derive(Clone, Debug)]
pub enum Shape {
    /// Class Q: `|A|` and the block exponent parameters.
    Block { period: usize, ell: f64, a: f64 },
    /// Run-structured: fractions `ell_i` (exact for class S, `r_i / n` for literals).
    Runs { fractions: Vec<f64> },
}

impl Instance {
    pub fn build(spec: &StringSpec, n: usize) -> Result<Self> {
        match spec {
            StringSpec::Bits { bits } => {
                let source: BitString = bits.parse().map_err(|e| HarnessError::Config(format!("{e}")))?;
                let profile = run_decompose(&source)?;
                let fractions = profile.lengths().iter().map(|&l| l as f64 / n as f64).collect();
                Ok(Self::from_runs(source, profile, fractions))
            }
            StringSpec::S { first_bit, fractions } => {
                let class = ClassSpecS::new(*first_bit == 1, fractions.clone())?;
                let source = class.instance(n)?;
                let profile = class.profile(n)?;
                Ok(Self::from_runs(source, profile, fractions.clone()))
            }
            StringSpec::Q { pattern, ell, a } => {
                let unit: BitString = pattern.parse().map_err(|e| HarnessError::Config(format!("{e}")))?;
                let class = ClassSpecQ::new(unit, *ell, *a)?;
                let (source, span) = class.instance(n)?;
                let profile = run_decompose(&source)?;
                Ok(Self {
                    source,
                    profile,
                    spans: vec![span],
                    shape: Shape::Block {
                        period: class.period(),
                        ell: *ell,
                        a: *a,
                    },
                })
            }
        }
    }

    fn from_runs(source: BitString, profile: RunProfile, fractions: Vec<f64>) -> Self {
        let spans = profile
            .run_ranges()
            .into_iter()
            .map(|r| PatternSpan {
                offset: r.start,
                period: 1,
                copies: r.len(),
            })
            .collect();
        Self {
            source,
            profile,
            spans,
            shape: Shape::Runs { fractions },
        }
    }

    pub fn n(&self) -> usize {
        self.source.len()
    }

    pub fn run_lengths(&self) -> Vec<u64> {
        self.profile.lengths().iter().map(|&l| l as u64).collect()
    }
}

/// One line of `generate` output.
#[derive(Debug, Serialize)]
pub struct GeneratedRecord {
    pub n: usize,
    pub bits: String,
    pub spans: Vec<SpanRecord>,
}

#[derive(Debug, Serialize)]
pub struct SpanRecord {
    pub offset: usize,
    pub period: usize,
    pub copies: usize,
}

impl From<&Instance> for GeneratedRecord {
    fn from(inst: &Instance) -> Self {
        Self {
            n: inst.n(),
            bits: inst.source.to_string(),
            spans: inst
                .spans
                .iter()
                .map(|s| SpanRecord {
                    offset: s.offset,
                    period: s.period,
                    copies: s.copies,
                })
                .collect(),
        }
    }
}
