//! Seeded Monte Carlo estimators and the paired implication audit.
//!
//! Every trial draws its trace set from its own stream `RngSpec::stream(i)`, so a
//! trial's outcome depends only on `(seed, i)`. Per-trial outcomes are folded into
//! integer counters, which makes the totals independent of thread scheduling.

use rayon::prelude::*;
use tracerec_core::{
    detect_nec_violations, evaluate_events, is_subsequence, maximal_runs, patterns_from_runs, sample_traces,
    AnalyticT, BitString, DeclaredPattern, RngSpec, SufficiencyOracle,
};

use crate::config::{Estimator, ExperimentConfig, TraceSchedule};
use crate::error::{HarnessError, Result};
use crate::instance::{Instance, Shape};
use crate::output::{EstimateRow, TraceColumn};
use crate::stats::wilson_interval;

/// The three per-sample implications checked by the audit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum BreachKind {
    /// Some block had every trace delete a copy, yet the traces were sufficient.
    BlockLostButSufficient,
    /// E2 held, yet Maximal Runs did not return the source.
    E2ButMaximalRunsFailed,
    /// A constructed alternative source did not explain every trace.
    WitnessRejected,
}

impl BreachKind {
    pub fn name(&self) -> &'static str {
        match self {
            BreachKind::BlockLostButSufficient => "audit_e1bar_and_sufficient",
            BreachKind::E2ButMaximalRunsFailed => "audit_e2_and_mr_failed",
            BreachKind::WitnessRejected => "audit_witness_rejected",
        }
    }
}

pub struct TrialSetup<'a> {
    pub instance: &'a Instance,
    pub p: f64,
    pub traces: usize,
    pub rng: RngSpec,
    /// Run the brute-force sufficiency check.
    pub oracle: Option<SufficiencyOracle>,
    /// Check the constructive witnesses of these declarations.
    pub witnesses: Option<Vec<DeclaredPattern>>,
}

/// Counters over a batch of trials.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Tally {
    pub trials: u64,
    /// Per declared span: trials in which every trace fully deleted some copy.
    pub e1bar: Vec<u64>,
    pub e2bar: u64,
    pub mr_error: u64,
    pub insufficient: u64,
    pub witnesses_checked: u64,
    pub breaches: [u64; 3],
    /// Lowest offending trial index per breach kind.
    pub first_breach: [Option<u64>; 3],
}

impl Tally {
    fn empty(spans: usize) -> Self {
        Self {
            e1bar: vec![0; spans],
            ..Self::default()
        }
    }

    fn merge(mut self, other: Self) -> Self {
        self.trials += other.trials;
        for (a, b) in self.e1bar.iter_mut().zip(other.e1bar) {
            *a += b;
        }
        self.e2bar += other.e2bar;
        self.mr_error += other.mr_error;
        self.insufficient += other.insufficient;
        self.witnesses_checked += other.witnesses_checked;
        for k in 0..3 {
            self.breaches[k] += other.breaches[k];
            self.first_breach[k] = match (self.first_breach[k], other.first_breach[k]) {
                (Some(a), Some(b)) => Some(a.min(b)),
                (a, b) => a.or(b),
            };
        }
        self
    }

    fn breach(&mut self, kind: BreachKind, trial: u64) {
        let k = kind as usize;
        self.breaches[k] += 1;
        self.first_breach[k] = Some(self.first_breach[k].map_or(trial, |t| t.min(trial)));
    }

    pub fn breach_count(&self, kind: BreachKind) -> u64 {
        self.breaches[kind as usize]
    }

    pub fn first_breach(&self, kind: BreachKind) -> Option<u64> {
        self.first_breach[kind as usize]
    }
}

fn run_trial(setup: &TrialSetup<'_>, trial: u64) -> Result<Tally> {
    let inst = setup.instance;
    let s = &inst.source;
    let n = s.len();
    let mut tally = Tally::empty(inst.spans.len());
    tally.trials = 1;

    let traces = sample_traces(s, setup.p, setup.traces, &mut setup.rng.stream(trial))?;
    let events = evaluate_events(&traces, &inst.spans, &inst.profile);
    let plain: Vec<&BitString> = traces.iter().map(|t| &t.trace).collect();

    let mut any_block_lost = false;
    for (count, holds) in tally.e1bar.iter_mut().zip(&events.e1_holds) {
        if !holds {
            *count += 1;
            any_block_lost = true;
        }
    }
    if !events.e2.holds {
        tally.e2bar = 1;
    }
    let mr_failed = !maximal_runs(n, &plain).is_success_for(s);
    if mr_failed {
        tally.mr_error = 1;
        if events.e2.holds {
            tally.breach(BreachKind::E2ButMaximalRunsFailed, trial);
        }
    }
    if let Some(oracle) = &setup.oracle {
        let verdict = oracle.is_sufficient(s, &plain)?;
        if !verdict.sufficient {
            tally.insufficient = 1;
        } else if any_block_lost {
            tally.breach(BreachKind::BlockLostButSufficient, trial);
        }
    }
    if let Some(patterns) = &setup.witnesses {
        for v in detect_nec_violations(s, &traces, patterns)? {
            tally.witnesses_checked += 1;
            let alt = &v.alternative;
            if alt.len() != n || alt == s || !plain.iter().all(|t| is_subsequence(t, alt)) {
                tally.breach(BreachKind::WitnessRejected, trial);
            }
        }
    }
    Ok(tally)
}

/// Runs `trials` independent trials in parallel.
pub fn run_trials(setup: &TrialSetup<'_>, trials: u64) -> Result<Tally> {
    let spans = setup.instance.spans.len();
    (0..trials)
        .into_par_iter()
        .map(|i| run_trial(setup, i))
        .try_reduce(|| Tally::empty(spans), |a, b| Ok(a.merge(b)))
}

/// Integer trace count for sampling; an exponential schedule is rounded.
pub fn integer_traces(config: &ExperimentConfig, n: usize) -> Result<u64> {
    match config.traces {
        Some(TraceSchedule::Count(t)) => Ok(t),
        Some(TraceSchedule::Exponential { c, a }) => AnalyticT::Exponential { c, a, n }
            .to_count()
            .filter(|&t| t <= u32::MAX as u64)
            .ok_or_else(|| HarnessError::Infeasible(format!("T = exp({c} * {n}^{a}) is too large to sample"))),
        None => Err(HarnessError::Config("traces is required".into())),
    }
}

fn oracle_for(config: &ExperimentConfig) -> Result<SufficiencyOracle> {
    Ok(match config.oracle_cap {
        Some(cap) => SufficiencyOracle::with_cap(cap)?,
        None => SufficiencyOracle::default(),
    })
}

/// Patterns whose constructive witnesses the audit verifies.
fn audit_patterns(inst: &Instance) -> Vec<DeclaredPattern> {
    let mut patterns = patterns_from_runs(&inst.profile);
    if let Shape::Block { .. } = inst.shape {
        patterns.extend(inst.spans.iter().map(|&span| DeclaredPattern::Repeat { span }));
    }
    patterns
}

/// One simulated batch at a single `n`.
pub struct Batch {
    pub instance: Instance,
    pub traces: u64,
    pub tally: Tally,
    pub with_oracle: bool,
}

pub fn simulate(config: &ExperimentConfig, n: usize, with_oracle: bool, audit: bool) -> Result<Batch> {
    let instance = Instance::build(&config.string, n)?;
    let traces = integer_traces(config, n)?;
    let oracle = if with_oracle {
        let o = oracle_for(config)?;
        if instance.n() > o.cap() {
            return Err(HarnessError::Infeasible(format!(
                "n = {} exceeds the sufficiency-oracle cap {}",
                instance.n(),
                o.cap()
            )));
        }
        Some(o)
    } else {
        None
    };
    let setup = TrialSetup {
        instance: &instance,
        p: config.p,
        traces: traces as usize,
        rng: RngSpec::new(config.seed),
        oracle,
        witnesses: audit.then(|| audit_patterns(&instance)),
    };
    let tally = run_trials(&setup, config.trials)?;
    Ok(Batch {
        instance,
        traces,
        tally,
        with_oracle,
    })
}

impl Batch {
    fn row(&self, config: &ExperimentConfig, estimator: String, hits: u64, method: &str) -> EstimateRow {
        let trials = self.tally.trials;
        let value = hits as f64 / trials as f64;
        EstimateRow {
            estimator,
            n: self.instance.n(),
            p: config.p,
            traces: TraceColumn::Count(self.traces),
            value,
            ln_value: value.ln(),
            ci: Some(wilson_interval(hits, trials)),
            sampling: Some((trials, config.seed)),
            method: method.to_string(),
        }
    }

    pub fn difficulty_row(&self, config: &ExperimentConfig) -> EstimateRow {
        assert!(self.with_oracle, "difficulty needs the sufficiency oracle");
        self.row(config, "D".into(), self.tally.insufficient, "monte-carlo")
    }

    pub fn event_rows(&self, config: &ExperimentConfig) -> Vec<EstimateRow> {
        let mut rows: Vec<EstimateRow> = self
            .tally
            .e1bar
            .iter()
            .enumerate()
            .map(|(k, &hits)| self.row(config, format!("E1bar[{k}]"), hits, "monte-carlo"))
            .collect();
        rows.push(self.row(config, "E2bar".into(), self.tally.e2bar, "monte-carlo"));
        rows
    }

    pub fn mr_error_row(&self, config: &ExperimentConfig) -> EstimateRow {
        self.row(config, "MR_error".into(), self.tally.mr_error, "monte-carlo")
    }

    pub fn audit_rows(&self, config: &ExperimentConfig) -> Vec<EstimateRow> {
        [
            BreachKind::BlockLostButSufficient,
            BreachKind::E2ButMaximalRunsFailed,
            BreachKind::WitnessRejected,
        ]
        .iter()
        .map(|&k| self.row(config, k.name().into(), self.tally.breach_count(k), "audit"))
        .collect()
    }
}

fn estimators_for(config: &ExperimentConfig, n: usize) -> Result<Vec<Estimator>> {
    match &config.estimators {
        Some(list) => Ok(list.clone()),
        None => {
            let cap = oracle_for(config)?.cap();
            let mut all = vec![Estimator::Events, Estimator::MrError];
            if n <= cap {
                all.insert(0, Estimator::Difficulty);
            }
            Ok(all)
        }
    }
}

/// Every selected estimator, from one shared batch of trials per `n`.
pub fn run_montecarlo(config: &ExperimentConfig) -> Result<Vec<EstimateRow>> {
    let mut rows = Vec::new();
    for n in config.n_values()? {
        let wanted = estimators_for(config, n)?;
        let batch = simulate(config, n, wanted.contains(&Estimator::Difficulty), false)?;
        for e in wanted {
            match e {
                Estimator::Difficulty => rows.push(batch.difficulty_row(config)),
                Estimator::Events => rows.extend(batch.event_rows(config)),
                Estimator::MrError => rows.push(batch.mr_error_row(config)),
            }
        }
    }
    Ok(rows)
}

/// Fraction of trace sets the brute-force oracle judges insufficient.
pub fn estimate_difficulty(config: &ExperimentConfig) -> Result<Vec<EstimateRow>> {
    config
        .n_values()?
        .into_iter()
        .map(|n| Ok(simulate(config, n, true, false)?.difficulty_row(config)))
        .collect()
}

/// Mask-level frequencies of the complement events per declared span, and of E2.
pub fn estimate_event_probs(config: &ExperimentConfig) -> Result<Vec<EstimateRow>> {
    let mut rows = Vec::new();
    for n in config.n_values()? {
        rows.extend(simulate(config, n, false, false)?.event_rows(config));
    }
    Ok(rows)
}

/// Fraction of trials in which Maximal Runs does not return the source.
pub fn estimate_mr_error(config: &ExperimentConfig) -> Result<Vec<EstimateRow>> {
    config
        .n_values()?
        .into_iter()
        .map(|n| Ok(simulate(config, n, false, false)?.mr_error_row(config)))
        .collect()
}

/// A violated implication, located by `n`, trial index and the trial's stream seed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Breach {
    pub kind: BreachKind,
    pub n: usize,
    pub count: u64,
    pub first_trial: u64,
    pub trial_seed: u64,
}

pub struct AuditReport {
    pub rows: Vec<EstimateRow>,
    pub batches: Vec<Batch>,
    pub breaches: Vec<Breach>,
}

impl AuditReport {
    pub fn is_clean(&self) -> bool {
        self.breaches.is_empty()
    }

    pub fn failure(&self, master_seed: u64) -> Option<HarnessError> {
        let first = self.breaches.first()?;
        Some(HarnessError::Audit(format!(
            "{} breach(es) of {} at n = {} (first at trial {}, master seed {}, trial seed {})",
            first.count,
            first.kind.name(),
            first.n,
            first.first_trial,
            master_seed,
            first.trial_seed
        )))
    }
}

/// All estimators plus the per-sample implication checks, on shared trials.
pub fn audit_implications(config: &ExperimentConfig) -> Result<AuditReport> {
    let rng = RngSpec::new(config.seed);
    let mut rows = Vec::new();
    let mut batches = Vec::new();
    let mut breaches = Vec::new();
    for n in config.n_values()? {
        let batch = simulate(config, n, true, true)?;
        rows.push(batch.difficulty_row(config));
        rows.extend(batch.event_rows(config));
        rows.push(batch.mr_error_row(config));
        rows.extend(batch.audit_rows(config));
        for kind in [
            BreachKind::BlockLostButSufficient,
            BreachKind::E2ButMaximalRunsFailed,
            BreachKind::WitnessRejected,
        ] {
            if let Some(first) = batch.tally.first_breach(kind) {
                breaches.push(Breach {
                    kind,
                    n: batch.instance.n(),
                    count: batch.tally.breach_count(kind),
                    first_trial: first,
                    trial_seed: rng.trial_seed(first),
                });
            }
        }
        batches.push(batch);
    }
    Ok(AuditReport {
        rows,
        batches,
        breaches,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(json: &str) -> ExperimentConfig {
        ExperimentConfig::from_json(json).unwrap()
    }

    #[test]
    fn perfect_channel_is_always_sufficient() {
        for bits in ["0", "00", "0110"] {
            let c = config(&format!(r#"{{"string":{{"kind":"bits","bits":"{bits}"}},"p":0.0,"traces":1,"trials":50}}"#));
            let rows = estimate_difficulty(&c).unwrap();
            assert_eq!(rows[0].value, 0.0);
            let ev = estimate_event_probs(&c).unwrap();
            assert!(ev.iter().all(|r| r.value == 0.0));
            assert_eq!(estimate_mr_error(&c).unwrap()[0].value, 0.0);
        }
    }

    #[test]
    fn erasing_channel_loses_everything() {
        let c = config(r#"{"string":{"kind":"bits","bits":"0110"},"p":1.0,"traces":3,"trials":20}"#);
        assert!(estimate_event_probs(&c).unwrap().iter().all(|r| r.value == 1.0));
        assert_eq!(estimate_difficulty(&c).unwrap()[0].value, 1.0);
        let report = audit_implications(&c).unwrap();
        assert!(report.is_clean());
    }

    #[test]
    fn results_do_not_depend_on_thread_count() {
        let c = config(
            r#"{"string":{"kind":"s","fractions":[0.3,0.4,0.3]},"n":12,"p":0.4,"traces":3,"trials":300,"seed":11}"#,
        );
        let single = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let many = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap();
        let a = single.install(|| audit_implications(&c).unwrap().rows);
        let b = many.install(|| audit_implications(&c).unwrap().rows);
        assert_eq!(a, b);
    }

    #[test]
    fn oracle_cap_is_infeasible() {
        let c = config(r#"{"string":{"kind":"s","fractions":[0.5,0.5]},"n":24,"p":0.3,"traces":2,"trials":2}"#);
        assert!(matches!(estimate_difficulty(&c), Err(HarnessError::Infeasible(_))));
        // the default estimator set skips the oracle instead
        let rows = run_montecarlo(&c).unwrap();
        assert!(rows.iter().all(|r| r.estimator != "D"));
    }

    #[test]
    fn difficulty_dominates_block_loss_on_shared_seeds() {
        let c = config(r#"{"string":{"kind":"bits","bits":"00000000"},"p":0.3,"traces":4,"trials":20000,"seed":3}"#);
        let batch = simulate(&c, 8, true, false).unwrap();
        assert!(batch.tally.insufficient >= batch.tally.e1bar[0]);
        assert!(batch.tally.e1bar[0] > 0);
    }
}
