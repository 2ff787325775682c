//! Exact, asymptotic and threshold-sweep evaluation of the complement events.

use tracerec_core::analytics::{DIRECT_SUM_MAX_TRACES, SUBSET_SUM_MAX_RUNS};
use tracerec_core::{
    c_star, prob_e1bar_asymptotic, prob_e1bar_exact, prob_e2bar_asymptotic, prob_e2bar_exact_mgf,
    prob_e2bar_exact_sum, AnalyticT, ClassSpecS, ProbReport, ThresholdParams,
};

use crate::config::{ExperimentConfig, TraceSchedule};
use crate::error::{HarnessError, Result};
use crate::instance::{Instance, Shape};
use crate::output::{EstimateRow, TraceColumn};

fn schedule_at(schedule: TraceSchedule, n: usize) -> (AnalyticT, TraceColumn) {
    match schedule {
        TraceSchedule::Count(t) => (AnalyticT::Count(t), TraceColumn::Count(t)),
        TraceSchedule::Exponential { c, a } => (AnalyticT::Exponential { c, a, n }, TraceColumn::Exponent { c, a }),
    }
}

fn require_traces(config: &ExperimentConfig) -> Result<TraceSchedule> {
    config
        .traces
        .ok_or_else(|| HarnessError::Config("traces is required".into()))
}

fn row(name: String, n: usize, config: &ExperimentConfig, col: TraceColumn, report: &ProbReport) -> EstimateRow {
    let mut r = EstimateRow::analytic(name, n, config.p, col, report);
    for (flag, tag) in [
        (report.flags.cancellation, "cancellation"),
        (report.flags.outside_validity, "outside-validity"),
        (report.flags.clamped, "clamped"),
    ] {
        if flag {
            r.method.push(';');
            r.method.push_str(tag);
        }
    }
    r
}

/// Exact `Pr(not E2)`, choosing the evaluation route by run count and `T`.
fn e2bar_exact(inst: &Instance, p: f64, t: AnalyticT) -> Result<(String, ProbReport)> {
    let lengths = inst.run_lengths();
    if lengths.len() <= SUBSET_SUM_MAX_RUNS {
        return Ok(("E2bar_exact".into(), prob_e2bar_exact_mgf(&lengths, p, t)?));
    }
    if let Some(count) = t.to_count().filter(|&c| c <= DIRECT_SUM_MAX_TRACES) {
        return Ok(("E2bar_exact".into(), prob_e2bar_exact_sum(&lengths, p, count)?));
    }
    match (&inst.shape, t) {
        (Shape::Runs { fractions }, AnalyticT::Exponential { c, a: 1.0, .. }) => {
            eprintln!(
                "warning: M = {} runs exceeds {SUBSET_SUM_MAX_RUNS}; using the singleton-dominant asymptotic form",
                lengths.len()
            );
            Ok(("E2bar_asympt".into(), prob_e2bar_asymptotic(fractions, p, c, t)?))
        }
        _ => Err(HarnessError::Infeasible(format!(
            "M = {} runs exceeds {SUBSET_SUM_MAX_RUNS} and T is too large for the direct sum",
            lengths.len()
        ))),
    }
}

/// Exact `Pr(not E1)` per declared span and exact `Pr(not E2)`.
pub fn run_exact(config: &ExperimentConfig) -> Result<Vec<EstimateRow>> {
    let schedule = require_traces(config)?;
    let mut rows = Vec::new();
    for n in config.n_values()? {
        let inst = Instance::build(&config.string, n)?;
        let (t, col) = schedule_at(schedule, n);
        for (k, span) in inst.spans.iter().enumerate() {
            let r = prob_e1bar_exact(span.period, span.copies as u64, config.p, t)?;
            rows.push(row(format!("E1bar_exact[{k}]"), n, config, col, &r));
        }
        let (name, r) = e2bar_exact(&inst, config.p, t)?;
        rows.push(row(name, n, config, col, &r));
    }
    Ok(rows)
}

fn exponential(config: &ExperimentConfig) -> Result<(f64, f64)> {
    match require_traces(config)? {
        TraceSchedule::Exponential { c, a } => Ok((c, a)),
        TraceSchedule::Count(_) => Err(HarnessError::Config(
            "this mode needs an exponential trace schedule {\"c\": .., \"a\": ..}".into(),
        )),
    }
}

fn check_exponent(shape: &Shape, a: f64) -> Result<()> {
    let expected = match shape {
        Shape::Block { a, .. } => *a,
        Shape::Runs { .. } => 1.0,
    };
    if (a - expected).abs() > 1e-12 {
        return Err(HarnessError::Config(format!(
            "trace exponent a = {a} must match the block exponent {expected}"
        )));
    }
    Ok(())
}

/// Asymptotic forms under `T = exp(c n^a)`.
pub fn run_asymptotic(config: &ExperimentConfig) -> Result<Vec<EstimateRow>> {
    let (c, a) = exponential(config)?;
    let mut rows = Vec::new();
    for n in config.n_values()? {
        let inst = Instance::build(&config.string, n)?;
        check_exponent(&inst.shape, a)?;
        let (t, col) = schedule_at(TraceSchedule::Exponential { c, a }, n);
        match &inst.shape {
            Shape::Block { period, ell, .. } => {
                let params = ThresholdParams::new(*period, *ell, config.p)?;
                let r = prob_e1bar_asymptotic(&params, c, t)?;
                rows.push(row("E1bar_asympt[0]".into(), n, config, col, &r));
            }
            Shape::Runs { fractions } => {
                for (k, &ell) in fractions.iter().enumerate() {
                    let params = ThresholdParams::new(1, ell, config.p)?;
                    let r = prob_e1bar_asymptotic(&params, c, t)?;
                    rows.push(row(format!("E1bar_asympt[{k}]"), n, config, col, &r));
                }
                let r = prob_e2bar_asymptotic(fractions, config.p, c, t)?;
                rows.push(row("E2bar_asympt".into(), n, config, col, &r));
            }
        }
    }
    Ok(rows)
}

/// Position of `c` relative to the threshold.
pub fn regime(c: f64, c_star: f64) -> &'static str {
    if (c / c_star - 1.0).abs() <= 1e-9 {
        "at"
    } else if c < c_star {
        "below"
    } else {
        "above"
    }
}

/// Exact and asymptotic values over a `(c, n)` grid, labelled by regime.
///
/// For run-structured sources the block is the longest run.
pub fn sweep_threshold(config: &ExperimentConfig) -> Result<Vec<EstimateRow>> {
    let (c0, a) = exponential(config)?;
    let n_values = config.n_values()?;
    let first = Instance::build(&config.string, n_values[0])?;
    check_exponent(&first.shape, a)?;
    let (params, runs) = match &first.shape {
        Shape::Block { period, ell, .. } => (ThresholdParams::new(*period, *ell, config.p)?, None),
        Shape::Runs { fractions } => {
            let class = ClassSpecS::new(false, fractions.clone())?;
            (ThresholdParams::new(1, class.ell_star(), config.p)?, Some(class.argmax()))
        }
    };
    let cs = c_star(params.r, params.ell, params.p)?;
    let c_values: Vec<f64> = match (&config.c_grid, &config.c_factors) {
        (Some(g), _) => g.clone(),
        (_, Some(f)) => f.iter().map(|x| x * cs).collect(),
        _ => vec![c0],
    };
    let mut rows = Vec::new();
    for &c in &c_values {
        let tag = regime(c, cs);
        for &n in &n_values {
            let inst = Instance::build(&config.string, n)?;
            let (t, col) = schedule_at(TraceSchedule::Exponential { c, a }, n);
            let copies = match runs {
                Some(i) => inst.profile.lengths()[i] as u64,
                None => inst.spans[0].copies as u64,
            };
            let exact = prob_e1bar_exact(params.r, copies, config.p, t)?;
            rows.push(row(format!("E1bar_exact:{tag}"), n, config, col, &exact));
            let asym = prob_e1bar_asymptotic(&params, c, t)?;
            rows.push(row(format!("E1bar_asympt:{tag}"), n, config, col, &asym));
            if let Shape::Runs { fractions } = &inst.shape {
                let (name, r) = e2bar_exact(&inst, config.p, t)?;
                rows.push(row(format!("{name}:{tag}"), n, config, col, &r));
                let r = prob_e2bar_asymptotic(fractions, config.p, c, t)?;
                rows.push(row(format!("E2bar_asympt:{tag}"), n, config, col, &r));
            }
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::E;

    fn config(json: &str) -> ExperimentConfig {
        ExperimentConfig::from_json(json).unwrap()
    }

    #[test]
    fn sweep_regimes() {
        let c = config(
            r#"{"string":{"kind":"q","pattern":"0","ell":1.0,"a":1.0},"p":0.5,"traces":{"c":1.0},
                "n_grid":[100,200],"c_factors":[0.9,1.0,1.1]}"#,
        );
        let rows = sweep_threshold(&c).unwrap();
        let get = |name: &str, n: usize| rows.iter().find(|r| r.estimator == name && r.n == n).unwrap().value;
        assert!((get("E1bar_exact:at", 200) - 1.0 / E).abs() < 1e-3);
        assert!(get("E1bar_exact:below", 200) >= 0.99);
        assert!(get("E1bar_exact:above", 200) <= 1e-3);
        assert!(rows.iter().all(|r| matches!(r.traces, TraceColumn::Exponent { .. })));
    }

    #[test]
    fn sweep_includes_e2_for_run_sources() {
        let c = config(
            r#"{"string":{"kind":"s","fractions":[0.25,0.5,0.25]},"p":0.25,"traces":{"c":0.2},"n_grid":[40,80]}"#,
        );
        let rows = sweep_threshold(&c).unwrap();
        assert_eq!(rows.len(), 8);
        assert!(rows.iter().any(|r| r.estimator.starts_with("E2bar_exact:")));
    }

    #[test]
    fn exact_rows_for_literal() {
        let c = config(r#"{"string":{"kind":"bits","bits":"01"},"p":0.5,"traces":1}"#);
        let rows = run_exact(&c).unwrap();
        let e2 = rows.iter().find(|r| r.estimator == "E2bar_exact").unwrap();
        assert!((e2.value - 0.75).abs() < 1e-15);
        assert_eq!(rows.len(), 3);
    }

    #[test]
    fn asymptotic_needs_exponential_schedule() {
        let c = config(r#"{"string":{"kind":"bits","bits":"0011"},"p":0.5,"traces":4}"#);
        assert!(matches!(run_asymptotic(&c), Err(HarnessError::Config(_))));
        let c = config(r#"{"string":{"kind":"s","fractions":[0.5,0.5]},"n":40,"p":0.5,"traces":{"c":0.2,"a":0.5}}"#);
        assert!(matches!(run_asymptotic(&c), Err(HarnessError::Config(_))));
    }

    #[test]
    fn many_runs_fall_back() {
        let c = config(r#"{"string":{"kind":"s","fractions":[0.04,0.04,0.04,0.04,0.04,0.04,0.04,0.04,0.04,0.04,0.04,0.04,0.04,0.04,0.04,0.04,0.04,0.04,0.04,0.04,0.04,0.04,0.04,0.04,0.04]},"n":100,"p":0.2,"traces":{"c":0.5}}"#);
        let rows = run_exact(&c).unwrap();
        assert!(rows.iter().any(|r| r.estimator == "E2bar_asympt"));
        let c = config(r#"{"string":{"kind":"s","fractions":[0.04,0.04,0.04,0.04,0.04,0.04,0.04,0.04,0.04,0.04,0.04,0.04,0.04,0.04,0.04,0.04,0.04,0.04,0.04,0.04,0.04,0.04,0.04,0.04,0.04]},"n":100,"p":0.2,"traces":50}"#);
        assert!(run_exact(&c).unwrap().iter().any(|r| r.estimator == "E2bar_exact"));
    }
}
