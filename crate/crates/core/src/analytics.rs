//! Exact and asymptotic probabilities of the complement events, computed in the
//! natural-log domain so that `T = exp(c n^a)` never has to be materialized.
//!
//! Notation used below, per run `i` of length `r_i` and deletion probability `p`:
//!
//! * `keep_i = 1 - p^{r_i}`: run `i` is not fully deleted;
//! * `p_X = prod_i keep_i`: a trace fully deletes no run;
//! * `w_i = (1-p)^{r_i} / keep_i`: run `i` is intact given that no run is lost.

use crate::bitstring::{tolerant_floor, ClassSpecS};
use crate::channel::check_probability;
use crate::error::{Error, Result};

/// Largest run count accepted by the `2^M`-term inclusion-exclusion sum.
pub const SUBSET_SUM_MAX_RUNS: usize = 20;
/// Largest trace count accepted by the direct binomial sum.
pub const DIRECT_SUM_MAX_TRACES: u64 = 10_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Method {
    ExactClosedForm,
    ExactDirectSum,
    Asymptotic,
    MonteCarlo,
}

impl Method {
    pub fn tag(&self) -> &'static str {
        match self {
            Method::ExactClosedForm => "exact-closed-form",
            Method::ExactDirectSum => "exact-direct-sum",
            Method::Asymptotic => "asymptotic",
            Method::MonteCarlo => "monte-carlo",
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ReportFlags {
    /// The alternating sum lost more than six significant digits.
    pub cancellation: bool,
    /// An asymptotic form evaluated where its derivation does not apply.
    pub outside_validity: bool,
    /// An approximation exceeded 1 and was clamped.
    pub clamped: bool,
}

/// A probability in both linear and log form.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProbReport {
    pub value: f64,
    pub ln_value: f64,
    pub method: Method,
    /// 95% interval; present only for Monte Carlo estimates.
    pub ci: Option<(f64, f64)>,
    pub flags: ReportFlags,
}

impl ProbReport {
    pub fn from_ln(ln_value: f64, method: Method) -> Self {
        Self {
            value: ln_value.exp(),
            ln_value,
            method,
            ci: None,
            flags: ReportFlags::default(),
        }
    }

    pub fn monte_carlo(value: f64, ci: (f64, f64)) -> Self {
        Self {
            value,
            ln_value: value.ln(),
            method: Method::MonteCarlo,
            ci: Some(ci),
            flags: ReportFlags::default(),
        }
    }
}

/// Number of traces: an integer, or `exp(c * n^a)` carried through its logarithm.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum AnalyticT {
    Count(u64),
    Exponential { c: f64, a: f64, n: usize },
}

impl AnalyticT {
    pub fn validate(&self) -> Result<()> {
        match *self {
            AnalyticT::Count(0) => Err(Error::InvalidTraceCount("T must be at least 1".into())),
            AnalyticT::Count(_) => Ok(()),
            AnalyticT::Exponential { c, a, .. } => {
                if !(c > 0.0 && c.is_finite()) {
                    Err(Error::InvalidTraceCount(format!("c = {c} must be positive")))
                } else if !(a > 0.0 && a <= 1.0) {
                    Err(Error::InvalidTraceCount(format!("a = {a} must lie in (0, 1]")))
                } else {
                    Ok(())
                }
            }
        }
    }

    pub fn ln_t(&self) -> f64 {
        match *self {
            AnalyticT::Count(t) => (t as f64).ln(),
            AnalyticT::Exponential { c, a, n } => c * (n as f64).powf(a),
        }
    }

    /// The integer trace count, if representable (`exp(c n^a)` is rounded).
    pub fn to_count(&self) -> Option<u64> {
        match *self {
            AnalyticT::Count(t) => Some(t),
            AnalyticT::Exponential { .. } => {
                let ln_t = self.ln_t();
                // below 2^63
                if ln_t < 63.0 * std::f64::consts::LN_2 {
                    Some((ln_t.exp().round() as u64).max(1))
                } else {
                    None
                }
            }
        }
    }
}

/// `ln(1 - e^x)` for `x <= 0`, accurate across the whole range.
pub fn log1mexp(x: f64) -> f64 {
    if x == f64::NEG_INFINITY {
        0.0
    } else if x >= 0.0 {
        f64::NEG_INFINITY
    } else if x > -std::f64::consts::LN_2 {
        (-x.exp_m1()).ln()
    } else {
        (-x.exp()).ln_1p()
    }
}

/// `ln(-ln(1 - e^x))` for `x <= 0`: the log of the per-trace "miss" rate.
fn ln_neg_log1mexp(x: f64) -> f64 {
    if x == f64::NEG_INFINITY {
        f64::NEG_INFINITY
    } else if x < -40.0 {
        // -ln(1 - y) = y (1 + y/2 + ...)
        x + 0.5 * x.exp()
    } else {
        (-log1mexp(x)).ln()
    }
}

/// `T * ln(1 - e^x)`, i.e. the log of `(1 - e^x)^T`.
fn ln_power_of_complement(ln_t: f64, x: f64) -> f64 {
    -(ln_t + ln_neg_log1mexp(x)).exp()
}

/// Stable `ln(sum exp(v))`; `-inf` for an empty or all-`-inf` input.
pub fn log_sum_exp(values: &[f64]) -> f64 {
    let m = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return m;
    }
    if m == f64::INFINITY {
        return m;
    }
    m + values.iter().map(|v| (v - m).exp()).sum::<f64>().ln()
}

/// Neumaier-compensated sum.
#[derive(Default)]
struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn total(&self) -> f64 {
        self.sum + self.carry
    }
}

/// Result of a signed log-sum-exp.
struct SignedLogSum {
    ln_value: f64,
    cancellation: bool,
}

/// `ln(sum_k sign_k e^{ln_k})` for a sum known to be nonnegative.
fn signed_log_sum_exp(terms: &[(f64, f64)]) -> SignedLogSum {
    let m = terms.iter().map(|t| t.1).fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return SignedLogSum {
            ln_value: f64::NEG_INFINITY,
            cancellation: false,
        };
    }
    let mut acc = CompensatedSum::default();
    let mut magnitude = 0.0;
    for &(sign, ln) in terms {
        let x = (ln - m).exp();
        magnitude += x;
        acc.add(sign * x);
    }
    let total = acc.total();
    // crude forward-error bound of the summation, relative to the result
    let err = terms.len() as f64 * f64::EPSILON * magnitude;
    if total <= 0.0 {
        return SignedLogSum {
            ln_value: f64::NEG_INFINITY,
            cancellation: true,
        };
    }
    SignedLogSum {
        ln_value: m + total.ln(),
        cancellation: err > 1e-6 * total,
    }
}

/// `ell * ln(1 / (1 - p^r))`, in nats.
pub fn c_star(r: usize, ell: f64, p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::DegenerateChannel(p));
    }
    if r == 0 {
        return Err(Error::InvalidParameter("r must be at least 1".into()));
    }
    if !(ell > 0.0 && ell <= 1.0) {
        return Err(Error::InvalidParameter(format!("ell = {ell} must lie in (0, 1]")));
    }
    Ok(-ell * (-p.powi(r as i32)).ln_1p())
}

/// Parameters of a repeated block `A^{ell n^a}` with `|A| = r`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ThresholdParams {
    pub r: usize,
    pub ell: f64,
    pub p: f64,
}

impl ThresholdParams {
    pub fn new(r: usize, ell: f64, p: f64) -> Result<Self> {
        c_star(r, ell, p)?;
        Ok(Self { r, ell, p })
    }

    pub fn c_star(&self) -> f64 {
        c_star(self.r, self.ell, self.p).expect("validated on construction")
    }
}

/// `Pr(no trace keeps every copy)` = `(1 - (1 - p^r)^f)^T`.
pub fn prob_e1bar_exact(r: usize, f: u64, p: f64, t: AnalyticT) -> Result<ProbReport> {
    check_probability(p)?;
    t.validate()?;
    if r == 0 || f == 0 {
        return Err(Error::InvalidParameter("r and f must be at least 1".into()));
    }
    // ln of the chance that one trace deletes no copy
    let ln_clean = f as f64 * log1mexp(r as f64 * p.ln());
    Ok(ProbReport::from_ln(
        ln_power_of_complement(t.ln_t(), ln_clean),
        Method::ExactClosedForm,
    ))
}

struct RunTerms {
    ln_px: f64,
    ln_w: Vec<f64>,
}

fn run_terms(run_lengths: &[u64], p: f64) -> RunTerms {
    let ln_p = p.ln();
    let ln_q = (-p).ln_1p();
    let ln_keep: Vec<f64> = run_lengths.iter().map(|&r| log1mexp(r as f64 * ln_p)).collect();
    let ln_w = run_lengths
        .iter()
        .zip(&ln_keep)
        .map(|(&r, lk)| r as f64 * ln_q - lk)
        .collect();
    RunTerms {
        ln_px: ln_keep.iter().sum(),
        ln_w,
    }
}

fn check_runs(run_lengths: &[u64], max_runs: usize) -> Result<()> {
    if run_lengths.is_empty() {
        return Err(Error::InvalidParameter("need at least one run".into()));
    }
    if run_lengths.len() > max_runs {
        return Err(Error::TooManyRuns {
            m: run_lengths.len(),
            cap: max_runs,
        });
    }
    if run_lengths.contains(&0) {
        return Err(Error::InvalidParameter("run lengths must be positive".into()));
    }
    Ok(())
}

/// `Pr(not E2)` through the binomial moment-generating function:
///
/// `sum_{K != {}} (-1)^{|K|+1} (1 - p_X + p_X prod_{i in K} (1 - w_i))^T`.
pub fn prob_e2bar_exact_mgf(run_lengths: &[u64], p: f64, t: AnalyticT) -> Result<ProbReport> {
    check_runs(run_lengths, SUBSET_SUM_MAX_RUNS)?;
    check_probability(p)?;
    t.validate()?;
    if p == 0.0 {
        return Ok(ProbReport::from_ln(f64::NEG_INFINITY, Method::ExactClosedForm));
    }
    if p == 1.0 {
        return Ok(ProbReport::from_ln(0.0, Method::ExactClosedForm));
    }
    let RunTerms { ln_px, ln_w } = run_terms(run_lengths, p);
    let ln_t = t.ln_t();
    let m = run_lengths.len();
    let ln_1mw: Vec<f64> = ln_w.iter().map(|&lw| log1mexp(lw)).collect();

    // per subset, built from the subset without its lowest member:
    //   sum_{i in K} ln(1 - w_i)  and  ln sum_{i in K} w_i, max_{i in K} ln w_i
    let size = 1usize << m;
    let mut sum_ln_1mw = vec![0.0f64; size];
    let mut lse_w = vec![f64::NEG_INFINITY; size];
    let mut max_ln_w = vec![f64::NEG_INFINITY; size];
    let mut terms = Vec::with_capacity(size - 1);
    for k in 1..size {
        let low = k.trailing_zeros() as usize;
        let rest = k & (k - 1);
        sum_ln_1mw[k] = sum_ln_1mw[rest] + ln_1mw[low];
        lse_w[k] = log_sum_exp(&[lse_w[rest], ln_w[low]]);
        max_ln_w[k] = max_ln_w[rest].max(ln_w[low]);
        // ln(1 - prod_{i in K}(1 - w_i))
        let ln_u = if max_ln_w[k] < -40.0 {
            lse_w[k]
        } else {
            log1mexp(sum_ln_1mw[k])
        };
        let sign = if k.count_ones() % 2 == 1 { 1.0 } else { -1.0 };
        terms.push((sign, ln_power_of_complement(ln_t, ln_px + ln_u)));
    }
    let sum = signed_log_sum_exp(&terms);
    let mut report = ProbReport::from_ln(sum.ln_value.min(0.0), Method::ExactClosedForm);
    report.flags.cancellation = sum.cancellation;
    Ok(report)
}

/// `Pr(not E2)` by summing over the number `j` of traces that lose no run:
///
/// `sum_j C(T,j) p_X^j (1-p_X)^{T-j} (1 - prod_i (1 - (1 - w_i)^j))`.
pub fn prob_e2bar_exact_sum(run_lengths: &[u64], p: f64, t: u64) -> Result<ProbReport> {
    check_runs(run_lengths, usize::MAX)?;
    check_probability(p)?;
    if t == 0 {
        return Err(Error::InvalidTraceCount("T must be at least 1".into()));
    }
    if t > DIRECT_SUM_MAX_TRACES {
        return Err(Error::TraceCountCap {
            t,
            cap: DIRECT_SUM_MAX_TRACES,
        });
    }
    if p == 0.0 {
        return Ok(ProbReport::from_ln(f64::NEG_INFINITY, Method::ExactDirectSum));
    }
    if p == 1.0 {
        return Ok(ProbReport::from_ln(0.0, Method::ExactDirectSum));
    }
    let RunTerms { ln_px, ln_w } = run_terms(run_lengths, p);
    let ln_1mpx = log1mexp(ln_px);
    let ln_1mw: Vec<f64> = ln_w.iter().map(|&lw| log1mexp(lw)).collect();
    let xlog = |k: u64, ln: f64| if k == 0 { 0.0 } else { k as f64 * ln };

    let mut ln_choose = 0.0f64;
    let mut terms = Vec::with_capacity(t as usize + 1);
    for j in 0..=t {
        if j > 0 {
            ln_choose += ((t - j + 1) as f64).ln() - (j as f64).ln();
        }
        let ln_weight = ln_choose + xlog(j, ln_px) + xlog(t - j, ln_1mpx);
        // ln(1 - prod_i (1 - y_i)) with y_i = (1 - w_i)^j
        let ln_prod: f64 = ln_1mw.iter().map(|&l| log1mexp(xlog(j, l))).sum();
        terms.push(ln_weight + log1mexp(ln_prod));
    }
    Ok(ProbReport::from_ln(log_sum_exp(&terms).min(0.0), Method::ExactDirectSum))
}

/// `exp(-T^{q ln(1 - p^r) + 1})` with `q = ell / c`.
pub fn prob_e1bar_asymptotic(params: &ThresholdParams, c: f64, t: AnalyticT) -> Result<ProbReport> {
    t.validate()?;
    if c.is_nan() || c <= 0.0 {
        return Err(Error::InvalidParameter(format!("c = {c} must be positive")));
    }
    let q = params.ell / c;
    let exponent = q * (-params.p.powi(params.r as i32)).ln_1p() + 1.0;
    Ok(ProbReport::from_ln(-(exponent * t.ln_t()).exp(), Method::Asymptotic))
}

/// Singleton-dominant form for run-structured strings:
///
/// `N exp(-prod_k (1 - T^{q_k ln p}) T^{q* ln(1-p) + 1} / (1 - T^{q* ln p}))`,
/// `q_k = ell_k / c`, `q*` for the largest fraction and `N` its multiplicity.
pub fn prob_e2bar_asymptotic(fractions: &[f64], p: f64, c: f64, t: AnalyticT) -> Result<ProbReport> {
    let spec = ClassSpecS::new(false, fractions.to_vec())?;
    let c_crit = c_star(1, spec.ell_star(), p)?;
    t.validate()?;
    if c.is_nan() || c <= 0.0 {
        return Err(Error::InvalidParameter(format!("c = {c} must be positive")));
    }
    let ln_t = t.ln_t();
    let ln_p = p.ln();
    let q_star = spec.ell_star() / c;
    let ln_prod: f64 = fractions.iter().map(|&l| log1mexp(l / c * ln_p * ln_t)).sum();
    let ln_ratio = (q_star * (-p).ln_1p() + 1.0) * ln_t - log1mexp(q_star * ln_p * ln_t);
    let ln_value = (spec.multiplicity() as f64).ln() - (ln_prod + ln_ratio).exp();
    let mut report = ProbReport::from_ln(ln_value.min(0.0), Method::Asymptotic);
    report.flags.clamped = ln_value > 0.0;
    report.flags.outside_validity = c <= c_crit;
    Ok(report)
}

/// `ln Pr(not E2) / ln Pr(not E1 on the longest run)`, both exact, for the
/// run-structured string with the given fractions at length `n` and `T = exp(c n)`.
pub fn log_ratio_diagnostic(fractions: &[f64], p: f64, c: f64, n: usize) -> Result<f64> {
    let spec = ClassSpecS::new(false, fractions.to_vec())?;
    let c_crit = c_star(1, spec.ell_star(), p)?;
    if c <= c_crit {
        return Err(Error::InvalidParameter(format!(
            "c = {c} must exceed the threshold {c_crit}"
        )));
    }
    let lengths: Vec<u64> = spec.run_lengths(n)?.into_iter().map(|l| l as u64).collect();
    let t = AnalyticT::Exponential { c, a: 1.0, n };
    let e2 = prob_e2bar_exact_mgf(&lengths, p, t)?;
    let e1 = prob_e1bar_exact(1, lengths[spec.argmax()], p, t)?;
    for (name, ln) in [("Pr(not E2)", e2.ln_value), ("Pr(not E1)", e1.ln_value)] {
        if ln == 0.0 || !ln.is_finite() {
            return Err(Error::RatioUndefined(format!("ln {name} = {ln}")));
        }
    }
    Ok(e2.ln_value / e1.ln_value)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PolynomialTRow {
    pub m: usize,
    pub copies: u64,
    pub traces: u64,
    pub report: ProbReport,
}

/// Exact `Pr(not E1)` for a block of `floor(ell m)` copies with `T = ceil(c m^b)`.
pub fn polynomial_t_limit_check(
    r: usize,
    ell: f64,
    p: f64,
    c: f64,
    b: f64,
    m_grid: &[usize],
) -> Result<Vec<PolynomialTRow>> {
    if !(c > 0.0 && b > 0.0) {
        return Err(Error::InvalidParameter("c and b must be positive".into()));
    }
    m_grid
        .iter()
        .map(|&m| {
            let copies = tolerant_floor(ell * m as f64) as u64;
            let traces = (c * (m as f64).powf(b)).ceil().max(1.0) as u64;
            let report = prob_e1bar_exact(r, copies, p, AnalyticT::Count(traces))?;
            Ok(PolynomialTRow {
                m,
                copies,
                traces,
                report,
            })
        })
        .collect()
}
