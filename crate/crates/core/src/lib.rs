//! Instance-based trace reconstruction over the binary deletion channel.

pub mod analytics;
pub mod bitstring;
pub mod channel;
pub mod error;
pub mod events;
pub mod reconstruct;

pub use analytics::{
    c_star, log_ratio_diagnostic, polynomial_t_limit_check, prob_e1bar_asymptotic, prob_e1bar_exact,
    prob_e2bar_asymptotic, prob_e2bar_exact_mgf, prob_e2bar_exact_sum, AnalyticT, Method,
    PolynomialTRow, ProbReport, ReportFlags, ThresholdParams,
};
pub use bitstring::{
    is_subsequence, run_compose, run_decompose, BitString, ClassSpecQ, ClassSpecS, PatternSpan,
    RunProfile,
};
pub use channel::{apply_mask, sample_mask, sample_traces, DeletionMask, MaskedTrace, RngSpec};
pub use error::{Error, Result};
pub use events::{
    detect_nec_violations, evaluate_events, holds_e1, holds_e2, patterns_from_runs, BlockOrder,
    DeclaredPattern, E2Detail, EventReport, NecViolation,
};
pub use reconstruct::{
    consistent_sources, is_levenshtein_sufficient, maximal_runs, ConsistentCount, FailureReason,
    Reconstruction, SufficiencyOracle, SufficiencyVerdict,
};
