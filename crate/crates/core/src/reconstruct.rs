//! Maximal Runs reconstruction and the brute-force Levenshtein sufficiency oracle.

use std::borrow::Borrow;

use rayon::prelude::*;

use crate::bitstring::{is_subsequence, BitString};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FailureReason {
    EmptyTraceSet,
    /// Traces with the maximal run count disagree on their first bit.
    FirstBitMismatch,
    /// The assembled runs do not add up to `n` bits.
    LengthMismatch { assembled: usize, expected: usize },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Reconstruction {
    Success(BitString),
    Failure(FailureReason),
}

impl Reconstruction {
    pub fn is_success_for(&self, s: &BitString) -> bool {
        matches!(self, Reconstruction::Success(x) if x == s)
    }
}

/// Maximal Runs: keep the traces with the most runs, require them to agree on the
/// first bit, and take the longest observed `i`-th run for every `i`.
///
/// Runs in `O(n T)`; run counts are computed a word at a time.
pub fn maximal_runs<T: Borrow<BitString>>(n: usize, traces: &[T]) -> Reconstruction {
    if traces.is_empty() {
        return Reconstruction::Failure(FailureReason::EmptyTraceSet);
    }
    let counts: Vec<usize> = traces.iter().map(|t| t.borrow().run_count()).collect();
    let max_runs = counts.iter().copied().max().unwrap_or(0);
    if max_runs == 0 {
        // every trace is empty
        return if n == 0 {
            Reconstruction::Success(BitString::new())
        } else {
            Reconstruction::Failure(FailureReason::LengthMismatch {
                assembled: 0,
                expected: n,
            })
        };
    }

    let mut first_bit = None;
    let mut longest = vec![0usize; max_runs];
    for (t, _) in traces.iter().zip(&counts).filter(|(_, &c)| c == max_runs) {
        let t = t.borrow();
        let b = t.get(0);
        match first_bit {
            None => first_bit = Some(b),
            Some(f) if f != b => return Reconstruction::Failure(FailureReason::FirstBitMismatch),
            Some(_) => {}
        }
        for (best, len) in longest.iter_mut().zip(t.run_lengths()) {
            *best = (*best).max(len);
        }
    }

    let assembled: usize = longest.iter().sum();
    if assembled != n {
        return Reconstruction::Failure(FailureReason::LengthMismatch {
            assembled,
            expected: n,
        });
    }
    let first = first_bit.expect("at least one trace has the maximal run count");
    let mut out = BitString::with_capacity(n);
    for (i, &len) in longest.iter().enumerate() {
        out.push_run(first ^ (i % 2 == 1), len);
    }
    Reconstruction::Success(out)
}

/// Number of consistent sources found by the oracle.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ConsistentCount {
    Exactly(usize),
    /// The scan stopped early after finding this many.
    AtLeast(usize),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SufficiencyVerdict {
    pub consistent_count: ConsistentCount,
    pub sufficient: bool,
    /// Another length-`n` source consistent with every trace, when one exists.
    pub witness: Option<BitString>,
}

/// Hard ceiling: candidates are enumerated as `u32` values.
pub const ORACLE_HARD_MAX: usize = 30;
pub const DEFAULT_ORACLE_CAP: usize = 20;

/// A trace packed MSB-first, for the candidate scan.
#[derive(Clone, Copy)]
struct SmallTrace {
    bits: u32,
    len: u32,
}

impl SmallTrace {
    fn new(t: &BitString) -> Self {
        Self {
            bits: t.to_u64().expect("trace no longer than the oracle cap") as u32,
            len: t.len() as u32,
        }
    }

    /// Greedy embedding of this trace into the `n`-bit candidate `x`.
    #[inline]
    fn embeds_in(&self, x: u32, n: u32) -> bool {
        let mut need = self.len;
        let mut i = n;
        while need > 0 {
            if i < need {
                return false;
            }
            let want = (self.bits >> (need - 1)) & 1;
            i -= 1;
            if (x >> i) & 1 == want {
                need -= 1;
            }
        }
        true
    }
}

struct Scan {
    n: u32,
    traces: Vec<SmallTrace>,
    min_ones: u32,
    max_ones: u32,
}

impl Scan {
    fn new<T: Borrow<BitString>>(n: usize, traces: &[T]) -> Result<Self> {
        let mut min_ones = 0usize;
        let mut min_zeros = 0usize;
        for t in traces {
            let t = t.borrow();
            if t.len() > n {
                return Err(Error::LengthMismatch {
                    expected: n,
                    got: t.len(),
                });
            }
            min_ones = min_ones.max(t.count_ones());
            min_zeros = min_zeros.max(t.count_zeros());
        }
        // longest traces first: they reject candidates soonest
        let mut small: Vec<SmallTrace> = traces.iter().map(|t| SmallTrace::new(t.borrow())).collect();
        small.sort_by_key(|t| std::cmp::Reverse(t.len));
        Ok(Self {
            n: n as u32,
            traces: small,
            min_ones: min_ones as u32,
            max_ones: (n - min_zeros.min(n)) as u32,
        })
    }

    #[inline]
    fn accepts(&self, x: u32) -> bool {
        let ones = x.count_ones();
        ones >= self.min_ones
            && ones <= self.max_ones
            && self.traces.iter().all(|t| t.embeds_in(x, self.n))
    }

    fn candidates(&self) -> std::ops::Range<u64> {
        0..1u64 << self.n
    }
}

/// Exhaustive search over `{0,1}^n` for sources consistent with a trace set.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SufficiencyOracle {
    cap: usize,
}

impl Default for SufficiencyOracle {
    fn default() -> Self {
        Self {
            cap: DEFAULT_ORACLE_CAP,
        }
    }
}

impl SufficiencyOracle {
    pub fn with_cap(cap: usize) -> Result<Self> {
        if cap > ORACLE_HARD_MAX {
            return Err(Error::OracleCap {
                n: cap,
                cap: ORACLE_HARD_MAX,
            });
        }
        Ok(Self { cap })
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    fn check_cap(&self, n: usize) -> Result<()> {
        if n > self.cap {
            Err(Error::OracleCap { n, cap: self.cap })
        } else {
            Ok(())
        }
    }

    /// Every `x` in `{0,1}^n` having each trace as a subsequence, in lexicographic order.
    pub fn consistent_sources<T: Borrow<BitString> + Sync>(
        &self,
        n: usize,
        traces: &[T],
    ) -> Result<Vec<BitString>> {
        self.check_cap(n)?;
        let scan = Scan::new(n, traces)?;
        // numeric order of the MSB-first packing is lexicographic order
        let found: Vec<u64> = scan
            .candidates()
            .into_par_iter()
            .filter(|&x| scan.accepts(x as u32))
            .collect();
        Ok(found.into_iter().map(|x| BitString::from_u64(x, n)).collect())
    }

    pub fn count_consistent<T: Borrow<BitString> + Sync>(&self, n: usize, traces: &[T]) -> Result<usize> {
        self.check_cap(n)?;
        let scan = Scan::new(n, traces)?;
        Ok(scan
            .candidates()
            .into_par_iter()
            .filter(|&x| scan.accepts(x as u32))
            .count())
    }

    /// Decides whether `s` is the only length-`|s|` source consistent with the
    /// traces. Stops at the first competing source (lexicographically smallest).
    pub fn is_sufficient<T: Borrow<BitString>>(
        &self,
        s: &BitString,
        traces: &[T],
    ) -> Result<SufficiencyVerdict> {
        let n = s.len();
        self.check_cap(n)?;
        if let Some(i) = traces.iter().position(|t| !is_subsequence(t.borrow(), s)) {
            return Err(Error::InconsistentTraces(i));
        }
        let scan = Scan::new(n, traces)?;
        let own = s.to_u64().expect("n within cap");
        let witness = scan
            .candidates()
            .find(|&x| x != own && scan.accepts(x as u32));
        Ok(match witness {
            None => SufficiencyVerdict {
                consistent_count: ConsistentCount::Exactly(1),
                sufficient: true,
                witness: None,
            },
            Some(w) => SufficiencyVerdict {
                consistent_count: ConsistentCount::AtLeast(2),
                sufficient: false,
                witness: Some(BitString::from_u64(w, n)),
            },
        })
    }
}

/// [`SufficiencyOracle::consistent_sources`] with the default cap.
pub fn consistent_sources<T: Borrow<BitString> + Sync>(n: usize, traces: &[T]) -> Result<Vec<BitString>> {
    SufficiencyOracle::default().consistent_sources(n, traces)
}

/// [`SufficiencyOracle::is_sufficient`] with the default cap.
pub fn is_levenshtein_sufficient<T: Borrow<BitString>>(
    s: &BitString,
    traces: &[T],
) -> Result<SufficiencyVerdict> {
    SufficiencyOracle::default().is_sufficient(s, traces)
}
