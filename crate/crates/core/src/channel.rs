//! The deletion channel `Del_p`, sampled with the deletion mask retained.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bitstring::BitString;
use crate::error::{Error, Result};

/// Per-position deletion flags; `true` means the bit was deleted.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DeletionMask {
    flags: BitString,
}

impl DeletionMask {
    pub fn from_flags(flags: BitString) -> Self {
        Self { flags }
    }

    pub fn keep_all(n: usize) -> Self {
        Self::from_flags(BitString::filled(false, n))
    }

    pub fn delete_all(n: usize) -> Self {
        Self::from_flags(BitString::filled(true, n))
    }

    /// Mask of length `n` deleting exactly `positions`.
    pub fn deleting(n: usize, positions: &[usize]) -> Result<Self> {
        let mut flags = BitString::filled(false, n);
        for &i in positions {
            if i >= n {
                return Err(Error::IndexOutOfRange { index: i, limit: n });
            }
            flags.set(i, true);
        }
        Ok(Self { flags })
    }

    pub fn len(&self) -> usize {
        self.flags.len()
    }

    pub fn is_empty(&self) -> bool {
        self.flags.is_empty()
    }

    #[inline]
    pub fn is_deleted(&self, i: usize) -> bool {
        self.flags.get(i)
    }

    pub fn deleted_count(&self) -> usize {
        self.flags.count_ones()
    }

    /// Whether every position in `range` is deleted.
    pub fn all_deleted(&self, range: std::ops::Range<usize>) -> bool {
        range.into_iter().all(|i| self.flags.get(i))
    }

    /// Whether no position in `range` is deleted.
    pub fn none_deleted(&self, range: std::ops::Range<usize>) -> bool {
        range.into_iter().all(|i| !self.flags.get(i))
    }

    pub fn flags(&self) -> &BitString {
        &self.flags
    }
}

/// A trace together with the channel realization that produced it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MaskedTrace {
    pub trace: BitString,
    pub mask: DeletionMask,
    pub source_length: usize,
}

impl MaskedTrace {
    pub fn new(source: &BitString, mask: DeletionMask) -> Result<Self> {
        let trace = apply_mask(source, &mask)?;
        Ok(Self {
            trace,
            mask,
            source_length: source.len(),
        })
    }

    /// Checks the trace/mask/source consistency invariants.
    pub fn verify(&self, source: &BitString) -> Result<()> {
        if self.mask.len() != self.source_length || source.len() != self.source_length {
            return Err(Error::LengthMismatch {
                expected: self.source_length,
                got: self.mask.len(),
            });
        }
        let expected = self.source_length - self.mask.deleted_count();
        if self.trace.len() != expected {
            return Err(Error::LengthMismatch {
                expected,
                got: self.trace.len(),
            });
        }
        if apply_mask(source, &self.mask)? != self.trace {
            return Err(Error::InconsistentTraces(0));
        }
        Ok(())
    }
}

pub(crate) fn check_probability(p: f64) -> Result<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(Error::InvalidProbability(p))
    }
}

/// Draws an independent Bernoulli(`p`) deletion flag for each of `n` positions.
pub fn sample_mask<R: Rng + ?Sized>(n: usize, p: f64, rng: &mut R) -> Result<DeletionMask> {
    check_probability(p)?;
    let flags = (0..n).map(|_| rng.random_bool(p)).collect();
    Ok(DeletionMask { flags })
}

/// Removes the flagged positions of `s`, preserving order.
pub fn apply_mask(s: &BitString, m: &DeletionMask) -> Result<BitString> {
    if s.len() != m.len() {
        return Err(Error::LengthMismatch {
            expected: s.len(),
            got: m.len(),
        });
    }
    let mut out = BitString::with_capacity(s.len() - m.deleted_count());
    for (bit, deleted) in s.iter().zip(m.flags.iter()) {
        if !deleted {
            out.push(bit);
        }
    }
    Ok(out)
}

/// `count` independent channel outputs of `s`.
pub fn sample_traces<R: Rng + ?Sized>(
    s: &BitString,
    p: f64,
    count: usize,
    rng: &mut R,
) -> Result<Vec<MaskedTrace>> {
    check_probability(p)?;
    if count == 0 {
        return Err(Error::EmptyTraceSet);
    }
    (0..count)
        .map(|_| MaskedTrace::new(s, sample_mask(s.len(), p, rng)?))
        .collect()
}

/// Seeding scheme for reproducible, order-independent trials.
///
/// Trial `i` draws from `ChaCha8Rng::seed_from_u64(trial_seed(master, i))` where
/// `trial_seed(master, i) = splitmix64(master ^ splitmix64(i))`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct RngSpec {
    pub master_seed: u64,
}

impl RngSpec {
    pub const ALGORITHM: &'static str = "ChaCha8Rng(seed_from_u64(splitmix64(master ^ splitmix64(trial))))";

    pub fn new(master_seed: u64) -> Self {
        Self { master_seed }
    }

    pub fn trial_seed(&self, trial: u64) -> u64 {
        splitmix64(self.master_seed ^ splitmix64(trial))
    }

    pub fn stream(&self, trial: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.trial_seed(trial))
    }
}

/// SplitMix64 finalizer (Steele, Lea & Flood).
pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bitstring::is_subsequence;
    use proptest::prelude::*;
    use statrs::distribution::{Binomial, ChiSquared, ContinuousCDF, Discrete};

    fn bs(s: &str) -> BitString {
        s.parse().unwrap()
    }

    #[test]
    fn degenerate_masks() {
        let mut rng = RngSpec::new(1).stream(0);
        assert_eq!(sample_mask(4, 0.0, &mut rng).unwrap(), DeletionMask::keep_all(4));
        assert_eq!(sample_mask(4, 1.0, &mut rng).unwrap(), DeletionMask::delete_all(4));
    }

    #[test]
    fn rejects_bad_probability() {
        let mut rng = RngSpec::new(1).stream(0);
        assert!(matches!(sample_mask(3, 1.5, &mut rng), Err(Error::InvalidProbability(_))));
        assert!(sample_mask(3, -0.1, &mut rng).is_err());
        assert!(sample_mask(3, f64::NAN, &mut rng).is_err());
    }

    #[test]
    fn mask_count_is_binomial() {
        let mut rng = RngSpec::new(7).stream(3);
        let m = sample_mask(1000, 0.3, &mut rng).unwrap();
        let sigma = (1000.0f64 * 0.3 * 0.7).sqrt();
        assert!((m.deleted_count() as f64 - 300.0).abs() <= 4.0 * sigma);
    }

    #[test]
    fn apply_mask_examples() {
        let s = bs("0110");
        let m = DeletionMask::deleting(4, &[1, 3]).unwrap();
        assert_eq!(apply_mask(&s, &m).unwrap(), bs("01"));
        assert_eq!(apply_mask(&s, &DeletionMask::keep_all(4)).unwrap(), s);
        assert_eq!(apply_mask(&s, &DeletionMask::delete_all(4)).unwrap(), BitString::new());
        assert!(matches!(
            apply_mask(&s, &DeletionMask::keep_all(3)),
            Err(Error::LengthMismatch { .. })
        ));
    }

    #[test]
    fn sample_traces_examples() {
        let mut rng = RngSpec::new(0).stream(0);
        let s = bs("01");
        let ts = sample_traces(&s, 0.0, 3, &mut rng).unwrap();
        assert_eq!(ts.len(), 3);
        assert!(ts.iter().all(|t| t.trace == s));
        let ts = sample_traces(&s, 1.0, 2, &mut rng).unwrap();
        assert!(ts.iter().all(|t| t.trace.is_empty()));
        assert!(matches!(sample_traces(&s, 0.5, 0, &mut rng), Err(Error::EmptyTraceSet)));
    }

    #[test]
    fn full_survival_frequency() {
        let s = BitString::filled(false, 10);
        let mut rng = RngSpec::new(2024).stream(0);
        let trials = 100_000;
        let hits = sample_traces(&s, 0.5, trials, &mut rng)
            .unwrap()
            .iter()
            .filter(|t| t.trace == s)
            .count();
        let p = 0.5f64.powi(10);
        let sigma = (trials as f64 * p * (1.0 - p)).sqrt();
        assert!((hits as f64 - trials as f64 * p).abs() <= 4.0 * sigma, "hits = {hits}");
    }

    #[test]
    fn streams_are_reproducible() {
        let spec = RngSpec::new(99);
        let s = bs("0011010111");
        let a = sample_traces(&s, 0.4, 5, &mut spec.stream(17)).unwrap();
        let b = sample_traces(&s, 0.4, 5, &mut spec.stream(17)).unwrap();
        assert_eq!(a, b);
        let c = sample_traces(&s, 0.4, 5, &mut spec.stream(18)).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn trace_length_histogram_matches_binomial() {
        let n = 20u64;
        let p = 0.35;
        let trials = 20_000;
        let s = BitString::filled(false, n as usize);
        let mut counts = vec![0u64; n as usize + 1];
        let mut rng = RngSpec::new(5).stream(0);
        for t in sample_traces(&s, p, trials, &mut rng).unwrap() {
            counts[t.trace.len()] += 1;
        }
        let dist = Binomial::new(1.0 - p, n).unwrap();
        // pool adjacent cells until each expected count is at least 5
        let mut stat = 0.0;
        let mut cells = 0;
        let (mut obs, mut exp) = (0.0, 0.0);
        for k in 0..=n {
            obs += counts[k as usize] as f64;
            exp += dist.pmf(k) * trials as f64;
            if exp >= 5.0 {
                stat += (obs - exp) * (obs - exp) / exp;
                cells += 1;
                obs = 0.0;
                exp = 0.0;
            }
        }
        if exp > 0.0 {
            stat += (obs - exp) * (obs - exp) / exp;
            cells += 1;
        }
        let critical = ChiSquared::new((cells - 1) as f64).unwrap().inverse_cdf(0.999);
        assert!(stat < critical, "chi2 = {stat}, critical = {critical}");
    }

    proptest! {
        #[test]
        fn traces_are_subsequences(bits in prop::collection::vec(any::<bool>(), 0..80), p in 0.0f64..=1.0, seed in any::<u64>()) {
            let s = BitString::from_bits(bits);
            let mut rng = RngSpec::new(seed).stream(0);
            for t in sample_traces(&s, p, 4, &mut rng).unwrap() {
                prop_assert!(is_subsequence(&t.trace, &s));
                prop_assert_eq!(t.trace.len(), s.len() - t.mask.deleted_count());
                t.verify(&s).unwrap();
            }
        }
    }
}
