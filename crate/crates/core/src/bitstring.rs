//! Packed binary strings, run decomposition and the two string-class generators.
//!
//! Bits are stored LSB-first in `u64` words: position `i` lives in word `i / 64`
//! at bit `i % 64`. Unused high bits of the last word are always zero so that the
//! derived `Eq`/`Hash` impls compare by content.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

const WORD: usize = 64;

/// A finite binary string. Position 0 is the leftmost symbol.
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct BitString {
    words: Vec<u64>,
    len: usize,
}

impl BitString {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_capacity(bits: usize) -> Self {
        Self {
            words: Vec::with_capacity(bits.div_ceil(WORD)),
            len: 0,
        }
    }

    /// `len` copies of `bit`.
    pub fn filled(bit: bool, len: usize) -> Self {
        let fill = if bit { u64::MAX } else { 0 };
        let mut words = vec![fill; len.div_ceil(WORD)];
        if let Some(last) = words.last_mut() {
            *last &= tail_mask(len);
        }
        Self { words, len }
    }

    pub fn from_bits<I: IntoIterator<Item = bool>>(bits: I) -> Self {
        let mut out = Self::new();
        out.extend(bits);
        out
    }

    /// Builds the `n`-bit string whose leftmost bit is the most significant bit of `value`.
    pub fn from_u64(value: u64, n: usize) -> Self {
        assert!(n <= 64);
        Self::from_bits((0..n).map(|i| (value >> (n - 1 - i)) & 1 == 1))
    }

    /// Inverse of [`BitString::from_u64`]; `None` for strings longer than 64 bits.
    pub fn to_u64(&self) -> Option<u64> {
        if self.len > 64 {
            return None;
        }
        Some(self.iter().fold(0u64, |acc, b| (acc << 1) | b as u64))
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len, "bit index {i} out of range for length {}", self.len);
        (self.words[i / WORD] >> (i % WORD)) & 1 == 1
    }

    pub fn set(&mut self, i: usize, bit: bool) {
        assert!(i < self.len, "bit index {i} out of range for length {}", self.len);
        let w = &mut self.words[i / WORD];
        if bit {
            *w |= 1 << (i % WORD);
        } else {
            *w &= !(1 << (i % WORD));
        }
    }

    #[inline]
    pub fn push(&mut self, bit: bool) {
        if self.len.is_multiple_of(WORD) {
            self.words.push(0);
        }
        if bit {
            self.words[self.len / WORD] |= 1 << (self.len % WORD);
        }
        self.len += 1;
    }

    /// Appends `count` copies of `bit`.
    pub fn push_run(&mut self, bit: bool, count: usize) {
        // fill the partial word bit by bit, then whole words at once
        let mut left = count;
        while left > 0 && !self.len.is_multiple_of(WORD) {
            self.push(bit);
            left -= 1;
        }
        let whole = left / WORD;
        let fill = if bit { u64::MAX } else { 0 };
        self.words.extend(std::iter::repeat_n(fill, whole));
        self.len += whole * WORD;
        for _ in 0..left % WORD {
            self.push(bit);
        }
    }

    pub fn append(&mut self, other: &BitString) {
        for b in other.iter() {
            self.push(b);
        }
    }

    pub fn iter(&self) -> Iter<'_> {
        Iter { s: self, pos: 0 }
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn count_zeros(&self) -> usize {
        self.len - self.count_ones()
    }

    /// Copy of `self[start..end]`.
    pub fn slice(&self, start: usize, end: usize) -> BitString {
        assert!(start <= end && end <= self.len);
        BitString::from_bits((start..end).map(|i| self.get(i)))
    }

    /// `self` repeated `times` times.
    pub fn repeat(&self, times: usize) -> BitString {
        let mut out = BitString::with_capacity(self.len * times);
        for _ in 0..times {
            out.append(self);
        }
        out
    }

    /// Copy with position `i` inverted.
    pub fn with_flipped(&self, i: usize) -> BitString {
        let mut out = self.clone();
        out.set(i, !self.get(i));
        out
    }

    /// Bit `k` of word `w` is set iff positions `64w + k` and `64w + k + 1` differ.
    fn transition_word(&self, w: usize) -> u64 {
        let cur = self.words[w];
        let next = self.words.get(w + 1).copied().unwrap_or(0);
        let diff = cur ^ ((cur >> 1) | (next << 63));
        // only pairs (i, i + 1) with i + 1 < len
        let last_pair = self.len.saturating_sub(1);
        let valid = last_pair.saturating_sub(w * WORD).min(WORD);
        diff & tail_mask_exact(valid)
    }

    /// Number of maximal runs. Zero for the empty string.
    pub fn run_count(&self) -> usize {
        if self.len == 0 {
            return 0;
        }
        let transitions: usize = (0..self.words.len())
            .map(|w| self.transition_word(w).count_ones() as usize)
            .sum();
        transitions + 1
    }

    /// Run lengths in order, computed word-at-a-time. Empty for the empty string.
    pub fn run_lengths(&self) -> Vec<usize> {
        let mut out = Vec::new();
        if self.len == 0 {
            return out;
        }
        let mut run_start = 0usize;
        for w in 0..self.words.len() {
            let mut t = self.transition_word(w);
            while t != 0 {
                let end = w * WORD + t.trailing_zeros() as usize;
                out.push(end + 1 - run_start);
                run_start = end + 1;
                t &= t - 1;
            }
        }
        out.push(self.len - run_start);
        out
    }
}

#[inline]
fn tail_mask(len: usize) -> u64 {
    match len % WORD {
        0 => u64::MAX,
        r => (1u64 << r) - 1,
    }
}

#[inline]
fn tail_mask_exact(bits: usize) -> u64 {
    if bits >= WORD {
        u64::MAX
    } else {
        (1u64 << bits) - 1
    }
}

impl Extend<bool> for BitString {
    fn extend<I: IntoIterator<Item = bool>>(&mut self, iter: I) {
        for b in iter {
            self.push(b);
        }
    }
}

impl FromIterator<bool> for BitString {
    fn from_iter<I: IntoIterator<Item = bool>>(iter: I) -> Self {
        Self::from_bits(iter)
    }
}

pub struct Iter<'a> {
    s: &'a BitString,
    pos: usize,
}

impl Iterator for Iter<'_> {
    type Item = bool;

    #[inline]
    fn next(&mut self) -> Option<bool> {
        if self.pos < self.s.len {
            let b = (self.s.words[self.pos / WORD] >> (self.pos % WORD)) & 1 == 1;
            self.pos += 1;
            Some(b)
        } else {
            None
        }
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let left = self.s.len - self.pos;
        (left, Some(left))
    }
}

impl ExactSizeIterator for Iter<'_> {}

impl<'a> IntoIterator for &'a BitString {
    type Item = bool;
    type IntoIter = Iter<'a>;

    fn into_iter(self) -> Iter<'a> {
        self.iter()
    }
}

impl FromStr for BitString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.chars()
            .enumerate()
            .map(|(i, c)| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::InvalidBitChar { ch: other, index: i }),
            })
            .collect()
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in self.iter() {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitString(\"{self}\")")
    }
}

/// First bit plus ordered run lengths.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RunProfile {
    first_bit: bool,
    lengths: Vec<usize>,
}

impl RunProfile {
    pub fn new(first_bit: bool, lengths: Vec<usize>) -> Result<Self> {
        if lengths.is_empty() {
            return Err(Error::InvalidRunProfile("a run profile needs at least one run".into()));
        }
        if let Some(i) = lengths.iter().position(|&l| l == 0) {
            return Err(Error::InvalidRunProfile(format!("run {i} has length 0")));
        }
        Ok(Self { first_bit, lengths })
    }

    pub fn first_bit(&self) -> bool {
        self.first_bit
    }

    pub fn lengths(&self) -> &[usize] {
        &self.lengths
    }

    pub fn run_count(&self) -> usize {
        self.lengths.len()
    }

    /// Total number of bits.
    pub fn total_len(&self) -> usize {
        self.lengths.iter().sum()
    }

    /// Symbol of run `i` (0-based); runs alternate.
    pub fn bit_of_run(&self, i: usize) -> bool {
        self.first_bit ^ (i % 2 == 1)
    }

    /// Half-open position ranges of every run.
    pub fn run_ranges(&self) -> Vec<std::ops::Range<usize>> {
        let mut start = 0;
        self.lengths
            .iter()
            .map(|&l| {
                let r = start..start + l;
                start += l;
                r
            })
            .collect()
    }
}

pub fn run_decompose(s: &BitString) -> Result<RunProfile> {
    if s.is_empty() {
        return Err(Error::EmptyString);
    }
    Ok(RunProfile {
        first_bit: s.get(0),
        lengths: s.run_lengths(),
    })
}

pub fn run_compose(p: &RunProfile) -> BitString {
    let mut out = BitString::with_capacity(p.total_len());
    for (i, &l) in p.lengths.iter().enumerate() {
        out.push_run(p.bit_of_run(i), l);
    }
    out
}

/// Greedy left-to-right embedding test: is `t` obtainable from `x` by deletions?
pub fn is_subsequence(t: &BitString, x: &BitString) -> bool {
    if t.len() > x.len() {
        return false;
    }
    let mut want = t.iter();
    let mut next = want.next();
    for b in x.iter() {
        match next {
            None => return true,
            Some(w) if w == b => next = want.next(),
            Some(_) => {}
        }
    }
    next.is_none()
}

/// Location of a block `A^copies` inside a host string, with `|A| = period`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PatternSpan {
    pub offset: usize,
    pub period: usize,
    pub copies: usize,
}

impl PatternSpan {
    pub fn new(offset: usize, period: usize, copies: usize) -> Result<Self> {
        if period == 0 || copies == 0 {
            return Err(Error::InvalidSpan("period and copy count must be positive".into()));
        }
        Ok(Self {
            offset,
            period,
            copies,
        })
    }

    pub fn end(&self) -> usize {
        self.offset + self.period * self.copies
    }

    /// Position range of copy `j`.
    pub fn copy_range(&self, j: usize) -> std::ops::Range<usize> {
        let start = self.offset + j * self.period;
        start..start + self.period
    }

    /// Checks that the span fits in `host` and that the covered block really is
    /// its first `period` bits repeated.
    pub fn verify(&self, host: &BitString) -> Result<()> {
        if self.end() > host.len() {
            return Err(Error::InvalidSpan(format!(
                "span ends at {} but the string has length {}",
                self.end(),
                host.len()
            )));
        }
        for i in self.offset + self.period..self.end() {
            if host.get(i) != host.get(i - self.period) {
                return Err(Error::InvalidSpan(format!(
                    "position {i} breaks the period-{} repetition",
                    self.period
                )));
            }
        }
        Ok(())
    }

    /// The repeated unit `A`.
    pub fn unit(&self, host: &BitString) -> BitString {
        host.slice(self.offset, self.offset + self.period)
    }
}

/// `floor(x)` that forgives representation error just below an integer,
/// e.g. `0.3 * 10.0 = 2.9999999999999996`.
pub(crate) fn tolerant_floor(x: f64) -> f64 {
    let r = x.round();
    if (x - r).abs() <= 1e-9 * x.abs().max(1.0) {
        r
    } else {
        x.floor()
    }
}

/// Generator for strings containing `A^{floor(ell * n^a)}`.
///
/// The block is placed at offset 0. The remaining bits alternate, starting with
/// the complement of `A`'s first bit, so the block is never extended by a further
/// copy of `A`.
#[derive(Clone, Debug, PartialEq)]
pub struct ClassSpecQ {
    pub pattern: BitString,
    pub ell: f64,
    pub a: f64,
}

impl ClassSpecQ {
    pub fn new(pattern: BitString, ell: f64, a: f64) -> Result<Self> {
        if pattern.is_empty() {
            return Err(Error::InvalidClassSpec("pattern must be nonempty".into()));
        }
        if !(ell > 0.0 && ell <= 1.0) {
            return Err(Error::InvalidClassSpec(format!("ell = {ell} must lie in (0, 1]")));
        }
        if !(a > 0.0 && a <= 1.0) {
            return Err(Error::InvalidClassSpec(format!("a = {a} must lie in (0, 1]")));
        }
        Ok(Self { pattern, ell, a })
    }

    pub fn period(&self) -> usize {
        self.pattern.len()
    }

    /// `floor(ell * n^a)`.
    pub fn copies_for(&self, n: usize) -> usize {
        tolerant_floor(self.ell * (n as f64).powf(self.a)).max(0.0) as usize
    }

    pub fn instance(&self, n: usize) -> Result<(BitString, PatternSpan)> {
        let f = self.copies_for(n);
        let r = self.period();
        if f == 0 || r * f > n {
            return Err(Error::Infeasible(format!(
                "pattern of length {r} repeated {f} times does not fit in n = {n}"
            )));
        }
        let mut s = self.pattern.repeat(f);
        let mut bit = !self.pattern.get(0);
        while s.len() < n {
            s.push(bit);
            bit = !bit;
        }
        Ok((s, PatternSpan::new(0, r, f)?))
    }
}

/// Generator for strings with exactly `M` runs of lengths about `ell_i * n`.
///
/// Rounding: every run gets `floor(ell_i * n)`, then the leftover bits go one at a
/// time to the runs with the largest fractional parts (ties by index).
#[derive(Clone, Debug, PartialEq)]
pub struct ClassSpecS {
    pub first_bit: bool,
    pub fractions: Vec<f64>,
}

impl ClassSpecS {
    pub fn new(first_bit: bool, fractions: Vec<f64>) -> Result<Self> {
        if fractions.is_empty() {
            return Err(Error::InvalidClassSpec("need at least one run fraction".into()));
        }
        if fractions.iter().any(|&f| !(f > 0.0 && f.is_finite())) {
            return Err(Error::InvalidClassSpec("run fractions must be positive".into()));
        }
        let total: f64 = fractions.iter().sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidClassSpec(format!(
                "run fractions sum to {total}, expected 1"
            )));
        }
        Ok(Self {
            first_bit,
            fractions,
        })
    }

    pub fn run_count(&self) -> usize {
        self.fractions.len()
    }

    /// Largest fraction.
    pub fn ell_star(&self) -> f64 {
        self.fractions.iter().copied().fold(f64::MIN, f64::max)
    }

    /// First index attaining the largest fraction.
    pub fn argmax(&self) -> usize {
        let best = self.ell_star();
        self.fractions.iter().position(|&f| f == best).unwrap_or(0)
    }

    /// Number of runs sharing the largest fraction.
    pub fn multiplicity(&self) -> usize {
        let best = self.ell_star();
        self.fractions.iter().filter(|&&f| f == best).count()
    }

    pub fn run_lengths(&self, n: usize) -> Result<Vec<usize>> {
        let scaled: Vec<f64> = self.fractions.iter().map(|f| f * n as f64).collect();
        let mut lengths: Vec<usize> = scaled.iter().map(|&x| tolerant_floor(x) as usize).collect();
        let assigned: usize = lengths.iter().sum();
        let mut order: Vec<usize> = (0..lengths.len()).collect();
        let frac = |i: usize| scaled[i] - lengths[i] as f64;
        order.sort_by(|&i, &j| frac(j).total_cmp(&frac(i)).then(i.cmp(&j)));
        let leftover = n.saturating_sub(assigned);
        for k in 0..leftover {
            lengths[order[k % order.len()]] += 1;
        }
        if lengths.iter().sum::<usize>() != n {
            return Err(Error::Infeasible(format!(
                "run lengths {lengths:?} do not sum to n = {n}"
            )));
        }
        if lengths.contains(&0) {
            return Err(Error::Infeasible(format!(
                "n = {n} too small for {} runs",
                lengths.len()
            )));
        }
        Ok(lengths)
    }

    pub fn profile(&self, n: usize) -> Result<RunProfile> {
        RunProfile::new(self.first_bit, self.run_lengths(n)?)
    }

    pub fn instance(&self, n: usize) -> Result<BitString> {
        Ok(run_compose(&self.profile(n)?))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn bs(s: &str) -> BitString {
        s.parse().unwrap()
    }

    #[test]
    fn decompose_examples() {
        let p = run_decompose(&bs("010011")).unwrap();
        assert!(!p.first_bit());
        assert_eq!(p.lengths(), &[1, 1, 2, 2]);
        assert_eq!(run_decompose(&bs("0")).unwrap().lengths(), &[1]);
        let p = run_decompose(&bs("1111")).unwrap();
        assert!(p.first_bit());
        assert_eq!(p.lengths(), &[4]);
    }

    #[test]
    fn decompose_empty_is_error() {
        assert!(matches!(run_decompose(&BitString::new()), Err(Error::EmptyString)));
    }

    #[test]
    fn compose_examples() {
        assert_eq!(run_compose(&RunProfile::new(false, vec![1, 1, 2, 2]).unwrap()), bs("010011"));
        assert_eq!(run_compose(&RunProfile::new(true, vec![3]).unwrap()), bs("111"));
        assert_eq!(run_compose(&RunProfile::new(false, vec![2, 2]).unwrap()), bs("0011"));
    }

    #[test]
    fn run_profile_rejects_zero_lengths() {
        assert!(RunProfile::new(false, vec![2, 0, 1]).is_err());
        assert!(RunProfile::new(true, vec![]).is_err());
    }

    #[test]
    fn subsequence_examples() {
        assert!(is_subsequence(&bs(""), &bs("10")));
        assert!(!is_subsequence(&bs("01"), &bs("10")));
        assert!(is_subsequence(&bs("0101"), &bs("00110011")));
    }

    #[test]
    fn parse_rejects_other_chars() {
        assert!(matches!(
            "01x".parse::<BitString>(),
            Err(Error::InvalidBitChar { ch: 'x', index: 2 })
        ));
    }

    #[test]
    fn long_runs_cross_word_boundaries() {
        let mut s = BitString::new();
        s.push_run(true, 70);
        s.push_run(false, 1);
        s.push_run(true, 130);
        assert_eq!(s.len(), 201);
        assert_eq!(s.run_lengths(), vec![70, 1, 130]);
        assert_eq!(s.run_count(), 3);
        assert_eq!(BitString::filled(true, 64).run_lengths(), vec![64]);
        assert_eq!(BitString::filled(false, 128).run_count(), 1);
    }

    #[test]
    fn q_instances() {
        let q = ClassSpecQ::new(bs("0"), 1.0, 1.0).unwrap();
        let (s, span) = q.instance(5).unwrap();
        assert_eq!(s, bs("00000"));
        assert_eq!(span, PatternSpan::new(0, 1, 5).unwrap());

        let q = ClassSpecQ::new(bs("01"), 0.5, 1.0).unwrap();
        let (s, span) = q.instance(8).unwrap();
        assert_eq!(s, bs("01010101"));
        assert_eq!(span, PatternSpan::new(0, 2, 4).unwrap());

        let q = ClassSpecQ::new(bs("0"), 1.0, 0.5).unwrap();
        let (s, span) = q.instance(16).unwrap();
        assert_eq!(span.copies, 4);
        assert_eq!(s, bs("0000101010101010"));
        span.verify(&s).unwrap();
    }

    #[test]
    fn q_filler_does_not_extend_pattern() {
        let q = ClassSpecQ::new(bs("01"), 0.25, 1.0).unwrap();
        let (s, span) = q.instance(12).unwrap();
        assert_eq!(span.copies, 3);
        assert_eq!(s, bs("010101101010"));
        assert_ne!(s.slice(6, 8), bs("01"));
    }

    #[test]
    fn q_infeasible() {
        let q = ClassSpecQ::new(bs("011"), 1.0, 1.0).unwrap();
        assert!(matches!(q.instance(4), Err(Error::Infeasible(_))));
        let q = ClassSpecQ::new(bs("0"), 0.1, 1.0).unwrap();
        assert!(q.instance(5).is_err());
    }

    #[test]
    fn s_instances() {
        let s = ClassSpecS::new(false, vec![0.5, 0.25, 0.25]).unwrap();
        assert_eq!(s.instance(8).unwrap(), bs("00001100"));
        let s = ClassSpecS::new(true, vec![1.0]).unwrap();
        assert_eq!(s.instance(3).unwrap(), bs("111"));
        let s = ClassSpecS::new(false, vec![0.5, 0.5]).unwrap();
        assert_eq!(s.run_lengths(7).unwrap(), vec![4, 3]);
        assert_eq!(s.multiplicity(), 2);
    }

    #[test]
    fn s_rounding_uses_largest_remainder() {
        let s = ClassSpecS::new(false, vec![0.3, 0.4, 0.3]).unwrap();
        assert_eq!(s.run_lengths(10).unwrap(), vec![3, 4, 3]);
        // 3.6, 4.8, 3.6 -> floors 3,4,3; two leftover bits go to index 1 then index 0
        assert_eq!(s.run_lengths(12).unwrap(), vec![4, 5, 3]);
        assert_eq!(s.argmax(), 1);
    }

    #[test]
    fn s_too_short() {
        let s = ClassSpecS::new(false, vec![0.1, 0.8, 0.1]).unwrap();
        assert!(matches!(s.instance(3), Err(Error::Infeasible(_))));
    }

    #[test]
    fn s_rejects_bad_fractions() {
        assert!(ClassSpecS::new(false, vec![0.5, 0.4]).is_err());
        assert!(ClassSpecS::new(false, vec![]).is_err());
        assert!(ClassSpecS::new(false, vec![1.5, -0.5]).is_err());
    }

    #[test]
    fn span_verify_catches_mismatch() {
        let s = bs("0101100");
        PatternSpan::new(0, 2, 2).unwrap().verify(&s).unwrap();
        assert!(PatternSpan::new(0, 2, 3).unwrap().verify(&s).is_err());
        assert!(PatternSpan::new(5, 1, 3).unwrap().verify(&s).is_err());
    }

    fn all_subsequences(x: &BitString) -> std::collections::HashSet<BitString> {
        let n = x.len();
        (0u32..1 << n)
            .map(|keep| BitString::from_bits((0..n).filter(|i| keep >> i & 1 == 1).map(|i| x.get(i))))
            .collect()
    }

    #[test]
    fn greedy_matches_exhaustive_enumeration() {
        for n in 0..=8usize {
            for xv in 0u64..1 << n {
                let x = BitString::from_u64(xv, n);
                let subs = all_subsequences(&x);
                for m in 0..=n {
                    for tv in 0u64..1 << m {
                        let t = BitString::from_u64(tv, m);
                        assert_eq!(is_subsequence(&t, &x), subs.contains(&t), "t={t} x={x}");
                    }
                }
            }
        }
    }

    fn bits(max: usize) -> impl Strategy<Value = BitString> {
        prop::collection::vec(any::<bool>(), 0..max).prop_map(BitString::from_bits)
    }

    proptest! {
        #[test]
        fn round_trip(s in bits(300)) {
            prop_assume!(!s.is_empty());
            let p = run_decompose(&s).unwrap();
            prop_assert_eq!(p.total_len(), s.len());
            prop_assert_eq!(run_compose(&p), s.clone());
            prop_assert_eq!(p.run_count(), s.run_count());
        }

        #[test]
        fn runs_alternate_and_are_maximal(s in bits(200)) {
            prop_assume!(!s.is_empty());
            let p = run_decompose(&s).unwrap();
            for (i, r) in p.run_ranges().into_iter().enumerate() {
                prop_assert!(r.clone().all(|k| s.get(k) == p.bit_of_run(i)));
                if r.end < s.len() {
                    prop_assert_ne!(s.get(r.end), p.bit_of_run(i));
                }
            }
        }

        #[test]
        fn greedy_matches_exhaustive_up_to_12(x in bits(13), t in bits(13)) {
            let subs = all_subsequences(&x);
            prop_assert_eq!(is_subsequence(&t, &x), subs.contains(&t));
        }

        #[test]
        fn q_instances_contain_pattern(pat in bits(4), ell in 0.05f64..=1.0, a in 0.3f64..=1.0, n in 1usize..300) {
            prop_assume!(!pat.is_empty());
            let q = ClassSpecQ::new(pat.clone(), ell, a).unwrap();
            if let Ok((s, span)) = q.instance(n) {
                prop_assert_eq!(s.len(), n);
                prop_assert_eq!(span.copies, q.copies_for(n));
                prop_assert_eq!(s.slice(span.offset, span.end()), pat.repeat(span.copies));
                span.verify(&s).unwrap();
            }
        }

        #[test]
        fn s_instances_have_m_runs(raw in prop::collection::vec(0.05f64..1.0, 1..6), n in 1usize..400, first in any::<bool>()) {
            let total: f64 = raw.iter().sum();
            let fractions: Vec<f64> = raw.iter().map(|x| x / total).collect();
            let spec = ClassSpecS::new(first, fractions.clone()).unwrap();
            if let Ok(s) = spec.instance(n) {
                let p = run_decompose(&s).unwrap();
                prop_assert_eq!(s.len(), n);
                prop_assert_eq!(p.run_count(), fractions.len());
                prop_assert_eq!(p.first_bit(), first);
                for (l, f) in p.lengths().iter().zip(&fractions) {
                    let x = f * n as f64;
                    prop_assert!((*l as f64) >= x.floor() - 1e-9 && (*l as f64) <= x.ceil() + 1e-9);
                }
            }
        }
    }
}
