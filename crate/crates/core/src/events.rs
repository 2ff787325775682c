//! Mask-level event detectors: the repeated-block condition (E1), the Maximal Runs
//! sufficient condition (E2), and the three necessary conditions with their
//! constructive alternative sources.

use crate::bitstring::{BitString, PatternSpan, RunProfile};
use crate::channel::{DeletionMask, MaskedTrace};
use crate::error::{Error, Result};

/// Whether every flag of copy `j` of `span` is set in `m`.
pub fn copy_fully_deleted(m: &DeletionMask, span: &PatternSpan, j: usize) -> Result<bool> {
    if j >= span.copies {
        return Err(Error::IndexOutOfRange {
            index: j,
            limit: span.copies,
        });
    }
    if span.end() > m.len() {
        return Err(Error::LengthMismatch {
            expected: span.end(),
            got: m.len(),
        });
    }
    Ok(m.all_deleted(span.copy_range(j)))
}

fn any_copy_deleted(m: &DeletionMask, span: &PatternSpan) -> bool {
    (0..span.copies).any(|j| m.all_deleted(span.copy_range(j)))
}

/// E1 on `span`: some trace fully deletes no copy of the repeated unit.
pub fn holds_e1(traces: &[MaskedTrace], span: &PatternSpan) -> bool {
    traces.iter().any(|t| !any_copy_deleted(&t.mask, span))
}

/// Outcome of the E2 check, with the per-run breakdown.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct E2Detail {
    pub holds: bool,
    /// Entry `i`: some trace keeps run `i` intact while fully deleting no run.
    pub per_run: Vec<bool>,
}

pub fn holds_e2(traces: &[MaskedTrace], profile: &RunProfile) -> E2Detail {
    let ranges = profile.run_ranges();
    let mut per_run = vec![false; ranges.len()];
    for t in traces {
        if ranges.iter().any(|r| t.mask.all_deleted(r.clone())) {
            continue;
        }
        for (flag, r) in per_run.iter_mut().zip(&ranges) {
            if !*flag && t.mask.none_deleted(r.clone()) {
                *flag = true;
            }
        }
    }
    E2Detail {
        holds: per_run.iter().all(|&b| b),
        per_run,
    }
}

/// E1 per registered span plus E2 for one trace set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EventReport {
    pub e1_holds: Vec<bool>,
    pub e2: E2Detail,
}

pub fn evaluate_events(
    traces: &[MaskedTrace],
    spans: &[PatternSpan],
    profile: &RunProfile,
) -> EventReport {
    EventReport {
        e1_holds: spans.iter().map(|s| holds_e1(traces, s)).collect(),
        e2: holds_e2(traces, profile),
    }
}

/// Which side of an `A^a B^b` block comes first.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BlockOrder {
    /// `A^a B^b`
    AThenB,
    /// `B^b A^a`
    BThenA,
}

/// A substring of `s` declared for one of the three necessary conditions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DeclaredPattern {
    /// Condition 1: `A^a` at `span`.
    Repeat { span: PatternSpan },
    /// Condition 2: `B^a A B^b` starting at `offset`, with `|A| <= |B|`.
    Sandwich {
        offset: usize,
        a_unit: BitString,
        b_unit: BitString,
        left_copies: usize,
        right_copies: usize,
    },
    /// Condition 3: `A^a B^b` (or `B^b A^a`) starting at `offset`.
    Adjacent {
        offset: usize,
        a_unit: BitString,
        b_unit: BitString,
        a_copies: usize,
        b_copies: usize,
        order: BlockOrder,
    },
}

impl DeclaredPattern {
    pub fn condition(&self) -> u8 {
        match self {
            DeclaredPattern::Repeat { .. } => 1,
            DeclaredPattern::Sandwich { .. } => 2,
            DeclaredPattern::Adjacent { .. } => 3,
        }
    }

    pub fn offset(&self) -> usize {
        match self {
            DeclaredPattern::Repeat { span } => span.offset,
            DeclaredPattern::Sandwich { offset, .. } | DeclaredPattern::Adjacent { offset, .. } => {
                *offset
            }
        }
    }

    /// The block this pattern covers, as it must appear in `s`.
    fn block(&self, s: &BitString) -> BitString {
        match self {
            DeclaredPattern::Repeat { span } => span.unit(s).repeat(span.copies),
            DeclaredPattern::Sandwich {
                a_unit,
                b_unit,
                left_copies,
                right_copies,
                ..
            } => {
                let mut out = b_unit.repeat(*left_copies);
                out.append(a_unit);
                out.append(&b_unit.repeat(*right_copies));
                out
            }
            DeclaredPattern::Adjacent {
                a_unit,
                b_unit,
                a_copies,
                b_copies,
                order,
                ..
            } => {
                let (first, second) = (a_unit.repeat(*a_copies), b_unit.repeat(*b_copies));
                match order {
                    BlockOrder::AThenB => concat(&first, &second),
                    BlockOrder::BThenA => concat(&second, &first),
                }
            }
        }
    }

    /// Position ranges of the copies whose full deletion counts toward the condition.
    fn deletable_copies(&self) -> Vec<std::ops::Range<usize>> {
        let units = |start: usize, len: usize, count: usize| {
            (0..count).map(move |j| start + j * len..start + (j + 1) * len)
        };
        match self {
            DeclaredPattern::Repeat { span } => (0..span.copies).map(|j| span.copy_range(j)).collect(),
            DeclaredPattern::Sandwich {
                offset,
                a_unit,
                b_unit,
                left_copies,
                right_copies,
            } => {
                let b = b_unit.len();
                let right_start = offset + left_copies * b + a_unit.len();
                units(*offset, b, *left_copies)
                    .chain(units(right_start, b, *right_copies))
                    .collect()
            }
            DeclaredPattern::Adjacent {
                offset,
                a_unit,
                b_unit,
                a_copies,
                b_copies,
                order,
            } => {
                let (a, b) = (a_unit.len(), b_unit.len());
                match order {
                    BlockOrder::AThenB => units(*offset, a, *a_copies)
                        .chain(units(offset + a * a_copies, b, *b_copies))
                        .collect(),
                    BlockOrder::BThenA => units(*offset, b, *b_copies)
                        .chain(units(offset + b * b_copies, a, *a_copies))
                        .collect(),
                }
            }
        }
    }

    /// The competing block from the constructive proof of the condition.
    fn replacement(&self, s: &BitString) -> BitString {
        match self {
            DeclaredPattern::Repeat { span } => {
                // D A^{a-1}, D = A with its first bit flipped
                let unit = span.unit(s);
                concat(&unit.with_flipped(0), &unit.repeat(span.copies - 1))
            }
            DeclaredPattern::Sandwich {
                a_unit,
                b_unit,
                left_copies,
                right_copies,
                ..
            } => {
                // B^{a-1} A B A 1^{|B|-|A|} B^{b-1}
                let mut g = b_unit.repeat(left_copies - 1);
                g.append(a_unit);
                g.append(b_unit);
                g.append(a_unit);
                g.push_run(true, b_unit.len() - a_unit.len());
                g.append(&b_unit.repeat(right_copies - 1));
                g
            }
            DeclaredPattern::Adjacent {
                a_unit,
                b_unit,
                a_copies,
                b_copies,
                order,
                ..
            } => match order {
                // A^{a-1} B A B^{b-1}
                BlockOrder::AThenB => {
                    let mut g = a_unit.repeat(a_copies - 1);
                    g.append(b_unit);
                    g.append(a_unit);
                    g.append(&b_unit.repeat(b_copies - 1));
                    g
                }
                // B^{b-1} A B A^{a-1}
                BlockOrder::BThenA => {
                    let mut g = b_unit.repeat(b_copies - 1);
                    g.append(a_unit);
                    g.append(b_unit);
                    g.append(&a_unit.repeat(a_copies - 1));
                    g
                }
            },
        }
    }

    fn validate(&self, s: &BitString) -> Result<()> {
        match self {
            DeclaredPattern::Repeat { span } => span
                .verify(s)
                .map_err(|e| Error::PatternAbsent(e.to_string()))?,
            DeclaredPattern::Sandwich {
                a_unit,
                b_unit,
                left_copies,
                right_copies,
                ..
            } => {
                check_units(a_unit, b_unit)?;
                if a_unit.len() > b_unit.len() {
                    return Err(Error::InvalidPattern("condition 2 needs |A| <= |B|".into()));
                }
                if *left_copies == 0 || *right_copies == 0 {
                    return Err(Error::InvalidPattern("copy counts must be positive".into()));
                }
            }
            DeclaredPattern::Adjacent {
                a_unit,
                b_unit,
                a_copies,
                b_copies,
                ..
            } => {
                check_units(a_unit, b_unit)?;
                if *a_copies == 0 || *b_copies == 0 {
                    return Err(Error::InvalidPattern("copy counts must be positive".into()));
                }
            }
        }
        let block = self.block(s);
        let start = self.offset();
        if start + block.len() > s.len() || s.slice(start, start + block.len()) != block {
            return Err(Error::PatternAbsent(format!(
                "condition-{} block {block} not found at offset {start}",
                self.condition()
            )));
        }
        if self.replacement(s) == block {
            return Err(Error::InvalidPattern(format!(
                "condition-{} replacement coincides with {block}",
                self.condition()
            )));
        }
        Ok(())
    }
}

fn check_units(a: &BitString, b: &BitString) -> Result<()> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::InvalidPattern("A and B must be nonempty".into()));
    }
    if a == b {
        return Err(Error::InvalidPattern("A and B must be distinct".into()));
    }
    Ok(())
}

fn concat(x: &BitString, y: &BitString) -> BitString {
    let mut out = x.clone();
    out.append(y);
    out
}

/// A necessary condition that fails on every trace, plus the competing source
/// string that explains all of the traces.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NecViolation {
    pub condition: u8,
    pub pattern: DeclaredPattern,
    pub alternative: BitString,
}

/// Condition check on one declared pattern: does every trace fully delete at least
/// one of the relevant copies?
pub fn condition_violated(traces: &[MaskedTrace], pattern: &DeclaredPattern) -> bool {
    let copies = pattern.deletable_copies();
    traces
        .iter()
        .all(|t| copies.iter().any(|r| t.mask.all_deleted(r.clone())))
}

/// Evaluates each declared pattern independently and returns one violation per
/// pattern whose condition fails across the whole trace set.
pub fn detect_nec_violations(
    s: &BitString,
    traces: &[MaskedTrace],
    patterns: &[DeclaredPattern],
) -> Result<Vec<NecViolation>> {
    for t in traces {
        if t.mask.len() != s.len() {
            return Err(Error::LengthMismatch {
                expected: s.len(),
                got: t.mask.len(),
            });
        }
    }
    let mut out = Vec::new();
    for pattern in patterns {
        pattern.validate(s)?;
        if traces.is_empty() || !condition_violated(traces, pattern) {
            continue;
        }
        let start = pattern.offset();
        let block_len = pattern.block(s).len();
        let mut alternative = s.slice(0, start);
        alternative.append(&pattern.replacement(s));
        alternative.append(&s.slice(start + block_len, s.len()));
        out.push(NecViolation {
            condition: pattern.condition(),
            pattern: pattern.clone(),
            alternative,
        });
    }
    Ok(out)
}

/// Patterns implied by the run structure: every run as a condition-1 block,
/// each adjacent pair of runs as a condition-3 block, and each length-1 interior
/// run flanked by opposite runs as a condition-2 block.
pub fn patterns_from_runs(profile: &RunProfile) -> Vec<DeclaredPattern> {
    let ranges = profile.run_ranges();
    let lengths = profile.lengths();
    let unit = |bit: bool| BitString::filled(bit, 1);
    let mut out = Vec::new();
    for (i, r) in ranges.iter().enumerate() {
        out.push(DeclaredPattern::Repeat {
            span: PatternSpan {
                offset: r.start,
                period: 1,
                copies: lengths[i],
            },
        });
    }
    for i in 0..lengths.len().saturating_sub(1) {
        out.push(DeclaredPattern::Adjacent {
            offset: ranges[i].start,
            a_unit: unit(profile.bit_of_run(i)),
            b_unit: unit(profile.bit_of_run(i + 1)),
            a_copies: lengths[i],
            b_copies: lengths[i + 1],
            order: BlockOrder::AThenB,
        });
    }
    for i in 1..lengths.len().saturating_sub(1) {
        if lengths[i] == 1 {
            out.push(DeclaredPattern::Sandwich {
                offset: ranges[i - 1].start,
                a_unit: unit(profile.bit_of_run(i)),
                b_unit: unit(profile.bit_of_run(i - 1)),
                left_copies: lengths[i - 1],
                right_copies: lengths[i + 1],
            });
        }
    }
    out
}
