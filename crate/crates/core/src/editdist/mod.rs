//! Levenshtein engines over word sequences: plain, time-constrained, and the
//! banded evaluation that makes the time-constrained variant cheap.

mod band;
pub(crate) mod kernel;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::transcript::{CostModel, Interval, TimedWord};

pub use band::{band_bounds, match_allowed, ColumnRange};
use kernel::{Diag, Row, Tally};

/// Maximal gap in seconds between two words that may still be matched.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Collar(f64);

impl Collar {
    pub const ZERO: Collar = Collar(0.0);
    pub const INFINITE: Collar = Collar(f64::INFINITY);
    /// Five seconds.
    pub const DEFAULT: Collar = Collar(5.0);

    pub fn new(seconds: f64) -> Result<Self> {
        if seconds.is_nan() || seconds < 0.0 {
            return Err(Error::InvalidCollar(seconds));
        }
        Ok(Collar(seconds))
    }

    pub fn seconds(&self) -> f64 {
        self.0
    }

    pub fn is_infinite(&self) -> bool {
        self.0.is_infinite()
    }
}

impl Default for Collar {
    fn default() -> Self {
        Collar::DEFAULT
    }
}

impl fmt::Display for Collar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_infinite() {
            f.write_str("inf")
        } else {
            write!(f, "{}", self.0)
        }
    }
}

impl FromStr for Collar {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("inf") || s.eq_ignore_ascii_case("infinity") {
            return Ok(Collar::INFINITE);
        }
        let v: f64 = s.parse().map_err(|_| format!("invalid collar {s:?}"))?;
        if !v.is_finite() {
            return Err(format!("invalid collar {s:?}"));
        }
        Collar::new(v).map_err(|e| e.to_string())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OpKind {
    Correct,
    Substitute,
    Insert,
    Delete,
}

impl OpKind {
    #[inline]
    pub fn cost(self, costs: &CostModel) -> u64 {
        (match self {
            OpKind::Correct => costs.correct,
            OpKind::Substitute => costs.substitution,
            OpKind::Insert => costs.insertion,
            OpKind::Delete => costs.deletion,
        }) as u64
    }
}

/// One step of an alignment. Indices are 0-based positions in the reference
/// and hypothesis sequences.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlignmentOp {
    pub kind: OpKind,
    #[serde(rename = "ref")]
    pub ref_index: Option<usize>,
    #[serde(rename = "hyp")]
    pub hyp_index: Option<usize>,
}

/// Number of operations of each kind in an alignment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct EditCounts {
    pub correct: u64,
    pub substitutions: u64,
    pub insertions: u64,
    pub deletions: u64,
}

impl EditCounts {
    #[inline]
    pub(crate) fn record(&mut self, op: OpKind, n: u64) {
        match op {
            OpKind::Correct => self.correct += n,
            OpKind::Substitute => self.substitutions += n,
            OpKind::Insert => self.insertions += n,
            OpKind::Delete => self.deletions += n,
        }
    }

    pub fn cost(&self, costs: &CostModel) -> u64 {
        self.correct * costs.correct as u64
            + self.substitutions * costs.substitution as u64
            + self.insertions * costs.insertion as u64
            + self.deletions * costs.deletion as u64
    }

    /// Substitutions, insertions and deletions.
    pub fn errors(&self) -> u64 {
        self.substitutions + self.insertions + self.deletions
    }
}

impl std::ops::Add for EditCounts {
    type Output = EditCounts;

    fn add(self, o: EditCounts) -> EditCounts {
        EditCounts {
            correct: self.correct + o.correct,
            substitutions: self.substitutions + o.substitutions,
            insertions: self.insertions + o.insertions,
            deletions: self.deletions + o.deletions,
        }
    }
}

impl std::ops::AddAssign for EditCounts {
    fn add_assign(&mut self, o: EditCounts) {
        *self = *self + o;
    }
}

/// A distance together with one optimal edit script.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Alignment {
    pub distance: u64,
    pub ops: Vec<AlignmentOp>,
}

impl Alignment {
    pub fn counts(&self) -> EditCounts {
        let mut c = EditCounts::default();
        for op in &self.ops {
            c.record(op.kind, 1);
        }
        c
    }
}

/// Levenshtein distance in two rows of memory.
pub fn levenshtein_distance<T: PartialEq>(reference: &[T], hypothesis: &[T], costs: &CostModel) -> u64 {
    let (cor, sub) = (costs.correct as u64, costs.substitution as u64);
    let (ins, del) = (costs.insertion as u64, costs.deletion as u64);
    let mut row: Vec<u64> = (1..=hypothesis.len() as u64).map(|j| j * ins).collect();
    let mut last = hypothesis.len() as u64 * ins;
    for (i, r) in reference.iter().enumerate() {
        let mut diag = i as u64 * del;
        let mut left = diag + del;
        for (cell, h) in row.iter_mut().zip(hypothesis) {
            let up = *cell;
            let v = (diag + if r == h { cor } else { sub }).min(up + del).min(left + ins);
            diag = up;
            *cell = v;
            left = v;
        }
        last = left;
    }
    last
}

/// Distance and operation counts of the tie-broken optimal alignment, in
/// linear memory.
pub fn levenshtein_counts<T: PartialEq>(reference: &[T], hypothesis: &[T], costs: &CostModel) -> (u64, EditCounts) {
    let m = hypothesis.len();
    let t: Tally = kernel::run(
        reference.len(),
        m,
        costs,
        |_| ColumnRange { lo: 0, hi: m },
        |i, j| plain_diag(&reference[i - 1], &hypothesis[j - 1]),
        |_, _| {},
    );
    (t.cost, t.counts)
}

/// Levenshtein distance with one optimal alignment.
///
/// Among equal-cost predecessors the backtrace prefers correct, then
/// substitution, then deletion, then insertion.
pub fn levenshtein<T: PartialEq>(reference: &[T], hypothesis: &[T], costs: &CostModel) -> Alignment {
    let m = hypothesis.len();
    aligned(
        reference.len(),
        m,
        costs,
        |_| ColumnRange { lo: 0, hi: m },
        |i, j| plain_diag(&reference[i - 1], &hypothesis[j - 1]),
    )
}

#[inline]
fn plain_diag<T: PartialEq>(r: &T, h: &T) -> Diag {
    if r == h {
        Diag::Correct
    } else {
        Diag::Substitute
    }
}

#[inline]
fn tc_diag<T: PartialEq>(r: &T, ri: Interval, h: &T, hi: Interval, collar: Collar) -> Diag {
    if !match_allowed(ri, hi, collar) {
        Diag::Forbidden
    } else {
        plain_diag(r, h)
    }
}

/// Token and timing views of a word sequence for the time-constrained engine.
#[derive(Debug, Clone, Copy)]
pub struct TimedSeq<'a, T> {
    pub tokens: &'a [T],
    pub times: &'a [Interval],
}

impl<'a, T> TimedSeq<'a, T> {
    pub fn new(tokens: &'a [T], times: &'a [Interval]) -> Self {
        assert_eq!(tokens.len(), times.len(), "one interval per token");
        TimedSeq { tokens, times }
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }
}

/// Time-constrained distance over the pruned band, in linear memory.
pub fn tc_distance<T: PartialEq>(reference: TimedSeq<T>, hypothesis: TimedSeq<T>, collar: Collar, costs: &CostModel) -> u64 {
    let bands = band_bounds(reference.times, hypothesis.times, collar);
    kernel::run::<u64, _, _, _>(
        reference.len(),
        hypothesis.len(),
        costs,
        |i| bands[i - 1],
        |i, j| {
            tc_diag(
                &reference.tokens[i - 1],
                reference.times[i - 1],
                &hypothesis.tokens[j - 1],
                hypothesis.times[j - 1],
                collar,
            )
        },
        |_, _| {},
    )
}

/// Time-constrained distance and operation counts along the tie-broken path.
pub fn tc_counts<T: PartialEq>(
    reference: TimedSeq<T>,
    hypothesis: TimedSeq<T>,
    collar: Collar,
    costs: &CostModel,
) -> (u64, EditCounts) {
    let bands = band_bounds(reference.times, hypothesis.times, collar);
    let t: Tally = kernel::run(
        reference.len(),
        hypothesis.len(),
        costs,
        |i| bands[i - 1],
        |i, j| {
            tc_diag(
                &reference.tokens[i - 1],
                reference.times[i - 1],
                &hypothesis.tokens[j - 1],
                hypothesis.times[j - 1],
                collar,
            )
        },
        |_, _| {},
    );
    (t.cost, t.counts)
}

/// Time-constrained distance with one optimal alignment; memory is the size
/// of the band.
pub fn tc_alignment<T: PartialEq>(
    reference: TimedSeq<T>,
    hypothesis: TimedSeq<T>,
    collar: Collar,
    costs: &CostModel,
) -> Alignment {
    let bands = band_bounds(reference.times, hypothesis.times, collar);
    aligned(
        reference.len(),
        hypothesis.len(),
        costs,
        |i| bands[i - 1],
        |i, j| {
            tc_diag(
                &reference.tokens[i - 1],
                reference.times[i - 1],
                &hypothesis.tokens[j - 1],
                hypothesis.times[j - 1],
                collar,
            )
        },
    )
}

/// Time-constrained Levenshtein distance between timed words.
///
/// Words may only be matched (correct or substituted) when
/// [`match_allowed`]; otherwise they must be deleted and inserted. With an
/// infinite collar this is exactly [`levenshtein`].
pub fn tc_levenshtein(
    reference: &[TimedWord],
    hypothesis: &[TimedWord],
    collar: Collar,
    costs: &CostModel,
) -> Result<Alignment> {
    let (rt, ri) = split_timed(reference, "reference")?;
    let (ht, hi) = split_timed(hypothesis, "hypothesis")?;
    Ok(tc_alignment(TimedSeq::new(&rt, &ri), TimedSeq::new(&ht, &hi), collar, costs))
}

fn split_timed<'a>(words: &'a [TimedWord], side: &str) -> Result<(Vec<&'a str>, Vec<Interval>)> {
    let mut tokens = Vec::with_capacity(words.len());
    let mut times = Vec::with_capacity(words.len());
    for (k, w) in words.iter().enumerate() {
        let iv = w.interval().ok_or_else(|| Error::MissingTiming {
            context: format!("{side} word {k} ({:?}) has no begin/end time", w.token()),
        })?;
        tokens.push(w.token());
        times.push(iv);
    }
    Ok((tokens, times))
}

fn aligned<B, D>(n: usize, m: usize, costs: &CostModel, band: B, diag: D) -> Alignment
where
    B: Fn(usize) -> ColumnRange,
    D: Fn(usize, usize) -> Diag,
{
    let mut rows: Vec<Row<u64>> = Vec::with_capacity(n + 1);
    let distance: u64 = kernel::run(n, m, costs, band, &diag, |_, row: &Row<u64>| rows.push(row.clone()));

    let mut ops = Vec::with_capacity(n.max(m));
    let (mut i, mut j) = (n, m);
    while i > 0 || j > 0 {
        if i == 0 || j > rows[i].hi {
            ops.push(AlignmentOp {
                kind: OpKind::Insert,
                ref_index: None,
                hyp_index: Some(j - 1),
            });
            j -= 1;
            continue;
        }
        let here = rows[i].get(j, costs);
        let above = &rows[i - 1];
        if j > rows[i].lo {
            let op = match diag(i, j) {
                Diag::Forbidden => None,
                Diag::Correct => Some(OpKind::Correct),
                Diag::Substitute => Some(OpKind::Substitute),
            };
            if let Some(op) = op {
                if above.get(j - 1, costs) + op.cost(costs) == here {
                    ops.push(AlignmentOp {
                        kind: op,
                        ref_index: Some(i - 1),
                        hyp_index: Some(j - 1),
                    });
                    i -= 1;
                    j -= 1;
                    continue;
                }
            }
            if above.get(j, costs) + costs.deletion as u64 != here {
                ops.push(AlignmentOp {
                    kind: OpKind::Insert,
                    ref_index: None,
                    hyp_index: Some(j - 1),
                });
                j -= 1;
                continue;
            }
        }
        ops.push(AlignmentOp {
            kind: OpKind::Delete,
            ref_index: Some(i - 1),
            hyp_index: None,
        });
        i -= 1;
    }
    ops.reverse();
    Alignment { distance, ops }
}
