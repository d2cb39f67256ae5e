use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::assignment::{solve_assignment, CostMatrix};
use crate::editdist::{
    levenshtein, levenshtein_counts, levenshtein_distance, match_allowed, tc_alignment, tc_counts, tc_distance,
    Alignment, Collar, EditCounts, TimedSeq,
};
use crate::error::{Error, Result};
use crate::transcript::{check_no_overlap, group_segments, GroupKey, Interval, Segment, Transcript};

use super::report::{aggregate, AlignmentBlock, Assignment, ErrorRateReport, SpeakerPair};
use super::timing::{apply_pseudo_timing, apply_pseudo_timing_forced, PseudoWordStrategy};
use super::{canonical, pair_sessions, Scoring, TimeConstraint, Vocab};

/// Concatenated words of one speaker or output stream.
pub(crate) struct Stream<'a> {
    /// `None` for the empty streams added to square the cost matrix.
    pub label: Option<&'a str>,
    pub tokens: Vec<u32>,
    pub times: Vec<Interval>,
}

impl Stream<'_> {
    fn empty() -> Self {
        Stream {
            label: None,
            tokens: Vec::new(),
            times: Vec::new(),
        }
    }

    fn seq(&self) -> TimedSeq<'_, u32> {
        TimedSeq::new(&self.tokens, &self.times)
    }
}

pub(crate) fn streams<'a>(segments: &[&'a Segment], key: GroupKey, vocab: &mut Vocab<'a>, timed: bool) -> Vec<Stream<'a>> {
    group_segments(segments, key)
        .into_iter()
        .map(|(label, group)| {
            let mut tokens = Vec::new();
            let mut times = Vec::new();
            for w in group.into_iter().flat_map(|s: &'a Segment| s.words.iter()) {
                tokens.push(vocab.id(w.token()));
                if timed {
                    times.push(w.interval().expect("pseudo-word timing covers every word"));
                }
            }
            Stream {
                label: Some(label),
                tokens,
                times,
            }
        })
        .collect()
}

#[derive(Debug, Clone, Copy)]
enum Engine {
    Plain,
    Timed(Collar),
}

impl Engine {
    fn distance(self, r: &Stream, h: &Stream, scoring: &Scoring) -> u64 {
        match self {
            Engine::Plain => levenshtein_distance(&r.tokens, &h.tokens, &scoring.costs),
            Engine::Timed(c) => tc_distance(r.seq(), h.seq(), c, &scoring.costs),
        }
    }

    fn counts(self, r: &Stream, h: &Stream, scoring: &Scoring) -> (u64, EditCounts) {
        match self {
            Engine::Plain => levenshtein_counts(&r.tokens, &h.tokens, &scoring.costs),
            Engine::Timed(c) => tc_counts(r.seq(), h.seq(), c, &scoring.costs),
        }
    }

    fn alignment(self, r: &Stream, h: &Stream, scoring: &Scoring) -> Alignment {
        match self {
            Engine::Plain => levenshtein(&r.tokens, &h.tokens, &scoring.costs),
            Engine::Timed(c) => tc_alignment(r.seq(), h.seq(), c, &scoring.costs),
        }
    }
}

struct Scored<'a> {
    report: ErrorRateReport,
    refs: Vec<Stream<'a>>,
    hyps: Vec<Stream<'a>>,
    /// Hypothesis column for each reference row.
    col_for_row: Vec<usize>,
}

fn score_session<'a>(
    mut refs: Vec<Stream<'a>>,
    mut hyps: Vec<Stream<'a>>,
    engine: Engine,
    scoring: &Scoring,
) -> Result<Scored<'a>> {
    let n = refs.len().max(hyps.len());
    refs.resize_with(n, Stream::empty);
    hyps.resize_with(n, Stream::empty);

    let dist: Vec<u64> = (0..n * n)
        .into_par_iter()
        .map(|x| engine.distance(&refs[x / n], &hyps[x % n], scoring))
        .collect();
    let matrix = CostMatrix::from_fn(n, |r, c| dist[r * n + c])?;
    let solution = solve_assignment(&matrix);
    let col_for_row = solution.col_for_row();

    let per_pair: Vec<(u64, EditCounts, Option<Alignment>)> = (0..n)
        .into_par_iter()
        .map(|r| {
            let h = &hyps[col_for_row[r]];
            if scoring.keep_alignments {
                let a = engine.alignment(&refs[r], h, scoring);
                (a.distance, a.counts(), Some(a))
            } else {
                let (d, c) = engine.counts(&refs[r], h, scoring);
                (d, c, None)
            }
        })
        .collect();

    let mut counts = EditCounts::default();
    let mut errors = 0;
    let mut pairs = Vec::with_capacity(n);
    let mut blocks = Vec::new();
    for (r, (d, c, a)) in per_pair.into_iter().enumerate() {
        errors += d;
        counts += c;
        let pair = SpeakerPair {
            reference: refs[r].label.map(str::to_owned),
            hypothesis: hyps[col_for_row[r]].label.map(str::to_owned),
        };
        if let Some(a) = a {
            blocks.push(AlignmentBlock {
                reference: pair.reference.clone(),
                hypothesis: pair.hypothesis.clone(),
                ops: a.ops,
            });
        }
        pairs.push(pair);
    }
    debug_assert_eq!(errors, solution.cost);

    let length = refs.iter().map(|s| s.tokens.len() as u64).sum();
    let mut report = ErrorRateReport::from_counts(errors, length, counts);
    report.assignment = Some(Assignment::Permutation { pairs });
    report.alignment = blocks;
    Ok(Scored {
        report,
        refs,
        hyps,
        col_for_row,
    })
}

fn score_all(
    reference: &Transcript,
    hypothesis: &Transcript,
    engine: Engine,
    scoring: &Scoring,
    mut visit: impl FnMut(&Scored),
) -> Result<ErrorRateReport> {
    let timed = matches!(engine, Engine::Timed(_));
    let mut sessions = BTreeMap::new();
    for s in pair_sessions(reference, hypothesis) {
        let mut vocab = Vocab::default();
        let refs = streams(&s.reference, reference.key, &mut vocab, timed);
        let hyps = streams(&s.hypothesis, hypothesis.key, &mut vocab, timed);
        let scored = score_session(refs, hyps, engine, scoring)?;
        visit(&scored);
        sessions.insert(s.id.to_owned(), scored.report);
    }
    let total = aggregate(sessions);
    if total.length == 0 && total.errors > 0 {
        return Err(Error::ZeroLengthReference { errors: total.errors });
    }
    Ok(total)
}

/// Concatenated minimum-permutation WER.
///
/// Per session, the words of each reference speaker and of each hypothesis
/// group are concatenated in time order and speakers are matched one-to-one
/// with hypothesis groups so that the summed Levenshtein distance is minimal.
/// Surplus speakers or groups are matched with empty streams.
pub fn cp_wer(reference: &Transcript, hypothesis: &Transcript, scoring: &Scoring) -> Result<ErrorRateReport> {
    let reference = canonical(reference)?;
    let hypothesis = canonical(hypothesis)?;
    score_all(&reference, &hypothesis, Engine::Plain, scoring, |_| {})
}

/// Time-constrained cpWER: as [`cp_wer`], but two words can only be matched
/// when their (pseudo-)word intervals come within the collar of each other.
///
/// Requires begin/end times on every segment that has words. Unless
/// allowed, hypothesis segments of one group must not overlap in time.
pub fn tcp_wer(
    reference: &Transcript,
    hypothesis: &Transcript,
    constraint: &TimeConstraint,
    scoring: &Scoring,
) -> Result<ErrorRateReport> {
    let (reference, hypothesis) = prepare_timed(reference, hypothesis, constraint)?;
    score_all(&reference, &hypothesis, Engine::Timed(constraint.collar), scoring, |_| {})
}

fn prepare_timed(
    reference: &Transcript,
    hypothesis: &Transcript,
    constraint: &TimeConstraint,
) -> Result<(Transcript, Transcript)> {
    let reference = canonical(reference)?;
    let hypothesis = canonical(hypothesis)?;
    if !constraint.allow_hypothesis_overlap {
        check_no_overlap(&hypothesis)?;
    }
    let force = constraint.force_pseudo_timing;
    Ok((
        with_pseudo_timing(&reference, constraint.reference_timing, force)?,
        with_pseudo_timing(&hypothesis, constraint.hypothesis_timing, force)?,
    ))
}

fn with_pseudo_timing(t: &Transcript, strategy: PseudoWordStrategy, force: bool) -> Result<Transcript> {
    let segments = t
        .segments
        .iter()
        .map(|s| {
            if force {
                apply_pseudo_timing_forced(s, strategy)
            } else {
                apply_pseudo_timing(s, strategy)
            }
        })
        .collect::<Result<_>>()?;
    Ok(Transcript::new(segments, t.key))
}

/// One point of a collar sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    #[serde(with = "collar_serde")]
    pub collar: Collar,
    pub error_rate: Option<f64>,
    pub errors: u64,
    pub length: u64,
    /// Share of the word pairs matched without time constraint (correct or
    /// substituted) that this collar would forbid.
    pub disallowed_fraction: Option<f64>,
}

mod collar_serde {
    use serde::{Deserialize, Deserializer, Serializer};

    use crate::editdist::Collar;

    pub fn serialize<S: Serializer>(c: &Collar, s: S) -> Result<S::Ok, S::Error> {
        if c.is_infinite() {
            s.serialize_str("inf")
        } else {
            s.serialize_f64(c.seconds())
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Collar, D::Error> {
        #[derive(serde::Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(x) => Collar::new(x).map_err(serde::de::Error::custom),
            Raw::Text(t) => t.parse().map_err(serde::de::Error::custom),
        }
    }
}

/// tcpWER for each collar, plus how many of the unconstrained matches each
/// collar would rule out.
pub fn collar_sweep(
    reference: &Transcript,
    hypothesis: &Transcript,
    collars: &[Collar],
    constraint: &TimeConstraint,
    scoring: &Scoring,
) -> Result<Vec<SweepRow>> {
    let (reference, hypothesis) = prepare_timed(reference, hypothesis, constraint)?;

    // word pairs matched by the time-agnostic optimum
    let mut matched: Vec<(Interval, Interval)> = Vec::new();
    let plain = Scoring {
        keep_alignments: true,
        ..*scoring
    };
    score_all(&reference, &hypothesis, Engine::Timed(Collar::INFINITE), &plain, |s| {
        for (block, (r, &c)) in s.report.alignment.iter().zip(s.col_for_row.iter().enumerate()) {
            for op in &block.ops {
                if let (Some(i), Some(j)) = (op.ref_index, op.hyp_index) {
                    matched.push((s.refs[r].times[i], s.hyps[c].times[j]));
                }
            }
        }
    })?;

    collars
        .iter()
        .map(|&collar| {
            let rep = score_all(&reference, &hypothesis, Engine::Timed(collar), scoring, |_| {})?;
            let disallowed = matched.iter().filter(|(r, h)| !match_allowed(*r, *h, collar)).count();
            Ok(SweepRow {
                collar,
                error_rate: rep.error_rate(),
                errors: rep.errors,
                length: rep.length,
                disallowed_fraction: (!matched.is_empty()).then(|| disallowed as f64 / matched.len() as f64),
            })
        })
        .collect()
}
