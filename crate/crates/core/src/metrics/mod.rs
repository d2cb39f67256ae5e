//! Word error rates for meeting transcription.
//!
//! | metric  | reference grouping         | hypothesis grouping | matching                                   |
//! |---------|----------------------------|---------------------|--------------------------------------------|
//! | WER     | one utterance              | one segment         | Levenshtein                                |
//! | cpWER   | speaker                    | stream              | best speaker/stream permutation            |
//! | tcpWER  | speaker                    | stream              | cpWER with a temporal collar on matches    |
//! | ORC-WER | labels ignored, time order | stream              | segments to streams, global order kept     |
//! | MIMO-WER| speaker                    | stream              | segments to streams, per-speaker order kept|
//!
//! cpWER/tcpWER suit diarization-style systems whose output is grouped by
//! speaker. ORC-WER suits systems whose streams are overlap-free channels in
//! temporal order; MIMO-WER also handles serialized outputs that jump back in
//! time, at a cost that grows quickly with the number of streams.

mod cp;
mod multistream;
mod report;
mod timing;
mod wer;

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use crate::editdist::Collar;
use crate::transcript::{validate, Segment, Transcript, ValidationPolicy};
use crate::CostModel;

pub use cp::{collar_sweep, cp_wer, tcp_wer, SweepRow};
pub use multistream::{mimo_wer, orc_wer};
pub use report::{aggregate, AlignmentBlock, Assignment, ErrorRateReport, SegmentRef, SpeakerPair, StreamAssignment};
pub use timing::{apply_pseudo_timing, apply_pseudo_timing_forced, char_count, pseudo_word_intervals, PseudoWordStrategy};
pub use wer::{wer, wer_by_session};

/// Default bound on the number of DP states for ORC-WER and MIMO-WER.
pub const DEFAULT_STATE_LIMIT: u128 = 100_000_000;

/// Settings shared by all metrics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scoring {
    pub costs: CostModel,
    /// Also produce word alignments for the report.
    pub keep_alignments: bool,
    /// Refuse ORC/MIMO problems with more DP states than this.
    pub state_limit: u128,
}

impl Default for Scoring {
    fn default() -> Self {
        Scoring {
            costs: CostModel::default(),
            keep_alignments: false,
            state_limit: DEFAULT_STATE_LIMIT,
        }
    }
}

impl From<CostModel> for Scoring {
    fn from(costs: CostModel) -> Self {
        Scoring {
            costs,
            ..Default::default()
        }
    }
}

/// Parameters of the temporal constraint in tcpWER.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeConstraint {
    pub collar: Collar,
    pub reference_timing: PseudoWordStrategy,
    pub hypothesis_timing: PseudoWordStrategy,
    /// Overwrite word times that came with the input.
    pub force_pseudo_timing: bool,
    /// Accept hypothesis streams with self-overlapping segments.
    pub allow_hypothesis_overlap: bool,
}

impl Default for TimeConstraint {
    fn default() -> Self {
        TimeConstraint {
            collar: Collar::DEFAULT,
            reference_timing: PseudoWordStrategy::CharacterBased,
            hypothesis_timing: PseudoWordStrategy::CharacterBasedPoints,
            force_pseudo_timing: false,
            allow_hypothesis_overlap: false,
        }
    }
}

impl TimeConstraint {
    pub fn with_collar(collar: Collar) -> Self {
        TimeConstraint {
            collar,
            ..Default::default()
        }
    }
}

/// The metrics this crate computes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Metric {
    Wer,
    CpWer,
    TcpWer,
    OrcWer,
    MimoWer,
}

impl Metric {
    pub const ALL: [Metric; 5] = [Metric::Wer, Metric::CpWer, Metric::TcpWer, Metric::OrcWer, Metric::MimoWer];

    pub fn name(&self) -> &'static str {
        match self {
            Metric::Wer => "wer",
            Metric::CpWer => "cpwer",
            Metric::TcpWer => "tcpwer",
            Metric::OrcWer => "orcwer",
            Metric::MimoWer => "mimower",
        }
    }

    /// Scores `hypothesis` against `reference`. The time constraint is only
    /// used by tcpWER; plain WER compares whole sessions.
    pub fn evaluate(
        &self,
        reference: &Transcript,
        hypothesis: &Transcript,
        constraint: &TimeConstraint,
        scoring: &Scoring,
    ) -> crate::Result<ErrorRateReport> {
        match self {
            Metric::Wer => wer_by_session(reference, hypothesis, scoring),
            Metric::CpWer => cp_wer(reference, hypothesis, scoring),
            Metric::TcpWer => tcp_wer(reference, hypothesis, constraint, scoring),
            Metric::OrcWer => orc_wer(reference, hypothesis, scoring),
            Metric::MimoWer => mimo_wer(reference, hypothesis, scoring),
        }
    }
}

impl std::fmt::Display for Metric {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Metric {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let norm = s.trim().to_ascii_lowercase().replace(['-', '_'], "");
        Metric::ALL
            .into_iter()
            .find(|m| m.name() == norm)
            .ok_or_else(|| format!("unknown metric {s:?} (expected one of: wer, cpwer, tcpwer, orcwer, mimower)"))
    }
}

/// Maps tokens to dense integer ids so the DPs compare integers.
#[derive(Default)]
pub(crate) struct Vocab<'a> {
    ids: HashMap<&'a str, u32>,
}

impl<'a> Vocab<'a> {
    pub fn id(&mut self, token: &'a str) -> u32 {
        let next = self.ids.len() as u32;
        *self.ids.entry(token).or_insert(next)
    }
}

/// The segments of one session on both sides.
pub(crate) struct SessionPair<'a> {
    pub id: &'a str,
    pub reference: Vec<&'a Segment>,
    pub hypothesis: Vec<&'a Segment>,
}

/// Sessions present on either side, sorted by id.
pub(crate) fn pair_sessions<'a>(reference: &'a Transcript, hypothesis: &'a Transcript) -> Vec<SessionPair<'a>> {
    let mut map: BTreeMap<&str, SessionPair> = BTreeMap::new();
    for s in &reference.segments {
        map.entry(&s.session_id)
            .or_insert_with(|| SessionPair {
                id: &s.session_id,
                reference: Vec::new(),
                hypothesis: Vec::new(),
            })
            .reference
            .push(s);
    }
    for s in &hypothesis.segments {
        map.entry(&s.session_id)
            .or_insert_with(|| SessionPair {
                id: &s.session_id,
                reference: Vec::new(),
                hypothesis: Vec::new(),
            })
            .hypothesis
            .push(s);
    }
    map.into_values().collect()
}

/// Canonical order without rejecting anything.
pub(crate) fn canonical(t: &Transcript) -> crate::Result<Transcript> {
    validate(t, ValidationPolicy::lenient())
}
