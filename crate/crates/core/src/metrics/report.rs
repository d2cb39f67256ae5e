use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::editdist::{AlignmentOp, EditCounts};

/// Outcome of scoring: the error decomposition, the resolved assignment and,
/// for aggregated results, one report per session.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ErrorRateReport {
    /// Total edit distance under the cost model used.
    pub errors: u64,
    /// Number of reference words.
    pub length: u64,
    pub insertions: u64,
    pub deletions: u64,
    pub substitutions: u64,
    pub assignment: Option<Assignment>,
    pub per_session: BTreeMap<String, ErrorRateReport>,
    pub alignment: Vec<AlignmentBlock>,
}

impl ErrorRateReport {
    pub(crate) fn from_counts(errors: u64, length: u64, counts: EditCounts) -> Self {
        ErrorRateReport {
            errors,
            length,
            insertions: counts.insertions,
            deletions: counts.deletions,
            substitutions: counts.substitutions,
            ..Default::default()
        }
    }

    /// `errors / length`, undefined for an empty reference.
    pub fn error_rate(&self) -> Option<f64> {
        (self.length > 0).then(|| self.errors as f64 / self.length as f64)
    }

    /// The same report without session breakdown or alignments.
    pub fn summary(&self) -> ErrorRateReport {
        ErrorRateReport {
            per_session: BTreeMap::new(),
            alignment: Vec::new(),
            ..self.clone()
        }
    }
}

/// How reference and hypothesis were matched.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Assignment {
    /// Speaker-to-stream permutation (cpWER, tcpWER). `None` marks an
    /// inserted empty stream.
    Permutation { pairs: Vec<SpeakerPair> },
    /// Reference segments per hypothesis stream (ORC-WER, MIMO-WER), in the
    /// order they are concatenated.
    Segments { streams: Vec<StreamAssignment> },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpeakerPair {
    pub reference: Option<String>,
    pub hypothesis: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StreamAssignment {
    pub stream: Option<String>,
    pub segments: Vec<SegmentRef>,
}

/// A reference segment: speaker label and 0-based index among that
/// speaker's segments in begin-time order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SegmentRef {
    pub speaker: String,
    pub utterance: usize,
}

/// Word alignment between one reference word sequence and one stream.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlignmentBlock {
    pub reference: Option<String>,
    pub hypothesis: Option<String>,
    pub ops: Vec<AlignmentOp>,
}

/// Micro-average over sessions: counts are summed, the rate is recomputed.
/// A single session's assignment is kept; with several sessions it lives in
/// the per-session entries.
pub fn aggregate(sessions: BTreeMap<String, ErrorRateReport>) -> ErrorRateReport {
    let mut total = ErrorRateReport::default();
    for r in sessions.values() {
        total.errors += r.errors;
        total.length += r.length;
        total.insertions += r.insertions;
        total.deletions += r.deletions;
        total.substitutions += r.substitutions;
    }
    if sessions.len() == 1 {
        let only = sessions.values().next().unwrap();
        total.assignment = only.assignment.clone();
        total.alignment = only.alignment.clone();
    }
    total.per_session = sessions;
    total
}
