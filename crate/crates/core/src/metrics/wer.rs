use std::collections::BTreeMap;

use crate::editdist::{levenshtein, levenshtein_counts, EditCounts};
use crate::error::{Error, Result};
use crate::transcript::{Segment, Transcript};

use super::report::{aggregate, AlignmentBlock, ErrorRateReport};
use super::{canonical, pair_sessions, Scoring};

/// Plain WER over already paired reference/hypothesis segments.
///
/// Errors with [`Error::ZeroLengthReference`] when the references hold no
/// words but the hypotheses do.
pub fn wer(pairs: &[(&Segment, &Segment)], scoring: &Scoring) -> Result<ErrorRateReport> {
    let report = score_pairs(pairs, scoring);
    if report.length == 0 && report.errors > 0 {
        return Err(Error::ZeroLengthReference { errors: report.errors });
    }
    Ok(report)
}

fn score_pairs(pairs: &[(&Segment, &Segment)], scoring: &Scoring) -> ErrorRateReport {
    let mut counts = EditCounts::default();
    let mut errors = 0;
    let mut length = 0;
    let mut blocks = Vec::new();
    for (r, h) in pairs {
        let rt: Vec<&str> = r.words.iter().map(|w| w.token()).collect();
        let ht: Vec<&str> = h.words.iter().map(|w| w.token()).collect();
        length += rt.len() as u64;
        if scoring.keep_alignments {
            let a = levenshtein(&rt, &ht, &scoring.costs);
            errors += a.distance;
            counts += a.counts();
            blocks.push(AlignmentBlock {
                reference: r.speaker.clone(),
                hypothesis: h.stream.clone().or_else(|| h.speaker.clone()),
                ops: a.ops,
            });
        } else {
            let (d, c) = levenshtein_counts(&rt, &ht, &scoring.costs);
            errors += d;
            counts += c;
        }
    }
    let mut report = ErrorRateReport::from_counts(errors, length, counts);
    report.alignment = blocks;
    report
}

/// WER per session: all words of a session, in time order, form one
/// utterance on each side.
pub fn wer_by_session(reference: &Transcript, hypothesis: &Transcript, scoring: &Scoring) -> Result<ErrorRateReport> {
    let reference = canonical(reference)?;
    let hypothesis = canonical(hypothesis)?;
    let mut sessions = BTreeMap::new();
    for s in pair_sessions(&reference, &hypothesis) {
        let r = concat(s.id, &s.reference);
        let h = concat(s.id, &s.hypothesis);
        let rep = score_pairs(&[(&r, &h)], scoring);
        sessions.insert(s.id.to_owned(), rep);
    }
    let total = aggregate(sessions);
    if total.length == 0 && total.errors > 0 {
        return Err(Error::ZeroLengthReference { errors: total.errors });
    }
    Ok(total)
}

fn concat(session: &str, segments: &[&Segment]) -> Segment {
    let mut out = Segment::new(session, "", "");
    out.speaker = None;
    out.words = segments.iter().flat_map(|s| s.words.iter().cloned()).collect();
    out
}
