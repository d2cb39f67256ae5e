//! Pseudo-word-level timing: per-word intervals inferred from segment times.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::transcript::{Interval, Segment};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PseudoWordStrategy {
    /// Every word spans the whole segment.
    FullSegment,
    /// The segment is split into equally long intervals, one per word.
    EqualIntervals,
    /// Interval lengths proportional to the number of characters per word.
    CharacterBased,
    /// Zero-length points at the centers of the character-based intervals.
    CharacterBasedPoints,
}

impl PseudoWordStrategy {
    pub const ALL: [PseudoWordStrategy; 4] = [
        PseudoWordStrategy::FullSegment,
        PseudoWordStrategy::EqualIntervals,
        PseudoWordStrategy::CharacterBased,
        PseudoWordStrategy::CharacterBasedPoints,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            PseudoWordStrategy::FullSegment => "full_segment",
            PseudoWordStrategy::EqualIntervals => "equal_intervals",
            PseudoWordStrategy::CharacterBased => "character_based",
            PseudoWordStrategy::CharacterBasedPoints => "character_based_points",
        }
    }
}

impl fmt::Display for PseudoWordStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PseudoWordStrategy {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        let norm = s.trim().replace('-', "_");
        PseudoWordStrategy::ALL
            .into_iter()
            .find(|p| p.name() == norm)
            .ok_or_else(|| {
                format!(
                    "unknown pseudo-word strategy {s:?} (expected one of: {})",
                    PseudoWordStrategy::ALL.map(|p| p.name()).join(", ")
                )
            })
    }
}

/// Characters counted per token: Unicode scalar values, whitespace excluded.
pub fn char_count(token: &str) -> usize {
    token.chars().filter(|c| !c.is_whitespace()).count()
}

/// Word intervals for `tokens` spoken within `segment`.
pub fn pseudo_word_intervals(segment: Interval, tokens: &[&str], strategy: PseudoWordStrategy) -> Vec<Interval> {
    let n = tokens.len();
    if n == 0 {
        return Vec::new();
    }
    if strategy == PseudoWordStrategy::FullSegment {
        return vec![segment; n];
    }

    let weights: Vec<usize> = match strategy {
        PseudoWordStrategy::EqualIntervals => vec![1; n],
        _ => tokens.iter().map(|t| char_count(t)).collect(),
    };
    let total: usize = weights.iter().sum();
    let (begin, end) = (segment.begin, segment.end);
    let duration = end - begin;

    // shared boundaries make the intervals partition the segment exactly
    let mut bounds = Vec::with_capacity(n + 1);
    bounds.push(begin);
    let mut acc = 0usize;
    for w in &weights[..n - 1] {
        acc += w;
        let t = if total == 0 {
            begin
        } else {
            begin + duration * (acc as f64 / total as f64)
        };
        bounds.push(t.clamp(*bounds.last().unwrap(), end));
    }
    bounds.push(end);

    bounds
        .windows(2)
        .map(|w| {
            if strategy == PseudoWordStrategy::CharacterBasedPoints {
                let mid = (w[0] + w[1]) / 2.0;
                Interval { begin: mid, end: mid }
            } else {
                Interval { begin: w[0], end: w[1] }
            }
        })
        .collect()
}

/// Fills in word times from the segment times.
///
/// Words that already carry times keep them; a segment with only some words
/// timed is rejected. Use [`apply_pseudo_timing_forced`] to overwrite.
pub fn apply_pseudo_timing(segment: &Segment, strategy: PseudoWordStrategy) -> Result<Segment> {
    let timed = segment.words.iter().filter(|w| w.interval().is_some()).count();
    if timed == segment.words.len() {
        return Ok(segment.clone());
    }
    if timed > 0 {
        return Err(Error::MissingTiming {
            context: format!(
                "segment of {:?} in session {:?} has times for only {timed} of {} words",
                segment.speaker.as_deref().unwrap_or(""),
                segment.session_id,
                segment.words.len()
            ),
        });
    }
    apply_pseudo_timing_forced(segment, strategy)
}

/// Replaces all word times with the pseudo-word intervals of `strategy`.
pub fn apply_pseudo_timing_forced(segment: &Segment, strategy: PseudoWordStrategy) -> Result<Segment> {
    if segment.words.is_empty() {
        return Ok(segment.clone());
    }
    let iv = segment.interval().ok_or_else(|| Error::MissingTiming {
        context: format!(
            "segment of {:?} in session {:?} has no begin/end time",
            segment.stream.as_deref().or(segment.speaker.as_deref()).unwrap_or(""),
            segment.session_id
        ),
    })?;
    let tokens: Vec<&str> = segment.words.iter().map(|w| w.token()).collect();
    let intervals = pseudo_word_intervals(iv, &tokens, strategy);
    let mut out = segment.clone();
    for (w, t) in out.words.iter_mut().zip(intervals) {
        *w = w.clone().with_interval(Some(t));
    }
    Ok(out)
}
