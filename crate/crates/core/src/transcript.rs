//! Transcript model shared by every metric: words, segments, transcripts and
//! the edit cost model, plus validation into canonical order.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative tolerance for comparing times read from decimal text.
pub const TIME_TOLERANCE: f64 = 1e-9;

/// `a <= b` up to [`TIME_TOLERANCE`] relative to the magnitude of the operands.
pub fn time_le(a: f64, b: f64) -> bool {
    a <= b + TIME_TOLERANCE * a.abs().max(b.abs()).max(1.0)
}

/// A closed time interval in seconds. Zero length is allowed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub begin: f64,
    pub end: f64,
}

impl Interval {
    pub fn new(begin: f64, end: f64) -> Result<Self> {
        if !begin.is_finite() || !end.is_finite() {
            return Err(Error::InvalidInterval {
                begin,
                end,
                reason: "times must be finite".into(),
            });
        }
        if begin < 0.0 {
            return Err(Error::InvalidInterval {
                begin,
                end,
                reason: "times must be nonnegative".into(),
            });
        }
        if !time_le(begin, end) {
            return Err(Error::InvalidInterval {
                begin,
                end,
                reason: "begin is after end".into(),
            });
        }
        Ok(Interval { begin, end })
    }

    pub fn duration(&self) -> f64 {
        self.end - self.begin
    }
}

/// A single token with optional timing.
#[derive(Debug, Clone, PartialEq)]
pub struct TimedWord {
    token: String,
    interval: Option<Interval>,
}

impl TimedWord {
    pub fn new(token: impl Into<String>) -> Result<Self> {
        let token = token.into();
        if token.is_empty() || token.chars().any(char::is_whitespace) {
            return Err(Error::EmptyToken { token });
        }
        Ok(TimedWord {
            token,
            interval: None,
        })
    }

    pub fn timed(token: impl Into<String>, begin: f64, end: f64) -> Result<Self> {
        let mut word = Self::new(token)?;
        word.interval = Some(Interval::new(begin, end)?);
        Ok(word)
    }

    pub fn token(&self) -> &str {
        &self.token
    }

    pub fn interval(&self) -> Option<Interval> {
        self.interval
    }

    pub fn begin(&self) -> Option<f64> {
        self.interval.map(|i| i.begin)
    }

    pub fn end(&self) -> Option<f64> {
        self.interval.map(|i| i.end)
    }

    pub fn with_interval(mut self, interval: Option<Interval>) -> Self {
        self.interval = interval;
        self
    }

    pub(crate) fn lowercase(&mut self) {
        self.token = self.token.to_lowercase();
    }
}

/// Splits text on runs of whitespace. No other normalization is applied.
pub fn tokenize(text: &str) -> Vec<TimedWord> {
    text.split_whitespace()
        .map(|t| TimedWord {
            token: t.to_owned(),
            interval: None,
        })
        .collect()
}

/// A transcribed unit: one utterance of the reference or one segment of a
/// system output stream.
#[derive(Debug, Clone, PartialEq)]
pub struct Segment {
    pub session_id: String,
    pub speaker: Option<String>,
    pub stream: Option<String>,
    pub begin: Option<f64>,
    pub end: Option<f64>,
    pub words: Vec<TimedWord>,
    /// Fields from the input record that the scorer does not interpret.
    pub extra: serde_json::Map<String, serde_json::Value>,
}

impl Segment {
    /// Untimed segment from whitespace-separated text.
    pub fn new(session_id: impl Into<String>, speaker: impl Into<String>, text: &str) -> Self {
        Segment {
            session_id: session_id.into(),
            speaker: Some(speaker.into()),
            stream: None,
            begin: None,
            end: None,
            words: tokenize(text),
            extra: Default::default(),
        }
    }

    /// Timed segment from whitespace-separated text.
    pub fn timed(
        session_id: impl Into<String>,
        speaker: impl Into<String>,
        begin: f64,
        end: f64,
        text: &str,
    ) -> Result<Self> {
        let iv = Interval::new(begin, end)?;
        Ok(Segment {
            begin: Some(iv.begin),
            end: Some(iv.end),
            ..Self::new(session_id, speaker, text)
        })
    }

    pub fn with_stream(mut self, stream: impl Into<String>) -> Self {
        self.stream = Some(stream.into());
        self
    }

    pub fn interval(&self) -> Option<Interval> {
        match (self.begin, self.end) {
            (Some(begin), Some(end)) => Some(Interval { begin, end }),
            _ => None,
        }
    }

    /// Label of the group this segment belongs to under `key`.
    pub fn group_label(&self, key: GroupKey) -> &str {
        let label = match key {
            GroupKey::Speaker => self.speaker.as_deref(),
            GroupKey::Stream => self.stream.as_deref().or(self.speaker.as_deref()),
        };
        label.unwrap_or("")
    }

    fn check(&self) -> Result<()> {
        for w in &self.words {
            if w.token.is_empty() || w.token.chars().any(char::is_whitespace) {
                return Err(Error::EmptyToken {
                    token: w.token.clone(),
                });
            }
        }
        if let (Some(b), Some(e)) = (self.begin, self.end) {
            let seg = Interval::new(b, e)?;
            for w in &self.words {
                if let Some(wi) = w.interval {
                    if !time_le(seg.begin, wi.begin) || !time_le(wi.end, seg.end) {
                        return Err(Error::InvalidInterval {
                            begin: wi.begin,
                            end: wi.end,
                            reason: format!(
                                "word {:?} lies outside its segment [{}, {}]",
                                w.token, seg.begin, seg.end
                            ),
                        });
                    }
                }
            }
        } else if self.begin.is_some() != self.end.is_some() {
            return Err(Error::MissingTiming {
                context: format!(
                    "segment in session {:?} has only one of begin/end",
                    self.session_id
                ),
            });
        }
        Ok(())
    }
}

/// Which label groups segments into streams.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GroupKey {
    /// Group by the speaker label (references, diarization-style outputs).
    Speaker,
    /// Group by the stream label, falling back to the speaker label.
    Stream,
}

/// A collection of segments across one or more sessions.
#[derive(Debug, Clone, PartialEq)]
pub struct Transcript {
    pub segments: Vec<Segment>,
    pub key: GroupKey,
}

impl Transcript {
    pub fn new(segments: Vec<Segment>, key: GroupKey) -> Self {
        Transcript { segments, key }
    }

    pub fn word_count(&self) -> usize {
        self.segments.iter().map(|s| s.words.len()).sum()
    }

    pub fn session_ids(&self) -> Vec<&str> {
        let mut ids: Vec<&str> = self.segments.iter().map(|s| s.session_id.as_str()).collect();
        ids.sort_unstable();
        ids.dedup();
        ids
    }

    /// Segments of each session, in transcript order.
    pub fn sessions(&self) -> BTreeMap<&str, Vec<&Segment>> {
        let mut out: BTreeMap<&str, Vec<&Segment>> = BTreeMap::new();
        for s in &self.segments {
            out.entry(s.session_id.as_str()).or_default().push(s);
        }
        out
    }

    /// Lowercases every token in place.
    pub fn lowercase(&mut self) {
        for s in &mut self.segments {
            for w in &mut s.words {
                w.lowercase();
            }
        }
    }
}

/// Splits the segments of one session into groups keyed by label.
pub fn group_segments<'a>(segments: &[&'a Segment], key: GroupKey) -> BTreeMap<&'a str, Vec<&'a Segment>> {
    let mut out: BTreeMap<&str, Vec<&Segment>> = BTreeMap::new();
    for s in segments {
        out.entry(s.group_label(key)).or_default().push(*s);
    }
    out
}

/// Concatenates the words of a sorted group of segments.
pub fn words_of<'a, I>(group: I) -> Vec<TimedWord>
where
    I: IntoIterator<Item = &'a Segment>,
{
    group.into_iter().flat_map(|s| s.words.iter().cloned()).collect()
}

/// Costs of the four alignment operations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CostModel {
    pub correct: u32,
    pub substitution: u32,
    pub insertion: u32,
    pub deletion: u32,
}

impl Default for CostModel {
    fn default() -> Self {
        CostModel {
            correct: 0,
            substitution: 1,
            insertion: 1,
            deletion: 1,
        }
    }
}

impl CostModel {
    pub fn new(correct: u32, substitution: u32, insertion: u32, deletion: u32) -> Result<Self> {
        if correct > substitution {
            return Err(Error::InvalidCostModel(format!(
                "correct cost {correct} exceeds substitution cost {substitution}"
            )));
        }
        Ok(CostModel {
            correct,
            substitution,
            insertion,
            deletion,
        })
    }

    pub fn is_unit(&self) -> bool {
        *self == CostModel::default()
    }
}

/// Which rules [`validate`] enforces.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ValidationPolicy {
    /// Reject segments of one stream that overlap in time.
    pub reject_overlap: bool,
    /// Reject segments without begin/end times.
    pub require_timing: bool,
    /// Reject sessions that contain no words at all.
    pub reject_empty_sessions: bool,
}

impl ValidationPolicy {
    pub fn strict() -> Self {
        ValidationPolicy {
            reject_overlap: true,
            require_timing: false,
            reject_empty_sessions: false,
        }
    }

    pub fn lenient() -> Self {
        ValidationPolicy {
            reject_overlap: false,
            require_timing: false,
            reject_empty_sessions: false,
        }
    }

    pub fn with_timing(mut self) -> Self {
        self.require_timing = true;
        self
    }
}

impl Default for ValidationPolicy {
    fn default() -> Self {
        Self::strict()
    }
}

/// Checks a transcript and returns it in canonical order: sessions sorted by
/// id, and within a fully timed session segments sorted by (begin, end,
/// input position). Sessions containing untimed segments keep input order.
pub fn validate(transcript: &Transcript, policy: ValidationPolicy) -> Result<Transcript> {
    for s in &transcript.segments {
        s.check()?;
        if policy.require_timing && s.interval().is_none() {
            return Err(Error::MissingTiming {
                context: format!(
                    "segment of {:?} in session {:?} has no begin/end time",
                    s.group_label(transcript.key),
                    s.session_id
                ),
            });
        }
    }

    let mut by_session: BTreeMap<&str, Vec<(usize, &Segment)>> = BTreeMap::new();
    for (idx, s) in transcript.segments.iter().enumerate() {
        by_session.entry(s.session_id.as_str()).or_default().push((idx, s));
    }

    let mut segments = Vec::with_capacity(transcript.segments.len());
    for (session, mut segs) in by_session {
        if segs.iter().all(|(_, s)| s.interval().is_some()) {
            segs.sort_by(|(ia, a), (ib, b)| {
                let (a, b) = (a.interval().unwrap(), b.interval().unwrap());
                a.begin
                    .total_cmp(&b.begin)
                    .then(a.end.total_cmp(&b.end))
                    .then(ia.cmp(ib))
            });
        }
        if policy.reject_empty_sessions && segs.iter().all(|(_, s)| s.words.is_empty()) {
            return Err(Error::EmptySession {
                session: session.to_owned(),
            });
        }
        segments.extend(segs.into_iter().map(|(_, s)| s.clone()));
    }

    let out = Transcript {
        segments,
        key: transcript.key,
    };
    if policy.reject_overlap {
        check_no_overlap(&out)?;
    }
    Ok(out)
}

/// Fails if two timed segments of the same (session, group) overlap.
/// Touching segments are fine. Expects canonical order.
pub fn check_no_overlap(transcript: &Transcript) -> Result<()> {
    for (session, segs) in transcript.sessions() {
        for (label, group) in group_segments(&segs, transcript.key) {
            let mut latest_end: Option<f64> = None;
            for seg in group {
                let Some(iv) = seg.interval() else { continue };
                if let Some(prev) = latest_end {
                    if !time_le(prev, iv.begin) {
                        return Err(Error::OverlapWithinStream {
                            session: session.to_owned(),
                            stream: label.to_owned(),
                            begin: iv.begin,
                            previous_end: prev,
                        });
                    }
                }
                latest_end = Some(latest_end.map_or(iv.end, |p| p.max(iv.end)));
            }
        }
    }
    Ok(())
}
