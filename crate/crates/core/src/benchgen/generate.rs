use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::transcript::{GroupKey, Segment, TimedWord, Transcript};

/// Parameters of a synthetic meeting.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MeetingSpec {
    pub session_id: String,
    pub speakers: usize,
    /// Meeting length in seconds; no segment ends later.
    pub duration: f64,
    /// Inclusive range of words per utterance.
    pub utterance_words: (usize, usize),
    /// Inclusive range of the silence in seconds before each utterance of a
    /// speaker.
    pub pause: (f64, f64),
    /// Seconds per word.
    pub word_duration: f64,
    /// Chance that an utterance may overlap utterances of other speakers.
    /// Otherwise it is moved to the next gap where nobody speaks.
    pub overlap_probability: f64,
    pub vocabulary_size: usize,
    /// Per reference word.
    pub substitution_rate: f64,
    /// Per reference word, an extra word after it.
    pub insertion_rate: f64,
    /// Per reference word.
    pub deletion_rate: f64,
    /// Per segment: the segment shows up on another speaker's stream.
    pub confusion_probability: f64,
    pub seed: u64,
}

impl Default for MeetingSpec {
    fn default() -> Self {
        MeetingSpec {
            session_id: "meeting".to_owned(),
            speakers: 4,
            duration: 600.0,
            utterance_words: (3, 12),
            pause: (0.5, 6.0),
            word_duration: 0.4,
            overlap_probability: 0.2,
            vocabulary_size: 1000,
            substitution_rate: 0.1,
            insertion_rate: 0.05,
            deletion_rate: 0.05,
            confusion_probability: 0.02,
            seed: 0,
        }
    }
}

impl MeetingSpec {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidSpec(m));
        for (name, p) in [
            ("overlap_probability", self.overlap_probability),
            ("substitution_rate", self.substitution_rate),
            ("insertion_rate", self.insertion_rate),
            ("deletion_rate", self.deletion_rate),
            ("confusion_probability", self.confusion_probability),
        ] {
            if !(0.0..=1.0).contains(&p) {
                return bad(format!("{name} = {p} is not a probability"));
            }
        }
        if self.substitution_rate + self.deletion_rate > 1.0 {
            return bad("substitution_rate + deletion_rate exceeds 1".to_owned());
        }
        if self.speakers == 0 {
            return bad("at least one speaker is needed".to_owned());
        }
        if self.session_id.is_empty() {
            return bad("session_id is empty".to_owned());
        }
        if !(self.duration.is_finite() && self.duration > 0.0) {
            return bad(format!("duration {} must be positive", self.duration));
        }
        if !(self.word_duration.is_finite() && self.word_duration > 0.0) {
            return bad(format!("word_duration {} must be positive", self.word_duration));
        }
        let (lo, hi) = self.utterance_words;
        if lo == 0 || lo > hi {
            return bad(format!("utterance_words ({lo}, {hi}) must satisfy 1 <= min <= max"));
        }
        let (plo, phi) = self.pause;
        if !(plo.is_finite() && phi.is_finite() && 0.0 <= plo && plo <= phi) {
            return bad(format!("pause ({plo}, {phi}) must satisfy 0 <= min <= max"));
        }
        if self.vocabulary_size < 2 {
            return bad("vocabulary_size must be at least 2".to_owned());
        }
        Ok(())
    }
}

/// Output of [`generate`].
#[derive(Debug, Clone, PartialEq)]
pub struct Meeting {
    pub reference: Transcript,
    /// Segment `i` is derived from reference segment `i`.
    pub hypothesis: Transcript,
    /// Word edits applied; a segment moved to another stream counts as
    /// deleting and inserting each of its words.
    pub injected_edit_count: u64,
}

// times in files carry at most millisecond precision
fn ms(t: f64) -> f64 {
    (t * 1000.0).round() / 1000.0
}

/// Generates a reference meeting and a corrupted hypothesis.
///
/// Speakers talk sequentially with random pauses. The hypothesis keeps the
/// segment times and applies per-word substitutions, deletions and
/// insertions; a confused segment moves unchanged to another speaker's
/// stream if it fits there without overlap.
pub fn generate(spec: &MeetingSpec) -> Result<Meeting> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let vocab: Vec<String> = (0..spec.vocabulary_size).map(|i| format!("w{i}")).collect();
    let labels: Vec<String> = (0..spec.speakers).map(|k| format!("spk{k}")).collect();

    // (speaker, begin, end, words)
    let mut utterances: Vec<(usize, f64, f64, Vec<usize>)> = Vec::new();
    // merged busy intervals of speakers generated so far
    let mut busy: Vec<(f64, f64)> = Vec::new();
    for k in 0..spec.speakers {
        let mut mine = Vec::new();
        let mut t = 0.0;
        loop {
            t = ms(t + rng.gen_range(spec.pause.0..=spec.pause.1));
            let n = rng.gen_range(spec.utterance_words.0..=spec.utterance_words.1);
            let len = ms(n as f64 * spec.word_duration);
            let mut begin = t;
            if !rng.gen_bool(spec.overlap_probability) {
                begin = next_gap(&busy, begin, len);
            }
            let end = ms(begin + len);
            if end > spec.duration {
                break;
            }
            let words = (0..n).map(|_| rng.gen_range(0..vocab.len())).collect();
            mine.push((begin, end));
            utterances.push((k, begin, end, words));
            t = end;
        }
        busy = merge(busy, mine);
    }
    utterances.sort_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)));

    let mut injected = 0u64;
    let mut streams: Vec<Vec<(f64, f64)>> = vec![Vec::new(); spec.speakers];
    for (k, b, e, _) in &utterances {
        streams[*k].push((*b, *e));
    }
    let mut reference = Vec::with_capacity(utterances.len());
    let mut hypothesis = Vec::with_capacity(utterances.len());
    for (k, begin, end, words) in &utterances {
        let mut seg = Segment::timed(&spec.session_id, &labels[*k], *begin, *end, "")?;
        seg.words = words.iter().map(|&w| word(&vocab[w])).collect();
        reference.push(seg.clone());

        if spec.speakers > 1 && rng.gen_bool(spec.confusion_probability) {
            let others: Vec<usize> = (0..spec.speakers).filter(|o| o != k).collect();
            let target = *others.choose(&mut rng).unwrap();
            if streams[target].iter().all(|&(b, e)| e <= *begin || *end <= b) {
                streams[target].push((*begin, *end));
                streams[*k].retain(|&iv| iv != (*begin, *end));
                seg.speaker = Some(labels[target].clone());
                injected += 2 * words.len() as u64;
                hypothesis.push(seg);
                continue;
            }
        }

        let mut out = Vec::with_capacity(words.len());
        for &w in words {
            let r: f64 = rng.gen();
            if r < spec.deletion_rate {
                injected += 1;
            } else if r < spec.deletion_rate + spec.substitution_rate {
                let shift = rng.gen_range(1..vocab.len());
                out.push(word(&vocab[(w + shift) % vocab.len()]));
                injected += 1;
            } else {
                out.push(word(&vocab[w]));
            }
            if rng.gen_bool(spec.insertion_rate) {
                out.push(word(&vocab[rng.gen_range(0..vocab.len())]));
                injected += 1;
            }
        }
        seg.words = out;
        hypothesis.push(seg);
    }

    Ok(Meeting {
        reference: Transcript::new(reference, GroupKey::Speaker),
        hypothesis: Transcript::new(hypothesis, GroupKey::Speaker),
        injected_edit_count: injected,
    })
}

fn word(token: &str) -> TimedWord {
    TimedWord::new(token).expect("vocabulary words are valid tokens")
}

/// Earliest begin `>= t` such that `[begin, begin + len]` does not overlap
/// any busy interval (touching is fine).
fn next_gap(busy: &[(f64, f64)], t: f64, len: f64) -> f64 {
    let mut begin = t;
    for &(b, e) in busy {
        if e <= begin {
            continue;
        }
        if begin + len <= b {
            break;
        }
        begin = e;
    }
    begin
}

fn merge(mut a: Vec<(f64, f64)>, b: Vec<(f64, f64)>) -> Vec<(f64, f64)> {
    a.extend(b);
    a.sort_by(|x, y| x.0.total_cmp(&y.0));
    let mut out: Vec<(f64, f64)> = Vec::with_capacity(a.len());
    for (b, e) in a {
        match out.last_mut() {
            Some(last) if b <= last.1 => last.1 = last.1.max(e),
            _ => out.push((b, e)),
        }
    }
    out
}
