//! ORC-WER and MIMO-WER: reference segments are distributed over the output
//! streams so that the summed distance between each stream and the
//! concatenation of its segments is minimal.
//!
//! Both are one dynamic program. A state is a pair (how many utterances of
//! each reference chain are consumed, position in each output stream). The
//! positions are kept as a dense tensor per reference state; consuming the
//! next utterance of a chain on stream `c` runs an ordinary Levenshtein pass
//! along every one-dimensional slice of that tensor in direction `c`. ORC
//! has a single chain holding all utterances in time order, MIMO one chain
//! per speaker.

use std::collections::BTreeMap;

use crate::editdist::{levenshtein, levenshtein_counts, EditCounts};
use crate::error::{Error, Result};
use crate::transcript::{group_segments, CostModel, Segment, Transcript};

use super::report::{aggregate, AlignmentBlock, Assignment, ErrorRateReport, SegmentRef, StreamAssignment};
use super::{canonical, pair_sessions, Scoring, Vocab};

/// Utterance `utterance` of chain `chain` was placed on stream `stream`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct Pick {
    pub chain: usize,
    pub utterance: usize,
    pub stream: usize,
}

/// Optimal distance and the utterance placements in emission order.
pub(crate) fn solve(
    chains: &[Vec<Vec<u32>>],
    streams: &[Vec<u32>],
    costs: &CostModel,
    limit: u128,
) -> Result<(u64, Vec<Pick>)> {
    let ref_dims: Vec<usize> = chains.iter().map(|c| c.len() + 1).collect();
    let hyp_dims: Vec<usize> = streams.iter().map(|s| s.len() + 1).collect();
    let states = ref_dims
        .iter()
        .chain(&hyp_dims)
        .try_fold(1u128, |acc, &d| acc.checked_mul(d as u128))
        .unwrap_or(u128::MAX);
    if states > limit {
        return Err(Error::StateSpaceTooLarge { states, limit });
    }

    let ref_strides = strides(&ref_dims);
    let hyp_strides = strides(&hyp_dims);
    let n_ref = ref_dims.iter().product::<usize>();
    let tsize = hyp_dims.iter().product::<usize>();
    let ins = costs.insertion as u64;

    let mut tensors: Vec<Vec<u64>> = vec![Vec::new(); n_ref];
    tensors[0] = (0..tsize)
        .map(|flat| {
            let pos = decode(flat, &hyp_dims, &hyp_strides);
            pos.iter().sum::<usize>() as u64 * ins
        })
        .collect();

    let mut row = Vec::new();
    let mut next = Vec::new();
    for s in 0..n_ref {
        let consumed = decode(s, &ref_dims, &ref_strides);
        let (done, rest) = tensors.split_at_mut(s + 1);
        let src = &done[s];
        for (k, chain) in chains.iter().enumerate() {
            if consumed[k] == chain.len() {
                continue;
            }
            let dst = &mut rest[ref_strides[k] - 1];
            if dst.is_empty() {
                *dst = vec![u64::MAX; tsize];
            }
            let utt = &chain[consumed[k]];
            for (c, stream) in streams.iter().enumerate() {
                let (stride, len) = (hyp_strides[c], hyp_dims[c]);
                for base in (0..tsize).filter(|b| (b / stride) % len == 0) {
                    row.clear();
                    row.extend((0..len).map(|j| src[base + j * stride]));
                    relax(&mut row, ins);
                    for &w in utt {
                        step(&mut row, &mut next, w, stream, costs);
                    }
                    for (j, &v) in row.iter().enumerate() {
                        let cell = &mut dst[base + j * stride];
                        *cell = (*cell).min(v);
                    }
                }
            }
        }
    }

    let distance = tensors[n_ref - 1][tsize - 1];
    let picks = backtrace(chains, streams, costs, &tensors, &ref_dims, &ref_strides, &hyp_strides, distance);
    Ok((distance, picks))
}

fn strides(dims: &[usize]) -> Vec<usize> {
    let mut out = Vec::with_capacity(dims.len());
    let mut acc = 1;
    for d in dims {
        out.push(acc);
        acc *= d;
    }
    out
}

fn decode(mut flat: usize, dims: &[usize], strides: &[usize]) -> Vec<usize> {
    let mut out = vec![0; dims.len()];
    for k in (0..dims.len()).rev() {
        out[k] = flat / strides[k];
        flat %= strides[k];
    }
    out
}

/// Leading insertions: a stream may emit words before the utterance starts.
fn relax(row: &mut [u64], ins: u64) {
    for j in 1..row.len() {
        row[j] = row[j].min(row[j - 1].saturating_add(ins));
    }
}

/// One Levenshtein row update for reference word `w`.
fn step(row: &mut Vec<u64>, next: &mut Vec<u64>, w: u32, stream: &[u32], costs: &CostModel) {
    let (cor, sub) = (costs.correct as u64, costs.substitution as u64);
    let (ins, del) = (costs.insertion as u64, costs.deletion as u64);
    next.clear();
    next.push(row[0].saturating_add(del));
    for j in 1..row.len() {
        let d = row[j - 1].saturating_add(if stream[j - 1] == w { cor } else { sub });
        let v = d.min(row[j].saturating_add(del)).min(next[j - 1].saturating_add(ins));
        next.push(v);
    }
    std::mem::swap(row, next);
}

#[allow(clippy::too_many_arguments)]
fn backtrace(
    chains: &[Vec<Vec<u32>>],
    streams: &[Vec<u32>],
    costs: &CostModel,
    tensors: &[Vec<u64>],
    ref_dims: &[usize],
    ref_strides: &[usize],
    hyp_strides: &[usize],
    distance: u64,
) -> Vec<Pick> {
    let (cor, sub) = (costs.correct as u64, costs.substitution as u64);
    let (ins, del) = (costs.insertion as u64, costs.deletion as u64);
    let mut picks = Vec::new();
    let mut s = tensors.len() - 1;
    let mut pos: Vec<usize> = streams.iter().map(|h| h.len()).collect();
    let mut target = distance;

    while s != 0 {
        let consumed = decode(s, ref_dims, ref_strides);
        let flat: usize = pos.iter().zip(hyp_strides).map(|(p, st)| p * st).sum();
        let mut found = None;
        'search: for (k, chain) in chains.iter().enumerate() {
            if consumed[k] == 0 {
                continue;
            }
            let pred = s - ref_strides[k];
            let utt = &chain[consumed[k] - 1];
            for (c, stream) in streams.iter().enumerate() {
                let base = flat - pos[c] * hyp_strides[c];
                let raw: Vec<u64> = (0..=pos[c]).map(|j| tensors[pred][base + j * hyp_strides[c]]).collect();
                let mut relaxed = raw.clone();
                relax(&mut relaxed, ins);
                // full matrix over the prefix of the stream up to pos[c]
                let mut m = vec![relaxed.clone()];
                let mut row = relaxed.clone();
                let mut next = Vec::new();
                for &w in utt {
                    step(&mut row, &mut next, w, &stream[..pos[c]], costs);
                    m.push(row.clone());
                }
                if m[utt.len()][pos[c]] != target {
                    continue;
                }
                let (mut i, mut j) = (utt.len(), pos[c]);
                while i > 0 {
                    let here = m[i][j];
                    if j > 0 && m[i - 1][j - 1].saturating_add(if stream[j - 1] == utt[i - 1] { cor } else { sub }) == here {
                        i -= 1;
                        j -= 1;
                    } else if m[i - 1][j].saturating_add(del) == here {
                        i -= 1;
                    } else {
                        j -= 1;
                    }
                }
                while relaxed[j] != raw[j] {
                    j -= 1;
                }
                found = Some((k, c, pred, j, raw[j]));
                break 'search;
            }
        }
        let (k, c, pred, j, value) = found.expect("every reachable state has an optimal predecessor");
        picks.push(Pick {
            chain: k,
            utterance: consumed[k] - 1,
            stream: c,
        });
        pos[c] = j;
        s = pred;
        target = value;
    }
    picks.reverse();
    picks
}

/// Optimal reference combination WER.
///
/// Every reference utterance is assigned to exactly one hypothesis stream;
/// the utterances on a stream keep their global time order. Speaker labels of
/// the reference are ignored.
pub fn orc_wer(reference: &Transcript, hypothesis: &Transcript, scoring: &Scoring) -> Result<ErrorRateReport> {
    multi_stream(reference, hypothesis, scoring, false)
}

/// Multiple-input multiple-output WER.
///
/// As [`orc_wer`], but only the order within each reference speaker must be
/// kept, so utterances of different speakers may be interleaved freely on a
/// stream.
pub fn mimo_wer(reference: &Transcript, hypothesis: &Transcript, scoring: &Scoring) -> Result<ErrorRateReport> {
    multi_stream(reference, hypothesis, scoring, true)
}

fn multi_stream(
    reference: &Transcript,
    hypothesis: &Transcript,
    scoring: &Scoring,
    per_speaker: bool,
) -> Result<ErrorRateReport> {
    let reference = canonical(reference)?;
    let hypothesis = canonical(hypothesis)?;
    let mut sessions = BTreeMap::new();
    for s in pair_sessions(&reference, &hypothesis) {
        let rep = score_session(&s.reference, reference.key, &s.hypothesis, hypothesis.key, scoring, per_speaker)?;
        sessions.insert(s.id.to_owned(), rep);
    }
    let total = aggregate(sessions);
    if total.length == 0 && total.errors > 0 {
        return Err(Error::ZeroLengthReference { errors: total.errors });
    }
    Ok(total)
}

fn score_session<'a>(
    reference: &[&'a Segment],
    ref_key: crate::GroupKey,
    hypothesis: &[&'a Segment],
    hyp_key: crate::GroupKey,
    scoring: &Scoring,
    per_speaker: bool,
) -> Result<ErrorRateReport> {
    let mut vocab = Vocab::default();
    let mut tokens_of = |s: &'a Segment| -> Vec<u32> { s.words.iter().map(|w| vocab.id(w.token())).collect() };

    // name every reference segment by speaker and index within the speaker
    let mut seen: BTreeMap<&str, usize> = BTreeMap::new();
    let refs: Vec<(SegmentRef, Vec<u32>)> = reference
        .iter()
        .map(|&seg| {
            let speaker = seg.group_label(ref_key);
            let n = seen.entry(speaker).or_default();
            let id = SegmentRef {
                speaker: speaker.to_owned(),
                utterance: *n,
            };
            *n += 1;
            (id, tokens_of(seg))
        })
        .collect();

    let mut chain_members: Vec<Vec<usize>> = Vec::new();
    if per_speaker {
        let mut by_speaker: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
        for (idx, (id, _)) in refs.iter().enumerate() {
            by_speaker.entry(id.speaker.as_str()).or_default().push(idx);
        }
        chain_members.extend(by_speaker.into_values());
    } else if !refs.is_empty() {
        chain_members.push((0..refs.len()).collect());
    }
    let chains: Vec<Vec<Vec<u32>>> = chain_members
        .iter()
        .map(|m| m.iter().map(|&i| refs[i].1.clone()).collect())
        .collect();

    let mut labels: Vec<Option<String>> = Vec::new();
    let mut streams: Vec<Vec<u32>> = Vec::new();
    for (label, group) in group_segments(hypothesis, hyp_key) {
        labels.push(Some(label.to_owned()));
        streams.push(group.into_iter().flat_map(&mut tokens_of).collect());
    }
    if streams.is_empty() {
        labels.push(None);
        streams.push(Vec::new());
    }

    let (distance, picks) = solve(&chains, &streams, &scoring.costs, scoring.state_limit)?;

    let mut assigned: Vec<Vec<usize>> = vec![Vec::new(); streams.len()];
    for p in &picks {
        assigned[p.stream].push(chain_members[p.chain][p.utterance]);
    }

    let mut counts = EditCounts::default();
    let mut errors = 0;
    let mut blocks = Vec::new();
    for (c, members) in assigned.iter().enumerate() {
        let concat: Vec<u32> = members.iter().flat_map(|&i| refs[i].1.iter().copied()).collect();
        if scoring.keep_alignments {
            let a = levenshtein(&concat, &streams[c], &scoring.costs);
            errors += a.distance;
            counts += a.counts();
            blocks.push(AlignmentBlock {
                reference: None,
                hypothesis: labels[c].clone(),
                ops: a.ops,
            });
        } else {
            let (d, cnt) = levenshtein_counts(&concat, &streams[c], &scoring.costs);
            errors += d;
            counts += cnt;
        }
    }
    debug_assert_eq!(errors, distance);

    let length = refs.iter().map(|(_, t)| t.len() as u64).sum();
    let mut report = ErrorRateReport::from_counts(errors, length, counts);
    report.assignment = Some(Assignment::Segments {
        streams: assigned
            .iter()
            .zip(labels)
            .map(|(members, stream)| StreamAssignment {
                stream,
                segments: members.iter().map(|&i| refs[i].0.clone()).collect(),
            })
            .collect(),
    });
    report.alignment = blocks;
    Ok(report)
}
