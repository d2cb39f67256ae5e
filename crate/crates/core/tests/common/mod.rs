//! Brute-force reference implementations and random instance builders
//! shared by the integration tests.
#![allow(dead_code)]

use itertools::Itertools;
use meetwer::{CostModel, GroupKey, Segment, TimedWord, Transcript};
use rand::Rng;

pub fn c(costs: &CostModel) -> (u64, u64, u64, u64) {
    (
        costs.correct as u64,
        costs.substitution as u64,
        costs.insertion as u64,
        costs.deletion as u64,
    )
}

/// Edit distance by plain recursion over the first symbols.
pub fn lev_recursive<T: PartialEq>(a: &[T], b: &[T], costs: &CostModel) -> u64 {
    let (cor, sub, ins, del) = c(costs);
    match (a, b) {
        ([], _) => b.len() as u64 * ins,
        (_, []) => a.len() as u64 * del,
        ([x, ra @ ..], [y, rb @ ..]) => {
            let diag = lev_recursive(ra, rb, costs) + if x == y { cor } else { sub };
            let d = lev_recursive(ra, b, costs) + del;
            let i = lev_recursive(a, rb, costs) + ins;
            diag.min(d).min(i)
        }
    }
}

/// Full-matrix edit distance where the diagonal step into `(i, j)` costs
/// `diag(i, j)` (`None` when forbidden, i.e. replaced by deletion plus
/// insertion).
pub fn lev_matrix<F: Fn(usize, usize) -> Option<u64>>(n: usize, m: usize, costs: &CostModel, diag: F) -> u64 {
    let (_, _, ins, del) = c(costs);
    let mut d = vec![vec![0u64; m + 1]; n + 1];
    for i in 0..=n {
        for j in 0..=m {
            d[i][j] = match (i, j) {
                (0, _) => j as u64 * ins,
                (_, 0) => i as u64 * del,
                _ => {
                    let step = diag(i - 1, j - 1).unwrap_or(ins + del);
                    (d[i - 1][j - 1] + step).min(d[i - 1][j] + del).min(d[i][j - 1] + ins)
                }
            };
        }
    }
    d[n][m]
}

pub fn lev_full<T: PartialEq>(a: &[T], b: &[T], costs: &CostModel) -> u64 {
    let (cor, sub, _, _) = c(costs);
    lev_matrix(a.len(), b.len(), costs, |i, j| Some(if a[i] == b[j] { cor } else { sub }))
}

/// Two timed words may be matched when their intervals, widened by the
/// collar, overlap.
pub fn allowed(r: (f64, f64), h: (f64, f64), collar: f64) -> bool {
    h.0 < r.1 + collar && r.0 < h.1 + collar
}

/// Time-constrained distance: forbidden matches cost a deletion plus an
/// insertion.
pub fn tc_full(r: &[(u32, f64, f64)], h: &[(u32, f64, f64)], collar: f64, costs: &CostModel) -> u64 {
    let (cor, sub, _, _) = c(costs);
    lev_matrix(r.len(), h.len(), costs, |i, j| {
        let (rt, rb, re) = r[i];
        let (ht, hb, he) = h[j];
        if allowed((rb, re), (hb, he), collar) {
            Some(if rt == ht { cor } else { sub })
        } else {
            None
        }
    })
}

/// Minimum over all speaker/stream permutations after padding with empty
/// streams. Returns the cost and the first minimizing permutation, as the
/// reference index for each hypothesis index.
pub fn cp_brute<D: Fn(usize, usize) -> u64>(n_ref: usize, n_hyp: usize, dist: D) -> (u64, Vec<usize>) {
    let n = n_ref.max(n_hyp);
    if n == 0 {
        return (0, Vec::new());
    }
    (0..n)
        .permutations(n)
        .map(|p| {
            let cost = p.iter().enumerate().map(|(k, &r)| dist(r, k)).sum::<u64>();
            (cost, p)
        })
        .min_by_key(|(cost, _)| *cost)
        .unwrap()
}

/// ORC by enumeration: every segment (in global order) picks a stream.
pub fn orc_brute(segments: &[Vec<u32>], streams: &[Vec<u32>], costs: &CostModel) -> u64 {
    let c = streams.len().max(1);
    let empty = [Vec::new()];
    let streams = if streams.is_empty() { &empty[..] } else { streams };
    let n = segments.len();
    let mut best = u64::MAX;
    for code in 0..c.pow(n as u32) {
        let mut concat = vec![Vec::new(); c];
        let mut x = code;
        for seg in segments {
            concat[x % c].extend_from_slice(seg);
            x /= c;
        }
        let cost = (0..c).map(|k| lev_full(&concat[k], &streams[k], costs)).sum();
        best = best.min(cost);
    }
    best
}

/// MIMO by enumeration: every interleaving of the speakers' segment lists
/// that keeps each speaker's order, times every stream choice per segment.
pub fn mimo_brute(speakers: &[Vec<Vec<u32>>], streams: &[Vec<u32>], costs: &CostModel) -> u64 {
    let mut orders = Vec::new();
    let mut cursor = vec![0; speakers.len()];
    interleavings(speakers, &mut cursor, &mut Vec::new(), &mut orders);
    orders
        .into_iter()
        .map(|order| {
            let segs: Vec<Vec<u32>> = order.iter().map(|&(k, u)| speakers[k][u].clone()).collect();
            orc_brute(&segs, streams, costs)
        })
        .min()
        .unwrap_or(0)
}

fn interleavings(
    speakers: &[Vec<Vec<u32>>],
    cursor: &mut Vec<usize>,
    prefix: &mut Vec<(usize, usize)>,
    out: &mut Vec<Vec<(usize, usize)>>,
) {
    let mut any = false;
    for k in 0..speakers.len() {
        if cursor[k] < speakers[k].len() {
            any = true;
            prefix.push((k, cursor[k]));
            cursor[k] += 1;
            interleavings(speakers, cursor, prefix, out);
            cursor[k] -= 1;
            prefix.pop();
        }
    }
    if !any {
        out.push(prefix.clone());
    }
}

pub fn random_tokens<R: Rng>(rng: &mut R, max_len: usize, alphabet: u32) -> Vec<u32> {
    let n = rng.gen_range(0..=max_len);
    (0..n).map(|_| rng.gen_range(0..alphabet)).collect()
}

pub fn text(tokens: &[u32]) -> String {
    tokens.iter().map(|t| format!("w{t}")).join(" ")
}

/// A random session of timed segments on the given labels. Segments of one
/// label never overlap each other.
pub fn random_session<R: Rng>(
    rng: &mut R,
    session: &str,
    labels: &[String],
    max_segments: usize,
    max_words: usize,
    alphabet: u32,
) -> Vec<Segment> {
    let mut out = Vec::new();
    for label in labels {
        let mut t = rng.gen_range(0.0..3.0);
        for _ in 0..rng.gen_range(0..=max_segments) {
            let words = random_tokens(rng, max_words, alphabet);
            let len = rng.gen_range(0.1..4.0);
            let (b, e) = (round3(t), round3(t + len));
            out.push(Segment::timed(session, label.as_str(), b, e, &text(&words)).unwrap());
            t = e + rng.gen_range(0.0..3.0);
        }
    }
    out
}

pub fn round3(t: f64) -> f64 {
    (t * 1000.0).round() / 1000.0
}

pub fn labels(prefix: &str, n: usize) -> Vec<String> {
    (0..n).map(|k| format!("{prefix}{k}")).collect()
}

/// Token ids of the words of `segments`, concatenated.
pub fn ids(segments: &[&Segment]) -> Vec<u32> {
    segments
        .iter()
        .flat_map(|s| s.words.iter().map(|w| w.token()[1..].parse::<u32>().unwrap()))
        .collect()
}

pub fn timed_word(token: &str, b: f64, e: f64) -> TimedWord {
    TimedWord::timed(token, b, e).unwrap()
}

pub fn transcript(segments: Vec<Segment>) -> Transcript {
    Transcript::new(segments, GroupKey::Speaker)
}
