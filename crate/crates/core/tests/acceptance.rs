//! Acceptance checks. Runs as a plain binary and prints one PASS/FAIL line
//! per criterion; exits non-zero if any criterion fails.

mod common;

use std::collections::BTreeMap;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use common::*;
use meetwer::benchgen::{generate, profile, MeetingSpec};
use meetwer::editdist::{levenshtein, levenshtein_counts, levenshtein_distance, tc_counts, tc_levenshtein, Collar, TimedSeq};
use meetwer::io::{read_seglst, read_stm, write_seglst};
use meetwer::metrics::{
    cp_wer, mimo_wer, orc_wer, pseudo_word_intervals, tcp_wer, Assignment, PseudoWordStrategy, SpeakerPair,
};
use meetwer::{CostModel, Error, GroupKey, Interval, Location, Metric, Scoring, Segment, TimeConstraint, Transcript};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {{
        let ok: bool = $cond;
        if !ok {
            return Err(format!($($fmt)+));
        }
    }};
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("oracle equivalence, edit distance", edit_distance),
        ("oracle equivalence, cpWER", cpwer_oracle),
        ("oracle equivalence, ORC/MIMO", orc_mimo_oracle),
        ("banded equivalence", banded),
        ("collar limit and monotonicity", collar_limit),
        ("pseudo-word partition", pseudo_word_partition),
        ("error-injection soundness", soundness),
        ("performance trend", performance),
        ("format round-trip", format_round_trip),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(check).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".to_owned()))
        });
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS  {name}: {detail} [{secs:.2} s]"),
            Err(detail) => {
                failed += 1;
                println!("FAIL  {name}: {detail} [{secs:.2} s]");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn random_costs<R: Rng>(rng: &mut R) -> CostModel {
    let sub = rng.gen_range(1..=4);
    CostModel::new(rng.gen_range(0..=sub.min(1)), sub, rng.gen_range(1..=3), rng.gen_range(1..=3)).unwrap()
}

fn edit_distance() -> Check {
    let mut r = rng(1);
    let start = Instant::now();
    for case in 0..500 {
        let a = random_tokens(&mut r, 6, 3);
        let b = random_tokens(&mut r, 6, 3);
        let costs = if case % 2 == 0 { CostModel::default() } else { random_costs(&mut r) };
        let want = lev_recursive(&a, &b, &costs);
        let al = levenshtein(&a, &b, &costs);
        ensure!(al.distance == want, "case {case}: {a:?} vs {b:?}: got {} want {want}", al.distance);
        ensure!(levenshtein_distance(&a, &b, &costs) == want, "case {case}: two-row distance differs");
        let (d, counts) = levenshtein_counts(&a, &b, &costs);
        ensure!(d == want && counts == al.counts(), "case {case}: counts differ from alignment");
        ensure!(counts.cost(&costs) == want, "case {case}: op costs do not sum to distance");
        ensure!(
            counts.correct + counts.substitutions + counts.deletions == a.len() as u64
                && counts.correct + counts.substitutions + counts.insertions == b.len() as u64,
            "case {case}: ops do not cover the sequences"
        );
    }
    let t = start.elapsed();
    ensure!(t < Duration::from_secs(5), "took {t:?}");
    Ok(format!("500 pairs exact, {:.3} s", t.as_secs_f64()))
}

/// Group tokens by label in label order, as a scorer sees them.
fn groups(t: &Transcript, key: GroupKey) -> (Vec<String>, Vec<Vec<u32>>) {
    let canon = meetwer::transcript::validate(t, meetwer::ValidationPolicy::lenient()).unwrap();
    let segs: Vec<&Segment> = canon.segments.iter().collect();
    let g = meetwer::transcript::group_segments(&segs, key);
    (g.keys().map(|k| k.to_string()).collect(), g.values().map(|v| ids(v)).collect())
}

fn cpwer_oracle() -> Check {
    let mut r = rng(2);
    let mut sizes = BTreeMap::new();
    for case in 0..200 {
        let k = r.gen_range(0..=5);
        let c = r.gen_range(if k == 0 { 1 } else { 0 }..=5);
        let reference = transcript(random_session(&mut r, "S", &labels("spk", k), 3, 4, 4));
        let hypothesis = transcript(random_session(&mut r, "S", &labels("out", c), 3, 4, 4));
        let costs = if case % 4 == 3 { random_costs(&mut r) } else { CostModel::default() };

        let (rl, rt) = groups(&reference, GroupKey::Speaker);
        let (hl, ht) = groups(&hypothesis, GroupKey::Speaker);
        let empty = Vec::new();
        let get = |v: &[Vec<u32>], i: usize| v.get(i).unwrap_or(&empty).clone();
        let (want, perm) = cp_brute(rt.len(), ht.len(), |i, j| lev_full(&get(&rt, i), &get(&ht, j), &costs));
        *sizes.entry(rt.len().max(ht.len())).or_insert(0) += 1;

        let rep = match cp_wer(&reference, &hypothesis, &Scoring::from(costs)) {
            Ok(rep) => rep,
            Err(Error::ZeroLengthReference { .. }) => {
                ensure!(rt.iter().all(|x| x.is_empty()) && want > 0, "case {case}: unexpected zero-length error");
                continue;
            }
            Err(e) => return Err(format!("case {case}: {e}")),
        };
        ensure!(rep.errors == want, "case {case}: got {} want {want}", rep.errors);
        ensure!(rep.length == rt.iter().map(|x| x.len() as u64).sum::<u64>(), "case {case}: length");

        let mut expected = vec![None; perm.len()];
        for (col, &row) in perm.iter().enumerate() {
            expected[row] = Some(SpeakerPair {
                reference: rl.get(row).cloned(),
                hypothesis: hl.get(col).cloned(),
            });
        }
        let expected: Vec<SpeakerPair> = expected.into_iter().map(Option::unwrap).collect();
        let got = match rep.assignment {
            // no segments on either side means no session to assign
            None if reference.segments.is_empty() && hypothesis.segments.is_empty() => continue,
            Some(Assignment::Permutation { pairs }) => pairs,
            other => return Err(format!("case {case}: assignment {other:?}")),
        };
        ensure!(got == expected, "case {case}: assignment {got:?} want {expected:?}");
    }
    Ok(format!("200 sessions exact, K' histogram {sizes:?}"))
}

fn orc_mimo_oracle() -> Check {
    let mut r = rng(3);
    for case in 0..100 {
        let n_spk = r.gen_range(1..=3);
        let n_seg = r.gen_range(1..=6);
        let n_streams = r.gen_range(1..=2);
        let costs = if case % 5 == 4 { random_costs(&mut r) } else { CostModel::default() };

        let mut segs = Vec::new();
        for i in 0..n_seg {
            let spk = format!("spk{}", r.gen_range(0..n_spk));
            let b = round3(r.gen_range(0.0..10.0));
            let words = random_tokens(&mut r, 3, 3);
            let _ = i;
            segs.push(Segment::timed("S", spk, b, b + 1.0, &text(&words)).unwrap());
        }
        // hypothesis: shuffled and corrupted copies of the reference words
        let mut streams: Vec<Vec<u32>> = vec![Vec::new(); n_streams];
        for s in &segs {
            let mut toks = ids(&[s]);
            if r.gen_bool(0.3) && !toks.is_empty() {
                let at = r.gen_range(0..toks.len());
                toks[at] = r.gen_range(0..3);
            }
            if r.gen_bool(0.2) {
                toks.push(r.gen_range(0..3));
            }
            streams[r.gen_range(0..n_streams)].extend(toks);
        }
        let hyp_segs: Vec<Segment> = streams
            .iter()
            .enumerate()
            .map(|(c, toks)| Segment::timed("S", format!("out{c}"), 0.0, 20.0, &text(toks)).unwrap())
            .collect();

        // oracle inputs: global time order and per-speaker order
        let mut order: Vec<usize> = (0..segs.len()).collect();
        order.sort_by(|&a, &b| segs[a].begin.unwrap().total_cmp(&segs[b].begin.unwrap()).then(a.cmp(&b)));
        let global: Vec<Vec<u32>> = order.iter().map(|&i| ids(&[&segs[i]])).collect();
        let mut by_spk: BTreeMap<String, Vec<Vec<u32>>> = BTreeMap::new();
        for &i in &order {
            by_spk.entry(segs[i].speaker.clone().unwrap()).or_default().push(ids(&[&segs[i]]));
        }
        let by_spk: Vec<Vec<Vec<u32>>> = by_spk.into_values().collect();
        let want_orc = orc_brute(&global, &streams, &costs);
        let want_mimo = mimo_brute(&by_spk, &streams, &costs);

        let reference = transcript(segs);
        let hypothesis = Transcript::new(hyp_segs, GroupKey::Stream);
        let scoring = Scoring::from(costs);
        let orc = orc_wer(&reference, &hypothesis, &scoring).map_err(|e| format!("case {case}: {e}"))?;
        let mimo = mimo_wer(&reference, &hypothesis, &scoring).map_err(|e| format!("case {case}: {e}"))?;
        ensure!(orc.errors == want_orc, "case {case}: ORC got {} want {want_orc}", orc.errors);
        ensure!(mimo.errors == want_mimo, "case {case}: MIMO got {} want {want_mimo}", mimo.errors);
        ensure!(orc.errors >= mimo.errors, "case {case}: ORC < MIMO");
        for (name, rep) in [("ORC", &orc), ("MIMO", &mimo)] {
            ensure!(
                rep.insertions * costs.insertion as u64
                    + rep.deletions * costs.deletion as u64
                    + rep.substitutions * costs.substitution as u64
                    + (rep.length - rep.deletions - rep.substitutions) * costs.correct as u64
                    == rep.errors,
                "case {case}: {name} decomposition does not add up"
            );
        }
    }

    let reference = transcript(vec![
        Segment::timed("S", "A", 0.0, 1.0, "a").unwrap(),
        Segment::timed("S", "B", 1.0, 2.0, "b").unwrap(),
        Segment::timed("S", "A", 2.0, 3.0, "c").unwrap(),
    ]);
    let hypothesis = Transcript::new(vec![Segment::timed("S", "X", 0.0, 3.0, "a c b").unwrap()], GroupKey::Stream);
    let orc = orc_wer(&reference, &hypothesis, &Scoring::default()).unwrap();
    let mimo = mimo_wer(&reference, &hypothesis, &Scoring::default()).unwrap();
    ensure!(orc.errors == 2 && mimo.errors == 0, "a/c/b case: ORC {} MIMO {}", orc.errors, mimo.errors);
    Ok("100 instances exact, ORC >= MIMO, a/c/b gives ORC 2 / MIMO 0".to_owned())
}

fn banded() -> Check {
    let mut r = rng(4);
    let collars = [0.0, 0.1, 0.5, 1.0, 2.0, 5.0, f64::INFINITY];
    for case in 0..200 {
        let mut timed = |n_max: usize, jitter: f64| -> Vec<(u32, f64, f64)> {
            let n = r.gen_range(0..=n_max);
            let mut t = r.gen_range(0.0..2.0);
            (0..n)
                .map(|_| {
                    // mostly increasing, sometimes out of order
                    let b: f64 = (t + r.gen_range(-jitter..=jitter)).max(0.0);
                    let e = b + if r.gen_bool(0.2) { 0.0 } else { r.gen_range(0.0..1.5) };
                    t += r.gen_range(0.0..1.0);
                    (r.gen_range(0..4), round3(b), round3(e.max(b)))
                })
                .collect()
        };
        let jitter = if case % 3 == 0 { 2.0 } else { 0.0 };
        let a = timed(12, jitter);
        let b = timed(12, jitter);
        let collar = collars[case % collars.len()];
        let costs = if case % 4 == 1 { random_costs(&mut r) } else { CostModel::default() };

        let want = tc_full(&a, &b, collar, &costs);
        let words = |v: &[(u32, f64, f64)]| -> Vec<meetwer::TimedWord> {
            v.iter().map(|&(t, b, e)| timed_word(&format!("w{t}"), b, e)).collect()
        };
        let collar = Collar::new(collar).unwrap();
        let al = tc_levenshtein(&words(&a), &words(&b), collar, &costs).unwrap();
        ensure!(al.distance == want, "case {case}: got {} want {want} (collar {collar})", al.distance);
        ensure!(al.counts().cost(&costs) == want, "case {case}: alignment cost mismatch");

        let (at, ai): (Vec<u32>, Vec<Interval>) = a.iter().map(|&(t, b, e)| (t, Interval { begin: b, end: e })).unzip();
        let (bt, bi): (Vec<u32>, Vec<Interval>) = b.iter().map(|&(t, b, e)| (t, Interval { begin: b, end: e })).unzip();
        let (d, counts) = tc_counts(TimedSeq::new(&at, &ai), TimedSeq::new(&bt, &bi), collar, &costs);
        ensure!(d == want && counts == al.counts(), "case {case}: banded counts differ");
    }
    Ok("200 instances exact".to_owned())
}

fn collar_limit() -> Check {
    let mut r = rng(5);
    let grid = [0.5, 1.0, 2.0, 5.0, 10.0, 100.0, f64::INFINITY];
    for case in 0..50 {
        let k = r.gen_range(1..=4);
        let c = r.gen_range(1..=4);
        let reference = transcript(random_session(&mut r, "S", &labels("spk", k), 4, 6, 5));
        let mut hyp_segs = random_session(&mut r, "S", &labels("out", c), 4, 6, 5);
        hyp_segs.extend(random_session(&mut r, "T", &labels("out", c), 2, 4, 5));
        let mut ref_segs = reference.segments.clone();
        ref_segs.extend(random_session(&mut r, "T", &labels("spk", k), 2, 4, 5));
        let reference = transcript(ref_segs);
        let hypothesis = transcript(hyp_segs);

        let cp = match cp_wer(&reference, &hypothesis, &Scoring::default()) {
            Ok(x) => x,
            Err(Error::ZeroLengthReference { .. }) => continue,
            Err(e) => return Err(format!("case {case}: {e}")),
        };
        let inf = tcp_wer(&reference, &hypothesis, &TimeConstraint::with_collar(Collar::INFINITE), &Scoring::default())
            .map_err(|e| format!("case {case}: {e}"))?;
        ensure!(inf == cp, "case {case}: tcpWER(inf) {:?} differs from cpWER {:?}", inf.summary(), cp.summary());

        let mut prev = f64::INFINITY;
        for &g in &grid {
            let rep = tcp_wer(&reference, &hypothesis, &TimeConstraint::with_collar(Collar::new(g).unwrap()), &Scoring::default())
                .map_err(|e| format!("case {case}: {e}"))?;
            let rate = rep.error_rate().unwrap_or(0.0);
            ensure!(rate <= prev, "case {case}: rate rises from {prev} to {rate} at collar {g}");
            prev = rate;
        }
    }
    Ok("50 sessions: tcpWER(inf) == cpWER, rates nonincreasing over the grid".to_owned())
}

fn pseudo_word_partition() -> Check {
    let mut r = rng(6);
    let alphabet: Vec<char> = "abcdefghijklmnopqrstuvwxyzäöüßéñ日本語中文한국".chars().collect();
    let tol = 1e-9;
    for case in 0..1000 {
        let begin = round3(r.gen_range(0.0..5000.0));
        let dur = if case % 50 == 0 { 0.0 } else { r.gen_range(0.0..30.0) };
        let seg = Interval { begin, end: begin + dur };
        let n = r.gen_range(1..=12);
        let tokens: Vec<String> = (0..n)
            .map(|_| (0..r.gen_range(1..=9)).map(|_| alphabet[r.gen_range(0..alphabet.len())]).collect())
            .collect();
        let refs: Vec<&str> = tokens.iter().map(String::as_str).collect();
        let chars: Vec<f64> = tokens.iter().map(|t| t.chars().count() as f64).collect();
        let total: f64 = chars.iter().sum();

        for strategy in [PseudoWordStrategy::EqualIntervals, PseudoWordStrategy::CharacterBased] {
            let iv = pseudo_word_intervals(seg, &refs, strategy);
            ensure!(iv.len() == n, "case {case}: {n} words, {} intervals", iv.len());
            ensure!((iv[0].begin - seg.begin).abs() <= tol, "case {case}: {strategy} starts late");
            ensure!((iv[n - 1].end - seg.end).abs() <= tol, "case {case}: {strategy} ends early");
            for w in iv.windows(2) {
                ensure!((w[0].end - w[1].begin).abs() <= tol, "case {case}: {strategy} gap or overlap");
            }
            for (i, x) in iv.iter().enumerate() {
                let share = if strategy == PseudoWordStrategy::EqualIntervals { 1.0 / n as f64 } else { chars[i] / total };
                let want = dur * share;
                let got = x.end - x.begin;
                ensure!(
                    (got - want).abs() <= tol * want.max(1.0),
                    "case {case}: {strategy} word {i} width {got} want {want}"
                );
            }
        }
        let based = pseudo_word_intervals(seg, &refs, PseudoWordStrategy::CharacterBased);
        let points = pseudo_word_intervals(seg, &refs, PseudoWordStrategy::CharacterBasedPoints);
        for (p, b) in points.iter().zip(&based) {
            let mid = (b.begin + b.end) / 2.0;
            ensure!(p.begin == p.end && (p.begin - mid).abs() <= tol, "case {case}: point off center");
        }
    }
    Ok("1000 segments within 1e-9 s".to_owned())
}

fn soundness() -> Check {
    let mut r = rng(7);
    let mut worst = 0.0f64;
    for case in 0..50 {
        let speakers = r.gen_range(2..=3);
        let spec = MeetingSpec {
            session_id: format!("m{case}"),
            speakers,
            duration: if speakers == 2 { 60.0 } else { 30.0 },
            utterance_words: (2, 10),
            pause: (0.2, 4.0),
            word_duration: 0.45,
            overlap_probability: r.gen_range(0.0..=1.0),
            vocabulary_size: r.gen_range(5..200),
            substitution_rate: r.gen_range(0.0..0.3),
            insertion_rate: r.gen_range(0.0..0.3),
            deletion_rate: r.gen_range(0.0..0.3),
            confusion_probability: r.gen_range(0.0..0.3),
            seed: case,
        };
        let m = generate(&spec).map_err(|e| format!("meeting {case}: {e}"))?;
        for metric in Metric::ALL {
            let hyp = if matches!(metric, Metric::OrcWer | Metric::MimoWer) {
                Transcript::new(m.hypothesis.segments.clone(), GroupKey::Stream)
            } else {
                m.hypothesis.clone()
            };
            let rep = metric
                .evaluate(&m.reference, &hyp, &TimeConstraint::default(), &Scoring::default())
                .map_err(|e| format!("meeting {case}, {metric}: {e}"))?;
            ensure!(
                rep.errors <= m.injected_edit_count,
                "meeting {case}, {metric}: {} errors > {} injected",
                rep.errors,
                m.injected_edit_count
            );
            if m.injected_edit_count > 0 {
                worst = worst.max(rep.errors as f64 / m.injected_edit_count as f64);
            }
        }
    }
    Ok(format!("50 meetings x 5 metrics, max errors/injected = {worst:.3}"))
}

fn performance() -> Check {
    let spec = MeetingSpec {
        speakers: 8,
        duration: 3600.0,
        word_duration: 0.3,
        pause: (0.05, 0.5),
        overlap_probability: 1.0,
        seed: 11,
        ..Default::default()
    };
    let m = generate(&spec).map_err(|e| e.to_string())?;
    let p = profile(
        &m.reference,
        &m.hypothesis,
        &[Metric::CpWer, Metric::TcpWer],
        10,
        &TimeConstraint::with_collar(Collar::DEFAULT),
        &Scoring::default(),
    )
    .map_err(|e| e.to_string())?;
    let (cp, tcp) = (&p.timings[0], &p.timings[1]);
    let detail = format!(
        "{:.0} words/stream, {:.0} s; median cpWER {:.3} s, tcpWER {:.3} s; slowest run {:.3} s",
        p.words_per_stream,
        p.duration_seconds,
        cp.median_seconds,
        tcp.median_seconds,
        cp.max_seconds.max(tcp.max_seconds)
    );
    ensure!(p.words_per_stream >= 8000.0, "meeting too small: {detail}");
    ensure!(tcp.median_seconds < cp.median_seconds, "tcpWER not faster: {detail}");
    ensure!(cp.max_seconds < 60.0 && tcp.max_seconds < 60.0, "a run took a minute or more: {detail}");
    Ok(detail)
}

fn random_transcript<R: Rng>(r: &mut R) -> Transcript {
    let mut segs = Vec::new();
    for _ in 0..r.gen_range(0..8) {
        let session = format!("sess{}", r.gen_range(0..3));
        let speaker = format!("spk \"{}\"", r.gen_range(0..3));
        let words = random_tokens(r, 5, 50);
        let mut s = if r.gen_bool(0.8) {
            // times as a file holds them: decimal milliseconds
            let b_ms = r.gen_range(0..10_000_000u64);
            let e_ms = b_ms + r.gen_range(0..20_000);
            let (b, e) = (b_ms as f64 / 1000.0, e_ms as f64 / 1000.0);
            Segment::timed(session, speaker, b, e, &text(&words)).unwrap()
        } else {
            Segment::new(session, speaker, &text(&words))
        };
        if r.gen_bool(0.3) {
            s.stream = Some(format!("ch{}", r.gen_range(0..2)));
        }
        if r.gen_bool(0.3) {
            s.extra.insert("confidence".into(), json!(r.gen_range(0..100) as f64 / 100.0));
            s.extra.insert("tags".into(), json!(["x", {"k": r.gen_range(0..5)}]));
        }
        if let (Some(b), Some(e), true) = (s.begin, s.end, r.gen_bool(0.3)) {
            let n = s.words.len();
            for (i, w) in s.words.iter_mut().enumerate() {
                let wb = round3(b + (e - b) * i as f64 / n as f64);
                *w = w.clone().with_interval(Some(Interval { begin: wb, end: wb }));
            }
        }
        segs.push(s);
    }
    Transcript::new(segs, if r.gen_bool(0.5) { GroupKey::Speaker } else { GroupKey::Stream })
}

fn format_round_trip() -> Check {
    let mut r = rng(8);
    for case in 0..100 {
        let t = random_transcript(&mut r);
        let bytes = write_seglst(&t);
        let back = read_seglst(&bytes, t.key).map_err(|e| format!("case {case}: {e}"))?;
        ensure!(back == t, "case {case}: round trip changed the transcript");
        ensure!(write_seglst(&back) == bytes, "case {case}: second write differs");
    }

    let rec = r#"{"session_id":"S","speaker":"A","start_time":0,"end_time":1,"words":"a"}"#;
    let no_words = r#"{"session_id":"S","speaker":"A","start_time":0,"end_time":1}"#;
    let cases: Vec<(&str, Vec<u8>, Location)> = vec![
        ("array, bad record 2", format!("[{rec},\n{rec},\n{no_words}]").into_bytes(), Location::Record(2)),
        ("array, syntax on line 3", format!("[{rec},\n{rec},\n{{\"session_id\": }}]").into_bytes(), Location::Line(3)),
        ("jsonl, bad line 4", format!("{rec}\n{rec}\n\n{no_words}\n").into_bytes(), Location::Line(4)),
        ("jsonl, syntax on line 2", format!("{rec}\n{{oops\n").into_bytes(), Location::Line(2)),
        (
            "jsonl, bad time on line 3",
            format!("{rec}\n{rec}\n{}\n", rec.replace("\"end_time\":1", "\"end_time\":\"1,5\"")).into_bytes(),
            Location::Line(3),
        ),
    ];
    for (name, bytes, want) in cases {
        match read_seglst(&bytes, GroupKey::Speaker) {
            Err(Error::Parse { location, .. }) | Err(Error::Schema { location, .. }) => {
                ensure!(location == want, "{name}: reported {location}, expected {want}")
            }
            other => return Err(format!("{name}: expected a diagnostic, got {other:?}")),
        }
    }
    let stm_cases: [(&str, &[u8], usize); 3] = [
        ("stm, 4 fields", b";; header\nr 1 A 0 1 ok\nr 1 A 0\n", 3),
        ("stm, bad time", b"r 1 A 0 1 ok\n;; c\n\nr 1 A x 2 bad\n", 4),
        ("stm, reversed", b"r 1 A 3 1 bad\n", 1),
    ];
    for (name, bytes, line) in stm_cases {
        match read_stm(bytes, GroupKey::Speaker) {
            Err(Error::Parse { location, .. }) => {
                ensure!(location == Location::Line(line), "{name}: reported {location}, expected line {line}")
            }
            other => return Err(format!("{name}: expected a diagnostic, got {other:?}")),
        }
    }
    Ok("100 transcripts identical after write/read; 8 malformed inputs located".to_owned())
}
