use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metrics::{Metric, Scoring, TimeConstraint};
use crate::transcript::{group_segments, Transcript};

/// Wall-clock statistics of one metric.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricTiming {
    pub metric: Metric,
    pub runs: usize,
    pub median_seconds: f64,
    pub min_seconds: f64,
    pub max_seconds: f64,
    /// Errors reported by the metric, identical in every run.
    pub errors: u64,
    pub length: u64,
}

/// Result of [`profile`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Profile {
    /// Mean number of words per reference speaker.
    pub words_per_stream: f64,
    /// Latest reference segment end, or 0 for untimed input.
    pub duration_seconds: f64,
    pub timings: Vec<MetricTiming>,
}

/// Times each metric `repeats` times on one worker thread. Only the metric
/// call itself is timed.
pub fn profile(
    reference: &Transcript,
    hypothesis: &Transcript,
    metrics: &[Metric],
    repeats: usize,
    constraint: &TimeConstraint,
    scoring: &Scoring,
) -> Result<Profile> {
    let repeats = repeats.max(1);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .map_err(|e| Error::InvalidSpec(format!("cannot start worker thread: {e}")))?;

    let mut timings = Vec::with_capacity(metrics.len());
    for &metric in metrics {
        let mut samples = Vec::with_capacity(repeats);
        let mut last = None;
        for _ in 0..repeats {
            let (elapsed, report) = pool.install(|| {
                let start = Instant::now();
                let report = metric.evaluate(reference, hypothesis, constraint, scoring);
                (start.elapsed(), report)
            });
            samples.push(elapsed);
            last = Some(report?);
        }
        samples.sort();
        let report = last.unwrap();
        timings.push(MetricTiming {
            metric,
            runs: repeats,
            median_seconds: median(&samples).as_secs_f64(),
            min_seconds: samples[0].as_secs_f64(),
            max_seconds: samples[repeats - 1].as_secs_f64(),
            errors: report.errors,
            length: report.length,
        });
    }

    let mut streams = 0usize;
    for segs in reference.sessions().values() {
        streams += group_segments(segs, reference.key).len();
    }
    Ok(Profile {
        words_per_stream: if streams == 0 {
            0.0
        } else {
            reference.word_count() as f64 / streams as f64
        },
        duration_seconds: reference.segments.iter().filter_map(|s| s.end).fold(0.0, f64::max),
        timings,
    })
}

fn median(sorted: &[Duration]) -> Duration {
    let n = sorted.len();
    if n % 2 == 1 {
        sorted[n / 2]
    } else {
        (sorted[n / 2 - 1] + sorted[n / 2]) / 2
    }
}
