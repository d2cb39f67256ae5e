use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use meetwer::benchgen::{generate, profile, MeetingSpec};
use meetwer::editdist::Collar;
use meetwer::io::{read_transcript, write_report, write_seglst, Detail, Format};
use meetwer::metrics::{collar_sweep, PseudoWordStrategy};
use meetwer::transcript::{validate, ValidationPolicy};
use meetwer::{GroupKey, Metric, Scoring, TimeConstraint, Transcript};

#[derive(Parser)]
#[command(name = "meetwer", version, about = "Word error rates for multi-speaker meeting transcription")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Plain WER over each session's words in time order
    Wer(ScoreArgs),
    /// Concatenated minimum-permutation WER
    Cpwer(ScoreArgs),
    /// Optimal reference combination WER
    Orcwer(ScoreArgs),
    /// Multiple-input multiple-output WER
    Mimower(ScoreArgs),
    /// Time-constrained cpWER
    Tcpwer(ScoreArgs),
    /// tcpWER over a list of collars
    Sweep(SweepArgs),
    /// Generate a synthetic meeting and time the metrics on it
    Bench(BenchArgs),
}

#[derive(Args, Clone)]
struct ScoreArgs {
    /// Reference transcript (SegLst JSON/JSONL or STM)
    #[arg(long = "ref")]
    reference: PathBuf,
    /// Hypothesis transcript (SegLst JSON/JSONL or STM)
    #[arg(long = "hyp")]
    hypothesis: PathBuf,
    /// Collar in seconds, or `inf`
    #[arg(long, default_value = "5")]
    collar: Collar,
    #[arg(long, default_value = "character_based")]
    ref_pseudo_strategy: PseudoWordStrategy,
    #[arg(long, default_value = "character_based_points")]
    hyp_pseudo_strategy: PseudoWordStrategy,
    /// Lowercase all words before scoring
    #[arg(long)]
    lowercase: bool,
    /// Accept overlapping segments within one hypothesis stream
    #[arg(long)]
    allow_hyp_overlap: bool,
    /// summary, per_session or alignment
    #[arg(long, default_value = "summary")]
    detail: Detail,
    /// Write the report here instead of stdout
    #[arg(long, short)]
    output: Option<PathBuf>,
    /// Worker threads (default: all cores)
    #[arg(long)]
    jobs: Option<usize>,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    score: ScoreArgs,
    /// Comma-separated collars
    #[arg(long, value_delimiter = ',', default_value = "0,0.5,1,2,5,10,inf")]
    collars: Vec<Collar>,
}

#[derive(Args)]
struct BenchArgs {
    /// JSON file with meeting parameters; flags below override it
    #[arg(long)]
    spec: Option<PathBuf>,
    #[arg(long)]
    speakers: Option<usize>,
    /// Meeting length in seconds
    #[arg(long)]
    duration: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value_t = 5)]
    repeats: usize,
    #[arg(long, value_delimiter = ',', default_value = "cpwer,tcpwer")]
    metrics: Vec<Metric>,
    #[arg(long, default_value = "5")]
    collar: Collar,
    /// Write the generated reference as SegLst
    #[arg(long)]
    write_ref: Option<PathBuf>,
    /// Write the generated hypothesis as SegLst
    #[arg(long)]
    write_hyp: Option<PathBuf>,
    /// Write the timings as JSON
    #[arg(long, short)]
    output: Option<PathBuf>,
}

/// A failure with its exit status.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn precondition(message: impl std::fmt::Display) -> Self {
        Failure {
            code: 1,
            message: message.to_string(),
        }
    }

    fn input(message: impl std::fmt::Display) -> Self {
        Failure {
            code: 2,
            message: message.to_string(),
        }
    }

    fn from_error(context: &str, e: meetwer::Error) -> Self {
        let message = format!("{context}: {e}");
        if e.is_parse_error() {
            Failure::input(message)
        } else {
            Failure::precondition(message)
        }
    }
}

type Outcome = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn run(command: Command) -> Outcome {
    match command {
        Command::Wer(a) => score(Metric::Wer, &a),
        Command::Cpwer(a) => score(Metric::CpWer, &a),
        Command::Orcwer(a) => score(Metric::OrcWer, &a),
        Command::Mimower(a) => score(Metric::MimoWer, &a),
        Command::Tcpwer(a) => score(Metric::TcpWer, &a),
        Command::Sweep(a) => sweep(&a),
        Command::Bench(a) => bench(&a),
    }
}

fn configure_threads(jobs: Option<usize>) -> Outcome {
    if let Some(n) = jobs {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build_global()
            .map_err(|e| Failure::precondition(format!("--jobs: {e}")))?;
    }
    Ok(())
}

fn load(path: &Path, key: GroupKey, lowercase: bool) -> Result<Transcript, Failure> {
    let bytes = fs::read(path).map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
    let format = Format::detect(&path.to_string_lossy(), &bytes);
    let mut t = read_transcript(&bytes, format, key).map_err(|e| Failure::from_error(&path.display().to_string(), e))?;
    if lowercase {
        t.lowercase();
    }
    Ok(t)
}

/// Reads and validates both inputs for `metric`.
fn inputs(metric: Metric, a: &ScoreArgs) -> Result<(Transcript, Transcript), Failure> {
    // diarization-style systems label by speaker, channel-style by stream
    let hyp_key = match metric {
        Metric::OrcWer | Metric::MimoWer => GroupKey::Stream,
        _ => GroupKey::Speaker,
    };
    let reference = load(&a.reference, GroupKey::Speaker, a.lowercase)?;
    let hypothesis = load(&a.hypothesis, hyp_key, a.lowercase)?;

    let reference = validate(&reference, ValidationPolicy::lenient())
        .map_err(|e| Failure::from_error(&a.reference.display().to_string(), e))?;
    let hyp_policy = if metric == Metric::TcpWer && !a.allow_hyp_overlap {
        ValidationPolicy::strict()
    } else {
        ValidationPolicy::lenient()
    };
    let hypothesis =
        validate(&hypothesis, hyp_policy).map_err(|e| Failure::from_error(&a.hypothesis.display().to_string(), e))?;
    Ok((reference, hypothesis))
}

fn constraint(a: &ScoreArgs) -> TimeConstraint {
    TimeConstraint {
        collar: a.collar,
        reference_timing: a.ref_pseudo_strategy,
        hypothesis_timing: a.hyp_pseudo_strategy,
        force_pseudo_timing: false,
        allow_hypothesis_overlap: a.allow_hyp_overlap,
    }
}

fn emit(output: Option<&Path>, bytes: &[u8]) -> Outcome {
    match output {
        Some(p) => fs::write(p, bytes).map_err(|e| Failure::precondition(format!("{}: {e}", p.display()))),
        None => std::io::stdout()
            .write_all(bytes)
            .map_err(|e| Failure::precondition(format!("stdout: {e}"))),
    }
}

fn score(metric: Metric, a: &ScoreArgs) -> Outcome {
    configure_threads(a.jobs)?;
    let (reference, hypothesis) = inputs(metric, a)?;
    let scoring = Scoring {
        keep_alignments: a.detail == Detail::Alignment,
        ..Default::default()
    };
    let report = metric
        .evaluate(&reference, &hypothesis, &constraint(a), &scoring)
        .map_err(|e| Failure::from_error(metric.name(), e))?;
    emit(a.output.as_deref(), &write_report(&report, a.detail))
}

fn sweep(a: &SweepArgs) -> Outcome {
    configure_threads(a.score.jobs)?;
    let (reference, hypothesis) = inputs(Metric::TcpWer, &a.score)?;
    let rows = collar_sweep(&reference, &hypothesis, &a.collars, &constraint(&a.score), &Scoring::default())
        .map_err(|e| Failure::from_error("sweep", e))?;

    let fmt = |x: Option<f64>| x.map_or_else(|| "-".to_owned(), |v| format!("{v:.4}"));
    let mut table = format!("{:>8}  {:>10}  {:>8}  {:>8}  {:>10}\n", "collar", "error_rate", "errors", "length", "disallowed");
    for r in &rows {
        table.push_str(&format!(
            "{:>8}  {:>10}  {:>8}  {:>8}  {:>10}\n",
            r.collar.to_string(),
            fmt(r.error_rate),
            r.errors,
            r.length,
            fmt(r.disallowed_fraction)
        ));
    }
    match &a.score.output {
        Some(p) => {
            let mut json = serde_json::to_vec_pretty(&rows).expect("rows serialize");
            json.push(b'\n');
            emit(Some(p), &json)?;
            emit(None, table.as_bytes())
        }
        None => emit(None, table.as_bytes()),
    }
}

fn bench(a: &BenchArgs) -> Outcome {
    let mut spec = match &a.spec {
        Some(p) => {
            let bytes = fs::read(p).map_err(|e| Failure::input(format!("{}: {e}", p.display())))?;
            serde_json::from_slice::<MeetingSpec>(&bytes).map_err(|e| Failure::input(format!("{}: {e}", p.display())))?
        }
        None => MeetingSpec::default(),
    };
    if let Some(k) = a.speakers {
        spec.speakers = k;
    }
    if let Some(d) = a.duration {
        spec.duration = d;
    }
    if let Some(s) = a.seed {
        spec.seed = s;
    }
    let meeting = generate(&spec).map_err(|e| Failure::from_error("bench", e))?;
    if let Some(p) = &a.write_ref {
        emit(Some(p), &write_seglst(&meeting.reference))?;
    }
    if let Some(p) = &a.write_hyp {
        emit(Some(p), &write_seglst(&meeting.hypothesis))?;
    }

    let tc = TimeConstraint::with_collar(a.collar);
    let prof = profile(&meeting.reference, &meeting.hypothesis, &a.metrics, a.repeats, &tc, &Scoring::default())
        .map_err(|e| Failure::from_error("bench", e))?;

    let mut table = format!(
        "speakers {}  duration {:.0} s  words/stream {:.0}  injected edits {}\n",
        spec.speakers, prof.duration_seconds, prof.words_per_stream, meeting.injected_edit_count
    );
    table.push_str(&format!(
        "{:>8}  {:>10}  {:>10}  {:>10}  {:>8}  {:>8}\n",
        "metric", "median_s", "min_s", "max_s", "errors", "length"
    ));
    for t in &prof.timings {
        table.push_str(&format!(
            "{:>8}  {:>10.4}  {:>10.4}  {:>10.4}  {:>8}  {:>8}\n",
            t.metric.name(),
            t.median_seconds,
            t.min_seconds,
            t.max_seconds,
            t.errors,
            t.length
        ));
    }
    if let Some(p) = &a.output {
        let doc = serde_json::json!({
            "spec": spec,
            "injected_edit_count": meeting.injected_edit_count,
            "profile": prof,
        });
        let mut json = serde_json::to_vec_pretty(&doc).expect("profile serializes");
        json.push(b'\n');
        emit(Some(p), &json)?;
    }
    emit(None, table.as_bytes())
}
