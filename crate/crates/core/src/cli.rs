//! Command-line front end. The `augforge` binary is a thin wrapper around [`run`].
//!
//! Exit codes: 0 success, 1 usage or config error, 2 I/O error, 3 data or format error.
//! `AUGFORGE_THREADS` caps the worker pool used for file-level parallelism.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;

use crate::analysis::{distortion_sweep, write_distortion_csv_file, Method};
use crate::augment::mixing::{Features, LabeledSample};
use crate::augment::pipeline::{apply_pipeline, PipelineConfig, PipelineContext};
use crate::augment::rng::{derive_seed, SeededSource};
use crate::augment::semantic::TokenSpan;
use crate::bench::{run_benchmark, BenchConfig};
use crate::error::{Error, Result};
use crate::evalstats::{align_wer, bootstrap_wer, corpus_wer, mapsswe, pair_transcripts, read_transcripts, ErrorCounts};
use crate::features::{extract_logmel, FeatureConfig};
use crate::signal_io::{
    read_csv_matrix, read_spgm, read_wav, write_csv_matrix, write_spgm, write_wav, Matrix,
};
use crate::synth::random_walk_corpus;

pub const THREADS_ENV: &str = "AUGFORGE_THREADS";
const SPANS_SUFFIX: &str = ".spans.json";
const LABEL_SUFFIX: &str = ".label.json";
/// Batches of synthetic utterances timed per benchmark configuration.
const BENCH_BATCHES: usize = 4;
const BENCH_BINS: usize = 80;

#[derive(Debug, Parser)]
#[command(name = "augforge", version, about = "SpliceOut-style audio augmentation toolkit")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Convert WAV files to log-mel SPGM spectrograms.
    Featurize(FeaturizeArgs),
    /// Apply a JSON augmentation pipeline to every input file.
    Augment(AugmentArgs),
    /// Proxy step-time and padded-memory sweep over mask counts.
    Bench(BenchArgs),
    /// Time-averaged statistics distortion sweep.
    Stats(StatsArgs),
    /// Corpus WER with a bootstrap confidence interval.
    Score(ScoreArgs),
    /// Matched-pairs significance test between two hypotheses.
    Abtest(AbtestArgs),
}

#[derive(Debug, Args)]
pub struct FeaturizeArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = 25.0)]
    pub frame_ms: f64,
    #[arg(long, default_value_t = 10.0)]
    pub hop_ms: f64,
    #[arg(long, default_value_t = 80)]
    pub mels: usize,
    #[arg(long, default_value_t = 0.0)]
    pub fmin: f64,
    #[arg(long)]
    pub fmax: Option<f64>,
    #[arg(long, default_value_t = 1e-10)]
    pub log_floor: f64,
}

#[derive(Debug, Args)]
pub struct AugmentArgs {
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    /// Overrides the config's seed.
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[arg(long, value_delimiter = ',', default_values_t = [2usize, 4, 8, 16, 32, 64])]
    pub n_masks: Vec<usize>,
    #[arg(long, default_value_t = 40)]
    pub t: usize,
    #[arg(long, default_value_t = 1000)]
    pub tau: usize,
    #[arg(long, default_value_t = 32)]
    pub batch: usize,
    #[arg(long, default_value_t = 7)]
    pub reps: usize,
    #[arg(long)]
    pub report: PathBuf,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct StatsArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long, value_delimiter = ',', default_values_t = [String::from("splice_out"), String::from("tm_zero"), String::from("tm_mean")])]
    pub methods: Vec<String>,
    #[arg(long, value_delimiter = ',', default_values_t = [2usize, 4, 8, 16, 32, 64])]
    pub n_masks: Vec<usize>,
    #[arg(long, default_value_t = 40)]
    pub t: usize,
    #[arg(long, default_value_t = 100)]
    pub trials: usize,
    #[arg(long)]
    pub report: PathBuf,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct ScoreArgs {
    #[arg(long = "ref")]
    pub reference: PathBuf,
    #[arg(long)]
    pub hyp: PathBuf,
    #[arg(long = "b", default_value_t = 1000)]
    pub b: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct AbtestArgs {
    #[arg(long = "ref")]
    pub reference: PathBuf,
    #[arg(long)]
    pub hyp1: PathBuf,
    #[arg(long)]
    pub hyp2: PathBuf,
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, out: &mut (dyn Write + Send), err: &mut (dyn Write + Send)) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = if e.use_stderr() {
                write!(err, "{}", e.render())
            } else {
                write!(out, "{}", e.render())
            };
            return code;
        }
    };
    match execute(cli.command, out, err) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

fn thread_pool() -> Result<rayon::ThreadPool> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Ok(v) = std::env::var(THREADS_ENV) {
        let n: usize = v
            .trim()
            .parse()
            .map_err(|_| Error::Config(format!("{THREADS_ENV}={v:?} is not a thread count")))?;
        builder = builder.num_threads(n.max(1));
    }
    builder
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))
}

fn execute(cmd: Command, out: &mut (dyn Write + Send), err: &mut (dyn Write + Send)) -> Result<i32> {
    let pool = thread_pool()?;
    match cmd {
        Command::Featurize(a) => pool.install(|| featurize(&a, err)),
        Command::Augment(a) => pool.install(|| augment(&a, err)),
        Command::Bench(a) => pool.install(|| bench(&a, out)),
        Command::Stats(a) => pool.install(|| stats(&a, out)),
        Command::Score(a) => score(&a, out),
        Command::Abtest(a) => abtest(&a, out),
    }
}

fn is_sidecar(p: &Path) -> bool {
    let name = p.file_name().and_then(|n| n.to_str()).unwrap_or("");
    name.ends_with(SPANS_SUFFIX) || name.ends_with(LABEL_SUFFIX)
}

/// A single file, or the sorted regular files of a directory (sidecars excluded).
fn list_inputs(input: &Path) -> Result<Vec<PathBuf>> {
    let meta = std::fs::metadata(input).map_err(|e| Error::io(input, e))?;
    if meta.is_file() {
        return Ok(vec![input.to_path_buf()]);
    }
    let mut files = Vec::new();
    for entry in std::fs::read_dir(input).map_err(|e| Error::io(input, e))? {
        let entry = entry.map_err(|e| Error::io(input, e))?;
        let path = entry.path();
        if path.is_file() && !is_sidecar(&path) {
            files.push(path);
        }
    }
    files.sort();
    Ok(files)
}

fn create_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

fn file_name(p: &Path) -> &std::ffi::OsStr {
    p.file_name().unwrap_or(p.as_os_str())
}

fn sidecar(p: &Path, suffix: &str) -> PathBuf {
    let mut s = p.as_os_str().to_os_string();
    s.push(suffix);
    PathBuf::from(s)
}

/// Reports per-file failures and returns the exit code of the first one.
fn report_failures(results: Vec<(PathBuf, Result<()>)>, err: &mut (dyn Write + Send)) -> i32 {
    let mut code = 0;
    for (path, r) in results {
        if let Err(e) = r {
            let _ = writeln!(err, "error: {}: {e}", path.display());
            if code == 0 {
                code = e.exit_code();
            }
        }
    }
    code
}

fn featurize(a: &FeaturizeArgs, err: &mut (dyn Write + Send)) -> Result<i32> {
    let cfg = FeatureConfig {
        frame_len_ms: a.frame_ms,
        hop_ms: a.hop_ms,
        n_mels: a.mels,
        fmin: a.fmin,
        fmax: a.fmax,
        log_floor: a.log_floor,
    };
    let inputs = list_inputs(&a.input)?;
    if inputs.is_empty() {
        let _ = writeln!(err, "warning: no input files in {}", a.input.display());
        return Ok(0);
    }
    create_dir(&a.out)?;
    let results: Vec<(PathBuf, Result<()>)> = inputs
        .par_iter()
        .map(|path| {
            let r = read_wav(path)
                .and_then(|w| extract_logmel(&w, &cfg))
                .and_then(|m| {
                    let stem = path.file_stem().unwrap_or(path.as_os_str());
                    write_spgm(a.out.join(stem).with_extension("spgm"), &m)
                });
            (path.clone(), r)
        })
        .collect();
    Ok(report_failures(results, err))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum FileKind {
    Spgm,
    Wav,
    Csv,
}

fn file_kind(path: &Path) -> Result<FileKind> {
    match path
        .extension()
        .and_then(|e| e.to_str())
        .map(str::to_ascii_lowercase)
        .as_deref()
    {
        Some("spgm") => Ok(FileKind::Spgm),
        Some("wav") => Ok(FileKind::Wav),
        Some("csv") => Ok(FileKind::Csv),
        _ => Err(Error::Format(format!(
            "{}: expected a .spgm, .wav or .csv file",
            path.display()
        ))),
    }
}

struct Loaded {
    kind: FileKind,
    sample: LabeledSample,
    has_label: bool,
    spans: Option<Vec<TokenSpan>>,
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| Error::Data(format!("{}: {e}", path.display())))
}

fn load_sample(path: &Path) -> Result<Loaded> {
    let kind = file_kind(path)?;
    let features = match kind {
        FileKind::Spgm => Features::Spectrogram(read_spgm(path)?),
        FileKind::Csv => Features::Spectrogram(read_csv_matrix(path)?),
        FileKind::Wav => Features::Waveform(read_wav(path)?),
    };
    let label_path = sidecar(path, LABEL_SUFFIX);
    let (sample, has_label) = if label_path.is_file() {
        (LabeledSample::new(features, read_json(&label_path)?)?, true)
    } else {
        (LabeledSample::unlabeled(features), false)
    };
    let spans_path = sidecar(path, SPANS_SUFFIX);
    let spans = if spans_path.is_file() {
        Some(read_json(&spans_path)?)
    } else {
        None
    };
    Ok(Loaded {
        kind,
        sample,
        has_label,
        spans,
    })
}

fn write_sample(path: &Path, loaded: &Loaded, sample: &LabeledSample) -> Result<()> {
    match (&sample.features, loaded.kind) {
        (Features::Spectrogram(m), FileKind::Spgm) => write_spgm(path, m)?,
        (Features::Spectrogram(m), FileKind::Csv) => write_csv_matrix(path, m)?,
        (Features::Waveform(w), FileKind::Wav) => write_wav(path, w)?,
        (f, _) => {
            return Err(Error::Config(format!(
                "pipeline produced a {} for {}",
                f.kind(),
                path.display()
            )))
        }
    }
    if loaded.has_label {
        let label_path = sidecar(path, LABEL_SUFFIX);
        let text = serde_json::to_string(&sample.label).expect("labels serialize");
        std::fs::write(&label_path, text).map_err(|e| Error::io(&label_path, e))?;
    }
    Ok(())
}

fn augment(a: &AugmentArgs, err: &mut (dyn Write + Send)) -> Result<i32> {
    let text = std::fs::read_to_string(&a.config).map_err(|e| Error::io(&a.config, e))?;
    let cfg = PipelineConfig::from_json(&text)?;
    let seed = a.seed.unwrap_or(cfg.seed);
    let inputs = list_inputs(&a.input)?;
    if inputs.is_empty() {
        let _ = writeln!(err, "warning: no input files in {}", a.input.display());
        return Ok(0);
    }
    create_dir(&a.out)?;
    let loaded: Vec<Result<Loaded>> = inputs.par_iter().map(|p| load_sample(p)).collect();
    let n = inputs.len();
    let results: Vec<(PathBuf, Result<()>)> = (0..n)
        .into_par_iter()
        .map(|i| {
            let r = (|| {
                let item = loaded[i].as_ref().map_err(clone_error)?;
                let partner = loaded[(i + 1) % n].as_ref().ok().map(|l| &l.sample);
                let ctx = PipelineContext {
                    partner,
                    spans: item.spans.as_deref(),
                };
                let mut rng = SeededSource::new(derive_seed(seed, i as u64));
                let out = apply_pipeline(&mut rng, &item.sample, &cfg.pipeline, &ctx)?;
                write_sample(&a.out.join(file_name(&inputs[i])), item, &out)
            })();
            (inputs[i].clone(), r)
        })
        .collect();
    Ok(report_failures(results, err))
}

/// Load errors are reported once per file, so a lossy copy is enough here.
fn clone_error(e: &Error) -> Error {
    match e {
        Error::Io { path, source } => Error::Io {
            path: path.clone(),
            source: std::io::Error::new(source.kind(), source.to_string()),
        },
        Error::Format(s) => Error::Format(s.clone()),
        Error::Unsupported(s) => Error::Unsupported(s.clone()),
        Error::Config(s) => Error::Config(s.clone()),
        Error::Bounds { start, end, extent } => Error::Bounds {
            start: *start,
            end: *end,
            extent: *extent,
        },
        Error::Shape(s) => Error::Shape(s.clone()),
        Error::Precondition(s) => Error::Precondition(s.clone()),
        Error::Data(s) => Error::Data(s.clone()),
    }
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        create_dir(dir)?;
    }
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

fn bench(a: &BenchArgs, out: &mut (dyn Write + Send)) -> Result<i32> {
    let cfg = BenchConfig {
        ns: a.n_masks.clone(),
        t: a.t,
        batch_size: a.batch,
        reps: a.reps,
        seed: a.seed,
        ..Default::default()
    };
    cfg.validate()?;
    if a.tau == 0 {
        return Err(Error::Config("--tau must be positive".into()));
    }
    let corpus = random_walk_corpus(a.seed, a.batch * BENCH_BATCHES, a.tau, BENCH_BINS);
    let report = run_benchmark(&corpus, &[Method::SpliceOut, Method::TmZero], &cfg)?;
    write_text(&a.report, &report.to_json())?;
    let _ = writeln!(out, "wrote {} rows to {}", report.rows.len(), a.report.display());
    Ok(0)
}

fn stats(a: &StatsArgs, out: &mut (dyn Write + Send)) -> Result<i32> {
    let methods = a
        .methods
        .iter()
        .map(|m| m.parse::<Method>())
        .collect::<Result<Vec<_>>>()?;
    if a.trials == 0 {
        return Err(Error::Config("--trials must be positive".into()));
    }
    let inputs = list_inputs(&a.input)?;
    let corpus = inputs
        .par_iter()
        .map(|p| match file_kind(p)? {
            FileKind::Spgm => read_spgm(p),
            FileKind::Csv => read_csv_matrix(p),
            FileKind::Wav => Err(Error::Format(format!(
                "{}: stats needs spectrograms (.spgm or .csv)",
                p.display()
            ))),
        })
        .collect::<Result<Vec<Matrix>>>()?;
    if corpus.is_empty() {
        return Err(Error::Data(format!("no spectrograms in {}", a.input.display())));
    }
    let reports = distortion_sweep(&corpus, &methods, &a.n_masks, a.t, a.trials, a.seed)?;
    if let Some(dir) = a.report.parent().filter(|d| !d.as_os_str().is_empty()) {
        create_dir(dir)?;
    }
    write_distortion_csv_file(&a.report, &reports)?;
    let _ = writeln!(out, "wrote {} rows to {}", reports.len(), a.report.display());
    Ok(0)
}

fn score_pairs(reference: &Path, hyp: &Path) -> Result<Vec<ErrorCounts>> {
    let r = read_transcripts(reference)?;
    let h = read_transcripts(hyp)?;
    Ok(pair_transcripts(&r, &h)?
        .into_iter()
        .map(|(_, rw, hw)| align_wer(rw, hw))
        .collect())
}

fn score(a: &ScoreArgs, out: &mut (dyn Write + Send)) -> Result<i32> {
    let counts = score_pairs(&a.reference, &a.hyp)?;
    corpus_wer(&counts)?;
    let mut rng = SeededSource::new(a.seed);
    let result = bootstrap_wer(&counts, a.b, &mut rng)?;
    let text = serde_json::to_string_pretty(&result).expect("result serializes");
    writeln!(out, "{text}").map_err(|e| Error::io("<stdout>", e))?;
    Ok(0)
}

fn abtest(a: &AbtestArgs, out: &mut (dyn Write + Send)) -> Result<i32> {
    let sys1 = score_pairs(&a.reference, &a.hyp1)?;
    let sys2 = score_pairs(&a.reference, &a.hyp2)?;
    let result = mapsswe(&sys1, &sys2)?;
    let text = serde_json::to_string_pretty(&result).expect("result serializes");
    writeln!(out, "{text}").map_err(|e| Error::io("<stdout>", e))?;
    Ok(0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(
            std::iter::once("augforge").chain(args.iter().copied()),
            &mut out,
            &mut err,
        );
        (
            code,
            String::from_utf8(out).unwrap(),
            String::from_utf8(err).unwrap(),
        )
    }

    #[test]
    fn usage_errors_exit_one() {
        assert_eq!(run_args(&["frobnicate"]).0, 1);
        assert_eq!(run_args(&["score", "--ref", "x"]).0, 1);
        let (code, out, _) = run_args(&["--help"]);
        assert_eq!(code, 0);
        assert!(out.contains("featurize"));
    }

    #[test]
    fn bench_rejects_few_reps() {
        let dir = tempfile::tempdir().unwrap();
        let report = dir.path().join("r.json");
        let (code, _, err) = run_args(&["bench", "--reps", "3", "--report", report.to_str().unwrap()]);
        assert_eq!(code, 1, "{err}");
    }

    #[test]
    fn sidecar_detection() {
        assert!(is_sidecar(Path::new("a/x.spgm.label.json")));
        assert!(is_sidecar(Path::new("x.wav.spans.json")));
        assert!(!is_sidecar(Path::new("x.spgm")));
    }
}
