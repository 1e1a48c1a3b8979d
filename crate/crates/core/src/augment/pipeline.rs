//! JSON-configured augmentation pipelines.
//!
//! ```json
//! {"seed": 7, "pipeline": [
//!   {"op": "time_warp", "w": 5},
//!   {"op": "freq_mask", "n": 2, "t": 8},
//!   {"op": "splice_out", "n": 8, "t": 40}
//! ]}
//! ```
//!
//! Ops run in order against one [`RandomSource`]; each consumes draws in the
//! order documented on the op it wraps, plus any parameter draws listed on
//! [`OpConfig`].

use serde::{Deserialize, Serialize};

use crate::augment::interval::{Interval, SpliceConfig};
use crate::augment::mixing::{self, Features, LabeledSample, Rect};
use crate::augment::rng::RandomSource;
use crate::augment::semantic::{semantic_intervals, validate_spans, TokenSpan};
use crate::augment::spectral::{self, Axis, FillPolicy};
use crate::augment::waveform;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FillName {
    Zero,
    Mean,
}

/// `"zero"`, `"mean"` or a literal number.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FillSpec {
    Named(FillName),
    Value(f32),
}

impl Default for FillSpec {
    fn default() -> Self {
        FillSpec::Named(FillName::Zero)
    }
}

impl From<FillSpec> for FillPolicy {
    fn from(f: FillSpec) -> Self {
        match f {
            FillSpec::Named(FillName::Zero) => FillPolicy::Zero,
            FillSpec::Named(FillName::Mean) => FillPolicy::GlobalMean,
            FillSpec::Value(v) => FillPolicy::Value(v),
        }
    }
}

/// Second sample for mixup / CutMix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Partner {
    /// The sample itself (identity for features and label).
    #[serde(rename = "self")]
    Itself,
    /// The partner supplied through [`PipelineContext`]; the CLI uses the next file.
    #[default]
    Next,
}

fn one() -> usize {
    1
}
fn default_fm_width() -> usize {
    8
}
fn default_ratio() -> f64 {
    0.15
}
fn default_alpha() -> f64 {
    1.0
}
fn default_warp() -> usize {
    5
}
fn default_fade() -> f64 {
    0.5
}
fn default_speeds() -> Vec<f64> {
    vec![0.9, 1.0, 1.1]
}

/// One pipeline stage.
///
/// Parameter draws happen before the wrapped op's own draws:
/// mixup without `lambda` draws `lambda ~ Beta(alpha, alpha)`;
/// cutmix without `time` draws `len = next_below(tau + 1)`, `start = next_below(tau - len + 1)`,
/// then the same for `freq` over the bin axis;
/// speed_perturb without `factor` picks `factors[next_below(factors.len())]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case", deny_unknown_fields)]
pub enum OpConfig {
    SpliceOut {
        n: usize,
        t: usize,
        #[serde(default = "one")]
        min_retained: usize,
    },
    TimeMask {
        n: usize,
        t: usize,
        #[serde(default)]
        fill: FillSpec,
    },
    FreqMask {
        n: usize,
        #[serde(default = "default_fm_width")]
        t: usize,
        #[serde(default)]
        fill: FillSpec,
    },
    SemanticSplice {
        #[serde(default = "default_ratio")]
        ratio: f64,
        #[serde(default)]
        spans: Option<Vec<TokenSpan>>,
        #[serde(default = "one")]
        min_retained: usize,
    },
    SemanticMask {
        #[serde(default = "default_ratio")]
        ratio: f64,
        #[serde(default)]
        spans: Option<Vec<TokenSpan>>,
        #[serde(default)]
        fill: FillSpec,
    },
    Mixup {
        #[serde(default = "default_alpha")]
        alpha: f64,
        #[serde(default)]
        lambda: Option<f64>,
        #[serde(default)]
        partner: Partner,
    },
    Cutmix {
        #[serde(default)]
        partner: Partner,
        #[serde(default)]
        time: Option<[usize; 2]>,
        #[serde(default)]
        freq: Option<[usize; 2]>,
    },
    TimeWarp {
        #[serde(default = "default_warp")]
        w: usize,
    },
    Fade {
        #[serde(default = "default_fade")]
        max_fraction: f64,
    },
    SpeedPerturb {
        #[serde(default)]
        factor: Option<f64>,
        #[serde(default = "default_speeds")]
        factors: Vec<f64>,
    },
    SpliceOutWave {
        n: usize,
        t: usize,
        #[serde(default = "one")]
        min_retained: usize,
    },
}

impl OpConfig {
    pub fn name(&self) -> &'static str {
        match self {
            OpConfig::SpliceOut { .. } => "splice_out",
            OpConfig::TimeMask { .. } => "time_mask",
            OpConfig::FreqMask { .. } => "freq_mask",
            OpConfig::SemanticSplice { .. } => "semantic_splice",
            OpConfig::SemanticMask { .. } => "semantic_mask",
            OpConfig::Mixup { .. } => "mixup",
            OpConfig::Cutmix { .. } => "cutmix",
            OpConfig::TimeWarp { .. } => "time_warp",
            OpConfig::Fade { .. } => "fade",
            OpConfig::SpeedPerturb { .. } => "speed_perturb",
            OpConfig::SpliceOutWave { .. } => "splice_out_wave",
        }
    }

    /// Parameter checks that do not depend on the input. Errors name the key.
    pub fn validate(&self) -> std::result::Result<(), (String, String)> {
        let bad = |key: &str, msg: String| Err((key.to_string(), msg));
        match self {
            OpConfig::SpliceOut { t, .. }
            | OpConfig::TimeMask { t, .. }
            | OpConfig::FreqMask { t, .. }
            | OpConfig::SpliceOutWave { t, .. }
                if *t == 0 =>
            {
                bad("t", "max width must be at least 1".into())
            }
            OpConfig::TimeMask { fill: FillSpec::Value(v), .. }
            | OpConfig::FreqMask { fill: FillSpec::Value(v), .. }
            | OpConfig::SemanticMask { fill: FillSpec::Value(v), .. }
                if !v.is_finite() =>
            {
                bad("fill", format!("{v} is not finite"))
            }
            OpConfig::SemanticSplice { ratio, .. } | OpConfig::SemanticMask { ratio, .. }
                if !(0.0..=1.0).contains(ratio) =>
            {
                bad("ratio", format!("{ratio} outside [0, 1]"))
            }
            OpConfig::Mixup { alpha, .. } if !(*alpha > 0.0 && alpha.is_finite()) => {
                bad("alpha", format!("{alpha} must be positive"))
            }
            OpConfig::Mixup { lambda: Some(l), .. } if !(0.0..=1.0).contains(l) => {
                bad("lambda", format!("{l} outside [0, 1]"))
            }
            OpConfig::Cutmix { time: Some([s, e]), .. } if s > e => {
                bad("time", format!("start {s} exceeds end {e}"))
            }
            OpConfig::Cutmix { freq: Some([s, e]), .. } if s > e => {
                bad("freq", format!("start {s} exceeds end {e}"))
            }
            OpConfig::Fade { max_fraction } if !(*max_fraction > 0.0 && *max_fraction <= 0.5) => {
                bad("max_fraction", format!("{max_fraction} outside (0, 0.5]"))
            }
            OpConfig::SpeedPerturb { factor: Some(f), .. } if !(*f > 0.0 && f.is_finite()) => {
                bad("factor", format!("{f} must be positive"))
            }
            OpConfig::SpeedPerturb { factor: None, factors } if factors.is_empty() => {
                bad("factors", "needs at least one speed".into())
            }
            OpConfig::SpeedPerturb { factors, .. }
                if factors.iter().any(|f| !(*f > 0.0 && f.is_finite())) =>
            {
                bad("factors", "speeds must be positive".into())
            }
            _ => Ok(()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PipelineConfig {
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub pipeline: Vec<OpConfig>,
}

impl PipelineConfig {
    /// Parses and validates a JSON document; errors carry the offending key path.
    pub fn from_json(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let cfg: PipelineConfig = serde_path_to_error::deserialize(de).map_err(|e| {
            let mut path = e.path().to_string();
            if let Some(key) = op_index(&path).and_then(|i| locate_op_field(text, i)) {
                path = format!("{path}.{key}");
            }
            Error::Config(format!("at `{path}`: {}", e.inner()))
        })?;
        for (i, op) in cfg.pipeline.iter().enumerate() {
            op.validate()
                .map_err(|(key, msg)| Error::Config(format!("at `pipeline[{i}].{key}`: {msg}")))?;
        }
        Ok(cfg)
    }
}

fn op_index(path: &str) -> Option<usize> {
    path.strip_prefix("pipeline[")?.strip_suffix(']')?.parse().ok()
}

/// Tagged ops are parsed from a buffer, so the error path stops at the op.
/// The offending key is the one whose removal clears the error or turns it
/// into a missing-field error for that same key.
fn locate_op_field(text: &str, index: usize) -> Option<String> {
    let root: serde_json::Value = serde_json::from_str(text).ok()?;
    let op = root.get("pipeline")?.get(index)?.as_object()?;
    op.keys().filter(|k| *k != "op").find_map(|k| {
        let mut probe = op.clone();
        probe.remove(k);
        match serde_json::from_value::<OpConfig>(serde_json::Value::Object(probe)) {
            Ok(_) => Some(k.clone()),
            Err(e) if e.to_string().contains(&format!("missing field `{k}`")) => Some(k.clone()),
            Err(_) => None,
        }
    })
}

/// Per-sample side inputs for ops that need more than the sample itself.
#[derive(Debug, Clone, Copy, Default)]
pub struct PipelineContext<'a> {
    pub partner: Option<&'a LabeledSample>,
    pub spans: Option<&'a [TokenSpan]>,
}

fn need_spectrogram<'s>(op: &OpConfig, s: &'s LabeledSample) -> Result<&'s crate::signal_io::Matrix> {
    s.spectrogram().ok_or_else(|| {
        Error::Config(format!(
            "op `{}` needs a spectrogram input, got {}",
            op.name(),
            s.features.kind()
        ))
    })
}

fn need_waveform<'s>(op: &OpConfig, s: &'s LabeledSample) -> Result<&'s crate::signal_io::Waveform> {
    s.waveform().ok_or_else(|| {
        Error::Config(format!(
            "op `{}` needs a waveform input, got {}",
            op.name(),
            s.features.kind()
        ))
    })
}

fn resolve_partner<'a>(
    op: &OpConfig,
    partner: Partner,
    current: &'a LabeledSample,
    ctx: &PipelineContext<'a>,
) -> Result<&'a LabeledSample> {
    match partner {
        Partner::Itself => Ok(current),
        Partner::Next => ctx.partner.ok_or_else(|| {
            Error::Config(format!("op `{}` needs a partner sample", op.name()))
        }),
    }
}

fn resolve_spans<'a>(
    op: &'a OpConfig,
    inline: &'a Option<Vec<TokenSpan>>,
    ctx: &PipelineContext<'a>,
    n_frames: usize,
) -> Result<&'a [TokenSpan]> {
    let spans = match inline {
        Some(s) => s.as_slice(),
        None => ctx.spans.ok_or_else(|| {
            Error::Data(format!("op `{}` needs token spans for this input", op.name()))
        })?,
    };
    validate_spans(spans, n_frames)?;
    Ok(spans)
}

fn sample_span<R: RandomSource + ?Sized>(rng: &mut R, extent: usize) -> Interval {
    let len = rng.next_below(extent as u64 + 1) as usize;
    let start = rng.next_below((extent - len) as u64 + 1) as usize;
    Interval::with_len(start, len)
}

fn fixed_span(pair: [usize; 2]) -> Interval {
    Interval::new(pair[0], pair[1])
}

/// Runs one op.
pub fn apply_op<R: RandomSource + ?Sized>(
    rng: &mut R,
    sample: &LabeledSample,
    op: &OpConfig,
    ctx: &PipelineContext<'_>,
) -> Result<LabeledSample> {
    op.validate()
        .map_err(|(key, msg)| Error::Config(format!("op `{}` key `{key}`: {msg}", op.name())))?;
    let spectro = |m| LabeledSample {
        features: Features::Spectrogram(m),
        label: sample.label.clone(),
    };
    let wave = |w| LabeledSample {
        features: Features::Waveform(w),
        label: sample.label.clone(),
    };
    match op {
        OpConfig::SpliceOut { n, t, min_retained } => {
            let m = need_spectrogram(op, sample)?;
            let cfg = SpliceConfig::new(*n, *t).with_min_retained(*min_retained);
            Ok(spectro(spectral::splice_out(rng, m, &cfg)?))
        }
        OpConfig::TimeMask { n, t, fill } => {
            let m = need_spectrogram(op, sample)?;
            let cfg = SpliceConfig::new(*n, *t);
            Ok(spectro(spectral::time_mask(rng, m, &cfg, (*fill).into())?))
        }
        OpConfig::FreqMask { n, t, fill } => {
            let m = need_spectrogram(op, sample)?;
            let cfg = SpliceConfig::new(*n, *t);
            Ok(spectro(spectral::freq_mask(rng, m, &cfg, (*fill).into())?))
        }
        OpConfig::SemanticSplice {
            ratio,
            spans,
            min_retained,
        } => {
            let m = need_spectrogram(op, sample)?;
            let spans = resolve_spans(op, spans, ctx, m.n_frames())?;
            let iv = semantic_intervals(rng, spans, *ratio)?.retaining(m.n_frames(), *min_retained);
            Ok(spectro(spectral::apply_splice(m, &iv)?))
        }
        OpConfig::SemanticMask { ratio, spans, fill } => {
            let m = need_spectrogram(op, sample)?;
            let spans = resolve_spans(op, spans, ctx, m.n_frames())?;
            let iv = semantic_intervals(rng, spans, *ratio)?;
            Ok(spectro(spectral::apply_mask(m, &iv, (*fill).into(), Axis::Time)?))
        }
        OpConfig::Mixup {
            alpha,
            lambda,
            partner,
        } => {
            let other = resolve_partner(op, *partner, sample, ctx)?;
            let lambda = match lambda {
                Some(l) => *l,
                None => mixing::sample_beta(rng, *alpha),
            };
            mixing::mixup(sample, other, lambda)
        }
        OpConfig::Cutmix {
            partner,
            time,
            freq,
        } => {
            let other = resolve_partner(op, *partner, sample, ctx)?;
            let (frames, bins) = need_spectrogram(op, sample)?.shape();
            let time = match time {
                Some(p) => fixed_span(*p),
                None => sample_span(rng, frames),
            };
            let freq = match freq {
                Some(p) => fixed_span(*p),
                None => sample_span(rng, bins),
            };
            Ok(mixing::cutmix(sample, other, Rect { time, freq })?.0)
        }
        OpConfig::TimeWarp { w } => {
            let m = need_spectrogram(op, sample)?;
            Ok(spectro(spectral::time_warp(rng, m, *w)?))
        }
        OpConfig::Fade { max_fraction } => {
            let w = need_waveform(op, sample)?;
            Ok(wave(waveform::fade(rng, w, *max_fraction)?))
        }
        OpConfig::SpeedPerturb { factor, factors } => {
            let w = need_waveform(op, sample)?;
            let f = match factor {
                Some(f) => *f,
                None => factors[rng.next_below(factors.len() as u64) as usize],
            };
            Ok(wave(waveform::speed_perturb(w, f)?))
        }
        OpConfig::SpliceOutWave { n, t, min_retained } => {
            let w = need_waveform(op, sample)?;
            let cfg = SpliceConfig::new(*n, *t).with_min_retained(*min_retained);
            Ok(wave(waveform::splice_out_wave(rng, w, &cfg)?))
        }
    }
}

/// Applies every op in order; deterministic given the source's seed.
pub fn apply_pipeline<R: RandomSource + ?Sized>(
    rng: &mut R,
    sample: &LabeledSample,
    pipeline: &[OpConfig],
    ctx: &PipelineContext<'_>,
) -> Result<LabeledSample> {
    let mut current = sample.clone();
    for op in pipeline {
        current = apply_op(rng, &current, op, ctx)?;
    }
    Ok(current)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::augment::rng::SeededSource;
    use crate::signal_io::{Matrix, Waveform};

    fn spectrogram_sample() -> LabeledSample {
        LabeledSample::unlabeled(Features::Spectrogram(Matrix::from_fn(60, 10, |t, b| {
            ((t * 31 + b * 7) % 17) as f32 - 8.0
        })))
    }

    #[test]
    fn empty_pipeline_is_identity() {
        let s = spectrogram_sample();
        let mut rng = SeededSource::new(0);
        let out = apply_pipeline(&mut rng, &s, &[], &PipelineContext::default()).unwrap();
        assert_eq!(out, s);
    }

    #[test]
    fn noop_ops_are_identity() {
        let cfg = PipelineConfig::from_json(
            r#"{"pipeline":[{"op":"splice_out","n":0,"t":10},{"op":"mixup","lambda":1.0,"partner":"self"}]}"#,
        )
        .unwrap();
        let s = spectrogram_sample();
        let mut rng = SeededSource::new(cfg.seed);
        let out = apply_pipeline(&mut rng, &s, &cfg.pipeline, &PipelineContext::default()).unwrap();
        assert_eq!(out, s);
    }

    #[test]
    fn same_seed_same_output() {
        let cfg = PipelineConfig::from_json(
            r#"{"seed": 99, "pipeline":[
                {"op":"time_warp"},
                {"op":"freq_mask","n":2},
                {"op":"time_mask","n":2,"t":10,"fill":"mean"},
                {"op":"splice_out","n":3,"t":10},
                {"op":"mixup","partner":"self","alpha":0.4}
            ]}"#,
        )
        .unwrap();
        let s = spectrogram_sample();
        let run = || {
            let mut rng = SeededSource::new(cfg.seed);
            apply_pipeline(&mut rng, &s, &cfg.pipeline, &PipelineContext::default()).unwrap()
        };
        let (a, b) = (run(), run());
        let bits = |x: &LabeledSample| {
            x.spectrogram()
                .unwrap()
                .data()
                .iter()
                .map(|v| v.to_bits())
                .collect::<Vec<_>>()
        };
        assert_eq!(bits(&a), bits(&b));
        assert_ne!(a, s);
    }

    #[test]
    fn unknown_op_named_in_error() {
        let err = PipelineConfig::from_json(r#"{"pipeline":[{"op":"pitch_shift"}]}"#).unwrap_err();
        let msg = err.to_string();
        assert!(matches!(err, Error::Config(_)));
        assert!(msg.contains("pitch_shift"), "{msg}");
    }

    #[test]
    fn schema_errors_carry_key_path() {
        let err = PipelineConfig::from_json(r#"{"pipeline":[{"op":"fade"},{"op":"splice_out","n":"x","t":4}]}"#)
            .unwrap_err()
            .to_string();
        assert!(err.contains("pipeline[1].n"), "{err}");
        let err = PipelineConfig::from_json(r#"{"pipeline":[{"op":"time_mask","n":1,"t":0}]}"#)
            .unwrap_err()
            .to_string();
        assert!(err.contains("pipeline[0].t"), "{err}");
        let err = PipelineConfig::from_json(r#"{"pipeline":[{"op":"fade","bogus":1}]}"#)
            .unwrap_err()
            .to_string();
        assert!(err.contains("bogus"), "{err}");
    }

    #[test]
    fn fill_spec_forms() {
        let cfg = PipelineConfig::from_json(
            r#"{"pipeline":[{"op":"time_mask","n":1,"t":2,"fill":-3.5},{"op":"freq_mask","n":1,"fill":"mean"}]}"#,
        )
        .unwrap();
        assert_eq!(
            cfg.pipeline[0],
            OpConfig::TimeMask {
                n: 1,
                t: 2,
                fill: FillSpec::Value(-3.5)
            }
        );
        assert_eq!(
            cfg.pipeline[1],
            OpConfig::FreqMask {
                n: 1,
                t: 8,
                fill: FillSpec::Named(FillName::Mean)
            }
        );
    }

    #[test]
    fn representation_mismatch_is_config_error() {
        let s = spectrogram_sample();
        let mut rng = SeededSource::new(0);
        let err = apply_op(
            &mut rng,
            &s,
            &OpConfig::Fade { max_fraction: 0.5 },
            &PipelineContext::default(),
        )
        .unwrap_err();
        assert!(matches!(err, Error::Config(_)));
        let w = LabeledSample::unlabeled(Features::Waveform(Waveform::new(vec![0.0; 100], 8000).unwrap()));
        let err = apply_op(
            &mut rng,
            &w,
            &OpConfig::SpliceOut { n: 1, t: 2, min_retained: 1 },
            &PipelineContext::default(),
        )
        .unwrap_err();
        assert!(matches!(err, Error::Config(_)));
    }

    #[test]
    fn semantic_ops_use_context_spans() {
        let s = spectrogram_sample();
        let spans: Vec<TokenSpan> = (0..6)
            .map(|i| TokenSpan {
                start_frame: i * 10,
                end_frame: i * 10 + 5,
                token_id: i as u32,
            })
            .collect();
        let ctx = PipelineContext {
            partner: None,
            spans: Some(&spans),
        };
        let mut rng = SeededSource::new(4);
        let op = OpConfig::SemanticSplice {
            ratio: 0.5,
            spans: None,
            min_retained: 1,
        };
        let out = apply_op(&mut rng, &s, &op, &ctx).unwrap();
        assert_eq!(out.spectrogram().unwrap().n_frames(), 60 - 15);
        let missing = apply_op(&mut rng, &s, &op, &PipelineContext::default());
        assert!(matches!(missing, Err(Error::Data(_))));
    }

    #[test]
    fn mixup_with_partner_mixes_labels() {
        let a = LabeledSample::new(Features::Spectrogram(Matrix::filled(3, 2, 1.0)), vec![1.0, 0.0]).unwrap();
        let b = LabeledSample::new(Features::Spectrogram(Matrix::filled(3, 2, 3.0)), vec![0.0, 1.0]).unwrap();
        let ctx = PipelineContext {
            partner: Some(&b),
            spans: None,
        };
        let mut rng = SeededSource::new(10);
        let out = apply_op(
            &mut rng,
            &a,
            &OpConfig::Mixup {
                alpha: 1.0,
                lambda: None,
                partner: Partner::Next,
            },
            &ctx,
        )
        .unwrap();
        let lam = out.label[0];
        assert!(lam > 0.0 && lam < 1.0);
        let v = out.spectrogram().unwrap().get(0, 0) as f64;
        assert!((v - (lam + 3.0 * (1.0 - lam))).abs() < 1e-5);
    }

    #[test]
    fn waveform_pipeline() {
        let cfg = PipelineConfig::from_json(
            r#"{"pipeline":[{"op":"speed_perturb","factor":0.5},{"op":"splice_out_wave","n":2,"t":20},{"op":"fade"}]}"#,
        )
        .unwrap();
        let w = LabeledSample::unlabeled(Features::Waveform(Waveform::new(vec![0.5; 100], 8000).unwrap()));
        let mut rng = SeededSource::new(0);
        let out = apply_pipeline(&mut rng, &w, &cfg.pipeline, &PipelineContext::default()).unwrap();
        let out = out.waveform().unwrap();
        assert!(out.len() <= 200 && out.len() > 160);
    }
}
