//! Augmentations: deterministic interval application plus explicitly seeded sampling.
//!
//! Sampling (`sample_intervals`, `semantic_intervals`, `sample_beta`, ...) is
//! kept separate from application (`apply_splice`, `apply_mask`, `mixup`, ...)
//! so every stochastic op can be replayed from a scripted draw stream.

pub mod interval;
pub mod mixing;
pub mod pipeline;
pub mod rng;
pub mod semantic;
pub mod spectral;
pub mod waveform;

pub use interval::{sample_intervals, Interval, IntervalSet, SpliceConfig};
pub use mixing::{cutmix, mixup, sample_beta, sample_gamma, standard_normal, Features, LabeledSample, Rect};
pub use pipeline::{apply_op, apply_pipeline, OpConfig, PipelineConfig, PipelineContext};
pub use rng::{derive_seed, mix64, RandomSource, ScriptedSource, SeededSource};
pub use semantic::{semantic_intervals, TokenSpan};
pub use spectral::{
    apply_mask, apply_splice, freq_mask, splice_out, time_mask, time_warp, warp_frames, Axis,
    FillPolicy,
};
pub use waveform::{apply_fade, apply_splice_wave, fade, speed_perturb, splice_out_wave};
