//! SpliceOut and friends: spectrogram and waveform augmentations for speech,
//! with the tooling used to compare them.
//!
//! * [`augment`]: SpliceOut, time/frequency masking, semantic variants, mixup,
//!   CutMix, time warp, and waveform ops, all driven by an explicit [`augment::RandomSource`].
//! * [`features`]: log-mel front end.
//! * [`analysis`]: time-averaged statistics distortion.
//! * [`bench`]: padded-batch memory and proxy step-time sweep.
//! * [`evalstats`]: WER alignment, bootstrap confidence intervals, MAPSSWE.
//! * [`signal_io`]: WAV, SPGM and CSV formats.

pub mod analysis;
pub mod array_api;
pub mod augment;
pub mod bench;
pub mod cli;
pub mod error;
pub mod evalstats;
pub mod features;
pub mod signal_io;
pub mod synth;

pub use error::{Error, Result};
pub use signal_io::{Matrix, Waveform};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
