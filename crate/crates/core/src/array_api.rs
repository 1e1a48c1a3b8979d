//! Seed-driven entry points on flat row-major `f32` buffers.
//!
//! These are the functions a foreign-language binding wraps: every call takes
//! a `(n_frames, n_bins)` shape and a `u64` seed, builds a [`SeededSource`]
//! from that seed, and returns a fresh buffer. Results are bit-identical to the
//! corresponding [`crate::augment`] call with `SeededSource::new(seed)`.

use crate::augment::interval::SpliceConfig;
use crate::augment::mixing::{mixup as mixup_samples, Features, LabeledSample};
use crate::augment::rng::SeededSource;
use crate::augment::spectral::{self, FillPolicy};
use crate::error::Result;
use crate::signal_io::Matrix;

/// Row-major buffer plus its `(n_frames, n_bins)` shape.
pub type Array2 = (Vec<f32>, (usize, usize));

fn matrix(data: &[f32], shape: (usize, usize)) -> Result<Matrix> {
    Matrix::new(shape.0, shape.1, data.to_vec())
}

fn unpack(m: Matrix) -> Array2 {
    let shape = m.shape();
    (m.into_data(), shape)
}

pub fn splice_out(
    data: &[f32],
    shape: (usize, usize),
    n: usize,
    t: usize,
    seed: u64,
) -> Result<Array2> {
    let m = matrix(data, shape)?;
    let mut rng = SeededSource::new(seed);
    spectral::splice_out(&mut rng, &m, &SpliceConfig::new(n, t)).map(unpack)
}

pub fn time_mask(
    data: &[f32],
    shape: (usize, usize),
    n: usize,
    t: usize,
    fill: FillPolicy,
    seed: u64,
) -> Result<Array2> {
    let m = matrix(data, shape)?;
    let mut rng = SeededSource::new(seed);
    spectral::time_mask(&mut rng, &m, &SpliceConfig::new(n, t), fill).map(unpack)
}

pub fn freq_mask(
    data: &[f32],
    shape: (usize, usize),
    n: usize,
    t: usize,
    fill: FillPolicy,
    seed: u64,
) -> Result<Array2> {
    let m = matrix(data, shape)?;
    let mut rng = SeededSource::new(seed);
    spectral::freq_mask(&mut rng, &m, &SpliceConfig::new(n, t), fill).map(unpack)
}

/// Mixes two equally shaped arrays and their labels with weight `lambda`.
pub fn mixup(
    a: &[f32],
    label_a: &[f64],
    b: &[f32],
    label_b: &[f64],
    shape: (usize, usize),
    lambda: f64,
) -> Result<(Array2, Vec<f64>)> {
    let sa = LabeledSample::new(Features::Spectrogram(matrix(a, shape)?), label_a.to_vec())?;
    let sb = LabeledSample::new(Features::Spectrogram(matrix(b, shape)?), label_b.to_vec())?;
    let out = mixup_samples(&sa, &sb, lambda)?;
    let label = out.label;
    match out.features {
        Features::Spectrogram(m) => Ok((unpack(m), label)),
        Features::Waveform(_) => unreachable!("mixup keeps the representation"),
    }
}
