//! Synthetic inputs for benchmarks, analysis runs and examples.

use crate::augment::mixing::standard_normal;
use crate::augment::rng::{derive_seed, RandomSource, SeededSource};
use crate::signal_io::{Matrix, Waveform};

/// Log-mel-like spectrogram: every bin is a Gaussian random walk along time,
/// started from a level that falls with frequency (about -2 at the lowest bin
/// to -10 at the highest, plus per-bin jitter).
pub fn random_walk_spectrogram<R: RandomSource + ?Sized>(
    rng: &mut R,
    n_frames: usize,
    n_bins: usize,
    step: f64,
) -> Matrix {
    let mut level: Vec<f64> = (0..n_bins)
        .map(|b| -2.0 - 8.0 * b as f64 / n_bins.max(1) as f64 + 0.5 * standard_normal(rng))
        .collect();
    let mut data = Vec::with_capacity(n_frames * n_bins);
    for _ in 0..n_frames {
        for v in level.iter_mut() {
            data.push(*v as f32);
            *v += step * standard_normal(rng);
        }
    }
    Matrix::from_parts_unchecked(n_frames, n_bins, data)
}

/// `count` random-walk spectrograms with per-item seeds derived from `seed`.
pub fn random_walk_corpus(seed: u64, count: usize, n_frames: usize, n_bins: usize) -> Vec<Matrix> {
    (0..count)
        .map(|i| {
            let mut rng = SeededSource::new(derive_seed(seed, i as u64));
            random_walk_spectrogram(&mut rng, n_frames, n_bins, 0.1)
        })
        .collect()
}

/// Sum of a few harmonics with a slow amplitude envelope and a little noise.
pub fn voiced_waveform(seed: u64, n_samples: usize, sample_rate: u32, f0: f64) -> Waveform {
    let mut rng = SeededSource::new(seed);
    let sr = sample_rate as f64;
    let samples = (0..n_samples)
        .map(|i| {
            let t = i as f64 / sr;
            let env = 0.5 + 0.5 * (2.0 * std::f64::consts::PI * 3.0 * t).sin().abs();
            let tone: f64 = (1..=4)
                .map(|h| (2.0 * std::f64::consts::PI * f0 * h as f64 * t).sin() / h as f64)
                .sum();
            let noise = 0.02 * standard_normal(&mut rng);
            ((0.3 * env * tone + noise).clamp(-1.0, 1.0)) as f32
        })
        .collect();
    Waveform::from_parts_unchecked(samples, sample_rate)
}
