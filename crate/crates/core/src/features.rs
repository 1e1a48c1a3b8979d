//! Log-mel front end: framing, Hann-windowed power spectrum, HTK mel filterbank.

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::signal_io::{Matrix, Waveform};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FeatureConfig {
    pub frame_len_ms: f64,
    pub hop_ms: f64,
    pub n_mels: usize,
    pub fmin: f64,
    /// Upper edge of the filterbank in Hz; `None` means Nyquist.
    pub fmax: Option<f64>,
    pub log_floor: f64,
}

impl Default for FeatureConfig {
    fn default() -> Self {
        Self {
            frame_len_ms: 25.0,
            hop_ms: 10.0,
            n_mels: 80,
            fmin: 0.0,
            fmax: None,
            log_floor: 1e-10,
        }
    }
}

impl FeatureConfig {
    pub fn fmax_for(&self, sample_rate: u32) -> f64 {
        self.fmax.unwrap_or(sample_rate as f64 / 2.0)
    }

    pub fn validate(&self, sample_rate: u32) -> Result<()> {
        let nyquist = sample_rate as f64 / 2.0;
        let fmax = self.fmax_for(sample_rate);
        if !(self.hop_ms > 0.0 && self.frame_len_ms >= self.hop_ms) {
            return Err(Error::Config(format!(
                "need frame_len_ms >= hop_ms > 0, got {} / {}",
                self.frame_len_ms, self.hop_ms
            )));
        }
        if !(self.fmin >= 0.0 && self.fmin < fmax && fmax <= nyquist) {
            return Err(Error::Config(format!(
                "need 0 <= fmin < fmax <= {nyquist}, got fmin={} fmax={fmax}",
                self.fmin
            )));
        }
        if self.n_mels == 0 {
            return Err(Error::Config("n_mels must be at least 1".into()));
        }
        if !(self.log_floor > 0.0 && self.log_floor.is_finite()) {
            return Err(Error::Config("log_floor must be positive".into()));
        }
        Ok(())
    }

    /// Frame length and hop in samples at `sample_rate`.
    pub fn frame_and_hop(&self, sample_rate: u32) -> (usize, usize) {
        let sr = sample_rate as f64;
        let frame = (sr * self.frame_len_ms / 1000.0).round().max(1.0) as usize;
        let hop = (sr * self.hop_ms / 1000.0).round().max(1.0) as usize;
        (frame, hop)
    }
}

/// Slices a signal into overlapping frames; frame `i` starts at `i * hop`.
/// Signals shorter than one frame yield zero rows.
pub fn frame_signal(wave: &Waveform, frame_len: usize, hop: usize) -> Matrix {
    assert!(frame_len >= 1 && hop >= 1, "frame_len and hop must be positive");
    let x = wave.samples();
    let n_frames = if x.len() < frame_len {
        0
    } else {
        (x.len() - frame_len) / hop + 1
    };
    let mut data = Vec::with_capacity(n_frames * frame_len);
    for i in 0..n_frames {
        data.extend_from_slice(&x[i * hop..i * hop + frame_len]);
    }
    Matrix::from_parts_unchecked(n_frames, frame_len, data)
}

/// Periodic Hann window `w[n] = 0.5 - 0.5 cos(2 pi n / L)`.
pub fn hann_window(len: usize) -> Vec<f64> {
    (0..len)
        .map(|n| 0.5 - 0.5 * (2.0 * std::f64::consts::PI * n as f64 / len as f64).cos())
        .collect()
}

/// FFT size used for frames of `frame_len` samples: the next power of two.
pub fn fft_size(frame_len: usize) -> usize {
    frame_len.next_power_of_two()
}

/// Squared magnitude of bins `0..=n_fft/2` of each Hann-windowed, zero-padded frame.
pub fn power_spectrum(frames: &Matrix) -> Matrix {
    let frame_len = frames.n_bins();
    assert!(frame_len >= 2, "frame length must be at least 2");
    let n_fft = fft_size(frame_len);
    let n_out = n_fft / 2 + 1;
    let window = hann_window(frame_len);
    let fft = FftPlanner::<f64>::new().plan_fft_forward(n_fft);
    let mut buf = vec![Complex::new(0.0, 0.0); n_fft];
    let mut scratch = vec![Complex::new(0.0, 0.0); fft.get_inplace_scratch_len()];
    let mut out = Vec::with_capacity(frames.n_frames() * n_out);
    for row in frames.rows() {
        for (slot, (&x, &w)) in buf.iter_mut().zip(row.iter().zip(&window)) {
            *slot = Complex::new(x as f64 * w, 0.0);
        }
        buf[frame_len..].fill(Complex::new(0.0, 0.0));
        fft.process_with_scratch(&mut buf, &mut scratch);
        out.extend(buf[..n_out].iter().map(|c| c.norm_sqr() as f32));
    }
    Matrix::from_parts_unchecked(frames.n_frames(), n_out, out)
}

pub fn hz_to_mel(f: f64) -> f64 {
    2595.0 * (1.0 + f / 700.0).log10()
}

pub fn mel_to_hz(m: f64) -> f64 {
    700.0 * (10f64.powf(m / 2595.0) - 1.0)
}

/// Triangular filter weights, `n_mels` rows by `n_fft/2 + 1` columns.
#[derive(Debug, Clone, PartialEq)]
pub struct FilterBank {
    weights: Matrix,
}

impl FilterBank {
    pub fn weights(&self) -> &Matrix {
        &self.weights
    }

    pub fn n_mels(&self) -> usize {
        self.weights.n_frames()
    }

    /// Mel energies for every row of a power spectrogram.
    pub fn apply(&self, power: &Matrix) -> Matrix {
        assert_eq!(power.n_bins(), self.weights.n_bins());
        let n_mels = self.n_mels();
        let mut out = Vec::with_capacity(power.n_frames() * n_mels);
        for row in power.rows() {
            for filt in self.weights.rows() {
                let e: f64 = filt
                    .iter()
                    .zip(row)
                    .map(|(&w, &p)| w as f64 * p as f64)
                    .sum();
                out.push(e as f32);
            }
        }
        Matrix::from_parts_unchecked(power.n_frames(), n_mels, out)
    }
}

/// HTK-scale triangular filterbank with centers equally spaced in mel between `fmin` and `fmax`.
pub fn mel_filterbank(n_fft: usize, sample_rate: u32, cfg: &FeatureConfig) -> Result<FilterBank> {
    cfg.validate(sample_rate)?;
    let n_bins = n_fft / 2 + 1;
    let mel_lo = hz_to_mel(cfg.fmin);
    let mel_hi = hz_to_mel(cfg.fmax_for(sample_rate));
    let points: Vec<f64> = (0..cfg.n_mels + 2)
        .map(|i| mel_to_hz(mel_lo + (mel_hi - mel_lo) * i as f64 / (cfg.n_mels + 1) as f64))
        .collect();
    let bin_hz = sample_rate as f64 / n_fft as f64;
    let mut weights = Matrix::zeros(cfg.n_mels, n_bins);
    for m in 0..cfg.n_mels {
        let (lo, center, hi) = (points[m], points[m + 1], points[m + 2]);
        let row = weights.row_mut(m);
        for (k, w) in row.iter_mut().enumerate() {
            let f = k as f64 * bin_hz;
            let v = if f > lo && f <= center {
                (f - lo) / (center - lo)
            } else if f > center && f < hi {
                (hi - f) / (hi - center)
            } else {
                0.0
            };
            *w = v as f32;
        }
        if !row.iter().any(|&w| w > 0.0) {
            return Err(Error::Config(format!(
                "mel filter {m} ({lo:.1}-{hi:.1} Hz) covers no FFT bin; reduce n_mels or raise n_fft"
            )));
        }
    }
    Ok(FilterBank { weights })
}

/// Natural-log mel spectrogram, `n_frames x n_mels`, floored at `cfg.log_floor`.
pub fn extract_logmel(wave: &Waveform, cfg: &FeatureConfig) -> Result<Matrix> {
    cfg.validate(wave.sample_rate())?;
    let (frame_len, hop) = cfg.frame_and_hop(wave.sample_rate());
    if frame_len < 2 {
        return Err(Error::Config(format!(
            "frame of {frame_len} samples is too short"
        )));
    }
    let bank = mel_filterbank(fft_size(frame_len), wave.sample_rate(), cfg)?;
    let frames = frame_signal(wave, frame_len, hop);
    let power = power_spectrum(&frames);
    let mut mel = bank.apply(&power);
    let floor = cfg.log_floor;
    for v in mel.data_mut() {
        *v = (*v as f64).max(floor).ln() as f32;
    }
    Ok(mel)
}
