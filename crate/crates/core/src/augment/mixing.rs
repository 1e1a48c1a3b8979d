//! Label-mixing augmentations (mixup, CutMix) and the Beta sampler behind mixup.

use crate::augment::interval::Interval;
use crate::augment::rng::RandomSource;
use crate::error::{Error, Result};
use crate::signal_io::{Matrix, Waveform};

#[derive(Debug, Clone, PartialEq)]
pub enum Features {
    Spectrogram(Matrix),
    Waveform(Waveform),
}

impl Features {
    pub fn kind(&self) -> &'static str {
        match self {
            Features::Spectrogram(_) => "spectrogram",
            Features::Waveform(_) => "waveform",
        }
    }
}

/// Feature payload paired with a dense probability label.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledSample {
    pub features: Features,
    pub label: Vec<f64>,
}

impl LabeledSample {
    pub fn new(features: Features, label: Vec<f64>) -> Result<Self> {
        if label.iter().any(|&p| !(p >= 0.0 && p.is_finite())) {
            return Err(Error::Data("label entries must be finite and non-negative".into()));
        }
        let sum: f64 = label.iter().sum();
        if (sum - 1.0).abs() > 1e-6 {
            return Err(Error::Data(format!("label sums to {sum}, expected 1")));
        }
        Ok(Self { features, label })
    }

    /// Sample with the single-class label `[1.0]`.
    pub fn unlabeled(features: Features) -> Self {
        Self {
            features,
            label: vec![1.0],
        }
    }

    pub fn spectrogram(&self) -> Option<&Matrix> {
        match &self.features {
            Features::Spectrogram(m) => Some(m),
            Features::Waveform(_) => None,
        }
    }

    pub fn waveform(&self) -> Option<&Waveform> {
        match &self.features {
            Features::Waveform(w) => Some(w),
            Features::Spectrogram(_) => None,
        }
    }
}

fn mix_labels(a: &[f64], b: &[f64], lambda: f64) -> Result<Vec<f64>> {
    if a.len() != b.len() {
        return Err(Error::Shape(format!(
            "label dimensions differ: {} vs {}",
            a.len(),
            b.len()
        )));
    }
    Ok(a.iter()
        .zip(b)
        .map(|(&x, &y)| lambda * x + (1.0 - lambda) * y)
        .collect())
}

fn mix_values(a: &[f32], b: &[f32], lambda: f64) -> Vec<f32> {
    a.iter()
        .zip(b)
        .map(|(&x, &y)| (lambda * x as f64 + (1.0 - lambda) * y as f64) as f32)
        .collect()
}

/// Convex combination `lambda * a + (1 - lambda) * b` of features and labels.
pub fn mixup(a: &LabeledSample, b: &LabeledSample, lambda: f64) -> Result<LabeledSample> {
    if !(0.0..=1.0).contains(&lambda) {
        return Err(Error::Config(format!("mixup weight {lambda} outside [0, 1]")));
    }
    let features = match (&a.features, &b.features) {
        (Features::Spectrogram(x), Features::Spectrogram(y)) => {
            if x.shape() != y.shape() {
                return Err(Error::Shape(format!(
                    "spectrogram shapes differ: {:?} vs {:?}",
                    x.shape(),
                    y.shape()
                )));
            }
            let (f, b) = x.shape();
            Features::Spectrogram(Matrix::from_parts_unchecked(
                f,
                b,
                mix_values(x.data(), y.data(), lambda),
            ))
        }
        (Features::Waveform(x), Features::Waveform(y)) => {
            if x.len() != y.len() || x.sample_rate() != y.sample_rate() {
                return Err(Error::Shape(format!(
                    "waveforms differ: {} samples @ {} Hz vs {} samples @ {} Hz",
                    x.len(),
                    x.sample_rate(),
                    y.len(),
                    y.sample_rate()
                )));
            }
            Features::Waveform(Waveform::from_parts_unchecked(
                mix_values(x.samples(), y.samples(), lambda),
                x.sample_rate(),
            ))
        }
        (x, y) => {
            return Err(Error::Shape(format!(
                "cannot mix {} with {}",
                x.kind(),
                y.kind()
            )))
        }
    };
    Ok(LabeledSample {
        features,
        label: mix_labels(&a.label, &b.label, lambda)?,
    })
}

/// Standard normal via Box-Muller; consumes two `next_unit` draws.
pub fn standard_normal<R: RandomSource + ?Sized>(rng: &mut R) -> f64 {
    let u1 = 1.0 - rng.next_unit();
    let u2 = rng.next_unit();
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

/// Gamma(shape, 1) by Marsaglia-Tsang; shapes below 1 use the `U^(1/shape)` boost.
pub fn sample_gamma<R: RandomSource + ?Sized>(rng: &mut R, shape: f64) -> f64 {
    assert!(shape > 0.0, "gamma shape must be positive");
    if shape < 1.0 {
        let g = sample_gamma(rng, shape + 1.0);
        let u = 1.0 - rng.next_unit();
        return g * u.powf(1.0 / shape);
    }
    let d = shape - 1.0 / 3.0;
    let c = 1.0 / (9.0 * d).sqrt();
    loop {
        let x = standard_normal(rng);
        let v = 1.0 + c * x;
        if v <= 0.0 {
            continue;
        }
        let v = v * v * v;
        let u = rng.next_unit();
        if u < 1.0 - 0.0331 * x.powi(4) || u.ln() < 0.5 * x * x + d * (1.0 - v + v.ln()) {
            return d * v;
        }
    }
}

/// Symmetric Beta(alpha, alpha) draw as `X / (X + Y)` with `X, Y ~ Gamma(alpha)`.
/// Draws landing exactly on 0 or 1 are redrawn, so the result is in `(0, 1)`.
pub fn sample_beta<R: RandomSource + ?Sized>(rng: &mut R, alpha: f64) -> f64 {
    assert!(alpha > 0.0 && alpha.is_finite(), "alpha must be positive");
    loop {
        let x = sample_gamma(rng, alpha);
        let y = sample_gamma(rng, alpha);
        let b = x / (x + y);
        if b > 0.0 && b < 1.0 {
            return b;
        }
    }
}

/// Time-by-frequency rectangle for CutMix.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Rect {
    pub time: Interval,
    pub freq: Interval,
}

impl Rect {
    pub fn area(&self) -> usize {
        self.time.len() * self.freq.len()
    }
}

/// Pastes `b`'s cells inside `rect` into `a`; labels mix with `lambda = 1 - area / total`.
pub fn cutmix(a: &LabeledSample, b: &LabeledSample, rect: Rect) -> Result<(LabeledSample, f64)> {
    let (x, y) = match (&a.features, &b.features) {
        (Features::Spectrogram(x), Features::Spectrogram(y)) => (x, y),
        (x, y) => {
            return Err(Error::Shape(format!(
                "cutmix needs two spectrograms, got {} and {}",
                x.kind(),
                y.kind()
            )))
        }
    };
    if x.shape() != y.shape() {
        return Err(Error::Shape(format!(
            "spectrogram shapes differ: {:?} vs {:?}",
            x.shape(),
            y.shape()
        )));
    }
    let (frames, bins) = x.shape();
    if rect.time.end() > frames || rect.freq.end() > bins {
        let (iv, extent) = if rect.time.end() > frames {
            (rect.time, frames)
        } else {
            (rect.freq, bins)
        };
        return Err(Error::Bounds {
            start: iv.start(),
            end: iv.end(),
            extent,
        });
    }
    let total = frames * bins;
    let lambda = if total == 0 || rect.area() == 0 {
        1.0
    } else {
        1.0 - rect.area() as f64 / total as f64
    };
    let mut out = x.clone();
    for t in rect.time.start()..rect.time.end() {
        let src = &y.row(t)[rect.freq.start()..rect.freq.end()];
        out.row_mut(t)[rect.freq.start()..rect.freq.end()].copy_from_slice(src);
    }
    let label = mix_labels(&a.label, &b.label, lambda)?;
    Ok((
        LabeledSample {
            features: Features::Spectrogram(out),
            label,
        },
        lambda,
    ))
}
