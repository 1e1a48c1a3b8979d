use serde::Serialize;

use super::align::ErrorCounts;
use crate::augment::rng::RandomSource;
use crate::error::{Error, Result};

/// `(S + I + D) / (C + S + D)` summed over the corpus.
pub fn corpus_wer(counts: &[ErrorCounts]) -> Result<f64> {
    let total: ErrorCounts = counts.iter().copied().sum();
    if total.ref_len() == 0 {
        return Err(Error::Data("corpus has no reference words".into()));
    }
    Ok(total.errors() as f64 / total.ref_len() as f64)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BootstrapResult {
    pub wer: f64,
    /// Sample standard deviation of the resampled WERs.
    pub std_error: f64,
    /// Percentile interval (2.5%, 97.5%) of the resampled WERs, widened if
    /// needed so it contains `wer`.
    pub ci95: (f64, f64),
    /// `wer -/+ 1.96 * std_error`, for comparison.
    pub ci95_normal: (f64, f64),
    pub ci_method: &'static str,
    pub b: usize,
    pub n: usize,
}

/// Linear-interpolation quantile of sorted data.
fn quantile(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (pos - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Sample standard deviation, accumulated relative to the first value so that
/// identical inputs give exactly zero.
fn sample_std(values: &[f64]) -> f64 {
    let k = values[0];
    let (mut s, mut s2) = (0.0, 0.0);
    for &v in values {
        let d = v - k;
        s += d;
        s2 += d * d;
    }
    let n = values.len() as f64;
    ((s2 - s * s / n) / (n - 1.0)).max(0.0).sqrt()
}

/// Resamples sentences with replacement `b` times.
///
/// Each resample draws `n` indices with `next_below(n)`. A resample with no
/// reference words is discarded and redrawn.
pub fn bootstrap_wer<R: RandomSource + ?Sized>(
    counts: &[ErrorCounts],
    b: usize,
    rng: &mut R,
) -> Result<BootstrapResult> {
    let n = counts.len();
    if n == 0 {
        return Err(Error::Data("bootstrap needs at least one sentence".into()));
    }
    if b < 2 {
        return Err(Error::Config(format!("bootstrap needs B >= 2, got {b}")));
    }
    let wer = corpus_wer(counts)?;
    let mut values = Vec::with_capacity(b);
    while values.len() < b {
        let mut total = ErrorCounts::default();
        for _ in 0..n {
            total = total + counts[rng.next_below(n as u64) as usize];
        }
        if total.ref_len() > 0 {
            values.push(total.errors() as f64 / total.ref_len() as f64);
        }
    }
    let std_error = sample_std(&values);
    values.sort_by(f64::total_cmp);
    let low = quantile(&values, 0.025).min(wer);
    let high = quantile(&values, 0.975).max(wer);
    Ok(BootstrapResult {
        wer,
        std_error,
        ci95: (low, high),
        ci95_normal: (wer - 1.96 * std_error, wer + 1.96 * std_error),
        ci_method: "percentile",
        b,
        n,
    })
}
