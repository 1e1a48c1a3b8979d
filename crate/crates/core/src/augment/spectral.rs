//! Spectrogram-domain operations: splicing, masking and time warping.

use serde::{Deserialize, Serialize};

use crate::augment::interval::{sample_intervals, IntervalSet, SpliceConfig};
use crate::augment::rng::RandomSource;
use crate::error::{Error, Result};
use crate::signal_io::Matrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Axis {
    Time,
    Frequency,
}

/// Value written into masked cells.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FillPolicy {
    Zero,
    /// Mean over every cell of the unmodified input.
    GlobalMean,
    Value(f32),
}

impl FillPolicy {
    pub fn validate(&self) -> Result<()> {
        match self {
            FillPolicy::Value(v) if !v.is_finite() => {
                Err(Error::Config(format!("fill value {v} is not finite")))
            }
            _ => Ok(()),
        }
    }

    fn resolve(&self, m: &Matrix) -> f32 {
        match *self {
            FillPolicy::Zero => 0.0,
            FillPolicy::GlobalMean => m.global_mean() as f32,
            FillPolicy::Value(v) => v,
        }
    }
}

/// Removes every frame in the union of `iv` and concatenates the remainder in order.
pub fn apply_splice(m: &Matrix, iv: &IntervalSet) -> Result<Matrix> {
    iv.check_bounds(m.n_frames())?;
    let bins = m.n_bins();
    let merged = iv.merged();
    let removed: usize = merged.iter().map(|r| r.len()).sum();
    let kept = m.n_frames() - removed;
    let mut out = Vec::with_capacity(kept * bins);
    let src = m.data();
    let mut cursor = 0;
    for r in &merged {
        out.extend_from_slice(&src[cursor * bins..r.start() * bins]);
        cursor = r.end();
    }
    out.extend_from_slice(&src[cursor * bins..]);
    Ok(Matrix::from_parts_unchecked(kept, bins, out))
}

/// Overwrites the union of `iv` along `axis` with `fill`; shape is preserved.
pub fn apply_mask(m: &Matrix, iv: &IntervalSet, fill: FillPolicy, axis: Axis) -> Result<Matrix> {
    fill.validate()?;
    let extent = match axis {
        Axis::Time => m.n_frames(),
        Axis::Frequency => m.n_bins(),
    };
    iv.check_bounds(extent)?;
    let merged = iv.merged();
    let mut out = m.clone();
    if merged.is_empty() {
        return Ok(out);
    }
    let value = fill.resolve(m);
    match axis {
        Axis::Time => {
            for r in &merged {
                for t in r.start()..r.end() {
                    out.row_mut(t).fill(value);
                }
            }
        }
        Axis::Frequency => {
            for t in 0..out.n_frames() {
                let row = out.row_mut(t);
                for r in &merged {
                    row[r.start()..r.end()].fill(value);
                }
            }
        }
    }
    Ok(out)
}

/// Samples intervals over the frame axis and splices them out, keeping at least
/// `cfg.min_retained` frames.
pub fn splice_out<R: RandomSource + ?Sized>(
    rng: &mut R,
    m: &Matrix,
    cfg: &SpliceConfig,
) -> Result<Matrix> {
    cfg.validate()?;
    let iv = sample_intervals(rng, m.n_frames(), cfg).retaining(m.n_frames(), cfg.min_retained);
    apply_splice(m, &iv)
}

pub fn time_mask<R: RandomSource + ?Sized>(
    rng: &mut R,
    m: &Matrix,
    cfg: &SpliceConfig,
    fill: FillPolicy,
) -> Result<Matrix> {
    cfg.validate()?;
    let iv = sample_intervals(rng, m.n_frames(), cfg);
    apply_mask(m, &iv, fill, Axis::Time)
}

pub fn freq_mask<R: RandomSource + ?Sized>(
    rng: &mut R,
    m: &Matrix,
    cfg: &SpliceConfig,
    fill: FillPolicy,
) -> Result<Matrix> {
    cfg.validate()?;
    let iv = sample_intervals(rng, m.n_bins(), cfg);
    apply_mask(m, &iv, fill, Axis::Frequency)
}

/// 1-D piecewise-linear time warp.
///
/// Draws `anchor = W + next_below(tau - 2W)` then
/// `shift = next_below(2W + 1) - W` and calls [`warp_frames`].
pub fn time_warp<R: RandomSource + ?Sized>(rng: &mut R, m: &Matrix, w: usize) -> Result<Matrix> {
    let tau = m.n_frames();
    if tau <= 2 * w {
        return Err(Error::Precondition(format!(
            "time warp needs more than {} frames, got {tau}",
            2 * w
        )));
    }
    let anchor = w + rng.next_below((tau - 2 * w) as u64) as usize;
    let shift = rng.next_below((2 * w + 1) as u64) as isize - w as isize;
    warp_frames(m, anchor, shift)
}

/// Resamples frames so that source frame `anchor` lands at output frame
/// `anchor + shift`, with both endpoints fixed and linear interpolation between
/// neighbouring source frames.
pub fn warp_frames(m: &Matrix, anchor: usize, shift: isize) -> Result<Matrix> {
    let tau = m.n_frames();
    let target = anchor as isize + shift;
    if tau == 0 || anchor >= tau || target < 0 || target >= tau as isize {
        return Err(Error::Precondition(format!(
            "warp anchor {anchor} shifted by {shift} leaves [0, {tau})"
        )));
    }
    let last = (tau - 1) as f64;
    let a = anchor as f64;
    let d = target as f64;
    let bins = m.n_bins();
    let mut out = Vec::with_capacity(tau * bins);
    for t in 0..tau {
        let tf = t as f64;
        let pos = if t == 0 {
            0.0
        } else if t == tau - 1 {
            last
        } else if tf <= d {
            tf * a / d
        } else {
            a + (tf - d) * (last - a) / (last - d)
        };
        let i = (pos.floor() as usize).min(tau - 1);
        let frac = pos - i as f64;
        if frac == 0.0 || i + 1 >= tau {
            out.extend_from_slice(m.row(i));
        } else {
            let (lo, hi) = (m.row(i), m.row(i + 1));
            out.extend(
                lo.iter()
                    .zip(hi)
                    .map(|(&x0, &x1)| (x0 as f64 + frac * (x1 as f64 - x0 as f64)) as f32),
            );
        }
    }
    Ok(Matrix::from_parts_unchecked(tau, bins, out))
}
