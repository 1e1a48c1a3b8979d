//! Raw-waveform augmentations.

use crate::augment::interval::{sample_intervals, IntervalSet, SpliceConfig};
use crate::augment::rng::RandomSource;
use crate::error::{Error, Result};
use crate::signal_io::Waveform;

/// Removes the union of `iv` (sample indices) and concatenates the rest.
pub fn apply_splice_wave(w: &Waveform, iv: &IntervalSet) -> Result<Waveform> {
    iv.check_bounds(w.len())?;
    let x = w.samples();
    let mut out = Vec::with_capacity(w.len() - iv.coverage());
    let mut cursor = 0;
    for r in iv.merged() {
        out.extend_from_slice(&x[cursor..r.start()]);
        cursor = r.end();
    }
    out.extend_from_slice(&x[cursor..]);
    Ok(Waveform::from_parts_unchecked(out, w.sample_rate()))
}

/// SpliceOut on the sample axis; `cfg` widths are measured in samples.
pub fn splice_out_wave<R: RandomSource + ?Sized>(
    rng: &mut R,
    w: &Waveform,
    cfg: &SpliceConfig,
) -> Result<Waveform> {
    cfg.validate()?;
    let iv = sample_intervals(rng, w.len(), cfg).retaining(w.len(), cfg.min_retained);
    apply_splice_wave(w, &iv)
}

/// Linear fade-in over the first `fade_in` samples (gain `i / fade_in`) and a
/// mirrored fade-out over the last `fade_out`. Overlapping ramps multiply.
pub fn apply_fade(w: &Waveform, fade_in: usize, fade_out: usize) -> Waveform {
    let n = w.len();
    let mut out = w.samples().to_vec();
    for (i, v) in out.iter_mut().take(fade_in).enumerate() {
        *v *= (i as f64 / fade_in as f64) as f32;
    }
    for (i, v) in out.iter_mut().rev().take(fade_out.min(n)).enumerate() {
        *v *= (i as f64 / fade_out as f64) as f32;
    }
    Waveform::from_parts_unchecked(out, w.sample_rate())
}

/// Draws `fade_in = next_below(floor(max_fraction * len) + 1)`, then `fade_out`
/// the same way, and applies [`apply_fade`].
pub fn fade<R: RandomSource + ?Sized>(
    rng: &mut R,
    w: &Waveform,
    max_fraction: f64,
) -> Result<Waveform> {
    if !(max_fraction > 0.0 && max_fraction <= 0.5) {
        return Err(Error::Config(format!(
            "fade max_fraction {max_fraction} outside (0, 0.5]"
        )));
    }
    let limit = (max_fraction * w.len() as f64).floor() as u64 + 1;
    let fade_in = rng.next_below(limit) as usize;
    let fade_out = rng.next_below(limit) as usize;
    Ok(apply_fade(w, fade_in, fade_out))
}

/// Resamples by `factor` with linear interpolation: `round(len / factor)` output
/// samples, sample `i` read at position `i * factor` (clamped to the last sample).
pub fn speed_perturb(w: &Waveform, factor: f64) -> Result<Waveform> {
    if !(factor > 0.0 && factor.is_finite()) {
        return Err(Error::Config(format!("speed factor {factor} must be positive")));
    }
    let x = w.samples();
    if x.is_empty() {
        return Ok(w.clone());
    }
    let out_len = (x.len() as f64 / factor).round() as usize;
    let last = x.len() - 1;
    let out = (0..out_len)
        .map(|i| {
            let pos = i as f64 * factor;
            let j = pos.floor() as usize;
            if j >= last {
                return x[last];
            }
            let frac = pos - j as f64;
            if frac == 0.0 {
                x[j]
            } else {
                (x[j] as f64 + frac * (x[j + 1] as f64 - x[j] as f64)) as f32
            }
        })
        .collect();
    Ok(Waveform::from_parts_unchecked(out, w.sample_rate()))
}
