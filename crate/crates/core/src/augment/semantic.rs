use serde::{Deserialize, Serialize};

use crate::augment::interval::{Interval, IntervalSet};
use crate::augment::rng::RandomSource;
use crate::error::{Error, Result};

/// Frame span `[start_frame, end_frame)` aligned to one word or word piece.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TokenSpan {
    pub start_frame: usize,
    pub end_frame: usize,
    pub token_id: u32,
}

/// Checks spans are well formed, sorted, non-overlapping and inside `[0, n_frames)`.
pub fn validate_spans(spans: &[TokenSpan], n_frames: usize) -> Result<()> {
    let mut prev_end = 0;
    for (i, s) in spans.iter().enumerate() {
        if s.start_frame > s.end_frame || s.end_frame > n_frames {
            return Err(Error::Data(format!(
                "token span {i} [{}, {}) invalid for {n_frames} frames",
                s.start_frame, s.end_frame
            )));
        }
        if s.start_frame < prev_end {
            return Err(Error::Data(format!(
                "token span {i} overlaps or precedes its predecessor"
            )));
        }
        prev_end = s.end_frame;
    }
    Ok(())
}

/// Number of tokens selected at `ratio`: `ceil(ratio * n)`.
pub fn tokens_to_select(ratio: f64, n_tokens: usize) -> usize {
    // tolerate representation error such as 0.7 * 10 = 7.000000000000001
    let k = (ratio * n_tokens as f64 - 1e-9).ceil().max(0.0) as usize;
    k.min(n_tokens)
}

/// Selects `ceil(ratio * n)` distinct tokens uniformly without replacement.
///
/// Partial Fisher-Yates: for `i in 0..k`, `j = i + next_below(n - i)`, swap.
/// Spans are returned in selection order.
pub fn semantic_intervals<R: RandomSource + ?Sized>(
    rng: &mut R,
    spans: &[TokenSpan],
    ratio: f64,
) -> Result<IntervalSet> {
    if !(0.0..=1.0).contains(&ratio) {
        return Err(Error::Config(format!("token ratio {ratio} outside [0, 1]")));
    }
    let n = spans.len();
    let k = tokens_to_select(ratio, n);
    let mut order: Vec<usize> = (0..n).collect();
    for i in 0..k {
        let j = i + rng.next_below((n - i) as u64) as usize;
        order.swap(i, j);
    }
    Ok(IntervalSet::new(
        order[..k]
            .iter()
            .map(|&i| Interval::new(spans[i].start_frame, spans[i].end_frame))
            .collect(),
    ))
}
