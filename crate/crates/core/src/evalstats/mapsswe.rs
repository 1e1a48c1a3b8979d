use serde::{Serialize, Serializer};

use super::align::ErrorCounts;
use crate::error::{Error, Result};

/// Standard normal CDF via the complementary error function.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x / std::f64::consts::SQRT_2)
}

fn serialize_z<S: Serializer>(z: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    if z.is_infinite() {
        s.serialize_str(if *z > 0.0 { "inf" } else { "-inf" })
    } else {
        s.serialize_f64(*z)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MapssweResult {
    /// Infinite (serialized as `"inf"` / `"-inf"`) when every segment differs by the same non-zero amount.
    #[serde(serialize_with = "serialize_z")]
    pub z: f64,
    pub p: f64,
    pub n: usize,
    pub mean_diff: f64,
}

/// Matched-pairs test on per-segment error differences `d_i = errors1_i - errors2_i`.
///
/// `z = mean(d) / sqrt(var(d) / n)` with the `n - 1` variance divisor and a
/// two-sided normal p-value.
pub fn mapsswe(sys1: &[ErrorCounts], sys2: &[ErrorCounts]) -> Result<MapssweResult> {
    if sys1.len() != sys2.len() {
        return Err(Error::Shape(format!(
            "systems scored on {} and {} segments",
            sys1.len(),
            sys2.len()
        )));
    }
    let n = sys1.len();
    if n < 2 {
        return Err(Error::Data(format!("MAPSSWE needs at least 2 segments, got {n}")));
    }
    let diffs: Vec<i128> = sys1
        .iter()
        .zip(sys2)
        .map(|(a, b)| a.errors() as i128 - b.errors() as i128)
        .collect();
    let sum: i128 = diffs.iter().sum();
    let sum_sq: i128 = diffs.iter().map(|d| d * d).sum();
    let nn = n as i128;
    // n * sum(d^2) - sum(d)^2 is exact, so a zero variance is detected exactly
    let var_num = nn * sum_sq - sum * sum;
    let mean_diff = sum as f64 / n as f64;
    let (z, p) = if var_num == 0 {
        if sum == 0 {
            (0.0, 1.0)
        } else {
            (f64::INFINITY.copysign(mean_diff), 0.0)
        }
    } else {
        let var = var_num as f64 / (n as f64 * (n as f64 - 1.0));
        let z = mean_diff / (var / n as f64).sqrt();
        let p = libm::erfc(z.abs() / std::f64::consts::SQRT_2);
        (z, p.clamp(0.0, 1.0))
    };
    Ok(MapssweResult {
        z,
        p,
        n,
        mean_diff,
    })
}
