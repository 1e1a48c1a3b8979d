//! Time-averaged statistics and how far augmentations move them.
//!
//! For each frequency bin the mean and population variance over frames are
//! taken. Distortion of a statistic is `100 * |aug - orig|_1 / |orig|_1`,
//! with the l1 norm over bins, averaged over independently seeded trials.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::augment::interval::SpliceConfig;
use crate::augment::rng::{derive_seed, RandomSource, SeededSource};
use crate::augment::spectral::{splice_out, time_mask, FillPolicy};
use crate::error::{Error, Result};
use crate::signal_io::Matrix;

/// Per-bin statistic.
#[derive(Debug, Clone, PartialEq)]
pub struct StatVector(pub Vec<f64>);

impl StatVector {
    pub fn l1(&self) -> f64 {
        self.0.iter().map(|v| v.abs()).sum()
    }

    pub fn l1_distance(&self, other: &StatVector) -> f64 {
        self.0.iter().zip(&other.0).map(|(a, b)| (a - b).abs()).sum()
    }
}

/// Per-bin mean and population variance over frames.
pub fn time_avg_stats(m: &Matrix) -> Result<(StatVector, StatVector)> {
    if m.n_frames() == 0 {
        return Err(Error::Data("time-averaged statistics need at least one frame".into()));
    }
    let bins = m.n_bins();
    let n = m.n_frames() as f64;
    // accumulate offsets from the first frame so constant bins come out exact
    let first: Vec<f64> = m.row(0).iter().map(|&v| v as f64).collect();
    let mut mean = vec![0.0f64; bins];
    for row in m.rows().skip(1) {
        for ((acc, &v), x0) in mean.iter_mut().zip(row).zip(&first) {
            *acc += v as f64 - x0;
        }
    }
    mean.iter_mut().zip(&first).for_each(|(v, x0)| *v = x0 + *v / n);
    // two-pass for stability; rows of identical values give exactly zero
    let mut var = vec![0.0f64; bins];
    for row in m.rows() {
        for ((acc, &v), mu) in var.iter_mut().zip(row).zip(&mean) {
            let d = v as f64 - mu;
            *acc += d * d;
        }
    }
    var.iter_mut().for_each(|v| *v /= n);
    Ok((StatVector(mean), StatVector(var)))
}

/// Distortion of one augmentation on one input.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Distortion {
    pub mean_pct: f64,
    pub var_pct: f64,
    /// The original statistic had zero l1 norm, so `mean_pct` holds an absolute l1 distance.
    pub mean_absolute: bool,
    pub var_absolute: bool,
    pub trials: usize,
}

fn relative_or_absolute(dist: f64, norm: f64) -> (f64, bool) {
    if norm == 0.0 {
        (dist, true)
    } else {
        (100.0 * dist / norm, false)
    }
}

/// Runs `aug` for `trials` seeds derived from `base_seed` and averages the distortion.
pub fn distortion<F>(original: &Matrix, aug: F, trials: usize, base_seed: u64) -> Result<Distortion>
where
    F: Fn(&mut dyn RandomSource, &Matrix) -> Result<Matrix> + Sync,
{
    if trials == 0 {
        return Err(Error::Config("distortion needs at least one trial".into()));
    }
    let (mean0, var0) = time_avg_stats(original)?;
    let (mean_norm, var_norm) = (mean0.l1(), var0.l1());
    let per_trial: Vec<(f64, f64)> = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let mut rng = SeededSource::new(derive_seed(base_seed, trial as u64));
            let out = aug(&mut rng, original)?;
            let (mean, var) = time_avg_stats(&out)?;
            Ok((mean.l1_distance(&mean0), var.l1_distance(&var0)))
        })
        .collect::<Result<_>>()?;
    let (sum_mean, sum_var) = per_trial
        .iter()
        .fold((0.0, 0.0), |(a, b), &(x, y)| (a + x, b + y));
    let (mean_pct, mean_absolute) = relative_or_absolute(sum_mean / trials as f64, mean_norm);
    let (var_pct, var_absolute) = relative_or_absolute(sum_var / trials as f64, var_norm);
    Ok(Distortion {
        mean_pct,
        var_pct,
        mean_absolute,
        var_absolute,
        trials,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    SpliceOut,
    TmZero,
    TmMean,
    Identity,
}

impl Method {
    pub const ALL: [Method; 4] = [
        Method::SpliceOut,
        Method::TmZero,
        Method::TmMean,
        Method::Identity,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Method::SpliceOut => "splice_out",
            Method::TmZero => "tm_zero",
            Method::TmMean => "tm_mean",
            Method::Identity => "identity",
        }
    }

    /// Applies the method with `n` intervals of width below `t`.
    pub fn apply(&self, rng: &mut dyn RandomSource, m: &Matrix, n: usize, t: usize) -> Result<Matrix> {
        let cfg = SpliceConfig::new(n, t);
        match self {
            Method::SpliceOut => splice_out(rng, m, &cfg),
            Method::TmZero => time_mask(rng, m, &cfg, FillPolicy::Zero),
            Method::TmMean => time_mask(rng, m, &cfg, FillPolicy::GlobalMean),
            Method::Identity => Ok(m.clone()),
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.as_str())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| {
                Error::Config(format!(
                    "unknown method `{s}` (expected splice_out, tm_zero, tm_mean or identity)"
                ))
            })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DistortionReport {
    pub method: Method,
    pub n: usize,
    pub t: usize,
    pub mean_distortion_pct: f64,
    pub var_distortion_pct: f64,
    pub n_trials: usize,
    pub mean_absolute: bool,
    pub var_absolute: bool,
}

/// Mean distortion over `corpus` for every (method, N) pair, in method-major order.
///
/// Item `i`, trial `j` uses seed `derive_seed(derive_seed(seed, i), j)` for
/// every method and N.
pub fn distortion_sweep(
    corpus: &[Matrix],
    methods: &[Method],
    ns: &[usize],
    t: usize,
    trials: usize,
    seed: u64,
) -> Result<Vec<DistortionReport>> {
    if corpus.is_empty() {
        return Err(Error::Config("distortion sweep needs a non-empty corpus".into()));
    }
    if t == 0 {
        return Err(Error::Config("max width T must be at least 1".into()));
    }
    let mut reports = Vec::with_capacity(methods.len() * ns.len());
    for &method in methods {
        for &n in ns {
            let per_item: Vec<Distortion> = corpus
                .par_iter()
                .enumerate()
                .map(|(i, m)| {
                    distortion(
                        m,
                        |rng, x| method.apply(rng, x, n, t),
                        trials,
                        derive_seed(seed, i as u64),
                    )
                })
                .collect::<Result<_>>()?;
            let k = per_item.len() as f64;
            reports.push(DistortionReport {
                method,
                n,
                t,
                mean_distortion_pct: per_item.iter().map(|d| d.mean_pct).sum::<f64>() / k,
                var_distortion_pct: per_item.iter().map(|d| d.var_pct).sum::<f64>() / k,
                n_trials: trials,
                mean_absolute: per_item.iter().any(|d| d.mean_absolute),
                var_absolute: per_item.iter().any(|d| d.var_absolute),
            });
        }
    }
    Ok(reports)
}

/// CSV with columns `method,N,T,mean_distortion_pct,var_distortion_pct,trials`.
pub fn write_distortion_csv<W: std::io::Write>(out: W, reports: &[DistortionReport]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let to_err = |e: csv::Error| Error::Data(format!("writing CSV: {e}"));
    w.write_record(["method", "N", "T", "mean_distortion_pct", "var_distortion_pct", "trials"])
        .map_err(to_err)?;
    for r in reports {
        w.write_record([
            r.method.as_str().to_string(),
            r.n.to_string(),
            r.t.to_string(),
            r.mean_distortion_pct.to_string(),
            r.var_distortion_pct.to_string(),
            r.n_trials.to_string(),
        ])
        .map_err(to_err)?;
    }
    w.flush().map_err(|e| Error::Data(format!("writing CSV: {e}")))
}

pub fn write_distortion_csv_file(path: impl AsRef<Path>, reports: &[DistortionReport]) -> Result<()> {
    let path = path.as_ref();
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    write_distortion_csv(file, reports)
}
