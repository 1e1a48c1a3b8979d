//! Padded-batch memory and proxy step time as a function of mask count.
//!
//! A real training step is replaced by a length-aware floating-point workload:
//! `linear * len` frame visits plus `quadratic * len^2` pairwise frame dot
//! products per sample. Shorter spliced sequences therefore cost less, and
//! the padded batch footprint shrinks with the longest sequence in the batch.

use std::hint::black_box;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::Serialize;

use crate::analysis::Method;
use crate::augment::rng::{derive_seed, RandomSource, SeededSource};
use crate::error::{Error, Result};
use crate::signal_io::Matrix;

/// Zero-padded `batch x max_len x n_bins` tensor with the true lengths.
#[derive(Debug, Clone, PartialEq)]
pub struct Batch {
    data: Vec<f32>,
    lengths: Vec<usize>,
    max_len: usize,
    n_bins: usize,
}

impl Batch {
    pub fn lengths(&self) -> &[usize] {
        &self.lengths
    }

    pub fn max_len(&self) -> usize {
        self.max_len
    }

    pub fn n_bins(&self) -> usize {
        self.n_bins
    }

    pub fn batch_size(&self) -> usize {
        self.lengths.len()
    }

    pub fn data(&self) -> &[f32] {
        &self.data
    }

    /// Frames of sample `i`, padding excluded.
    pub fn sample(&self, i: usize) -> &[f32] {
        let stride = self.max_len * self.n_bins;
        &self.data[i * stride..i * stride + self.lengths[i] * self.n_bins]
    }

    pub fn padded_bytes(&self) -> u64 {
        (self.batch_size() * self.max_len * self.n_bins * std::mem::size_of::<f32>()) as u64
    }

    /// `batch * max_len - sum(lengths)`, in frames.
    pub fn padding_waste(&self) -> u64 {
        (self.batch_size() * self.max_len - self.lengths.iter().sum::<usize>()) as u64
    }
}

/// Pads every sample with zero frames up to the longest one.
pub fn build_padded_batch(samples: &[Matrix]) -> Result<Batch> {
    let first = samples
        .first()
        .ok_or_else(|| Error::Data("cannot build an empty batch".into()))?;
    let n_bins = first.n_bins();
    if let Some(bad) = samples.iter().find(|m| m.n_bins() != n_bins) {
        return Err(Error::Shape(format!(
            "batch mixes {n_bins} and {} bins",
            bad.n_bins()
        )));
    }
    let max_len = samples.iter().map(Matrix::n_frames).max().unwrap_or(0);
    let mut data = vec![0.0f32; samples.len() * max_len * n_bins];
    for (i, m) in samples.iter().enumerate() {
        let off = i * max_len * n_bins;
        data[off..off + m.data().len()].copy_from_slice(m.data());
    }
    Ok(Batch {
        data,
        lengths: samples.iter().map(Matrix::n_frames).collect(),
        max_len,
        n_bins,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CostModel {
    /// Frame visits per frame.
    pub linear: f64,
    /// Pairwise frame dot products per frame squared.
    pub quadratic: f64,
}

impl CostModel {
    pub fn new(linear: f64, quadratic: f64) -> Result<Self> {
        let cm = Self { linear, quadratic };
        cm.validate()?;
        Ok(cm)
    }

    /// Attention-like cost where the quadratic term dominates at a few hundred frames.
    pub fn quadratic_dominant() -> Self {
        Self {
            linear: 1.0,
            quadratic: 0.05,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = |v: f64| v >= 0.0 && v.is_finite();
        if !ok(self.linear) || !ok(self.quadratic) || (self.linear == 0.0 && self.quadratic == 0.0) {
            return Err(Error::Config(format!(
                "cost coefficients must be non-negative and not both zero, got {} / {}",
                self.linear, self.quadratic
            )));
        }
        Ok(())
    }
}

fn dot(a: &[f32], b: &[f32]) -> f32 {
    a.iter().zip(b).fold(0.0, |acc, (&x, &y)| acc + x * y)
}

/// Work for one sample of `len` frames; returns a checksum.
fn sample_workload(frames: &[f32], len: usize, n_bins: usize, cm: &CostModel, weights: &[f32]) -> f64 {
    if len == 0 || n_bins == 0 {
        return 0.0;
    }
    let row = |i: usize| &frames[i * n_bins..(i + 1) * n_bins];
    let mut acc = 0.0f64;
    let visits = (cm.linear * len as f64).round() as usize;
    for v in 0..visits {
        acc += dot(row(v % len), weights) as f64;
    }
    let pairs = (cm.quadratic * (len * len) as f64).round() as usize;
    for k in 0..pairs {
        acc += dot(row(k % len), row((k / len) % len)) as f64;
    }
    acc
}

/// Runs the proxy workload over every sample of `batch` on true lengths.
pub fn proxy_step(batch: &Batch, cm: &CostModel) -> (Duration, f64) {
    let weights: Vec<f32> = (0..batch.n_bins).map(|b| 1.0 / (b + 1) as f32).collect();
    let start = Instant::now();
    let mut checksum = 0.0;
    for i in 0..batch.batch_size() {
        checksum += sample_workload(
            black_box(batch.sample(i)),
            batch.lengths[i],
            batch.n_bins,
            cm,
            &weights,
        );
    }
    let elapsed = start.elapsed();
    (elapsed, black_box(checksum))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchConfig {
    #[serde(rename = "n_masks")]
    pub ns: Vec<usize>,
    #[serde(rename = "T")]
    pub t: usize,
    pub batch_size: usize,
    pub reps: usize,
    pub cost: CostModel,
    pub seed: u64,
}

impl Default for BenchConfig {
    fn default() -> Self {
        Self {
            ns: vec![2, 4, 8, 16, 32, 64],
            t: 40,
            batch_size: 32,
            reps: 7,
            cost: CostModel::quadratic_dominant(),
            seed: 0,
        }
    }
}

impl BenchConfig {
    pub fn validate(&self) -> Result<()> {
        if self.reps < 5 {
            return Err(Error::Config(format!("need at least 5 repetitions, got {}", self.reps)));
        }
        if self.t == 0 {
            return Err(Error::Config("max width T must be at least 1".into()));
        }
        if self.batch_size == 0 {
            return Err(Error::Config("batch size must be at least 1".into()));
        }
        self.cost.validate()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchRow {
    pub method: Method,
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(rename = "T")]
    pub t: usize,
    /// Median step time over all repetitions and batches.
    pub time_ms_median: f64,
    pub padded_bytes: u64,
    pub sum_len: u64,
    pub sum_len_sq: u64,
    pub padding_waste: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchReport {
    pub config: BenchConfig,
    pub rows: Vec<BenchRow>,
}

impl BenchReport {
    pub fn row(&self, method: Method, n: usize) -> Option<&BenchRow> {
        self.rows.iter().find(|r| r.method == method && r.n == n)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

fn median(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    }
}

fn shuffle(rng: &mut SeededSource, items: &mut [usize]) {
    for i in (1..items.len()).rev() {
        let j = rng.next_below(i as u64 + 1) as usize;
        items.swap(i, j);
    }
}

/// Augments every item (item `i` uses seed `derive_seed(seed, i)` for every method and N).
pub fn augment_corpus(corpus: &[Matrix], method: Method, n: usize, t: usize, seed: u64) -> Result<Vec<Matrix>> {
    corpus
        .par_iter()
        .enumerate()
        .map(|(i, m)| {
            let mut rng = SeededSource::new(derive_seed(seed, i as u64));
            method.apply(&mut rng, m, n, t)
        })
        .collect()
}

/// Sweeps methods by N. Augmentation and batching finish before timing.
/// Every batch step is timed once per repetition, interleaved across
/// configurations in a freshly shuffled order, so drift and bursts in
/// machine load hit all of them alike. Timed
/// sections run pinned to the calling thread's CPU.
pub fn run_benchmark(corpus: &[Matrix], methods: &[Method], cfg: &BenchConfig) -> Result<BenchReport> {
    cfg.validate()?;
    if corpus.is_empty() {
        return Err(Error::Config("benchmark corpus is empty".into()));
    }
    let mut prepared = Vec::with_capacity(methods.len() * cfg.ns.len());
    for &method in methods {
        for &n in &cfg.ns {
            let augmented = augment_corpus(corpus, method, n, cfg.t, cfg.seed)?;
            let batches = augmented
                .chunks(cfg.batch_size)
                .map(build_padded_batch)
                .collect::<Result<Vec<_>>>()?;
            let row = BenchRow {
                method,
                n,
                t: cfg.t,
                time_ms_median: 0.0,
                padded_bytes: batches.iter().map(Batch::padded_bytes).sum(),
                sum_len: augmented.iter().map(|m| m.n_frames() as u64).sum(),
                sum_len_sq: augmented.iter().map(|m| (m.n_frames() as u64).pow(2)).sum(),
                padding_waste: batches.iter().map(Batch::padding_waste).sum(),
            };
            prepared.push((row, batches));
        }
    }

    let n_batches = prepared[0].1.len();
    let mut times = vec![Vec::with_capacity(cfg.reps * n_batches); prepared.len()];
    {
        let _pin = pin::PinGuard::current_cpu();
        for (_, batches) in &prepared {
            for b in batches {
                proxy_step(b, &cfg.cost);
            }
        }
        let mut order: Vec<usize> = (0..prepared.len()).collect();
        let mut rng = SeededSource::new(derive_seed(cfg.seed, u64::MAX));
        for _ in 0..cfg.reps {
            for i in 0..n_batches {
                shuffle(&mut rng, &mut order);
                for &c in &order {
                    let elapsed = proxy_step(&prepared[c].1[i], &cfg.cost).0;
                    times[c].push(elapsed.as_secs_f64() * 1e3);
                }
            }
        }
    }

    let rows = prepared
        .into_iter()
        .zip(&mut times)
        .map(|((mut row, _), t)| {
            row.time_ms_median = median(t);
            row
        })
        .collect();
    Ok(BenchReport {
        config: cfg.clone(),
        rows,
    })
}

mod pin {
    /// Pins the current thread to the CPU it is running on and restores the
    /// previous affinity mask on drop. A no-op where unsupported.
    pub struct PinGuard {
        #[cfg(target_os = "linux")]
        previous: Option<libc::cpu_set_t>,
    }

    impl PinGuard {
        #[cfg(target_os = "linux")]
        pub fn current_cpu() -> Self {
            // SAFETY: cpu_set_t is plain data; the calls only read/write the local sets.
            unsafe {
                let mut previous: libc::cpu_set_t = std::mem::zeroed();
                let size = std::mem::size_of::<libc::cpu_set_t>();
                if libc::sched_getaffinity(0, size, &mut previous) != 0 {
                    return Self { previous: None };
                }
                let cpu = libc::sched_getcpu();
                if cpu < 0 {
                    return Self { previous: None };
                }
                let mut one: libc::cpu_set_t = std::mem::zeroed();
                libc::CPU_SET(cpu as usize, &mut one);
                if libc::sched_setaffinity(0, size, &one) != 0 {
                    return Self { previous: None };
                }
                Self {
                    previous: Some(previous),
                }
            }
        }

        #[cfg(not(target_os = "linux"))]
        pub fn current_cpu() -> Self {
            Self {}
        }
    }

    impl Drop for PinGuard {
        fn drop(&mut self) {
            #[cfg(target_os = "linux")]
            if let Some(prev) = self.previous.take() {
                // SAFETY: restores a mask previously returned by sched_getaffinity.
                unsafe {
                    libc::sched_setaffinity(0, std::mem::size_of::<libc::cpu_set_t>(), &prev);
                }
            }
        }
    }
}
