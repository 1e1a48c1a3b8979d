//! Random sources with a fixed draw contract.
//!
//! Every stochastic operation documents the exact sequence of `next_below` /
//! `next_unit` calls it makes, so a [`ScriptedSource`] can replay a known
//! stream and any conforming generator reproduces the same augmentations.

use std::collections::VecDeque;

use rand::{Rng, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;

pub trait RandomSource {
    /// Uniform integer in `[0, k)`. `k` must be positive.
    fn next_below(&mut self, k: u64) -> u64;

    /// Uniform float in `[0, 1)`.
    fn next_unit(&mut self) -> f64;
}

impl<R: RandomSource + ?Sized> RandomSource for &mut R {
    fn next_below(&mut self, k: u64) -> u64 {
        (**self).next_below(k)
    }

    fn next_unit(&mut self) -> f64 {
        (**self).next_unit()
    }
}

/// xoshiro256++ seeded through SplitMix64 (`Xoshiro256PlusPlus::seed_from_u64`).
///
/// `next_below` is rand's unbiased `gen_range(0..k)`; `next_unit` takes the
/// top 53 bits of one output word.
#[derive(Debug, Clone)]
pub struct SeededSource {
    inner: Xoshiro256PlusPlus,
}

impl SeededSource {
    pub fn new(seed: u64) -> Self {
        Self {
            inner: Xoshiro256PlusPlus::seed_from_u64(seed),
        }
    }
}

impl RandomSource for SeededSource {
    fn next_below(&mut self, k: u64) -> u64 {
        assert!(k > 0, "next_below(0)");
        self.inner.gen_range(0..k)
    }

    fn next_unit(&mut self) -> f64 {
        (self.inner.gen::<u64>() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }
}

/// SplitMix64 finalizer (Stafford variant 13).
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Per-item seed: `base ^ mix64(index + 0x9e3779b97f4a7c15)`.
///
/// Used for files, trials and corpus items so serial and parallel runs agree.
pub fn derive_seed(base: u64, index: u64) -> u64 {
    base ^ mix64(index.wrapping_add(0x9e37_79b9_7f4a_7c15))
}

/// Replays a fixed stream of draws; panics when exhausted or when a scripted
/// integer falls outside the requested range.
#[derive(Debug, Clone, Default)]
pub struct ScriptedSource {
    ints: VecDeque<u64>,
    units: VecDeque<f64>,
}

impl ScriptedSource {
    pub fn new(ints: impl IntoIterator<Item = u64>) -> Self {
        Self {
            ints: ints.into_iter().collect(),
            units: VecDeque::new(),
        }
    }

    pub fn with_units(mut self, units: impl IntoIterator<Item = f64>) -> Self {
        self.units = units.into_iter().collect();
        self
    }

    pub fn remaining(&self) -> usize {
        self.ints.len() + self.units.len()
    }
}

impl RandomSource for ScriptedSource {
    fn next_below(&mut self, k: u64) -> u64 {
        let v = self.ints.pop_front().expect("scripted stream exhausted");
        assert!(v < k, "scripted value {v} not below {k}");
        v
    }

    fn next_unit(&mut self) -> f64 {
        let v = self.units.pop_front().expect("scripted unit stream exhausted");
        assert!((0.0..1.0).contains(&v), "scripted unit {v} outside [0, 1)");
        v
    }
}
