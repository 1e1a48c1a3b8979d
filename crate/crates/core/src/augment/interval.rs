use crate::augment::rng::RandomSource;
use crate::error::{Error, Result};

/// Half-open index range `[start, end)` along one axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Interval {
    start: usize,
    end: usize,
}

impl Interval {
    pub fn new(start: usize, end: usize) -> Self {
        assert!(start <= end, "interval start {start} exceeds end {end}");
        Self { start, end }
    }

    pub fn with_len(start: usize, len: usize) -> Self {
        Self::new(start, start + len)
    }

    pub fn start(&self) -> usize {
        self.start
    }

    pub fn end(&self) -> usize {
        self.end
    }

    pub fn len(&self) -> usize {
        self.end - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.start == self.end
    }

    pub fn contains(&self, i: usize) -> bool {
        self.start <= i && i < self.end
    }
}

/// Ordered list of possibly overlapping intervals; removal and masking act on their union.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct IntervalSet {
    intervals: Vec<Interval>,
}

impl IntervalSet {
    pub fn new(intervals: Vec<Interval>) -> Self {
        Self { intervals }
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn from_pairs(pairs: &[(usize, usize)]) -> Self {
        Self::new(pairs.iter().map(|&(s, e)| Interval::new(s, e)).collect())
    }

    pub fn intervals(&self) -> &[Interval] {
        &self.intervals
    }

    pub fn len(&self) -> usize {
        self.intervals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    pub fn push(&mut self, iv: Interval) {
        self.intervals.push(iv);
    }

    pub fn max_end(&self) -> usize {
        self.intervals.iter().map(Interval::end).max().unwrap_or(0)
    }

    /// Sorted, disjoint, non-empty intervals covering the same indices.
    pub fn merged(&self) -> Vec<Interval> {
        let mut sorted: Vec<Interval> = self
            .intervals
            .iter()
            .copied()
            .filter(|iv| !iv.is_empty())
            .collect();
        sorted.sort_unstable_by_key(|iv| (iv.start, iv.end));
        let mut out: Vec<Interval> = Vec::with_capacity(sorted.len());
        for iv in sorted {
            match out.last_mut() {
                Some(last) if iv.start <= last.end => last.end = last.end.max(iv.end),
                _ => out.push(iv),
            }
        }
        out
    }

    /// Number of distinct indices covered by the union.
    pub fn coverage(&self) -> usize {
        self.merged().iter().map(Interval::len).sum()
    }

    pub fn check_bounds(&self, extent: usize) -> Result<()> {
        match self.intervals.iter().find(|iv| iv.end > extent) {
            Some(iv) => Err(Error::Bounds {
                start: iv.start,
                end: iv.end,
                extent,
            }),
            None => Ok(()),
        }
    }

    /// Drops intervals from the end of the list until removing the union from an
    /// axis of `extent` would leave at least `min_retained` indices.
    pub fn retaining(&self, extent: usize, min_retained: usize) -> IntervalSet {
        let mut kept = self.intervals.clone();
        loop {
            let cov = IntervalSet::new(kept.clone()).coverage();
            if kept.is_empty() || extent.saturating_sub(cov) >= min_retained {
                return IntervalSet::new(kept);
            }
            kept.pop();
        }
    }
}

/// Interval sampling parameters: `n_intervals` draws of width below `max_width`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SpliceConfig {
    pub n_intervals: usize,
    pub max_width: usize,
    /// Splicing never leaves fewer frames than this.
    pub min_retained: usize,
}

impl SpliceConfig {
    pub fn new(n_intervals: usize, max_width: usize) -> Self {
        Self {
            n_intervals,
            max_width,
            min_retained: 1,
        }
    }

    pub fn with_min_retained(mut self, min_retained: usize) -> Self {
        self.min_retained = min_retained;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.max_width == 0 {
            return Err(Error::Config("max width T must be at least 1".into()));
        }
        Ok(())
    }
}

/// Draws `n_intervals` intervals over an axis of `extent` indices.
///
/// With `T' = min(max_width, extent)`, each interval consumes two draws in order:
/// `length = next_below(T')`, then `start = next_below(extent - length)`.
/// An empty axis yields an empty set without drawing.
pub fn sample_intervals<R: RandomSource + ?Sized>(
    rng: &mut R,
    extent: usize,
    cfg: &SpliceConfig,
) -> IntervalSet {
    assert!(cfg.max_width >= 1, "max width must be at least 1");
    if extent == 0 {
        return IntervalSet::empty();
    }
    let width = cfg.max_width.min(extent) as u64;
    let mut set = IntervalSet::new(Vec::with_capacity(cfg.n_intervals));
    for _ in 0..cfg.n_intervals {
        let len = rng.next_below(width) as usize;
        let room = (extent - len) as u64;
        let start = if room == 0 { 0 } else { rng.next_below(room) as usize };
        set.push(Interval::with_len(start, len));
    }
    set
}
