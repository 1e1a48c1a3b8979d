//! SpliceOut next to time masking on the same spectrogram and seed.
//!
//! Both draw identical intervals; splicing drops the frames, masking fills them.

use augforge::augment::{
    sample_intervals, splice_out, time_mask, FillPolicy, SeededSource, SpliceConfig,
};
use augforge::synth::random_walk_corpus;

fn main() -> augforge::Result<()> {
    let spec = random_walk_corpus(7, 1, 300, 40).remove(0);
    let cfg = SpliceConfig::new(4, 40);
    let seed = 12;

    let intervals = sample_intervals(&mut SeededSource::new(seed), spec.n_frames(), &cfg);
    println!("intervals:");
    for iv in intervals.intervals() {
        println!("  [{:>3}, {:>3})  width {}", iv.start(), iv.end(), iv.len());
    }
    println!("union covers {} of {} frames", intervals.coverage(), spec.n_frames());

    let spliced = splice_out(&mut SeededSource::new(seed), &spec, &cfg)?;
    let zeroed = time_mask(&mut SeededSource::new(seed), &spec, &cfg, FillPolicy::Zero)?;
    let meaned = time_mask(&mut SeededSource::new(seed), &spec, &cfg, FillPolicy::GlobalMean)?;

    println!();
    println!("{:<12} {:>8} {:>14}", "method", "frames", "global mean");
    for (name, m) in [("input", &spec), ("splice_out", &spliced), ("tm_zero", &zeroed), ("tm_mean", &meaned)] {
        println!("{name:<12} {:>8} {:>14.4}", m.n_frames(), m.global_mean());
    }
    Ok(())
}
