//! Proxy step time and padded memory against the number of masks.
//!
//! Pass `--full` for the default 32 x 4 batches at 1000 frames.

use augforge::analysis::Method;
use augforge::bench::{run_benchmark, BenchConfig};
use augforge::synth::random_walk_corpus;

fn main() -> augforge::Result<()> {
    let full = std::env::args().any(|a| a == "--full");
    let (tau, batch, batches) = if full { (1000, 32, 4) } else { (400, 16, 2) };
    let corpus = random_walk_corpus(3, batch * batches, tau, 80);
    let cfg = BenchConfig {
        ns: vec![0, 4, 16, 64],
        batch_size: batch,
        ..BenchConfig::default()
    };
    let report = run_benchmark(&corpus, &[Method::SpliceOut, Method::TmZero], &cfg)?;

    println!("{:<11} {:>3} {:>10} {:>13} {:>9}", "method", "N", "step ms", "padded MiB", "waste");
    for r in &report.rows {
        println!(
            "{:<11} {:>3} {:>10.2} {:>13.2} {:>9}",
            r.method,
            r.n,
            r.time_ms_median,
            r.padded_bytes as f64 / (1 << 20) as f64,
            r.padding_waste
        );
    }
    let so = report.row(Method::SpliceOut, 64).unwrap();
    let tm = report.row(Method::TmZero, 64).unwrap();
    println!(
        "\nN=64: splice_out takes {:.2}x the time and {:.2}x the memory of masking",
        so.time_ms_median / tm.time_ms_median,
        so.padded_bytes as f64 / tm.padded_bytes as f64
    );
    Ok(())
}
