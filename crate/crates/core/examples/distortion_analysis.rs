//! How far each method moves per-bin time-averaged mean and variance.

use augforge::analysis::{distortion_sweep, write_distortion_csv, Method};
use augforge::synth::random_walk_corpus;

fn main() -> augforge::Result<()> {
    let corpus = random_walk_corpus(1, 10, 1000, 80);
    let methods = [Method::SpliceOut, Method::TmZero, Method::TmMean];
    let rows = distortion_sweep(&corpus, &methods, &[2, 8, 32, 64], 40, 30, 0)?;

    println!("{:<11} {:>3} {:>12} {:>12}", "method", "N", "mean dist %", "var dist %");
    for r in &rows {
        println!("{:<11} {:>3} {:>12.3} {:>12.3}", r.method, r.n, r.mean_distortion_pct, r.var_distortion_pct);
    }

    println!();
    write_distortion_csv(std::io::stdout().lock(), &rows)?;
    Ok(())
}
