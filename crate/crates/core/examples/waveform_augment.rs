//! Time-domain SpliceOut, random fades and speed perturbation.

use augforge::augment::{fade, speed_perturb, splice_out_wave, SeededSource, SpliceConfig};
use augforge::synth::voiced_waveform;

fn rms(x: &[f32]) -> f64 {
    (x.iter().map(|&v| (v as f64).powi(2)).sum::<f64>() / x.len().max(1) as f64).sqrt()
}

fn main() -> augforge::Result<()> {
    let sr = 16_000;
    let wave = voiced_waveform(5, sr as usize, sr, 110.0);
    println!("input: {} samples, rms {:.4}", wave.len(), rms(wave.samples()));

    // up to 50 ms per cut
    let cfg = SpliceConfig::new(6, 800);
    let cut = splice_out_wave(&mut SeededSource::new(1), &wave, &cfg)?;
    println!("splice_out_wave: {} samples ({:.1} ms removed)", cut.len(), 1e3 * (wave.len() - cut.len()) as f64 / sr as f64);

    let faded = fade(&mut SeededSource::new(2), &wave, 0.25)?;
    let head = &faded.samples()[..1600];
    println!("fade: rms of first 100 ms {:.4} vs {:.4} before", rms(head), rms(&wave.samples()[..1600]));

    for factor in [0.9, 1.0, 1.1] {
        let w = speed_perturb(&wave, factor)?;
        println!("speed x{factor}: {} samples", w.len());
    }
    Ok(())
}
