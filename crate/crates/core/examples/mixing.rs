//! Mixup and CutMix on labeled spectrograms.

use augforge::augment::{cutmix, mixup, sample_beta, Features, Interval, LabeledSample, Rect, SeededSource};
use augforge::synth::random_walk_corpus;

fn main() -> augforge::Result<()> {
    let mut specs = random_walk_corpus(9, 2, 100, 40).into_iter();
    let a = LabeledSample::new(Features::Spectrogram(specs.next().unwrap()), vec![1.0, 0.0, 0.0])?;
    let b = LabeledSample::new(Features::Spectrogram(specs.next().unwrap()), vec![0.0, 0.0, 1.0])?;

    let mut rng = SeededSource::new(4);
    for alpha in [0.2, 1.0] {
        let lambdas: Vec<f64> = (0..5).map(|_| sample_beta(&mut rng, alpha)).collect();
        println!("alpha {alpha}: lambda draws {lambdas:.3?}");
        let mixed = mixup(&a, &b, lambdas[0])?;
        println!("  mixup label {:.3?}", mixed.label);
    }

    let rect = Rect {
        time: Interval::new(20, 60),
        freq: Interval::new(10, 30),
    };
    let (pasted, lambda) = cutmix(&a, &b, rect)?;
    let m = pasted.spectrogram().unwrap();
    println!(
        "cutmix {}x{} patch: lambda {lambda:.3}, label {:.3?}, cell (30, 15) = {:.3} from b",
        rect.time.len(),
        rect.freq.len(),
        pasted.label,
        m.get(30, 15)
    );
    Ok(())
}
