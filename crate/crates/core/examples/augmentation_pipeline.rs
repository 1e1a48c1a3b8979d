//! A JSON pipeline applied to a labeled spectrogram with token spans.

use augforge::augment::{apply_pipeline, Features, LabeledSample, PipelineConfig, PipelineContext, SeededSource, TokenSpan};
use augforge::synth::random_walk_corpus;

const CONFIG: &str = r#"{
  "seed": 42,
  "pipeline": [
    {"op": "mixup", "alpha": 0.4},
    {"op": "time_warp", "w": 5},
    {"op": "semantic_splice", "ratio": 0.25},
    {"op": "splice_out", "n": 3, "t": 20},
    {"op": "freq_mask", "n": 2, "t": 8, "fill": "mean"}
  ]
}"#;

fn main() -> augforge::Result<()> {
    let cfg = PipelineConfig::from_json(CONFIG)?;
    let ops: Vec<&str> = cfg.pipeline.iter().map(|op| op.name()).collect();
    println!("pipeline: {}", ops.join(" -> "));

    let mut corpus = random_walk_corpus(cfg.seed, 2, 200, 32);
    let partner = LabeledSample::new(Features::Spectrogram(corpus.pop().unwrap()), vec![0.0, 1.0])?;
    let sample = LabeledSample::new(Features::Spectrogram(corpus.pop().unwrap()), vec![1.0, 0.0])?;

    // ten 20-frame words
    let spans: Vec<TokenSpan> = (0..10)
        .map(|i| TokenSpan {
            start_frame: 20 * i,
            end_frame: 20 * i + 20,
            token_id: i as u32,
        })
        .collect();
    let ctx = PipelineContext {
        partner: Some(&partner),
        spans: Some(&spans),
    };

    for run in 0..3 {
        let mut rng = SeededSource::new(cfg.seed + run);
        let out = apply_pipeline(&mut rng, &sample, &cfg.pipeline, &ctx)?;
        let m = out.spectrogram().expect("spectrogram in, spectrogram out");
        println!(
            "seed {:>2}: {} frames, label [{:.3}, {:.3}]",
            cfg.seed + run,
            m.n_frames(),
            out.label[0],
            out.label[1]
        );
    }

    match PipelineConfig::from_json(r#"{"pipeline": [{"op": "splice_out", "n": 2, "t": 0}]}"#) {
        Ok(_) => unreachable!(),
        Err(e) => println!("rejected: {e}"),
    }
    Ok(())
}
