//! Scoring two systems: alignment, bootstrap interval and matched-pairs test.

use augforge::augment::SeededSource;
use augforge::evalstats::{align_wer, bootstrap_wer, mapsswe, pair_transcripts, parse_transcripts, ErrorCounts};

const REF: &str = "\
s1 the cat sat on the mat
s2 a quick brown fox jumps
s3 speech recognition is hard
s4 turn the lights off please
s5 what time is it now
";
const SYS_A: &str = "\
s1 the cat sat on a mat
s2 a quick brown fox jumps
s3 speech recognition is hard
s4 turn lights off please
s5 what time is it now
";
const SYS_B: &str = "\
s1 the bat sat on a hat
s2 quick brown box jumps
s3 speech wreck ignition is hard
s4 turn the light off
s5 what time is it
";

fn score(reference: &str, hyp: &str) -> augforge::Result<Vec<ErrorCounts>> {
    let (r, h) = (parse_transcripts(reference)?, parse_transcripts(hyp)?);
    Ok(pair_transcripts(&r, &h)?
        .into_iter()
        .map(|(_, rw, hw)| align_wer(rw, hw))
        .collect())
}

fn main() -> augforge::Result<()> {
    let a = score(REF, SYS_A)?;
    let b = score(REF, SYS_B)?;
    for (name, counts) in [("A", &a), ("B", &b)] {
        let total: ErrorCounts = counts.iter().copied().sum();
        let boot = bootstrap_wer(counts, 1000, &mut SeededSource::new(0))?;
        println!(
            "system {name}: S={} I={} D={}  WER {:.3}  SE {:.3}  95% CI [{:.3}, {:.3}]",
            total.substitutions, total.insertions, total.deletions, boot.wer, boot.std_error, boot.ci95.0, boot.ci95.1
        );
    }
    let test = mapsswe(&a, &b)?;
    println!("matched pairs: z = {:.3}, p = {:.4} over {} segments", test.z, test.p, test.n);
    Ok(())
}
