//! ASR scoring: word alignment, corpus WER, bootstrap confidence intervals and
//! the matched-pairs sentence-segment word error (MAPSSWE) test.

mod align;
mod bootstrap;
mod mapsswe;
mod transcript;

pub use align::{align_wer, ErrorCounts};
pub use bootstrap::{bootstrap_wer, corpus_wer, BootstrapResult};
pub use mapsswe::{mapsswe, normal_cdf, MapssweResult};
pub use transcript::{pair_transcripts, parse_transcripts, read_transcripts, Transcript, UtterancePair};
