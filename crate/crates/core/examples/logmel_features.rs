//! WAV to log-mel spectrogram, stored as SPGM and read back.

use augforge::features::{extract_logmel, FeatureConfig};
use augforge::signal_io::{read_spgm, read_wav, write_spgm, write_wav};
use augforge::synth::voiced_waveform;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = std::env::temp_dir().join("augforge-logmel");
    std::fs::create_dir_all(&dir)?;

    let wav_path = dir.join("voiced.wav");
    write_wav(&wav_path, &voiced_waveform(3, 32_000, 16_000, 120.0))?;
    let wave = read_wav(&wav_path)?;
    println!("{}: {} samples at {} Hz ({:.2} s)", wav_path.display(), wave.len(), wave.sample_rate(), wave.duration_secs());

    let cfg = FeatureConfig {
        n_mels: 64,
        ..FeatureConfig::default()
    };
    let (frame, hop) = cfg.frame_and_hop(wave.sample_rate());
    let feats = extract_logmel(&wave, &cfg)?;
    println!("frame {frame} / hop {hop} samples -> {} frames x {} mels", feats.n_frames(), feats.n_bins());

    // loudest band per 25th frame
    for t in (0..feats.n_frames()).step_by(25) {
        let row = feats.row(t);
        let (band, level) = row
            .iter()
            .enumerate()
            .fold((0, f32::MIN), |best, (b, &v)| if v > best.1 { (b, v) } else { best });
        println!("  frame {t:>3}: peak band {band:>2} at {level:.2}");
    }

    let spgm_path = dir.join("voiced.spgm");
    write_spgm(&spgm_path, &feats)?;
    let back = read_spgm(&spgm_path)?;
    assert_eq!(back, feats);
    println!("round trip through {} is exact", spgm_path.display());
    Ok(())
}
