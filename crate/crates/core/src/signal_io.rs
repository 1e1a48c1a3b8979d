//! Waveform and spectrogram containers plus the on-disk formats shared by every tool.
//!
//! Spectrograms are stored time-major: one row per frame, `n_bins` columns.
//! The SPGM container is a 16-byte little-endian header followed by the raw
//! `f32` payload:
//!
//! ```text
//! 0..4   b"SPGM"
//! 4..8   version (u32 LE) = 1
//! 8..12  n_frames (u32 LE)
//! 12..16 n_bins (u32 LE)
//! 16..   n_frames * n_bins f32 LE, row-major
//! ```

use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::error::{Error, Result};

pub const SPGM_MAGIC: &[u8; 4] = b"SPGM";
pub const SPGM_VERSION: u32 = 1;
const SPGM_HEADER_LEN: usize = 16;

/// Time-major 2-D matrix of `f32` (row = frame, column = frequency bin).
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    n_frames: usize,
    n_bins: usize,
    data: Vec<f32>,
}

impl Matrix {
    /// Builds a matrix from a row-major buffer, rejecting size mismatches and non-finite values.
    pub fn new(n_frames: usize, n_bins: usize, data: Vec<f32>) -> Result<Self> {
        let expected = n_frames
            .checked_mul(n_bins)
            .ok_or_else(|| Error::Shape(format!("{n_frames} x {n_bins} overflows")))?;
        if data.len() != expected {
            return Err(Error::Shape(format!(
                "buffer of {} values does not match {n_frames} x {n_bins}",
                data.len()
            )));
        }
        if let Some(pos) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::Data(format!("non-finite value at index {pos}")));
        }
        Ok(Self {
            n_frames,
            n_bins,
            data,
        })
    }

    pub fn zeros(n_frames: usize, n_bins: usize) -> Self {
        Self::filled(n_frames, n_bins, 0.0)
    }

    pub fn filled(n_frames: usize, n_bins: usize, value: f32) -> Self {
        assert!(value.is_finite(), "fill value must be finite");
        Self {
            n_frames,
            n_bins,
            data: vec![value; n_frames * n_bins],
        }
    }

    /// Builds a matrix cell by cell. Panics if `f` yields a non-finite value.
    pub fn from_fn(n_frames: usize, n_bins: usize, mut f: impl FnMut(usize, usize) -> f32) -> Self {
        let mut data = Vec::with_capacity(n_frames * n_bins);
        for t in 0..n_frames {
            for b in 0..n_bins {
                let v = f(t, b);
                assert!(v.is_finite(), "non-finite value at ({t}, {b})");
                data.push(v);
            }
        }
        Self {
            n_frames,
            n_bins,
            data,
        }
    }

    pub fn from_rows<R: AsRef<[f32]>>(rows: &[R]) -> Result<Self> {
        let n_bins = rows.first().map_or(0, |r| r.as_ref().len());
        let mut data = Vec::with_capacity(rows.len() * n_bins);
        for (i, r) in rows.iter().enumerate() {
            let r = r.as_ref();
            if r.len() != n_bins {
                return Err(Error::Shape(format!(
                    "row {i} has {} values, expected {n_bins}",
                    r.len()
                )));
            }
            data.extend_from_slice(r);
        }
        Self::new(rows.len(), n_bins, data)
    }

    /// Internal constructor for buffers already known to be consistent.
    pub(crate) fn from_parts_unchecked(n_frames: usize, n_bins: usize, data: Vec<f32>) -> Self {
        debug_assert_eq!(data.len(), n_frames * n_bins);
        Self {
            n_frames,
            n_bins,
            data,
        }
    }

    pub fn n_frames(&self) -> usize {
        self.n_frames
    }

    pub fn n_bins(&self) -> usize {
        self.n_bins
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.n_frames, self.n_bins)
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn data(&self) -> &[f32] {
        &self.data
    }

    pub fn into_data(self) -> Vec<f32> {
        self.data
    }

    pub fn row(&self, t: usize) -> &[f32] {
        &self.data[t * self.n_bins..(t + 1) * self.n_bins]
    }

    pub fn row_mut(&mut self, t: usize) -> &mut [f32] {
        &mut self.data[t * self.n_bins..(t + 1) * self.n_bins]
    }

    pub fn rows(&self) -> impl ExactSizeIterator<Item = &[f32]> + '_ {
        (0..self.n_frames).map(move |t| self.row(t))
    }

    pub fn get(&self, t: usize, b: usize) -> f32 {
        self.data[t * self.n_bins + b]
    }

    pub(crate) fn data_mut(&mut self) -> &mut [f32] {
        &mut self.data
    }

    /// Arithmetic mean over every cell, accumulated in `f64`. Zero for an empty matrix.
    pub fn global_mean(&self) -> f64 {
        if self.data.is_empty() {
            return 0.0;
        }
        self.data.iter().map(|&v| v as f64).sum::<f64>() / self.data.len() as f64
    }
}

/// Mono audio signal with samples nominally in `[-1, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Waveform {
    samples: Vec<f32>,
    sample_rate: u32,
}

impl Waveform {
    pub fn new(samples: Vec<f32>, sample_rate: u32) -> Result<Self> {
        if sample_rate == 0 {
            return Err(Error::Data("sample rate must be positive".into()));
        }
        if let Some(pos) = samples.iter().position(|v| !v.is_finite()) {
            return Err(Error::Data(format!("non-finite sample at index {pos}")));
        }
        Ok(Self {
            samples,
            sample_rate,
        })
    }

    pub(crate) fn from_parts_unchecked(samples: Vec<f32>, sample_rate: u32) -> Self {
        Self {
            samples,
            sample_rate,
        }
    }

    pub fn samples(&self) -> &[f32] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<f32> {
        self.samples
    }

    pub fn sample_rate(&self) -> u32 {
        self.sample_rate
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn duration_secs(&self) -> f64 {
        self.samples.len() as f64 / self.sample_rate as f64
    }
}

fn map_hound(path: &Path, err: hound::Error) -> Error {
    match err {
        // hound reports short reads as `Other` with its own message
        hound::Error::IoError(e)
            if matches!(
                e.kind(),
                std::io::ErrorKind::UnexpectedEof | std::io::ErrorKind::Other
            ) =>
        {
            Error::Format(format!("{}: truncated file", path.display()))
        }
        hound::Error::IoError(e) => Error::io(path, e),
        hound::Error::FormatError(msg) => Error::Format(format!("{}: {msg}", path.display())),
        hound::Error::Unsupported => {
            Error::Unsupported(format!("{}: unsupported WAV encoding", path.display()))
        }
        other => Error::Format(format!("{}: {other}", path.display())),
    }
}

/// Reads a RIFF/WAVE file (PCM16 or IEEE float32), averaging channels to mono.
pub fn read_wav(path: impl AsRef<Path>) -> Result<Waveform> {
    let path = path.as_ref();
    let reader = hound::WavReader::open(path).map_err(|e| map_hound(path, e))?;
    let spec = reader.spec();
    let channels = spec.channels as usize;
    if channels == 0 {
        return Err(Error::Format(format!("{}: zero channels", path.display())));
    }
    let interleaved: Vec<f32> = match (spec.sample_format, spec.bits_per_sample) {
        (hound::SampleFormat::Int, 16) => reader
            .into_samples::<i16>()
            .map(|s| s.map(|v| v as f32 / 32768.0))
            .collect::<Result<_, _>>()
            .map_err(|e| map_hound(path, e))?,
        (hound::SampleFormat::Float, 32) => reader
            .into_samples::<f32>()
            .collect::<Result<_, _>>()
            .map_err(|e| map_hound(path, e))?,
        (fmt, bits) => {
            return Err(Error::Unsupported(format!(
                "{}: {bits}-bit {fmt:?} samples",
                path.display()
            )))
        }
    };
    let samples = if channels == 1 {
        interleaved
    } else {
        interleaved
            .chunks_exact(channels)
            .map(|frame| frame.iter().map(|&v| v as f64).sum::<f64>() as f32 / channels as f32)
            .collect()
    };
    Waveform::new(samples, spec.sample_rate)
        .map_err(|e| Error::Format(format!("{}: {e}", path.display())))
}

/// Writes a mono PCM16 WAV. Samples are scaled by 32768 and clipped to the i16 range.
pub fn write_wav(path: impl AsRef<Path>, wave: &Waveform) -> Result<()> {
    let path = path.as_ref();
    let spec = hound::WavSpec {
        channels: 1,
        sample_rate: wave.sample_rate,
        bits_per_sample: 16,
        sample_format: hound::SampleFormat::Int,
    };
    let mut writer = hound::WavWriter::create(path, spec).map_err(|e| map_hound(path, e))?;
    for &s in &wave.samples {
        let q = (s as f64 * 32768.0).round().clamp(-32768.0, 32767.0) as i16;
        writer.write_sample(q).map_err(|e| map_hound(path, e))?;
    }
    writer.finalize().map_err(|e| map_hound(path, e))
}

/// Encodes a matrix into SPGM bytes.
pub fn encode_spgm(m: &Matrix) -> Vec<u8> {
    let mut out = Vec::with_capacity(SPGM_HEADER_LEN + 4 * m.data.len());
    out.extend_from_slice(SPGM_MAGIC);
    out.extend_from_slice(&SPGM_VERSION.to_le_bytes());
    out.extend_from_slice(&(m.n_frames as u32).to_le_bytes());
    out.extend_from_slice(&(m.n_bins as u32).to_le_bytes());
    for v in &m.data {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out
}

pub fn decode_spgm(bytes: &[u8]) -> Result<Matrix> {
    if bytes.len() < SPGM_HEADER_LEN {
        return Err(Error::Format(format!(
            "SPGM header needs {SPGM_HEADER_LEN} bytes, got {}",
            bytes.len()
        )));
    }
    if &bytes[0..4] != SPGM_MAGIC {
        return Err(Error::Format("bad SPGM magic".into()));
    }
    let word = |i: usize| u32::from_le_bytes(bytes[i..i + 4].try_into().unwrap());
    let version = word(4);
    if version != SPGM_VERSION {
        return Err(Error::Format(format!("unsupported SPGM version {version}")));
    }
    let n_frames = word(8) as usize;
    let n_bins = word(12) as usize;
    let payload = &bytes[SPGM_HEADER_LEN..];
    let expected = n_frames
        .checked_mul(n_bins)
        .and_then(|n| n.checked_mul(4))
        .ok_or_else(|| Error::Format("SPGM dimensions overflow".into()))?;
    if payload.len() != expected {
        return Err(Error::Format(format!(
            "SPGM header claims {n_frames}x{n_bins} ({expected} bytes) but payload has {} bytes",
            payload.len()
        )));
    }
    let data = payload
        .chunks_exact(4)
        .map(|c| f32::from_le_bytes(c.try_into().unwrap()))
        .collect();
    Matrix::new(n_frames, n_bins, data).map_err(|e| Error::Format(e.to_string()))
}

pub fn read_spgm(path: impl AsRef<Path>) -> Result<Matrix> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    decode_spgm(&bytes).map_err(|e| Error::Format(format!("{}: {e}", path.display())))
}

pub fn write_spgm(path: impl AsRef<Path>, m: &Matrix) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, encode_spgm(m)).map_err(|e| Error::io(path, e))
}

/// Reads a headerless numeric CSV, one frame per line.
pub fn read_csv_matrix(path: impl AsRef<Path>) -> Result<Matrix> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_csv_matrix(&text).map_err(|e| Error::Format(format!("{}: {e}", path.display())))
}

pub fn parse_csv_matrix(text: &str) -> Result<Matrix> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut rows: Vec<Vec<f32>> = Vec::new();
    for (line, record) in reader.records().enumerate() {
        let record = record.map_err(|e| Error::Format(e.to_string()))?;
        let row = record
            .iter()
            .map(|cell| {
                cell.parse::<f32>().map_err(|_| {
                    Error::Format(format!("line {}: not a number: {cell:?}", line + 1))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        if let Some(first) = rows.first() {
            if first.len() != row.len() {
                return Err(Error::Format(format!(
                    "ragged CSV: line {} has {} values, expected {}",
                    line + 1,
                    row.len(),
                    first.len()
                )));
            }
        }
        rows.push(row);
    }
    Matrix::from_rows(&rows).map_err(|e| Error::Format(e.to_string()))
}

pub fn write_csv_matrix(path: impl AsRef<Path>, m: &Matrix) -> Result<()> {
    let path = path.as_ref();
    let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    let mut write_all = || -> std::io::Result<()> {
        for row in m.rows() {
            let mut first = true;
            for v in row {
                if !first {
                    w.write_all(b",")?;
                }
                first = false;
                write!(w, "{v}")?;
            }
            w.write_all(b"\n")?;
        }
        w.flush()
    };
    write_all().map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn write_pcm16(path: &Path, channels: u16, samples: &[i16]) {
        let spec = hound::WavSpec {
            channels,
            sample_rate: 16000,
            bits_per_sample: 16,
            sample_format: hound::SampleFormat::Int,
        };
        let mut w = hound::WavWriter::create(path, spec).unwrap();
        for &s in samples {
            w.write_sample(s).unwrap();
        }
        w.finalize().unwrap();
    }

    #[test]
    fn pcm16_scaling() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("a.wav");
        write_pcm16(&p, 1, &[0, 16384, -32768]);
        let w = read_wav(&p).unwrap();
        assert_eq!(w.samples(), &[0.0, 0.5, -1.0]);
        assert_eq!(w.sample_rate(), 16000);
    }

    #[test]
    fn stereo_is_averaged() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("s.wav");
        let spec = hound::WavSpec {
            channels: 2,
            sample_rate: 8000,
            bits_per_sample: 32,
            sample_format: hound::SampleFormat::Float,
        };
        let mut w = hound::WavWriter::create(&p, spec).unwrap();
        w.write_sample(1.0f32).unwrap();
        w.write_sample(0.0f32).unwrap();
        w.finalize().unwrap();
        assert_eq!(read_wav(&p).unwrap().samples(), &[0.5]);
    }

    #[test]
    fn truncated_header_is_format_error() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("t.wav");
        fs::write(&p, b"RIFF\x24\x00\x00\x00WAVEfmt ").unwrap();
        assert!(matches!(read_wav(&p), Err(Error::Format(_))));
        fs::write(&p, b"hello world, not a wav").unwrap();
        assert!(matches!(read_wav(&p), Err(Error::Format(_))));
    }

    #[test]
    fn unsupported_bit_depth() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("u.wav");
        let spec = hound::WavSpec {
            channels: 1,
            sample_rate: 8000,
            bits_per_sample: 8,
            sample_format: hound::SampleFormat::Int,
        };
        let mut w = hound::WavWriter::create(&p, spec).unwrap();
        w.write_sample(3i8).unwrap();
        w.finalize().unwrap();
        assert!(matches!(read_wav(&p), Err(Error::Unsupported(_))));
    }

    #[test]
    fn wav_quantization_edges() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("q.wav");
        let w = Waveform::new(vec![0.0, 1.0, -1.0], 16000).unwrap();
        write_wav(&p, &w).unwrap();
        let back = read_wav(&p).unwrap();
        assert_eq!(back.samples()[0], 0.0);
        assert_eq!(back.samples()[1], 32767.0 / 32768.0);
        assert_eq!(back.samples()[2], -1.0);
    }

    #[test]
    fn wav_missing_file_is_io_error() {
        assert!(matches!(
            read_wav("/nonexistent/dir/x.wav"),
            Err(Error::Io { .. })
        ));
    }

    #[test]
    fn spgm_zero_matrix_layout() {
        let m = Matrix::zeros(2, 3);
        let bytes = encode_spgm(&m);
        assert_eq!(bytes.len(), 16 + 24);
        assert_eq!(&bytes[..4], b"SPGM");
        assert_eq!(&bytes[4..8], &[1, 0, 0, 0]);
        assert_eq!(&bytes[8..12], &[2, 0, 0, 0]);
        assert_eq!(&bytes[12..16], &[3, 0, 0, 0]);
        assert!(bytes[16..].iter().all(|&b| b == 0));
        assert_eq!(decode_spgm(&bytes).unwrap(), m);
    }

    #[test]
    fn spgm_empty_round_trip() {
        let m = Matrix::zeros(0, 0);
        let bytes = encode_spgm(&m);
        assert_eq!(bytes.len(), 16);
        assert_eq!(decode_spgm(&bytes).unwrap(), m);
    }

    #[test]
    fn spgm_errors() {
        let mut bytes = encode_spgm(&Matrix::zeros(2, 4));
        bytes[8] = 4;
        bytes[12] = 4;
        assert!(matches!(decode_spgm(&bytes), Err(Error::Format(_))));
        let mut bad = encode_spgm(&Matrix::zeros(1, 1));
        bad[0] = b'X';
        assert!(matches!(decode_spgm(&bad), Err(Error::Format(_))));
        assert!(matches!(decode_spgm(b"SPG"), Err(Error::Format(_))));
    }

    #[test]
    fn csv_parse_cases() {
        let m = parse_csv_matrix("1,2\n3,4").unwrap();
        assert_eq!(m.shape(), (2, 2));
        assert_eq!(m.data(), &[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(parse_csv_matrix("5").unwrap().shape(), (1, 1));
        assert!(matches!(parse_csv_matrix("1,2\n3"), Err(Error::Format(_))));
        assert!(matches!(parse_csv_matrix("1,x"), Err(Error::Format(_))));
    }

    #[test]
    fn matrix_rejects_non_finite() {
        assert!(Matrix::new(1, 1, vec![f32::NAN]).is_err());
        assert!(Matrix::new(1, 2, vec![0.0]).is_err());
        assert!(Waveform::new(vec![0.0], 0).is_err());
    }

    proptest! {
        #[test]
        fn spgm_round_trip_is_bit_exact(
            n_frames in 0usize..12,
            n_bins in 0usize..9,
            seed in any::<u64>(),
        ) {
            let mut s = seed;
            let m = Matrix::from_fn(n_frames, n_bins, |_, _| {
                s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                ((s >> 40) as f32 / (1u64 << 24) as f32 - 0.5) * 1e3
            });
            let back = decode_spgm(&encode_spgm(&m)).unwrap();
            let a: Vec<u32> = m.data().iter().map(|v| v.to_bits()).collect();
            let b: Vec<u32> = back.data().iter().map(|v| v.to_bits()).collect();
            prop_assert_eq!(back.shape(), m.shape());
            prop_assert_eq!(a, b);
        }

        #[test]
        fn wav_round_trip_within_one_lsb(samples in prop::collection::vec(-32767i32..=32767, 0..64)) {
            let dir = tempfile::tempdir().unwrap();
            let p = dir.path().join("r.wav");
            let x: Vec<f32> = samples.iter().map(|&q| q as f32 / 32768.0 + 0.3 / 32768.0).collect();
            let x: Vec<f32> = x.into_iter().map(|v| v.clamp(-1.0 + 1.0 / 32768.0, 1.0 - 1.0 / 32768.0)).collect();
            let w = Waveform::new(x.clone(), 16000).unwrap();
            write_wav(&p, &w).unwrap();
            let back = read_wav(&p).unwrap();
            for (a, b) in x.iter().zip(back.samples()) {
                prop_assert!((a - b).abs() <= 1.0 / 32768.0);
            }
        }

        #[test]
        fn csv_round_trip(rows in prop::collection::vec(prop::collection::vec(-1e6f32..1e6, 3), 1..6)) {
            let dir = tempfile::tempdir().unwrap();
            let p = dir.path().join("m.csv");
            let m = Matrix::from_rows(&rows).unwrap();
            write_csv_matrix(&p, &m).unwrap();
            let back = read_csv_matrix(&p).unwrap();
            prop_assert_eq!(back.shape(), m.shape());
            for (a, b) in m.data().iter().zip(back.data()) {
                prop_assert!((a - b).abs() <= 1e-6 * a.abs().max(1.0));
            }
        }
    }
}
