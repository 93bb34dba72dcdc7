//! File formats: WAV captures, PDMX pulse-matrix archives, PGM images.

use crate::error::{Error, Result};
use crate::pulsegrid::PulseMatrix;
use ndarray::Array2;
use std::io::{Read, Write};
use std::path::Path;

/// Read a mono WAV capture (16-bit PCM or 32-bit IEEE float) as f64 samples.
/// PCM is scaled by 1/32768 so both encodings share the nominal [-1, 1] range.
pub fn read_wav(path: &Path) -> Result<(Vec<f64>, f64)> {
    let mut reader = hound::WavReader::open(path).map_err(wav_err)?;
    let spec = reader.spec();
    if spec.channels != 1 {
        return Err(Error::FileFormat(format!(
            "expected mono WAV, got {} channels",
            spec.channels
        )));
    }
    let samples: Vec<f64> = match (spec.sample_format, spec.bits_per_sample) {
        (hound::SampleFormat::Int, 16) => reader
            .samples::<i16>()
            .map(|s| s.map(|v| v as f64 / 32768.0))
            .collect::<std::result::Result<_, _>>()
            .map_err(wav_err)?,
        (hound::SampleFormat::Float, 32) => reader
            .samples::<f32>()
            .map(|s| s.map(|v| v as f64))
            .collect::<std::result::Result<_, _>>()
            .map_err(wav_err)?,
        (format, bits) => {
            return Err(Error::FileFormat(format!(
                "unsupported WAV encoding: {bits}-bit {format:?}; expected 16-bit PCM or 32-bit float"
            )))
        }
    };
    Ok((samples, spec.sample_rate as f64))
}

/// Read a WAV capture, insisting its sample rate matches `expected_fs`.
pub fn read_wav_expecting(path: &Path, expected_fs: f64) -> Result<Vec<f64>> {
    let (samples, actual) = read_wav(path)?;
    if actual != expected_fs {
        return Err(Error::SampleRateMismatch {
            expected: expected_fs,
            actual,
        });
    }
    Ok(samples)
}

/// Write samples as a mono 32-bit float WAV.
pub fn write_wav_f32(path: &Path, samples: &[f64], sample_rate_hz: f64) -> Result<()> {
    let spec = hound::WavSpec {
        channels: 1,
        sample_rate: sample_rate_hz as u32,
        bits_per_sample: 32,
        sample_format: hound::SampleFormat::Float,
    };
    let mut writer = hound::WavWriter::create(path, spec).map_err(wav_err)?;
    for &s in samples {
        writer.write_sample(s as f32).map_err(wav_err)?;
    }
    writer.finalize().map_err(wav_err)
}

/// Write samples as a mono 16-bit PCM WAV, clamping to the representable range.
pub fn write_wav_pcm16(path: &Path, samples: &[f64], sample_rate_hz: f64) -> Result<()> {
    let spec = hound::WavSpec {
        channels: 1,
        sample_rate: sample_rate_hz as u32,
        bits_per_sample: 16,
        sample_format: hound::SampleFormat::Int,
    };
    let mut writer = hound::WavWriter::create(path, spec).map_err(wav_err)?;
    for &s in samples {
        let v = (s * 32768.0).round().clamp(-32768.0, 32767.0) as i16;
        writer.write_sample(v).map_err(wav_err)?;
    }
    writer.finalize().map_err(wav_err)
}

fn wav_err(e: hound::Error) -> Error {
    match e {
        hound::Error::IoError(io) => Error::Io(io),
        other => Error::FileFormat(other.to_string()),
    }
}

const PDMX_MAGIC: &[u8; 4] = b"PDMX";
const PDMX_VERSION: u16 = 1;

/// Write a pulse matrix (or any row-major real matrix with its framing) as a
/// PDMX file: magic "PDMX", u16 version=1, u32 rows, u32 cols,
/// u32 gate_start_sample, f64 sample_rate, f64 prf, then rows·cols f64 data,
/// row-major. All integers and floats are little-endian.
pub fn write_pdmx(path: &Path, m: &PulseMatrix) -> Result<()> {
    let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
    f.write_all(PDMX_MAGIC)?;
    f.write_all(&PDMX_VERSION.to_le_bytes())?;
    f.write_all(&(m.rows() as u32).to_le_bytes())?;
    f.write_all(&(m.cols() as u32).to_le_bytes())?;
    f.write_all(&(m.gate_start_sample as u32).to_le_bytes())?;
    f.write_all(&m.sample_rate_hz.to_le_bytes())?;
    f.write_all(&m.prf_hz.to_le_bytes())?;
    for r in 0..m.rows() {
        for c in 0..m.cols() {
            f.write_all(&m.data[(r, c)].to_le_bytes())?;
        }
    }
    f.flush()?;
    Ok(())
}

/// Read a PDMX file written by [`write_pdmx`].
pub fn read_pdmx(path: &Path) -> Result<PulseMatrix> {
    let mut f = std::io::BufReader::new(std::fs::File::open(path)?);
    let mut magic = [0u8; 4];
    f.read_exact(&mut magic)?;
    if &magic != PDMX_MAGIC {
        return Err(Error::FileFormat(format!(
            "bad PDMX magic {:02x?}",
            magic
        )));
    }
    let version = read_u16(&mut f)?;
    if version != PDMX_VERSION {
        return Err(Error::FileFormat(format!(
            "unsupported PDMX version {version}"
        )));
    }
    let rows = read_u32(&mut f)? as usize;
    let cols = read_u32(&mut f)? as usize;
    let gate_start_sample = read_u32(&mut f)? as usize;
    let sample_rate_hz = read_f64(&mut f)?;
    let prf_hz = read_f64(&mut f)?;
    let count = rows
        .checked_mul(cols)
        .filter(|&n| n <= 1 << 28)
        .ok_or_else(|| Error::FileFormat(format!("unreasonable PDMX size {rows}x{cols}")))?;
    let mut values = Vec::with_capacity(count);
    for _ in 0..count {
        values.push(read_f64(&mut f)?);
    }
    let data = Array2::from_shape_vec((rows, cols), values)
        .map_err(|e| Error::FileFormat(e.to_string()))?;
    Ok(PulseMatrix {
        data,
        sample_rate_hz,
        prf_hz,
        gate_start_sample,
    })
}

fn read_u16(f: &mut impl Read) -> Result<u16> {
    let mut b = [0u8; 2];
    f.read_exact(&mut b)?;
    Ok(u16::from_le_bytes(b))
}

fn read_u32(f: &mut impl Read) -> Result<u32> {
    let mut b = [0u8; 4];
    f.read_exact(&mut b)?;
    Ok(u32::from_le_bytes(b))
}

fn read_f64(f: &mut impl Read) -> Result<f64> {
    let mut b = [0u8; 8];
    f.read_exact(&mut b)?;
    Ok(f64::from_le_bytes(b))
}

/// Write a nonnegative matrix as a binary PGM (P5) image with log scaling:
/// pixel = 255·log10(1 + value) / log10(1 + max). An all-zero matrix writes
/// all-zero pixels.
pub fn write_pgm_log(path: &Path, values: &Array2<f64>) -> Result<()> {
    let (rows, cols) = values.dim();
    let max = values.iter().fold(0.0_f64, |m, &v| m.max(v));
    let denom = (1.0 + max).log10();
    let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
    write!(f, "P5\n{cols} {rows}\n255\n")?;
    let mut buf = Vec::with_capacity(rows * cols);
    for r in 0..rows {
        for c in 0..cols {
            let v = values[(r, c)].max(0.0);
            let px = if denom > 0.0 {
                (255.0 * (1.0 + v).log10() / denom).round().clamp(0.0, 255.0) as u8
            } else {
                0
            };
            buf.push(px);
        }
    }
    f.write_all(&buf)?;
    f.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn float_wav_round_trips_exactly() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("f32.wav");
        let samples: Vec<f64> = (0..500).map(|i| ((i as f64) * 0.02).sin()).collect();
        write_wav_f32(&path, &samples, 44100.0).unwrap();
        let (back, fs) = read_wav(&path).unwrap();
        assert_eq!(fs, 44100.0);
        assert_eq!(back.len(), samples.len());
        for (a, b) in samples.iter().zip(&back) {
            assert_eq!(*a as f32, *b as f32);
            assert!((a - b).abs() < 1e-7);
        }
    }

    #[test]
    fn pcm_wav_round_trips_to_lsb() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("pcm.wav");
        let samples: Vec<f64> = (0..500).map(|i| ((i as f64) * 0.11).cos() * 0.9).collect();
        write_wav_pcm16(&path, &samples, 22050.0).unwrap();
        let (back, fs) = read_wav(&path).unwrap();
        assert_eq!(fs, 22050.0);
        for (a, b) in samples.iter().zip(&back) {
            assert!((a - b).abs() <= 0.5 / 32768.0 + 1e-12);
        }
    }

    #[test]
    fn wav_sample_rate_is_checked() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("rate.wav");
        write_wav_f32(&path, &[0.5; 16], 48000.0).unwrap();
        match read_wav_expecting(&path, 44100.0) {
            Err(Error::SampleRateMismatch { expected, actual }) => {
                assert_eq!(expected, 44100.0);
                assert_eq!(actual, 48000.0);
            }
            other => panic!("expected SampleRateMismatch, got {other:?}"),
        }
        assert!(read_wav_expecting(&path, 48000.0).is_ok());
    }

    #[test]
    fn stereo_wav_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("stereo.wav");
        let spec = hound::WavSpec {
            channels: 2,
            sample_rate: 44100,
            bits_per_sample: 16,
            sample_format: hound::SampleFormat::Int,
        };
        let mut w = hound::WavWriter::create(&path, spec).unwrap();
        for _ in 0..8 {
            w.write_sample(0i16).unwrap();
        }
        w.finalize().unwrap();
        assert!(matches!(read_wav(&path), Err(Error::FileFormat(_))));
    }

    #[test]
    fn pdmx_round_trips_bit_exactly() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("m.pdmx");
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let data = Array2::from_shape_fn((37, 21), |_| rng.gen_range(-5.0..5.0));
        let m = PulseMatrix {
            data,
            sample_rate_hz: 44100.0,
            prf_hz: 34.0,
            gate_start_sample: 250,
        };
        write_pdmx(&path, &m).unwrap();
        let back = read_pdmx(&path).unwrap();
        assert_eq!(back.rows(), 37);
        assert_eq!(back.cols(), 21);
        assert_eq!(back.gate_start_sample, 250);
        assert_eq!(back.sample_rate_hz, 44100.0);
        assert_eq!(back.prf_hz, 34.0);
        assert_eq!(back.data, m.data);
    }

    #[test]
    fn pdmx_header_layout_is_frozen() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("h.pdmx");
        let m = PulseMatrix {
            data: Array2::from_shape_vec((1, 2), vec![1.0, -1.0]).unwrap(),
            sample_rate_hz: 44100.0,
            prf_hz: 34.0,
            gate_start_sample: 7,
        };
        write_pdmx(&path, &m).unwrap();
        let bytes = std::fs::read(&path).unwrap();
        assert_eq!(&bytes[0..4], b"PDMX");
        assert_eq!(u16::from_le_bytes([bytes[4], bytes[5]]), 1);
        assert_eq!(u32::from_le_bytes(bytes[6..10].try_into().unwrap()), 1);
        assert_eq!(u32::from_le_bytes(bytes[10..14].try_into().unwrap()), 2);
        assert_eq!(u32::from_le_bytes(bytes[14..18].try_into().unwrap()), 7);
        assert_eq!(
            f64::from_le_bytes(bytes[18..26].try_into().unwrap()),
            44100.0
        );
        assert_eq!(f64::from_le_bytes(bytes[26..34].try_into().unwrap()), 34.0);
        assert_eq!(bytes.len(), 34 + 2 * 8);
        assert_eq!(f64::from_le_bytes(bytes[34..42].try_into().unwrap()), 1.0);
    }

    #[test]
    fn pdmx_rejects_foreign_files() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.pdmx");
        std::fs::write(&path, b"NOPE\x01\x00rest").unwrap();
        assert!(matches!(read_pdmx(&path), Err(Error::FileFormat(_))));
        let truncated = dir.path().join("short.pdmx");
        std::fs::write(&truncated, b"PDMX\x01\x00\x05\x00\x00\x00").unwrap();
        assert!(read_pdmx(&truncated).is_err());
    }

    #[test]
    fn pgm_writes_log_scaled_pixels() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("img.pgm");
        let values = Array2::from_shape_vec((2, 3), vec![0.0, 9.0, 99.0, 0.0, 0.0, 999.0]).unwrap();
        write_pgm_log(&path, &values).unwrap();
        let bytes = std::fs::read(&path).unwrap();
        let header = b"P5\n3 2\n255\n";
        assert_eq!(&bytes[..header.len()], header);
        let px = &bytes[header.len()..];
        assert_eq!(px.len(), 6);
        assert_eq!(px[0], 0);
        // log10(1+9)/log10(1+999) = 1/3, log10(1+99)/log10(1+999) = 2/3.
        assert_eq!(px[1], 85);
        assert_eq!(px[2], 170);
        assert_eq!(px[5], 255);
    }

    #[test]
    fn all_zero_pgm_is_black() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("zero.pgm");
        write_pgm_log(&path, &Array2::zeros((4, 4))).unwrap();
        let bytes = std::fs::read(&path).unwrap();
        assert!(bytes[b"P5\n4 4\n255\n".len()..].iter().all(|&b| b == 0));
    }
}
