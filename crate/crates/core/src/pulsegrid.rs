//! Receive-capture synchronization and the fast-time × slow-time pulse matrix.

use crate::error::{Error, Result};
use crate::scene::WaveformConfig;
use ndarray::Array2;

/// Fast-time × slow-time sample matrix: rows are samples within one pulse
/// repetition interval, columns are pulses.
#[derive(Debug, Clone)]
pub struct PulseMatrix {
    /// rows = fast-time samples within a PRI, cols = pulses.
    pub data: Array2<f64>,
    pub sample_rate_hz: f64,
    pub prf_hz: f64,
    /// Absolute fast-time sample index of row 0 (0 if ungated).
    pub gate_start_sample: usize,
}

impl PulseMatrix {
    pub fn rows(&self) -> usize {
        self.data.nrows()
    }

    pub fn cols(&self) -> usize {
        self.data.ncols()
    }
}

/// Sample index where pulse `p` begins, relative to the capture start.
///
/// The fractional pulse interval is carried exactly and rounded per pulse;
/// truncation is never accumulated, so the start error stays within half a
/// sample for every pulse.
pub fn pulse_start_sample(sample_rate_hz: f64, prf_hz: f64, pulse: usize) -> usize {
    (pulse as f64 * (sample_rate_hz / prf_hz)).round() as usize
}

/// Smallest index whose magnitude reaches `threshold_frac` of the capture's
/// peak magnitude.
pub fn detect_leading_edge(samples: &[f64], threshold_frac: f64) -> Result<usize> {
    if !(threshold_frac > 0.0 && threshold_frac < 1.0) {
        return Err(Error::Config(format!(
            "leading-edge threshold must be in (0, 1), got {threshold_frac}"
        )));
    }
    let max = samples.iter().fold(0.0_f64, |m, &s| m.max(s.abs()));
    if max == 0.0 {
        return Err(Error::AllZeroSignal);
    }
    let threshold = threshold_frac * max;
    samples
        .iter()
        .position(|&s| s.abs() >= threshold)
        .ok_or(Error::AllZeroSignal)
}

/// Reshape a contiguous capture into a pulse matrix. Column `p` starts at
/// `start + pulse_start_sample(fs, prf, p)`; rows = floor(fs/prf).
pub fn form_matrix(samples: &[f64], start: usize, wf: &WaveformConfig) -> Result<PulseMatrix> {
    wf.validate()?;
    let rows = wf.pri_samples().floor() as usize;
    let cols = wf.pulse_count;
    let mut data = Array2::zeros((rows, cols));
    for p in 0..cols {
        let col_start = start + pulse_start_sample(wf.sample_rate_hz, wf.prf_hz, p);
        if col_start + rows > samples.len() {
            return Err(Error::InsufficientSamples { available: p });
        }
        for r in 0..rows {
            data[(r, p)] = samples[col_start + r];
        }
    }
    Ok(PulseMatrix {
        data,
        sample_rate_hz: wf.sample_rate_hz,
        prf_hz: wf.prf_hz,
        gate_start_sample: 0,
    })
}

/// Drop every fast-time row before `first_kept_sample` and record the offset.
pub fn range_gate(m: &PulseMatrix, first_kept_sample: usize) -> Result<PulseMatrix> {
    if first_kept_sample >= m.rows() {
        return Err(Error::GateExceedsMatrix {
            gate: first_kept_sample,
            rows: m.rows(),
        });
    }
    Ok(PulseMatrix {
        data: m.data.slice(ndarray::s![first_kept_sample.., ..]).to_owned(),
        sample_rate_hz: m.sample_rate_hz,
        prf_hz: m.prf_hz,
        gate_start_sample: m.gate_start_sample + first_kept_sample,
    })
}

/// Keep only the first `rows` fast-time rows (drops the far-range tail).
pub fn truncate_rows(m: &PulseMatrix, rows: usize) -> Result<PulseMatrix> {
    if rows == 0 || rows > m.rows() {
        return Err(Error::GateExceedsMatrix {
            gate: rows,
            rows: m.rows(),
        });
    }
    Ok(PulseMatrix {
        data: m.data.slice(ndarray::s![..rows, ..]).to_owned(),
        sample_rate_hz: m.sample_rate_hz,
        prf_hz: m.prf_hz,
        gate_start_sample: m.gate_start_sample,
    })
}

/// Two-way monostatic range of absolute fast-time sample `n`.
pub fn sample_to_range(n: usize, sample_rate_hz: f64, sound_speed: f64) -> f64 {
    sound_speed * n as f64 / (2.0 * sample_rate_hz)
}

/// Nearest absolute fast-time sample for a two-way range.
pub fn range_to_sample(range_m: f64, sample_rate_hz: f64, sound_speed: f64) -> usize {
    (2.0 * range_m * sample_rate_hz / sound_speed).round() as usize
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::raysim::{simulate_collection, SimOptions};
    use crate::scene::default_scene;
    use crate::scene::RotationModel;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn default_waveform() -> WaveformConfig {
        let (_, _, wf) = default_scene();
        wf
    }

    #[test]
    fn leading_edge_finds_an_impulse() {
        let mut v = vec![0.0; 400];
        v[100] = 1.0;
        assert_eq!(detect_leading_edge(&v, 0.5).unwrap(), 100);
    }

    #[test]
    fn leading_edge_finds_first_ramp_crossing() {
        let v: Vec<f64> = (0..1000).map(|i| i as f64 / 999.0).collect();
        assert_eq!(detect_leading_edge(&v, 0.5).unwrap(), 500);
    }

    #[test]
    fn leading_edge_rejects_silence() {
        assert!(matches!(
            detect_leading_edge(&vec![0.0; 64], 0.5),
            Err(Error::AllZeroSignal)
        ));
        assert!(matches!(
            detect_leading_edge(&[], 0.5),
            Err(Error::AllZeroSignal)
        ));
    }

    #[test]
    fn leading_edge_rejects_bad_threshold() {
        let v = vec![1.0; 4];
        assert!(detect_leading_edge(&v, 0.0).is_err());
        assert!(detect_leading_edge(&v, 1.0).is_err());
    }

    #[test]
    fn leading_edge_ignores_positive_scaling() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..100 {
            let v: Vec<f64> = (0..500).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let scale: f64 = rng.gen_range(1e-6..1e6);
            let scaled: Vec<f64> = v.iter().map(|&s| s * scale).collect();
            let frac = rng.gen_range(0.05..0.95);
            assert_eq!(
                detect_leading_edge(&v, frac).unwrap(),
                detect_leading_edge(&scaled, frac).unwrap()
            );
        }
    }

    #[test]
    fn column_starts_follow_the_fractional_interval() {
        // fs/prf = 1297 + 1/17: pulse 17 starts exactly 22050 samples in.
        assert_eq!(pulse_start_sample(44100.0, 34.0, 17), 22050);
        assert_eq!(pulse_start_sample(44100.0, 34.0, 0), 0);
        assert_eq!(pulse_start_sample(44100.0, 34.0, 1), 1297);

        // Encode the sample index as the sample value and read back starts.
        let wf = default_waveform();
        let n = 175 * 1298 + 1400;
        let samples: Vec<f64> = (0..n).map(|i| i as f64).collect();
        let m = form_matrix(&samples, 3, &wf).unwrap();
        assert_eq!(m.rows(), 1297);
        assert_eq!(m.cols(), 175);
        assert_eq!(m.data[(0, 17)], (3 + 22050) as f64);
        for p in 0..m.cols() {
            let exact = p as f64 * 22050.0 / 17.0;
            let got = m.data[(0, p)] - 3.0;
            assert!(
                (got - exact).abs() <= 0.5 + 1e-9,
                "pulse {p} start drifted: got {got}, exact interval {exact}"
            );
        }
    }

    #[test]
    fn integer_period_input_gives_identical_columns() {
        // prf 35 divides fs exactly, so a 1260-periodic input repeats per pulse.
        let wf = WaveformConfig {
            prf_hz: 35.0,
            sample_rate_hz: 44100.0,
            pulse_count: 40,
            impulse_len_samples: 32,
        };
        let period = 1260;
        let samples: Vec<f64> = (0..period * 41)
            .map(|i| ((i % period) as f64 * 0.37).sin())
            .collect();
        let m = form_matrix(&samples, 0, &wf).unwrap();
        for p in 1..m.cols() {
            for r in 0..m.rows() {
                assert_eq!(m.data[(r, p)], m.data[(r, 0)]);
            }
        }
    }

    #[test]
    fn columns_reproduce_consumed_samples_exactly() {
        let wf = default_waveform();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let n = 175 * 1298 + 50;
        let samples: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let start = 29;
        let m = form_matrix(&samples, start, &wf).unwrap();
        for p in 0..m.cols() {
            let cs = start + pulse_start_sample(wf.sample_rate_hz, wf.prf_hz, p);
            for r in 0..m.rows() {
                assert_eq!(m.data[(r, p)], samples[cs + r]);
            }
        }
    }

    #[test]
    fn short_capture_reports_complete_pulse_count() {
        let wf = default_waveform();
        // Room for exactly 3 complete pulses starting at 0.
        let len = pulse_start_sample(wf.sample_rate_hz, wf.prf_hz, 3) + 1297;
        let samples = vec![0.25; len];
        match form_matrix(&samples, 0, &wf) {
            Err(Error::InsufficientSamples { available }) => assert_eq!(available, 4),
            other => panic!("expected InsufficientSamples, got {other:?}"),
        }
    }

    #[test]
    fn simulated_static_capture_has_identical_columns() {
        let (scene, _, wf) = default_scene();
        let still = RotationModel::new(0.0, 1.1);
        let sim = simulate_collection(&scene, &still, &wf, SimOptions::default()).unwrap();
        let start = detect_leading_edge(&sim.samples, 0.5).unwrap();
        assert_eq!(start, 0);
        let m = form_matrix(&sim.samples, start, &wf).unwrap();
        for p in 1..m.cols() {
            for r in 0..m.rows() {
                assert_eq!(m.data[(r, p)], m.data[(r, 0)], "row {r} pulse {p}");
            }
        }
    }

    #[test]
    fn gate_drops_leading_rows_and_records_offset() {
        let wf = default_waveform();
        let samples: Vec<f64> = (0..175 * 1298 + 10).map(|i| (i % 977) as f64).collect();
        let m = form_matrix(&samples, 0, &wf).unwrap();

        let same = range_gate(&m, 0).unwrap();
        assert_eq!(same.rows(), m.rows());
        assert_eq!(same.gate_start_sample, 0);
        assert_eq!(same.data, m.data);

        let gated = range_gate(&m, 250).unwrap();
        assert_eq!(gated.rows(), 1047);
        assert_eq!(gated.gate_start_sample, 250);
        assert_eq!(gated.data[(0, 3)], m.data[(250, 3)]);

        // Gating twice composes additively.
        let two_step = range_gate(&range_gate(&m, 100).unwrap(), 150).unwrap();
        assert_eq!(two_step.gate_start_sample, gated.gate_start_sample);
        assert_eq!(two_step.data, gated.data);

        assert!(matches!(
            range_gate(&m, 1297),
            Err(Error::GateExceedsMatrix { gate: 1297, rows: 1297 })
        ));
    }

    #[test]
    fn truncation_keeps_the_near_rows() {
        let wf = default_waveform();
        let samples: Vec<f64> = (0..175 * 1298 + 10).map(|i| (i % 101) as f64).collect();
        let m = form_matrix(&samples, 0, &wf).unwrap();
        let cut = truncate_rows(&m, 600).unwrap();
        assert_eq!(cut.rows(), 600);
        assert_eq!(cut.gate_start_sample, 0);
        assert_eq!(cut.data[(599, 5)], m.data[(599, 5)]);
        assert!(truncate_rows(&m, 0).is_err());
        assert!(truncate_rows(&m, 1298).is_err());
    }

    #[test]
    fn sample_range_conversions_agree() {
        assert_eq!(sample_to_range(0, 44100.0, 343.0), 0.0);
        assert_eq!(range_to_sample(2.16, 44100.0, 343.0), 555);
        assert!((sample_to_range(555, 44100.0, 343.0) - 2.158).abs() < 1e-3);
        for n in 0..2000 {
            let r = sample_to_range(n, 44100.0, 343.0);
            assert_eq!(range_to_sample(r, 44100.0, 343.0), n);
        }
    }
}
