//! Range-doppler map formation and doppler peak estimation.

use crate::error::{Error, Result};
use crate::pulsegrid::{sample_to_range, PulseMatrix};
use ndarray::Array2;
use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

/// Default peak-to-noise-floor ratio for [`doppler_peak_at_range`].
///
/// Measured on simulated default-scene collections: rotating fans give
/// ratios of 10-48 at echo-bearing range bins, static scenes give ~0, so
/// 4.0 leaves a wide margin on both sides.
pub const DEFAULT_MIN_REL_PEAK: f64 = 4.0;

/// Slow-time window applied before the pulse-axis transform.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Window {
    /// No weighting.
    #[default]
    Rectangular,
    /// Hann taper, for sidelobe suppression at the cost of main-lobe width.
    Hann,
}

impl Window {
    fn coefficients(self, n: usize) -> Vec<f64> {
        match self {
            Window::Rectangular => vec![1.0; n],
            Window::Hann => (0..n)
                .map(|p| {
                    let x = std::f64::consts::TAU * p as f64 / n as f64;
                    0.5 * (1.0 - x.cos())
                })
                .collect(),
        }
    }
}

/// Doppler magnitudes per range bin, zero doppler at column floor(cols/2).
#[derive(Debug, Clone)]
pub struct RangeDopplerMap {
    /// rows = range bins, cols = doppler bins (centered).
    pub magnitude: Array2<f64>,
    pub sample_rate_hz: f64,
    pub prf_hz: f64,
    /// Absolute fast-time sample of range row 0.
    pub gate_start_sample: usize,
    /// Windowed slow-time rows kept for sub-bin peak refinement.
    slow_time: Array2<f64>,
}

impl RangeDopplerMap {
    pub fn rows(&self) -> usize {
        self.magnitude.nrows()
    }

    pub fn cols(&self) -> usize {
        self.magnitude.ncols()
    }

    /// Column index of zero doppler.
    pub fn center_bin(&self) -> usize {
        self.cols() / 2
    }

    /// Doppler bin spacing in Hz.
    pub fn hz_per_bin(&self) -> f64 {
        self.prf_hz / self.cols() as f64
    }

    /// Signed doppler frequency of a (centered) column index.
    pub fn bin_to_hz(&self, bin: usize) -> f64 {
        (bin as f64 - self.center_bin() as f64) * self.hz_per_bin()
    }

    /// Two-way range of a map row.
    pub fn row_to_range_m(&self, row: usize, sound_speed: f64) -> f64 {
        sample_to_range(self.gate_start_sample + row, self.sample_rate_hz, sound_speed)
    }
}

/// Transform each range row along the pulse axis (unnormalized forward DFT),
/// take magnitudes, and rotate so zero doppler sits at column floor(cols/2).
pub fn range_doppler(m: &PulseMatrix) -> RangeDopplerMap {
    range_doppler_windowed(m, Window::Rectangular)
}

/// [`range_doppler`] with an explicit slow-time window.
pub fn range_doppler_windowed(m: &PulseMatrix, window: Window) -> RangeDopplerMap {
    let rows = m.rows();
    let cols = m.cols();
    let center = cols / 2;
    let w = window.coefficients(cols);

    let fft = FftPlanner::new().plan_fft_forward(cols);
    let mut magnitude = Array2::zeros((rows, cols));
    let mut slow_time = Array2::zeros((rows, cols));
    let mut buf = vec![Complex::new(0.0, 0.0); cols];
    for r in 0..rows {
        for p in 0..cols {
            let v = m.data[(r, p)] * w[p];
            slow_time[(r, p)] = v;
            buf[p] = Complex::new(v, 0.0);
        }
        fft.process(&mut buf);
        // Centered column j holds raw DFT bin (j - center) mod cols.
        for j in 0..cols {
            let raw = (j + cols - center) % cols;
            magnitude[(r, j)] = buf[raw].norm();
        }
    }

    RangeDopplerMap {
        magnitude,
        sample_rate_hz: m.sample_rate_hz,
        prf_hz: m.prf_hz,
        gate_start_sample: m.gate_start_sample,
        slow_time,
    }
}

/// Signed frequency (Hz) of the strongest non-DC doppler line in one range
/// row, refined below bin resolution by a dense transform search within one
/// bin of the coarse peak.
///
/// Bins within one bin of zero doppler are excluded from the search. If the
/// strongest remaining magnitude is below `min_rel_peak` times the row's
/// median magnitude, the row is considered dopplerless (a static scene) and
/// `NoDopplerPeak` is returned.
pub fn doppler_peak_at_range(
    rd: &RangeDopplerMap,
    range_bin: usize,
    min_rel_peak: f64,
) -> Result<f64> {
    let cols = rd.cols();
    let center = rd.center_bin();
    let row = rd.magnitude.row(range_bin);

    let mut sorted: Vec<f64> = row.iter().copied().collect();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let median = 0.5 * (sorted[(cols - 1) / 2] + sorted[cols / 2]);
    // A noise-free static row leaves both the median and every non-DC bin at
    // rounding-dust level, making their ratio meaningless. Floor the noise
    // estimate at sqrt(machine epsilon) of the row's largest magnitude so
    // such rows always read as dopplerless.
    let noise_floor = median.max(f64::EPSILON.sqrt() * sorted[cols - 1]);

    let mut best_bin = None;
    let mut best_mag = 0.0_f64;
    for j in 0..cols {
        if j.abs_diff(center) <= 1 {
            continue;
        }
        let mag = row[j];
        let better = mag > best_mag * (1.0 + 1e-12)
            || (mag >= best_mag * (1.0 - 1e-12) && best_bin.is_some_and(|b| j > b && j + b == 2 * center));
        if best_bin.is_none() || better {
            best_bin = Some(j);
            best_mag = mag;
        }
    }
    let best_bin = best_bin.ok_or(Error::NoDopplerPeak)?;
    // <= so an all-zero row (threshold 0) still reads as dopplerless.
    if best_mag <= min_rel_peak * noise_floor {
        return Err(Error::NoDopplerPeak);
    }

    // Dense sub-bin search: evaluate the windowed row's transform magnitude
    // on a fine frequency grid within one bin of the coarse peak.
    let x = rd.slow_time.row(range_bin);
    let coarse_hz = rd.bin_to_hz(best_bin);
    let bin_hz = rd.hz_per_bin();
    let steps = 800;
    let mut best_hz = coarse_hz;
    let mut best_val = 0.0_f64;
    for s in 0..=steps {
        let f = coarse_hz + bin_hz * (2.0 * s as f64 / steps as f64 - 1.0);
        let w = std::f64::consts::TAU * f / rd.prf_hz;
        let mut acc = Complex::new(0.0, 0.0);
        for (p, &v) in x.iter().enumerate() {
            let ph = w * p as f64;
            acc += Complex::new(v * ph.cos(), -v * ph.sin());
        }
        let mag = acc.norm();
        if mag > best_val {
            best_val = mag;
            best_hz = f;
        }
    }
    Ok(best_hz)
}
