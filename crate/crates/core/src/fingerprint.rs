//! Angular fingerprinting: match pulses of a second collection to a
//! one-period reference block in the energy norm, smooth the match trace
//! with a slew-limited Kalman filter, and read relative rotation direction
//! and rate off the trace's slope.

use crate::error::{Error, Result};
use crate::pulsegrid::{range_gate, PulseMatrix};
use crate::rdmap::{doppler_peak_at_range, range_doppler, DEFAULT_MIN_REL_PEAK};
use ndarray::Array2;
use std::fmt;
use std::io::Write as _;
use std::path::Path;

/// Post-filter limit on per-pulse position change, in reference pulses.
pub const DEFAULT_SLEW_LIMIT: f64 = 4.0;
/// Process noise for the constant-velocity filter (pulses^2 per step).
pub const DEFAULT_PROCESS_NOISE: f64 = 0.1;
/// Measurement noise for the filter (pulses^2).
pub const DEFAULT_MEASUREMENT_NOISE: f64 = 1.0;
/// Dead zone half-width for the direction verdict.
pub const DEFAULT_VERDICT_EPSILON: f64 = 0.1;

/// Relative rotation direction read off the fingerprint slope.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    SameDirection,
    OppositeDirection,
    Indeterminate,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::SameDirection => "same_direction",
            Verdict::OppositeDirection => "opposite_direction",
            Verdict::Indeterminate => "indeterminate",
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A gated block of pulses spanning exactly one profile period.
#[derive(Debug, Clone)]
pub struct ReferenceBlock {
    /// round(period_pulses) consecutive gated pulses.
    pub pulses: PulseMatrix,
    /// Profile period in pulses (prf / blade-pass frequency).
    pub period_pulses: f64,
    /// Index of the first stored pulse in the source collection.
    pub start_pulse: usize,
}

/// Per-pulse nearest-reference assignment plus the full distance matrix.
#[derive(Debug, Clone)]
pub struct MatchTrace {
    /// raw_match[j] = argmin of row j of the distance matrix (first on ties).
    pub raw_match: Vec<usize>,
    /// rows = second-collection pulses, cols = reference pulses.
    pub distance_matrix: Array2<f64>,
    /// Pulse rates of the two collections, for slope normalization.
    pub reference_prf_hz: f64,
    pub second_prf_hz: f64,
}

/// Smoothed angular trajectory and its direction reading.
#[derive(Debug, Clone)]
pub struct AngularFingerprint {
    /// Unwrapped reference coordinate per second-collection pulse.
    pub filtered: Vec<f64>,
    /// Reference pulses advanced per second-collection pulse, normalized by
    /// the PRI ratio; its magnitude approximates the rotation-rate ratio.
    pub slope: f64,
    pub verdict: Verdict,
}

/// Estimate the profile period from the doppler peak at the target's range,
/// then store one period of range-gated pulses starting at the first pulse.
///
/// `target_range_bin` indexes the rows of `m` as given; `gate_samples` rows
/// are then dropped from the front of the stored block. The source must
/// cover at least two periods so period-apart repeatability is checkable.
pub fn build_reference(
    m: &PulseMatrix,
    target_range_bin: usize,
    gate_samples: usize,
) -> Result<ReferenceBlock> {
    let rd = range_doppler(m);
    let peak_hz = doppler_peak_at_range(&rd, target_range_bin, DEFAULT_MIN_REL_PEAK)?;
    let period_pulses = m.prf_hz / peak_hz.abs();
    let block = period_pulses.round() as usize;
    if block == 0 {
        return Err(Error::Config(format!(
            "profile period {period_pulses} pulses rounds to zero"
        )));
    }
    if m.cols() < 2 * block {
        return Err(Error::CollectionTooShort {
            needed: 2 * block,
            available: m.cols(),
        });
    }
    let gated = range_gate(m, gate_samples)?;
    let data = gated.data.slice(ndarray::s![.., 0..block]).to_owned();
    Ok(ReferenceBlock {
        pulses: PulseMatrix { data, ..gated },
        period_pulses,
        start_pulse: 0,
    })
}

/// Match every pulse of `second` to its nearest reference pulse in the
/// energy norm (Euclidean distance over the gated samples).
///
/// `second` must carry the same range gate and row count as the reference.
pub fn match_pulses(reference: &ReferenceBlock, second: &PulseMatrix) -> Result<MatchTrace> {
    let ref_m = &reference.pulses;
    if second.gate_start_sample != ref_m.gate_start_sample || second.rows() != ref_m.rows() {
        return Err(Error::GateMismatch);
    }
    let rows = second.cols();
    let cols = ref_m.cols();
    let n = ref_m.rows();
    let mut distance_matrix = Array2::zeros((rows, cols));
    let mut raw_match = Vec::with_capacity(rows);
    for j in 0..rows {
        let mut best = 0usize;
        let mut best_d = f64::INFINITY;
        for i in 0..cols {
            let mut ss = 0.0;
            for k in 0..n {
                let d = second.data[(k, j)] - ref_m.data[(k, i)];
                ss += d * d;
            }
            let d = ss.sqrt();
            distance_matrix[(j, i)] = d;
            if d < best_d {
                best_d = d;
                best = i;
            }
        }
        raw_match.push(best);
    }
    Ok(MatchTrace {
        raw_match,
        distance_matrix,
        reference_prf_hz: ref_m.prf_hz,
        second_prf_hz: second.prf_hz,
    })
}

/// Kalman-smooth a match trace into an unwrapped angular trajectory.
///
/// Each raw match is first mapped to the representative within half a period
/// of the filter's prediction (circular unwrapping), then fed to a scalar
/// constant-velocity filter; the posterior position step is clamped to
/// `slew_limit`. The slope is fit by least squares on the filtered positions
/// past a one-period burn-in and normalized by the PRI ratio of the two
/// collections.
pub fn smooth(
    trace: &MatchTrace,
    period_pulses: f64,
    slew_limit: f64,
    process_noise: f64,
    measurement_noise: f64,
) -> AngularFingerprint {
    debug_assert!(slew_limit > 0.0);
    let n = trace.raw_match.len();
    let mut filtered = Vec::with_capacity(n);
    if n == 0 {
        return AngularFingerprint {
            filtered,
            slope: 0.0,
            verdict: Verdict::Indeterminate,
        };
    }

    // State [position, velocity]; discrete white-noise-acceleration process
    // covariance at unit step.
    let q = process_noise;
    let (q00, q01, q11) = (0.25 * q, 0.5 * q, q);
    let r = measurement_noise;
    let mut x0 = trace.raw_match[0] as f64;
    let mut x1 = 0.0;
    let (mut p00, mut p01, mut p10, mut p11) = (1e3, 0.0, 0.0, 1e3);
    filtered.push(x0);

    for j in 1..n {
        // Predict.
        let xp0 = x0 + x1;
        let xp1 = x1;
        let a00 = p00 + p01 + p10 + p11 + q00;
        let a01 = p01 + p11 + q01;
        let a10 = p10 + p11 + q01;
        let a11 = p11 + q11;

        // Unwrap the measurement against the prediction.
        let raw = trace.raw_match[j] as f64;
        let meas = raw + period_pulses * ((xp0 - raw) / period_pulses).round();

        // Update.
        let s = a00 + r;
        let k0 = a00 / s;
        let k1 = a10 / s;
        let innovation = meas - xp0;
        x0 = xp0 + k0 * innovation;
        x1 = xp1 + k1 * innovation;
        p00 = (1.0 - k0) * a00;
        p01 = (1.0 - k0) * a01;
        p10 = a10 - k1 * a00;
        p11 = a11 - k1 * a01;

        // Slew-limit the posterior position; the filter continues from the
        // clamped value.
        let prev = filtered[j - 1];
        x0 = x0.clamp(prev - slew_limit, prev + slew_limit);
        filtered.push(x0);
    }

    let burn_in = (period_pulses.round() as usize).min(n / 2);
    let slope_raw = least_squares_slope(&filtered[burn_in..]);
    let slope = slope_raw * trace.second_prf_hz / trace.reference_prf_hz;
    AngularFingerprint {
        filtered,
        slope,
        verdict: verdict(slope, DEFAULT_VERDICT_EPSILON),
    }
}

/// Slope of the least-squares line through (index, value) pairs.
fn least_squares_slope(values: &[f64]) -> f64 {
    let n = values.len();
    if n < 2 {
        return 0.0;
    }
    let nf = n as f64;
    let x_mean = (nf - 1.0) / 2.0;
    let y_mean = values.iter().sum::<f64>() / nf;
    let mut num = 0.0;
    let mut den = 0.0;
    for (i, &y) in values.iter().enumerate() {
        let dx = i as f64 - x_mean;
        num += dx * (y - y_mean);
        den += dx * dx;
    }
    num / den
}

/// Direction reading: positive slopes beyond the dead zone agree with the
/// reference rotation, negative ones oppose it.
pub fn verdict(slope: f64, epsilon: f64) -> Verdict {
    debug_assert!(epsilon > 0.0);
    if slope > epsilon {
        Verdict::SameDirection
    } else if slope < -epsilon {
        Verdict::OppositeDirection
    } else {
        Verdict::Indeterminate
    }
}

/// Profile quality diagnostics.
///
/// Repeatability: median energy-norm distance between pulses one period
/// apart in `full`, normalized by the median pulse norm (0 = perfectly
/// repeatable). Injectivity margin: minimum distance between reference
/// pulses more than `separation` apart (circularly) divided by the maximum
/// period-apart distance in `full`; a margin above 1 means distant angles
/// stay farther apart than any same-angle revisit. 0/0 reads as 0 and x/0
/// as infinity.
pub fn profile_diagnostics(
    reference: &ReferenceBlock,
    full: &PulseMatrix,
    separation: usize,
) -> Result<(f64, f64)> {
    let ref_m = &reference.pulses;
    if full.gate_start_sample != ref_m.gate_start_sample || full.rows() != ref_m.rows() {
        return Err(Error::GateMismatch);
    }
    let period = reference.period_pulses.round() as usize;
    if full.cols() < period + 1 {
        return Err(Error::CollectionTooShort {
            needed: period + 1,
            available: full.cols(),
        });
    }

    let col_dist = |m: &PulseMatrix, a: usize, o: &PulseMatrix, b: usize| -> f64 {
        let mut ss = 0.0;
        for k in 0..m.rows() {
            let d = m.data[(k, a)] - o.data[(k, b)];
            ss += d * d;
        }
        ss.sqrt()
    };

    let mut cross: Vec<f64> = (0..full.cols() - period)
        .map(|j| col_dist(full, j, full, j + period))
        .collect();
    cross.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let median_cross = 0.5 * (cross[(cross.len() - 1) / 2] + cross[cross.len() / 2]);
    let max_cross = *cross.last().unwrap();

    let mut norms: Vec<f64> = (0..full.cols())
        .map(|j| {
            let mut ss = 0.0;
            for k in 0..full.rows() {
                ss += full.data[(k, j)] * full.data[(k, j)];
            }
            ss.sqrt()
        })
        .collect();
    norms.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let median_norm = 0.5 * (norms[(norms.len() - 1) / 2] + norms[norms.len() / 2]);
    let repeatability = if median_cross == 0.0 {
        0.0
    } else if median_norm == 0.0 {
        f64::INFINITY
    } else {
        median_cross / median_norm
    };

    let cols = ref_m.cols();
    let mut min_far = f64::INFINITY;
    for a in 0..cols {
        for b in (a + 1)..cols {
            let sep = (b - a).min(cols - (b - a));
            if sep > separation {
                min_far = min_far.min(col_dist(ref_m, a, ref_m, b));
            }
        }
    }
    let margin = if min_far == 0.0 {
        0.0
    } else if max_cross == 0.0 {
        if min_far.is_finite() {
            f64::INFINITY
        } else {
            0.0
        }
    } else {
        min_far / max_cross
    };
    Ok((repeatability, margin))
}

/// One-call pipeline: gate the second collection like the reference, match,
/// and smooth with the default filter parameters.
pub fn fingerprint_against(
    reference: &ReferenceBlock,
    second_ungated: &PulseMatrix,
    gate_samples: usize,
) -> Result<(MatchTrace, AngularFingerprint)> {
    let gated = range_gate(second_ungated, gate_samples)?;
    let trace = match_pulses(reference, &gated)?;
    let fp = smooth(
        &trace,
        reference.period_pulses,
        DEFAULT_SLEW_LIMIT,
        DEFAULT_PROCESS_NOISE,
        DEFAULT_MEASUREMENT_NOISE,
    );
    Ok((trace, fp))
}

/// Write the trajectory as CSV: `pulse,raw_match,filtered`.
pub fn write_fingerprint_csv(
    path: &Path,
    trace: &MatchTrace,
    fp: &AngularFingerprint,
) -> Result<()> {
    let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
    writeln!(f, "pulse,raw_match,filtered")?;
    for (j, (&raw, &filt)) in trace.raw_match.iter().zip(fp.filtered.iter()).enumerate() {
        writeln!(f, "{j},{raw},{filt}")?;
    }
    Ok(())
}

/// The single-line verdict report printed on standard output.
pub fn verdict_line(fp: &AngularFingerprint) -> String {
    format!("{{\"slope\": {}, \"verdict\": \"{}\"}}", fp.slope, fp.verdict)
}
