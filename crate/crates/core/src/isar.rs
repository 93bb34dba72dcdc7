//! Time-domain backprojection into a frame rotating with the fan, and the
//! rotation-direction ambiguity check that motivates fingerprinting.

use crate::error::{Error, Result};
use crate::pulsegrid::PulseMatrix;
use crate::scene::Scene;
use ndarray::Array2;
use rustfft::num_complex::Complex;
use rustfft::FftPlanner;
use std::f64::consts::TAU;

/// Backprojected image of the scene in the rotating target frame.
#[derive(Debug, Clone)]
pub struct IsarImage {
    /// Square pixel grid, `pixels[(iy, ix)]`, odd side, fan center at the
    /// middle pixel; every value is a nonnegative accumulated envelope.
    pub pixels: Array2<f64>,
    /// Half-width of the imaged square in meters.
    pub extent_m: f64,
    pub pixel_pitch_m: f64,
    pub assumed_rate_hz: f64,
}

impl IsarImage {
    pub fn side(&self) -> usize {
        self.pixels.nrows()
    }

    /// Index of the center pixel on either axis.
    pub fn center(&self) -> usize {
        self.side() / 2
    }
}

/// Per-pulse envelopes: magnitude of the analytic signal of each fast-time
/// column, computed with a frequency-domain quadrature transformer.
fn envelope_columns(m: &PulseMatrix) -> Array2<f64> {
    let n = m.rows();
    let pulses = m.cols();
    let mut planner = FftPlanner::new();
    let fwd = planner.plan_fft_forward(n);
    let inv = planner.plan_fft_inverse(n);
    let mut out = Array2::zeros((n, pulses));
    let mut buf = vec![Complex::new(0.0, 0.0); n];
    for p in 0..pulses {
        for i in 0..n {
            buf[i] = Complex::new(m.data[(i, p)], 0.0);
        }
        fwd.process(&mut buf);
        // Keep DC (and Nyquist for even n), double positive frequencies,
        // zero negative frequencies: the analytic-signal spectrum.
        for (k, v) in buf.iter_mut().enumerate() {
            if k == 0 || (n % 2 == 0 && k == n / 2) {
                // unchanged
            } else if k < n.div_ceil(2) {
                *v *= 2.0;
            } else {
                *v = Complex::new(0.0, 0.0);
            }
        }
        inv.process(&mut buf);
        let scale = 1.0 / n as f64;
        for i in 0..n {
            out[(i, p)] = buf[i].norm() * scale;
        }
    }
    out
}

/// Linearly interpolated envelope of pulse `p` at fractional fast-time row
/// `s`; `None` outside the matrix.
fn sample_envelope(env: &Array2<f64>, p: usize, s: f64) -> Option<f64> {
    let rows = env.nrows();
    if !(0.0..=(rows - 1) as f64).contains(&s) {
        return None;
    }
    let i0 = s.floor() as usize;
    let frac = s - i0 as f64;
    if frac == 0.0 {
        return Some(env[(i0, p)]);
    }
    if i0 + 1 >= rows {
        return None;
    }
    Some(env[(i0, p)] * (1.0 - frac) + env[(i0 + 1, p)] * frac)
}

/// Backproject the pulse matrix into a frame rotating at `assumed_rate_hz`
/// about the fan center.
///
/// For each pixel offset q and each pulse p (blade angles advance at the
/// nominal pulse times p/prf, matching the simulator), q is rotated into the
/// world frame, the round-trip delay from the sensor is converted to a
/// fast-time row, and the pulse's envelope is accumulated at that row via
/// linear interpolation.
///
/// Errors: `ZeroRotationRate` for a zero assumed rate; `Config` for a
/// non-odd or tiny pixel count or nonpositive extent; `DelayOutOfGate` if
/// the image-center delay misses the matrix rows for more than half the
/// pulses (a mis-specified geometry or gate).
pub fn backproject(
    m: &PulseMatrix,
    scene: &Scene,
    assumed_rate_hz: f64,
    extent_m: f64,
    pixels_per_side: usize,
) -> Result<IsarImage> {
    if assumed_rate_hz == 0.0 {
        return Err(Error::ZeroRotationRate);
    }
    if pixels_per_side < 3 || pixels_per_side % 2 == 0 {
        return Err(Error::Config(format!(
            "pixels_per_side must be an odd integer >= 3, got {pixels_per_side}"
        )));
    }
    if !(extent_m > 0.0) {
        return Err(Error::Config(format!(
            "image extent must be positive, got {extent_m}"
        )));
    }

    let rows = m.rows();
    let pulses = m.cols();
    let fs = m.sample_rate_hz;
    let c_sound = scene.sound_speed;
    let gate = m.gate_start_sample as f64;
    let sensor = scene.sensor_pos;
    let fan = scene.fan_center;

    // The center pixel is the rotation fixed point: its delay must land in
    // the gated rows for most pulses or the geometry/gate is mis-specified.
    let center_s = 2.0 * fan.distance(sensor) / c_sound * fs - gate;
    let center_misses = (0..pulses)
        .filter(|_| !(0.0..=(rows - 1) as f64).contains(&center_s))
        .count();
    if 2 * center_misses > pulses {
        return Err(Error::DelayOutOfGate);
    }

    let env = envelope_columns(m);
    let side = pixels_per_side;
    let center = (side / 2) as i64;
    let pitch = 2.0 * extent_m / (side - 1) as f64;
    let rotations: Vec<(f64, f64)> = (0..pulses)
        .map(|p| {
            let theta = TAU * assumed_rate_hz * p as f64 / m.prf_hz;
            (theta.cos(), theta.sin())
        })
        .collect();

    let mut pixels = Array2::zeros((side, side));
    for iy in 0..side {
        let qy = (iy as i64 - center) as f64 * pitch;
        for ix in 0..side {
            let qx = (ix as i64 - center) as f64 * pitch;
            let mut acc = 0.0;
            for (p, &(ct, st)) in rotations.iter().enumerate() {
                let wx = fan.x + ct * qx - st * qy;
                let wy = fan.y + st * qx + ct * qy;
                let dx = wx - sensor.x;
                let dy = wy - sensor.y;
                let d = (dx * dx + dy * dy).sqrt();
                let s = 2.0 * d / c_sound * fs - gate;
                if let Some(v) = sample_envelope(&env, p, s) {
                    acc += v;
                }
            }
            pixels[(iy, ix)] = acc;
        }
    }

    Ok(IsarImage {
        pixels,
        extent_m,
        pixel_pitch_m: pitch,
        assumed_rate_hz,
    })
}

/// Maximum mean-subtracted normalized cross-correlation between `a` and `b`
/// over trial rotations of `b` (0.5-degree grid, full circle), evaluated on
/// the disk inscribed in the pixel grid and clamped to [0, 1].
pub fn rotation_search_correlation(a: &IsarImage, b: &IsarImage) -> Result<f64> {
    let side = a.side();
    if b.side() != side {
        return Err(Error::Config(format!(
            "image sizes differ: {} vs {}",
            side,
            b.side()
        )));
    }
    let c = (side / 2) as f64;
    // One pixel of margin keeps every rotated sample's bilinear neighborhood
    // inside the grid.
    let radius = c - 1.0;
    let mut offsets = Vec::new();
    let mut a_vals = Vec::new();
    for iy in 0..side {
        for ix in 0..side {
            let dx = ix as f64 - c;
            let dy = iy as f64 - c;
            if dx * dx + dy * dy <= radius * radius {
                offsets.push((dx, dy));
                a_vals.push(a.pixels[(iy, ix)]);
            }
        }
    }
    let n = a_vals.len() as f64;
    let a_mean = a_vals.iter().sum::<f64>() / n;
    let a_dev: Vec<f64> = a_vals.iter().map(|v| v - a_mean).collect();
    let a_ss: f64 = a_dev.iter().map(|v| v * v).sum();

    let steps = 720;
    let mut best = 0.0_f64;
    let mut b_vals = vec![0.0; offsets.len()];
    for k in 0..steps {
        let phi = TAU * k as f64 / steps as f64;
        let (cp, sp) = (phi.cos(), phi.sin());
        for (i, &(dx, dy)) in offsets.iter().enumerate() {
            let x = c + cp * dx - sp * dy;
            let y = c + sp * dx + cp * dy;
            let x0 = x.floor();
            let y0 = y.floor();
            let fx = x - x0;
            let fy = y - y0;
            let (ix, iy) = (x0 as usize, y0 as usize);
            let at = |yy: usize, xx: usize| -> f64 {
                if yy < side && xx < side {
                    b.pixels[(yy, xx)]
                } else {
                    0.0
                }
            };
            b_vals[i] = at(iy, ix) * (1.0 - fx) * (1.0 - fy)
                + at(iy, ix + 1) * fx * (1.0 - fy)
                + at(iy + 1, ix) * (1.0 - fx) * fy
                + at(iy + 1, ix + 1) * fx * fy;
        }
        let b_mean = b_vals.iter().sum::<f64>() / n;
        let mut dot = 0.0;
        let mut b_ss = 0.0;
        for (i, bv) in b_vals.iter().enumerate() {
            let bd = bv - b_mean;
            dot += a_dev[i] * bd;
            b_ss += bd * bd;
        }
        if a_ss > 0.0 && b_ss > 0.0 {
            best = best.max(dot / (a_ss * b_ss).sqrt());
        }
    }
    Ok(best.clamp(0.0, 1.0))
}

/// Form images at `+rate_hz` and `-rate_hz` and return their peak
/// rotation-search correlation — near 1 when the data cannot distinguish the
/// spin directions (the monostatic ambiguity).
pub fn direction_ambiguity_check(m: &PulseMatrix, scene: &Scene, rate_hz: f64) -> Result<f64> {
    direction_ambiguity_check_sized(m, scene, rate_hz, scene.blade_length, 101)
}

/// [`direction_ambiguity_check`] with explicit image extent and size.
pub fn direction_ambiguity_check_sized(
    m: &PulseMatrix,
    scene: &Scene,
    rate_hz: f64,
    extent_m: f64,
    pixels_per_side: usize,
) -> Result<f64> {
    let forward = backproject(m, scene, rate_hz, extent_m, pixels_per_side)?;
    let reverse = backproject(m, scene, -rate_hz, extent_m, pixels_per_side)?;
    rotation_search_correlation(&forward, &reverse)
}
