//! Specular multipath ray tracer and pulsed receive-waveform synthesis.
//!
//! Per pulse, three echo path classes are traced against the frozen blade
//! geometry: the direct perpendicular blade return, and single-wall-bounce
//! paths in both traversal orders (sensor→wall→blade→sensor and its
//! reciprocal). Bounce paths are found with the image-source construction:
//! mirror the sensor across the wall line (and across the blade line for the
//! reciprocal order), intersect the unfolded chord with the reflecting
//! segments, and accept the path only when both specular points land on the
//! physical segments. Echoes carry no noise; amplitudes are reflectivity
//! products (optionally divided by path length).

use crate::error::{Error, Result};
use crate::geom::{Point2, Segment};
use crate::scene::{RotationModel, Scene, WaveformConfig};

/// How an echo reached the sensor.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PathClass {
    /// Perpendicular (normal-incidence) blade return.
    Direct,
    /// Out via a wall bounce, specular blade return straight back.
    WallThenBlade,
    /// Out straight to the blade, back via a wall bounce.
    BladeThenWall,
}

impl PathClass {
    /// Stable lowercase name used in the events CSV.
    pub fn name(self) -> &'static str {
        match self {
            PathClass::Direct => "direct",
            PathClass::WallThenBlade => "wall_then_blade",
            PathClass::BladeThenWall => "blade_then_wall",
        }
    }
}

/// One resolved echo for one pulse.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EchoEvent {
    pub path_class: PathClass,
    /// Wall involved in the bounce; `None` for direct returns.
    pub wall_index: Option<usize>,
    pub blade_index: usize,
    /// Round-trip delay in seconds.
    pub delay_s: f64,
    /// Deposit amplitude (reflectivity product, optionally spread).
    pub amplitude: f64,
    /// Half the round-trip path length, meters.
    pub one_way_range_m: f64,
}

/// An echo plus the geometry it bounced off, for diagnostics and tests.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TracedEcho {
    pub event: EchoEvent,
    /// Specular point on the wall, `None` for direct returns.
    pub wall_point: Option<Point2>,
    /// Specular point on the blade.
    pub blade_point: Point2,
}

/// Simulation switches.
#[derive(Debug, Clone, Copy, Default)]
pub struct SimOptions {
    /// Divide each echo amplitude by its round-trip path length.
    pub spreading_loss: bool,
}

/// A synthesized receive capture: contiguous samples plus per-pulse event lists.
#[derive(Debug, Clone)]
pub struct SimCollection {
    /// Contiguous receive samples through the end of the last pulse's
    /// interval (`round(pulse_count · fs/prf)` of them).
    pub samples: Vec<f64>,
    /// Echo events for each pulse, in trace order.
    pub events: Vec<Vec<EchoEvent>>,
    pub waveform: WaveformConfig,
}

/// Trace every echo path for the pulse transmitted at time `t`, with the
/// specular geometry attached.
pub fn trace_pulse_with_geometry(
    scene: &Scene,
    rotation: &RotationModel,
    t: f64,
) -> Vec<TracedEcho> {
    let sensor = scene.sensor_pos;
    let c = scene.sound_speed;
    let blades = scene.blade_segments(rotation, t);
    let mut out = Vec::new();

    // Direct returns: the perpendicular foot of the sensor must land on the blade.
    for (k, blade) in blades.iter().enumerate() {
        let tp = blade.project_param(sensor);
        if (0.0..=1.0).contains(&tp) {
            let foot = blade.at(tp);
            let range = sensor.distance(foot);
            out.push(TracedEcho {
                event: EchoEvent {
                    path_class: PathClass::Direct,
                    wall_index: None,
                    blade_index: k,
                    delay_s: 2.0 * range / c,
                    amplitude: scene.blade_reflectivity,
                    one_way_range_m: range,
                },
                wall_point: None,
                blade_point: foot,
            });
        }
    }

    let bounce_amp = scene.blade_reflectivity * scene.wall_reflectivity;
    for (w, wall) in scene.walls.iter().enumerate() {
        let wall_seg = wall.segment();
        let sensor_img_wall = wall_seg.mirror(sensor);
        for (k, blade) in blades.iter().enumerate() {
            let sensor_img_blade = blade.mirror(sensor);
            let unfold = Segment::new(sensor_img_wall, sensor_img_blade);

            // Wall-first order: B = blade ∩ unfolded chord, then the wall
            // crossing of the leg from the wall image to B must be physical.
            if let Some((tb, tu)) = blade.line_intersection(unfold) {
                if (0.0..=1.0).contains(&tb) && (0.0..=1.0).contains(&tu) {
                    let b = blade.at(tb);
                    let leg = Segment::new(sensor_img_wall, b);
                    if let Some((tl, tw)) = leg.line_intersection(wall_seg) {
                        if (0.0..=1.0).contains(&tl) && (0.0..=1.0).contains(&tw) {
                            let total = sensor_img_wall.distance(b) + b.distance(sensor);
                            out.push(TracedEcho {
                                event: EchoEvent {
                                    path_class: PathClass::WallThenBlade,
                                    wall_index: Some(w),
                                    blade_index: k,
                                    delay_s: total / c,
                                    amplitude: bounce_amp,
                                    one_way_range_m: total / 2.0,
                                },
                                wall_point: Some(leg.at(tl)),
                                blade_point: b,
                            });
                        }
                    }
                }
            }

            // Blade-first order, built from the blade image instead: W = wall ∩
            // unfolded chord, then the blade crossing of the leg to W must be
            // physical. Same stationary path, independent arithmetic.
            let unfold_rev = Segment::new(sensor_img_blade, sensor_img_wall);
            if let Some((tw, tu)) = wall_seg.line_intersection(unfold_rev) {
                if (0.0..=1.0).contains(&tw) && (0.0..=1.0).contains(&tu) {
                    let w_pt = wall_seg.at(tw);
                    let leg = Segment::new(sensor_img_blade, w_pt);
                    if let Some((tl, tb)) = leg.line_intersection(*blade) {
                        if (0.0..=1.0).contains(&tl) && (0.0..=1.0).contains(&tb) {
                            let total = sensor_img_blade.distance(w_pt) + w_pt.distance(sensor);
                            out.push(TracedEcho {
                                event: EchoEvent {
                                    path_class: PathClass::BladeThenWall,
                                    wall_index: Some(w),
                                    blade_index: k,
                                    delay_s: total / c,
                                    amplitude: bounce_amp,
                                    one_way_range_m: total / 2.0,
                                },
                                wall_point: Some(w_pt),
                                blade_point: leg.at(tl),
                            });
                        }
                    }
                }
            }
        }
    }
    out
}

/// Trace every echo path for the pulse transmitted at time `t`.
pub fn trace_pulse(scene: &Scene, rotation: &RotationModel, t: f64) -> Vec<EchoEvent> {
    trace_pulse_with_geometry(scene, rotation, t)
        .into_iter()
        .map(|te| te.event)
        .collect()
}

/// Synthesize the full receive capture: a unit transmit impulse at each pulse
/// start plus every traced echo, deposited by linear interpolation.
///
/// Pulse starts are quantized to the sample grid (`round(p·fs/prf)`), exactly
/// matching the per-pulse rounding the matrix former uses, so a static scene
/// produces bit-identical pulse columns. Blade angles are evaluated at the
/// nominal pulse times `p/prf`.
pub fn simulate_collection(
    scene: &Scene,
    rotation: &RotationModel,
    waveform: &WaveformConfig,
    options: SimOptions,
) -> Result<SimCollection> {
    scene.validate()?;
    waveform.validate()?;

    let pri_s = 1.0 / waveform.prf_hz;
    let fs = waveform.sample_rate_hz;
    // Capture through the end of the last pulse's interval; with the exact
    // fractional interval this is NOT pulse_count * floor(pri).
    let len = crate::pulsegrid::pulse_start_sample(
        waveform.sample_rate_hz,
        waveform.prf_hz,
        waveform.pulse_count,
    );
    let mut samples = vec![0.0; len];
    let shape = impulse_shape(waveform.impulse_len_samples);
    let mut events = Vec::with_capacity(waveform.pulse_count);

    for p in 0..waveform.pulse_count {
        let start =
            crate::pulsegrid::pulse_start_sample(waveform.sample_rate_hz, waveform.prf_hz, p)
                as i64;
        for (i, &w) in shape.iter().enumerate() {
            deposit(&mut samples, start + i as i64, 0.0, w);
        }

        let t = p as f64 / waveform.prf_hz;
        let mut pulse_events = trace_pulse(scene, rotation, t);
        for ev in &mut pulse_events {
            if ev.delay_s >= pri_s {
                return Err(Error::EventDelayExceedsPri {
                    pulse: p,
                    delay_s: ev.delay_s,
                });
            }
            if options.spreading_loss {
                ev.amplitude /= 2.0 * ev.one_way_range_m;
            }
            // Keep the fast-time offset separate from the integer pulse start:
            // the interpolation weights then depend only on the echo delay, so
            // a static scene yields bit-identical pulses no matter how far
            // into the capture they land.
            let offset = ev.delay_s * fs;
            let whole = offset.floor();
            let frac = offset - whole;
            let base = start + whole as i64;
            for (i, &w) in shape.iter().enumerate() {
                deposit(&mut samples, base + i as i64, frac, ev.amplitude * w);
            }
        }
        events.push(pulse_events);
    }

    Ok(SimCollection {
        samples,
        events,
        waveform: *waveform,
    })
}

/// Peak-first linear-decay transmit shape; the leading sample is the unit peak,
/// so threshold sync lands exactly on the pulse start.
fn impulse_shape(len: usize) -> Vec<f64> {
    (0..len).map(|i| 1.0 - i as f64 / len as f64).collect()
}

/// Split `value` across samples `i` and `i+1` with fractional weight `frac`.
fn deposit(samples: &mut [f64], i: i64, frac: f64, value: f64) {
    if i >= 0 && (i as usize) < samples.len() {
        samples[i as usize] += value * (1.0 - frac);
    }
    let j = i + 1;
    if j >= 0 && (j as usize) < samples.len() && frac != 0.0 {
        samples[j as usize] += value * frac;
    }
}

/// Sorted one-way ranges of the non-direct (wall bounce) events, per pulse.
pub fn multipath_range_timeseries(sim: &SimCollection) -> Vec<Vec<f64>> {
    sim.events
        .iter()
        .map(|pulse| {
            let mut ranges: Vec<f64> = pulse
                .iter()
                .filter(|e| e.path_class != PathClass::Direct)
                .map(|e| e.one_way_range_m)
                .collect();
            ranges.sort_by(|a, b| a.partial_cmp(b).unwrap());
            ranges
        })
        .collect()
}

/// Range gate that keeps the direct blade echo and everything behind it:
/// five fast-time samples ahead of the sensor-to-fan-center bin.
pub fn recommended_sim_gate(scene: &Scene, waveform: &WaveformConfig) -> usize {
    let d = scene.sensor_pos.distance(scene.fan_center);
    let bin = (2.0 * d * waveform.sample_rate_hz / scene.sound_speed).round() as usize;
    bin.saturating_sub(5)
}

/// Write the per-pulse event table as CSV
/// (`pulse,class,wall,blade,delay_s,amplitude,range_m`).
pub fn write_events_csv<W: std::io::Write>(sim: &SimCollection, out: &mut W) -> Result<()> {
    writeln!(out, "pulse,class,wall,blade,delay_s,amplitude,range_m")?;
    for (p, pulse) in sim.events.iter().enumerate() {
        for e in pulse {
            let wall = e.wall_index.map(|w| w.to_string()).unwrap_or_default();
            writeln!(
                out,
                "{},{},{},{},{},{},{}",
                p,
                e.path_class.name(),
                wall,
                e.blade_index,
                e.delay_s,
                e.amplitude,
                e.one_way_range_m
            )?;
        }
    }
    Ok(())
}
