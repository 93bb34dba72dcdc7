//! Form a pulse matrix and locate the blade-pass line in the range–doppler map.
//!
//! Run with `cargo run --example range_doppler`.

use bladesonar::io::write_pgm_log;
use bladesonar::pulsegrid::{detect_leading_edge, form_matrix, range_to_sample};
use bladesonar::raysim::{simulate_collection, SimOptions};
use bladesonar::rdmap::{doppler_peak_at_range, range_doppler, DEFAULT_MIN_REL_PEAK};
use bladesonar::scene::default_scene;

fn main() -> bladesonar::Result<()> {
    let (scene, rotation, waveform) = default_scene();
    let sim = simulate_collection(&scene, &rotation, &waveform, SimOptions::default())?;

    // The transmit impulse leads each pulse, so the edge detector syncs the
    // matrix to the first pulse start (index 0 for a synthetic capture).
    let start = detect_leading_edge(&sim.samples, 0.5)?;
    let m = form_matrix(&sim.samples, start, &waveform)?;
    let rd = range_doppler(&m);
    println!(
        "map: {} range bins x {} doppler bins, {:.4} Hz per bin",
        rd.rows(),
        rd.cols(),
        rd.hz_per_bin(),
    );

    let standoff = scene.sensor_pos.distance(scene.fan_center);
    let bin = range_to_sample(standoff, waveform.sample_rate_hz, scene.sound_speed);
    let peak_hz = doppler_peak_at_range(&rd, bin, DEFAULT_MIN_REL_PEAK)?;
    println!(
        "strongest line at range bin {bin} ({standoff:.2} m): {peak_hz:.4} Hz \
         = {:.2} pulses per blade pass",
        waveform.prf_hz / peak_hz.abs(),
    );
    println!(
        "blade passes per rotation: {}; implied spin rate {:.4} Hz",
        scene.blade_count,
        peak_hz.abs() / scene.blade_count as f64,
    );

    let dir = std::env::temp_dir().join("bladesonar_examples");
    std::fs::create_dir_all(&dir)?;
    let pgm = dir.join("range_doppler.pgm");
    write_pgm_log(&pgm, &rd.magnitude)?;
    println!("wrote {}", pgm.display());
    Ok(())
}
