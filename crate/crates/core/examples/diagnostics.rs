//! Score a reference capture for fingerprinting: how exactly the range
//! profile repeats after one blade period, and how distinct the profiles of
//! well-separated blade angles stay.
//!
//! Run with `cargo run --example diagnostics`.

use bladesonar::fingerprint::{build_reference, profile_diagnostics};
use bladesonar::pulsegrid::{detect_leading_edge, form_matrix, range_gate, range_to_sample};
use bladesonar::raysim::{recommended_sim_gate, simulate_collection, SimOptions};
use bladesonar::scene::default_scene;

fn main() -> bladesonar::Result<()> {
    let (scene, rotation, waveform) = default_scene();
    let sim = simulate_collection(&scene, &rotation, &waveform, SimOptions::default())?;
    let start = detect_leading_edge(&sim.samples, 0.5)?;
    let m = form_matrix(&sim.samples, start, &waveform)?;

    let standoff = scene.sensor_pos.distance(scene.fan_center);
    let target_bin = range_to_sample(standoff, waveform.sample_rate_hz, scene.sound_speed);
    let gate = recommended_sim_gate(&scene, &waveform);
    let reference = build_reference(&m, target_bin, gate)?;
    let full = range_gate(&m, gate)?;

    let (repeatability, margin) = profile_diagnostics(&reference, &full, 2)?;
    println!(
        "spin {:.2} Hz, profile period {:.2} pulses",
        rotation.rate_hz, reference.period_pulses,
    );
    println!("repeatability (period-apart distance / pulse norm): {repeatability:.6}");
    println!("  0 means a pulse one period later is an exact repeat");
    println!("injectivity margin (far-angle distance / same-angle distance): {margin}");
    println!("  above 1 means distinct angles never look closer than a repeat;");
    println!("  noise-free captures make it astronomically large or infinite");
    Ok(())
}
