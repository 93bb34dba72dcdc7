//! Compare two captures of the same fan and decide whether it spins the same
//! way in both, and how much faster, from the per-pulse range profiles alone.
//!
//! Run with `cargo run --example fingerprint`.

use bladesonar::fingerprint::{build_reference, fingerprint_against, write_fingerprint_csv};
use bladesonar::pulsegrid::{detect_leading_edge, form_matrix, range_to_sample, PulseMatrix};
use bladesonar::raysim::{recommended_sim_gate, simulate_collection, SimOptions};
use bladesonar::scene::{default_scene, RotationModel};

fn capture(rate_hz: f64) -> bladesonar::Result<PulseMatrix> {
    let (scene, rotation, waveform) = default_scene();
    let rotation = RotationModel::new(rate_hz, rotation.initial_angle_rad);
    let sim = simulate_collection(&scene, &rotation, &waveform, SimOptions::default())?;
    let start = detect_leading_edge(&sim.samples, 0.5)?;
    form_matrix(&sim.samples, start, &waveform)
}

fn main() -> bladesonar::Result<()> {
    let (scene, _, waveform) = default_scene();
    let standoff = scene.sensor_pos.distance(scene.fan_center);
    let target_bin = range_to_sample(standoff, waveform.sample_rate_hz, scene.sound_speed);
    let gate = recommended_sim_gate(&scene, &waveform);

    // Reference capture: 1/3 Hz, positive spin.
    let reference_rate = 1.0 / 3.0;
    let m_ref = capture(reference_rate)?;
    let reference = build_reference(&m_ref, target_bin, gate)?;
    println!(
        "reference: {:.4} Hz spin, profile period {:.2} pulses",
        reference_rate, reference.period_pulses,
    );

    let dir = std::env::temp_dir().join("bladesonar_examples");
    std::fs::create_dir_all(&dir)?;

    for (label, rate) in [("same direction", 0.5), ("opposite direction", -0.5)] {
        let second = capture(rate)?;
        let (trace, fp) = fingerprint_against(&reference, &second, gate)?;
        println!(
            "{label} at {rate:+.2} Hz -> slope {:+.4} (true ratio {:+.2}), verdict {}",
            fp.slope,
            rate / reference_rate,
            fp.verdict,
        );
        let csv = dir.join(format!("trajectory_{}.csv", label.replace(' ', "_")));
        write_fingerprint_csv(&csv, &trace, &fp)?;
        println!("  wrote {}", csv.display());
    }
    Ok(())
}
