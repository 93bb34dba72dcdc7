//! Synthesize a receive capture for the built-in room and save it as WAV + CSV.
//!
//! Run with `cargo run --example simulate`.

use bladesonar::io::write_wav_f32;
use bladesonar::raysim::{simulate_collection, write_events_csv, PathClass, SimOptions};
use bladesonar::scene::default_scene;

fn main() -> bladesonar::Result<()> {
    let (scene, rotation, waveform) = default_scene();
    let sim = simulate_collection(&scene, &rotation, &waveform, SimOptions::default())?;

    let mut direct = 0usize;
    let mut bounced = 0usize;
    let mut nearest_direct = f64::INFINITY;
    let mut farthest_direct = f64::NEG_INFINITY;
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for ev in sim.events.iter().flatten() {
        if ev.path_class == PathClass::Direct {
            direct += 1;
            nearest_direct = nearest_direct.min(ev.one_way_range_m);
            farthest_direct = farthest_direct.max(ev.one_way_range_m);
        } else {
            bounced += 1;
            lo = lo.min(ev.one_way_range_m);
            hi = hi.max(ev.one_way_range_m);
        }
    }

    println!(
        "{} samples over {} pulses at {} Hz PRF ({:.1} Hz spin, {} blades)",
        sim.samples.len(),
        waveform.pulse_count,
        waveform.prf_hz,
        rotation.rate_hz,
        scene.blade_count,
    );
    println!("{direct} direct blade echoes, one-way range {nearest_direct:.4}..{farthest_direct:.4} m");
    println!("{bounced} wall-bounce echoes, one-way range {lo:.4}..{hi:.4} m");

    let dir = std::env::temp_dir().join("bladesonar_examples");
    std::fs::create_dir_all(&dir)?;
    let wav = dir.join("capture.wav");
    write_wav_f32(&wav, &sim.samples, waveform.sample_rate_hz)?;
    let mut csv = Vec::new();
    write_events_csv(&sim, &mut csv)?;
    let table = dir.join("events.csv");
    std::fs::write(&table, csv)?;
    println!("wrote {}", wav.display());
    println!("wrote {}", table.display());
    Ok(())
}
