//! Back-project a capture into a rotor-plane image and find the blade ridges.
//!
//! Run with `cargo run --example isar_image` (release mode is much faster).

use bladesonar::io::write_pgm_log;
use bladesonar::isar::backproject;
use bladesonar::pulsegrid::{detect_leading_edge, form_matrix};
use bladesonar::raysim::{simulate_collection, SimOptions};
use bladesonar::scene::default_scene;

fn main() -> bladesonar::Result<()> {
    let (scene, rotation, waveform) = default_scene();
    let sim = simulate_collection(&scene, &rotation, &waveform, SimOptions::default())?;
    let start = detect_leading_edge(&sim.samples, 0.5)?;
    let m = form_matrix(&sim.samples, start, &waveform)?;

    let img = backproject(&m, &scene, rotation.rate_hz, scene.blade_length, 201)?;
    println!(
        "image: {0}x{0} px, {1:.2} mm per px, {2:.2} m square",
        img.side(),
        img.pixel_pitch_m * 1e3,
        2.0 * img.extent_m,
    );

    // Angular brightness profile on a ring at half blade length: one ridge
    // per blade when the assumed spin rate matches the true one.
    let radius = 0.5 * scene.blade_length;
    let c = img.center() as f64;
    let profile: Vec<f64> = (0..360)
        .map(|deg| {
            let theta = (deg as f64).to_radians();
            let ix = (c + radius * theta.cos() / img.pixel_pitch_m).round() as usize;
            let iy = (c + radius * theta.sin() / img.pixel_pitch_m).round() as usize;
            img.pixels[(iy, ix)]
        })
        .collect();
    let mut sorted = profile.clone();
    sorted.sort_by(f64::total_cmp);
    let median = 0.5 * (sorted[179] + sorted[180]);

    let n = profile.len();
    let mut ridges = Vec::new();
    for i in 0..n {
        let (prev, next) = (profile[(i + n - 1) % n], profile[(i + 1) % n]);
        if profile[i] > prev && profile[i] >= next && profile[i] >= 2.0 * median {
            ridges.push(i);
        }
    }
    println!("ring at {radius:.2} m: median brightness {median:.3}");
    println!("{} blade ridges (expected {}):", ridges.len(), scene.blade_count);
    for &deg in &ridges {
        println!("  {deg:3}°  {:.1}x median", profile[deg] / median);
    }

    let dir = std::env::temp_dir().join("bladesonar_examples");
    std::fs::create_dir_all(&dir)?;
    let pgm = dir.join("isar.pgm");
    write_pgm_log(&pgm, &img.pixels)?;
    println!("wrote {}", pgm.display());
    Ok(())
}
