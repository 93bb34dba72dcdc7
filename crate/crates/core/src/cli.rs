//! Command-line front end chaining the pipeline end to end.
//!
//! Subcommands: `simulate`, `rd`, `isar`, `fingerprint`, `diagnose`.
//! Exit codes: 0 success, 2 usage/configuration problems, 3 data-quality
//! failures (e.g. no doppler line, capture too short).

use crate::error::{Error, Result};
use crate::fingerprint::{
    build_reference, fingerprint_against, profile_diagnostics, verdict_line,
    write_fingerprint_csv,
};
use crate::io::{read_wav_expecting, write_pdmx, write_pgm_log, write_wav_f32};
use crate::isar::{backproject, direction_ambiguity_check};
use crate::pulsegrid::{
    detect_leading_edge, form_matrix, range_gate, range_to_sample, truncate_rows, PulseMatrix,
};
use crate::rdmap::{range_doppler_windowed, Window};
use crate::raysim::{simulate_collection, SimOptions};
use crate::scene::{default_scene, RotationModel, Scene, WaveformConfig};
use crate::scene::Wall;
use clap::error::ErrorKind;
use clap::{Parser, Subcommand, ValueEnum};
use ndarray::Array2;
use std::collections::BTreeMap;
use std::ffi::OsString;
use std::io::Write as _;
use std::path::{Path, PathBuf};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_DATA: i32 = 3;

/// Fully resolved run parameters: library defaults overlaid with the
/// key=value config file.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub scene: Scene,
    pub rotation: RotationModel,
    pub waveform: WaveformConfig,
}

impl RunConfig {
    /// Fast-time bin of the fan center's round-trip delay.
    pub fn target_range_bin(&self) -> usize {
        let d = self.scene.fan_center.distance(self.scene.sensor_pos);
        range_to_sample(d, self.waveform.sample_rate_hz, self.scene.sound_speed)
    }

    /// Default fingerprint gate: everything strictly before the target bin,
    /// with a five-sample guard.
    pub fn default_gate(&self) -> usize {
        self.target_range_bin().saturating_sub(5)
    }
}

impl Default for RunConfig {
    fn default() -> Self {
        let (scene, rotation, waveform) = default_scene();
        RunConfig {
            scene,
            rotation,
            waveform,
        }
    }
}

/// Parse a key=value config (one pair per line, `#` comments) over the
/// defaults. Unknown keys and incomplete wall definitions are errors that
/// name the offending key.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let mut cfg = RunConfig::default();
    let mut wall_fields: BTreeMap<usize, [Option<f64>; 4]> = BTreeMap::new();

    for (lineno, raw_line) in text.lines().enumerate() {
        let line = match raw_line.find('#') {
            Some(i) => &raw_line[..i],
            None => raw_line,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            Error::Config(format!("line {}: expected key=value", lineno + 1))
        })?;
        let key = key.trim();
        let value = value.trim();
        let num = || -> Result<f64> {
            value
                .parse::<f64>()
                .map_err(|_| Error::Config(format!("invalid value for {key}: {value}")))
        };
        let int = || -> Result<usize> {
            value
                .parse::<usize>()
                .map_err(|_| Error::Config(format!("invalid value for {key}: {value}")))
        };

        if let Some(rest) = key.strip_prefix("wall.") {
            let mut parts = rest.splitn(2, '.');
            let idx: usize = parts
                .next()
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| Error::Config(format!("unknown config key: {key}")))?;
            let field = parts.next().unwrap_or("");
            let slot = match field {
                "ax" => 0,
                "ay" => 1,
                "bx" => 2,
                "by" => 3,
                _ => return Err(Error::Config(format!("unknown config key: {key}"))),
            };
            wall_fields.entry(idx).or_default()[slot] = Some(num()?);
            continue;
        }

        match key {
            "sensor.x" => cfg.scene.sensor_pos.x = num()?,
            "sensor.y" => cfg.scene.sensor_pos.y = num()?,
            "fan.x" => cfg.scene.fan_center.x = num()?,
            "fan.y" => cfg.scene.fan_center.y = num()?,
            "blades" => cfg.scene.blade_count = int()?,
            "blade_len" => cfg.scene.blade_length = num()?,
            "blade_pitch_deg" => cfg.scene.blade_pitch_deg = num()?,
            "wall_refl" => cfg.scene.wall_reflectivity = num()?,
            "blade_refl" => cfg.scene.blade_reflectivity = num()?,
            "c" => cfg.scene.sound_speed = num()?,
            "prf" => cfg.waveform.prf_hz = num()?,
            "fs" => cfg.waveform.sample_rate_hz = num()?,
            "pulses" => cfg.waveform.pulse_count = int()?,
            "impulse_len" => cfg.waveform.impulse_len_samples = int()?,
            "rate_hz" => cfg.rotation.rate_hz = num()?,
            "angle0" => cfg.rotation = RotationModel::new(cfg.rotation.rate_hz, num()?),
            _ => return Err(Error::Config(format!("unknown config key: {key}"))),
        }
    }

    if !wall_fields.is_empty() {
        let count = wall_fields.keys().max().unwrap() + 1;
        let mut walls = Vec::with_capacity(count);
        for i in 0..count {
            let fields = wall_fields.get(&i).copied().unwrap_or_default();
            let names = ["ax", "ay", "bx", "by"];
            for (slot, name) in names.iter().enumerate() {
                if fields[slot].is_none() {
                    return Err(Error::Config(format!(
                        "missing config key: wall.{i}.{name}"
                    )));
                }
            }
            walls.push(Wall::new(
                crate::geom::Point2::new(fields[0].unwrap(), fields[1].unwrap()),
                crate::geom::Point2::new(fields[2].unwrap(), fields[3].unwrap()),
            ));
        }
        cfg.scene.walls = walls;
    }

    Ok(cfg)
}

/// Read and parse the config at `path`, or return pure defaults.
pub fn load_config(path: Option<&Path>) -> Result<RunConfig> {
    match path {
        None => Ok(RunConfig::default()),
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| {
                Error::Config(format!("cannot read config {}: {e}", p.display()))
            })?;
            parse_config(&text)
        }
    }
}

#[derive(Parser, Debug)]
#[command(
    name = "bladesonar",
    about = "Pulsed-doppler sonar simulation and rotating-blade analysis",
    version
)]
struct Cli {
    /// key=value config file overriding the built-in scene defaults.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output filename prefix for every artifact.
    #[arg(long, global = true, default_value = "out")]
    out: String,
    /// Reserved for stochastic test fixtures; the pipeline is deterministic.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum WindowArg {
    Rectangular,
    Hann,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Synthesize a receive capture: <out>.wav plus <out>_events.csv.
    Simulate {
        /// Override the configured rotation rate (negative = reversed spin).
        #[arg(long, allow_hyphen_values = true)]
        rate_hz: Option<f64>,
        /// Divide echo amplitudes by round-trip path length.
        #[arg(long)]
        spreading_loss: bool,
    },
    /// Form the range-doppler map of a capture: <out>_rd.pdmx + <out>_rd.pgm.
    Rd {
        input: PathBuf,
        /// Drop this many leading fast-time rows before mapping.
        #[arg(long)]
        gate: Option<usize>,
        /// Slow-time window.
        #[arg(long, value_enum, default_value_t = WindowArg::Rectangular)]
        window: WindowArg,
        /// Leading-edge detection threshold (fraction of peak).
        #[arg(long, default_value_t = 0.5)]
        threshold_frac: f64,
    },
    /// Backproject a capture into the rotating frame: <out>_isar.pgm/.pdmx.
    Isar {
        input: PathBuf,
        /// Assumed rotation rate in Hz (sign = assumed direction).
        #[arg(long, allow_hyphen_values = true)]
        rate: f64,
        /// Image half-width in meters.
        #[arg(long, default_value_t = 0.58)]
        extent: f64,
        /// Image side length in pixels (odd).
        #[arg(long, default_value_t = 201)]
        pixels: usize,
        /// Drop this many leading fast-time rows first.
        #[arg(long)]
        gate: Option<usize>,
        /// Keep only the first N fast-time rows (e.g. to exclude multipath).
        #[arg(long)]
        rows: Option<usize>,
        /// Also report the +rate/-rate rotation-search correlation.
        #[arg(long)]
        ambiguity: bool,
    },
    /// Match a second capture against a one-period reference:
    /// <out>_fingerprint.csv, <out>_distance.pgm/.pdmx, verdict on stdout.
    Fingerprint {
        reference: PathBuf,
        second: PathBuf,
        /// Range gate in fast-time samples (default: target bin minus 5).
        #[arg(long)]
        gate: Option<usize>,
        /// Fast-time bin of the target (default: from the configured scene).
        #[arg(long)]
        target_bin: Option<usize>,
    },
    /// Report profile repeatability and injectivity margin for a capture.
    Diagnose {
        input: PathBuf,
        #[arg(long)]
        gate: Option<usize>,
        #[arg(long)]
        target_bin: Option<usize>,
        /// Minimum circular index separation counted as "distant angles".
        #[arg(long, default_value_t = 2)]
        separation: usize,
    },
}

fn exit_code_for(err: &Error) -> i32 {
    match err {
        Error::Config(_)
        | Error::FileFormat(_)
        | Error::SampleRateMismatch { .. }
        | Error::ZeroRotationRate
        | Error::GateExceedsMatrix { .. }
        | Error::Io(_) => EXIT_USAGE,
        _ => EXIT_DATA,
    }
}

/// Parse `args` and run one command; returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_USAGE,
            };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code_for(&e)
        }
    }
}

fn out_path(prefix: &str, suffix: &str) -> PathBuf {
    PathBuf::from(format!("{prefix}{suffix}"))
}

/// Wrap an arbitrary matrix in the pulse-matrix container for PDMX export.
fn as_pdmx(data: Array2<f64>, cfg: &RunConfig, gate: usize) -> PulseMatrix {
    PulseMatrix {
        data,
        sample_rate_hz: cfg.waveform.sample_rate_hz,
        prf_hz: cfg.waveform.prf_hz,
        gate_start_sample: gate,
    }
}

fn load_matrix(cfg: &RunConfig, path: &Path, threshold_frac: f64) -> Result<PulseMatrix> {
    let samples = read_wav_expecting(path, cfg.waveform.sample_rate_hz)?;
    let start = detect_leading_edge(&samples, threshold_frac)?;
    form_matrix(&samples, start, &cfg.waveform)
}

fn dispatch(cli: Cli) -> Result<()> {
    let cfg = load_config(cli.config.as_deref())?;
    let prefix = &cli.out;
    match cli.cmd {
        Cmd::Simulate {
            rate_hz,
            spreading_loss,
        } => {
            let mut rotation = cfg.rotation.clone();
            if let Some(r) = rate_hz {
                rotation = RotationModel::new(r, rotation.initial_angle_rad);
            }
            let sim = simulate_collection(
                &cfg.scene,
                &rotation,
                &cfg.waveform,
                SimOptions { spreading_loss },
            )?;
            write_wav_f32(
                &out_path(prefix, ".wav"),
                &sim.samples,
                cfg.waveform.sample_rate_hz,
            )?;
            let mut f = std::io::BufWriter::new(std::fs::File::create(out_path(
                prefix,
                "_events.csv",
            ))?);
            writeln!(f, "pulse,path,wall,blade,delay_s,amplitude,range_m")?;
            for (p, pulse_events) in sim.events.iter().enumerate() {
                for ev in pulse_events {
                    let wall = ev
                        .wall_index
                        .map(|w| w.to_string())
                        .unwrap_or_default();
                    writeln!(
                        f,
                        "{p},{},{wall},{},{},{},{}",
                        ev.path_class.name(),
                        ev.blade_index,
                        ev.delay_s,
                        ev.amplitude,
                        ev.one_way_range_m
                    )?;
                }
            }
            Ok(())
        }
        Cmd::Rd {
            input,
            gate,
            window,
            threshold_frac,
        } => {
            let mut m = load_matrix(&cfg, &input, threshold_frac)?;
            if let Some(g) = gate {
                m = range_gate(&m, g)?;
            }
            let w = match window {
                WindowArg::Rectangular => Window::Rectangular,
                WindowArg::Hann => Window::Hann,
            };
            let rd = range_doppler_windowed(&m, w);
            write_pdmx(
                &out_path(prefix, "_rd.pdmx"),
                &as_pdmx(rd.magnitude.clone(), &cfg, rd.gate_start_sample),
            )?;
            write_pgm_log(&out_path(prefix, "_rd.pgm"), &rd.magnitude)?;
            Ok(())
        }
        Cmd::Isar {
            input,
            rate,
            extent,
            pixels,
            gate,
            rows,
            ambiguity,
        } => {
            let mut m = load_matrix(&cfg, &input, 0.5)?;
            if let Some(g) = gate {
                m = range_gate(&m, g)?;
            }
            if let Some(r) = rows {
                m = truncate_rows(&m, r)?;
            }
            let img = backproject(&m, &cfg.scene, rate, extent, pixels)?;
            write_pgm_log(&out_path(prefix, "_isar.pgm"), &img.pixels)?;
            write_pdmx(
                &out_path(prefix, "_isar.pdmx"),
                &as_pdmx(img.pixels.clone(), &cfg, 0),
            )?;
            if ambiguity {
                let score = direction_ambiguity_check(&m, &cfg.scene, rate)?;
                println!("{{\"ambiguity_correlation\": {score}}}");
            }
            Ok(())
        }
        Cmd::Fingerprint {
            reference,
            second,
            gate,
            target_bin,
        } => {
            let m_ref = load_matrix(&cfg, &reference, 0.5)?;
            let m_second = load_matrix(&cfg, &second, 0.5)?;
            let t_bin = target_bin.unwrap_or_else(|| cfg.target_range_bin());
            let g = gate.unwrap_or_else(|| cfg.default_gate());
            let block = build_reference(&m_ref, t_bin, g)?;
            let (trace, fp) = fingerprint_against(&block, &m_second, g)?;
            write_fingerprint_csv(&out_path(prefix, "_fingerprint.csv"), &trace, &fp)?;
            write_pgm_log(&out_path(prefix, "_distance.pgm"), &trace.distance_matrix)?;
            write_pdmx(
                &out_path(prefix, "_distance.pdmx"),
                &as_pdmx(trace.distance_matrix.clone(), &cfg, 0),
            )?;
            println!("{}", verdict_line(&fp));
            Ok(())
        }
        Cmd::Diagnose {
            input,
            gate,
            target_bin,
            separation,
        } => {
            let m = load_matrix(&cfg, &input, 0.5)?;
            let t_bin = target_bin.unwrap_or_else(|| cfg.target_range_bin());
            let g = gate.unwrap_or_else(|| cfg.default_gate());
            let block = build_reference(&m, t_bin, g)?;
            let gated = range_gate(&m, g)?;
            let (repeatability, margin) = profile_diagnostics(&block, &gated, separation)?;
            println!(
                "{{\"repeatability\": {repeatability}, \"injectivity_margin\": {margin}}}"
            );
            Ok(())
        }
    }
}
