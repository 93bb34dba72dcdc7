//! Pulsed-doppler sonar simulation and processing for rotating blade targets.
//!
//! The pipeline: [`scene`] describes a room with a spinning blade fan,
//! [`raysim`] traces specular echo paths into a receive capture, [`pulsegrid`]
//! reshapes the capture into a fast-time × pulse matrix, and the analysis
//! modules work on that matrix — [`rdmap`] for range–doppler spectra,
//! [`isar`] for rotation-compensated imaging, and [`fingerprint`] for
//! per-pulse range-profile matching that recovers relative spin rate and
//! direction. [`cli`] wraps it all in subcommands; [`io`] reads and writes
//! WAV captures, pulse matrices, and PGM renderings.
//!
//! Each capability has a runnable demo under `examples/`:
//!
//! * `simulate` — synthesize a capture and dump the echo event table.
//! * `range_doppler` — form the map and read off the blade-pass line.
//! * `isar_image` — back-project an image and locate the blade ridges.
//! * `fingerprint` — compare two captures for spin ratio and direction.
//! * `direction_ambiguity` — show the image-domain direction ambiguity.
//! * `diagnostics` — score a capture's repeatability and angle distinctness.

pub mod cli;
pub mod error;
pub mod fingerprint;
pub mod geom;
pub mod io;
pub mod isar;
pub mod pulsegrid;
pub mod raysim;
pub mod rdmap;
pub mod scene;

pub use error::{Error, Result};
