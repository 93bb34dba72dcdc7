//! Error type shared by the library.

use thiserror::Error;

/// Errors produced by the simulation and processing pipeline.
#[derive(Debug, Error)]
pub enum Error {
    /// Leading-edge detection ran on an all-zero signal.
    #[error("signal is all zeros; no leading edge to detect")]
    AllZeroSignal,

    /// Fewer complete pulses are available than requested.
    #[error("insufficient samples: only {available} complete pulses available")]
    InsufficientSamples { available: usize },

    /// A range gate would remove every fast-time row.
    #[error("range gate at sample {gate} exceeds the {rows}-row matrix")]
    GateExceedsMatrix { gate: usize, rows: usize },

    /// A WAV file's sample rate does not match the configured one.
    #[error("sample rate mismatch: expected {expected} Hz, file has {actual} Hz")]
    SampleRateMismatch { expected: f64, actual: f64 },

    /// A simulated echo would arrive after the next pulse was transmitted.
    #[error("echo delay {delay_s} s at pulse {pulse} exceeds the pulse repetition interval")]
    EventDelayExceedsPri { pulse: usize, delay_s: f64 },

    /// No doppler line stands out from the row it was searched in.
    #[error("no doppler peak above the row median threshold")]
    NoDopplerPeak,

    /// Two pulse matrices were compared with different range gates applied.
    #[error("range gate mismatch: compared collections must share gate and row count")]
    GateMismatch,

    /// The backprojection grid asks for fast-time samples outside the gated matrix.
    #[error("image center delay falls outside the gated fast-time window")]
    DelayOutOfGate,

    /// A collection is too short for the requested operation.
    #[error("collection too short: needed {needed} pulses, have {available}")]
    CollectionTooShort { needed: usize, available: usize },

    /// Backprojection requires a nonzero assumed rotation rate.
    #[error("assumed rotation rate must be nonzero")]
    ZeroRotationRate,

    /// Configuration file or parameter problem; the message names the offending key.
    #[error("config error: {0}")]
    Config(String),

    /// Malformed file contents (WAV/PDMX framing, magic numbers, truncation).
    #[error("file format error: {0}")]
    FileFormat(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
