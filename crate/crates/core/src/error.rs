use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by the simulator.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid system parameter `{field}`: {reason}")]
    InvalidSpec { field: &'static str, reason: String },

    #[error("eigensolver failed for a {dim}x{dim} matrix: {reason}")]
    Eigensolver { dim: usize, reason: String },

    #[error("matrix is not Hermitian (max |A - A^H| = {asymmetry:e})")]
    NotHermitian { asymmetry: f64 },

    #[error("{what} out of range: {value} (allowed {allowed})")]
    OutOfRange {
        what: &'static str,
        value: usize,
        allowed: String,
    },

    #[error("cannot overlap with a zero vector")]
    ZeroVector,

    #[error("vector length {got} does not match basis dimension {expected}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error(
        "block labeling requires [H, N_q + c^dag c] = 0, but the commutator norm is {norm:e} \
         (allowed {allowed:e}); use RWA coupling or another method"
    )]
    NotExcitationPreserving { norm: f64, allowed: f64 },

    #[error("n_max = {n_max} exceeds the truncation margin (fock_cutoff {fock_cutoff} - margin {margin})")]
    TruncationMargin {
        n_max: usize,
        fock_cutoff: usize,
        margin: usize,
    },

    #[error("ladder has {len} entries; at least {needed} are required")]
    LadderTooShort { len: usize, needed: usize },

    #[error("ladders cannot be compared: {0}")]
    MismatchedLadders(String),

    #[error(
        "population {population:e} in the top two Fock levels at t = {time} exceeds {limit:e}; \
         increase the dynamics Fock cutoff"
    )]
    FockCeiling {
        time: f64,
        population: f64,
        limit: f64,
    },

    #[error("displacement diverged at t = {time}: |alpha|^2 = {alpha_sq} exceeds {limit}")]
    DisplacementDiverged { time: f64, alpha_sq: f64, limit: f64 },

    #[error("invalid drive parameter `{field}`: {reason}")]
    InvalidDrive { field: &'static str, reason: String },

    #[error("trajectory and occupancy curve do not overlap in photon number")]
    EmptyOverlap,

    #[error("config error: {0}")]
    Config(String),

    #[error("cache file {path}: {reason}")]
    Cache { path: PathBuf, reason: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
