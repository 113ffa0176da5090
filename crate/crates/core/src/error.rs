// Copyright 2026 spinprobe contributors
// SPDX-License-Identifier: Apache-2.0

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("twin-Fock state requires an even atom number, got {0}")]
    OddAtomNumber(usize),

    #[error("index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("operator is not Hermitian (max deviation {0:e})")]
    NotHermitian(f64),

    #[error("state is not normalized (norm² = {0})")]
    NotNormalized(f64),

    #[error("not a density matrix: {0}")]
    NotADensityMatrix(String),

    #[error("truncation error: amplitude {amplitude:e} at n_cut = {n_cut}")]
    Truncation { amplitude: f64, n_cut: usize },

    #[error("no Fock cutoff below the ceiling {ceiling} reaches leakage {tolerance:e}")]
    CutoffSearchFailed { ceiling: usize, tolerance: f64 },

    #[error("numerical instability: {0}")]
    NumericalInstability(String),

    #[error("branch tracking failure: {0}")]
    BranchTrackingFailure(String),

    #[error("value out of range: {0}")]
    Range(String),

    #[error("unsupported angle {0}: this regime is only defined at pi/2")]
    UnsupportedAngle(f64),

    #[error("bracket failure: {0}")]
    BracketFailure(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("resource ceiling exceeded: {0}")]
    ResourceCeiling(String),

    #[error("unknown strategy `{0}`")]
    UnknownStrategy(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("incompatible configurations: {0}")]
    IncompatibleConfigs(String),

    #[error("engine `{engine}` failed: {source}")]
    Engine {
        engine: String,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for errors caused by exceeding a size limit, including ones wrapped by an engine.
    pub fn is_resource_ceiling(&self) -> bool {
        match self {
            Error::ResourceCeiling(_) | Error::CutoffSearchFailed { .. } => true,
            Error::Engine { source, .. } => source.is_resource_ceiling(),
            _ => false,
        }
    }

    pub fn is_config(&self) -> bool {
        matches!(
            self,
            Error::Config(_) | Error::Json(_) | Error::UnknownStrategy(_) | Error::IncompatibleConfigs(_)
        )
    }
}
