use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("invalid protocol: {0}")]
    InvalidProtocol(String),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid sweep: {0}")]
    InvalidSweep(String),

    #[error("{op} is not available for the {family} family")]
    UnsupportedFamily { family: &'static str, op: &'static str },

    /// The spectrum is degenerate at `lambda`, so instantaneous eigenstates
    /// cannot be told apart there.
    #[error("degenerate spectrum at lambda = {lambda} (gap {gap:e}); use an epsilon-offset endpoint or the closed-form limit")]
    Degenerate { lambda: f64, gap: f64 },

    #[error("gap collapses along the path at lambda = {lambda}; the adiabatic frame is undefined there")]
    GapCollapse { lambda: f64 },

    #[error("interference phase undefined: |{which}| = {magnitude:e} is below 1e-12")]
    VanishingAmplitude { which: &'static str, magnitude: f64 },

    #[error("at axis value {value}: {source}")]
    AtAxisValue {
        value: f64,
        #[source]
        source: Box<Error>,
    },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for failures of the numerics themselves rather than of the
    /// caller's input (degenerate projections, collapsing gaps).
    pub fn is_numerical(&self) -> bool {
        match self {
            Error::Degenerate { .. } | Error::GapCollapse { .. } | Error::VanishingAmplitude { .. } => true,
            Error::AtAxisValue { source, .. } => source.is_numerical(),
            _ => false,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }
}
