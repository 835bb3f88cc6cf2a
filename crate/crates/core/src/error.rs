use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("helper index {index} out of range ({count} helpers)")]
    HelperIndex { index: usize, count: usize },

    #[error("invalid geometry: {0}")]
    Geometry(String),

    #[error("coincident positions: path loss is singular")]
    CoincidentPositions,

    #[error("degenerate channel: helper-to-Bob channel is numerically zero")]
    DegenerateChannel,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("nulling violated: Bob-side residual {residual:e} exceeds tolerance {tolerance:e}")]
    NullingViolation { residual: f64, tolerance: f64 },

    #[error("collision: separation {separation} is not above disc diameter {rho}")]
    Collision { separation: f64, rho: f64 },

    #[error("finite-difference probe left the feasible region around helper {helper}")]
    ProbeInfeasible { helper: usize },

    #[error("placement failed after {attempts} jitter draws")]
    Placement { attempts: usize },

    #[error("config error: {0}")]
    Config(String),

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
