use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = LabError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum LabError {
    #[error("invalid interval ({a}, {b}): endpoints must be finite with a < b")]
    InvalidInterval { a: f64, b: f64 },

    #[error("intervals ({0}, {1}) and ({2}, {3}) overlap")]
    OverlappingIntervals(f64, f64, f64, f64),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("grid geometry mismatch between operands")]
    GridMismatch,

    #[error("{what} of radius {radius} does not fit in [-{half_width}, {half_width}]^2")]
    OutOfDomain { what: &'static str, radius: f64, half_width: f64 },

    #[error("superlevel set at level {level} is not bounded inside the grid")]
    UnboundedSuperlevel { level: f64 },

    #[error("support of the field escapes the ball of radius {radius} (|u| = {value} outside)")]
    SupportEscapes { radius: f64, value: f64 },

    #[error("flow case `{0}` has no nonlinearity f")]
    MissingNonlinearity(String),

    #[error("flow case `{0}` has no primitive F")]
    MissingPrimitive(String),

    #[error("flow case `{0}` has no 2D grid")]
    MissingGrid(String),

    #[error("radial ODE blew up at r = {r}")]
    OdeBlowUp { r: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("malformed file {path}: {msg}")]
    Format { path: PathBuf, msg: String },

    #[error("config error at line {line}, column {column}: {msg}")]
    Config { line: usize, column: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
