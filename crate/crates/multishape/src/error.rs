//! Error types shared across the crate.

use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Error, Debug)]
pub enum Error {
    /// An argument lies outside its mathematical domain (e.g. t outside [0,1]).
    #[error("domain error: {0}")]
    Domain(String),

    /// Operands do not share compatible dimensions (p, M, lengths).
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// Input is degenerate for the requested operation (zero perimeter,
    /// zero scale, empty dataset, ...).
    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    /// Least-squares smoothing failed for a specific curve component.
    #[error("fit error on component {component}: {reason}")]
    Fit { component: usize, reason: String },

    /// Logarithm map requested at (numerically) antipodal points.
    #[error("antipodal points: geodesic distance {distance} too close to pi")]
    Antipodal { distance: f64 },

    /// Malformed input file.
    #[error("parse error in {path}: {reason}")]
    Parse { path: String, reason: String },

    /// Invalid configuration or command-line usage.
    #[error("invalid configuration: {0}")]
    Config(String),

    /// A numerical routine failed to produce a usable result.
    #[error("numerical failure: {0}")]
    Numerical(String),

    /// An error raised while processing one curve of a dataset.
    #[error("curve '{id}': {source}")]
    Curve {
        id: String,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Attach a curve identifier to an error propagating out of a dataset
    /// operation.
    pub fn with_curve_id(self, id: &str) -> Error {
        Error::Curve {
            id: id.to_string(),
            source: Box::new(self),
        }
    }

    /// Process exit code class: 1 usage, 2 data, 3 numerical.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) => 1,
            Error::Domain(_)
            | Error::DimensionMismatch(_)
            | Error::DegenerateInput(_)
            | Error::Parse { .. }
            | Error::Io(_) => 2,
            Error::Fit { .. } | Error::Antipodal { .. } | Error::Numerical(_) => 3,
            Error::Curve { source, .. } => source.exit_code(),
        }
    }
}
