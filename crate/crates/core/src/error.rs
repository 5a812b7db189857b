use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("overlap between particles {i} and {j}: center distance {distance} < {min_distance}")]
    Overlap {
        i: usize,
        j: usize,
        distance: f64,
        min_distance: f64,
    },

    #[error("duplicate particle id {0}")]
    DuplicateId(usize),

    #[error("genericity violation at t={time}: particles {ids:?} in simultaneous contact")]
    Genericity { time: f64, ids: Vec<usize> },

    #[error("particles are not approaching: relative normal velocity {0} >= 0")]
    NotApproaching(f64),

    #[error("cannot advance state backwards in time ({from} -> {to})")]
    TimeReversal { from: f64, to: f64 },

    #[error("packing failure: placed {placed} of {requested} spheres after {attempts} attempts")]
    Packing {
        placed: usize,
        requested: usize,
        attempts: usize,
    },

    #[error("unbalanced measure: residual {residual} exceeds {tolerance}")]
    Unbalanced { residual: f64, tolerance: f64 },

    #[error("polygon chain is not closed: gap {gap}")]
    NotClosed { gap: f64 },

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("window boundary t={0} coincides with a collision")]
    WindowHitsCollision(f64),

    #[error("segment placement infeasible at kink t={time}: half-length {requested} exceeds {limit}")]
    SegmentPlacement {
        time: f64,
        requested: f64,
        limit: f64,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("malformed event log: {0}")]
    MalformedLog(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// Short machine-readable tag used in CLI error reports.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::DimensionMismatch { .. } => "dimension_mismatch",
            Error::Overlap { .. } => "overlap",
            Error::DuplicateId(_) => "duplicate_id",
            Error::Genericity { .. } => "genericity",
            Error::NotApproaching(_) => "not_approaching",
            Error::TimeReversal { .. } => "time_reversal",
            Error::Packing { .. } => "packing",
            Error::Unbalanced { .. } => "unbalanced",
            Error::NotClosed { .. } => "not_closed",
            Error::Degenerate(_) => "degenerate",
            Error::WindowHitsCollision(_) => "window_hits_collision",
            Error::SegmentPlacement { .. } => "segment_placement",
            Error::InvalidArgument(_) => "invalid_argument",
            Error::MalformedLog(_) => "malformed_log",
            Error::Io(_) => "io",
            Error::Json(_) => "json",
            Error::Csv(_) => "csv",
        }
    }

    /// Validation and genericity failures, as opposed to I/O trouble.
    pub fn is_validation(&self) -> bool {
        !matches!(self, Error::Io(_) | Error::Json(_) | Error::Csv(_))
    }
}
