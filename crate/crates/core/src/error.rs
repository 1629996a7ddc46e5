use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix is not skew-symmetric (max |m + mᵀ| entry = {deviation:e})")]
    NotSkewSymmetric { deviation: f64 },

    #[error("vector is not unit length (| ‖v‖ − 1 | = {deviation:e})")]
    NotUnit { deviation: f64 },

    #[error("matrix is not a rotation (‖mᵀm − I‖_F = {orthogonality:e}, det = {det})")]
    NotRotation { orthogonality: f64, det: f64 },

    /// The pointing direction reached (or is within the guard band of) the
    /// antipode of the desired direction, where the error vector is undefined.
    #[error("configuration outside the error-vector domain: 1 + qᵀq_d = {margin:e}")]
    OutsideDomain { margin: f64 },

    #[error("time {t} outside polynomial segment [{start}, {end}]")]
    OutOfSegment { t: f64, start: f64, end: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("degenerate fit window: {0}")]
    DegenerateWindow(String),

    #[error("line {line}: {message}")]
    Config { line: usize, message: String },

    /// A closed-loop run hit a domain violation at simulated time `t`.
    #[error("run aborted at t = {t:.6} s: {source}")]
    Aborted {
        t: f64,
        #[source]
        source: Box<Error>,
    },

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
