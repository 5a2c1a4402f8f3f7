use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("touchstone line {line}: {msg}")]
    Touchstone { line: usize, msg: String },

    #[error("invalid frequency grid: {0}")]
    Grid(String),

    #[error("invalid model parameter: {0}")]
    Model(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("{f} Hz lies on a Nyquist zone boundary for a {f_rep} Hz sampling rate")]
    ZoneBoundary { f: f64, f_rep: f64 },

    #[error("dense simulation needs {points} grid points (limit {limit}); reduce n_samples")]
    MemoryBound { points: usize, limit: usize },

    #[error("reference phasor magnitude {magnitude:e} is below the noise floor")]
    InvalidReference { magnitude: f64 },

    #[error("degenerate calibration standards: {0}")]
    Conditioning(String),

    #[error("calibration failed at {f} Hz: {msg}")]
    Calibration { f: f64, msg: String },

    #[error("singular correction at {f} Hz")]
    SingularCorrection { f: f64 },

    #[error("frequency grids do not match: {0}")]
    GridMismatch(String),

    #[error("no -3 dB crossing inside the grid")]
    BandEdge,

    #[error("0.1 dB compression not reached below {p_stop} dBm")]
    CompressionNotFound { p_stop: f64 },

    #[error("error terms file line {line}: {msg}")]
    TermsFile { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
