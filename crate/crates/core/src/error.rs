use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Every failure the lab can report.
///
/// `code()` gives a stable machine-readable tag used on the CLI and the HTTP
/// service; `is_validation()` separates bad input from internal faults.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("|k| = {k:e} is below the cutoff {k_min:e}")]
    WavenumberTooSmall { k: f64, k_min: f64 },

    #[error("scatterer set is empty")]
    EmptyScattererSet,

    #[error("scatterers at {a} and {b} are closer than {min_separation:e}")]
    CoincidentScatterers { a: f64, b: f64, min_separation: f64 },

    #[error("{what} must be finite, got {value}")]
    NonFinite { what: &'static str, value: f64 },

    #[error("matrix is singular: pivot {pivot:e} at column {column} below {threshold:e}")]
    SingularMatrix {
        column: usize,
        pivot: f64,
        threshold: f64,
    },

    #[error("solve residual {residual:e} exceeds tolerance {tolerance:e}")]
    IllConditioned { residual: f64, tolerance: f64 },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("solution k = {solution_k} does not match spectral component k = {spectrum_k}")]
    SpectrumSolutionMismatch { spectrum_k: f64, solution_k: f64 },

    #[error("invalid spectrum: {0}")]
    InvalidSpectrum(String),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("peak not resolved: {0}")]
    PeakNotResolved(String),

    #[error("particle does not pass the barrier: v0^2 = {v0_sq} <= F0*w/m = {threshold}")]
    DoesNotPass { v0_sq: f64, threshold: f64 },

    #[error("invalid classical setup: {0}")]
    InvalidClassical(String),

    #[error("time step {dt:e} exceeds w/(100 v0) = {limit:e}")]
    StepTooLarge { dt: f64, limit: f64 },

    #[error("analysis window does not fit the grid: {0}")]
    WindowOutsideGrid(String),

    #[error("grid step {step:e} is coarser than max_lag/20 = {limit:e}")]
    GridTooCoarse { step: f64, limit: f64 },

    #[error("phase jump {jump:.6} rad between k = {k_lo} and k = {k_hi} exceeds pi/2")]
    PhaseUnwrapAmbiguous { k_lo: f64, k_hi: f64, jump: f64 },

    #[error("invalid sweep: {0}")]
    InvalidSweep(String),

    #[error("schema error at {pointer}: {message}")]
    Schema { pointer: String, message: String },

    #[error("invariant violated ({invariant}): {message}")]
    Invariant {
        invariant: &'static str,
        message: String,
    },

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    pub fn code(&self) -> &'static str {
        match self {
            Error::WavenumberTooSmall { .. } => "wavenumber_too_small",
            Error::EmptyScattererSet => "empty_scatterer_set",
            Error::CoincidentScatterers { .. } => "coincident_scatterers",
            Error::NonFinite { .. } => "non_finite",
            Error::SingularMatrix { .. } => "singular_matrix",
            Error::IllConditioned { .. } => "ill_conditioned",
            Error::DimensionMismatch { .. } => "dimension_mismatch",
            Error::SpectrumSolutionMismatch { .. } => "spectrum_solution_mismatch",
            Error::InvalidSpectrum(_) => "invalid_spectrum",
            Error::InvalidGrid(_) => "invalid_grid",
            Error::PeakNotResolved(_) => "peak_not_resolved",
            Error::DoesNotPass { .. } => "does_not_pass",
            Error::InvalidClassical(_) => "invalid_classical",
            Error::StepTooLarge { .. } => "step_too_large",
            Error::WindowOutsideGrid(_) => "window_outside_grid",
            Error::GridTooCoarse { .. } => "grid_too_coarse",
            Error::PhaseUnwrapAmbiguous { .. } => "phase_unwrap_ambiguous",
            Error::InvalidSweep(_) => "invalid_sweep",
            Error::Schema { .. } => "schema_error",
            Error::Invariant { .. } => "invariant_error",
            Error::Io(_) => "io_error",
        }
    }

    /// Errors caused by the caller's input rather than by the engine.
    pub fn is_validation(&self) -> bool {
        !matches!(
            self,
            Error::SingularMatrix { .. } | Error::IllConditioned { .. }
        )
    }

    /// JSON pointer of the offending field, for schema errors.
    pub fn pointer(&self) -> Option<&str> {
        match self {
            Error::Schema { pointer, .. } => Some(pointer),
            _ => None,
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(err: std::io::Error) -> Self {
        Error::Io(err.to_string())
    }
}
