use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Numerical and contract failures raised by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix is not Hermitian: max |M - M†| = {asymmetry:e}")]
    NonHermitian { asymmetry: f64 },

    #[error("state is not normalized: | |a|²+|b|² - 1 | = {defect:e}")]
    Unnormalized { defect: f64 },

    #[error("zero or non-finite vector")]
    ZeroVector,

    #[error("segment {segment}: non-finite Hamiltonian coefficients at local time {time}")]
    NonFinite { segment: usize, time: f64 },

    #[error("invalid schedule: {0}")]
    InvalidSchedule(String),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("invalid integrator configuration: {0}")]
    InvalidConfig(String),

    #[error("phase undefined: |⟨u|U|v⟩| = {overlap:e} is below 1e-12")]
    UndefinedPhase { overlap: f64 },

    #[error("path is not closed: endpoint separation {defect:e} exceeds {tolerance:e}")]
    OpenPath { defect: f64, tolerance: f64 },

    #[error("path has fewer than {0} points")]
    ShortPath(usize),

    #[error("traceless gauge violated: ∫Tr H dt = {trace_integral:e}")]
    GaugeViolation { trace_integral: f64 },

    #[error("parameter tuning failed: {message}")]
    Tuning { message: String, trace: Vec<String> },
}
