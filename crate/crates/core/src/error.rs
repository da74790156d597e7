use thiserror::Error;

use crate::dsl::ParseError;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("unknown spin {0}")]
    UnknownSpin(String),

    #[error("invalid spin system: {0}")]
    InvalidSystem(String),

    #[error("polarization out of range: {0}")]
    PolarizationOutOfRange(String),

    #[error("operator is not Hermitian (max deviation {0:e})")]
    NotHermitian(f64),

    #[error("invalid density matrix: {0}")]
    InvalidState(String),

    #[error("negative duration {0} s")]
    NegativeDuration(f64),

    #[error("invalid pulse: {0}")]
    InvalidPulse(String),

    #[error("pulse integration did not converge within {slices} slices (last step change {change:e})")]
    NonConvergent { slices: usize, change: f64 },

    #[error("amplitude calibration found no bracket around {guess_hz} Hz")]
    NoBracket { guess_hz: f64 },

    #[error("spins {0} and {1} have zero coupling")]
    ZeroCoupling(String, String),

    #[error("invalid sequence: {0}")]
    InvalidSequence(String),

    #[error("Nyquist violation: line at {freq_hz:.3} Hz exceeds {nyquist_hz:.3} Hz")]
    Nyquist { freq_hz: f64, nyquist_hz: f64 },

    #[error("invalid acquisition: {0}")]
    InvalidAcquisition(String),

    #[error("singular system: {0}")]
    Singular(String),

    #[error("ill-conditioned inversion (condition number {0:e})")]
    IllConditioned(f64),

    #[error("reference matrix has zero norm")]
    ZeroNorm,

    #[error("config: {0}")]
    Config(String),

    #[error(transparent)]
    Parse(#[from] ParseError),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for failures caused by bad input rather than by the numerics.
    pub fn is_usage(&self) -> bool {
        matches!(
            self,
            Error::UnknownSpin(_)
                | Error::InvalidSystem(_)
                | Error::PolarizationOutOfRange(_)
                | Error::InvalidPulse(_)
                | Error::InvalidSequence(_)
                | Error::InvalidAcquisition(_)
                | Error::ZeroCoupling(..)
                | Error::DimensionMismatch { .. }
                | Error::NegativeDuration(_)
                | Error::Config(_)
                | Error::Parse(_)
                | Error::Io(_)
        )
    }
}
