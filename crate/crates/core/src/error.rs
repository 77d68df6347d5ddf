use thiserror::Error;

/// Errors raised by the scattering, spectrum and vacuum routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("mass must be positive and finite, got {0}")]
    InvalidMass(f64),

    #[error("no incident channel at E = {energy} (incident region level {level})")]
    NoIncidentChannel { energy: f64, level: f64 },

    #[error("E = {energy} sits on a continuum threshold |E - V| = m of the region at V = {level}")]
    Threshold { energy: f64, level: f64 },

    #[error("normalization is singular at the continuum threshold (E = {energy}, V = {level})")]
    NormalizationSingular { energy: f64, level: f64 },

    #[error("{0}")]
    Domain(String),

    #[error("segment {index}: {reason}")]
    ProfileValidation { index: usize, reason: String },

    #[error("transfer matrix is ill-conditioned (cond = {cond:e})")]
    NumericalFailure { cond: f64 },

    #[error("exponent diverges: momentum p = {0} in the nonrelativistic Coulomb ratio")]
    DivergentExponent(f64),

    #[error("root search failed: {0}")]
    RootNotFound(String),

    #[error("quadrature did not converge: estimated error {error:e} for value {value:e}")]
    QuadratureFailed { value: f64, error: f64 },

    #[error("{0} did not converge")]
    NotConverged(String),

    #[error("events between V = {lo} and V = {hi} could not be ordered")]
    UnresolvedEvents { lo: f64, hi: f64 },
}

impl Error {
    /// True for failures of a numerical method rather than of the caller's input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NumericalFailure { .. }
                | Error::RootNotFound(_)
                | Error::QuadratureFailed { .. }
                | Error::UnresolvedEvents { .. }
                | Error::NotConverged(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
