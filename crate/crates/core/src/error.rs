use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("atoms coincide: separation |r_B - r_A| is zero")]
    CoincidentAtoms,

    #[error("atom {atom} lies below the plate (z = {z})")]
    BelowPlate { atom: char, z: f64 },

    #[error("non-finite coordinate in position of atom {atom}")]
    NonFinitePosition { atom: char },

    #[error("wavenumber {k} is within the pole guard of transition k_p0 = {k_p0}")]
    PoleProximity { k_p0: f64, k: f64 },

    #[error("tensor kernel evaluated at zero separation")]
    DegenerateSeparation,

    #[error("direction vector is not unit length (|k_hat| = {norm})")]
    NonUnitDirection { norm: f64 },

    #[error("finite-difference step {step} exceeds 1% of the separation {separation}")]
    StepTooLarge { step: f64, separation: f64 },

    #[error("quadrature failed to reach tolerance: estimate {value:e} +/- {error:e} after {subdivisions} subdivisions")]
    QuadratureFailure {
        value: f64,
        error: f64,
        subdivisions: usize,
    },

    #[error("Abel extrapolation unstable: residuals {residuals:?} do not decrease")]
    ExtrapolationUnstable { residuals: Vec<f64> },

    #[error("integrand is not finite at the t = 0 endpoint ({value})")]
    EndpointSingularity { value: f64 },

    #[error("Abel mode needs a pole-free real axis; atom '{label}' has dynamic polarizability (use its static limit)")]
    PoleOnRealAxis { label: String },

    #[error("invalid atom specification: {0}")]
    InvalidAtom(String),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: malformed JSON at line {line}, column {column}: {message}")]
    Json {
        path: PathBuf,
        line: usize,
        column: usize,
        message: String,
    },
}

impl Error {
    /// Numerical failures (as opposed to bad input) map to CLI exit code 2.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::QuadratureFailure { .. }
                | Error::ExtrapolationUnstable { .. }
                | Error::EndpointSingularity { .. }
        )
    }

    pub(crate) fn json(path: impl Into<PathBuf>, err: &serde_json::Error) -> Self {
        Error::Json {
            path: path.into(),
            line: err.line(),
            column: err.column(),
            message: err.to_string(),
        }
    }
}
