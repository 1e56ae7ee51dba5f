use std::path::PathBuf;

use thiserror::Error;

/// Everything that can go wrong in the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    /// The Riemann data does not belong to the rarefaction / contact / rarefaction class.
    #[error("data is not an R1-CD-R3 pattern: {violated} fails (contact pressure {p_contact:.6e})")]
    NotR1CdR3 { violated: &'static str, p_contact: f64 },

    #[error("contact pressure could not be bracketed in (0, {p_max:.6e}] (vacuum forms between the fans)")]
    NoBracket { p_max: f64 },

    #[error("adaptive quadrature did not converge: achieved error estimate {achieved:.3e}, wanted {wanted:.3e}")]
    Quadrature { achieved: f64, wanted: f64 },

    #[error("root finder failed: {0}")]
    RootFinding(String),

    /// Damped Newton on the self-similar contact problem did not converge.
    #[error("self-similar profile Newton iteration diverged; residual trace {trace:?}")]
    NewtonDiverged { trace: Vec<f64> },

    #[error("positivity lost at tau = {tau:.6e}, y = {y:.6e} ({what} = {value:.6e})")]
    Positivity { tau: f64, y: f64, what: &'static str, value: f64 },

    #[error("waves reached the boundary at tau = {tau:.6e}, y = {y:.6e} (deviation {deviation:.3e})")]
    BoundaryReached { tau: f64, y: f64, deviation: f64 },

    #[error("domain too small: need half width > {needed:.6e}, have {have:.6e}")]
    DomainTooSmall { needed: f64, have: f64 },

    #[error("profile ansatz lost positivity at tau = {tau:.6e}, y = {y:.6e}")]
    ProfilePositivity { tau: f64, y: f64 },

    #[error("region contains no grid point")]
    EmptyRegion,

    #[error("{path}:{line}: field `{field}`: {reason}")]
    Config { path: String, line: usize, field: String, reason: String },

    #[error("i/o error on {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter { name, reason: reason.into() }
    }

    /// Stable exit code contract of the command-line tool: 2 for configuration
    /// or wave-class problems, 3 for runtime aborts.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidParameter { .. }
            | Error::NotR1CdR3 { .. }
            | Error::NoBracket { .. }
            | Error::DomainTooSmall { .. }
            | Error::EmptyRegion
            | Error::Config { .. } => 2,
            _ => 3,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
