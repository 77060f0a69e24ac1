use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A parameter is outside its admissible range.
    #[error("invalid {field} = {value}: {reason}")]
    InvalidParameter {
        field: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("invalid time grid: {0}")]
    InvalidGrid(&'static str),

    /// The characteristic cubic has (nearly) repeated roots, so the
    /// residue expansion is ill conditioned. Use the ODE route instead.
    #[error("mode decomposition is degenerate (min root separation {separation:e}); use the ODE route")]
    DegenerateModes { separation: f64 },

    #[error("phase series is undersampled at index {index}: |Δarg| = {jump}")]
    Undersampled { index: usize, jump: f64 },

    #[error("ODE integration failed at t = {t}: {reason}")]
    Integration { t: f64, reason: &'static str },

    #[error("{0}")]
    Unsupported(&'static str),
}
