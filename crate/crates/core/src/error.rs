//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// A recurrence or correlation order exceeded its configured maximum.
    #[error("order {requested} exceeds the maximum supported order {max}")]
    OrderOverflow { requested: usize, max: usize },

    /// An argument lies outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// `phi_moment_integral` only supports moment powers 0, 1 and 2.
    #[error("unsupported azimuthal moment power {0}; supported powers are 0, 1, 2")]
    UnsupportedMoment(u32),

    /// Two vectors that must have equal length do not.
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    /// An operator was paired with a state (or grid) built over a different basis.
    #[error("basis mismatch: {0}")]
    BasisMismatch(String),

    /// A state specification failed validation.
    #[error("invalid state spec: {0}")]
    InvalidSpec(String),

    /// Adjusted-relation function samples do not live on the expected periodic grid.
    #[error("non-periodic sample vector: {0}")]
    NonPeriodicSamples(String),

    /// `analytic_oracle` received an unknown case identifier.
    #[error("unknown oracle case: {0}")]
    UnknownCase(String),

    /// Report or specification (de)serialization failure.
    #[error("serialization error: {0}")]
    Serialization(String),
}

pub type Result<T> = std::result::Result<T, Error>;
