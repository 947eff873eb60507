//! Dense state-vector engine: tensor products, unitaries, projective
//! measurement and Born-rule sampling.
//!
//! Everything here is an immutable value; operations return new states.

mod layout;
mod measurement;
mod operator;
mod state;

pub use layout::{Factor, FactorLayout, MAX_DIM};
pub use measurement::{born_distribution, joint_distribution, sample_outcome, MeasurementSpec};
pub use operator::Operator;
pub use state::{apply, apply_local, expectation, tensor, StateVector};

pub use num_complex::Complex64 as Amplitude;

/// Tolerance for algebraic identities (norms, unitarity, projector checks).
pub const TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum HilbertError {
    #[error("layout error: {0}")]
    Layout(String),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("operator is not unitary")]
    NotUnitary,
    #[error("observable is not Hermitian")]
    NotHermitian,
    #[error("state is not normalized (norm² = {0})")]
    NotNormalized(f64),
    #[error("zero vector cannot be normalized")]
    ZeroVector,
    #[error("non-finite amplitude")]
    NonFinite,
    #[error("invalid measurement: {0}")]
    InvalidMeasurement(String),
}
