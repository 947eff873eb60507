//! State builders for the thought experiments: the basic friend state,
//! frame-relational lab states, the Local Friendliness circuit, and the
//! sequential (Rovelli) scenario.
//!
//! A lab is modelled as `orientation ⊗ record`. The orientation qubit
//! distinguishes the two subjectively identical lab states (`|P⟩` vs `|P'⟩`)
//! that differ only in overall orientation relative to the outside frame;
//! the record register holds what the friend saw. Operators on one factor
//! commute with observables on the other, which is what makes record
//! statistics invariant under whole-lab rotations.

mod lab;
mod lf;
mod rovelli;

use serde::{Deserialize, Serialize};

use crate::hilbert::HilbertError;

pub use lab::{
    apply_global_rotation, build_basic_wf_state, build_frame_relational_state, build_lf_frame_relational_state,
    frame_relational_from_amplitudes, interference_witness, orientation_branches, record_distribution, LabModel,
};
pub use lf::{correlation, friend_unitary, lf_born_tables, lf_circuit, observable_spec, BornTable, LFConfig};
pub use rovelli::{build_rovelli_states, check_rovelli_structure, rovelli_record_labels, RovelliConfig, RovelliKind};

/// Outcome the friend registers: `+1` parallel (P), `-1` antiparallel (A).
pub type InternalOutcome = crate::Sign;

/// Factor names shared across builders.
pub mod names {
    pub const S: &str = "S";
    pub const A: &str = "A";
    pub const X: &str = "X";
    pub const Y: &str = "Y";
    pub const M_A: &str = "M_A";
    pub const M_C: &str = "M_C";
    pub const A_ORIENT: &str = "A_orient";
    pub const A_RECORD: &str = "A_record";
    pub const C_ORIENT: &str = "C_orient";
    pub const C_RECORD: &str = "C_record";

    /// Orientation factors carry this suffix.
    pub const ORIENT_SUFFIX: &str = "_orient";
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ScenarioError {
    #[error(transparent)]
    Hilbert(#[from] HilbertError),
    #[error("amplitudes are not normalized: |a|²+|b|² = {0}")]
    Unnormalized(f64),
    #[error("frame-relational states are only defined for equal branch weights (|a| = {a}, |b| = {b})")]
    UnequalWeights { a: f64, b: f64 },
    #[error("state lies outside the span of the two branches (residual {0:e})")]
    OutsideSpan(f64),
    #[error("branches are not orthonormal")]
    BranchesNotOrthonormal,
    #[error("operator acts on non-orientation factor `{0}`")]
    NotOrientation(String),
    #[error("angle {0} is outside [0, 360)")]
    AngleOutOfRange(f64),
    #[error("inconsistent scenario state: {0}")]
    Inconsistent(String),
}

/// Scenario configuration file: `{"angles": {...}}` and/or `{"rovelli": {...}}`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ScenarioConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub angles: Option<LFConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rovelli: Option<RovelliConfig>,
}
