//! Correlation probabilities for repeated measurements on bistable
//! two-state systems, temporal Bell (Leggett–Garg) inequalities, and the
//! resolution constraints that compete with their violation.
//!
//! The two-level, inequality and overlap layers are generic over the scalar
//! type ([`Real`], implemented for `f32` and `f64`). The rf-SQUID double-well
//! model works in SI units and is `f64` only. Aliases with an `f64` suffix
//! name the double-precision instantiations used by the command-line tool.

// `!(x > 0.0)` is used on purpose so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod inequalities;
pub mod overlap;
pub mod scalar;
pub mod squid;
pub mod tridiag;
pub mod two_level;

pub use error::{Error, Result};
pub use inequalities::{
    cell_from_table, delta_p, delta_p_from_table, midpoint_times, pseudo_joint, pseudo_joint_from_table, violation_map,
    ClassicalJoint, InequalityType, PseudoJoint, SignAssignment, TableGrid, ViolationCell,
};
pub use overlap::{
    admissible, criterion, overlap_curve, overlap_curve_on, overlap_integral, xi_threshold, CriterionName,
    OverlapCurve, ResolutionCriterion, XiBracket,
};
pub use scalar::Real;
pub use squid::{
    bistability_index, default_grid, eigensolve, find_minima, localized_states, two_level_consistency, well_summary,
    DoubleWellSummary, FluxPropagator, FluxState, Potential, PotentialForm, SpatialGrid, SpectralBasis, SquidParams,
};
pub use two_level::{
    apply_projector, effective_uncertainty, effective_uncertainty_weighted, evolve, pair_probability,
    sequential_joint_probability, spin_closed_form, BcWeighting, CorrelationTable, Dynamics, Outcome, RabiParams, Sign,
    SpinClosedForm, SpinDynamics, TwoLevelState, UncertaintyKind,
};

pub type TwoLevelState64 = TwoLevelState<f64>;
pub type Outcome64 = Outcome<f64>;
pub type RabiParams64 = RabiParams<f64>;
pub type CorrelationTable64 = CorrelationTable<f64>;
pub type SpinDynamics64 = SpinDynamics<f64>;
pub type ViolationCell64 = ViolationCell<f64>;
pub type PseudoJoint64 = PseudoJoint<f64>;
pub type TableGrid64 = TableGrid<f64>;
pub type OverlapCurve64 = OverlapCurve<f64>;
pub type XiBracket64 = XiBracket<f64>;
pub type ResolutionCriterion64 = ResolutionCriterion<f64>;

pub type TwoLevelState32 = TwoLevelState<f32>;
pub type SpinDynamics32 = SpinDynamics<f32>;
pub type OverlapCurve32 = OverlapCurve<f32>;
