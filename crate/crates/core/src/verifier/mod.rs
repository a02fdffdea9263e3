//! Both sides of every curvature inequality, the algebraic lemmas behind
//! them, equality witnesses, and cross-checks of the expanded curvature
//! formulas against the Gauss-equation pipeline.

pub mod closed_form;
pub mod cross_check;
pub mod equality;
pub mod lemmas;
pub mod plane;
pub mod theorems;

pub use cross_check::{cross_check, cross_check_with, CrossCheckReport, CROSS_CHECK_TOL};
pub use equality::{equality_instance, shape_pattern, EqualityCase, EqualityKind, ShapePattern};
pub use lemmas::{algebraic_bounds_check, BoundCheck, BoundKind};
pub use plane::{
    direction_invariants, global_invariants, plane_invariants, DirectionInvariants, GlobalInvariants, PlaneInvariants,
};
pub use theorems::{verify, verify_with_casorati, Family, TheoremArgs, TheoremId, VerdictReport};
