//! Pointwise geometry of submanifolds in (kappa, mu)-contact space forms
//! carrying a generalized semi-symmetric non-metric connection, plus a
//! numerical verifier for the Chen-type curvature inequalities of that
//! setting.
//!
//! Everything is expressed in a fixed orthonormal ambient frame, so the
//! metric is the identity and `g(X, Y)` is a dot product. A (0,2)-tensor
//! `B` is stored as `B[(i, j)] = B(e_i, e_j)`; a (1,1)-tensor `A` acts on
//! column vectors.

pub mod casorati;
pub mod connection;
pub mod contact;
pub mod error;
pub mod fuzz;
pub mod linalg;
pub mod scenario;
pub mod search;
pub mod submanifold;
pub mod theta;
pub mod verifier;

use serde::{Deserialize, Serialize};

pub use casorati::{casorati, CasoratiReport, HyperplaneExtremum};
pub use connection::{
    ambient_curvature, correction_tensors, ConnectionKind, ConnectionParams, ConnectionSpec, CorrectionTensors,
};
pub use contact::{
    curvature_lc, random_point, random_point_with, standard_point, validate_structure, ContactPointModel,
    RandomPointParams, ValidationReport,
};
pub use error::{Error, Result};
pub use linalg::{orthonormalize, restrict_form, split, Matrix, Plane, Vector};
pub use search::SearchConfig;
pub use submanifold::{attach, attach_with, induced_curvature, ricci, scalar_tau, sectional, SubmanifoldPoint};
pub use theta::{theta_k, ThetaMode, ThetaValue};
pub use verifier::{
    algebraic_bounds_check, cross_check, equality_instance, plane_invariants, verify, EqualityKind, PlaneInvariants,
    TheoremArgs, TheoremId, VerdictReport,
};

/// Numerical tolerances and search budgets shared by every computation on a
/// submanifold point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EngineConfig {
    /// relative singular-value cutoff for rank checks
    pub rank_tol: f64,
    /// allowed normal residual for vectors claimed tangent
    pub tangent_tol: f64,
    /// allowed asymmetry of second fundamental form slices
    pub symmetry_tol: f64,
    /// default slack tolerance, scaled by `1 + |lhs| + |rhs|`
    pub slack_tol: f64,
    pub search: SearchConfig,
}

impl Default for EngineConfig {
    fn default() -> Self {
        EngineConfig {
            rank_tol: linalg::DEFAULT_RANK_TOL,
            tangent_tol: 1e-10,
            symmetry_tol: 1e-12,
            slack_tol: 1e-8,
            search: SearchConfig::default(),
        }
    }
}
