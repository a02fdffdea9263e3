use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::casorati::{casorati, CasoratiReport};
use crate::linalg::{basis, orthonormalize, Plane, Vector};
use crate::submanifold::{scalar_tau, sectional_coords, SubmanifoldPoint};

use super::closed_form::{
    connection_pair, connection_pair_swapped, connection_sectional, gauss_pair, identity_block, lc_pair, plane_block,
    ricci_connection, ricci_gauss, ricci_structure, tau_structure,
};
use super::plane::{direction_invariants, global_invariants, plane_invariants};

/// Residual threshold for a transcription mismatch.
pub const CROSS_CHECK_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrossCheckReport {
    /// maximum absolute residual per expansion
    pub residuals: BTreeMap<String, f64>,
    /// `Q` at the minimizing hyperplane
    pub q_min: f64,
    pub q_tol: f64,
    pub pass: bool,
}

impl CrossCheckReport {
    pub fn max_residual(&self) -> f64 {
        self.residuals.values().copied().fold(0.0, f64::max)
    }

    // negated comparisons so NaN counts as failing
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    pub fn failing(&self) -> Vec<String> {
        let mut out: Vec<String> = self
            .residuals
            .iter()
            .filter(|(_, &r)| !(r < CROSS_CHECK_TOL))
            .map(|(k, _)| k.clone())
            .collect();
        if !(self.q_min >= -self.q_tol) {
            out.push("q_nonnegative".to_string());
        }
        out
    }
}

/// Compares the Gauss-equation pipeline against the expanded closed forms
/// on every coordinate plane, an oblique plane and several directions.
pub fn cross_check(sub: &SubmanifoldPoint) -> CrossCheckReport {
    cross_check_with(sub, &casorati(sub))
}

pub fn cross_check_with(sub: &SubmanifoldPoint, cas: &CasoratiReport) -> CrossCheckReport {
    let n = sub.n();
    let nf = n as f64;
    let g = global_invariants(sub);
    let mut residuals: BTreeMap<String, f64> = BTreeMap::new();
    let mut record = |key: &str, r: f64| {
        let slot = residuals.entry(key.to_string()).or_insert(0.0);
        // NaN must surface as a failure
        *slot = if r.is_nan() || slot.is_nan() {
            f64::NAN
        } else {
            slot.max(r.abs())
        };
    };

    let mut pairs: Vec<(Vector, Vector)> = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if i != j {
                pairs.push((basis(n, i), basis(n, j)));
            }
        }
    }
    let oblique = orthonormalize(&[
        Vector::from_fn(n, |i, _| 1.0 + i as f64),
        Vector::from_fn(n, |i, _| if i % 2 == 0 { 1.0 } else { -0.5 }),
    ])
    .expect("independent by construction");
    pairs.push((oblique[0].clone(), oblique[1].clone()));

    for (uc, vc) in &pairs {
        let (u, v) = (sub.to_ambient(uc), sub.to_ambient(vc));
        let r_uvvu = sub.induced_curvature_coords(uc, vc, vc, uc);
        let r_uvuv = sub.induced_curvature_coords(uc, vc, uc, vc);
        let gauss = gauss_pair(sub, uc, vc);
        let lc = lc_pair(sub, &u, &v);
        record(
            "pair_curvature",
            r_uvvu - (lc + connection_pair(sub, &u, &v, vc) + gauss),
        );

        let plane = Plane::new(u.clone(), v.clone()).expect("orthonormal tangent pair");
        let p = plane_invariants(sub, &plane).expect("tangent plane");
        let block = plane_block(&g, &p);
        record("structure_plane_block", lc - block);
        record(
            "plane_curvature",
            r_uvvu - (block + connection_pair(sub, &u, &v, vc) + gauss),
        );
        record(
            "plane_curvature_swapped",
            r_uvuv - (-block + connection_pair_swapped(sub, &u, &v, uc) - gauss),
        );
        record(
            "sectional",
            sectional_coords(sub, uc, vc) - (block + connection_sectional(sub, &p) + gauss),
        );
    }

    let tau = scalar_tau(sub);
    let second_form = 0.5 * (nf * nf * g.mean_sq - g.h_norm_sq);
    record("scalar", tau - (tau_structure(sub, &g) + second_form));
    let block = identity_block(sub, &g);
    record(
        "scalar_identity",
        (2.0 * tau - block) - (nf * nf * g.mean_sq - g.h_norm_sq),
    );

    let mut directions: Vec<Vector> = (0..n).map(|i| basis(n, i)).collect();
    directions.push(oblique[0].clone());
    for xc in &directions {
        let x = sub.to_ambient(xc);
        let d = direction_invariants(sub, &x).expect("tangent direction");
        let completion = crate::linalg::orthonormal_complement(std::slice::from_ref(xc), n);
        let raw: f64 = completion
            .iter()
            .map(|e| sub.induced_curvature_coords(xc, e, e, xc))
            .sum();
        let closed = ricci_structure(&g, &d) + ricci_connection(sub, &g, &d, false) + ricci_gauss(sub, xc);
        record("ricci", raw - closed);
    }

    let q_min = nf * (nf - 1.0) * cas.delta_c - 2.0 * tau + block;
    let q_tol = 1e-8 * (1.0 + 2.0 * tau.abs() + block.abs());
    let pass = residuals.values().all(|r| *r < CROSS_CHECK_TOL) && q_min >= -q_tol;
    CrossCheckReport {
        residuals,
        q_min,
        q_tol,
        pass,
    }
}
