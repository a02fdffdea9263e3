use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::casorati::{casorati, CasoratiReport};
use crate::connection::ConnectionKind;
use crate::error::{Error, Result};
use crate::linalg::{Plane, Vector};
use crate::submanifold::{ricci, scalar_tau, sectional, SubmanifoldPoint};
use crate::theta::theta_k;

use super::closed_form::{hprime_bracket, identity_block, ricci_connection, ricci_structure, xi_bracket};
use super::plane::{direction_invariants, global_invariants, plane_invariants, GlobalInvariants};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TheoremId {
    /// `tau - K(plane)` bound, first connection
    T3_1,
    /// Ricci bound, first connection
    T3_3,
    /// `Theta_k` bound, first connection
    T3_4,
    T3_5i,
    T3_5ii,
    T4_1,
    T4_2,
    T4_3,
    T4_4i,
    T4_4ii,
}

impl TheoremId {
    pub const ALL: [TheoremId; 10] = [
        TheoremId::T3_1,
        TheoremId::T3_3,
        TheoremId::T3_4,
        TheoremId::T3_5i,
        TheoremId::T3_5ii,
        TheoremId::T4_1,
        TheoremId::T4_2,
        TheoremId::T4_3,
        TheoremId::T4_4i,
        TheoremId::T4_4ii,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            TheoremId::T3_1 => "3.1",
            TheoremId::T3_3 => "3.3",
            TheoremId::T3_4 => "3.4",
            TheoremId::T3_5i => "3.5i",
            TheoremId::T3_5ii => "3.5ii",
            TheoremId::T4_1 => "4.1",
            TheoremId::T4_2 => "4.2",
            TheoremId::T4_3 => "4.3",
            TheoremId::T4_4i => "4.4i",
            TheoremId::T4_4ii => "4.4ii",
        }
    }

    pub fn kind(self) -> ConnectionKind {
        match self {
            TheoremId::T3_1 | TheoremId::T3_3 | TheoremId::T3_4 | TheoremId::T3_5i | TheoremId::T3_5ii => {
                ConnectionKind::First
            }
            _ => ConnectionKind::Second,
        }
    }

    /// The same statement for the other connection.
    pub fn family(self) -> Family {
        match self {
            TheoremId::T3_1 | TheoremId::T4_1 => Family::Chen,
            TheoremId::T3_3 | TheoremId::T4_2 => Family::Ricci,
            TheoremId::T3_4 | TheoremId::T4_3 => Family::Theta,
            TheoremId::T3_5i | TheoremId::T4_4i => Family::CasoratiInf,
            TheoremId::T3_5ii | TheoremId::T4_4ii => Family::CasoratiSup,
        }
    }

    pub fn for_kind(kind: ConnectionKind) -> Vec<TheoremId> {
        TheoremId::ALL.into_iter().filter(|t| t.kind() == kind).collect()
    }
}

impl fmt::Display for TheoremId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for TheoremId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        TheoremId::ALL
            .into_iter()
            .find(|id| id.as_str().eq_ignore_ascii_case(t))
            .ok_or_else(|| Error::UnknownTheorem(t.to_string()))
    }
}

impl Serialize for TheoremId {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.as_str())
    }
}

impl<'de> Deserialize<'de> for TheoremId {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    Chen,
    Ricci,
    Theta,
    CasoratiInf,
    CasoratiSup,
}

/// Auxiliary arguments. Which ones are required depends on the theorem.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct TheoremArgs {
    pub plane: Option<Plane>,
    /// unit tangent vector, ambient coordinates
    pub x: Option<Vector>,
    pub k: Option<usize>,
    /// overrides the engine slack tolerance
    pub tol: Option<f64>,
    /// read the second-kind Ricci bound's `lambda` as the ambient trace of
    /// `alpha` instead of the tangent trace of `alpha'`
    pub alternate_lambda: bool,
}

impl TheoremArgs {
    pub fn plane(plane: Plane) -> Self {
        TheoremArgs {
            plane: Some(plane),
            ..Default::default()
        }
    }

    pub fn direction(x: Vector) -> Self {
        TheoremArgs {
            x: Some(x),
            ..Default::default()
        }
    }

    pub fn k(k: usize) -> Self {
        TheoremArgs {
            k: Some(k),
            ..Default::default()
        }
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = Some(tol);
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerdictReport {
    pub theorem_id: TheoremId,
    pub lhs: f64,
    pub rhs: f64,
    /// `rhs - lhs`
    pub slack: f64,
    pub holds: bool,
    /// effective tolerance, already scaled by `1 + |lhs| + |rhs|`
    pub tol: f64,
    pub diagnostics: BTreeMap<String, Value>,
}

impl VerdictReport {
    fn new(id: TheoremId, lhs: f64, rhs: f64, base_tol: f64) -> Self {
        let tol = base_tol * (1.0 + lhs.abs() + rhs.abs());
        let slack = rhs - lhs;
        VerdictReport {
            theorem_id: id,
            lhs,
            rhs,
            slack,
            holds: slack >= -tol,
            tol,
            diagnostics: BTreeMap::new(),
        }
    }

    fn diag(&mut self, key: &str, value: Value) {
        self.diagnostics.insert(key.to_string(), value);
    }
}

pub fn verify(sub: &SubmanifoldPoint, id: TheoremId, args: &TheoremArgs) -> Result<VerdictReport> {
    verify_inner(sub, id, args, None)
}

/// Same as [`verify`], reusing an existing Casorati search for the
/// Casorati theorems.
pub fn verify_with_casorati(
    sub: &SubmanifoldPoint,
    id: TheoremId,
    args: &TheoremArgs,
    cas: &CasoratiReport,
) -> Result<VerdictReport> {
    verify_inner(sub, id, args, Some(cas))
}

fn verify_inner(
    sub: &SubmanifoldPoint,
    id: TheoremId,
    args: &TheoremArgs,
    cas: Option<&CasoratiReport>,
) -> Result<VerdictReport> {
    if sub.kind() != id.kind() {
        return Err(Error::WrongConnectionKind {
            theorem: id.to_string(),
            expected: id.kind(),
            found: sub.kind(),
        });
    }
    let tol = args.tol.unwrap_or(sub.config().slack_tol);
    if !(tol.is_finite() && tol >= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "tolerance must be finite and nonnegative, got {tol}"
        )));
    }
    let g = global_invariants(sub);
    match id.family() {
        Family::Chen => verify_chen(sub, id, &g, args, tol),
        Family::Ricci => verify_ricci(sub, id, &g, args, tol),
        Family::Theta => verify_theta(sub, id, &g, args, tol),
        Family::CasoratiInf | Family::CasoratiSup => {
            let owned;
            let cas = match cas {
                Some(c) => c,
                None => {
                    owned = casorati(sub);
                    &owned
                }
            };
            Ok(verify_casorati(sub, id, &g, cas, tol))
        }
    }
}

fn missing(id: TheoremId, argument: &str) -> Error {
    Error::MissingArgument {
        theorem: id.to_string(),
        argument: argument.to_string(),
    }
}

fn verify_chen(
    sub: &SubmanifoldPoint,
    id: TheoremId,
    g: &GlobalInvariants,
    args: &TheoremArgs,
    tol: f64,
) -> Result<VerdictReport> {
    let plane = args.plane.as_ref().ok_or_else(|| missing(id, "plane"))?;
    let p = plane_invariants(sub, plane)?;
    let n = g.n as f64;
    let (c, kappa, mu) = (g.c, g.kappa, g.mu);
    let tau = scalar_tau(sub);
    let k = sectional(sub, plane)?;

    let structure = (n + 1.0) * (n - 2.0) / 2.0 * (c + 3.0) / 4.0
        + (c + 3.0 - 4.0 * kappa) / 4.0 * (-(n - 1.0) * g.xi_top_sq + p.gamma)
        + (c - 1.0) / 8.0 * (3.0 * g.phat_sq - 6.0 * p.phi_plane)
        + 0.25 * hprime_bracket(g)
        - 0.5 * (p.det_hprime - p.det_phi_hprime)
        + (n - 1.0) * g.tr_hprime_top
        - p.tr_hprime
        + (1.0 - mu) * (xi_bracket(g) + p.theta);
    let connection = match sub.spec().params {
        crate::ConnectionParams::First {
            lambda1: l1,
            lambda2: l2,
        } => {
            -(l1 + l2) / 2.0 * (n - 1.0) * g.lambda
                - l2 / 2.0 * (l1 - l2) * (n - 1.0) * g.tr_beta
                - (l1 - l2) / 2.0 * (n - 1.0) * n * g.pi_mean
                + (l1 + l2) / 2.0 * p.tr_alpha
                + l2 * (l1 - l2) / 2.0 * p.tr_beta
                + (l1 - l2) / 2.0 * p.g_tr_h_p
        }
        crate::ConnectionParams::Second { b, .. } => {
            -(n - 1.0) / 2.0 * b * g.lambda_prime + (n - 1.0) / 2.0 * b * b * g.p_top_sq
                - b / 2.0 * (n - 1.0) * n * g.pi_mean
                + b / 2.0 * p.tr_alpha_prime
                - b * b / 2.0 * p.p_plane_sq
                + b / 2.0 * p.pi_tr_h
        }
    };
    let mean_term = n * n * (n - 2.0) / (2.0 * (n - 1.0)) * g.mean_sq;
    let rhs = structure + connection + mean_term;
    let mut report = VerdictReport::new(id, tau - k, rhs, tol);
    report.diag("tau", json!(tau));
    report.diag("sectional", json!(k));
    report.diag("mean_curvature_term", json!(mean_term));
    report.diag("plane_invariants", serde_json::to_value(p).expect("plain struct"));
    Ok(report)
}

fn verify_ricci(
    sub: &SubmanifoldPoint,
    id: TheoremId,
    g: &GlobalInvariants,
    args: &TheoremArgs,
    tol: f64,
) -> Result<VerdictReport> {
    let x = args.x.as_ref().ok_or_else(|| missing(id, "X"))?;
    let ric = ricci(sub, x)?;
    let xc = sub.coords(x)?;
    let d = direction_invariants(sub, x)?;
    let n = g.n as f64;
    let mean_term = n * n / 4.0 * g.mean_sq;
    let structure = ricci_structure(g, &d);
    let rhs = structure + ricci_connection(sub, g, &d, args.alternate_lambda) + mean_term;
    let mut report = VerdictReport::new(id, ric.raw, rhs, tol);
    report.diag("ricci_symmetrized", json!(ric.symmetrized));
    report.diag("mean_curvature_term", json!(mean_term));
    if id == TheoremId::T4_2 {
        let other = structure + ricci_connection(sub, g, &d, !args.alternate_lambda) + mean_term;
        if (other - rhs).abs() > report.tol {
            report.diag("rhs_other_lambda_reading", json!(other));
        }
        report.diag("alternate_lambda", json!(args.alternate_lambda));
    }

    // (ii) and (iii): equality against the kernel and the all-zero tests
    let kernel_residual = sub.h().iter().map(|s| (s * &xc).amax()).fold(0.0, f64::max);
    let h_max = sub.h().iter().map(|s| s.amax()).fold(0.0, f64::max);
    let zero_tol = 1e-10;
    let mean_zero = g.mean_sq.sqrt() <= zero_tol;
    let equality = report.slack.abs() <= report.tol;
    report.diag("kernel_residual", json!(kernel_residual));
    report.diag("in_kernel", json!(kernel_residual <= zero_tol));
    report.diag("h_all_zero", json!(h_max <= zero_tol));
    report.diag("mean_curvature_zero", json!(mean_zero));
    report.diag("equality", json!(equality));
    if mean_zero {
        report.diag(
            "equality_matches_kernel",
            json!(equality == (kernel_residual <= zero_tol)),
        );
    }
    Ok(report)
}

fn verify_theta(
    sub: &SubmanifoldPoint,
    id: TheoremId,
    g: &GlobalInvariants,
    args: &TheoremArgs,
    tol: f64,
) -> Result<VerdictReport> {
    let k = args.k.ok_or_else(|| missing(id, "k"))?;
    let theta = theta_k(sub, k)?;
    let n = g.n as f64;
    let block = identity_block(sub, g);
    let tau = scalar_tau(sub);
    let lhs = n * (n - 1.0) * theta.value - block;
    let rhs = n * (n - 1.0) * g.mean_sq;
    let mut report = VerdictReport::new(id, lhs, rhs, tol);

    // proof chain: 2 tau - A = n^2|H|^2 - |h|^2, |h|^2 >= n|H|^2 and, in
    // certified modes, 2 tau >= n(n-1) Theta_k
    let identity_residual = (2.0 * tau - block) - (n * n * g.mean_sq - g.h_norm_sq);
    let identity_tol = 1e-9 * (1.0 + tau.abs() + block.abs() + g.h_norm_sq);
    let cauchy_gap = g.h_norm_sq - n * g.mean_sq;
    let cauchy_ok = cauchy_gap >= -1e-12 * (1.0 + g.h_norm_sq);
    let tau_gap = 2.0 * tau - n * (n - 1.0) * theta.value;
    let chain_ok = identity_residual.abs() <= identity_tol && cauchy_ok;
    let tau_ok = tau_gap >= -report.tol;
    let slack_ok = report.holds;
    report.holds = if theta.certified {
        chain_ok && tau_ok && slack_ok
    } else {
        chain_ok
    };
    report.diag("theta", json!(theta.value));
    report.diag("theta_mode", json!(theta.mode.as_str()));
    report.diag("theta_samples", json!(theta.samples));
    report.diag("certified", json!(theta.certified));
    report.diag("identity_residual", json!(identity_residual));
    report.diag("norm_gap", json!(cauchy_gap));
    report.diag("tau_theta_gap", json!(tau_gap));
    if !theta.certified {
        report.diag("advisory_slack_holds", json!(slack_ok && tau_ok));
    }
    Ok(report)
}

fn verify_casorati(
    sub: &SubmanifoldPoint,
    id: TheoremId,
    g: &GlobalInvariants,
    cas: &CasoratiReport,
    tol: f64,
) -> VerdictReport {
    let n = g.n as f64;
    let tau = scalar_tau(sub);
    let block = identity_block(sub, g);
    let (delta, extremum) = match id.family() {
        Family::CasoratiInf => (cas.delta_c, &cas.inf),
        _ => (cas.delta_c_hat, &cas.sup),
    };
    let rhs = n * (n - 1.0) * delta + block;
    let mut report = VerdictReport::new(id, 2.0 * tau, rhs, tol);
    report.diag("casorati", json!(cas.c));
    report.diag("delta", json!(delta));
    report.diag("hyperplane_value", json!(extremum.value));
    report.diag("hyperplane_normal", json!(extremum.normal));
    report.diag("search_evaluations", json!(extremum.evaluations));
    report.diag("layout_version", json!(crate::search::LAYOUT_VERSION));
    if id.family() == Family::CasoratiInf {
        // Q at the minimizing hyperplane equals the slack
        report.diag("q_min", json!(report.slack));
    }
    report.diag("shape_pattern", json!(super::equality::shape_pattern(sub.h()).as_str()));
    report
}
