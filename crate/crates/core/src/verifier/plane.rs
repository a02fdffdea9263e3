use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::linalg::{bilinear, frobenius_sq, restrict_form, Matrix, Plane, Vector};
use crate::submanifold::SubmanifoldPoint;

/// Quantities of a tangent 2-plane consumed by the theorem right-hand sides.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlaneInvariants {
    /// `eta(e1)^2 + eta(e2)^2`
    pub gamma: f64,
    pub theta: f64,
    /// `<phi e1, e2>^2`
    pub phi_plane: f64,
    pub det_hprime: f64,
    pub det_phi_hprime: f64,
    pub tr_hprime: f64,
    pub tr_alpha: f64,
    pub tr_beta: f64,
    pub tr_alpha_prime: f64,
    /// `pi(e1)^2 + pi(e2)^2`
    pub p_plane_sq: f64,
    /// `pi(h(e1,e1) + h(e2,e2))` for the active connection
    pub pi_tr_h: f64,
    /// `g(h(e1,e1) + h(e2,e2), P)`; equal to `pi_tr_h` by definition of `pi`
    pub g_tr_h_p: f64,
}

pub fn plane_invariants(sub: &SubmanifoldPoint, plane: &Plane) -> Result<PlaneInvariants> {
    let (e1, e2) = (plane.e1(), plane.e2());
    let u = sub.coords(e1)?;
    let v = sub.coords(e2)?;
    let model = sub.model();
    let corr = sub.corrections();
    let p = &sub.spec().p;
    let (n1, n2) = (model.eta(e1), model.eta(e2));
    let hp = &model.hprime;
    let theta = n1 * n1 * bilinear(hp, e2, e2) + n2 * n2 * bilinear(hp, e1, e1) - 2.0 * n1 * n2 * bilinear(hp, e1, e2);
    let hprime = restrict_form(hp, plane)?;
    let phi_hprime = restrict_form(&model.phi_hprime(), plane)?;
    let phi12 = bilinear(&model.phi, e2, e1);
    let pi_tr_h = sub.pi_h(&u, &u) + sub.pi_h(&v, &v);
    let trace_h = sub.h_of(&u, &u) + sub.h_of(&v, &v);
    let g_tr_h_p = trace_h.dot(&Vector::from_column_slice(sub.pi_normal()));
    Ok(PlaneInvariants {
        gamma: n1 * n1 + n2 * n2,
        theta,
        phi_plane: phi12 * phi12,
        det_hprime: hprime.determinant(),
        det_phi_hprime: phi_hprime.determinant(),
        tr_hprime: hprime.trace(),
        tr_alpha: restrict_form(&corr.alpha, plane)?.trace(),
        tr_beta: restrict_form(&corr.beta, plane)?.trace(),
        tr_alpha_prime: restrict_form(&corr.alpha_prime, plane)?.trace(),
        p_plane_sq: p.dot(e1).powi(2) + p.dot(e2).powi(2),
        pi_tr_h,
        g_tr_h_p,
    })
}

/// Point quantities that do not depend on a plane or direction. Traces of
/// the correction tensors are taken over the tangent frame.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GlobalInvariants {
    pub n: usize,
    pub c: f64,
    pub kappa: f64,
    pub mu: f64,
    pub xi_top_sq: f64,
    pub phat_sq: f64,
    pub phi_hprime_top_sq: f64,
    pub hprime_top_sq: f64,
    pub tr_hprime_top: f64,
    pub tr_phi_hprime_top: f64,
    /// `g(xi_top, h' xi_top)`
    pub xi_hprime_xi: f64,
    /// tangent trace of `alpha`
    pub lambda: f64,
    /// tangent trace of `beta`
    pub tr_beta: f64,
    /// tangent trace of `alpha'`
    pub lambda_prime: f64,
    pub p_top_sq: f64,
    pub pi_mean: f64,
    pub mean_sq: f64,
    pub h_norm_sq: f64,
}

pub fn global_invariants(sub: &SubmanifoldPoint) -> GlobalInvariants {
    let model = sub.model();
    let d = sub.decomp();
    let corr = sub.corrections();
    let tangent_trace = |b: &Matrix| sub.tangent().iter().map(|e| bilinear(b, e, e)).sum::<f64>();
    GlobalInvariants {
        n: sub.n(),
        c: model.c,
        kappa: model.kappa,
        mu: model.mu_contact,
        xi_top_sq: d.xi_top.norm_squared(),
        phat_sq: frobenius_sq(&d.phat),
        phi_hprime_top_sq: frobenius_sq(&d.phi_hprime_top),
        hprime_top_sq: frobenius_sq(&d.hprime_top),
        tr_hprime_top: d.hprime_top.trace(),
        tr_phi_hprime_top: d.phi_hprime_top.trace(),
        xi_hprime_xi: bilinear(&model.hprime, &d.xi_top, &d.xi_top),
        lambda: tangent_trace(&corr.alpha),
        tr_beta: tangent_trace(&corr.beta),
        lambda_prime: tangent_trace(&corr.alpha_prime),
        p_top_sq: d.p_top.norm_squared(),
        pi_mean: sub.pi_mean(),
        mean_sq: sub.mean_curvature_sq(),
        h_norm_sq: sub.h_norm_sq(),
    }
}

/// Direction quantities for the Ricci bounds, `X` a unit tangent vector.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DirectionInvariants {
    pub eta_x: f64,
    /// `|P-hat X|^2`
    pub phat_x_sq: f64,
    /// `|(phi h' X)^T|^2`
    pub phi_hprime_x_sq: f64,
    /// `|(h' X)^T|^2`
    pub hprime_x_sq: f64,
    pub x_hprime_x: f64,
    pub x_phi_hprime_x: f64,
    /// `g(X, h' xi_top)`
    pub x_hprime_xi: f64,
    pub alpha_xx: f64,
    pub beta_xx: f64,
    pub alpha_prime_xx: f64,
    pub pi_x: f64,
    /// `pi(h(X, X))` for the active connection
    pub pi_h_xx: f64,
}

pub fn direction_invariants(sub: &SubmanifoldPoint, x: &Vector) -> Result<DirectionInvariants> {
    let xc = sub.coords(x)?;
    let model = sub.model();
    let d = sub.decomp();
    let corr = sub.corrections();
    let tangent_sq = |w: &Vector| sub.tangent().iter().map(|e| e.dot(w).powi(2)).sum::<f64>();
    let php = model.phi_hprime();
    Ok(DirectionInvariants {
        eta_x: model.eta(x),
        phat_x_sq: tangent_sq(&(&model.phi * x)),
        phi_hprime_x_sq: tangent_sq(&(&php * x)),
        hprime_x_sq: tangent_sq(&(&model.hprime * x)),
        x_hprime_x: bilinear(&model.hprime, x, x),
        x_phi_hprime_x: bilinear(&php, x, x),
        x_hprime_xi: bilinear(&model.hprime, x, &d.xi_top),
        alpha_xx: bilinear(&corr.alpha, x, x),
        beta_xx: bilinear(&corr.beta, x, x),
        alpha_prime_xx: bilinear(&corr.alpha_prime, x, x),
        pi_x: sub.spec().pi(x),
        pi_h_xx: sub.pi_h(&xc, &xc),
    })
}
