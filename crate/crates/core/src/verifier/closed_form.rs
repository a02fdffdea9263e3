//! Expanded closed forms of the induced curvature in terms of the point
//! invariants. These are written independently of the Gauss-equation
//! pipeline so the two can be compared.

use crate::connection::ConnectionParams;
use crate::linalg::{bilinear, Vector};
use crate::submanifold::SubmanifoldPoint;

use super::plane::{DirectionInvariants, GlobalInvariants, PlaneInvariants};

/// Levi-Civita contribution to `R(u, v, v, u)` for orthonormal tangent
/// `u`, `v` (ambient vectors), expanded term by term.
pub fn lc_pair(sub: &SubmanifoldPoint, u: &Vector, v: &Vector) -> f64 {
    let model = sub.model();
    let (c, kappa, mu) = (model.c, model.kappa, model.mu_contact);
    let hp = &model.hprime;
    let php = model.phi_hprime();
    let (eu, ev) = (model.eta(u), model.eta(v));
    let huu = bilinear(hp, u, u);
    let hvv = bilinear(hp, v, v);
    let huv = bilinear(hp, u, v);
    let phuv = bilinear(&php, u, v);
    let phi_uv = u.dot(&(&model.phi * v));
    (c + 3.0) / 4.0 - (c + 3.0 - 4.0 * kappa) / 4.0 * (eu * eu + ev * ev)
        + (c - 1.0) / 4.0 * 3.0 * phi_uv * phi_uv
        + 0.5 * (phuv * phuv - huv * huv + huu * hvv - bilinear(&php, u, u) * bilinear(&php, v, v))
        + huu
        + 2.0 * eu * ev * huv
        - huu * ev * ev
        - hvv * eu * eu
        + hvv
        + mu * (huu * ev * ev + hvv * eu * eu - 2.0 * eu * ev * huv)
}

/// The structure part shared by `R(e1,e2,e2,e1)`, `-R(e1,e2,e1,e2)` and `K`.
pub fn plane_block(g: &GlobalInvariants, p: &PlaneInvariants) -> f64 {
    let (c, kappa, mu) = (g.c, g.kappa, g.mu);
    (c + 3.0) / 4.0 - (c + 3.0 - 4.0 * kappa) / 4.0 * p.gamma
        + 3.0 * (c - 1.0) / 4.0 * p.phi_plane
        + 0.5 * (p.det_hprime - p.det_phi_hprime)
        + p.tr_hprime
        + (mu - 1.0) * p.theta
}

/// `sum_r [h^r(u,u) h^r(v,v) - h^r(u,v)^2]` for tangent coordinates.
pub fn gauss_pair(sub: &SubmanifoldPoint, u: &Vector, v: &Vector) -> f64 {
    sub.h()
        .iter()
        .map(|s| bilinear(s, u, u) * bilinear(s, v, v) - bilinear(s, u, v).powi(2))
        .sum()
}

/// Connection terms of `R(u, v, v, u)` for an orthonormal pair. `u`, `v`
/// are ambient; `vc` is `v` in tangent coordinates.
pub fn connection_pair(sub: &SubmanifoldPoint, u: &Vector, v: &Vector, vc: &Vector) -> f64 {
    let corr = sub.corrections();
    match sub.spec().params {
        ConnectionParams::First {
            lambda1: l1,
            lambda2: l2,
        } => {
            -l1 * bilinear(&corr.alpha, v, v)
                - l2 * bilinear(&corr.alpha, u, u)
                - l2 * (l1 - l2) * bilinear(&corr.beta, u, u)
                - (l1 - l2) * sub.pi_h(vc, vc)
        }
        ConnectionParams::Second { b, .. } => {
            -b * bilinear(&corr.alpha_prime, v, v) + b * b * sub.spec().pi(v).powi(2) - b * sub.pi_h(vc, vc)
        }
    }
}

/// Connection terms of `R(u, v, u, v)`; `uc` is `u` in tangent coordinates.
pub fn connection_pair_swapped(sub: &SubmanifoldPoint, u: &Vector, v: &Vector, uc: &Vector) -> f64 {
    let corr = sub.corrections();
    match sub.spec().params {
        ConnectionParams::First {
            lambda1: l1,
            lambda2: l2,
        } => {
            l1 * bilinear(&corr.alpha, u, u)
                + l2 * bilinear(&corr.alpha, v, v)
                + l2 * (l1 - l2) * bilinear(&corr.beta, v, v)
                + (l1 - l2) * sub.pi_h(uc, uc)
        }
        ConnectionParams::Second { b, .. } => {
            b * bilinear(&corr.alpha_prime, u, u) - b * b * sub.spec().pi(u).powi(2) + b * sub.pi_h(uc, uc)
        }
    }
}

/// Connection terms of `K(plane)`.
pub fn connection_sectional(sub: &SubmanifoldPoint, p: &PlaneInvariants) -> f64 {
    match sub.spec().params {
        ConnectionParams::First {
            lambda1: l1,
            lambda2: l2,
        } => -(l1 + l2) / 2.0 * p.tr_alpha - l2 * (l1 - l2) / 2.0 * p.tr_beta - (l1 - l2) / 2.0 * p.g_tr_h_p,
        ConnectionParams::Second { b, .. } => {
            -b / 2.0 * p.tr_alpha_prime + b * b / 2.0 * p.p_plane_sq - b / 2.0 * p.pi_tr_h
        }
    }
}

/// The bracket `|(phi h')^T|^2 - |(h')^T|^2 + tr((h')^T)^2 - tr((phi h')^T)^2`.
pub fn hprime_bracket(g: &GlobalInvariants) -> f64 {
    g.phi_hprime_top_sq - g.hprime_top_sq + g.tr_hprime_top.powi(2) - g.tr_phi_hprime_top.powi(2)
}

/// `g(xi_top, h' xi_top) - tr((h')^T) |xi_top|^2`.
pub fn xi_bracket(g: &GlobalInvariants) -> f64 {
    g.xi_hprime_xi - g.tr_hprime_top * g.xi_top_sq
}

/// Scalar curvature in expanded form, without the second fundamental form
/// sum.
pub fn tau_structure(sub: &SubmanifoldPoint, g: &GlobalInvariants) -> f64 {
    let n = g.n as f64;
    let (c, kappa, mu) = (g.c, g.kappa, g.mu);
    let base = (n - 1.0) * n / 2.0 * (c + 3.0) / 4.0 + 3.0 * (c - 1.0) / 8.0 * g.phat_sq
        - (c + 3.0 - 4.0 * kappa) / 4.0 * (n - 1.0) * g.xi_top_sq
        + 0.25 * hprime_bracket(g)
        + (n - 1.0) * g.tr_hprime_top
        + (1.0 - mu) * xi_bracket(g);
    let conn = match sub.spec().params {
        ConnectionParams::First {
            lambda1: l1,
            lambda2: l2,
        } => {
            -(l1 + l2) / 2.0 * (n - 1.0) * g.lambda
                - l2 / 2.0 * (l1 - l2) * (n - 1.0) * g.tr_beta
                - (l1 - l2) / 2.0 * (n - 1.0) * n * g.pi_mean
        }
        ConnectionParams::Second { b, .. } => {
            -(n - 1.0) / 2.0 * b * g.lambda_prime + (n - 1.0) / 2.0 * b * b * g.p_top_sq
                - b / 2.0 * (n - 1.0) * n * g.pi_mean
        }
    };
    base + conn
}

/// The collected terms `A` of the identity `2 tau - A = n^2 |H|^2 - |h|^2`,
/// read off the Theta and Casorati bounds.
pub fn identity_block(sub: &SubmanifoldPoint, g: &GlobalInvariants) -> f64 {
    let n = g.n as f64;
    let (c, kappa, mu) = (g.c, g.kappa, g.mu);
    let base = (c + 3.0) / 4.0 * (n - 1.0) * n + 3.0 * (c - 1.0) / 4.0 * g.phat_sq
        - (c + 3.0 - 4.0 * kappa) / 2.0 * (n - 1.0) * g.xi_top_sq
        + 0.5 * hprime_bracket(g)
        + 2.0 * (n - 1.0) * g.tr_hprime_top
        + 2.0 * (1.0 - mu) * xi_bracket(g);
    let conn = match sub.spec().params {
        ConnectionParams::First {
            lambda1: l1,
            lambda2: l2,
        } => {
            -g.lambda * (n - 1.0) * (l1 + l2)
                - l2 * (l1 - l2) * (n - 1.0) * g.tr_beta
                - (n - 1.0) * n * (l1 - l2) * g.pi_mean
        }
        ConnectionParams::Second { b, .. } => {
            -(n - 1.0) * b * g.lambda_prime + (n - 1.0) * b * b * g.p_top_sq - b * (n - 1.0) * n * g.pi_mean
        }
    };
    base + conn
}

/// Structure part of the Ricci expansion in a unit direction `X`.
pub fn ricci_structure(g: &GlobalInvariants, d: &DirectionInvariants) -> f64 {
    let n = g.n as f64;
    let (c, kappa, mu) = (g.c, g.kappa, g.mu);
    let ex2 = d.eta_x * d.eta_x;
    (n - 1.0) * (c + 3.0) / 4.0 + 3.0 * (c - 1.0) / 4.0 * d.phat_x_sq
        - (c + 3.0 - 4.0 * kappa) / 4.0 * ((n - 2.0) * ex2 + g.xi_top_sq)
        + 0.5
            * (d.phi_hprime_x_sq - d.hprime_x_sq + d.x_hprime_x * g.tr_hprime_top
                - d.x_phi_hprime_x * g.tr_phi_hprime_top)
        + (n - 2.0 - g.xi_top_sq + mu * g.xi_top_sq) * d.x_hprime_x
        + (1.0 - ex2 + mu * ex2) * g.tr_hprime_top
        + (2.0 - 2.0 * mu) * d.eta_x * d.x_hprime_xi
}

/// Connection part of the Ricci expansion. `alternate_lambda` swaps the
/// second-kind `lambda'` for the ambient trace of `alpha`.
pub fn ricci_connection(
    sub: &SubmanifoldPoint,
    g: &GlobalInvariants,
    d: &DirectionInvariants,
    alternate_lambda: bool,
) -> f64 {
    let n = g.n as f64;
    match sub.spec().params {
        ConnectionParams::First {
            lambda1: l1,
            lambda2: l2,
        } => {
            -l1 * g.lambda + (l1 - l2 * (n - 1.0)) * d.alpha_xx
                - l2 * (l1 - l2) * (n - 1.0) * d.beta_xx
                - n * (l1 - l2) * g.pi_mean
                + (l1 - l2) * d.pi_h_xx
        }
        ConnectionParams::Second { b, .. } => {
            let lambda = if alternate_lambda {
                sub.corrections().trace_alpha
            } else {
                g.lambda_prime
            };
            -b * lambda + b * d.alpha_prime_xx + b * b * g.p_top_sq - b * b * d.pi_x * d.pi_x - n * b * g.pi_mean
                + b * d.pi_h_xx
        }
    }
}

/// `sum_r sum_{j>=2} [h_11 h_jj - h_1j^2]` with `e_1 = X`, written without a
/// completion: `sum_r [h(X,X) tr h - |h X|^2]`.
pub fn ricci_gauss(sub: &SubmanifoldPoint, xc: &Vector) -> f64 {
    sub.h()
        .iter()
        .map(|s| bilinear(s, xc, xc) * s.trace() - (s * xc).norm_squared())
        .sum()
}
