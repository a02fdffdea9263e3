//! The two generalized semi-symmetric non-metric connections at a point.
//!
//! First kind: `nabla_X Y = LC_X Y + l1 pi(Y) X - l2 g(X,Y) P`.
//! Second kind: `nabla_X Y = LC_X Y + a pi(X) Y + b pi(Y) X`.
//!
//! `pi(X) = <P, X>` and `D` is the value of the Levi-Civita derivative of
//! `pi` at the point, `D[(i, j)] = (LC_{e_i} pi)(e_j)`. `D` is free data.

use serde::{Deserialize, Serialize};

use crate::contact::{curvature_lc, ContactPointModel};
use crate::error::{Error, Result};
use crate::linalg::{bilinear, is_finite_matrix, is_finite_vector, Matrix, Vector};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ConnectionKind {
    First,
    Second,
}

impl ConnectionKind {
    pub fn number(self) -> u8 {
        match self {
            ConnectionKind::First => 1,
            ConnectionKind::Second => 2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum ConnectionParams {
    First { lambda1: f64, lambda2: f64 },
    Second { a: f64, b: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConnectionSpec {
    pub params: ConnectionParams,
    pub p: Vector,
    pub d: Matrix,
}

impl ConnectionSpec {
    pub fn first(lambda1: f64, lambda2: f64, p: Vector, d: Matrix) -> Result<Self> {
        Self::new(ConnectionParams::First { lambda1, lambda2 }, p, d)
    }

    pub fn second(a: f64, b: f64, p: Vector, d: Matrix) -> Result<Self> {
        Self::new(ConnectionParams::Second { a, b }, p, d)
    }

    pub fn new(params: ConnectionParams, p: Vector, d: Matrix) -> Result<Self> {
        let n = p.len();
        if d.nrows() != n || d.ncols() != n {
            return Err(Error::dims("connection D", n, d.nrows().max(d.ncols())));
        }
        let finite_params = match params {
            ConnectionParams::First { lambda1, lambda2 } => lambda1.is_finite() && lambda2.is_finite(),
            ConnectionParams::Second { a, b } => a.is_finite() && b.is_finite(),
        };
        if !finite_params || !is_finite_vector(&p) || !is_finite_matrix(&d) {
            return Err(Error::NonFinite {
                what: "connection spec".into(),
            });
        }
        Ok(ConnectionSpec { params, p, d })
    }

    /// All-zero connection data of the given kind in dimension `dim`; its
    /// curvature is the Levi-Civita one.
    pub fn zero(kind: ConnectionKind, dim: usize) -> Self {
        let params = match kind {
            ConnectionKind::First => ConnectionParams::First {
                lambda1: 0.0,
                lambda2: 0.0,
            },
            ConnectionKind::Second => ConnectionParams::Second { a: 0.0, b: 0.0 },
        };
        ConnectionSpec {
            params,
            p: Vector::zeros(dim),
            d: Matrix::zeros(dim, dim),
        }
    }

    pub fn kind(&self) -> ConnectionKind {
        match self.params {
            ConnectionParams::First { .. } => ConnectionKind::First,
            ConnectionParams::Second { .. } => ConnectionKind::Second,
        }
    }

    pub fn dim(&self) -> usize {
        self.p.len()
    }

    pub fn pi(&self, x: &Vector) -> f64 {
        self.p.dot(x)
    }

    /// `(lambda1, lambda2)`, zero for the second kind.
    pub fn lambdas(&self) -> (f64, f64) {
        match self.params {
            ConnectionParams::First { lambda1, lambda2 } => (lambda1, lambda2),
            ConnectionParams::Second { .. } => (0.0, 0.0),
        }
    }

    /// `(a, b)`, zero for the first kind.
    pub fn ab(&self) -> (f64, f64) {
        match self.params {
            ConnectionParams::First { .. } => (0.0, 0.0),
            ConnectionParams::Second { a, b } => (a, b),
        }
    }
}

/// `alpha`, `beta` (first kind) and `alpha'` (second kind) with their
/// traces over the full ambient frame.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrectionTensors {
    pub alpha: Matrix,
    pub beta: Matrix,
    pub alpha_prime: Matrix,
    pub trace_alpha: f64,
    /// trace of the `beta` tensor; not the contact constant
    pub m_beta: f64,
    pub trace_alpha_prime: f64,
}

/// `alpha(X,Y) = D(X,Y) - l1 pi(X)pi(Y) + (l2/2) g(X,Y) pi(P)`,
/// `beta(X,Y) = (pi(P)/2) g(X,Y) + pi(X)pi(Y)`, `alpha' = D`.
///
/// For the second kind `l1 = l2 = 0`, so `alpha = D`.
pub fn correction_tensors(spec: &ConnectionSpec) -> CorrectionTensors {
    let (l1, l2) = spec.lambdas();
    let n = spec.dim();
    let p = &spec.p;
    let pp = p.dot(p);
    let outer = p * p.transpose();
    let eye = Matrix::identity(n, n);
    let alpha = &spec.d - &outer * l1 + &eye * (0.5 * l2 * pp);
    let beta = &eye * (0.5 * pp) + &outer;
    let alpha_prime = spec.d.clone();
    CorrectionTensors {
        trace_alpha: alpha.trace(),
        m_beta: beta.trace(),
        trace_alpha_prime: alpha_prime.trace(),
        alpha,
        beta,
        alpha_prime,
    }
}

/// Curvature `R(X,Y,Z,W) = <R(X,Y)Z, W>` of the connection, expressed
/// through the Levi-Civita curvature of the space form.
pub fn ambient_curvature(
    model: &ContactPointModel,
    spec: &ConnectionSpec,
    x: &Vector,
    y: &Vector,
    z: &Vector,
    w: &Vector,
) -> f64 {
    let corr = correction_tensors(spec);
    ambient_curvature_with(model, spec, &corr, x, y, z, w)
}

/// Same as [`ambient_curvature`] with the correction tensors precomputed.
pub fn ambient_curvature_with(
    model: &ContactPointModel,
    spec: &ConnectionSpec,
    corr: &CorrectionTensors,
    x: &Vector,
    y: &Vector,
    z: &Vector,
    w: &Vector,
) -> f64 {
    curvature_lc(model, x, y, z, w) + curvature_correction(spec, corr, x, y, z, w)
}

/// The part of the connection curvature beyond the Levi-Civita one.
pub fn curvature_correction(
    spec: &ConnectionSpec,
    corr: &CorrectionTensors,
    x: &Vector,
    y: &Vector,
    z: &Vector,
    w: &Vector,
) -> f64 {
    let g = |a: &Vector, b: &Vector| a.dot(b);
    match spec.params {
        ConnectionParams::First { lambda1, lambda2 } => {
            let al = |a: &Vector, b: &Vector| bilinear(&corr.alpha, a, b);
            let be = |a: &Vector, b: &Vector| bilinear(&corr.beta, a, b);
            lambda1 * al(x, z) * g(y, w) - lambda1 * al(y, z) * g(x, w) + lambda2 * g(x, z) * al(y, w)
                - lambda2 * g(y, z) * al(x, w)
                + lambda2 * (lambda1 - lambda2) * (g(x, z) * be(y, w) - g(y, z) * be(x, w))
        }
        ConnectionParams::Second { a, b } => {
            let ap = |u: &Vector, v: &Vector| bilinear(&corr.alpha_prime, u, v);
            let pi = |u: &Vector| spec.pi(u);
            -a * ap(y, x) * g(z, w) + a * ap(x, y) * g(z, w) - b * ap(y, z) * g(x, w)
                + b * ap(x, z) * g(y, w)
                + b * b * pi(y) * pi(z) * g(x, w)
                - b * b * pi(x) * pi(z) * g(y, w)
        }
    }
}
