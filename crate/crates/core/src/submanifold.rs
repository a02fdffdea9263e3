//! A submanifold germ at a point of the space form: tangent and normal
//! frames, second fundamental forms, decompositions of the ambient
//! structure, and the intrinsic curvature of the induced connection.

use std::sync::OnceLock;

use crate::connection::{
    ambient_curvature_with, correction_tensors, ConnectionKind, ConnectionParams, ConnectionSpec, CorrectionTensors,
};
use crate::contact::ContactPointModel;
use crate::error::{Error, Result};
use crate::linalg::{
    bilinear, frobenius_sq, is_finite_matrix, max_abs_asymmetry, orthonormal_complement, orthonormalize_with_tol,
    split, Matrix, Plane, Vector,
};
use crate::EngineConfig;

/// Components of the ambient structure relative to `T_xM`.
///
/// Matrices indexed by the tangent frame use the (1,1) convention:
/// `phat[(a, b)] = <e_a, phi e_b>`, so `phat` is the matrix of `P-hat`.
#[derive(Debug, Clone, PartialEq)]
pub struct Decomposition {
    pub xi_top: Vector,
    pub xi_perp: Vector,
    pub p_top: Vector,
    pub p_perp: Vector,
    /// tangential part of `phi` on tangent vectors (n x n)
    pub phat: Matrix,
    /// normal part of `phi` on tangent vectors (p x n), `f[(r, b)] = <nu_r, phi e_b>`
    pub f: Matrix,
    pub hprime_top: Matrix,
    pub phi_hprime_top: Matrix,
}

/// All components `R(e_a, e_b, e_c, e_d)` of the induced curvature in the
/// tangent frame.
#[derive(Debug, Clone, PartialEq)]
pub struct CurvatureTable {
    n: usize,
    data: Vec<f64>,
}

impl CurvatureTable {
    fn idx(&self, a: usize, b: usize, c: usize, d: usize) -> usize {
        ((a * self.n + b) * self.n + c) * self.n + d
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, a: usize, b: usize, c: usize, d: usize) -> f64 {
        self.data[self.idx(a, b, c, d)]
    }

    /// Multilinear evaluation on tangent-frame coordinates.
    pub fn eval(&self, x: &Vector, y: &Vector, z: &Vector, w: &Vector) -> f64 {
        let n = self.n;
        let mut acc = 0.0;
        for a in 0..n {
            if x[a] == 0.0 {
                continue;
            }
            for b in 0..n {
                let xy = x[a] * y[b];
                if xy == 0.0 {
                    continue;
                }
                for c in 0..n {
                    let xyz = xy * z[c];
                    if xyz == 0.0 {
                        continue;
                    }
                    let base = self.idx(a, b, c, 0);
                    let mut row = 0.0;
                    for d in 0..n {
                        row += self.data[base + d] * w[d];
                    }
                    acc += xyz * row;
                }
            }
        }
        acc
    }

    /// `1/2 [R(u,v,v,u) - R(u,v,u,v)]` on coordinates.
    pub fn sectional(&self, u: &Vector, v: &Vector) -> f64 {
        0.5 * (self.eval(u, v, v, u) - self.eval(u, v, u, v))
    }

    /// Matrix of `Y -> 1/2 [R(x,Y,Y,x) - R(x,Y,x,Y)]`, symmetrized.
    pub fn sectional_form(&self, x: &Vector) -> Matrix {
        let n = self.n;
        let mut m = Matrix::zeros(n, n);
        for b in 0..n {
            for c in 0..n {
                let mut acc = 0.0;
                for a in 0..n {
                    if x[a] == 0.0 {
                        continue;
                    }
                    for d in 0..n {
                        acc += x[a] * x[d] * (self.get(a, b, c, d) - self.get(a, b, d, c));
                    }
                }
                m[(b, c)] = 0.5 * acc;
            }
        }
        (&m + m.transpose()) * 0.5
    }

    /// Symmetrized matrices of the raw and sectional Ricci quadratic forms:
    /// `X -> sum_j R(X,e_j,e_j,X)` and `X -> sum_j K(X, e_j)`.
    pub fn ricci_forms(&self) -> (Matrix, Matrix) {
        let n = self.n;
        let mut raw = Matrix::zeros(n, n);
        let mut sym = Matrix::zeros(n, n);
        for a in 0..n {
            for b in 0..n {
                let mut r = 0.0;
                let mut s = 0.0;
                for j in 0..n {
                    let v = self.get(a, j, j, b);
                    r += v;
                    s += 0.5 * (v - self.get(a, j, b, j));
                }
                raw[(a, b)] = r;
                sym[(a, b)] = s;
            }
        }
        ((&raw + raw.transpose()) * 0.5, (&sym + sym.transpose()) * 0.5)
    }
}

#[derive(Debug)]
pub struct SubmanifoldPoint {
    model: ContactPointModel,
    spec: ConnectionSpec,
    corr: CorrectionTensors,
    config: EngineConfig,
    tangent: Vec<Vector>,
    normal: Vec<Vector>,
    hhat: Vec<Matrix>,
    h: Vec<Matrix>,
    decomp: Decomposition,
    /// `<P, nu_r>` per normal direction
    pi_normal: Vec<f64>,
    table: OnceLock<CurvatureTable>,
}

impl Clone for SubmanifoldPoint {
    fn clone(&self) -> Self {
        SubmanifoldPoint {
            model: self.model.clone(),
            spec: self.spec.clone(),
            corr: self.corr.clone(),
            config: self.config,
            tangent: self.tangent.clone(),
            normal: self.normal.clone(),
            hhat: self.hhat.clone(),
            h: self.h.clone(),
            decomp: self.decomp.clone(),
            pi_normal: self.pi_normal.clone(),
            table: self.table.clone(),
        }
    }
}

/// Builds the germ from a tangent basis and the Levi-Civita second
/// fundamental form. `hhat[r]` holds `g(h-hat(e_i, e_j), nu_r)` where `e_i`
/// is the orthonormalized tangent basis and `nu_r` the derived normal frame.
pub fn attach(
    model: ContactPointModel,
    spec: ConnectionSpec,
    tangent_basis: &[Vector],
    hhat: Vec<Matrix>,
) -> Result<SubmanifoldPoint> {
    attach_with(model, spec, tangent_basis, hhat, EngineConfig::default())
}

pub fn attach_with(
    model: ContactPointModel,
    spec: ConnectionSpec,
    tangent_basis: &[Vector],
    hhat: Vec<Matrix>,
    config: EngineConfig,
) -> Result<SubmanifoldPoint> {
    let dim = model.dim();
    if spec.dim() != dim {
        return Err(Error::dims("connection dimension", dim, spec.dim()));
    }
    let n = tangent_basis.len();
    if n < 3 || n >= dim {
        return Err(Error::InvalidArgument(format!(
            "submanifold dimension must satisfy 3 <= n < {dim}, got {n}"
        )));
    }
    for v in tangent_basis {
        if v.len() != dim {
            return Err(Error::dims("tangent vector", dim, v.len()));
        }
    }
    let tangent = orthonormalize_with_tol(tangent_basis, config.rank_tol)?;
    let normal = orthonormal_complement(&tangent, dim);
    let p = normal.len();
    if hhat.len() != p {
        return Err(Error::dims("hhat slice count", p, hhat.len()));
    }
    for (r, slice) in hhat.iter().enumerate() {
        if slice.nrows() != n || slice.ncols() != n {
            return Err(Error::dims(format!("hhat[{r}]"), n, slice.nrows().max(slice.ncols())));
        }
        if !is_finite_matrix(slice) {
            return Err(Error::NonFinite {
                what: format!("hhat[{r}]"),
            });
        }
        let asym = max_abs_asymmetry(slice);
        if asym > config.symmetry_tol {
            return Err(Error::NonSymmetric {
                what: format!("hhat[{r}]"),
                residual: asym,
            });
        }
    }
    // exact symmetrization so downstream identities do not inherit round-off
    let hhat: Vec<Matrix> = hhat.into_iter().map(|s| (&s + s.transpose()) * 0.5).collect();

    let pi_normal: Vec<f64> = normal.iter().map(|nu| spec.p.dot(nu)).collect();
    let h: Vec<Matrix> = match spec.params {
        ConnectionParams::First { lambda2, .. } => hhat
            .iter()
            .zip(&pi_normal)
            .map(|(s, &pn)| s - Matrix::identity(n, n) * (lambda2 * pn))
            .collect(),
        ConnectionParams::Second { .. } => hhat.clone(),
    };

    let (xi_top, xi_perp) = split(&tangent, &model.xi);
    let (p_top, p_perp) = split(&tangent, &spec.p);
    let php = model.phi_hprime();
    let frame_matrix = |op: &Matrix| Matrix::from_fn(n, n, |a, b| bilinear(op, &tangent[a], &tangent[b]));
    let decomp = Decomposition {
        xi_top,
        xi_perp,
        p_top,
        p_perp,
        phat: frame_matrix(&model.phi),
        f: Matrix::from_fn(p, n, |r, b| bilinear(&model.phi, &normal[r], &tangent[b])),
        hprime_top: frame_matrix(&model.hprime),
        phi_hprime_top: frame_matrix(&php),
    };
    let corr = correction_tensors(&spec);

    Ok(SubmanifoldPoint {
        model,
        spec,
        corr,
        config,
        tangent,
        normal,
        hhat,
        h,
        decomp,
        pi_normal,
        table: OnceLock::new(),
    })
}

impl SubmanifoldPoint {
    pub fn model(&self) -> &ContactPointModel {
        &self.model
    }

    pub fn spec(&self) -> &ConnectionSpec {
        &self.spec
    }

    pub fn corrections(&self) -> &CorrectionTensors {
        &self.corr
    }

    pub fn config(&self) -> &EngineConfig {
        &self.config
    }

    pub fn kind(&self) -> ConnectionKind {
        self.spec.kind()
    }

    pub fn n(&self) -> usize {
        self.tangent.len()
    }

    pub fn codim(&self) -> usize {
        self.normal.len()
    }

    pub fn ambient_dim(&self) -> usize {
        self.model.dim()
    }

    pub fn tangent(&self) -> &[Vector] {
        &self.tangent
    }

    pub fn normal(&self) -> &[Vector] {
        &self.normal
    }

    pub fn hhat(&self) -> &[Matrix] {
        &self.hhat
    }

    /// Second fundamental form of the induced connection, per normal.
    pub fn h(&self) -> &[Matrix] {
        &self.h
    }

    pub fn decomp(&self) -> &Decomposition {
        &self.decomp
    }

    /// `<P, nu_r>` per normal direction.
    pub fn pi_normal(&self) -> &[f64] {
        &self.pi_normal
    }

    /// Tangent-frame coordinates of an ambient vector, rejecting vectors
    /// with a normal component.
    pub fn coords(&self, v: &Vector) -> Result<Vector> {
        if v.len() != self.ambient_dim() {
            return Err(Error::dims("tangent vector", self.ambient_dim(), v.len()));
        }
        let coords = Vector::from_iterator(self.n(), self.tangent.iter().map(|e| e.dot(v)));
        let residual = (v - self.to_ambient(&coords)).norm();
        if residual > self.config.tangent_tol * v.norm().max(1.0) {
            return Err(Error::OutsideTangent { residual });
        }
        Ok(coords)
    }

    pub fn to_ambient(&self, coords: &Vector) -> Vector {
        let mut out = Vector::zeros(self.ambient_dim());
        for (e, &c) in self.tangent.iter().zip(coords.iter()) {
            out.axpy(c, e, 1.0);
        }
        out
    }

    /// Normal components of `h(x, y)` for tangent coordinates.
    pub fn h_of(&self, x: &Vector, y: &Vector) -> Vector {
        Vector::from_iterator(self.codim(), self.h.iter().map(|s| bilinear(s, x, y)))
    }

    /// `pi(h(x, y)) = g(h(x, y), P)`.
    pub fn pi_h(&self, x: &Vector, y: &Vector) -> f64 {
        self.h
            .iter()
            .zip(&self.pi_normal)
            .map(|(s, &pn)| bilinear(s, x, y) * pn)
            .sum()
    }

    /// Mean curvature vector of the induced connection, normal components.
    pub fn mean_curvature(&self) -> Vector {
        let n = self.n() as f64;
        Vector::from_iterator(self.codim(), self.h.iter().map(|s| s.trace() / n))
    }

    /// Mean curvature vector as an ambient vector.
    pub fn mean_curvature_ambient(&self) -> Vector {
        let hm = self.mean_curvature();
        let mut out = Vector::zeros(self.ambient_dim());
        for (nu, &c) in self.normal.iter().zip(hm.iter()) {
            out.axpy(c, nu, 1.0);
        }
        out
    }

    pub fn mean_curvature_sq(&self) -> f64 {
        self.mean_curvature().norm_squared()
    }

    /// `||h||^2 = sum_r sum_ij (h^r_ij)^2`.
    pub fn h_norm_sq(&self) -> f64 {
        self.h.iter().map(frobenius_sq).sum()
    }

    /// `pi(H)`.
    pub fn pi_mean(&self) -> f64 {
        self.mean_curvature()
            .iter()
            .zip(&self.pi_normal)
            .map(|(a, b)| a * b)
            .sum()
    }

    /// Induced curvature on tangent-frame coordinates, computed through the
    /// ambient curvature and the Gauss equation.
    pub fn induced_curvature_coords(&self, x: &Vector, y: &Vector, z: &Vector, w: &Vector) -> f64 {
        let (xa, ya, za, wa) = (
            self.to_ambient(x),
            self.to_ambient(y),
            self.to_ambient(z),
            self.to_ambient(w),
        );
        let ambient = ambient_curvature_with(&self.model, &self.spec, &self.corr, &xa, &ya, &za, &wa);
        let hxw = self.h_of(x, w);
        let hyz = self.h_of(y, z);
        let hyw = self.h_of(y, w);
        let hxz = self.h_of(x, z);
        let gauss = hxw.dot(&hyz) - hyw.dot(&hxz);
        let g = |a: &Vector, b: &Vector| a.dot(b);
        let torsion_terms = match self.spec.params {
            ConnectionParams::First { lambda1, lambda2 } => {
                -(lambda1 - lambda2) * (self.pi_h(y, z) * g(x, w) - self.pi_h(x, z) * g(y, w))
            }
            ConnectionParams::Second { b, .. } => -b * self.pi_h(y, z) * g(x, w) + b * self.pi_h(x, z) * g(y, w),
        };
        ambient + gauss + torsion_terms
    }

    /// Cached table of all frame components of the induced curvature.
    pub fn curvature_table(&self) -> &CurvatureTable {
        self.table.get_or_init(|| {
            let n = self.n();
            let e: Vec<Vector> = (0..n).map(|i| crate::linalg::basis(n, i)).collect();
            let mut data = Vec::with_capacity(n * n * n * n);
            for a in 0..n {
                for b in 0..n {
                    for c in 0..n {
                        for d in 0..n {
                            data.push(self.induced_curvature_coords(&e[a], &e[b], &e[c], &e[d]));
                        }
                    }
                }
            }
            CurvatureTable { n, data }
        })
    }
}

/// `R(X,Y,Z,W)` of the induced connection for ambient tangent vectors.
pub fn induced_curvature(sub: &SubmanifoldPoint, x: &Vector, y: &Vector, z: &Vector, w: &Vector) -> Result<f64> {
    let (x, y, z, w) = (sub.coords(x)?, sub.coords(y)?, sub.coords(z)?, sub.coords(w)?);
    Ok(sub.induced_curvature_coords(&x, &y, &z, &w))
}

/// Symmetrized sectional curvature
/// `K(plane) = 1/2 [R(e1,e2,e2,e1) - R(e1,e2,e1,e2)]`.
pub fn sectional(sub: &SubmanifoldPoint, plane: &Plane) -> Result<f64> {
    let u = sub.coords(plane.e1())?;
    let v = sub.coords(plane.e2())?;
    Ok(sectional_coords(sub, &u, &v))
}

pub fn sectional_coords(sub: &SubmanifoldPoint, u: &Vector, v: &Vector) -> f64 {
    0.5 * (sub.induced_curvature_coords(u, v, v, u) - sub.induced_curvature_coords(u, v, u, v))
}

/// The two expressions of the scalar curvature over the tangent frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalarCurvature {
    /// `sum_{i<j} K(e_i ^ e_j)`
    pub pairwise: f64,
    /// `1/2 sum_{i,j} R(e_i, e_j, e_j, e_i)`
    pub full_sum: f64,
}

pub fn scalar_tau_forms(sub: &SubmanifoldPoint) -> ScalarCurvature {
    let n = sub.n();
    let e: Vec<Vector> = (0..n).map(|i| crate::linalg::basis(n, i)).collect();
    let mut pairwise = 0.0;
    let mut full_sum = 0.0;
    for i in 0..n {
        for j in 0..n {
            let rijji = sub.induced_curvature_coords(&e[i], &e[j], &e[j], &e[i]);
            full_sum += 0.5 * rijji;
            if i < j {
                pairwise += sectional_coords(sub, &e[i], &e[j]);
            }
        }
    }
    ScalarCurvature { pairwise, full_sum }
}

pub fn scalar_tau(sub: &SubmanifoldPoint) -> f64 {
    scalar_tau_forms(sub).pairwise
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RicciValue {
    /// `sum_{j>=2} R(X, e_j, e_j, X)`
    pub raw: f64,
    /// `sum_{j>=2} K(X ^ e_j)`
    pub symmetrized: f64,
}

/// Ricci curvature in a unit tangent direction, over the completion of `X`
/// obtained by orthonormalizing `{X}` against the tangent frame.
pub fn ricci(sub: &SubmanifoldPoint, x: &Vector) -> Result<RicciValue> {
    let xc = unit_coords(sub, x)?;
    let completion = orthonormal_complement(std::slice::from_ref(&xc), sub.n());
    Ok(ricci_over(sub, &xc, &completion))
}

/// Ricci curvature over a caller-supplied orthonormal completion (tangent
/// coordinates) of `X`.
pub fn ricci_with_completion(sub: &SubmanifoldPoint, x: &Vector, completion: &[Vector]) -> Result<RicciValue> {
    let xc = unit_coords(sub, x)?;
    if completion.len() + 1 != sub.n() {
        return Err(Error::dims("ricci completion", sub.n() - 1, completion.len()));
    }
    let mut all = vec![xc.clone()];
    all.extend(completion.iter().cloned());
    let residual = crate::linalg::gram_residual(&all);
    if residual > 1e-10 {
        return Err(Error::NotOrthonormal { residual });
    }
    Ok(ricci_over(sub, &xc, completion))
}

fn unit_coords(sub: &SubmanifoldPoint, x: &Vector) -> Result<Vector> {
    let xc = sub.coords(x)?;
    let norm = xc.norm();
    if (norm - 1.0).abs() > 1e-10 {
        return Err(Error::NotUnit { norm });
    }
    Ok(xc)
}

fn ricci_over(sub: &SubmanifoldPoint, x: &Vector, completion: &[Vector]) -> RicciValue {
    let mut raw = 0.0;
    let mut symmetrized = 0.0;
    for e in completion {
        raw += sub.induced_curvature_coords(x, e, e, x);
        symmetrized += sectional_coords(sub, x, e);
    }
    RicciValue { raw, symmetrized }
}
