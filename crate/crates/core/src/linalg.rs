//! Small dense linear algebra in a fixed orthonormal frame.
//!
//! Every tensor is stored by components in an orthonormal frame, so the
//! metric is the identity and `g(X, Y)` is a dot product. Conventions:
//!
//! * a (0,2)-tensor `B` is a [`Matrix`] with `B[(i, j)] = B(e_i, e_j)`; it is
//!   not assumed to be symmetric;
//! * a (1,1)-tensor `A` is a [`Matrix`] acting on column vectors, so
//!   `A[(i, j)] = g(e_i, A e_j)`.

use nalgebra::{DMatrix, DVector, Matrix2};
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

pub type Vector = DVector<f64>;
pub type Matrix = DMatrix<f64>;

/// Relative singular-value cutoff for rank decisions.
pub const DEFAULT_RANK_TOL: f64 = 1e-10;
/// Absolute tolerance on Gram-matrix residuals of a frame.
pub const ORTHONORMAL_TOL: f64 = 1e-12;

/// Standard basis vector `e_i` of `R^dim`.
pub fn basis(dim: usize, i: usize) -> Vector {
    let mut v = Vector::zeros(dim);
    v[i] = 1.0;
    v
}

/// `x^T B y`.
pub fn bilinear(b: &Matrix, x: &Vector, y: &Vector) -> f64 {
    debug_assert_eq!(b.nrows(), x.len());
    debug_assert_eq!(b.ncols(), y.len());
    let mut acc = 0.0;
    for i in 0..b.nrows() {
        if x[i] == 0.0 {
            continue;
        }
        let mut row = 0.0;
        for j in 0..b.ncols() {
            row += b[(i, j)] * y[j];
        }
        acc += x[i] * row;
    }
    acc
}

pub fn max_abs_asymmetry(m: &Matrix) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..m.nrows() {
        for j in (i + 1)..m.ncols() {
            worst = worst.max((m[(i, j)] - m[(j, i)]).abs());
        }
    }
    worst
}

pub fn is_finite_matrix(m: &Matrix) -> bool {
    m.iter().all(|x| x.is_finite())
}

pub fn is_finite_vector(v: &Vector) -> bool {
    v.iter().all(|x| x.is_finite())
}

/// Largest `|<v_i, v_j> - delta_ij|` over the family.
pub fn gram_residual(vectors: &[Vector]) -> f64 {
    let mut worst: f64 = 0.0;
    for (i, a) in vectors.iter().enumerate() {
        for (j, b) in vectors.iter().enumerate().skip(i) {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((a.dot(b) - target).abs());
        }
    }
    worst
}

/// Numerical rank of the family, counting singular values above
/// `rel_tol * sigma_max`.
pub fn numerical_rank(vectors: &[Vector], rel_tol: f64) -> usize {
    if vectors.is_empty() {
        return 0;
    }
    let m = Matrix::from_columns(vectors);
    let sv = m.singular_values();
    let largest = sv.iter().cloned().fold(0.0, f64::max);
    if largest == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > rel_tol * largest).count()
}

/// Orthonormalizes a linearly independent family, preserving its span and
/// the flag `span(v_1..v_k)` for every prefix.
pub fn orthonormalize(vectors: &[Vector]) -> Result<Vec<Vector>> {
    orthonormalize_with_tol(vectors, DEFAULT_RANK_TOL)
}

pub fn orthonormalize_with_tol(vectors: &[Vector], rel_tol: f64) -> Result<Vec<Vector>> {
    if let Some(first) = vectors.first() {
        let dim = first.len();
        if let Some(bad) = vectors.iter().find(|v| v.len() != dim) {
            return Err(Error::dims("orthonormalize input", dim, bad.len()));
        }
        if vectors.iter().any(|v| !is_finite_vector(v)) {
            return Err(Error::NonFinite {
                what: "orthonormalize input".into(),
            });
        }
    }
    let rank = numerical_rank(vectors, rel_tol);
    if rank < vectors.len() {
        return Err(Error::RankDeficient {
            rank,
            expected: vectors.len(),
        });
    }
    let mut out: Vec<Vector> = Vec::with_capacity(vectors.len());
    for v in vectors {
        let mut w = v.clone();
        // two passes of modified Gram-Schmidt
        for _ in 0..2 {
            for q in &out {
                let proj = q.dot(&w);
                w.axpy(-proj, q, 1.0);
            }
        }
        let norm = w.norm();
        if norm <= rel_tol * v.norm().max(f64::MIN_POSITIVE) {
            return Err(Error::RankDeficient {
                rank: out.len(),
                expected: vectors.len(),
            });
        }
        out.push(w / norm);
    }
    Ok(out)
}

/// Orthonormal basis of the orthogonal complement of an orthonormal frame
/// in `R^dim`. Each step takes the standard basis vector with the largest
/// component outside the current span (lowest index on ties).
pub fn orthonormal_complement(frame: &[Vector], dim: usize) -> Vec<Vector> {
    let target = dim.saturating_sub(frame.len());
    let mut all: Vec<Vector> = frame.to_vec();
    let mut out = Vec::with_capacity(target);
    let project_off = |all: &[Vector], mut w: Vector| {
        for _ in 0..2 {
            for q in all {
                let proj = q.dot(&w);
                w.axpy(-proj, q, 1.0);
            }
        }
        w
    };
    while out.len() < target {
        let mut best: Option<Vector> = None;
        for i in 0..dim {
            let w = project_off(&all, basis(dim, i));
            if best.as_ref().is_none_or(|b| w.norm() > b.norm() + 1e-12) {
                best = Some(w);
            }
        }
        let w = best.expect("dim > 0");
        // re-project once more from the normalized vector for accuracy
        let q = project_off(&all, w.normalize()).normalize();
        all.push(q.clone());
        out.push(q);
    }
    out
}

/// Decomposes `v` into its component in `span(frame)` and the remainder.
/// `frame` must be orthonormal.
pub fn split(frame: &[Vector], v: &Vector) -> (Vector, Vector) {
    let mut tangential = Vector::zeros(v.len());
    for e in frame {
        tangential.axpy(e.dot(v), e, 1.0);
    }
    let normal = v - &tangential;
    (tangential, normal)
}

/// An oriented 2-plane given by an orthonormal pair.
#[derive(Debug, Clone, PartialEq)]
pub struct Plane {
    e1: Vector,
    e2: Vector,
}

impl Plane {
    pub fn new(e1: Vector, e2: Vector) -> Result<Self> {
        if e1.len() != e2.len() {
            return Err(Error::dims("plane basis", e1.len(), e2.len()));
        }
        let residual = gram_residual(&[e1.clone(), e2.clone()]);
        if residual > ORTHONORMAL_TOL {
            return Err(Error::NotOrthonormal { residual });
        }
        Ok(Plane { e1, e2 })
    }

    /// Plane spanned by two independent vectors (Gram-Schmidt on the pair).
    pub fn spanned_by(u: &Vector, v: &Vector) -> Result<Self> {
        let q = orthonormalize(&[u.clone(), v.clone()])?;
        let mut it = q.into_iter();
        Ok(Plane {
            e1: it.next().unwrap(),
            e2: it.next().unwrap(),
        })
    }

    pub fn e1(&self) -> &Vector {
        &self.e1
    }

    pub fn e2(&self) -> &Vector {
        &self.e2
    }

    pub fn dim(&self) -> usize {
        self.e1.len()
    }

    /// Same plane, basis rotated in-plane by `angle`.
    pub fn rotated(&self, angle: f64) -> Plane {
        let (s, c) = angle.sin_cos();
        Plane {
            e1: &self.e1 * c + &self.e2 * s,
            e2: &self.e2 * c - &self.e1 * s,
        }
    }

    /// Same plane with the orientation flipped (`e2 -> -e2`).
    pub fn reflected(&self) -> Plane {
        Plane {
            e1: self.e1.clone(),
            e2: -&self.e2,
        }
    }
}

/// The 2x2 matrix `B(e_i, e_j)` of a (0,2)-tensor on a plane.
pub fn restrict_form(b: &Matrix, plane: &Plane) -> Result<Matrix2<f64>> {
    let d = plane.dim();
    if b.nrows() != d || b.ncols() != d {
        return Err(Error::dims("restrict_form tensor", d, b.nrows()));
    }
    let (e1, e2) = (plane.e1(), plane.e2());
    Ok(Matrix2::new(
        bilinear(b, e1, e1),
        bilinear(b, e1, e2),
        bilinear(b, e2, e1),
        bilinear(b, e2, e2),
    ))
}

/// Eigen-decomposition of the symmetric part of `m`, eigenvalues ascending,
/// eigenvectors as the matching columns.
pub fn sym_eigen_ascending(m: &Matrix) -> (Vec<f64>, Matrix) {
    let sym = (m + m.transpose()) * 0.5;
    let eig = sym.symmetric_eigen();
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = Matrix::from_columns(
        &order
            .iter()
            .map(|&i| eig.eigenvectors.column(i).into_owned())
            .collect::<Vec<_>>(),
    );
    (values, vectors)
}

/// Gaussian vector with independent standard normal entries.
pub fn gaussian_vector<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Vector {
    Vector::from_fn(dim, |_, _| rng.sample(StandardNormal))
}

pub fn gaussian_matrix<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> Matrix {
    Matrix::from_fn(rows, cols, |_, _| rng.sample(StandardNormal))
}

/// Random orthogonal matrix from orthonormalizing a Gaussian matrix.
/// The determinant sign is whatever the draw produces.
pub fn random_orthogonal<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Matrix {
    loop {
        let cols: Vec<Vector> = (0..dim).map(|_| gaussian_vector(dim, rng)).collect();
        if let Ok(q) = orthonormalize(&cols) {
            return Matrix::from_columns(&q);
        }
    }
}

/// Random symmetric matrix with Frobenius norm `scale`.
pub fn random_symmetric<R: Rng + ?Sized>(dim: usize, scale: f64, rng: &mut R) -> Matrix {
    let g = gaussian_matrix(dim, dim, rng);
    let s = (&g + g.transpose()) * 0.5;
    let norm = s.norm();
    if norm == 0.0 {
        s
    } else {
        s * (scale / norm)
    }
}

pub fn frobenius_sq(m: &Matrix) -> f64 {
    m.iter().map(|x| x * x).sum()
}
