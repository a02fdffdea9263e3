//! Casorati curvature and its normalized hyperplane variants.
//!
//! A hyperplane `L` of the tangent space is parametrized by its unit normal
//! `u`. With `Q = I - u u^T`,
//! `|Q h Q|_F^2 = |h|_F^2 - 2 u^T h^2 u + (u^T h u)^2`,
//! so `C(L_u)` is an even quartic on the sphere.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{frobenius_sq, gram_residual, sym_eigen_ascending, Matrix, Vector};
use crate::search::{maximize_on_sphere, minimize_on_sphere, SearchConfig, SphereOptimum};
use crate::submanifold::SubmanifoldPoint;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HyperplaneExtremum {
    pub value: f64,
    /// unit normal of the extremal hyperplane, tangent coordinates
    pub normal: Vec<f64>,
    pub evaluations: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CasoratiReport {
    pub c: f64,
    pub inf: HyperplaneExtremum,
    pub sup: HyperplaneExtremum,
    pub delta_c: f64,
    pub delta_c_hat: f64,
}

/// `C = (1/n) sum_r |h^r|_F^2`.
pub fn casorati_c(h: &[Matrix]) -> f64 {
    let n = h.first().map_or(1, |m| m.nrows()) as f64;
    h.iter().map(frobenius_sq).sum::<f64>() / n
}

/// `C(L) = (1/l) sum_r |h^r restricted to L|_F^2` for an orthonormal basis
/// of `L` in tangent coordinates.
pub fn casorati_of_subspace(h: &[Matrix], basis: &[Vector]) -> Result<f64> {
    let l = basis.len();
    if l == 0 {
        return Err(Error::InvalidArgument("subspace must be nonempty".into()));
    }
    let residual = gram_residual(basis);
    if residual > 1e-10 {
        return Err(Error::NotOrthonormal { residual });
    }
    let b = Matrix::from_columns(basis);
    let total: f64 = h.iter().map(|s| frobenius_sq(&(b.transpose() * s * &b))).sum();
    Ok(total / l as f64)
}

/// `C(L_u)` for the hyperplane with unit normal `u`.
pub fn hyperplane_value(h: &[Matrix], u: &Vector) -> f64 {
    let n = u.len();
    let mut total = 0.0;
    for s in h {
        let su = s * u;
        let quad = u.dot(&su);
        total += frobenius_sq(s) - 2.0 * su.norm_squared() + quad * quad;
    }
    total / (n - 1) as f64
}

pub fn casorati(sub: &SubmanifoldPoint) -> CasoratiReport {
    casorati_with(sub.h(), &sub.config().search)
}

pub fn casorati_with(h: &[Matrix], search: &SearchConfig) -> CasoratiReport {
    let n = h[0].nrows();
    let nf = n as f64;
    let c = casorati_c(h);
    let seeds = eigen_seeds(h);
    let f = |u: &Vector| hyperplane_value(h, u);
    let inf = extremum(minimize_on_sphere(n, f, search, &seeds));
    let sup = extremum(maximize_on_sphere(n, f, search, &seeds));
    let delta_c = 0.5 * c + (nf + 1.0) / (2.0 * nf) * inf.value;
    let delta_c_hat = 2.0 * c - (2.0 * nf - 1.0) / (2.0 * nf) * sup.value;
    CasoratiReport {
        c,
        inf,
        sup,
        delta_c,
        delta_c_hat,
    }
}

fn extremum(opt: SphereOptimum) -> HyperplaneExtremum {
    HyperplaneExtremum {
        value: opt.value,
        normal: opt.point.iter().copied().collect(),
        evaluations: opt.evaluations,
    }
}

/// Eigenvectors of every `h^r` and of `sum_r (h^r)^2`.
fn eigen_seeds(h: &[Matrix]) -> Vec<Vector> {
    let n = h[0].nrows();
    let mut square = Matrix::zeros(n, n);
    let mut seeds = Vec::new();
    for s in h {
        square += s * s;
        let (_, vecs) = sym_eigen_ascending(s);
        seeds.extend(vecs.column_iter().map(|c| c.into_owned()));
    }
    let (_, vecs) = sym_eigen_ascending(&square);
    seeds.extend(vecs.column_iter().map(|c| c.into_owned()));
    seeds
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{basis, orthonormal_complement, random_symmetric};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn diag(xs: &[f64]) -> Matrix {
        Matrix::from_diagonal(&Vector::from_column_slice(xs))
    }

    #[test]
    fn zero_form() {
        let r = casorati_with(&[Matrix::zeros(3, 3)], &SearchConfig::default());
        assert_eq!((r.c, r.delta_c, r.delta_c_hat), (0.0, 0.0, 0.0));
    }

    #[test]
    fn witness_inf_and_sup() {
        let h = [diag(&[1.0, 1.0, 2.0])];
        let r = casorati_with(&h, &SearchConfig::default());
        assert_eq!(r.c, 2.0);
        assert!((r.inf.value - 1.0).abs() < 1e-12);
        assert!(r.inf.normal[2].abs() > 1.0 - 1e-9);
        assert!((r.delta_c - 5.0 / 3.0).abs() < 1e-12);
        assert!((r.sup.value - 2.5).abs() < 1e-12);
        assert!((r.delta_c_hat - (4.0 - 5.0 / 6.0 * 2.5)).abs() < 1e-12);
    }

    #[test]
    fn closed_form_matches_projector() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for n in 3..6 {
            let h: Vec<Matrix> = (0..2).map(|_| random_symmetric(n, 1.5, &mut rng)).collect();
            for i in 0..n {
                let u = (basis(n, i) + basis(n, (i + 1) % n) * 0.3).normalize();
                let frame = orthonormal_complement(std::slice::from_ref(&u), n);
                let direct = casorati_of_subspace(&h, &frame).unwrap();
                assert!((direct - hyperplane_value(&h, &u)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn search_beats_dense_probe() {
        // the refined optimum must be at least as good as any sampled direction
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let h: Vec<Matrix> = (0..2).map(|_| random_symmetric(3, 2.0, &mut rng)).collect();
        let r = casorati_with(&h, &SearchConfig::default());
        let probes = crate::search::sphere_layout(3, 20_000);
        for u in probes.iter() {
            let v = hyperplane_value(&h, u);
            assert!(r.inf.value <= v + 1e-12);
            assert!(r.sup.value >= v - 1e-12);
        }
    }
}
