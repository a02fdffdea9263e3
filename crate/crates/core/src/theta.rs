//! The normalized k-Ricci infimum `Theta_k`.
//!
//! With the symmetrized sectional curvature `K`, the partial Ricci sum of a
//! k-plane `L` at a unit `X in L` is `sum_{j=2}^k K(X ^ e_j)`. For fixed
//! `X` the map `Y -> K(X ^ Y)` on `X^perp` is a quadratic form `S_X`, so the
//! infimum over `L` is the sum of the `k-1` smallest eigenvalues of `S_X`
//! on `X^perp`. Only the outer search over `X` is numerical.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{orthonormal_complement, sym_eigen_ascending, Matrix, Vector};
use crate::search::{minimize_on_sphere, SearchConfig};
use crate::submanifold::{CurvatureTable, SubmanifoldPoint};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ThetaMode {
    /// `k = n`: smallest eigenvalue of the Ricci quadratic form
    ExactEigen,
    /// `k = 2, n = 3`: dense grid over plane normals plus refinement
    Grid,
    /// everything else: sampled estimate over the unit sphere
    Multistart,
}

impl ThetaMode {
    pub fn as_str(self) -> &'static str {
        match self {
            ThetaMode::ExactEigen => "exact_eigen",
            ThetaMode::Grid => "grid",
            ThetaMode::Multistart => "multistart",
        }
    }

    /// Modes whose value is trusted as the infimum for certification.
    pub fn is_certified(self) -> bool {
        matches!(self, ThetaMode::ExactEigen | ThetaMode::Grid)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThetaValue {
    pub k: usize,
    pub value: f64,
    pub mode: ThetaMode,
    /// objective evaluations spent (1 for the eigen mode)
    pub samples: usize,
    pub certified: bool,
    /// tangent coordinates of the minimizing `X` (or plane normal for the
    /// grid mode)
    pub argmin: Vec<f64>,
}

pub fn theta_k(sub: &SubmanifoldPoint, k: usize) -> Result<ThetaValue> {
    theta_k_with(sub, k, &sub.config().search)
}

pub fn theta_k_with(sub: &SubmanifoldPoint, k: usize, search: &SearchConfig) -> Result<ThetaValue> {
    let n = sub.n();
    if k < 2 || k > n {
        return Err(Error::InvalidArgument(format!("k must satisfy 2 <= k <= {n}, got {k}")));
    }
    let table = sub.curvature_table();
    if k == n {
        let (_, sym) = table.ricci_forms();
        let (vals, vecs) = sym_eigen_ascending(&sym);
        return Ok(ThetaValue {
            k,
            value: vals[0] / (n - 1) as f64,
            mode: ThetaMode::ExactEigen,
            samples: 1,
            certified: true,
            argmin: vecs.column(0).iter().copied().collect(),
        });
    }
    if k == 2 && n == 3 {
        let seeds = ricci_eigenvectors(table);
        let opt = minimize_on_sphere(3, |u| sectional_by_normal(table, u), search, &seeds);
        return Ok(ThetaValue {
            k,
            value: opt.value,
            mode: ThetaMode::Grid,
            samples: opt.evaluations,
            certified: true,
            argmin: opt.point.iter().copied().collect(),
        });
    }
    let seeds = ricci_eigenvectors(table);
    let opt = minimize_on_sphere(n, |x| partial_ricci_min(table, x, k - 1), search, &seeds);
    Ok(ThetaValue {
        k,
        value: opt.value / (k - 1) as f64,
        mode: ThetaMode::Multistart,
        samples: opt.evaluations,
        certified: false,
        argmin: opt.point.iter().copied().collect(),
    })
}

/// `K` of the plane orthogonal to the unit vector `u` in a 3-dimensional
/// tangent space.
pub fn sectional_by_normal(table: &CurvatureTable, u: &Vector) -> f64 {
    let frame = orthonormal_complement(std::slice::from_ref(u), 3);
    table.sectional(&frame[0], &frame[1])
}

/// Smallest possible `sum_{j=2}^{count+1} K(x ^ e_j)` over orthonormal
/// `e_j` in `x^perp`.
pub fn partial_ricci_min(table: &CurvatureTable, x: &Vector, count: usize) -> f64 {
    let n = table.n();
    let complement = orthonormal_complement(std::slice::from_ref(x), n);
    let s = table.sectional_form(x);
    let b = Matrix::from_columns(&complement);
    let restricted = b.transpose() * s * &b;
    let (vals, _) = sym_eigen_ascending(&restricted);
    vals.iter().take(count).sum()
}

/// Eigenvectors of the Ricci form, used as extra search seeds both for
/// plane normals and for `X`.
fn ricci_eigenvectors(table: &CurvatureTable) -> Vec<Vector> {
    let (_, sym) = table.ricci_forms();
    let (_, vecs) = sym_eigen_ascending(&sym);
    vecs.column_iter().map(|c| c.into_owned()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::connection::{ConnectionKind, ConnectionSpec};
    use crate::contact::{random_point, standard_point};
    use crate::linalg::{basis, gaussian_vector, random_symmetric};
    use crate::submanifold::attach;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn witness() -> SubmanifoldPoint {
        let frame: Vec<Vector> = (0..3).map(|i| basis(5, i)).collect();
        attach(
            standard_point(2),
            ConnectionSpec::zero(ConnectionKind::First, 5),
            &frame,
            vec![
                Matrix::from_diagonal(&Vector::from_column_slice(&[1.0, 1.0, 2.0])),
                Matrix::zeros(3, 3),
            ],
        )
        .unwrap()
    }

    /// Symmetrized sectional curvature as a quadratic form on bivectors of a
    /// 3-space, polarized from plane values. Planes are indexed by their
    /// unit normal.
    fn bivector_matrix(sub: &SubmanifoldPoint) -> Matrix {
        let t = sub.curvature_table();
        let k = |u: &Vector| sectional_by_normal(t, u);
        let mut m = Matrix::zeros(3, 3);
        for s in 0..3 {
            m[(s, s)] = k(&basis(3, s));
        }
        for s in 0..3 {
            for r in (s + 1)..3 {
                let u = (basis(3, s) + basis(3, r)) / 2f64.sqrt();
                let v = k(&u) - 0.5 * (m[(s, s)] + m[(r, r)]);
                m[(s, r)] = v;
                m[(r, s)] = v;
            }
        }
        m
    }

    fn random_sub(seed: u64) -> SubmanifoldPoint {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let model = random_point(2, 0.4, -1.2, 2.5, seed, 0.8);
        let p = gaussian_vector(5, &mut rng) * 0.5;
        let d = crate::linalg::gaussian_matrix(5, 5, &mut rng) * 0.3;
        let spec = ConnectionSpec::first(1.3, -0.7, p, d).unwrap();
        let tangent: Vec<Vector> = (0..3).map(|_| gaussian_vector(5, &mut rng)).collect();
        let hhat = (0..2).map(|_| random_symmetric(3, 1.0, &mut rng)).collect();
        attach(model, spec, &tangent, hhat).unwrap()
    }

    #[test]
    fn constant_curvature_any_k() {
        let frame: Vec<Vector> = (0..4).map(|i| basis(7, i)).collect();
        let sub = attach(
            standard_point(3),
            ConnectionSpec::zero(ConnectionKind::First, 7),
            &frame,
            vec![Matrix::zeros(4, 4); 3],
        )
        .unwrap();
        for k in 2..=4 {
            let t = theta_k(&sub, k).unwrap();
            assert!((t.value - 1.0).abs() < 1e-12, "k={k}: {}", t.value);
        }
    }

    #[test]
    fn witness_values() {
        let sub = witness();
        let t2 = theta_k(&sub, 2).unwrap();
        assert_eq!(t2.mode, ThetaMode::Grid);
        assert!((t2.value - 2.0).abs() < 1e-12);
        let t3 = theta_k(&sub, 3).unwrap();
        assert_eq!(t3.mode, ThetaMode::ExactEigen);
        // Ricci form diag(5,5,6)
        assert!((t3.value - 2.5).abs() < 1e-12);
    }

    #[test]
    fn invalid_k() {
        let sub = witness();
        assert!(theta_k(&sub, 1).is_err());
        assert!(theta_k(&sub, 4).is_err());
    }

    #[test]
    fn grid_matches_bivector_eigenvalue() {
        for seed in 0..5 {
            let sub = random_sub(seed);
            let (vals, _) = sym_eigen_ascending(&bivector_matrix(&sub));
            let t = theta_k(&sub, 2).unwrap();
            assert!(
                (t.value - vals[0]).abs() < 1e-9,
                "seed {seed}: {} vs {}",
                t.value,
                vals[0]
            );
        }
    }

    #[test]
    fn ky_fan_reduction_matches_grid_for_k2() {
        // with n = 3 and k = 2 the multistart path must agree with the plane grid
        for seed in 0..3 {
            let sub = random_sub(seed + 10);
            let table = sub.curvature_table();
            let grid = theta_k(&sub, 2).unwrap().value;
            let opt = minimize_on_sphere(3, |x| partial_ricci_min(table, x, 1), &SearchConfig::default(), &[]);
            assert!((opt.value - grid).abs() < 1e-8);
        }
    }

    #[test]
    fn theta_is_monotone_bound_on_tau() {
        for seed in 0..4 {
            let sub = random_sub(seed + 20);
            let tau = crate::submanifold::scalar_tau(&sub);
            for k in 2..=3 {
                let t = theta_k(&sub, k).unwrap();
                assert!(2.0 * tau >= 6.0 * t.value - 1e-9);
            }
        }
    }
}
