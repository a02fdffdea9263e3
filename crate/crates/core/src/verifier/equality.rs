use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::connection::{ConnectionKind, ConnectionParams, ConnectionSpec};
use crate::contact::{random_point, standard_point};
use crate::error::{Error, Result};
use crate::linalg::{basis, gaussian_matrix, gaussian_vector, sym_eigen_ascending, Matrix, Plane, Vector};
use crate::submanifold::{attach, SubmanifoldPoint};

use super::theorems::{TheoremArgs, TheoremId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EqualityKind {
    /// `A_{n+1} = diag(h11, h22, h11+h22, ...)`, trace-free 2x2 blocks elsewhere
    Cor32,
    /// `A_{n+1} = diag(a, ..., a, 2a)`
    Thm35I,
    /// `A_{n+1} = diag(2a, ..., 2a, a)`
    Thm35Ii,
}

impl EqualityKind {
    pub fn as_str(self) -> &'static str {
        match self {
            EqualityKind::Cor32 => "cor32",
            EqualityKind::Thm35I => "thm35_i",
            EqualityKind::Thm35Ii => "thm35_ii",
        }
    }

    fn theorem(self, kind: ConnectionKind) -> TheoremId {
        match (self, kind) {
            (EqualityKind::Cor32, ConnectionKind::First) => TheoremId::T3_1,
            (EqualityKind::Thm35I, ConnectionKind::First) => TheoremId::T3_5i,
            (EqualityKind::Thm35Ii, ConnectionKind::First) => TheoremId::T3_5ii,
            (EqualityKind::Cor32, ConnectionKind::Second) => TheoremId::T4_1,
            (EqualityKind::Thm35I, ConnectionKind::Second) => TheoremId::T4_4i,
            (EqualityKind::Thm35Ii, ConnectionKind::Second) => TheoremId::T4_4ii,
        }
    }
}

impl fmt::Display for EqualityKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for EqualityKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "cor32" => Ok(EqualityKind::Cor32),
            "thm35_i" => Ok(EqualityKind::Thm35I),
            "thm35_ii" => Ok(EqualityKind::Thm35Ii),
            other => Err(Error::InvalidArgument(format!(
                "unknown equality case `{other}` (expected cor32, thm35_i or thm35_ii)"
            ))),
        }
    }
}

/// A constructed equality instance with the theorem and arguments whose
/// slack should vanish.
#[derive(Debug, Clone)]
pub struct EqualityCase {
    pub kind: EqualityKind,
    pub sub: SubmanifoldPoint,
    pub theorem: TheoremId,
    pub args: TheoremArgs,
    /// tangent-frame indices of the plane for the Chen bound
    pub plane_indices: Option<[usize; 2]>,
}

const SHAPE_KEYS: &[&str] = &["h11", "h22", "x11", "x12", "a"];
const EXTRA_KEYS: &[&str] = &[
    "kind",
    "lambda1",
    "lambda2",
    "conn_a",
    "conn_b",
    "p_scale",
    "d_scale",
    "c",
    "kappa",
    "mu",
    "hprime_scale",
];

/// Builds the printed equality shape on the tangent frame `e_1..e_n` of
/// the standard structure (`c = 1`, `kappa = 1`, `h' = 0`) unless
/// ambient parameters are given. `P` is always tangent so `h = h-hat`.
///
/// Parameters: `h11`, `h22`, `x11`, `x12` (cor32); `a` (thm35); optional
/// `kind` (1 or 2), `lambda1`, `lambda2`, `conn_a`, `conn_b`, `p_scale`,
/// `d_scale`, `c`, `kappa`, `mu`, `hprime_scale`.
pub fn equality_instance(
    kind: EqualityKind,
    n: usize,
    params: &BTreeMap<String, f64>,
    seed: u64,
) -> Result<EqualityCase> {
    for key in params.keys() {
        if !SHAPE_KEYS.contains(&key.as_str()) && !EXTRA_KEYS.contains(&key.as_str()) {
            return Err(Error::InvalidArgument(format!("unknown parameter `{key}`")));
        }
    }
    for (key, v) in params {
        if !v.is_finite() {
            return Err(Error::InvalidArgument(format!("parameter `{key}` is not finite")));
        }
    }
    if n < 3 {
        return Err(Error::InvalidArgument(format!("n must be at least 3, got {n}")));
    }
    let get = |k: &str, default: f64| params.get(k).copied().unwrap_or(default);
    let conn_kind = match get("kind", 1.0) {
        1.0 => ConnectionKind::First,
        2.0 => ConnectionKind::Second,
        v => return Err(Error::InvalidArgument(format!("kind must be 1 or 2, got {v}"))),
    };

    let extra_block = kind == EqualityKind::Cor32 && (params.contains_key("x11") || params.contains_key("x12"));
    let codim = if extra_block { 2 } else { 1 };
    // smallest m with 2m + 1 >= n + codim
    let m = (n + codim - 1).div_ceil(2);
    let dim = 2 * m + 1;
    let p = dim - n;

    let mut shape = Matrix::zeros(n, n);
    let mut hhat = vec![Matrix::zeros(n, n); p];
    match kind {
        EqualityKind::Cor32 => {
            let (h11, h22) = (get("h11", 1.0), get("h22", 1.0));
            shape[(0, 0)] = h11;
            shape[(1, 1)] = h22;
            for i in 2..n {
                shape[(i, i)] = h11 + h22;
            }
            if extra_block {
                let (x11, x12) = (get("x11", 0.0), get("x12", 0.0));
                let block = &mut hhat[1];
                block[(0, 0)] = x11;
                block[(1, 1)] = -x11;
                block[(0, 1)] = x12;
                block[(1, 0)] = x12;
            }
        }
        EqualityKind::Thm35I | EqualityKind::Thm35Ii => {
            if params.contains_key("h11")
                || params.contains_key("h22")
                || params.contains_key("x11")
                || params.contains_key("x12")
            {
                return Err(Error::InvalidArgument(
                    "thm35 cases take only the shape parameter `a`".into(),
                ));
            }
            let a = get("a", 1.0);
            let (bulk, last) = if kind == EqualityKind::Thm35I {
                (a, 2.0 * a)
            } else {
                (2.0 * a, a)
            };
            for i in 0..n - 1 {
                shape[(i, i)] = bulk;
            }
            shape[(n - 1, n - 1)] = last;
        }
    }
    hhat[0] = shape;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ambient_custom = ["c", "kappa", "mu", "hprime_scale"]
        .iter()
        .any(|k| params.contains_key(*k));
    let model = if ambient_custom {
        random_point(
            m,
            get("kappa", 1.0),
            get("mu", 0.0),
            get("c", 1.0),
            seed,
            get("hprime_scale", 0.0),
        )
    } else {
        standard_point(m)
    };

    let tangent: Vec<Vector> = (0..n).map(|i| basis(dim, i)).collect();
    let p_scale = get("p_scale", 0.0);
    let mut p_vec = Vector::zeros(dim);
    if p_scale != 0.0 {
        let coeffs = gaussian_vector(n, &mut rng);
        for (e, c) in tangent.iter().zip(coeffs.iter()) {
            p_vec.axpy(*c, e, 1.0);
        }
        p_vec *= p_scale / p_vec.norm().max(f64::MIN_POSITIVE);
    }
    let d_scale = get("d_scale", 0.0);
    let d = if d_scale != 0.0 {
        let g = gaussian_matrix(dim, dim, &mut rng);
        let norm = g.norm();
        g * (d_scale / norm)
    } else {
        Matrix::zeros(dim, dim)
    };
    let params_conn = match conn_kind {
        ConnectionKind::First => {
            if params.contains_key("conn_a") || params.contains_key("conn_b") {
                return Err(Error::InvalidArgument("conn_a/conn_b need kind=2".into()));
            }
            ConnectionParams::First {
                lambda1: get("lambda1", 0.0),
                lambda2: get("lambda2", 0.0),
            }
        }
        ConnectionKind::Second => {
            if params.contains_key("lambda1") || params.contains_key("lambda2") {
                return Err(Error::InvalidArgument("lambda1/lambda2 need kind=1".into()));
            }
            ConnectionParams::Second {
                a: get("conn_a", 0.0),
                b: get("conn_b", 0.0),
            }
        }
    };
    let spec = ConnectionSpec::new(params_conn, p_vec, d)?;
    let sub = attach(model, spec, &tangent, hhat)?;
    let theorem = kind.theorem(conn_kind);
    let (args, plane_indices) = if kind == EqualityKind::Cor32 {
        let plane = Plane::new(sub.tangent()[0].clone(), sub.tangent()[1].clone())?;
        (TheoremArgs::plane(plane), Some([0, 1]))
    } else {
        (TheoremArgs::default(), None)
    };
    Ok(EqualityCase {
        kind,
        sub,
        theorem,
        args,
        plane_indices,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ShapePattern {
    TotallyGeodesic,
    /// one shape operator `diag(a,...,a,2a)`, the rest zero
    QuasiUmbilicalInf,
    /// one shape operator `diag(2a,...,2a,a)`, the rest zero
    QuasiUmbilicalSup,
    None,
}

impl ShapePattern {
    pub fn as_str(self) -> &'static str {
        match self {
            ShapePattern::TotallyGeodesic => "totally_geodesic",
            ShapePattern::QuasiUmbilicalInf => "quasi_umbilical_inf",
            ShapePattern::QuasiUmbilicalSup => "quasi_umbilical_sup",
            ShapePattern::None => "none",
        }
    }
}

/// Detects the invariantly quasi-umbilical shapes, up to rotations of the
/// tangent and normal frames.
pub fn shape_pattern(h: &[Matrix]) -> ShapePattern {
    let n = h[0].nrows();
    let stacked = Matrix::from_fn(h.len(), n * n, |r, k| h[r][(k / n, k % n)]);
    let svd = stacked.svd(false, true);
    let mut sv: Vec<(f64, usize)> = svd.singular_values.iter().copied().zip(0..).collect();
    sv.sort_by(|a, b| b.0.total_cmp(&a.0));
    let top = sv[0].0;
    if top <= 1e-10 {
        return ShapePattern::TotallyGeodesic;
    }
    if sv.len() > 1 && sv[1].0 > 1e-9 * top {
        return ShapePattern::None;
    }
    let vt = svd.v_t.expect("requested");
    let row = vt.row(sv[0].1);
    let s = Matrix::from_fn(n, n, |i, j| row[i * n + j] * top);
    let (vals, _) = sym_eigen_ascending(&s);
    let tol = 1e-9 * vals.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let matches = |ratio: f64| {
        (0..n).any(|j| {
            let others: Vec<f64> = (0..n).filter(|&i| i != j).map(|i| vals[i]).collect();
            let v = others[0];
            others.iter().all(|o| (o - v).abs() <= tol) && (vals[j] - ratio * v).abs() <= tol
        })
    };
    if matches(2.0) {
        ShapePattern::QuasiUmbilicalInf
    } else if matches(0.5) {
        ShapePattern::QuasiUmbilicalSup
    } else {
        ShapePattern::None
    }
}
