//! JSON scenario files and run reports.
//!
//! Matrices are row-major nested arrays. Every input error carries the
//! JSON path of the offending field.

use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::connection::{ConnectionKind, ConnectionParams, ConnectionSpec};
use crate::contact::{random_point_with, validate_structure, ContactPointModel, RandomPointParams, ValidationReport};
use crate::error::Error;
use crate::linalg::{Matrix, Plane, Vector};
use crate::submanifold::{attach_with, SubmanifoldPoint};
use crate::verifier::{cross_check, verify, CrossCheckReport, Family, TheoremArgs, TheoremId, VerdictReport};
use crate::EngineConfig;

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioError {
    pub path: String,
    pub message: String,
}

impl ScenarioError {
    fn new(path: impl Into<String>, message: impl fmt::Display) -> Self {
        ScenarioError {
            path: path.into(),
            message: message.to_string(),
        }
    }
}

impl fmt::Display for ScenarioError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.path.is_empty() || self.path == "." {
            write!(f, "{}", self.message)
        } else {
            write!(f, "{}: {}", self.path, self.message)
        }
    }
}

impl std::error::Error for ScenarioError {}

type SResult<T> = std::result::Result<T, ScenarioError>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub ambient: AmbientSection,
    pub connection: ConnectionSection,
    pub submanifold: SubmanifoldSection,
    #[serde(default, skip_serializing_if = "ChecksSection::is_empty")]
    pub checks: ChecksSection,
}

/// Either explicit `phi`, `xi`, `hprime` or a `generator`; the constants
/// are always given.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AmbientSection {
    pub m: usize,
    pub kappa: f64,
    pub mu_contact: f64,
    pub c: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phi: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub xi: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hprime: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generator: Option<GeneratorSection>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratorSection {
    pub seed: u64,
    pub hprime_scale: f64,
    #[serde(default)]
    pub strict_kmu: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConnectionSection {
    pub kind: u8,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda1: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda2: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b: Option<f64>,
    /// defaults to zero
    #[serde(rename = "P", default, skip_serializing_if = "Option::is_none")]
    pub p: Option<Vec<f64>>,
    /// defaults to zero
    #[serde(rename = "D", default, skip_serializing_if = "Option::is_none")]
    pub d: Option<Vec<Vec<f64>>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SubmanifoldSection {
    /// tangent basis in ambient coordinates
    pub tangent: Vec<Vec<f64>>,
    /// one n x n matrix per normal direction of the derived normal frame
    pub hhat: Vec<Vec<Vec<f64>>>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChecksSection {
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub theorems: Vec<String>,
    /// indices into the orthonormalized tangent frame
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub plane: Option<[usize; 2]>,
    #[serde(rename = "X", default, skip_serializing_if = "Option::is_none")]
    pub x: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub alternate_lambda: bool,
}

impl ChecksSection {
    pub fn is_empty(&self) -> bool {
        *self == ChecksSection::default()
    }
}

pub fn parse_scenario(text: &str) -> SResult<ScenarioFile> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        ScenarioError::new(path, e.into_inner())
    })
}

pub fn load_scenario(path: &Path) -> SResult<ScenarioFile> {
    let text = std::fs::read_to_string(path).map_err(|e| ScenarioError::new("", format!("{}: {e}", path.display())))?;
    parse_scenario(&text)
}

impl ScenarioFile {
    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("scenario is plain data")
    }

    pub fn kind(&self) -> SResult<ConnectionKind> {
        match self.connection.kind {
            1 => Ok(ConnectionKind::First),
            2 => Ok(ConnectionKind::Second),
            k => Err(ScenarioError::new(
                "connection.kind",
                format!("must be 1 or 2, got {k}"),
            )),
        }
    }

    pub fn build_model(&self) -> SResult<ContactPointModel> {
        let a = &self.ambient;
        if a.m == 0 {
            return Err(ScenarioError::new("ambient.m", "must be at least 1"));
        }
        let dim = 2 * a.m + 1;
        let explicit = a.phi.is_some() || a.xi.is_some() || a.hprime.is_some();
        match (&a.generator, explicit) {
            (Some(_), true) => Err(ScenarioError::new(
                "ambient.generator",
                "give either a generator or explicit phi/xi/hprime, not both",
            )),
            (Some(g), false) => random_point_with(&RandomPointParams {
                m: a.m,
                kappa: a.kappa,
                mu_contact: a.mu_contact,
                c: a.c,
                seed: g.seed,
                hprime_scale: g.hprime_scale,
                strict_kmu: g.strict_kmu,
            })
            .map_err(|e| ScenarioError::new("ambient.generator", e)),
            (None, _) => {
                let phi = matrix(a.phi.as_ref(), "ambient.phi", dim, dim)?;
                let xi = vector(a.xi.as_ref(), "ambient.xi", dim)?;
                let hprime = match &a.hprime {
                    Some(_) => matrix(a.hprime.as_ref(), "ambient.hprime", dim, dim)?,
                    None => Matrix::zeros(dim, dim),
                };
                ContactPointModel::new(a.m, phi, xi, hprime, a.kappa, a.mu_contact, a.c)
                    .map_err(|e| ScenarioError::new("ambient", e))
            }
        }
    }

    pub fn build_spec(&self, dim: usize) -> SResult<ConnectionSpec> {
        let c = &self.connection;
        let kind = self.kind()?;
        let (active, unused) = match kind {
            ConnectionKind::First => ((c.lambda1, c.lambda2), [("a", c.a), ("b", c.b)]),
            ConnectionKind::Second => ((c.a, c.b), [("lambda1", c.lambda1), ("lambda2", c.lambda2)]),
        };
        for (name, value) in unused {
            if value.is_some() {
                return Err(ScenarioError::new(
                    format!("connection.{name}"),
                    format!("not allowed for a kind {} connection", kind.number()),
                ));
            }
        }
        let params = match kind {
            ConnectionKind::First => ConnectionParams::First {
                lambda1: active.0.unwrap_or(0.0),
                lambda2: active.1.unwrap_or(0.0),
            },
            ConnectionKind::Second => ConnectionParams::Second {
                a: active.0.unwrap_or(0.0),
                b: active.1.unwrap_or(0.0),
            },
        };
        let p = match &c.p {
            Some(_) => vector(c.p.as_ref(), "connection.P", dim)?,
            None => Vector::zeros(dim),
        };
        let d = match &c.d {
            Some(_) => matrix(c.d.as_ref(), "connection.D", dim, dim)?,
            None => Matrix::zeros(dim, dim),
        };
        ConnectionSpec::new(params, p, d).map_err(|e| ScenarioError::new("connection", e))
    }

    pub fn build(&self) -> SResult<BuiltScenario> {
        self.build_with(EngineConfig::default())
    }

    pub fn build_with(&self, config: EngineConfig) -> SResult<BuiltScenario> {
        let model = self.build_model()?;
        let dim = model.dim();
        let spec = self.build_spec(dim)?;
        let s = &self.submanifold;
        let n = s.tangent.len();
        if n < 3 || n >= dim {
            return Err(ScenarioError::new(
                "submanifold.tangent",
                format!("need 3 <= n < {dim} tangent vectors, got {n}"),
            ));
        }
        let tangent = (0..n)
            .map(|i| vector(Some(&s.tangent[i]), &format!("submanifold.tangent[{i}]"), dim))
            .collect::<SResult<Vec<_>>>()?;
        let p = dim - n;
        if s.hhat.len() != p {
            return Err(ScenarioError::new(
                "submanifold.hhat",
                format!("expected {p} matrices (one per normal direction), got {}", s.hhat.len()),
            ));
        }
        let hhat = (0..p)
            .map(|r| matrix(Some(&s.hhat[r]), &format!("submanifold.hhat[{r}]"), n, n))
            .collect::<SResult<Vec<_>>>()?;
        let sub = attach_with(model.clone(), spec.clone(), &tangent, hhat, config).map_err(|e| {
            let path = match e {
                Error::NonSymmetric { ref what, .. } => format!("submanifold.{what}"),
                Error::RankDeficient { .. } => "submanifold.tangent".to_string(),
                _ => "submanifold".to_string(),
            };
            ScenarioError::new(path, e)
        })?;

        let checks = &self.checks;
        let theorems = checks
            .theorems
            .iter()
            .enumerate()
            .map(|(i, t)| {
                t.parse::<TheoremId>()
                    .map_err(|e| ScenarioError::new(format!("checks.theorems[{i}]"), e))
            })
            .collect::<SResult<Vec<_>>>()?;
        let plane = match checks.plane {
            Some([i, j]) => {
                if i >= n || j >= n || i == j {
                    return Err(ScenarioError::new(
                        "checks.plane",
                        format!("need two distinct indices below {n}, got [{i}, {j}]"),
                    ));
                }
                Some(
                    Plane::new(sub.tangent()[i].clone(), sub.tangent()[j].clone())
                        .map_err(|e| ScenarioError::new("checks.plane", e))?,
                )
            }
            None => None,
        };
        let x = match &checks.x {
            Some(_) => Some(vector(checks.x.as_ref(), "checks.X", dim)?),
            None => None,
        };
        if let Some(tol) = checks.tol {
            if !(tol.is_finite() && tol >= 0.0) {
                return Err(ScenarioError::new("checks.tol", "must be finite and nonnegative"));
            }
        }
        let args = TheoremArgs {
            plane,
            x,
            k: checks.k,
            tol: checks.tol,
            alternate_lambda: checks.alternate_lambda,
        };
        Ok(BuiltScenario {
            model,
            spec,
            sub,
            theorems,
            args,
            generator_seed: self.ambient.generator.as_ref().map(|g| g.seed),
        })
    }

    /// Explicit scenario for an existing point: tangent frame, `h-hat` and
    /// the ambient structure written out in full.
    pub fn from_point(sub: &SubmanifoldPoint, checks: ChecksSection) -> ScenarioFile {
        let model = sub.model();
        let spec = sub.spec();
        let (kind, lambda1, lambda2, a, b) = match spec.params {
            ConnectionParams::First { lambda1, lambda2 } => (1, Some(lambda1), Some(lambda2), None, None),
            ConnectionParams::Second { a, b } => (2, None, None, Some(a), Some(b)),
        };
        ScenarioFile {
            ambient: AmbientSection {
                m: model.m,
                kappa: model.kappa,
                mu_contact: model.mu_contact,
                c: model.c,
                phi: Some(rows(&model.phi)),
                xi: Some(model.xi.iter().copied().collect()),
                hprime: Some(rows(&model.hprime)),
                generator: None,
            },
            connection: ConnectionSection {
                kind,
                lambda1,
                lambda2,
                a,
                b,
                p: Some(spec.p.iter().copied().collect()),
                d: Some(rows(&spec.d)),
            },
            submanifold: SubmanifoldSection {
                tangent: sub.tangent().iter().map(|v| v.iter().copied().collect()).collect(),
                hhat: sub.hhat().iter().map(rows).collect(),
            },
            checks,
        }
    }
}

pub fn rows(m: &Matrix) -> Vec<Vec<f64>> {
    (0..m.nrows()).map(|i| m.row(i).iter().copied().collect()).collect()
}

fn vector(v: Option<&Vec<f64>>, path: &str, dim: usize) -> SResult<Vector> {
    let v = v.ok_or_else(|| ScenarioError::new(path, "missing"))?;
    if v.len() != dim {
        return Err(ScenarioError::new(
            path,
            format!("expected length {dim}, found {}", v.len()),
        ));
    }
    if let Some(i) = v.iter().position(|x| !x.is_finite()) {
        return Err(ScenarioError::new(format!("{path}[{i}]"), "not finite"));
    }
    Ok(Vector::from_column_slice(v))
}

fn matrix(m: Option<&Vec<Vec<f64>>>, path: &str, rows: usize, cols: usize) -> SResult<Matrix> {
    let m = m.ok_or_else(|| ScenarioError::new(path, "missing"))?;
    if m.len() != rows {
        return Err(ScenarioError::new(
            path,
            format!("expected {rows} rows, found {}", m.len()),
        ));
    }
    for (i, row) in m.iter().enumerate() {
        if row.len() != cols {
            return Err(ScenarioError::new(
                format!("{path}[{i}]"),
                format!("expected {cols} columns, found {}", row.len()),
            ));
        }
        if let Some(j) = row.iter().position(|x| !x.is_finite()) {
            return Err(ScenarioError::new(format!("{path}[{i}][{j}]"), "not finite"));
        }
    }
    Ok(Matrix::from_fn(rows, cols, |i, j| m[i][j]))
}

#[derive(Debug, Clone)]
pub struct BuiltScenario {
    pub model: ContactPointModel,
    pub spec: ConnectionSpec,
    pub sub: SubmanifoldPoint,
    /// as listed; empty means every theorem whose arguments are present
    pub theorems: Vec<TheoremId>,
    pub args: TheoremArgs,
    pub generator_seed: Option<u64>,
}

impl BuiltScenario {
    /// The listed theorems, or all theorems of the connection kind whose
    /// auxiliary arguments are available.
    pub fn selected_theorems(&self) -> Vec<TheoremId> {
        if !self.theorems.is_empty() {
            return self.theorems.clone();
        }
        TheoremId::for_kind(self.sub.kind())
            .into_iter()
            .filter(|t| match t.family() {
                Family::Chen => self.args.plane.is_some(),
                Family::Ricci => self.args.x.is_some(),
                Family::Theta => self.args.k.is_some(),
                Family::CasoratiInf | Family::CasoratiSup => true,
            })
            .collect()
    }
}

/// Everything a `verify` run produces.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub layout_version: u32,
    pub generator_seed: Option<u64>,
    pub validation: ValidationReport,
    pub verdicts: Vec<VerdictReport>,
    pub cross_check: CrossCheckReport,
    /// wall time in milliseconds; left out unless requested so reports stay
    /// byte-reproducible
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timing_ms: Option<f64>,
}

pub const STRUCTURE_TOL: f64 = 1e-10;

/// Validates the structure, runs the theorems and the cross-check.
pub fn run(built: &BuiltScenario, theorems: &[TheoremId]) -> Result<RunReport, Error> {
    let validation = validate_structure(&built.model, STRUCTURE_TOL)?;
    let verdicts = theorems
        .iter()
        .map(|&t| verify(&built.sub, t, &built.args))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(RunReport {
        layout_version: crate::search::LAYOUT_VERSION,
        generator_seed: built.generator_seed,
        validation,
        verdicts,
        cross_check: cross_check(&built.sub),
        timing_ms: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const WITNESS: &str = r#"{
        "ambient": {"m": 2, "kappa": 1, "mu_contact": 0, "c": 1,
            "phi": [[0,0,-1,0,0],[0,0,0,-1,0],[1,0,0,0,0],[0,1,0,0,0],[0,0,0,0,0]],
            "xi": [0,0,0,0,1]},
        "connection": {"kind": 1, "lambda1": 0, "lambda2": 0},
        "submanifold": {"tangent": [[1,0,0,0,0],[0,1,0,0,0],[0,0,1,0,0]],
            "hhat": [[[1,0,0],[0,1,0],[0,0,2]], [[0,0,0],[0,0,0],[0,0,0]]]},
        "checks": {"theorems": ["3.1", "3.3", "3.5i"], "plane": [0, 1], "X": [1,0,0,0,0]}
    }"#;

    #[test]
    fn witness_builds_and_holds() {
        let file = parse_scenario(WITNESS).unwrap();
        let built = file.build().unwrap();
        assert_eq!(built.model, crate::contact::standard_point(2));
        let report = run(&built, &built.selected_theorems()).unwrap();
        assert!(report.validation.pass());
        let slacks: Vec<f64> = report.verdicts.iter().map(|v| v.slack).collect();
        assert!(slacks[0].abs() < 1e-12 && (slacks[1] - 1.0).abs() < 1e-12 && slacks[2].abs() < 1e-12);
    }

    #[test]
    fn round_trip() {
        let file = parse_scenario(WITNESS).unwrap();
        let again = parse_scenario(&file.to_json_pretty()).unwrap();
        assert_eq!(file, again);
        let built = file.build().unwrap();
        let explicit = ScenarioFile::from_point(&built.sub, file.checks.clone());
        let reparsed = parse_scenario(&serde_json::to_string(&explicit).unwrap()).unwrap();
        assert_eq!(explicit, reparsed);
    }

    #[test]
    fn shape_errors_carry_paths() {
        let bad = WITNESS.replace("[0,1,0,0,0],[0,0,0,0,0]]", "[0,1,0,0],[0,0,0,0,0]]");
        let err = parse_scenario(&bad).unwrap().build().unwrap_err();
        assert_eq!(err.path, "ambient.phi[3]");

        let bad = WITNESS.replace(r#""kind": 1"#, r#""kind": "one""#);
        let err = parse_scenario(&bad).unwrap_err();
        assert_eq!(err.path, "connection.kind");

        let bad = WITNESS.replace(r#""lambda2": 0"#, r#""lambda2": 0, "b": 1"#);
        let err = parse_scenario(&bad).unwrap().build().unwrap_err();
        assert_eq!(err.path, "connection.b");

        let bad = WITNESS.replace(r#""3.5i""#, r#""9.9""#);
        let err = parse_scenario(&bad).unwrap().build().unwrap_err();
        assert_eq!(err.path, "checks.theorems[2]");

        let bad = WITNESS.replace("[[1,0,0],[0,1,0],[0,0,2]]", "[[1,0.5,0],[0,1,0],[0,0,2]]");
        let err = parse_scenario(&bad).unwrap().build().unwrap_err();
        assert_eq!(err.path, "submanifold.hhat[0]");
    }

    #[test]
    fn generator_ambient() {
        let text = r#"{
            "ambient": {"m": 2, "kappa": 0.5, "mu_contact": 1, "c": 2,
                "generator": {"seed": 9, "hprime_scale": 1.0}},
            "connection": {"kind": 2, "a": 1, "b": -0.5, "P": [0.1,0,0.2,0,0]},
            "submanifold": {"tangent": [[1,0,0,0,0],[0,1,0,0,0],[0,0,1,0,0]],
                "hhat": [[[1,0,0],[0,1,0],[0,0,2]], [[0,0,0],[0,0,0],[0,0,0]]]}
        }"#;
        let built = parse_scenario(text).unwrap().build().unwrap();
        assert_eq!(built.generator_seed, Some(9));
        assert_eq!(built.selected_theorems(), vec![TheoremId::T4_4i, TheoremId::T4_4ii]);
        assert!(validate_structure(&built.model, 1e-10).unwrap().pass());
    }
}
