//! Seeded fuzz campaigns over random admissible instances.
//!
//! Instance `i` of a campaign draws everything from a ChaCha8 stream keyed
//! by `(seed, i)`, so instances are independent of the worker count and the
//! aggregate report is a pure function of the configuration.

use std::collections::BTreeMap;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::casorati::casorati;
use crate::connection::ConnectionKind;
use crate::contact::{random_point_with, validate_structure, RandomPointParams};
use crate::linalg::{gaussian_matrix, gaussian_vector, orthonormalize, random_symmetric, Vector};
use crate::scenario::{rows, ChecksSection, ScenarioFile, STRUCTURE_TOL};
use crate::verifier::{cross_check_with, verify_with_casorati, Family, TheoremArgs, TheoremId};

pub const DEFAULT_SEED: u64 = 0x5eed_2024;

/// Half-width of the uniform range for the structure constants and the
/// connection parameters.
pub const PARAM_RANGE: f64 = 3.0;
/// Upper bound for the norms of `P`, `D`, `h-hat` and the `h'` scale.
pub const NORM_BOUND: f64 = 2.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FuzzConfig {
    pub count: usize,
    pub seed: u64,
    /// fixed dimension, otherwise drawn from {3, 4}
    pub n: Option<usize>,
    /// fixed contact half-dimension, otherwise drawn from {2, 3}
    pub m: Option<usize>,
    /// fixed kind, otherwise alternating by instance index
    pub kind: Option<ConnectionKind>,
}

impl Default for FuzzConfig {
    fn default() -> Self {
        FuzzConfig {
            count: 100,
            seed: DEFAULT_SEED,
            n: None,
            m: None,
            kind: None,
        }
    }
}

impl FuzzConfig {
    pub fn check(&self) -> Result<(), String> {
        if let Some(m) = self.m {
            if m == 0 {
                return Err("m must be at least 1".into());
            }
        }
        if let Some(n) = self.n {
            if n < 3 {
                return Err(format!("n must be at least 3, got {n}"));
            }
            let dim = 2 * self.m.unwrap_or(2) + 1;
            if self.m.is_some() && n >= dim {
                return Err(format!("n must be below the ambient dimension {dim}, got {n}"));
            }
            if self.m.is_none() && n >= 5 {
                return Err(format!("n = {n} needs an explicit m with 2m + 1 > n"));
            }
        }
        Ok(())
    }
}

/// Draws instance `index`: explicit ambient structure, connection, frame,
/// `h-hat`, plus a plane and a unit direction for the checks.
pub fn generate(config: &FuzzConfig, index: usize) -> ScenarioFile {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    rng.set_stream(index as u64);

    let kind = config.kind.unwrap_or(if index.is_multiple_of(2) {
        ConnectionKind::First
    } else {
        ConnectionKind::Second
    });
    let m = config.m.unwrap_or_else(|| rng.random_range(2..=3));
    let n = config.n.unwrap_or_else(|| rng.random_range(3..=4));
    let dim = 2 * m + 1;

    let uniform = |rng: &mut ChaCha8Rng| rng.random_range(-PARAM_RANGE..=PARAM_RANGE);
    let kappa = uniform(&mut rng);
    let mu_contact = uniform(&mut rng);
    let c = uniform(&mut rng);
    let strict_kmu = kappa <= 1.0 && rng.random_bool(0.1);
    let model = random_point_with(&RandomPointParams {
        m,
        kappa,
        mu_contact,
        c,
        seed: rng.random(),
        hprime_scale: rng.random_range(0.0..=NORM_BOUND),
        strict_kmu,
    })
    .expect("parameters are in range");

    let (p1, p2) = (uniform(&mut rng), uniform(&mut rng));
    let p = scaled(gaussian_vector(dim, &mut rng), rng.random_range(0.0..=NORM_BOUND));
    let d_raw = gaussian_matrix(dim, dim, &mut rng);
    let d_norm = d_raw.norm();
    let d = d_raw * (rng.random_range(0.0..=NORM_BOUND) / d_norm);

    // xi generic, tangent or normal
    let xi = model.xi.clone();
    let mode = rng.random_range(0..3);
    let tangent = loop {
        let mut raw: Vec<Vector> = (0..n).map(|_| gaussian_vector(dim, &mut rng)).collect();
        match mode {
            1 => raw[0] = xi.clone(),
            2 => {
                for v in raw.iter_mut() {
                    let along = v.dot(&xi);
                    *v -= &xi * along;
                }
            }
            _ => {}
        }
        if let Ok(frame) = orthonormalize(&raw) {
            break frame;
        }
    };

    let codim = dim - n;
    let mut hhat: Vec<_> = (0..codim).map(|_| random_symmetric(n, 1.0, &mut rng)).collect();
    let total = hhat.iter().map(|s| s.norm_squared()).sum::<f64>().sqrt();
    let target = rng.random_range(0.0..=NORM_BOUND);
    for s in hhat.iter_mut() {
        *s *= target / total;
    }

    let coords = scaled(gaussian_vector(n, &mut rng), 1.0);
    let mut x = Vector::zeros(dim);
    for (t, w) in tangent.iter().zip(coords.iter()) {
        x += t * *w;
    }
    let x = scaled(x, 1.0);

    let (lambda1, lambda2, a, b) = match kind {
        ConnectionKind::First => (Some(p1), Some(p2), None, None),
        ConnectionKind::Second => (None, None, Some(p1), Some(p2)),
    };
    ScenarioFile {
        ambient: crate::scenario::AmbientSection {
            m,
            kappa,
            mu_contact,
            c,
            phi: Some(rows(&model.phi)),
            xi: Some(model.xi.iter().copied().collect()),
            hprime: Some(rows(&model.hprime)),
            generator: None,
        },
        connection: crate::scenario::ConnectionSection {
            kind: kind.number(),
            lambda1,
            lambda2,
            a,
            b,
            p: Some(p.iter().copied().collect()),
            d: Some(rows(&d)),
        },
        submanifold: crate::scenario::SubmanifoldSection {
            tangent: tangent.iter().map(|v| v.iter().copied().collect()).collect(),
            hhat: hhat.iter().map(rows).collect(),
        },
        checks: ChecksSection {
            theorems: Vec::new(),
            plane: Some([0, 1]),
            x: Some(x.iter().copied().collect()),
            k: Some(n),
            tol: None,
            alternate_lambda: false,
        },
    }
}

fn scaled(v: Vector, norm: f64) -> Vector {
    let len = v.norm();
    if len == 0.0 {
        v
    } else {
        v * (norm / len)
    }
}

/// One check of an instance, keyed like `3.4[k=2]` or `cross_check`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub key: String,
    pub slack: f64,
    pub tol: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceOutcome {
    pub index: usize,
    pub kind: u8,
    pub n: usize,
    pub m: usize,
    pub checks: Vec<CheckResult>,
    pub residuals: BTreeMap<String, f64>,
    pub q_min: f64,
    pub identity_residual: f64,
    pub structure_pass: bool,
    pub cross_check_pass: bool,
    /// input errors while building the instance
    pub error: Option<String>,
}

impl InstanceOutcome {
    pub fn failed(&self) -> Vec<String> {
        let mut out = Vec::new();
        if let Some(e) = &self.error {
            out.push(format!("error: {e}"));
        }
        if !self.structure_pass {
            out.push("structure".to_string());
        }
        if !self.cross_check_pass {
            out.push("cross_check".to_string());
        }
        out.extend(self.checks.iter().filter(|c| !c.holds).map(|c| c.key.clone()));
        out
    }

    pub fn is_finding(&self) -> bool {
        !self.failed().is_empty()
    }
}

/// The `k` values with an exact `Theta_k` mode: `k = n` always, `k = 2`
/// through the plane-normal grid when `n = 3`.
pub fn exact_theta_ks(n: usize) -> Vec<usize> {
    if n == 3 {
        vec![2, 3]
    } else {
        vec![n]
    }
}

/// Runs every applicable theorem, the structure check and the cross-check.
pub fn evaluate(file: &ScenarioFile, index: usize) -> InstanceOutcome {
    let mut out = InstanceOutcome {
        index,
        kind: file.connection.kind,
        n: file.submanifold.tangent.len(),
        m: file.ambient.m,
        checks: Vec::new(),
        residuals: BTreeMap::new(),
        q_min: f64::NAN,
        identity_residual: f64::NAN,
        structure_pass: false,
        cross_check_pass: false,
        error: None,
    };
    let built = match file.build() {
        Ok(b) => b,
        Err(e) => {
            out.error = Some(e.to_string());
            return out;
        }
    };
    out.structure_pass = validate_structure(&built.model, STRUCTURE_TOL)
        .map(|r| r.pass())
        .unwrap_or(false);
    let sub = &built.sub;
    let cas = casorati(sub);
    let cc = cross_check_with(sub, &cas);
    out.cross_check_pass = cc.pass;
    out.q_min = cc.q_min;
    out.residuals = cc.residuals;

    let mut run = |key: String, id: TheoremId, args: &TheoremArgs| match verify_with_casorati(sub, id, args, &cas) {
        Ok(v) => {
            if id.family() == Family::Theta {
                let r = v
                    .diagnostics
                    .get("identity_residual")
                    .and_then(|x| x.as_f64())
                    .unwrap_or(f64::NAN);
                out.identity_residual = if out.identity_residual.is_nan() {
                    r.abs()
                } else {
                    out.identity_residual.max(r.abs())
                };
            }
            out.checks.push(CheckResult {
                key,
                slack: v.slack,
                tol: v.tol,
                holds: v.holds,
            });
        }
        Err(e) => out.checks.push(CheckResult {
            key: format!("{key}: {e}"),
            slack: f64::NAN,
            tol: f64::NAN,
            holds: false,
        }),
    };
    for id in TheoremId::for_kind(sub.kind()) {
        match id.family() {
            Family::Theta => {
                for k in exact_theta_ks(sub.n()) {
                    let args = TheoremArgs {
                        k: Some(k),
                        ..built.args.clone()
                    };
                    run(format!("{id}[k={k}]"), id, &args);
                }
            }
            _ => run(id.to_string(), id, &built.args),
        }
    }
    out
}

/// Greedily zeroes scenario entries while `still_fails` keeps returning
/// true. Ambient entries go last since zeroing them usually breaks the
/// structure axioms.
pub fn minimize<F>(file: &ScenarioFile, still_fails: F) -> ScenarioFile
where
    F: Fn(&ScenarioFile) -> bool,
{
    let mut best = file.clone();
    loop {
        let mut changed = false;
        for slot in 0..slot_count(&best) {
            let mut trial = best.clone();
            if zero_slot(&mut trial, slot) && still_fails(&trial) {
                best = trial;
                changed = true;
            }
        }
        if !changed {
            return best;
        }
    }
}

fn slot_count(f: &ScenarioFile) -> usize {
    let dim = 2 * f.ambient.m + 1;
    let n = f.submanifold.tangent.len();
    // scalars, P, D, hhat entries, hprime, ambient constants
    4 + dim + dim * dim + f.submanifold.hhat.len() * n * n + 1 + 3
}

fn zero_entry(x: &mut f64) -> bool {
    if *x == 0.0 {
        false
    } else {
        *x = 0.0;
        true
    }
}

fn zero_opt(x: &mut Option<f64>) -> bool {
    match x {
        Some(v) if *v != 0.0 => {
            *v = 0.0;
            true
        }
        _ => false,
    }
}

fn zero_slot(f: &mut ScenarioFile, mut slot: usize) -> bool {
    let dim = 2 * f.ambient.m + 1;
    let n = f.submanifold.tangent.len();
    let c = &mut f.connection;
    let scalars = [&mut c.lambda1, &mut c.lambda2, &mut c.a, &mut c.b];
    if slot < 4 {
        return scalars.into_iter().nth(slot).map(zero_opt).unwrap_or(false);
    }
    slot -= 4;
    if slot < dim {
        return c.p.as_mut().map(|p| zero_entry(&mut p[slot])).unwrap_or(false);
    }
    slot -= dim;
    if slot < dim * dim {
        return c
            .d
            .as_mut()
            .map(|d| zero_entry(&mut d[slot / dim][slot % dim]))
            .unwrap_or(false);
    }
    slot -= dim * dim;
    let hcount = f.submanifold.hhat.len() * n * n;
    if slot < hcount {
        let (r, rest) = (slot / (n * n), slot % (n * n));
        let (i, j) = (rest / n, rest % n);
        if j < i {
            return false;
        }
        let s = &mut f.submanifold.hhat[r];
        let changed = zero_entry(&mut s[i][j]);
        s[j][i] = 0.0;
        return changed;
    }
    slot -= hcount;
    if slot == 0 {
        return match f.ambient.hprime.as_mut() {
            Some(h) if h.iter().flatten().any(|x| *x != 0.0) => {
                h.iter_mut().flatten().for_each(|x| *x = 0.0);
                true
            }
            _ => false,
        };
    }
    let a = &mut f.ambient;
    match slot {
        1 => zero_entry(&mut a.kappa),
        2 => zero_entry(&mut a.mu_contact),
        3 => zero_entry(&mut a.c),
        _ => false,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckStats {
    pub runs: usize,
    pub failures: usize,
    pub min_slack: f64,
    /// smallest `slack / tol`; values below -1 are violations
    pub min_scaled_slack: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Finding {
    pub index: usize,
    pub failed: Vec<String>,
    pub scenario: ScenarioFile,
    pub minimized: ScenarioFile,
}

/// Aggregate of a campaign. Contains no timing so repeated runs serialize
/// to identical bytes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FuzzReport {
    pub layout_version: u32,
    pub config: FuzzConfig,
    pub instances: usize,
    pub per_kind: BTreeMap<String, usize>,
    pub checks: BTreeMap<String, CheckStats>,
    pub max_residuals: BTreeMap<String, f64>,
    pub max_identity_residual: f64,
    pub min_q: f64,
    pub findings: Vec<Finding>,
}

impl FuzzReport {
    pub fn pass(&self) -> bool {
        self.findings.is_empty()
    }
}

pub fn run_campaign(config: &FuzzConfig) -> FuzzReport {
    let outcomes: Vec<(ScenarioFile, InstanceOutcome)> = (0..config.count)
        .into_par_iter()
        .map(|i| {
            let file = generate(config, i);
            let outcome = evaluate(&file, i);
            (file, outcome)
        })
        .collect();

    let mut per_kind = BTreeMap::new();
    let mut checks: BTreeMap<String, CheckStats> = BTreeMap::new();
    let mut max_residuals: BTreeMap<String, f64> = BTreeMap::new();
    let mut max_identity_residual = 0.0_f64;
    let mut min_q = f64::INFINITY;
    let mut failing = Vec::new();
    for (file, o) in &outcomes {
        *per_kind.entry(o.kind.to_string()).or_insert(0) += 1;
        for c in &o.checks {
            let s = checks.entry(c.key.clone()).or_insert(CheckStats {
                runs: 0,
                failures: 0,
                min_slack: f64::INFINITY,
                min_scaled_slack: f64::INFINITY,
            });
            s.runs += 1;
            s.failures += usize::from(!c.holds);
            s.min_slack = nan_min(s.min_slack, c.slack);
            s.min_scaled_slack = nan_min(s.min_scaled_slack, if c.tol > 0.0 { c.slack / c.tol } else { c.slack });
        }
        for (k, r) in &o.residuals {
            let slot = max_residuals.entry(k.clone()).or_insert(0.0);
            *slot = nan_max(*slot, *r);
        }
        if o.error.is_none() {
            max_identity_residual = nan_max(max_identity_residual, o.identity_residual);
            min_q = nan_min(min_q, o.q_min);
        }
        if o.is_finding() {
            failing.push((file, o));
        }
    }

    let findings = failing
        .into_par_iter()
        .map(|(file, o)| {
            let failed = o.failed();
            let minimized = minimize(file, |trial| {
                let again = evaluate(trial, o.index);
                again.error.is_none() && again.structure_pass && {
                    let now = again.failed();
                    failed.iter().any(|f| now.contains(f))
                }
            });
            Finding {
                index: o.index,
                failed,
                scenario: file.clone(),
                minimized,
            }
        })
        .collect();

    FuzzReport {
        layout_version: crate::search::LAYOUT_VERSION,
        config: *config,
        instances: outcomes.len(),
        per_kind,
        checks,
        max_residuals,
        max_identity_residual,
        min_q: if min_q.is_finite() || min_q.is_nan() {
            min_q
        } else {
            0.0
        },
        findings,
    }
}

fn nan_min(a: f64, b: f64) -> f64 {
    if a.is_nan() || b.is_nan() {
        f64::NAN
    } else {
        a.min(b)
    }
}

fn nan_max(a: f64, b: f64) -> f64 {
    if a.is_nan() || b.is_nan() {
        f64::NAN
    } else {
        a.max(b)
    }
}
