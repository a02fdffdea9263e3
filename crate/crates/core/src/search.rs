//! Deterministic global search on unit spheres: a fixed sample layout
//! followed by compass refinement of the best few samples.
//!
//! Every objective searched in this crate is even (`f(-u) = f(u)`), so the
//! layouts cover the whole sphere without symmetry reduction.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::linalg::{basis, gaussian_vector, Vector};

/// Bumped whenever a layout changes, so reports can record which point set
/// produced a grid value.
pub const LAYOUT_VERSION: u32 = 1;
const LAYOUT_SEED: u64 = 0x5eed_1a70_0000_0001;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SearchConfig {
    /// Layout size per sphere.
    pub samples: usize,
    /// Number of distinct best samples that get refined.
    pub refine_seeds: usize,
    /// Number of step-size levels in the compass refinement.
    pub refine_steps: usize,
    pub initial_step: f64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            samples: 10_000,
            refine_seeds: 8,
            refine_steps: 50,
            initial_step: 0.05,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SphereOptimum {
    pub point: Vector,
    pub value: f64,
    pub evaluations: usize,
}

type LayoutKey = (usize, usize);

fn layout_cache() -> &'static Mutex<HashMap<LayoutKey, Arc<Vec<Vector>>>> {
    static CACHE: OnceLock<Mutex<HashMap<LayoutKey, Arc<Vec<Vector>>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Fixed point set on `S^{dim-1}`: the coordinate axes followed by a
/// Fibonacci lattice (`dim == 3`), equally spaced angles (`dim == 2`), or a
/// fixed-seed Gaussian cloud (`dim >= 4`).
pub fn sphere_layout(dim: usize, count: usize) -> Arc<Vec<Vector>> {
    let key = (dim, count);
    if let Some(hit) = layout_cache().lock().unwrap().get(&key) {
        return hit.clone();
    }
    let layout = Arc::new(build_layout(dim, count));
    layout_cache().lock().unwrap().insert(key, layout.clone());
    layout
}

fn build_layout(dim: usize, count: usize) -> Vec<Vector> {
    let mut out: Vec<Vector> = (0..dim).map(|i| basis(dim, i)).collect();
    match dim {
        0 => return Vec::new(),
        1 => return out,
        2 => {
            for i in 0..count {
                let t = std::f64::consts::PI * (i as f64 + 0.5) / count as f64;
                out.push(Vector::from_column_slice(&[t.cos(), t.sin()]));
            }
        }
        3 => {
            let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
            for i in 0..count {
                let z = 1.0 - 2.0 * (i as f64 + 0.5) / count as f64;
                let r = (1.0 - z * z).sqrt();
                let t = golden * i as f64;
                out.push(Vector::from_column_slice(&[r * t.cos(), r * t.sin(), z]));
            }
        }
        _ => {
            let mut rng = ChaCha8Rng::seed_from_u64(LAYOUT_SEED ^ dim as u64);
            while out.len() < count + dim {
                let g = gaussian_vector(dim, &mut rng);
                let norm = g.norm();
                if norm > 1e-8 {
                    out.push(g / norm);
                }
            }
        }
    }
    out
}

/// Compass search on the sphere: at each of `levels` step sizes, move along
/// the best improving signed coordinate direction (renormalizing) until no
/// move improves, then halve the step.
pub fn refine_on_sphere<F>(f: &F, start: &Vector, levels: usize, initial_step: f64) -> SphereOptimum
where
    F: Fn(&Vector) -> f64,
{
    let dim = start.len();
    let mut u = start.normalize();
    let mut best = f(&u);
    let mut evaluations = 1;
    let mut step = initial_step;
    for _ in 0..levels {
        // bounded so a pathological plateau cannot stall the level
        for _ in 0..64 {
            let mut improved: Option<(Vector, f64)> = None;
            for i in 0..dim {
                for sign in [1.0, -1.0] {
                    let mut cand = u.clone();
                    cand[i] += sign * step;
                    let norm = cand.norm();
                    if norm == 0.0 {
                        continue;
                    }
                    cand /= norm;
                    let val = f(&cand);
                    evaluations += 1;
                    let threshold = improved.as_ref().map_or(best, |(_, v)| *v);
                    if val < threshold {
                        improved = Some((cand, val));
                    }
                }
            }
            match improved {
                Some((cand, val)) => {
                    u = cand;
                    best = val;
                }
                None => break,
            }
        }
        step *= 0.5;
    }
    SphereOptimum {
        point: u,
        value: best,
        evaluations,
    }
}

/// Global minimum estimate of an even function on `S^{dim-1}`. `extra`
/// seeds (e.g. eigenvectors) are evaluated alongside the layout.
pub fn minimize_on_sphere<F>(dim: usize, f: F, config: &SearchConfig, extra: &[Vector]) -> SphereOptimum
where
    F: Fn(&Vector) -> f64,
{
    let layout = sphere_layout(dim, config.samples);
    let mut scored: Vec<(f64, Vector)> = layout
        .iter()
        .chain(extra.iter())
        .filter(|u| u.norm() > 0.0)
        .map(|u| {
            let u = u.normalize();
            (f(&u), u)
        })
        .collect();
    let mut evaluations = scored.len();
    scored.sort_by(|a, b| a.0.total_cmp(&b.0));

    let mut seeds: Vec<&Vector> = Vec::new();
    for (_, u) in &scored {
        if seeds.len() >= config.refine_seeds.max(1) {
            break;
        }
        if seeds.iter().all(|s| s.dot(u).abs() < 0.999) {
            seeds.push(u);
        }
    }

    let mut best: Option<SphereOptimum> = None;
    for s in seeds {
        let opt = refine_on_sphere(&f, s, config.refine_steps, config.initial_step);
        evaluations += opt.evaluations;
        if best.as_ref().is_none_or(|b| opt.value < b.value) {
            best = Some(opt);
        }
    }
    let mut best = best.unwrap_or_else(|| SphereOptimum {
        point: basis(dim, 0),
        value: f(&basis(dim, 0)),
        evaluations: 1,
    });
    best.evaluations = evaluations;
    best
}

pub fn maximize_on_sphere<F>(dim: usize, f: F, config: &SearchConfig, extra: &[Vector]) -> SphereOptimum
where
    F: Fn(&Vector) -> f64,
{
    let mut opt = minimize_on_sphere(dim, |u| -f(u), config, extra);
    opt.value = -opt.value;
    opt
}
