use std::collections::BTreeMap;

use ckv_core::casorati::casorati_with;
use ckv_core::connection::ambient_curvature;
use ckv_core::fuzz::{generate, FuzzConfig};
use ckv_core::linalg::{basis, gaussian_vector, gram_residual, orthonormal_complement, random_orthogonal};
use ckv_core::scenario::parse_scenario;
use ckv_core::submanifold::{ricci_with_completion, sectional_coords};
use ckv_core::*;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn instance(seed: u64, kind: ConnectionKind, n: Option<usize>) -> SubmanifoldPoint {
    let config = FuzzConfig {
        count: 1,
        seed,
        n,
        m: None,
        kind: Some(kind),
    };
    generate(&config, 0).build().unwrap().sub
}

fn kind_of(flag: bool) -> ConnectionKind {
    if flag {
        ConnectionKind::First
    } else {
        ConnectionKind::Second
    }
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * (1.0 + a.abs().max(b.abs()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn orthonormalize_and_split(seed in any::<u64>(), dim in 3usize..8, k in 1usize..3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let raw: Vec<Vector> = (0..k).map(|_| gaussian_vector(dim, &mut rng)).collect();
        let frame = orthonormalize(&raw).unwrap();
        prop_assert!(gram_residual(&frame) < 1e-12);
        let v = gaussian_vector(dim, &mut rng);
        let (t, _) = split(&frame, &v);
        let (t2, n2) = split(&frame, &t);
        prop_assert!((t2 - &t).norm() < 1e-12 && n2.norm() < 1e-12);
    }

    #[test]
    fn restricted_trace_is_rotation_invariant(seed in any::<u64>(), angle in 0.0..std::f64::consts::TAU) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let frame = orthonormalize(&[gaussian_vector(5, &mut rng), gaussian_vector(5, &mut rng)]).unwrap();
        let plane = Plane::new(frame[0].clone(), frame[1].clone()).unwrap();
        let b = ckv_core::linalg::gaussian_matrix(5, 5, &mut rng);
        let t0 = restrict_form(&b, &plane).unwrap().trace();
        let t1 = restrict_form(&b, &plane.rotated(angle)).unwrap().trace();
        prop_assert!((t0 - t1).abs() < 1e-12);
    }

    #[test]
    fn generator_is_sound(seed in any::<u64>(), m in 1usize..4, kappa in -3.0..3.0, mu in -3.0..3.0, scale in 0.0..2.0) {
        let model = random_point(m, kappa, mu, 1.0, seed, scale);
        prop_assert!(validate_structure(&model, 1e-10).unwrap().pass());
        if kappa <= 1.0 {
            let strict = random_point_with(&RandomPointParams {
                m, kappa, mu_contact: mu, c: 1.0, seed, hprime_scale: scale, strict_kmu: true,
            }).unwrap();
            prop_assert!(validate_structure(&strict, 1e-10).unwrap().pass());
            // h'^2 = (kappa - 1) phi^2
            let lhs = &strict.hprime * &strict.hprime;
            let rhs = &strict.phi * &strict.phi * (kappa - 1.0);
            prop_assert!((lhs - rhs).amax() < 1e-10);
        }
    }

    #[test]
    fn ambient_curvature_antisymmetry_and_linearity(seed in any::<u64>(), first in any::<bool>(), t in -2.0f64..2.0) {
        let sub = instance(seed, kind_of(first), None);
        let (model, spec) = (sub.model(), sub.spec());
        let d = model.dim();
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 1);
        let v: Vec<Vector> = (0..5).map(|_| gaussian_vector(d, &mut rng)).collect();
        let r = |a: &Vector, b: &Vector, c: &Vector, e: &Vector| ambient_curvature(model, spec, a, b, c, e);
        let lc = |a: &Vector, b: &Vector, c: &Vector, e: &Vector| curvature_lc(model, a, b, c, e);
        prop_assert!((lc(&v[0], &v[1], &v[2], &v[3]) + lc(&v[1], &v[0], &v[2], &v[3])).abs() < 1e-12 * 50.0);
        let anti = r(&v[0], &v[1], &v[2], &v[3]) + r(&v[1], &v[0], &v[2], &v[3]);
        prop_assert!(anti.abs() < 1e-10, "antisymmetry defect {anti}");
        // linear in each slot
        let mixed = &v[0] * t + &v[4];
        let lin = r(&mixed, &v[1], &v[2], &v[3]) - t * r(&v[0], &v[1], &v[2], &v[3]) - r(&v[4], &v[1], &v[2], &v[3]);
        let lin_w = r(&v[1], &v[2], &v[3], &mixed) - t * r(&v[1], &v[2], &v[3], &v[0]) - r(&v[1], &v[2], &v[3], &v[4]);
        prop_assert!(lin.abs() < 1e-10 && lin_w.abs() < 1e-10);
    }

    #[test]
    fn correction_traces(seed in any::<u64>(), first in any::<bool>()) {
        let sub = instance(seed, kind_of(first), None);
        let c = correction_tensors(sub.spec());
        prop_assert!((&c.beta - c.beta.transpose()).amax() < 1e-14);
        prop_assert!((c.trace_alpha - c.alpha.trace()).abs() < 1e-13);
        prop_assert!((c.m_beta - c.beta.trace()).abs() < 1e-13);
        prop_assert!((c.trace_alpha_prime - c.alpha_prime.trace()).abs() < 1e-13);
    }

    #[test]
    fn submanifold_data(seed in any::<u64>(), first in any::<bool>()) {
        let sub = instance(seed, kind_of(first), None);
        let mut all: Vec<Vector> = sub.tangent().to_vec();
        all.extend(sub.normal().iter().cloned());
        prop_assert!(gram_residual(&all) < 1e-12);
        let d = sub.decomp();
        prop_assert!((&d.xi_top + &d.xi_perp - &sub.model().xi).norm() < 1e-13);
        prop_assert!((&d.p_top + &d.p_perp - &sub.spec().p).norm() < 1e-13);
        let (_, lambda2) = if first { sub.spec().lambdas() } else { (0.0, 0.0) };
        for (r, (h, hhat)) in sub.h().iter().zip(sub.hhat()).enumerate() {
            prop_assert!((h - h.transpose()).amax() == 0.0);
            let shift = lambda2 * sub.spec().p.dot(&sub.normal()[r]);
            let want = hhat - Matrix::identity(sub.n(), sub.n()) * shift;
            prop_assert!((h - want).amax() < 1e-14);
        }
        let n = sub.n() as f64;
        prop_assert!(sub.h_norm_sq() >= n * sub.mean_curvature_sq() - 1e-12);
    }

    #[test]
    fn ricci_is_completion_independent(seed in any::<u64>(), first in any::<bool>()) {
        let sub = instance(seed, kind_of(first), None);
        let n = sub.n();
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 2);
        let xc = gaussian_vector(n, &mut rng).normalize();
        let x = sub.to_ambient(&xc);
        let a = ricci(&sub, &x).unwrap();
        // another completion: rotate the default one inside x^perp
        let base = orthonormal_complement(std::slice::from_ref(&xc), n);
        let q = random_orthogonal(n - 1, &mut rng);
        let rotated: Vec<Vector> = (0..n - 1)
            .map(|j| (0..n - 1).fold(Vector::zeros(n), |acc, i| acc + &base[i] * q[(i, j)]))
            .collect();
        let b = ricci_with_completion(&sub, &x, &rotated).unwrap();
        prop_assert!((a.raw - b.raw).abs() < 1e-10 && (a.symmetrized - b.symmetrized).abs() < 1e-10);
    }

    #[test]
    fn second_kind_values_ignore_a(seed in any::<u64>()) {
        let sub = instance(seed, ConnectionKind::Second, None);
        let (_, b) = sub.spec().ab();
        let n = sub.n();
        let e: Vec<Vector> = (0..n).map(|i| basis(n, i)).collect();
        let snapshot = |s: &SubmanifoldPoint| {
            let x = s.tangent()[0].clone();
            vec![
                scalar_tau(s),
                sectional_coords(s, &e[0], &e[1]),
                ricci(s, &x).unwrap().raw,
                casorati(s).c,
            ]
        };
        let reference = snapshot(&sub);
        for a in [0.0, 1.0, -3.0] {
            let spec = ConnectionSpec { params: ConnectionParams::Second { a, b }, ..sub.spec().clone() };
            let moved = attach(sub.model().clone(), spec, sub.tangent(), sub.hhat().to_vec()).unwrap();
            for (u, v) in reference.iter().zip(snapshot(&moved)) {
                prop_assert!((u - v).abs() < 1e-12, "{u} vs {v}");
            }
        }
    }

    #[test]
    fn exact_theta_is_below_samples(seed in any::<u64>(), first in any::<bool>()) {
        let sub = instance(seed, kind_of(first), None);
        let n = sub.n();
        let t = theta_k(&sub, n).unwrap();
        prop_assert!(t.certified);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 3);
        for _ in 0..50 {
            let xc = gaussian_vector(n, &mut rng).normalize();
            let sampled = ricci(&sub, &sub.to_ambient(&xc)).unwrap().symmetrized / (n - 1) as f64;
            prop_assert!(t.value <= sampled + 1e-9);
        }
        let tau = scalar_tau(&sub);
        prop_assert!(2.0 * tau >= (n * (n - 1)) as f64 * t.value - 1e-9 * (1.0 + tau.abs()));
    }

    #[test]
    fn chen_verdicts_are_frame_independent(seed in any::<u64>()) {
        let sub = instance(seed, ConnectionKind::First, None);
        let n = sub.n();
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 4);
        let q = random_orthogonal(n, &mut rng);
        // same tangent space, rotated frame, h-hat re-expressed
        let frame: Vec<Vector> = (0..n)
            .map(|j| (0..n).fold(Vector::zeros(sub.ambient_dim()), |acc, i| acc + &sub.tangent()[i] * q[(i, j)]))
            .collect();
        let hhat: Vec<Matrix> = sub.hhat().iter().map(|s| q.transpose() * s * &q).collect();
        let moved = attach(sub.model().clone(), sub.spec().clone(), &frame, hhat).unwrap();
        // normal frames may differ; the theorems only use normal sums
        let plane = Plane::new(sub.tangent()[0].clone(), sub.tangent()[1].clone()).unwrap();
        let args = TheoremArgs { plane: Some(plane), x: Some(sub.tangent()[2].clone()), k: Some(n), ..TheoremArgs::default() };
        for id in [TheoremId::T3_1, TheoremId::T3_3, TheoremId::T3_4, TheoremId::T3_5i, TheoremId::T3_5ii] {
            let a = verify(&sub, id, &args).unwrap();
            let b = verify(&moved, id, &args).unwrap();
            prop_assert!(close(a.lhs, b.lhs, 1e-9) && close(a.rhs, b.rhs, 1e-9), "{id}: {a:?} vs {b:?}");
        }
    }

    #[test]
    fn verdict_holds_matches_slack(seed in any::<u64>(), first in any::<bool>(), tol in 0.0..1e-3) {
        let sub = instance(seed, kind_of(first), None);
        let plane = Plane::new(sub.tangent()[0].clone(), sub.tangent()[1].clone()).unwrap();
        let args = TheoremArgs { plane: Some(plane), x: Some(sub.tangent()[1].clone()), tol: Some(tol), ..TheoremArgs::default() };
        for id in TheoremId::for_kind(sub.kind()) {
            if id.family() == verifier::Family::Theta {
                continue;
            }
            let v = verify(&sub, id, &args).unwrap();
            prop_assert!(close(v.slack, v.rhs - v.lhs, 1e-15));
            prop_assert_eq!(v.holds, v.slack >= -v.tol);
        }
    }

    #[test]
    fn scenario_round_trip(seed in any::<u64>(), index in 0usize..50) {
        let file = generate(&FuzzConfig { seed, ..FuzzConfig::default() }, index);
        let text = file.to_json_pretty();
        let again = parse_scenario(&text).unwrap();
        prop_assert_eq!(&file, &again);
        prop_assert_eq!(text, again.to_json_pretty());
    }

    #[test]
    fn equality_shapes_have_zero_slack(
        h11 in -2.0..2.0, h22 in -2.0..2.0, a in 0.0..2.0,
        l1 in -3.0..3.0, l2 in -3.0..3.0, second in any::<bool>(), seed in any::<u64>(), n in 3usize..5,
    ) {
        let mut params = BTreeMap::new();
        params.insert("kind".to_string(), if second { 2.0 } else { 1.0 });
        let (k1, k2) = if second { ("conn_a", "conn_b") } else { ("lambda1", "lambda2") };
        params.insert(k1.to_string(), l1);
        params.insert(k2.to_string(), l2);
        params.insert("p_scale".to_string(), 0.5);
        let mut cor = params.clone();
        cor.insert("h11".to_string(), h11);
        cor.insert("h22".to_string(), h22);
        let mut thm = params.clone();
        thm.insert("a".to_string(), a);
        for (kind, p) in [(EqualityKind::Cor32, &cor), (EqualityKind::Thm35I, &thm), (EqualityKind::Thm35Ii, &thm)] {
            let case = equality_instance(kind, n, p, seed).unwrap();
            let v = verify(&case.sub, case.theorem, &case.args).unwrap();
            prop_assert!(v.slack.abs() < 1e-6 * (1.0 + v.lhs.abs()), "{kind:?}: {v:?}");
            prop_assert!(v.holds);
        }
    }
}

#[test]
fn sasakian_sectional_curvatures_are_one() {
    let model = standard_point(3);
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..100 {
        let f = orthonormalize(&[gaussian_vector(7, &mut rng), gaussian_vector(7, &mut rng)]).unwrap();
        let k = curvature_lc(&model, &f[0], &f[1], &f[1], &f[0]);
        assert!((k - 1.0).abs() < 1e-12);
    }
}

#[test]
fn casorati_search_is_layout_stable() {
    let sub = instance(9, ConnectionKind::First, Some(4));
    let a = casorati(&sub);
    let b = casorati_with(sub.h(), &SearchConfig::default());
    assert_eq!(a, b);
    assert!(a.inf.value <= a.sup.value);
}
