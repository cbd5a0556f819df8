use ineq_forge::constants::ExponentParams;
use ineq_forge::manifold::ManifoldModel;
use ineq_forge::numerics::QuadratureConfig;
use ineq_forge::rearrange::{gradient_decomposition, RadialProfile};
use ineq_forge::verify::*;
use ineq_forge::Error;
use std::f64::consts::PI;

fn h(n: usize) -> ManifoldModel {
    ManifoldModel::hyperbolic(n).unwrap()
}

fn prof(s: &str) -> RadialProfile {
    RadialProfile::parse(s).unwrap()
}

fn cfg() -> QuadratureConfig {
    QuadratureConfig::default()
}

const FAMILY: [&str; 7] = ["gauss:0.5", "gauss:1", "gauss:2", "expdecay:2", "expdecay:3", "bump:1", "powexp:2,3"];

#[test]
fn poincare_closed_form() {
    let r = verify(InequalityId::Poincare, &prof("expdecay:2"), &h(3), &ExponentParams::new(3, 2.0)).unwrap();
    assert!((r.lhs - PI / 6.0).abs() < 1e-10);
    assert!((r.rhs - 2.0 * PI / 3.0).abs() < 1e-10);
    assert!((r.deficit - PI / 2.0).abs() < 1e-10);
    assert_eq!(r.deficit, r.rhs - r.lhs);
    assert!(r.quad_error >= 0.0 && !r.normalized);
}

#[test]
fn euclidean_log_sobolev_gaussian_equality() {
    for n in [3usize, 4] {
        let e = ManifoldModel::euclidean(n).unwrap();
        for sigma in [0.5f64, 1.0, 2.0] {
            let u = RadialProfile::gauss(1.0 / (4.0 * sigma * sigma)).unwrap();
            let r = verify(InequalityId::EuclideanLogSobolev, &u, &e, &ExponentParams::new(n, 2.0)).unwrap();
            let want = -(n as f64 / 4.0) * ((2.0 * PI * sigma * sigma).ln() + 1.0);
            assert!((r.lhs - want).abs() < 1e-8, "N={n} sigma={sigma}");
            assert!(r.deficit.abs() <= 1e-6, "N={n} sigma={sigma}: {}", r.deficit);
            assert!(r.normalized);
        }
    }
}

#[test]
fn euclidean_log_sobolev_holds_off_the_extremal() {
    let e = ManifoldModel::euclidean(3).unwrap();
    for s in ["expdecay:1", "bump:1", "powexp:2,3", "rational:2"] {
        let r = verify(InequalityId::EuclideanLogSobolev, &prof(s), &e, &ExponentParams::new(3, 2.0)).unwrap();
        assert!(r.deficit > 0.0, "{s}: {}", r.deficit);
    }
}

#[test]
fn gaussian_poincare_general_vanishes_at_p2() {
    for s in FAMILY {
        let r = verify(InequalityId::GaussianPoincareGeneral, &prof(s), &h(3), &ExponentParams::new(3, 2.0)).unwrap();
        assert_eq!((r.lhs, r.rhs, r.deficit), (0.0, 0.0, 0.0));
    }
}

#[test]
fn gaussian_measure_inequalities_hold() {
    for n in [3usize, 4] {
        for s in FAMILY {
            let u = prof(s);
            let t2 = verify(InequalityId::GaussianLogSobolev, &u, &h(n), &ExponentParams::new(n, 2.0)).unwrap();
            assert!(t2.deficit >= -1e-8, "T2 {s} N={n}: {}", t2.deficit);
            for p in [1.0, 1.5] {
                let r = verify(InequalityId::GaussianPoincareGeneral, &u, &h(n), &ExponentParams::new(n, p)).unwrap();
                assert!(r.deficit >= -1e-8, "p={p} {s} N={n}: {}", r.deficit);
            }
            let r = verify(InequalityId::GaussianPoincare, &u, &h(n), &ExponentParams::new(n, 1.0)).unwrap();
            let g = verify(InequalityId::GaussianPoincareGeneral, &u, &h(n), &ExponentParams::new(n, 1.0)).unwrap();
            assert_eq!(r.deficit, g.deficit);
        }
    }
}

#[test]
fn beckner_family_and_lambda() {
    let u = prof("gauss:1");
    let m = h(3);
    // a·q₀ + b = 1 with a = 0.5, q₀ = 1
    let base = ExponentParams::new(3, 2.0).with_beckner(0.5, 0.5, 1.0);
    for q in [1.0, 2.0, 5.0] {
        let r = verify(InequalityId::BecknerFamily, &u, &m, &base.with_q(q)).unwrap();
        assert!(r.deficit >= -1e-8, "q={q}: {}", r.deficit);
    }
    // q = q₀ makes both sides vanish
    let r = verify(InequalityId::BecknerFamily, &u, &m, &base.with_q(1.0)).unwrap();
    assert_eq!((r.lhs, r.rhs), (0.0, 0.0));
    let bad = ExponentParams::new(3, 2.0).with_beckner(0.5, 0.6, 1.0).with_q(2.0);
    assert!(matches!(verify(InequalityId::BecknerFamily, &u, &m, &bad), Err(Error::RangeError(_))));

    // λ = 2a(q − q₀) maps the family onto the corollary
    let lam = verify(InequalityId::BecknerLambda, &u, &m, &ExponentParams::new(3, 2.0).with_lambda(1.0)).unwrap();
    let fam = verify(InequalityId::BecknerFamily, &u, &m, &base.with_q(2.0)).unwrap();
    assert!((lam.deficit - fam.deficit).abs() < 1e-12);

    let tiny = verify(InequalityId::BecknerLambda, &u, &m, &ExponentParams::new(3, 2.0).with_lambda(1e-6)).unwrap();
    assert!(tiny.deficit.abs() <= 1e-4);
    assert!(tiny.deficit >= -1e-8);
}

#[test]
fn hebey_needs_dimension_four() {
    let r = verify(InequalityId::HebeySobolev, &prof("gauss:1"), &h(3), &ExponentParams::new(3, 2.0));
    assert!(matches!(r, Err(Error::RangeError(_))));
    for s in FAMILY {
        let r = verify(InequalityId::HebeySobolev, &prof(s), &h(4), &ExponentParams::new(4, 2.0)).unwrap();
        assert!(r.deficit >= -1e-8, "{s}: {}", r.deficit);
    }
}

#[test]
fn sobolev_family_holds() {
    for s in FAMILY {
        let u = prof(s);
        let r = verify(InequalityId::PoincareSobolevLambda, &u, &h(3), &ExponentParams::new(3, 2.0)).unwrap();
        assert_eq!(r.lambda, Some(0.9));
        assert!(r.deficit >= -1e-8, "{s}: {}", r.deficit);
        let r = verify(InequalityId::PoincareSobolevSharp, &u, &h(5), &ExponentParams::new(5, 3.0)).unwrap();
        assert!(r.deficit >= -1e-8, "{s}: {}", r.deficit);
    }
    // pPSob range: p ≥ 2N/(N−1)
    let r = verify(InequalityId::PoincareSobolevSharp, &prof("gauss:1"), &h(4), &ExponentParams::new(4, 2.5));
    assert!(matches!(r, Err(Error::RangeError(_))));
}

#[test]
fn lambda_bracket_dominates_the_euclidean_energy() {
    for s in ["gauss:0.5", "gauss:1", "expdecay:2", "bump:2"] {
        let u = prof(s);
        let r = verify(InequalityId::PoincareSobolevLambda, &u, &h(3), &ExponentParams::new(3, 2.0)).unwrap();
        let d = gradient_decomposition(&u, &h(3), 2.0, &cfg()).unwrap();
        assert!(r.rhs >= d.euclidean_term - 1e-6, "{s}: {} < {}", r.rhs, d.euclidean_term);
    }
}

#[test]
fn gn_extremal_equality() {
    let e = ManifoldModel::euclidean(3).unwrap();
    let params = ExponentParams::new(3, 2.0).with_alpha(2.0);
    let r = verify(InequalityId::GnPoincare, &prof("rational:1"), &e, &params).unwrap();
    assert!((r.deficit / r.rhs).abs() <= 1e-6, "{r:?}");
    // α < 1 extremal (1 − ρ²)₊^{1/(1−α)}
    let p2 = ExponentParams::new(3, 2.0).with_alpha(0.5);
    let r = verify(InequalityId::GnPoincare, &prof("bump:1"), &e, &p2).unwrap();
    assert!((r.deficit / r.rhs).abs() <= 1e-6, "{r:?}");
}

#[test]
fn gn_poincare_on_hyperbolic_space() {
    for s in FAMILY {
        for alpha in [0.5, 1.5, 3.0] {
            let params = ExponentParams::new(3, 2.0).with_alpha(alpha);
            match verify(InequalityId::GnPoincare, &prof(s), &h(3), &params) {
                Ok(r) => assert!(r.deficit >= -1e-8, "{s} alpha={alpha}: {}", r.deficit),
                // e^{−2ρ} is not in L¹(ℍ³), the norm ‖u‖_{αp} at α = 1/2
                Err(Error::NotIntegrable(_)) => assert_eq!((s, alpha), ("expdecay:2", 0.5)),
                Err(e) => panic!("{s} alpha={alpha}: {e}"),
            }
        }
    }
}

#[test]
fn log_sobolev_2_suite() {
    for n in [3usize, 4, 5] {
        for s in ["gauss:0.5", "gauss:1", "gauss:2", "expdecay:3"] {
            let r = verify(InequalityId::LogSobolev2, &prof(s), &h(n), &ExponentParams::new(n, 2.0)).unwrap();
            assert!(r.deficit >= -1e-8, "{s} N={n}: {}", r.deficit);
            assert!(r.normalized && r.normalization.is_some());
        }
    }
}

#[test]
fn expdecay2_is_not_square_integrable_on_h5() {
    let r = verify(InequalityId::LogSobolev2, &prof("expdecay:2"), &h(5), &ExponentParams::new(5, 2.0));
    assert!(matches!(r, Err(Error::NotIntegrable(_))));
    for n in [3usize, 4] {
        let r = verify(InequalityId::LogSobolev2, &prof("expdecay:2"), &h(n), &ExponentParams::new(n, 2.0)).unwrap();
        assert!(r.deficit >= -1e-8);
    }
}

#[test]
fn log_sobolev_is_scale_invariant() {
    for id in [InequalityId::LogSobolev, InequalityId::LogSobolev2] {
        let u = prof("gauss:1");
        let base = verify(id, &u, &h(3), &ExponentParams::new(3, 2.0)).unwrap();
        for c in [0.5, 3.0] {
            let r = verify(id, &u.scaled(c).unwrap(), &h(3), &ExponentParams::new(3, 2.0)).unwrap();
            assert!((r.lhs - base.lhs).abs() < 1e-9 && (r.rhs - base.rhs).abs() < 1e-9, "{id} c={c}");
        }
    }
}

#[test]
fn log_sobolev_general_p() {
    for s in ["gauss:1", "expdecay:3", "bump:1"] {
        let r = verify(InequalityId::LogSobolev, &prof(s), &h(4), &ExponentParams::new(4, 2.5)).unwrap();
        assert!(r.deficit >= -1e-8, "{s}: {}", r.deficit);
        assert!(r.lambda.unwrap() > 0.0);
    }
}

#[test]
fn log_argument_guard() {
    // an oversized λ makes the bracket negative
    let r = verify(InequalityId::LogSobolev, &prof("gauss:1"), &h(3), &ExponentParams::new(3, 2.0).with_lambda(100.0));
    assert!(matches!(r, Err(Error::LogArgumentNonpositive(_))));
}

#[test]
fn model_log_sobolev() {
    let u = prof("gauss:1");
    let a = verify(InequalityId::ModelLogSobolev2, &u, &h(3), &ExponentParams::new(3, 2.0)).unwrap();
    let b = verify(InequalityId::LogSobolev2, &u, &h(3), &ExponentParams::new(3, 2.0)).unwrap();
    assert!((a.lambda.unwrap() - b.lambda.unwrap()).abs() < 1e-12);
    assert!((a.deficit - b.deficit).abs() < 1e-12);
    let c = ManifoldModel::counterexample(3).unwrap();
    let r = verify(InequalityId::ModelLogSobolev2, &prof("bump:1"), &c, &ExponentParams::new(3, 2.0));
    assert!(matches!(r, Err(Error::ConditionViolated(_))));
    let r = verify(InequalityId::ModelLogSobolevP, &u, &h(5), &ExponentParams::new(5, 3.0)).unwrap();
    assert!(r.deficit >= -1e-8);
    let r = verify(InequalityId::ModelLogSobolev2, &u, &ManifoldModel::euclidean(3).unwrap(), &ExponentParams::new(3, 2.0));
    assert!(r.is_err());
}

#[test]
fn holder_entropy() {
    let m = h(3);
    // unit-volume ball: ‖1_B‖_p = ‖1_B‖_s = 1
    let radius = m.phi_inverse(1.0 / m.sigma()).unwrap();
    let ind = RadialProfile::indicator(radius).unwrap();
    let r = holder_entropy_bound(&ind, &m, 2.0, 6.0).unwrap();
    assert!(r.rhs.abs() < 1e-9 && r.lhs <= 1e-12);
    let r = holder_entropy_bound(&prof("expdecay:2"), &m, 2.0, 6.0).unwrap();
    assert!(r.deficit >= 0.0);
    assert!(matches!(holder_entropy_bound(&prof("expdecay:2"), &m, 2.0, 2.0), Err(Error::RangeError(_))));
}

#[test]
fn suite_examples() {
    let m = h(3);
    let profiles: Vec<_> = ["gauss:0.5", "gauss:1", "gauss:2"].iter().map(|s| prof(s)).collect();
    let out = verify_suite(&[InequalityId::LogSobolev2], &profiles, &m, &[ExponentParams::new(3, 2.0)], &cfg());
    assert_eq!(out.reports.len(), 3);
    assert!(out.skipped.is_empty());
    assert!(out.reports.iter().all(|r| r.deficit >= -1e-8));
    let labels: Vec<_> = out.reports.iter().map(|r| r.profile.as_str()).collect();
    assert_eq!(labels, ["gauss:0.5", "gauss:1", "gauss:2"]);

    let e = ManifoldModel::euclidean(3).unwrap();
    let out = verify_suite(&[InequalityId::Poincare], &profiles, &e, &[ExponentParams::new(3, 2.0)], &cfg());
    assert!(out.reports.is_empty());
    assert_eq!(out.skipped.len(), 3);
    assert!(out.skipped[0].reason.contains("does not apply"));

    let out = verify_suite(&[InequalityId::Poincare], &[], &m, &[ExponentParams::new(3, 2.0)], &cfg());
    assert!(out.reports.is_empty() && out.skipped.is_empty());
}

#[test]
fn suite_is_deterministic_and_ordered() {
    let m = h(3);
    let profiles: Vec<_> = ["bump:1", "gauss:1"].iter().map(|s| prof(s)).collect();
    let ids = [InequalityId::Poincare, InequalityId::HolderEntropy];
    let grid = [ExponentParams::new(3, 2.0).with_s(4.0), ExponentParams::new(3, 3.0).with_s(6.0)];
    let a = verify_suite(&ids, &profiles, &m, &grid, &cfg());
    let b = verify_suite(&ids, &profiles, &m, &grid, &cfg());
    assert_eq!(a, b);
    let order: Vec<_> = a.reports.iter().map(|r| (r.id, r.profile.clone(), r.p)).collect();
    assert_eq!(order[0], (InequalityId::Poincare, "bump:1".to_string(), 2.0));
    assert_eq!(order[1], (InequalityId::Poincare, "bump:1".to_string(), 3.0));
    assert_eq!(order[2], (InequalityId::Poincare, "gauss:1".to_string(), 2.0));
    assert_eq!(order[4].0, InequalityId::HolderEntropy);
}

#[test]
fn report_json_fields() {
    let r = verify(InequalityId::Poincare, &prof("expdecay:2"), &h(3), &ExponentParams::new(3, 2.0)).unwrap();
    let v = serde_json::to_value(&r).unwrap();
    let keys: Vec<_> = v.as_object().unwrap().keys().cloned().collect();
    let mut want = vec!["id", "manifold", "N", "p", "profile", "lhs", "rhs", "deficit", "quad_error", "normalized"];
    want.sort();
    let mut got = keys.clone();
    got.sort();
    assert_eq!(got, want);
    assert_eq!(v["id"], "poincare");
    let r = verify(InequalityId::LogSobolev2, &prof("gauss:1"), &h(3), &ExponentParams::new(3, 2.0)).unwrap();
    let v = serde_json::to_value(&r).unwrap();
    assert_eq!(v["lambda"], 0.9);
    assert_eq!(v["normalized"], true);
}

#[test]
fn ids_round_trip() {
    for id in InequalityId::ALL {
        assert_eq!(id.as_str().parse::<InequalityId>().unwrap(), id);
    }
    assert!("nope".parse::<InequalityId>().is_err());
}
