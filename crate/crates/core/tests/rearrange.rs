use ineq_forge::constants;
use ineq_forge::manifold::ManifoldModel;
use ineq_forge::numerics::{self, QuadratureConfig};
use ineq_forge::rearrange::*;
use ineq_forge::Error;
use std::f64::consts::PI;

fn cfg() -> QuadratureConfig {
    QuadratureConfig::default()
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}

fn h3() -> ManifoldModel {
    ManifoldModel::hyperbolic(3).unwrap()
}

#[test]
fn distribution_examples() {
    let m = h3();
    let ramp = RadialProfile::ramp(1.0).unwrap();
    let mu = distribution_function(&ramp, &m, 0.5).unwrap();
    assert!(rel(mu, m.ball_volume(0.5).unwrap()) < 1e-12);
    let e = RadialProfile::expdecay(1.0).unwrap();
    assert_eq!(distribution_function(&e, &m, 1.0).unwrap(), 0.0);
    let mu = distribution_function(&e, &m, (-1.0f64).exp()).unwrap();
    assert!(rel(mu, m.ball_volume(1.0).unwrap()) < 1e-12);
    assert!((mu - 5.1108).abs() < 5e-4);
    assert!(matches!(distribution_function(&e, &m, 0.0), Err(Error::RangeError(_))));
}

#[test]
fn distribution_of_non_monotone_profile_sums_shells() {
    // ρ²e^{−ρ} peaks at ρ = 2 with value 4e^{−2}; level 0.3 cuts it twice
    let m = h3();
    let u = RadialProfile::powexp(2.0, 1.0).unwrap();
    let t = 0.3;
    let a = numerics::find_root(|r| u.value(r) - t, 0.0, 2.0).unwrap();
    let b = numerics::find_root(|r| u.value(r) - t, 2.0, 20.0).unwrap();
    let want = m.ball_volume(b).unwrap() - m.ball_volume(a).unwrap();
    assert!(rel(distribution_function(&u, &m, t).unwrap(), want) < 1e-12);
    assert_eq!(distribution_function(&u, &m, 4.0 * (-2.0f64).exp() + 1e-9).unwrap(), 0.0);
}

#[test]
fn rearrangement_examples() {
    let m = h3();
    let e = RadialProfile::expdecay(1.0).unwrap();
    let v = decreasing_rearrangement(&e, &m).unwrap();
    assert!(v.is_monotone());
    let s = m.ball_volume(1.0).unwrap();
    assert!(rel(v.value(s).unwrap(), (-1.0f64).exp()) < 1e-12);
    let plateau = RadialProfile::plateau(1.0, 2.0).unwrap();
    let v = decreasing_rearrangement(&plateau, &m).unwrap();
    assert_eq!(v.value(0.0).unwrap(), 1.0);
    assert_eq!(v.value(v.support_bound() * 1.01).unwrap(), 0.0);
}

#[test]
fn rearrangement_is_non_increasing() {
    let m = h3();
    let u = RadialProfile::powexp(2.0, 3.0).unwrap();
    let v = decreasing_rearrangement(&u, &m).unwrap();
    assert!(!v.is_monotone());
    let grid: Vec<f64> = numerics::linspace(-6.0, 4.0, 80).into_iter().map(f64::exp).collect();
    let vals: Vec<f64> = grid.iter().map(|&s| v.value(s).unwrap()).collect();
    assert!(vals.windows(2).all(|w| w[1] <= w[0] + 1e-14));
    assert!((vals[0] - u.sup_bound()).abs() < 1e-3);
}

#[test]
fn non_monotone_layer_cake_norms() {
    // ρ²e^{−3ρ} on ℍ³; ρ²e^{−ρ} is not integrable there for q ≤ 2
    let m = h3();
    let u = RadialProfile::powexp(2.0, 3.0).unwrap();
    let v = decreasing_rearrangement(&u, &m).unwrap();
    let loose = QuadratureConfig { rel_tol: 1e-9, ..cfg() };
    for q in [1.0, 2.0, 4.0] {
        let direct = lp_integral(&u, &m, q, &cfg()).unwrap().value;
        let via_v = v.power_integral(q, &loose).unwrap().value;
        assert!(rel(via_v, direct) < 1e-6, "q={q}: {via_v} vs {direct}");
    }
    assert!(matches!(
        lp_integral(&RadialProfile::powexp(2.0, 1.0).unwrap(), &m, 2.0, &cfg()),
        Err(Error::NotIntegrable(_))
    ));
}

#[test]
fn equimeasurable_norms_for_monotone_family() {
    for n in [3usize, 4] {
        let m = ManifoldModel::hyperbolic(n).unwrap();
        let p = 2.0;
        let sob = n as f64 * p / (n as f64 - p);
        for spec in ["gauss:1", "expdecay:3", "bump:1.5", "ramp:2"] {
            let u = RadialProfile::parse(spec).unwrap();
            let v = decreasing_rearrangement(&u, &m).unwrap();
            for q in [1.0, 2.0, p, sob] {
                let Ok(direct) = lp_integral(&u, &m, q, &cfg()) else { continue };
                let via_v = v.power_integral(q, &cfg()).unwrap().value;
                assert!(rel(via_v, direct.value) < 1e-6, "{spec} N={n} q={q}");
            }
        }
    }
}

#[test]
fn monotone_fixed_point() {
    let m = h3();
    for spec in ["gauss:0.5", "expdecay:2", "bump:2"] {
        let u = RadialProfile::parse(spec).unwrap();
        let v = VolumeProfile::via_level_sets(&u, &m).unwrap();
        for r in numerics::linspace(0.0, 3.0, 31) {
            let sym = v.symmetric_value(r).unwrap();
            assert!((sym - u.value(r)).abs() < 1e-8, "{spec} at {r}: {sym}");
        }
    }
}

#[test]
fn lp_norm_examples() {
    let m = h3();
    let u = RadialProfile::expdecay(2.0).unwrap();
    let l = lp_norm(&u, &m, 2.0, &cfg()).unwrap();
    assert!(rel(l * l, PI / 6.0) < 1e-10);
    let a: f64 = 2.0;
    let closed = PI * (1.0 / (2.0 * (a - 1.0)) + 1.0 / (2.0 * (a + 1.0)) - 1.0 / a);
    assert!(rel(closed, PI / 6.0) < 1e-15);
    let e1 = RadialProfile::expdecay(1.0).unwrap();
    assert!(matches!(lp_norm(&e1, &m, 2.0, &cfg()), Err(Error::NotIntegrable(_))));
    let ind = RadialProfile::indicator(1.0).unwrap();
    let e3 = ManifoldModel::euclidean(3).unwrap();
    assert!(rel(lp_norm(&ind, &e3, 3.0, &cfg()).unwrap(), (4.0 * PI / 3.0).powf(1.0 / 3.0)) < 1e-12);
}

#[test]
fn grad_norm_examples() {
    let m = h3();
    let u = RadialProfile::expdecay(2.0).unwrap();
    let g = grad_lp_norm(&u, &m, 2.0, &cfg()).unwrap();
    assert!(rel(g * g, 2.0 * PI / 3.0) < 1e-10);
    let e3 = ManifoldModel::euclidean(3).unwrap();
    let g = grad_lp_norm(&u, &e3, 2.0, &cfg()).unwrap();
    assert!(rel(g * g, PI / 2.0) < 1e-10);
    // plateau then ramp: only the ramp contributes
    let p = RadialProfile::plateau(1.0, 2.0).unwrap();
    let want = 4.0 * PI * numerics::integrate(|r| r.sinh().powi(2), 1.0, 2.0, &cfg()).unwrap().value;
    assert!(rel(grad_lp_integral(&p, &m, 2.0, &cfg()).unwrap().value, want) < 1e-10);
    let ind = RadialProfile::indicator(1.0).unwrap();
    assert!(matches!(grad_lp_norm(&ind, &m, 2.0, &cfg()), Err(Error::DomainError(_))));
}

#[test]
fn entropy_examples() {
    let m = h3();
    let u = RadialProfile::expdecay(2.0).unwrap();
    let ent = entropy_integral(&u, &m, 2.0, &cfg()).unwrap().value;
    assert!(rel(ent, -11.0 * PI / 36.0) < 1e-10);
    let ind = RadialProfile::indicator(1.0).unwrap();
    assert_eq!(entropy_integral(&ind, &m, 2.0, &cfg()).unwrap().value, 0.0);
    // scaling identity ∫(u/c)² ln(u/c) = (∫u² ln u − ln c ∫u²)/c²
    let c = (PI / 6.0).sqrt();
    let scaled = u.scaled(1.0 / c).unwrap();
    let got = entropy_integral(&scaled, &m, 2.0, &cfg()).unwrap().value;
    let want = (-11.0 * PI / 36.0 - c.ln() * PI / 6.0) / (c * c);
    assert!(rel(got, want) < 1e-10);
}

#[test]
fn entropy_split_adds_up_and_matches_layer_cake() {
    let m = h3();
    let u = RadialProfile::gauss(0.5).unwrap().scaled(3.0).unwrap();
    let (lo, hi) = entropy_split(&u, &m, 2.0, &cfg()).unwrap();
    assert!(lo.value < 0.0 && hi.value > 0.0);
    let total = entropy_integral(&u, &m, 2.0, &cfg()).unwrap();
    assert!((lo.value + hi.value - total.value).abs() <= 1e-12 * total.value.abs().max(1.0));
    // ∫u^p ln u = ∫₀^∞ μ(t)(p t^{p−1} ln t + t^{p−1}) dt with p = 2
    let layer = numerics::integrate_with_breaks(
        |t| distribution_function(&u, &m, t).unwrap() * (2.0 * t * t.ln() + t),
        0.0,
        3.0,
        &[1.0],
        &QuadratureConfig { rel_tol: 1e-10, ..cfg() },
    )
    .unwrap();
    assert!(rel(layer.value, total.value) < 1e-7, "{} vs {}", layer.value, total.value);
}

#[test]
fn decomposition_examples() {
    let m = h3();
    let u = RadialProfile::expdecay(2.0).unwrap();
    let d = gradient_decomposition(&u, &m, 2.0, &cfg()).unwrap();
    assert!(rel(d.euclidean_term + d.correction_term, 2.0 * PI / 3.0) < 1e-6, "{d:?}");
    assert!(d.correction_term >= 9.0 * 2.0 / 5.0 * d.weighted_energy);
    let e3 = ManifoldModel::euclidean(3).unwrap();
    let d = gradient_decomposition(&u, &e3, 2.0, &cfg()).unwrap();
    assert_eq!(d.correction_term, 0.0);
    assert!(rel(d.euclidean_term, PI / 2.0) < 1e-8);
    let bumpy = RadialProfile::powexp(2.0, 3.0).unwrap();
    assert!(matches!(gradient_decomposition(&bumpy, &m, 2.0, &cfg()), Err(Error::MonotoneRequired(_))));
}

#[test]
fn decomposition_identity_and_improved_polya_szego() {
    for n in [3usize, 4, 5] {
        let m = ManifoldModel::hyperbolic(n).unwrap();
        for p in [2.0, 2.5] {
            let lambda = constants::lambda_log(n, p, &m).unwrap();
            for spec in ["gauss:1", "expdecay:3", "bump:1.5"] {
                let u = RadialProfile::parse(spec).unwrap();
                if check_integrable(&u, &m, p).is_err() {
                    continue;
                }
                let d = gradient_decomposition(&u, &m, p, &cfg()).unwrap();
                let grad = grad_lp_integral(&u, &m, p, &cfg()).unwrap().value;
                let lp = lp_integral(&u, &m, p, &cfg()).unwrap().value;
                assert!(rel(d.euclidean_term + d.correction_term, grad) < 1e-6, "{spec} N={n} p={p}");
                assert!(grad - lambda * lp >= d.euclidean_term - 1e-8, "{spec} N={n} p={p}");
            }
        }
    }
}

#[test]
fn table_profile_from_csv() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("u.csv");
    let mut text = String::from("rho,value\n");
    for r in numerics::linspace(0.0, 3.0, 61) {
        text.push_str(&format!("{r},{}\n", (1.0 - r / 3.0).powi(2)));
    }
    std::fs::write(&path, text).unwrap();
    let u = RadialProfile::parse(&format!("table:{}", path.display())).unwrap();
    assert!(u.is_non_increasing());
    assert!((u.value(1.2345) - (1.0 - 1.2345f64 / 3.0).powi(2)).abs() < 1e-4);
    assert_eq!(u.value(3.5), 0.0);
    let m = h3();
    let l = lp_norm(&u, &m, 2.0, &cfg()).unwrap();
    assert!(l.is_finite() && l > 0.0);
    std::fs::write(&path, "rho,value\n0,1\n0.5,0.4\n0.5,0.2\n").unwrap();
    assert!(matches!(RadialProfile::parse(&format!("table:{}", path.display())), Err(Error::Parse(_))));
    assert!(matches!(RadialProfile::table(&dir.path().join("missing.csv")), Err(Error::Io(_))));
}
