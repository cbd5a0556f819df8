use ineq_forge::numerics::*;
use ineq_forge::Error;
use proptest::prelude::*;

fn cfg() -> QuadratureConfig {
    QuadratureConfig::default()
}

#[test]
fn semi_infinite_oracles() {
    let r = integrate_semi_infinite(|x| (-2.0 * x).exp(), &cfg()).unwrap();
    assert!((r.value - 0.5).abs() < 1e-12);
    assert!(r.error_estimate >= 0.0);
    let r = integrate_semi_infinite(|x| (-x * x / 2.0).exp(), &cfg()).unwrap();
    assert!((r.value - (std::f64::consts::PI / 2.0).sqrt()).abs() < 1e-11);
    let r = integrate_semi_infinite(|x| x * (-4.0 * x).exp(), &cfg()).unwrap();
    assert!((r.value - 0.0625).abs() < 1e-12);
}

#[test]
fn semi_infinite_reports_non_finite() {
    let r = integrate_semi_infinite(|x| if x > 1.0 { f64::NAN } else { 1.0 }, &cfg());
    assert!(matches!(r, Err(Error::NonFinite(_))));
}

#[test]
fn differentiate_examples() {
    assert!((differentiate(f64::sinh, 0.0, 3).unwrap() - 1.0).abs() < 1e-7);
    let poly = |t: f64| t + t.powi(3) - t.powi(5);
    assert!((differentiate(poly, 0.0, 3).unwrap() - 6.0).abs() < 6e-7);
    assert!((differentiate(f64::sinh, 1.0, 1).unwrap() - 1f64.cosh()).abs() < 1e-7 * 1f64.cosh());
}

#[test]
fn differentiate_relative_accuracy_on_analytic_functions() {
    for &x in &[-2.0, -0.7, 0.3, 1.0, 2.5] {
        let checks: [(u32, f64, f64); 6] = [
            (1, differentiate(f64::sinh, x, 1).unwrap(), x.cosh()),
            (2, differentiate(f64::sinh, x, 2).unwrap(), x.sinh()),
            (3, differentiate(f64::sinh, x, 3).unwrap(), x.cosh()),
            (1, differentiate(f64::cosh, x, 1).unwrap(), x.sinh()),
            (2, differentiate(f64::cosh, x, 2).unwrap(), x.cosh()),
            (3, differentiate(|t: f64| t.powi(4) - 2.0 * t, x, 3).unwrap(), 24.0 * x),
        ];
        for (order, got, want) in checks {
            let scale = want.abs().max(1.0);
            assert!((got - want).abs() <= 1e-7 * scale, "order {order} at {x}: {got} vs {want}");
        }
    }
}

#[test]
fn differentiate_rejects_bad_order_and_nan() {
    assert!(differentiate(f64::sin, 0.0, 4).is_err());
    assert!(matches!(differentiate(|_| f64::NAN, 0.0, 1), Err(Error::NonFinite(_))));
}

#[test]
fn invert_monotone_examples() {
    let phi3 = |t: f64| 0.75 * (2.0 * t).sinh() - 1.5 * t;
    let x = invert_monotone(phi3, 1.2201453, [0.0, 5.0]).unwrap();
    assert!((x - 1.0).abs() < 1e-6);
    assert!((invert_monotone(|t| t * t * t, 8.0, [0.0, 10.0]).unwrap() - 2.0).abs() < 1e-12);
    assert_eq!(invert_monotone(|t| t * t * t, 0.0, [0.0, 10.0]).unwrap(), 0.0);
    assert!(matches!(invert_monotone(|t| t, 11.0, [0.0, 10.0]), Err(Error::BracketError { .. })));
}

#[test]
fn minimize_examples() {
    let (x, v) = minimize_scalar(|t| (t - 2.0).powi(2), (0.0, 5.0, 101)).unwrap();
    assert!((x - 2.0).abs() < 1e-6 && v.abs() < 1e-12);
    let (x, v) = minimize_scalar(f64::cosh, (-1.0, 1.0, 51)).unwrap();
    assert!(x.abs() < 1e-6 && (v - 1.0).abs() < 1e-12);
    assert!(minimize_scalar(|t| t, (0.0, 1.0, 2)).is_err());
}

#[test]
fn erf_examples() {
    assert_eq!(erf(0.0), 0.0);
    assert!((erf(1.0) - 0.8427007929497149).abs() < 1e-12);
    assert!((erf(-1.0) + 0.8427007929497149).abs() < 1e-12);
    assert!((erf(40.0) - 1.0).abs() < 1e-15 && (erf(-40.0) + 1.0).abs() < 1e-15);
}

#[test]
fn erf_matches_quadrature_definition() {
    for &x in &[0.1, 0.5, 1.3, 2.7] {
        let q = integrate(|t| (-t * t).exp(), 0.0, x, &cfg()).unwrap().value * 2.0 / std::f64::consts::PI.sqrt();
        assert!((erf(x) - q).abs() < 1e-12);
    }
}

#[test]
fn erf_monotone_on_grid() {
    let g = linspace(-5.0, 5.0, 1001);
    assert!(g.windows(2).all(|w| erf(w[1]) >= erf(w[0])));
}

#[test]
fn gamma_spot_values() {
    assert!((gamma(0.5) - std::f64::consts::PI.sqrt()).abs() < 1e-13);
    for n in 1..12 {
        let fact: f64 = (1..n).map(|k| k as f64).product();
        assert!((gamma(n as f64) - fact).abs() <= 1e-12 * fact);
    }
}

proptest! {
    #[test]
    fn quadrature_is_linear(a in -3.0f64..3.0, b in -3.0f64..3.0, r1 in 0.5f64..4.0, r2 in 0.5f64..4.0) {
        let f = |x: f64| (-r1 * x).exp();
        let g = |x: f64| x * (-r2 * x * x).exp();
        let c = cfg();
        let fi = integrate_semi_infinite(f, &c).unwrap();
        let gi = integrate_semi_infinite(g, &c).unwrap();
        let h = integrate_semi_infinite(|x| a * f(x) + b * g(x), &c).unwrap();
        let tol = 2.0 * (h.error_estimate + a.abs() * fi.error_estimate + b.abs() * gi.error_estimate) + 1e-12;
        prop_assert!((h.value - (a * fi.value + b * gi.value)).abs() <= tol);
    }

    #[test]
    fn invert_round_trips(x in 0.0f64..4.0) {
        let f = |t: f64| t.sinh() + t * t * t;
        let y = f(x);
        let back = invert_monotone(f, y, [0.0, 4.0]).unwrap();
        prop_assert!((back - x).abs() < 1e-10);
    }

    #[test]
    fn erf_is_odd(x in -6.0f64..6.0) {
        prop_assert_eq!(erf(x) + erf(-x), 0.0);
    }
}
