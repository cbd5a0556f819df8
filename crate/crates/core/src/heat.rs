//! Heat kernels on ℍ^N for odd N, semigroup self-tests, the heat-kernel
//! measure γ and the extended Beckner / γ log-Sobolev verifiers.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::constants::ExponentParams;
use crate::error::{Error, Result};
use crate::manifold::ManifoldModel;
use crate::numerics::{self, QuadratureConfig, QuadratureResult};
use crate::rearrange::RadialProfile;
use crate::verify::{InequalityId, InequalityReport};

/// Dimension, time and the semigroup time scale α (unrelated to the GN α).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HeatKernelSpec {
    #[serde(rename = "N")]
    pub n: usize,
    pub t: f64,
    #[serde(default = "one")]
    pub alpha: f64,
}

fn one() -> f64 {
    1.0
}

impl HeatKernelSpec {
    pub fn new(n: usize, t: f64, alpha: f64) -> Result<Self> {
        let s = Self { n, t, alpha };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if !matches!(self.n, 3 | 5 | 7) {
            return Err(Error::RangeError(format!("heat kernels are implemented for N in {{3, 5, 7}}, got {}", self.n)));
        }
        if !(self.t > 0.0 && self.t.is_finite()) {
            return Err(Error::RangeError(format!("time t = {} must be positive", self.t)));
        }
        if !(self.alpha > 0.0 && self.alpha.is_finite()) {
            return Err(Error::RangeError(format!("time scale alpha = {} must be positive", self.alpha)));
        }
        Ok(())
    }

    fn at_time(&self, t: f64) -> Self {
        Self { t, ..*self }
    }

    /// Kernel time of P_t, i.e. α·t. The measure γ is the law of P_1 when t = 1.
    pub fn semigroup_time(&self) -> f64 {
        self.alpha * self.t
    }
}

/// Up to the third derivative of g(y) = arccosh(1+y)² in y.
fn g_jet(y: f64) -> [f64; 4] {
    if y < 0.5 {
        g_series(y)
    } else {
        g_closed(y)
    }
}

fn g_series(y: f64) -> [f64; 4] {
    {
        // g = Σ c_n yⁿ with c_n = −2(−2)ⁿ/(n²·C(2n,n))
        let mut jet = [0.0; 4];
        let mut c = 2.0; // c_1
        for n in 1..60i32 {
            let nf = n as f64;
            for (k, slot) in jet.iter_mut().enumerate() {
                let k = k as i32;
                if n >= k {
                    let falling: f64 = (0..k).map(|j| nf - j as f64).product();
                    *slot += c * falling * y.powi(n - k);
                }
            }
            // c_{n+1}/c_n = −n²/((n+1)(2n+1))
            c *= -nf * nf / ((nf + 1.0) * (2.0 * nf + 1.0));
        }
        jet
    }
}

/// Closed form through ρ = arccosh(1+y); loses accuracy as y → 0.
fn g_closed(y: f64) -> [f64; 4] {
    {
        let x = 1.0 + y;
        let a = x.acosh();
        let sh = (y * (y + 2.0)).sqrt();
        let a1 = 1.0 / sh;
        let a2 = -x / sh.powi(3);
        let a3 = (2.0 * x * x + 1.0) / sh.powi(5);
        [a * a, 2.0 * a * a1, 2.0 * a1 * a1 + 2.0 * a * a2, 6.0 * a1 * a2 + 2.0 * a * a3]
    }
}

/// p_N(ρ, t) for N ∈ {3, 5, 7}.
///
/// (1/sinh ρ)∂_ρ is d/dx in x = cosh ρ, so the m-fold operator is the m-th
/// derivative of exp(−g(y)/(4t)) with y = cosh ρ − 1, expanded by Faà di Bruno.
pub fn heat_kernel(spec: &HeatKernelSpec, rho: f64) -> Result<f64> {
    spec.validate()?;
    if !(rho >= 0.0) {
        return Err(Error::DomainError(format!("distance {rho} must be >= 0")));
    }
    let t = spec.t;
    if spec.n == 3 {
        let ratio = if rho < 1e-4 { 1.0 - rho * rho / 6.0 } else { rho / rho.sinh() };
        let v = (4.0 * PI * t).powf(-1.5) * ratio * (-t - rho * rho / (4.0 * t)).exp();
        return finite(v);
    }
    let m = (spec.n - 1) / 2;
    let mf = m as f64;
    // y = cosh ρ − 1 = 2 sinh²(ρ/2) without cancellation
    let y = 2.0 * (rho / 2.0).sinh().powi(2);
    if !y.is_finite() {
        return Ok(0.0);
    }
    let g = g_jet(y);
    let s = -1.0 / (4.0 * t);
    let (f1, f2, f3) = (s * g[1], s * g[2], s * g[3]);
    let poly = match m {
        2 => f2 + f1 * f1,
        3 => f3 + 3.0 * f1 * f2 + f1 * f1 * f1,
        _ => unreachable!(),
    };
    let sign = if m.is_multiple_of(2) { 1.0 } else { -1.0 };
    let pre = sign / (2.0 * PI).powi(m as i32) / (4.0 * PI * t).sqrt();
    finite(pre * poly * (-mf * mf * t + s * g[0]).exp())
}

fn finite(v: f64) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::NonFinite("heat kernel value".into()))
    }
}

fn heat_cfg() -> QuadratureConfig {
    QuadratureConfig { rel_tol: 1e-12, abs_tol: 1e-15, ..QuadratureConfig::default() }
}

/// Radius of the bulk of p_N(·,t)ψ^{N−1}, used as break point and tail cut.
fn bulk(n: usize, t: f64) -> (f64, f64) {
    let peak = 2.0 * (n as f64 - 1.0) * t;
    (peak, peak + 14.0 * t.sqrt() + 5.0)
}

/// ∫ g(ρ)·p_N(ρ, τ) dV for the kernel at time τ.
fn against_kernel<G: Fn(f64) -> f64>(spec: &HeatKernelSpec, tau: f64, g: G, extra_breaks: &[f64]) -> Result<QuadratureResult> {
    let m = ManifoldModel::hyperbolic(spec.n)?;
    let k = spec.at_time(tau);
    let (peak, cut) = bulk(spec.n, tau);
    let mut breaks = vec![peak];
    breaks.extend_from_slice(extra_breaks);
    let err = std::cell::Cell::new(None);
    let r = m.radial_integral(
        |rho| match heat_kernel(&k, rho) {
            Ok(p) => g(rho) * p,
            Err(e) => {
                err.set(Some(e));
                0.0
            }
        },
        None,
        &breaks,
        &heat_cfg().with_tail_cut(cut),
    )?;
    if let Some(e) = err.take() {
        return Err(e);
    }
    Ok(r)
}

/// ∫p_N(ρ,t)dV; 1 by mass conservation.
pub fn heat_normalization(spec: &HeatKernelSpec) -> Result<f64> {
    spec.validate()?;
    Ok(against_kernel(spec, spec.t, |_| 1.0, &[])?.value)
}

/// Grid for [`heat_pde_residual`]: (lo, hi, count) in ρ and in t.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PdeGrid {
    pub rho: (f64, f64, usize),
    pub t: (f64, f64, usize),
}

impl Default for PdeGrid {
    fn default() -> Self {
        Self { rho: (0.2, 3.0, 15), t: (0.5, 2.0, 7) }
    }
}

/// Residual |∂_t p − ∂²_ρ p − (N−1)coth ρ ∂_ρ p| at one point.
pub fn heat_pde_residual_at(n: usize, rho: f64, t: f64) -> Result<f64> {
    let spec = HeatKernelSpec::new(n, t, 1.0)?;
    if !(rho > 0.0) {
        return Err(Error::DomainError(format!("residual needs rho > 0, got {rho}")));
    }
    let in_t = |tt: f64| heat_kernel(&spec.at_time(tt), rho).unwrap_or(f64::NAN);
    let in_rho = |r: f64| heat_kernel(&spec, r.abs()).unwrap_or(f64::NAN);
    let dt = numerics::differentiate(in_t, t, 1)?;
    let d1 = numerics::differentiate(in_rho, rho, 1)?;
    let d2 = numerics::differentiate(in_rho, rho, 2)?;
    let res = dt - d2 - (n as f64 - 1.0) * d1 / rho.tanh();
    if res.is_finite() {
        Ok(res.abs())
    } else {
        Err(Error::NonFinite(format!("PDE residual at rho = {rho}, t = {t}")))
    }
}

/// Max residual of the radial heat equation over the grid; 0 on an empty grid.
pub fn heat_pde_residual(n: usize, grid: &PdeGrid) -> Result<f64> {
    HeatKernelSpec::new(n, 1.0, 1.0)?;
    let (rl, rh, rc) = grid.rho;
    let (tl, th, tc) = grid.t;
    if rc == 0 || tc == 0 {
        return Ok(0.0);
    }
    if !(rl > 0.0 && tl > 0.0 && rh >= rl && th >= tl) {
        return Err(Error::DomainError(format!("grid {grid:?} must lie inside (0,∞)×(0,∞)")));
    }
    let pts = |lo: f64, hi: f64, c: usize| if c == 1 { vec![lo] } else { numerics::linspace(lo, hi, c) };
    let mut worst = 0.0f64;
    for &t in &pts(tl, th, tc) {
        for &rho in &pts(rl, rh, rc) {
            worst = worst.max(heat_pde_residual_at(n, rho, t)?);
        }
    }
    Ok(worst)
}

/// (∫p_N(ρ,s)p_N(ρ,t)dV, p_N(0,s+t)).
pub fn chapman_kolmogorov_origin(spec: &HeatKernelSpec, s: f64, t: f64) -> Result<(f64, f64)> {
    spec.validate()?;
    if !(s > 0.0 && t > 0.0) {
        return Err(Error::RangeError(format!("times must be positive, got s = {s}, t = {t}")));
    }
    let ks = spec.at_time(s);
    let lhs = against_kernel(spec, t, |rho| heat_kernel(&ks, rho).unwrap_or(f64::NAN), &[bulk(spec.n, s).0])?;
    if !lhs.value.is_finite() {
        return Err(Error::NonFinite("Chapman-Kolmogorov integrand".into()));
    }
    let rhs = heat_kernel(&spec.at_time(s + t), 0.0)?;
    Ok((lhs.value, rhs))
}

/// P_t f(0) = ∫f·p_N(ρ, αt)dV.
pub fn semigroup_apply_origin(f: &RadialProfile, spec: &HeatKernelSpec) -> Result<f64> {
    spec.validate()?;
    let r = against_kernel(spec, spec.semigroup_time(), |rho| f.value(rho), f.breaks())?;
    if r.value.is_finite() {
        Ok(r.value)
    } else {
        Err(Error::NotIntegrable(format!("'{}' against the heat kernel", f.label())))
    }
}

/// Probability measure γ = p_N(ρ, αt)dV (t = 1 in the usual statement).
/// Integrals are divided by the computed mass of γ so that constants
/// integrate to exactly 1.
struct GammaMeasure<'a> {
    spec: &'a HeatKernelSpec,
    mass: QuadratureResult,
}

impl<'a> GammaMeasure<'a> {
    fn new(spec: &'a HeatKernelSpec) -> Result<Self> {
        spec.validate()?;
        let mass = against_kernel(spec, spec.semigroup_time(), |_| 1.0, &[])?;
        Ok(Self { spec, mass })
    }

    fn integral<G: Fn(f64) -> f64>(&self, g: G, f: &RadialProfile) -> Result<QuadratureResult> {
        let r = against_kernel(self.spec, self.spec.semigroup_time(), g, f.breaks())?;
        if !r.value.is_finite() {
            return Err(Error::NotIntegrable(format!("'{}' against γ", f.label())));
        }
        Ok(r.scale(1.0 / self.mass.value))
    }
}

/// f must be bounded with a bounded derivative and strictly positive on the
/// effective support of γ.
fn check_smooth_positive(f: &RadialProfile, spec: &HeatKernelSpec) -> Result<()> {
    if !f.is_lipschitz() {
        return Err(Error::RangeError(format!("'{}' has a jump", f.label())));
    }
    let (_, cut) = bulk(spec.n, spec.semigroup_time());
    let inf = numerics::linspace(0.0, cut, 401).into_iter().map(|r| f.value(r)).fold(f64::INFINITY, f64::min);
    if !(inf > 0.0) || !f.sup_bound().is_finite() {
        return Err(Error::RangeError(format!(
            "'{}' must be bounded and strictly positive (infimum {inf} on [0, {cut:.1}]); add an offset",
            f.label()
        )));
    }
    Ok(())
}

fn heat_params(spec: &HeatKernelSpec, p: f64, q: Option<f64>) -> ExponentParams {
    let mut params = ExponentParams::new(spec.n, p).with_alpha(spec.alpha);
    params.q = q;
    params
}

/// (∫f^q dγ)^{2/q} − (∫f^p dγ)^{2/p} ≤ 2αt(q−p)(∫|f'|^q dγ)^{2/q}
pub fn verify_extended_beckner(f: &RadialProfile, spec: &HeatKernelSpec, p: f64, q: f64) -> Result<InequalityReport> {
    if !(q >= 2.0 && q.is_finite()) || !(p >= 1.0 && p <= q) {
        return Err(Error::RangeError(format!("extended Beckner needs q >= 2 and 1 <= p <= q, got p = {p}, q = {q}")));
    }
    check_smooth_positive(f, spec)?;
    let gamma = GammaMeasure::new(spec)?;
    let iq = gamma.integral(|r| f.value(r).abs().powf(q), f)?;
    let ip = if p == q { iq } else { gamma.integral(|r| f.value(r).abs().powf(p), f)? };
    let grad = gamma.integral(|r| f.derivative(r).abs().powf(q), f)?;
    let lhs = iq.value.powf(2.0 / q) - ip.value.powf(2.0 / p);
    let rhs = 2.0 * spec.semigroup_time() * (q - p) * grad.value.powf(2.0 / q);
    let err = iq.error_estimate + ip.error_estimate + grad.error_estimate + gamma.mass.error_estimate;
    Ok(InequalityReport::new(
        InequalityId::ExtendedBeckner,
        "hyperbolic",
        heat_params(spec, p, Some(q)),
        f.label(),
        lhs,
        rhs,
        err,
        false,
    ))
}

/// ∫f²log f² dγ ≤ log(∫f²dγ)∫f²dγ + 4αt∫|f'|²dγ
pub fn verify_gamma_log_sobolev(f: &RadialProfile, spec: &HeatKernelSpec) -> Result<InequalityReport> {
    check_smooth_positive(f, spec)?;
    let gamma = GammaMeasure::new(spec)?;
    let ent = gamma.integral(
        |r| {
            let v = f.value(r);
            v * v * (v * v).ln()
        },
        f,
    )?;
    let l2 = gamma.integral(|r| f.value(r).powi(2), f)?;
    let grad = gamma.integral(|r| f.derivative(r).powi(2), f)?;
    let lhs = ent.value;
    let rhs = l2.value.ln() * l2.value + 4.0 * spec.semigroup_time() * grad.value;
    let err = ent.error_estimate
        + l2.error_estimate * (1.0 + l2.value.ln().abs())
        + 4.0 * spec.semigroup_time() * grad.error_estimate
        + gamma.mass.error_estimate;
    Ok(InequalityReport::new(
        InequalityId::GammaLogSobolev,
        "hyperbolic",
        heat_params(spec, 2.0, None),
        f.label(),
        lhs,
        rhs,
        err,
        false,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn g_series_meets_closed_form() {
        for y in [0.2, 0.35, 0.5, 0.7] {
            let (a, b) = (g_series(y), g_closed(y));
            for k in 0..4 {
                assert!((a[k] - b[k]).abs() < 1e-12 * b[k].abs().max(1.0), "y={y} k={k}: {} vs {}", a[k], b[k]);
            }
        }
    }

    #[test]
    fn g_series_leading_terms() {
        let j = g_jet(0.0);
        assert_eq!(j[0], 0.0);
        assert!((j[1] - 2.0).abs() < 1e-15);
        assert!((j[2] + 2.0 / 3.0).abs() < 1e-15);
        assert!((j[3] - 24.0 / 45.0).abs() < 1e-15);
    }
}
