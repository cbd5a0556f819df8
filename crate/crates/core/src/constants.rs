//! Sharp and derived constants: correction kernel and its lower constant,
//! λ(N,p), 𝓛_{N,p}, S(N,p), the GN constants, G, C₂ and the Poincaré constant.

use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::manifold::{sphere_area, ConditionId, ManifoldModel, Warping};
use crate::numerics::{self, ln_gamma, QuadratureConfig};

/// Exponent bundle shared by constants and verifiers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExponentParams {
    #[serde(rename = "N")]
    pub n: usize,
    pub p: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    /// Beckner family: q₀ (with b = 1 − a·q₀ unless given)
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q0: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b: Option<f64>,
}

impl ExponentParams {
    pub fn new(n: usize, p: f64) -> Self {
        Self { n, p, alpha: None, q: None, s: None, lambda: None, q0: None, a: None, b: None }
    }

    pub fn with_alpha(mut self, alpha: f64) -> Self {
        self.alpha = Some(alpha);
        self
    }

    pub fn with_q(mut self, q: f64) -> Self {
        self.q = Some(q);
        self
    }

    pub fn with_s(mut self, s: f64) -> Self {
        self.s = Some(s);
        self
    }

    pub fn with_lambda(mut self, lambda: f64) -> Self {
        self.lambda = Some(lambda);
        self
    }

    pub fn with_beckner(mut self, a: f64, b: f64, q0: f64) -> Self {
        self.a = Some(a);
        self.b = Some(b);
        self.q0 = Some(q0);
        self
    }
}

/// k_{N,p}(s) = ψ(Φ⁻¹(s))^{p(N−1)} − s^{p(N−1)/N}
pub fn correction_kernel(m: &ManifoldModel, p: f64, s: f64) -> Result<f64> {
    if !(s >= 0.0) || !s.is_finite() {
        return Err(Error::DomainError(format!("volume coordinate {s} must be finite and >= 0")));
    }
    if matches!(m.warping(), Warping::Identity) || s == 0.0 {
        return Ok(0.0);
    }
    let n = m.dim() as f64;
    let t = m.phi_inverse(s)?;
    Ok(m.psi(t).powf(p * (n - 1.0)) - s.powf(p * (n - 1.0) / n))
}

fn ser_extended<S: Serializer>(x: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    if x.is_finite() {
        s.serialize_f64(*x)
    } else if *x > 0.0 {
        s.serialize_str("inf")
    } else if *x < 0.0 {
        s.serialize_str("-inf")
    } else {
        s.serialize_str("nan")
    }
}

/// Result of the correction-quotient scan.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LowerConstant {
    #[serde(rename = "C")]
    pub c: f64,
    #[serde(serialize_with = "ser_extended")]
    pub limit_zero: f64,
    /// None for models without a t → ∞ end
    pub limit_infinity: Option<f64>,
    pub argmin: f64,
    /// grid infimum alone, before endpoint limits are folded in
    pub grid_min: f64,
}

/// Analytic t → 0 limit of the correction quotient.
pub fn quotient_limit_zero(m: &ManifoldModel, p: f64) -> Result<f64> {
    let a3 = m.taylor_a3()?;
    if a3 == 0.0 {
        return Ok(0.0);
    }
    let n = m.dim() as f64;
    Ok(if p == 2.0 {
        6.0 * (n - 1.0) * a3 / (n + 2.0)
    } else if p > 2.0 {
        a3.signum() * f64::INFINITY
    } else {
        0.0
    })
}

/// C(N,p) = inf_t k(Φ(t))/Φ(t)^p over the scan grid and both endpoint limits.
pub fn correction_lower_constant(m: &ManifoldModel, p: f64, scan: (f64, f64, usize)) -> Result<LowerConstant> {
    let n = m.dim() as f64;
    if !(p >= n / (n - 1.0)) {
        return Err(Error::RangeError(format!("p = {p} must be >= N/(N-1) = {}", n / (n - 1.0))));
    }
    if m.dim() >= 3 {
        let reports = m.check_conditions(p, scan)?;
        if let Some(r) = reports.iter().find(|r| r.condition_id == ConditionId::KernelPositive && !r.passed) {
            if let Some(w) = &r.witness {
                if w.value < 0.0 {
                    return Err(Error::ConditionViolated(format!(
                        "correction kernel is negative at t = {} (k = {})",
                        w.t, w.value
                    )));
                }
            }
        }
    }
    let limit_zero = quotient_limit_zero(m, p)?;
    let limit_infinity = if m.is_complete() {
        let c1 = m.c1_limit()?;
        Some(((n - 1.0) / n * c1).powf(p))
    } else {
        None
    };
    if matches!(m.warping(), Warping::Identity) {
        return Ok(LowerConstant { c: 0.0, limit_zero, limit_infinity, argmin: scan.0, grid_min: 0.0 });
    }
    let quotient = |t: f64| m.kernel_at_radius(p, t).map(|k| k.quotient).unwrap_or(f64::NAN);
    let (argmin, grid_min) = numerics::minimize_scalar(quotient, scan)?;
    let mut c = grid_min.min(limit_zero);
    if let Some(li) = limit_infinity {
        c = c.min(li);
    }
    Ok(LowerConstant { c, limit_zero, limit_infinity, argmin, grid_min })
}

/// Scan used when a caller needs C(N,p) without choosing a grid.
pub const DEFAULT_SCAN: (f64, f64, usize) = (1e-3, 20.0, 400);

/// N²(N−1)/(4(N+2))
pub fn hyperbolic_lambda_p2(n: usize) -> f64 {
    let n = n as f64;
    n * n * (n - 1.0) / (4.0 * (n + 2.0))
}

/// λ(N,p) = C(N,p)·N^p/p^p
pub fn lambda_from_c(n: usize, p: f64, c: f64) -> f64 {
    c * (n as f64 / p).powf(p)
}

/// λ(N,p) for 2 ≤ p < N on the given model.
pub fn lambda_log(n: usize, p: f64, m: &ManifoldModel) -> Result<f64> {
    if n != m.dim() {
        return Err(Error::DimensionError(format!("N = {n} but the model has dimension {}", m.dim())));
    }
    if !(p >= 2.0 && p < n as f64) {
        return Err(Error::RangeError(format!("lambda(N,p) needs 2 <= p < N, got p = {p}, N = {n}")));
    }
    if m.is_hyperbolic() && p == 2.0 {
        return Ok(hyperbolic_lambda_p2(n));
    }
    let lc = correction_lower_constant(m, p, DEFAULT_SCAN)?;
    Ok(lambda_from_c(n, p, lc.c))
}

/// 𝓛_{N,p}, the sharp Euclidean L^p log-Sobolev constant (1 ≤ p < N).
pub fn log_sobolev_constant(n: usize, p: f64) -> Result<f64> {
    let nf = n as f64;
    if !(p >= 1.0 && p < nf) {
        return Err(Error::RangeError(format!("L(N,p) needs 1 <= p < N, got p = {p}, N = {n}")));
    }
    // (p−1)^{p−1} is taken as 1 at p = 1
    let pow_term = if p == 1.0 { 1.0 } else { ((p - 1.0) / std::f64::consts::E).powf(p - 1.0) };
    let gamma_ratio = (ln_gamma(nf / 2.0 + 1.0) - ln_gamma(nf * (p - 1.0) / p + 1.0)) * p / nf;
    Ok(p / nf * std::f64::consts::PI.powf(-p / 2.0) * pow_term * gamma_ratio.exp())
}

/// Talenti closed form of S(N,p) with ‖∇u‖_p ≥ S‖u‖_{Np/(N−p)}.
pub fn talenti_sobolev_constant(n: usize, p: f64) -> Result<f64> {
    let nf = n as f64;
    if !(p > 1.0 && p < nf) {
        return Err(Error::RangeError(format!("S(N,p) needs 1 < p < N, got p = {p}, N = {n}")));
    }
    let ln_k = -0.5 * std::f64::consts::PI.ln() - nf.ln() / p
        + (1.0 - 1.0 / p) * ((p - 1.0) / (nf - p)).ln()
        + (ln_gamma(1.0 + nf / 2.0) + ln_gamma(nf) - ln_gamma(nf / p) - ln_gamma(1.0 + nf - nf / p)) / nf;
    Ok((-ln_k).exp())
}

/// ‖∇b‖_p/‖b‖_{Np/(N−p)} at the bubble b = (1+r^{p/(p−1)})^{−(N−p)/p}.
pub fn bubble_rayleigh_quotient(n: usize, p: f64) -> Result<f64> {
    let nf = n as f64;
    if !(p > 1.0 && p < nf) {
        return Err(Error::RangeError(format!("bubble needs 1 < p < N, got p = {p}, N = {n}")));
    }
    let pp = p / (p - 1.0);
    let expo = (nf - p) / p;
    let pstar = nf * p / (nf - p);
    let cfg = QuadratureConfig { rel_tol: 1e-13, abs_tol: 1e-300, max_subdivisions: 20000, tail_cut: 20.0 };
    // r = e^y so both ends decay exponentially in y
    let ln_b = |y: f64| -expo * (pp * y).exp().ln_1p();
    let val = |y: f64| (pstar * ln_b(y) + nf * y).exp();
    let grad = |y: f64| {
        // |b'| = expo·pp·r^{pp−1}(1+r^{pp})^{−expo−1}
        let r_pp = (pp * y).exp();
        let ln_g = (expo * pp).ln() + (pp - 1.0) * y - (expo + 1.0) * r_pp.ln_1p();
        (p * ln_g + nf * y).exp()
    };
    let both = |f: &dyn Fn(f64) -> f64| -> Result<f64> {
        let hi = numerics::integrate_from(f, 0.0, &[], &cfg)?;
        let lo = numerics::integrate_from(|y| f(-y), 0.0, &[], &cfg)?;
        Ok(hi.value + lo.value)
    };
    let omega = sphere_area(n);
    let num = (omega * both(&grad)?).powf(1.0 / p);
    let den = (omega * both(&val)?).powf(1.0 / pstar);
    Ok(num / den)
}

/// S(N,p) from the Talenti form, refused unless the bubble quotient agrees to 1e-6.
pub fn sharp_sobolev_constant(n: usize, p: f64) -> Result<f64> {
    let s = talenti_sobolev_constant(n, p)?;
    let oracle = bubble_rayleigh_quotient(n, p)?;
    if ((s - oracle) / oracle).abs() > 1e-6 {
        return Err(Error::NonConvergent(format!(
            "Talenti value {s} disagrees with the bubble quotient {oracle} for N = {n}, p = {p}"
        )));
    }
    Ok(s)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GnBranch {
    AlphaGt1,
    AlphaLt1,
}

impl GnBranch {
    pub fn for_alpha(alpha: f64) -> Result<Self> {
        if alpha > 1.0 {
            Ok(Self::AlphaGt1)
        } else if alpha > 0.0 && alpha < 1.0 {
            Ok(Self::AlphaLt1)
        } else {
            Err(Error::RangeError(format!("alpha = {alpha} must lie in (0,1) or (1, N/(N-p)]")))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GnConstant {
    pub constant: f64,
    pub theta: f64,
    pub q: f64,
    pub delta: f64,
}

/// Sharp Euclidean Gagliardo–Nirenberg constants GN₁ (α > 1) and GN₂ (α < 1).
pub fn gn_constant(params: &ExponentParams, branch: GnBranch) -> Result<GnConstant> {
    let nf = params.n as f64;
    let p = params.p;
    if !(p > 1.0 && p < nf) {
        return Err(Error::RangeError(format!("GN needs 1 < p < N, got p = {p}, N = {}", params.n)));
    }
    let alpha = params
        .alpha
        .ok_or_else(|| Error::RangeError("GN constant needs alpha".into()))?;
    let upper = nf / (nf - p);
    if !(alpha > 0.0 && alpha <= upper) || alpha == 1.0 {
        return Err(Error::RangeError(format!("alpha = {alpha} must lie in (0, {upper}] and differ from 1")));
    }
    let actual = GnBranch::for_alpha(alpha)?;
    if actual != branch {
        return Err(Error::BranchMismatch(format!("alpha = {alpha} belongs to {actual:?}, not {branch:?}")));
    }
    let q = alpha * (p - 1.0) + 1.0;
    let delta = nf * p - (nf - p) * q;
    let pi_sqrt = std::f64::consts::PI.sqrt();
    let common = ln_gamma(nf / 2.0 + 1.0) - ln_gamma(nf * (p - 1.0) / p + 1.0);
    match branch {
        GnBranch::AlphaGt1 => {
            let theta = nf * (alpha - 1.0) / (alpha * (nf * p - (alpha * p + 1.0 - alpha) * (nf - p)));
            let ln_c = theta * ((q - p) / (p * pi_sqrt)).ln()
                + theta / p * (p * q / (nf * (q - p))).ln()
                + (delta / (p * q)).ln() / (alpha * p)
                + theta / nf * (ln_gamma(q * (p - 1.0) / (q - p)) - ln_gamma((p - 1.0) / p * delta / (q - p)) + common);
            Ok(GnConstant { constant: ln_c.exp(), theta, q, delta })
        }
        GnBranch::AlphaLt1 => {
            let theta = nf * (1.0 - alpha) / ((alpha * p + 1.0 - alpha) * (nf - alpha * (nf - p)));
            let ln_c = theta * ((p - q) / (p * pi_sqrt)).ln()
                + theta / p * (p * q / (nf * (p - q))).ln()
                + (1.0 - theta) / (alpha * p) * (p * q / delta).ln()
                + theta / nf
                    * (ln_gamma((p - 1.0) / p * delta / (p - q) + 1.0) - ln_gamma(q * (p - 1.0) / (p - q) + 1.0) + common);
            Ok(GnConstant { constant: ln_c.exp(), theta, q, delta })
        }
    }
}

/// G = ∫e^{−ρ²/2}dV on ℍ^N, by the closed erf series.
pub fn gaussian_normalization(n: usize) -> Result<f64> {
    if n < 2 {
        return Err(Error::DimensionError(format!("N = {n} must be >= 2")));
    }
    let m = n - 1;
    let mut sum = 0.0;
    let mut binom = 1.0;
    for k in 0..=m {
        let a = m as f64 - 2.0 * k as f64;
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        // e^{a²/2}(1 + erf(a/√2)) = e^{a²/2}·erfc(−a/√2)
        sum += sign * binom * (a * a / 2.0).exp() * numerics::erfc(-a / std::f64::consts::SQRT_2);
        binom = binom * (m - k) as f64 / (k + 1) as f64;
    }
    Ok((std::f64::consts::PI / 2.0).sqrt() * sphere_area(n) / 2f64.powi(m as i32) * sum)
}

/// G by radial quadrature, for cross-validation of the series.
pub fn gaussian_normalization_quadrature(n: usize, cfg: &QuadratureConfig) -> Result<f64> {
    let m = ManifoldModel::hyperbolic(n)?;
    let cut = (n as f64 - 1.0) + 12.0;
    Ok(m.radial_integral(|r| (-r * r / 2.0).exp(), None, &[], &cfg.with_tail_cut(cut))?.value)
}

/// √(2π)2^{1−N}e^{(N−1)²/2}ω_{N−1}
pub fn gaussian_normalization_bound(n: usize) -> f64 {
    let nm = n as f64 - 1.0;
    (2.0 * std::f64::consts::PI).sqrt() / 2f64.powf(nm) * (nm * nm / 2.0).exp() * sphere_area(n)
}

/// C₂ = 𝓛(N,2)^{N/2}·√(2π)2^{1−N}e^{(N−1)²/2}ω_{N−1}·(Ne/4)^{N/2}
pub fn gaussian_c2(n: usize) -> Result<f64> {
    if n < 3 {
        return Err(Error::RangeError(format!("C2 needs N >= 3, got {n}")));
    }
    let nf = n as f64;
    let l = log_sobolev_constant(n, 2.0)?;
    Ok(l.powf(nf / 2.0) * gaussian_normalization_bound(n) * (nf * std::f64::consts::E / 4.0).powf(nf / 2.0))
}

/// ((N−1)/p)^p
pub fn poincare_constant(n: usize, p: f64) -> Result<f64> {
    if n < 2 {
        return Err(Error::DimensionError(format!("N = {n} must be >= 2")));
    }
    if !(p > 1.0) || !p.is_finite() {
        return Err(Error::RangeError(format!("Poincaré constant needs p > 1, got {p}")));
    }
    Ok(((n as f64 - 1.0) / p).powf(p))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn log_sobolev_p1_is_finite() {
        let v = log_sobolev_constant(3, 1.0).unwrap();
        assert!(v.is_finite() && v > 0.0);
    }

    #[test]
    fn gn_branch_gate() {
        let p = ExponentParams::new(3, 2.0).with_alpha(2.0);
        assert!(matches!(gn_constant(&p, GnBranch::AlphaLt1), Err(Error::BranchMismatch(_))));
        let p = ExponentParams::new(3, 2.0).with_alpha(1.0);
        assert!(matches!(gn_constant(&p, GnBranch::AlphaGt1), Err(Error::RangeError(_))));
        let p = ExponentParams::new(3, 2.0).with_alpha(3.5);
        assert!(matches!(gn_constant(&p, GnBranch::AlphaGt1), Err(Error::RangeError(_))));
    }

    #[test]
    fn limit_zero_regimes() {
        let h = ManifoldModel::hyperbolic(4).unwrap();
        assert_eq!(quotient_limit_zero(&h, 3.0).unwrap(), f64::INFINITY);
        assert!((quotient_limit_zero(&h, 2.0).unwrap() - 0.5).abs() < 1e-12);
        let e = ManifoldModel::euclidean(4).unwrap();
        assert_eq!(quotient_limit_zero(&e, 3.0).unwrap(), 0.0);
    }
}
