//! Rotationally symmetric model manifolds dr² + ψ(r)² g_S.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{self, QuadratureConfig, QuadratureResult};

type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// The warping function ψ.
#[derive(Clone)]
pub enum Warping {
    /// ψ(t) = t
    Identity,
    /// ψ(t) = sinh t
    Sinh,
    /// ψ(t) = Σ c_k t^k with the slice holding c_1, c_2, ...
    Poly(Vec<f64>),
    /// Arbitrary ψ; derivatives by finite differences.
    Custom(ScalarFn),
}

impl fmt::Debug for Warping {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Warping::Identity => write!(f, "Identity"),
            Warping::Sinh => write!(f, "Sinh"),
            Warping::Poly(c) => write!(f, "Poly({c:?})"),
            Warping::Custom(_) => write!(f, "Custom(..)"),
        }
    }
}

fn poly_eval(c: &[f64], t: f64) -> f64 {
    // c[k] multiplies t^(k+1)
    c.iter().rev().fold(0.0, |acc, &ck| acc * t + ck) * t
}

fn poly_deriv(c: &[f64], t: f64, order: u32) -> f64 {
    let mut acc = 0.0;
    for (k, &ck) in c.iter().enumerate().rev() {
        let pow = (k + 1) as i32;
        let ord = order as i32;
        if pow < ord {
            continue;
        }
        let mut fall = 1.0;
        for j in 0..ord {
            fall *= (pow - j) as f64;
        }
        acc += ck * fall * t.powi(pow - ord);
    }
    acc
}

/// Dense coefficient vector (constant term first) of ψ(t) = Σ c_k t^k.
fn poly_dense(c: &[f64]) -> Vec<f64> {
    let mut d = vec![0.0];
    d.extend_from_slice(c);
    d
}

fn poly_mul(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// ∫₀ᵗ of a dense polynomial.
fn poly_integral(d: &[f64], t: f64) -> f64 {
    d.iter()
        .enumerate()
        .rev()
        .fold(0.0, |acc, (k, &ck)| acc * t + ck / (k + 1) as f64)
        * t
}

impl Warping {
    pub fn value(&self, t: f64) -> f64 {
        match self {
            Warping::Identity => t,
            Warping::Sinh => t.sinh(),
            Warping::Poly(c) => poly_eval(c, t),
            Warping::Custom(f) => f(t),
        }
    }

    /// Derivative of order 1, 2 or 3.
    pub fn derivative(&self, t: f64, order: u32) -> f64 {
        match self {
            Warping::Identity => {
                if order == 1 {
                    1.0
                } else {
                    0.0
                }
            }
            Warping::Sinh => {
                if order % 2 == 1 {
                    t.cosh()
                } else {
                    t.sinh()
                }
            }
            Warping::Poly(c) => poly_deriv(c, t, order),
            Warping::Custom(f) => numerics::differentiate(|x| f(x), t, order).unwrap_or(f64::NAN),
        }
    }

    /// ψ'(t) − 1 without cancellation where a closed form exists.
    pub fn slope_minus_one(&self, t: f64) -> f64 {
        match self {
            Warping::Identity => 0.0,
            Warping::Sinh => {
                let h = (0.5 * t).sinh();
                2.0 * h * h
            }
            Warping::Poly(c) => {
                let mut d = c.clone();
                if !d.is_empty() {
                    d[0] -= 1.0;
                }
                poly_deriv(&d, t, 1)
            }
            Warping::Custom(_) => self.derivative(t, 1) - 1.0,
        }
    }

    pub fn ln_value(&self, t: f64) -> f64 {
        match self {
            Warping::Identity => t.ln(),
            Warping::Sinh => numerics::ln_sinh(t),
            _ => self.value(t).ln(),
        }
    }
}

/// Kinds accepted by [`builtin_manifold`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BuiltinKind {
    Euclidean,
    Hyperbolic,
    Counterexample,
}

/// Dimension plus warping function, with an interval (0, upper) where ψ > 0.
#[derive(Clone, Debug)]
pub struct ManifoldModel {
    dim: usize,
    warping: Warping,
    upper: f64,
    label: String,
}

/// Which checker produced a [`ConditionReport`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConditionId {
    Regularity,
    Convexity,
    SlopeGeOne,
    C1Limit,
    KernelPositive,
    AttainmentZero,
}

impl ConditionId {
    pub const ALL: [ConditionId; 6] = [
        ConditionId::Regularity,
        ConditionId::Convexity,
        ConditionId::SlopeGeOne,
        ConditionId::C1Limit,
        ConditionId::KernelPositive,
        ConditionId::AttainmentZero,
    ];
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub t: f64,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionReport {
    pub condition_id: ConditionId,
    pub passed: bool,
    pub witness: Option<Witness>,
    pub scan_interval: [f64; 2],
    pub c1_value: Option<f64>,
}

/// Sample of the correction kernel along the radius.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelSample {
    pub t: f64,
    pub psi: f64,
    pub phi: f64,
    /// k_{N,p}(Φ(t)) = ψ^{p(N−1)} − Φ^{p(N−1)/N}
    pub k: f64,
    /// k / Φ^p
    pub quotient: f64,
}

const TIGHT: QuadratureConfig = QuadratureConfig {
    rel_tol: 1e-14,
    abs_tol: 1e-300,
    max_subdivisions: 2000,
    tail_cut: 1.0,
};

pub fn builtin_manifold(kind: BuiltinKind, dim: usize) -> Result<ManifoldModel> {
    match kind {
        BuiltinKind::Euclidean => ManifoldModel::euclidean(dim),
        BuiltinKind::Hyperbolic => ManifoldModel::hyperbolic(dim),
        BuiltinKind::Counterexample => ManifoldModel::counterexample(dim),
    }
}

impl ManifoldModel {
    pub fn new(dim: usize, warping: Warping, upper: f64, label: impl Into<String>) -> Result<Self> {
        if dim < 2 {
            return Err(Error::DimensionError(format!("N = {dim}, need N >= 2")));
        }
        if !(upper > 0.0) {
            return Err(Error::DomainError(format!("validity bound {upper} must be positive")));
        }
        Ok(Self { dim, warping, upper, label: label.into() })
    }

    pub fn euclidean(dim: usize) -> Result<Self> {
        Self::new(dim, Warping::Identity, f64::INFINITY, "euclidean")
    }

    pub fn hyperbolic(dim: usize) -> Result<Self> {
        Self::new(dim, Warping::Sinh, f64::INFINITY, "hyperbolic")
    }

    /// ψ = t + t³ − t⁵ on (0, 1.27).
    pub fn counterexample(dim: usize) -> Result<Self> {
        Self::new(dim, Warping::Poly(vec![1.0, 0.0, 1.0, 0.0, -1.0]), 1.27, "counterexample")
    }

    /// Parse `sinh`, `id`, `poly:c1,c2,...` with optional `@interval:a,b`.
    /// Without an interval a polynomial is valid up to its first positive root.
    pub fn parse(spec: &str, dim: usize) -> Result<Self> {
        let (body, interval) = match spec.split_once('@') {
            Some((b, i)) => {
                let rest = i
                    .strip_prefix("interval:")
                    .ok_or_else(|| Error::Parse(format!("expected '@interval:a,b' in '{spec}'")))?;
                let nums = parse_list(rest, spec)?;
                if nums.len() != 2 || !(nums[0] >= 0.0) || !(nums[1] > nums[0]) {
                    return Err(Error::Parse(format!("bad interval in '{spec}'")));
                }
                (b, Some(nums[1]))
            }
            None => (spec, None),
        };
        let body = body.trim();
        let (warping, default_upper) = match body {
            "sinh" | "hyperbolic" => (Warping::Sinh, f64::INFINITY),
            "id" | "euclidean" => (Warping::Identity, f64::INFINITY),
            "counterexample" => (Warping::Poly(vec![1.0, 0.0, 1.0, 0.0, -1.0]), 1.27),
            _ => {
                let rest = body
                    .strip_prefix("poly:")
                    .ok_or_else(|| Error::Parse(format!("unknown warping '{spec}'")))?;
                let c = parse_list(rest, spec)?;
                if c.is_empty() {
                    return Err(Error::Parse(format!("empty polynomial in '{spec}'")));
                }
                let root = first_positive_root(&c);
                (Warping::Poly(c), root)
            }
        };
        let upper = interval.unwrap_or(default_upper);
        Self::new(dim, warping, upper, spec.trim())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn warping(&self) -> &Warping {
        &self.warping
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    /// Upper end of the validity interval (∞ for complete models).
    pub fn validity_upper(&self) -> f64 {
        self.upper
    }

    pub fn is_complete(&self) -> bool {
        self.upper.is_infinite()
    }

    pub fn is_hyperbolic(&self) -> bool {
        matches!(self.warping, Warping::Sinh)
    }

    pub fn is_euclidean(&self) -> bool {
        matches!(self.warping, Warping::Identity)
    }

    /// ω_{N−1} = 2π^{N/2}/Γ(N/2), the area of the unit sphere.
    pub fn omega(&self) -> f64 {
        sphere_area(self.dim)
    }

    /// σ_N = ω_{N−1}/N, the Euclidean unit-ball volume.
    pub fn sigma(&self) -> f64 {
        self.omega() / self.dim as f64
    }

    pub fn psi(&self, t: f64) -> f64 {
        self.warping.value(t)
    }

    pub fn dpsi(&self, t: f64, order: u32) -> f64 {
        self.warping.derivative(t, order)
    }

    fn check_domain(&self, t: f64) -> Result<()> {
        if !(t >= 0.0) || t > self.upper {
            return Err(Error::DomainError(format!(
                "t = {t} outside validity interval [0, {}] of '{}'",
                self.upper, self.label
            )));
        }
        Ok(())
    }

    /// Φ(t) = N∫₀ᵗ ψ^{N−1}.
    pub fn phi(&self, t: f64) -> Result<f64> {
        self.check_domain(t)?;
        let n = self.dim;
        let nf = n as f64;
        Ok(match &self.warping {
            Warping::Identity => t.powi(n as i32),
            Warping::Sinh => match n {
                2 => {
                    let h = (0.5 * t).sinh();
                    4.0 * h * h
                }
                3 => 0.75 * sinh_minus_arg(2.0 * t),
                4 => {
                    let h = (0.5 * t).sinh();
                    let cm1 = 2.0 * h * h;
                    4.0 / 3.0 * cm1 * cm1 * (t.cosh() + 2.0)
                }
                _ => {
                    nf * numerics::integrate(|x| x.sinh().powi(n as i32 - 1), 0.0, t, &TIGHT)?.value
                }
            },
            Warping::Poly(c) => {
                let d = poly_dense(c);
                let mut pow = vec![1.0];
                for _ in 1..n {
                    pow = poly_mul(&pow, &d);
                }
                nf * poly_integral(&pow, t)
            }
            Warping::Custom(_) => {
                nf * numerics::integrate(|x| self.psi(x).powi(n as i32 - 1), 0.0, t, &TIGHT)?.value
            }
        })
    }

    /// ψ(t)^N − Φ(t) = N∫₀ᵗ ψ^{N−1}(ψ' − 1), computed without cancellation.
    pub fn phi_deficit(&self, t: f64) -> Result<f64> {
        self.check_domain(t)?;
        let n = self.dim as i32;
        let nf = self.dim as f64;
        Ok(match &self.warping {
            Warping::Identity => 0.0,
            Warping::Poly(c) => {
                let d = poly_dense(c);
                let mut pow = vec![1.0];
                for _ in 1..n {
                    pow = poly_mul(&pow, &d);
                }
                let mut slope: Vec<f64> = (0..c.len()).map(|k| (k + 1) as f64 * c[k]).collect();
                slope[0] -= 1.0;
                nf * poly_integral(&poly_mul(&pow, &slope), t)
            }
            _ => {
                let w = &self.warping;
                nf * numerics::integrate(|x| w.value(x).powi(n - 1) * w.slope_minus_one(x), 0.0, t, &TIGHT)?.value
            }
        })
    }

    /// Geodesic ball volume σ_N Φ(r).
    pub fn ball_volume(&self, r: f64) -> Result<f64> {
        Ok(self.sigma() * self.phi(r)?)
    }

    /// Φ⁻¹(s), expanding the bracket as needed.
    pub fn phi_inverse(&self, s: f64) -> Result<f64> {
        if !(s >= 0.0) || !s.is_finite() {
            return Err(Error::DomainError(format!("volume coordinate {s} must be finite and >= 0")));
        }
        if s == 0.0 {
            return Ok(0.0);
        }
        if let Warping::Identity = self.warping {
            return Ok(s.powf(1.0 / self.dim as f64));
        }
        let mut hi = 1.0f64.min(self.upper);
        while self.phi(hi)? < s {
            if hi >= self.upper {
                return Err(Error::DomainError(format!(
                    "s = {s} beyond Φ of the validity interval of '{}'",
                    self.label
                )));
            }
            let mut next = (2.0 * hi).min(self.upper);
            // keep the bracket where Φ is finite
            let mut tries = 0;
            while !self.phi(next)?.is_finite() {
                next = 0.5 * (hi + next);
                tries += 1;
                if tries > 200 {
                    return Err(Error::DomainError(format!("s = {s} too large to invert")));
                }
            }
            if next <= hi {
                return Err(Error::DomainError(format!("s = {s} too large to invert")));
            }
            hi = next;
            if hi > 1e6 {
                return Err(Error::DomainError(format!("s = {s} too large to invert")));
            }
        }
        numerics::invert_monotone(|t| self.phi(t).unwrap_or(f64::NAN), s, [0.0, hi])
    }

    /// a₃ = ψ'''(0)/6, the Taylor coefficient of t³.
    pub fn taylor_a3(&self) -> Result<f64> {
        let v = match &self.warping {
            Warping::Identity => 0.0,
            Warping::Sinh => 1.0 / 6.0,
            Warping::Poly(c) => c.get(2).copied().unwrap_or(0.0),
            Warping::Custom(f) => numerics::differentiate(|x| f(x), 0.0, 3)? / 6.0,
        };
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::NonFinite("third derivative of ψ at 0".into()))
        }
    }

    /// lim ψ'/ψ as t → ∞.
    pub fn c1_limit(&self) -> Result<f64> {
        if !self.is_complete() {
            return Err(Error::DomainError(format!(
                "'{}' is only valid on (0, {}); no limit at infinity",
                self.label, self.upper
            )));
        }
        match &self.warping {
            Warping::Identity | Warping::Poly(_) => Ok(0.0),
            Warping::Sinh => Ok(1.0),
            Warping::Custom(_) => {
                let ratio = |t: f64| self.dpsi(t, 1) / self.psi(t);
                extrapolate_limit(ratio)
            }
        }
    }

    /// Exponential volume growth rate of ψ^{N−1}.
    pub fn volume_growth_rate(&self) -> Result<f64> {
        let n1 = (self.dim - 1) as f64;
        match &self.warping {
            Warping::Identity | Warping::Poly(_) => Ok(0.0),
            Warping::Sinh => Ok(n1),
            Warping::Custom(_) => Ok(n1 * self.c1_limit()?),
        }
    }

    /// ψ^{N−1}(ρ)·g evaluated in the log domain, 0 whenever g = 0.
    pub fn weighted(&self, rho: f64, g: f64) -> f64 {
        if g == 0.0 {
            return 0.0;
        }
        if self.dim == 1 {
            return g;
        }
        let n1 = (self.dim - 1) as f64;
        match &self.warping {
            Warping::Identity if rho < 1e100 => g * rho.powi(self.dim as i32 - 1),
            Warping::Sinh if rho < 300.0 / n1 => g * rho.sinh().powi(self.dim as i32 - 1),
            _ => {
                let lw = n1 * self.warping.ln_value(rho) + g.abs().ln();
                g.signum() * lw.exp()
            }
        }
    }

    /// ω_{N−1}∫ g(ρ)ψ^{N−1}(ρ)dρ over [0, upper) (or [0, ∞) for complete
    /// models), with the given break points.
    pub fn radial_integral<G: Fn(f64) -> f64>(
        &self,
        g: G,
        support: Option<f64>,
        breaks: &[f64],
        cfg: &QuadratureConfig,
    ) -> Result<QuadratureResult> {
        let end = match support {
            Some(r) => r.min(self.upper),
            None => self.upper,
        };
        let integrand = |rho: f64| self.weighted(rho, g(rho));
        let r = if end.is_finite() {
            numerics::integrate_with_breaks(integrand, 0.0, end, breaks, cfg)?
        } else {
            numerics::integrate_from(integrand, 0.0, breaks, cfg)?
        };
        Ok(r.scale(self.omega()))
    }

    /// Correction kernel and quotient at radius t, stable for small t.
    pub fn kernel_at_radius(&self, p: f64, t: f64) -> Result<KernelSample> {
        let nf = self.dim as f64;
        let psi = self.psi(t);
        let phi = self.phi(t)?;
        if t == 0.0 {
            return Ok(KernelSample { t, psi, phi, k: 0.0, quotient: f64::NAN });
        }
        let e = p * (nf - 1.0) / nf;
        let deficit = self.phi_deficit(t)?;
        // r = 1 − Φ/ψ^N
        let r = if psi > 0.0 {
            deficit / psi.powf(nf)
        } else {
            f64::NEG_INFINITY
        };
        let (k, quotient) = if r.is_finite() {
            let bracket = -(e * (-r).ln_1p()).exp_m1();
            let k = psi.powf(p * (nf - 1.0)) * bracket;
            let q = bracket * (-p * (psi.ln() + (-r).ln_1p())).exp();
            (k, q)
        } else {
            let k = psi.max(0.0).powf(p * (nf - 1.0)) - phi.powf(e);
            (k, k / phi.powf(p))
        };
        Ok(KernelSample { t, psi, phi, k, quotient })
    }

    /// Audit every sufficient condition on ψ over a grid `[t_min, t_max, count]`.
    pub fn check_conditions(&self, p: f64, scan: (f64, f64, usize)) -> Result<Vec<ConditionReport>> {
        let (lo, hi, count) = scan;
        if count < 2 || !(hi > lo) || !(lo >= 0.0) {
            return Err(Error::RangeError(format!("bad scan {scan:?}")));
        }
        self.check_domain(lo)?;
        self.check_domain(hi)?;
        if self.dim < 3 {
            return Err(Error::DimensionError(format!(
                "attainment condition needs N >= 3, got {}",
                self.dim
            )));
        }
        let grid = numerics::linspace(lo, hi, count);
        let interval = [lo, hi];
        let mut out = Vec::with_capacity(6);

        // regularity at the pole plus positivity on the grid
        let mut witness = None;
        let checks = [
            (self.psi(0.0), 0.0),
            (self.dpsi(0.0, 1), 1.0),
            (self.dpsi(0.0, 2), 0.0),
        ];
        for (v, target) in checks {
            if witness.is_none() && (v - target).abs() > 1e-9 {
                witness = Some(Witness { t: 0.0, value: v });
            }
        }
        if witness.is_none() {
            witness = grid
                .iter()
                .find(|&&t| t > 0.0 && !(self.psi(t) > 0.0))
                .map(|&t| Witness { t, value: self.psi(t) });
        }
        out.push(report(ConditionId::Regularity, witness, interval, None));

        let witness = first_failure(&grid, |t| self.dpsi(t, 2), |v| v >= -1e-12);
        out.push(report(ConditionId::Convexity, witness, interval, None));

        let witness = first_failure(&grid, |t| self.dpsi(t, 1), |v| v >= 1.0 - 1e-12);
        out.push(report(ConditionId::SlopeGeOne, witness, interval, None));

        let c1 = self.c1_limit().ok();
        out.push(ConditionReport {
            condition_id: ConditionId::C1Limit,
            passed: c1.is_some_and(|c| c > 0.0),
            witness: None,
            scan_interval: interval,
            c1_value: c1,
        });

        // strict positivity of the kernel; witness is the grid minimiser
        let mut worst: Option<(f64, f64, f64)> = None;
        let mut strict = true;
        for &t in grid.iter().filter(|&&t| t > 0.0) {
            let s = self.kernel_at_radius(p, t)?;
            let scale = s.psi.abs().powf(p * (self.dim as f64 - 1.0)).max(f64::MIN_POSITIVE);
            let rel = s.k / scale;
            if !(rel > 1e-13) {
                strict = false;
            }
            if worst.is_none_or(|(_, k, _)| s.k < k) {
                worst = Some((t, s.k, rel));
            }
        }
        let witness = if strict { None } else { worst.map(|(t, k, _)| Witness { t, value: k }) };
        out.push(report(ConditionId::KernelPositive, witness, interval, None));

        let witness = self.attainment_witness(&grid)?;
        out.push(report(ConditionId::AttainmentZero, witness, interval, None));
        Ok(out)
    }

    /// ψ^{N−1} + K'/(2K^{(N+2)/2}) ≥ 0 with
    /// K = (ψ'/ψ)² + ψ''/((N−2)ψ) − 6N²a₃/(N²−4).
    fn attainment_witness(&self, grid: &[f64]) -> Result<Option<Witness>> {
        let nf = self.dim as f64;
        let a3 = self.taylor_a3()?;
        let shift = 6.0 * nf * nf * a3 / (nf * nf - 4.0);
        for &t in grid.iter().filter(|&&t| t > 0.0) {
            let (psi, d1, d2, d3) = (self.psi(t), self.dpsi(t, 1), self.dpsi(t, 2), self.dpsi(t, 3));
            let (k, dk) = match &self.warping {
                // closed form: K = coth² t + 1/(N−2) − shift, K' = −2 coth t / sinh² t
                Warping::Sinh => {
                    let coth = 1.0 / t.tanh();
                    let csch = 1.0 / t.sinh();
                    (coth * coth + 1.0 / (nf - 2.0) - shift, -2.0 * coth * csch * csch)
                }
                _ => {
                    let l = d1 / psi;
                    let k = l * l + d2 / ((nf - 2.0) * psi) - shift;
                    let dk = 2.0 * l * (d2 / psi - l * l) + (d3 * psi - d2 * d1) / ((nf - 2.0) * psi * psi);
                    (k, dk)
                }
            };
            let base = psi.powf(nf - 1.0);
            if !(k > 0.0) {
                return Ok(Some(Witness { t, value: k }));
            }
            let value = base + dk / (2.0 * k.powf((nf + 2.0) / 2.0));
            if !(value >= -1e-9 * base.abs()) {
                return Ok(Some(Witness { t, value }));
            }
        }
        Ok(None)
    }
}

fn report(id: ConditionId, witness: Option<Witness>, interval: [f64; 2], c1: Option<f64>) -> ConditionReport {
    ConditionReport {
        condition_id: id,
        passed: witness.is_none(),
        witness,
        scan_interval: interval,
        c1_value: c1,
    }
}

fn first_failure<F: Fn(f64) -> f64, P: Fn(f64) -> bool>(grid: &[f64], f: F, ok: P) -> Option<Witness> {
    grid.iter().find_map(|&t| {
        let v = f(t);
        if ok(v) {
            None
        } else {
            Some(Witness { t, value: v })
        }
    })
}

/// Area of the unit sphere S^{N−1}.
pub fn sphere_area(dim: usize) -> f64 {
    let h = dim as f64 / 2.0;
    2.0 * PI.powf(h) / numerics::gamma(h)
}

/// sinh x − x, by series for small x.
fn sinh_minus_arg(x: f64) -> f64 {
    if x.abs() < 0.5 {
        let x2 = x * x;
        let mut term = x * x2 / 6.0;
        let mut sum = term;
        let mut k = 3.0;
        while term.abs() > 1e-18 * sum.abs() {
            term *= x2 / ((k + 1.0) * (k + 2.0));
            sum += term;
            k += 2.0;
        }
        sum
    } else {
        x.sinh() - x
    }
}

/// Richardson extrapolation in 1/t of a sequence sampled at t = 10, 20, 40.
fn extrapolate_limit<F: Fn(f64) -> f64>(f: F) -> Result<f64> {
    let v: Vec<f64> = [10.0, 20.0, 40.0].iter().map(|&t| f(t)).collect();
    if v.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite(format!("ψ'/ψ samples {v:?}")));
    }
    let e1 = 2.0 * v[1] - v[0];
    let e2 = 2.0 * v[2] - v[1];
    if (e2 - e1).abs() > 1e-6 * e2.abs().max(1.0) {
        return Err(Error::NonConvergent(format!(
            "ψ'/ψ does not settle: extrapolants {e1} and {e2}"
        )));
    }
    Ok(e2)
}

fn parse_list(s: &str, spec: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|x| {
            x.trim()
                .parse::<f64>()
                .map_err(|_| Error::Parse(format!("bad number '{x}' in '{spec}'")))
        })
        .collect()
}

/// First positive zero of the polynomial t·Σc_k t^{k−1}, or ∞.
fn first_positive_root(c: &[f64]) -> f64 {
    let f = |t: f64| poly_eval(c, t);
    let grid = numerics::linspace(0.0, 100.0, 100_001);
    for w in grid.windows(2).skip(1) {
        if f(w[1]) <= 0.0 {
            return numerics::find_root(f, w[0], w[1]).unwrap_or(w[1]);
        }
    }
    f64::INFINITY
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn poly_helpers() {
        let c = [1.0, 0.0, 1.0, 0.0, -1.0];
        assert!((poly_eval(&c, 1.2) - 0.43968).abs() < 1e-12);
        assert!((poly_deriv(&c, 0.0, 3) - 6.0).abs() < 1e-12);
        assert!((poly_deriv(&c, 2.0, 1) - (1.0 + 12.0 - 80.0)).abs() < 1e-12);
        let root = first_positive_root(&c);
        assert!((root - ((1.0 + 5f64.sqrt()) / 2.0).sqrt()).abs() < 1e-10);
    }

    #[test]
    fn sinh_minus_arg_continuous() {
        let a = sinh_minus_arg(0.4999999);
        let b = 0.4999999f64.sinh() - 0.4999999;
        assert!((a - b).abs() < 1e-15);
    }

    #[test]
    fn extrapolation_exact_for_inverse_t() {
        let l = extrapolate_limit(|t| 2.0 + 3.0 / t).unwrap();
        assert!((l - 2.0).abs() < 1e-12);
        assert!(extrapolate_limit(|t| t.sin()).is_err());
    }
}
