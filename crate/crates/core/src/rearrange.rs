//! Radial profiles, distribution functions, rearrangements and the
//! L^p / entropy / gradient functionals on a model manifold.

use std::fmt;
use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::manifold::ManifoldModel;
use crate::numerics::{self, QuadratureConfig, QuadratureResult};

type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Tail behaviour of a profile, used for integrability guards and tail cuts.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Decay {
    /// bounded by C·e^{−aρ²}
    Gaussian(f64),
    /// bounded by C·ρ^k e^{−aρ} for some k
    Exponential(f64),
    /// zero for ρ ≥ R
    Compact(f64),
    /// bounded by C·ρ^{−k}
    Algebraic(f64),
    /// no decay guarantee; only finite measures apply
    None,
}

/// Radial function u(ρ) ≥ 0 with its derivative and metadata.
#[derive(Clone)]
pub struct RadialProfile {
    value: ScalarFn,
    derivative: ScalarFn,
    decay: Decay,
    breaks: Vec<f64>,
    /// u is non-increasing on [monotone_from, ∞)
    monotone_from: f64,
    /// an upper bound for sup u
    sup: f64,
    /// false when u has jumps, so |∇u| is not a function
    lipschitz: bool,
    label: String,
}

impl fmt::Debug for RadialProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RadialProfile")
            .field("label", &self.label)
            .field("decay", &self.decay)
            .field("monotone_from", &self.monotone_from)
            .finish()
    }
}

impl RadialProfile {
    /// Build a profile from closures. `monotone_from` is a radius beyond
    /// which u is non-increasing and `sup` an upper bound for u.
    pub fn custom<V, D>(value: V, derivative: D, decay: Decay, monotone_from: f64, sup: f64, label: impl Into<String>) -> Self
    where
        V: Fn(f64) -> f64 + Send + Sync + 'static,
        D: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        let breaks = match decay {
            Decay::Compact(r) => vec![r],
            _ => vec![],
        };
        Self {
            value: Arc::new(value),
            derivative: Arc::new(derivative),
            decay,
            breaks,
            monotone_from,
            sup,
            lipschitz: true,
            label: label.into(),
        }
    }

    /// e^{−aρ²}
    pub fn gauss(a: f64) -> Result<Self> {
        positive(a, "gauss rate")?;
        Ok(Self::custom(
            move |r| (-a * r * r).exp(),
            move |r| -2.0 * a * r * (-a * r * r).exp(),
            Decay::Gaussian(a),
            0.0,
            1.0,
            format!("gauss:{a}"),
        ))
    }

    /// e^{−aρ}
    pub fn expdecay(a: f64) -> Result<Self> {
        positive(a, "expdecay rate")?;
        Ok(Self::custom(
            move |r| (-a * r).exp(),
            move |r| -a * (-a * r).exp(),
            Decay::Exponential(a),
            0.0,
            1.0,
            format!("expdecay:{a}"),
        ))
    }

    /// (1 − (ρ/R)²)₊²
    pub fn bump(radius: f64) -> Result<Self> {
        positive(radius, "bump radius")?;
        Ok(Self::custom(
            move |r| {
                let x = 1.0 - (r / radius).powi(2);
                if x > 0.0 {
                    x * x
                } else {
                    0.0
                }
            },
            move |r| {
                let x = 1.0 - (r / radius).powi(2);
                if x > 0.0 {
                    -4.0 * r / (radius * radius) * x
                } else {
                    0.0
                }
            },
            Decay::Compact(radius),
            0.0,
            1.0,
            format!("bump:{radius}"),
        ))
    }

    /// ρ^k e^{−aρ}, non-monotone for k > 0.
    pub fn powexp(k: f64, a: f64) -> Result<Self> {
        positive(a, "powexp rate")?;
        if !(k >= 0.0) {
            return Err(Error::RangeError(format!("powexp power {k} must be >= 0")));
        }
        let peak = k / a;
        let sup = if k > 0.0 { peak.powf(k) * (-k).exp() } else { 1.0 };
        Ok(Self::custom(
            move |r| if r == 0.0 && k == 0.0 { 1.0 } else { r.powf(k) * (-a * r).exp() },
            move |r| {
                if k == 0.0 {
                    -a * (-a * r).exp()
                } else if r == 0.0 {
                    if k == 1.0 {
                        1.0
                    } else {
                        0.0
                    }
                } else {
                    (k / r - a) * r.powf(k) * (-a * r).exp()
                }
            },
            Decay::Exponential(a),
            peak,
            sup,
            format!("powexp:{k},{a}"),
        ))
    }

    /// (1 + ρ²)^{−b}
    pub fn rational(b: f64) -> Result<Self> {
        positive(b, "rational exponent")?;
        Ok(Self::custom(
            move |r| (1.0 + r * r).powf(-b),
            move |r| -2.0 * b * r * (1.0 + r * r).powf(-b - 1.0),
            Decay::Algebraic(2.0 * b),
            0.0,
            1.0,
            format!("rational:{b}"),
        ))
    }

    /// max(0, 1 − ρ/R)
    pub fn ramp(radius: f64) -> Result<Self> {
        positive(radius, "ramp radius")?;
        Ok(Self::custom(
            move |r| (1.0 - r / radius).max(0.0),
            move |r| if r < radius { -1.0 / radius } else { 0.0 },
            Decay::Compact(radius),
            0.0,
            1.0,
            format!("ramp:{radius}"),
        ))
    }

    /// 1 on [0, r0], linear down to 0 at r1.
    pub fn plateau(r0: f64, r1: f64) -> Result<Self> {
        if !(r0 >= 0.0 && r1 > r0) {
            return Err(Error::RangeError(format!("plateau needs 0 <= r0 < r1, got {r0}, {r1}")));
        }
        let mut p = Self::custom(
            move |r| {
                if r <= r0 {
                    1.0
                } else if r < r1 {
                    (r1 - r) / (r1 - r0)
                } else {
                    0.0
                }
            },
            move |r| if r > r0 && r < r1 { -1.0 / (r1 - r0) } else { 0.0 },
            Decay::Compact(r1),
            0.0,
            1.0,
            format!("plateau:{r0},{r1}"),
        );
        p.breaks = vec![r0, r1];
        Ok(p)
    }

    /// 1 on [0, R), 0 beyond.
    pub fn indicator(radius: f64) -> Result<Self> {
        positive(radius, "indicator radius")?;
        let mut p = Self::custom(
            move |r| if r < radius { 1.0 } else { 0.0 },
            |_| 0.0,
            Decay::Compact(radius),
            0.0,
            1.0,
            format!("indicator:{radius}"),
        );
        p.lipschitz = false;
        Ok(p)
    }

    /// u ≡ c
    pub fn constant(c: f64) -> Result<Self> {
        if !(c >= 0.0) || !c.is_finite() {
            return Err(Error::RangeError(format!("constant {c} must be finite and >= 0")));
        }
        Ok(Self::custom(move |_| c, |_| 0.0, Decay::None, 0.0, c, format!("const:{c}")))
    }

    /// Monotone cubic (Fritsch–Carlson) interpolation of samples; zero
    /// beyond the last knot.
    pub fn from_samples(rho: Vec<f64>, values: Vec<f64>, label: impl Into<String>) -> Result<Self> {
        let label = label.into();
        if rho.len() < 2 || rho.len() != values.len() {
            return Err(Error::Parse(format!("table '{label}' needs at least two (rho, value) rows")));
        }
        if rho[0] != 0.0 {
            return Err(Error::Parse(format!("table '{label}' must start at rho = 0")));
        }
        if rho.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::Parse(format!("table '{label}' rho column must be strictly increasing")));
        }
        if values.iter().any(|&v| !(v >= 0.0) || !v.is_finite()) {
            return Err(Error::Parse(format!("table '{label}' values must be finite and >= 0")));
        }
        let slopes = pchip_slopes(&rho, &values);
        let last = *rho.last().unwrap();
        let sup = values.iter().cloned().fold(0.0, f64::max);
        let mut monotone_from = 0.0;
        for i in (0..values.len() - 1).rev() {
            if values[i + 1] > values[i] {
                monotone_from = rho[i + 1];
                break;
            }
        }
        let t = Arc::new(Table { rho, values, slopes });
        let tv = t.clone();
        let mut p = Self::custom(
            move |r| tv.eval(r).0,
            move |r| t.eval(r).1,
            Decay::Compact(last),
            monotone_from,
            sup,
            label,
        );
        // a jump to zero after the last knot is allowed, but then |∇u| is not a function
        p.lipschitz = (p.value)(last * (1.0 - 1e-12)).abs() < 1e-9;
        Ok(p)
    }

    /// Two-column CSV `rho,value` with an optional header line.
    pub fn table(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        let mut rho = Vec::new();
        let mut vals = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut it = line.split(',');
            let (a, b) = match (it.next(), it.next(), it.next()) {
                (Some(a), Some(b), None) => (a.trim(), b.trim()),
                _ => return Err(Error::Parse(format!("{}:{}: expected two columns", path.display(), i + 1))),
            };
            match (a.parse::<f64>(), b.parse::<f64>()) {
                (Ok(x), Ok(y)) => {
                    rho.push(x);
                    vals.push(y);
                }
                _ if i == 0 => continue,
                _ => return Err(Error::Parse(format!("{}:{}: bad number", path.display(), i + 1))),
            }
        }
        Self::from_samples(rho, vals, format!("table:{}", path.display()))
    }

    /// Parse the profile grammar: `gauss:a`, `expdecay:a`, `bump:R`,
    /// `powexp:k,a`, `table:path`, `ramp:R`, `plateau:r0,r1`,
    /// `indicator:R`, `rational:b`, `const:c`, each optionally followed by
    /// `;scale=c` and/or `;offset=c`.
    pub fn parse(spec: &str) -> Result<Self> {
        let mut parts = spec.split(';');
        let head = parts.next().unwrap_or("").trim();
        let (name, args) = head
            .split_once(':')
            .ok_or_else(|| Error::Parse(format!("profile '{spec}' lacks ':' parameters")))?;
        let nums = || -> Result<Vec<f64>> {
            args.split(',')
                .map(|x| x.trim().parse::<f64>().map_err(|_| Error::Parse(format!("bad number '{x}' in profile '{spec}'"))))
                .collect()
        };
        let want = |n: usize| -> Result<Vec<f64>> {
            let v = nums()?;
            if v.len() != n {
                return Err(Error::Parse(format!("profile '{spec}' expects {n} parameter(s)")));
            }
            Ok(v)
        };
        let wrap = |r: Result<Self>| r.map_err(|e| Error::Parse(format!("profile '{spec}': {e}")));
        let mut p = match name.trim() {
            "gauss" => wrap(Self::gauss(want(1)?[0]))?,
            "expdecay" => wrap(Self::expdecay(want(1)?[0]))?,
            "bump" => wrap(Self::bump(want(1)?[0]))?,
            "powexp" => {
                let v = want(2)?;
                wrap(Self::powexp(v[0], v[1]))?
            }
            "ramp" => wrap(Self::ramp(want(1)?[0]))?,
            "plateau" => {
                let v = want(2)?;
                wrap(Self::plateau(v[0], v[1]))?
            }
            "indicator" => wrap(Self::indicator(want(1)?[0]))?,
            "rational" => wrap(Self::rational(want(1)?[0]))?,
            "const" => wrap(Self::constant(want(1)?[0]))?,
            "table" => Self::table(Path::new(args.trim()))?,
            other => return Err(Error::Parse(format!("unknown profile family '{other}' in '{spec}'"))),
        };
        for m in parts {
            let (k, v) = m
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("bad modifier '{m}' in profile '{spec}'")))?;
            let c: f64 = v
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad number '{v}' in profile '{spec}'")))?;
            p = match k.trim() {
                "scale" => wrap(p.scaled(c))?,
                "offset" => wrap(p.offset(c))?,
                other => return Err(Error::Parse(format!("unknown modifier '{other}' in profile '{spec}'"))),
            };
        }
        p.label = spec.trim().to_string();
        Ok(p)
    }

    /// c·u for c > 0.
    pub fn scaled(&self, c: f64) -> Result<Self> {
        positive(c, "scale")?;
        let (v, d) = (self.value.clone(), self.derivative.clone());
        Ok(Self {
            value: Arc::new(move |r| c * v(r)),
            derivative: Arc::new(move |r| c * d(r)),
            sup: c * self.sup,
            label: format!("{};scale={c}", self.label),
            ..self.clone()
        })
    }

    /// u + c for c ≥ 0; the result has no decay.
    pub fn offset(&self, c: f64) -> Result<Self> {
        if !(c >= 0.0) || !c.is_finite() {
            return Err(Error::RangeError(format!("offset {c} must be finite and >= 0")));
        }
        let v = self.value.clone();
        Ok(Self {
            value: Arc::new(move |r| c + v(r)),
            decay: Decay::None,
            sup: c + self.sup,
            label: format!("{};offset={c}", self.label),
            ..self.clone()
        })
    }

    pub fn value(&self, rho: f64) -> f64 {
        (self.value)(rho)
    }

    pub fn derivative(&self, rho: f64) -> f64 {
        (self.derivative)(rho)
    }

    pub fn decay(&self) -> Decay {
        self.decay
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn breaks(&self) -> &[f64] {
        &self.breaks
    }

    pub fn sup_bound(&self) -> f64 {
        self.sup
    }

    pub fn monotone_from(&self) -> f64 {
        self.monotone_from
    }

    pub fn is_lipschitz(&self) -> bool {
        self.lipschitz
    }

    /// Radius past which u vanishes, if any.
    pub fn support_radius(&self) -> Option<f64> {
        match self.decay {
            Decay::Compact(r) => Some(r),
            _ => None,
        }
    }

    /// Non-increasing on [0, ∞): declared, and spot-checked on a grid.
    pub fn is_non_increasing(&self) -> bool {
        if self.monotone_from > 0.0 {
            return false;
        }
        let end = self.support_radius().unwrap_or(20.0);
        let grid = numerics::linspace(0.0, end, 400);
        grid.windows(2).all(|w| self.value(w[1]) <= self.value(w[0]) * (1.0 + 1e-12) + 1e-300)
    }

    /// Tail cut for ∫u^p ψ^{N−1}: the radius where the integrand bound
    /// drops below e^{−40}.
    fn tail_cut_for(&self, p: f64, growth: f64, fallback: f64) -> f64 {
        let base = match self.decay {
            Decay::Gaussian(a) => {
                let pa = p * a;
                (growth + (growth * growth + 160.0 * pa).sqrt()) / (2.0 * pa)
            }
            Decay::Exponential(a) => {
                let rate = p * a - growth;
                if rate > 0.0 {
                    (40.0 / rate).min(400.0)
                } else {
                    fallback
                }
            }
            _ => fallback,
        };
        base.max(self.monotone_from + 1.0).max(1.0)
    }
}

fn positive(x: f64, what: &str) -> Result<()> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(Error::RangeError(format!("{what} must be positive and finite, got {x}")))
    }
}

struct Table {
    rho: Vec<f64>,
    values: Vec<f64>,
    slopes: Vec<f64>,
}

impl Table {
    fn eval(&self, r: f64) -> (f64, f64) {
        let n = self.rho.len();
        if r >= self.rho[n - 1] {
            return if r == self.rho[n - 1] { (self.values[n - 1], 0.0) } else { (0.0, 0.0) };
        }
        let i = match self.rho.binary_search_by(|x| x.total_cmp(&r)) {
            Ok(i) => i.min(n - 2),
            Err(i) => i.saturating_sub(1).min(n - 2),
        };
        let h = self.rho[i + 1] - self.rho[i];
        let t = (r - self.rho[i]) / h;
        let (y0, y1, m0, m1) = (self.values[i], self.values[i + 1], self.slopes[i], self.slopes[i + 1]);
        let t2 = t * t;
        let t3 = t2 * t;
        let v = (2.0 * t3 - 3.0 * t2 + 1.0) * y0 + (t3 - 2.0 * t2 + t) * h * m0 + (-2.0 * t3 + 3.0 * t2) * y1 + (t3 - t2) * h * m1;
        let d = ((6.0 * t2 - 6.0 * t) * y0 + (3.0 * t2 - 4.0 * t + 1.0) * h * m0 + (-6.0 * t2 + 6.0 * t) * y1 + (3.0 * t2 - 2.0 * t) * h * m1) / h;
        (v.max(0.0), d)
    }
}

/// Fritsch–Carlson slopes, which keep each monotone run monotone.
fn pchip_slopes(x: &[f64], y: &[f64]) -> Vec<f64> {
    let n = x.len();
    let delta: Vec<f64> = (0..n - 1).map(|i| (y[i + 1] - y[i]) / (x[i + 1] - x[i])).collect();
    let mut m = vec![0.0; n];
    m[0] = delta[0];
    m[n - 1] = delta[n - 2];
    for i in 1..n - 1 {
        if delta[i - 1] * delta[i] <= 0.0 {
            m[i] = 0.0;
        } else {
            let (h0, h1) = (x[i] - x[i - 1], x[i + 1] - x[i]);
            let w1 = 2.0 * h1 + h0;
            let w2 = h1 + 2.0 * h0;
            m[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
        }
    }
    for i in 0..n - 1 {
        if delta[i] == 0.0 {
            m[i] = 0.0;
            m[i + 1] = 0.0;
        }
    }
    m
}

/// Checks that ∫|u|^p dV (and the gradient analogue) is finite.
pub fn check_integrable(u: &RadialProfile, m: &ManifoldModel, p: f64) -> Result<()> {
    if !(p > 0.0) {
        return Err(Error::RangeError(format!("exponent {p} must be positive")));
    }
    if let Decay::Compact(r) = u.decay {
        if r <= m.validity_upper() {
            return Ok(());
        }
        return Err(Error::DomainError(format!(
            "support radius {r} of '{}' exceeds the validity interval of '{}'",
            u.label,
            m.label()
        )));
    }
    if !m.is_complete() {
        return Err(Error::NotIntegrable(format!(
            "'{}' is not compactly supported inside the validity interval of '{}'",
            u.label,
            m.label()
        )));
    }
    let growth = m.volume_growth_rate()?;
    let n = m.dim() as f64;
    match u.decay {
        Decay::Gaussian(_) => Ok(()),
        Decay::Exponential(a) => {
            if growth == 0.0 || p * a > growth + 0.05 {
                Ok(())
            } else {
                Err(Error::NotIntegrable(format!(
                    "'{}' with p = {p}: need p·a = {} > {} (volume growth + 0.05)",
                    u.label,
                    p * a,
                    growth + 0.05
                )))
            }
        }
        Decay::Algebraic(k) => {
            if growth == 0.0 && p * k > n {
                Ok(())
            } else {
                Err(Error::NotIntegrable(format!("'{}' decays only like ρ^-{k}", u.label)))
            }
        }
        Decay::None => Err(Error::NotIntegrable(format!("'{}' does not decay", u.label))),
        Decay::Compact(_) => unreachable!(),
    }
}

fn integrate_profile<G: Fn(f64) -> f64>(
    u: &RadialProfile,
    m: &ManifoldModel,
    p: f64,
    extra_breaks: &[f64],
    g: G,
    cfg: &QuadratureConfig,
) -> Result<QuadratureResult> {
    let growth = if m.is_complete() { m.volume_growth_rate()? } else { 0.0 };
    let cut = u.tail_cut_for(p, growth, cfg.tail_cut);
    let local = cfg.with_tail_cut(cut);
    let mut breaks = u.breaks.clone();
    breaks.extend_from_slice(extra_breaks);
    if u.monotone_from > 0.0 {
        breaks.push(u.monotone_from);
    }
    m.radial_integral(g, u.support_radius(), &breaks, &local)
}

/// ∫|u|^p dV
pub fn lp_integral(u: &RadialProfile, m: &ManifoldModel, p: f64, cfg: &QuadratureConfig) -> Result<QuadratureResult> {
    check_integrable(u, m, p)?;
    integrate_profile(u, m, p, &[], |r| u.value(r).abs().powf(p), cfg)
}

/// (∫|u|^p dV)^{1/p}
pub fn lp_norm(u: &RadialProfile, m: &ManifoldModel, p: f64, cfg: &QuadratureConfig) -> Result<f64> {
    Ok(lp_integral(u, m, p, cfg)?.value.powf(1.0 / p))
}

/// ∫|u'|^p dV
pub fn grad_lp_integral(u: &RadialProfile, m: &ManifoldModel, p: f64, cfg: &QuadratureConfig) -> Result<QuadratureResult> {
    check_integrable(u, m, p)?;
    if !u.lipschitz {
        return Err(Error::DomainError(format!("'{}' has a jump; its gradient is not a function", u.label)));
    }
    integrate_profile(u, m, p, &[], |r| u.derivative(r).abs().powf(p), cfg)
}

/// (∫|u'|^p dV)^{1/p}
pub fn grad_lp_norm(u: &RadialProfile, m: &ManifoldModel, p: f64, cfg: &QuadratureConfig) -> Result<f64> {
    Ok(grad_lp_integral(u, m, p, cfg)?.value.powf(1.0 / p))
}

/// Entropy pieces over {u < 1} and {u ≥ 1}.
pub fn entropy_split(u: &RadialProfile, m: &ManifoldModel, p: f64, cfg: &QuadratureConfig) -> Result<(QuadratureResult, QuadratureResult)> {
    check_integrable(u, m, p)?;
    let levels = LevelSets::new(u, m)?;
    let above = levels.superlevel_intervals(1.0)?;
    let crossings: Vec<f64> = above.iter().flat_map(|&(a, b)| [a, b]).filter(|x| x.is_finite() && *x > 0.0).collect();
    let ent = |r: f64| {
        let v = u.value(r).abs();
        if v == 0.0 {
            0.0
        } else {
            v.powf(p) * v.ln()
        }
    };
    let inside = |r: f64| above.iter().any(|&(a, b)| r > a && r < b);
    let low = integrate_profile(u, m, p, &crossings, |r| if inside(r) { 0.0 } else { ent(r) }, cfg)?;
    let high = if above.is_empty() {
        QuadratureResult::zero()
    } else {
        integrate_profile(u, m, p, &crossings, |r| if inside(r) { ent(r) } else { 0.0 }, cfg)?
    };
    Ok((low, high))
}

/// ∫|u|^p ln|u| dV, split at the level u = 1.
pub fn entropy_integral(u: &RadialProfile, m: &ManifoldModel, p: f64, cfg: &QuadratureConfig) -> Result<QuadratureResult> {
    let (lo, hi) = entropy_split(u, m, p, cfg)?;
    Ok(lo.combine(hi))
}

/// Monotone pieces of a profile, for level-set location.
struct LevelSets<'a> {
    u: &'a RadialProfile,
    m: &'a ManifoldModel,
    /// boundaries; the last piece runs to the end of the support or ∞
    knots: Vec<f64>,
    end: f64,
}

impl<'a> LevelSets<'a> {
    fn new(u: &'a RadialProfile, m: &'a ManifoldModel) -> Result<Self> {
        let end = u.support_radius().unwrap_or(f64::INFINITY).min(m.validity_upper());
        let mut knots = vec![0.0];
        let mf = u.monotone_from.min(end);
        if mf > 0.0 {
            // locate interior extrema from sign changes of u'
            let mut grid = numerics::linspace(0.0, mf, 2001);
            grid.extend(u.breaks.iter().copied().filter(|&b| b > 0.0 && b < mf));
            grid.sort_by(f64::total_cmp);
            let sign = |r: f64| {
                let d = u.derivative(r);
                if d > 0.0 {
                    1
                } else if d < 0.0 {
                    -1
                } else {
                    0
                }
            };
            let mut prev = sign(grid[0]);
            for w in grid.windows(2) {
                let s = sign(w[1]);
                if s != 0 && prev != 0 && s != prev {
                    let r = numerics::find_root(|x| u.derivative(x), w[0], w[1]).unwrap_or(w[1]);
                    if r > *knots.last().unwrap() {
                        knots.push(r);
                    }
                }
                if s != 0 {
                    prev = s;
                }
            }
            if mf > *knots.last().unwrap() && mf < end {
                knots.push(mf);
            }
        }
        Ok(Self { u, m, knots, end })
    }

    /// Maximal radial intervals where u > t, in increasing order.
    fn superlevel_intervals(&self, t: f64) -> Result<Vec<(f64, f64)>> {
        let u = self.u;
        let f = |r: f64| u.value(r) - t;
        let mut out: Vec<(f64, f64)> = Vec::new();
        let mut push = |a: f64, b: f64| {
            if b > a {
                match out.last_mut() {
                    Some(last) if last.1 >= a => last.1 = b,
                    _ => out.push((a, b)),
                }
            }
        };
        let mut bounds = self.knots.clone();
        bounds.push(self.end);
        for w in bounds.windows(2) {
            let (a, b) = (w[0], w[1]);
            let fa = f(a);
            let b_eff;
            let fb;
            if b.is_infinite() {
                // decreasing tail: march out until below the level
                let mut r = a.max(1.0);
                let mut steps = 0;
                while f(r) > 0.0 {
                    r *= 2.0;
                    steps += 1;
                    if steps > 60 {
                        return Err(Error::NotIntegrable(format!("'{}' never drops below level {t}", u.label)));
                    }
                }
                b_eff = r;
                fb = f(r);
            } else {
                b_eff = b;
                // value just inside the piece so compact supports count
                fb = f(b * (1.0 - 1e-15));
            }
            match (fa > 0.0, fb > 0.0) {
                (true, true) => push(a, b),
                (false, false) => {}
                (true, false) => {
                    let r = numerics::find_root(f, a, b_eff).unwrap_or(a);
                    push(a, r);
                }
                (false, true) => {
                    let r = numerics::find_root(f, a, b_eff * (1.0 - 1e-15)).unwrap_or(b_eff);
                    push(r, b);
                }
            }
        }
        Ok(out)
    }

    /// μ(t) = Vol{u > t}
    fn distribution(&self, t: f64) -> Result<f64> {
        if t >= self.u.sup {
            return Ok(0.0);
        }
        let mut v = 0.0;
        for (a, b) in self.superlevel_intervals(t)? {
            if b.is_infinite() {
                return Err(Error::NotIntegrable(format!("superlevel set of '{}' at {t} is unbounded", self.u.label)));
            }
            v += self.m.phi(b)? - self.m.phi(a)?;
        }
        Ok(self.m.sigma() * v)
    }
}

/// μ_u(t) = Vol{u > t}; zero for t ≥ sup u.
pub fn distribution_function(u: &RadialProfile, m: &ManifoldModel, t: f64) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::RangeError(format!("level {t} must be positive")));
    }
    LevelSets::new(u, m)?.distribution(t)
}

/// Decreasing rearrangement v(s) = u*(s) as a function of volume.
#[derive(Clone, Debug)]
pub struct VolumeProfile {
    u: RadialProfile,
    m: ManifoldModel,
    monotone: bool,
    support_bound: f64,
}

pub fn decreasing_rearrangement(u: &RadialProfile, m: &ManifoldModel) -> Result<VolumeProfile> {
    VolumeProfile::build(u, m, u.is_non_increasing())
}

impl VolumeProfile {
    fn build(u: &RadialProfile, m: &ManifoldModel, monotone: bool) -> Result<Self> {
        let support_bound = match u.support_radius() {
            Some(r) if r <= m.validity_upper() => m.ball_volume(r)?,
            Some(r) => return Err(Error::DomainError(format!("support radius {r} outside model"))),
            None => f64::INFINITY,
        };
        Ok(Self { u: u.clone(), m: m.clone(), monotone, support_bound })
    }

    /// Always goes through level sets, even for monotone u (for cross-checks).
    pub fn via_level_sets(u: &RadialProfile, m: &ManifoldModel) -> Result<Self> {
        Self::build(u, m, false)
    }

    pub fn support_bound(&self) -> f64 {
        self.support_bound
    }

    pub fn is_monotone(&self) -> bool {
        self.monotone
    }

    /// Radius of the geodesic ball with volume s.
    pub fn radius_of(&self, s: f64) -> Result<f64> {
        self.m.phi_inverse(s / self.m.sigma())
    }

    pub fn value(&self, s: f64) -> Result<f64> {
        if !(s >= 0.0) {
            return Err(Error::DomainError(format!("volume {s} must be >= 0")));
        }
        if s >= self.support_bound {
            return Ok(0.0);
        }
        if self.monotone {
            return Ok(self.u.value(self.radius_of(s)?));
        }
        let levels = LevelSets::new(&self.u, &self.m)?;
        // geometric search for a level with μ > s, then bisection
        let mut hi = self.u.sup;
        let mut lo = hi;
        loop {
            lo *= 0.5;
            if lo < 1e-300 {
                return Ok(0.0);
            }
            if levels.distribution(lo)? > s {
                break;
            }
            hi = lo;
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if levels.distribution(mid)? > s {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(0.5 * (lo + hi))
    }

    /// v'(s) = u'(ρ)/(ω ψ^{N−1}(ρ)) with s = σΦ(ρ); monotone u only.
    pub fn derivative(&self, s: f64) -> Result<f64> {
        if !self.monotone {
            return Err(Error::MonotoneRequired(format!("'{}' is not non-increasing", self.u.label)));
        }
        if s >= self.support_bound {
            return Ok(0.0);
        }
        let r = self.radius_of(s)?;
        Ok(self.u.derivative(r) / (self.m.omega() * self.m.psi(r).powi(self.m.dim() as i32 - 1)))
    }

    /// u♯(ρ) = v(σΦ(ρ)), the symmetric decreasing rearrangement on the model.
    pub fn symmetric_value(&self, rho: f64) -> Result<f64> {
        self.value(self.m.ball_volume(rho)?)
    }

    /// ∫₀^∞ v(s)^q ds evaluated in s (via s = e^x).
    pub fn power_integral(&self, q: f64, cfg: &QuadratureConfig) -> Result<QuadratureResult> {
        let g = |x: f64| -> f64 {
            if x > 690.0 {
                return 0.0;
            }
            let s = x.exp();
            match self.value(s) {
                Ok(v) if v > 0.0 => v.powf(q) * s,
                Ok(_) => 0.0,
                Err(_) => f64::NAN,
            }
        };
        let pivot = if self.support_bound.is_finite() { self.support_bound.ln().min(0.0) } else { 0.0 };
        let local = cfg.with_tail_cut(cfg.tail_cut.max(40.0));
        let lower = numerics::integrate_from(|y| g(pivot - y), 0.0, &[], &local)?;
        let upper = if self.support_bound.is_finite() {
            numerics::integrate(g, pivot, self.support_bound.ln(), cfg)?
        } else {
            numerics::integrate_from(|y| g(pivot + y), 0.0, &[], &local)?
        };
        Ok(lower.combine(upper))
    }
}

/// Gradient energy split into its Euclidean part and the correction term.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Decomposition {
    /// (Nσ)^p ∫|v'|^p (s/σ)^{p(N−1)/N} ds = ∫|∇u_e♯|^p dx
    pub euclidean_term: f64,
    /// (Nσ)^p ∫|v'|^p k_{N,p}(s/σ) ds
    pub correction_term: f64,
    /// ∫|v'|^p s^p ds
    pub weighted_energy: f64,
    pub quad_error: f64,
}

/// Decomposition of ∫|∇u|^p dV for non-increasing u. The quadrature runs
/// over ρ while v' and k are evaluated through the volume variable s.
pub fn gradient_decomposition(u: &RadialProfile, m: &ManifoldModel, p: f64, cfg: &QuadratureConfig) -> Result<Decomposition> {
    if !(p >= 1.0) {
        return Err(Error::RangeError(format!("p = {p} must be >= 1")));
    }
    check_integrable(u, m, p)?;
    if !u.is_non_increasing() {
        return Err(Error::MonotoneRequired(format!("'{}' is not non-increasing", u.label)));
    }
    if !u.lipschitz {
        return Err(Error::DomainError(format!("'{}' has a jump; its gradient is not a function", u.label)));
    }
    let v = decreasing_rearrangement(u, m)?;
    let nf = m.dim() as f64;
    let sigma = m.sigma();
    let e = p * (nf - 1.0) / nf;
    let pref = (nf * sigma).powf(p);
    // ds/dρ = ω ψ^{N−1}; only the s-side quantities are used below
    let parts = |rho: f64| -> Option<(f64, f64, f64)> {
        if rho == 0.0 || u.derivative(rho) == 0.0 {
            return Some((0.0, 0.0, 0.0));
        }
        let s = m.ball_volume(rho).ok()?;
        let dv = v.derivative(s).ok()?;
        if dv == 0.0 {
            return Some((0.0, 0.0, 0.0));
        }
        let jac = m.omega() * m.psi(rho).powi(m.dim() as i32 - 1);
        let w = dv.abs().powf(p) * jac;
        let k = crate::constants::correction_kernel(m, p, s / sigma).ok()?;
        Some((pref * w * (s / sigma).powf(e), pref * w * k, w * s.powf(p)))
    };
    let pick = |i: usize| {
        move |rho: f64| match parts(rho) {
            Some(t) => [t.0, t.1, t.2][i],
            None => f64::NAN,
        }
    };
    let growth = m.volume_growth_rate()?;
    let cut = u.tail_cut_for(p, growth, cfg.tail_cut);
    // s^p must stay far from overflow; the rest of the tail is bounded below
    let s_cap = 10f64.powf(250.0 / p);
    let r_cap = m.phi_inverse(s_cap / sigma)?;
    let end = u.support_radius().unwrap_or(f64::INFINITY).min(r_cap);
    let mut breaks = u.breaks.clone();
    if cut < end {
        breaks.push(cut);
    }
    let integrate = |i: usize| numerics::integrate_with_breaks(pick(i), 0.0, end, &breaks, cfg);
    let eu = integrate(0)?;
    let co = integrate(1)?;
    let we = integrate(2)?;
    let tail = if end.is_finite() && u.support_radius().is_none_or(|r| r > end) {
        let omega = m.omega();
        numerics::integrate_from(|r| omega * m.weighted(r, u.derivative(r).abs().powf(p)), end, &[], cfg)?.value
    } else {
        0.0
    };
    Ok(Decomposition {
        euclidean_term: eu.value,
        correction_term: co.value,
        weighted_energy: we.value,
        quad_error: eu.error_estimate + co.error_estimate + tail,
    })
}
