//! Scalar numerics: adaptive Gauss–Kronrod quadrature (finite and
//! semi-infinite), finite differences with Richardson extrapolation,
//! monotone inversion, grid-then-Brent minimization and the error function.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct QuadratureConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_subdivisions: usize,
    /// Radius where the finite part ends and the mapped tail begins.
    pub tail_cut: f64,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            rel_tol: 1e-10,
            abs_tol: 1e-12,
            max_subdivisions: 4000,
            tail_cut: 20.0,
        }
    }
}

impl QuadratureConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0) || !(self.abs_tol > 0.0) || self.max_subdivisions < 1 {
            return Err(Error::RangeError(format!(
                "quadrature config needs positive tolerances and at least one subdivision: {self:?}"
            )));
        }
        if !(self.tail_cut > 0.0) || !self.tail_cut.is_finite() {
            return Err(Error::RangeError("tail_cut must be positive and finite".into()));
        }
        Ok(())
    }

    pub fn with_tail_cut(mut self, tail_cut: f64) -> Self {
        self.tail_cut = tail_cut;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureResult {
    pub value: f64,
    pub error_estimate: f64,
    pub evaluations: usize,
}

impl QuadratureResult {
    pub fn zero() -> Self {
        Self { value: 0.0, error_estimate: 0.0, evaluations: 0 }
    }

    /// Sum of two independent results; errors add.
    pub fn combine(self, other: Self) -> Self {
        Self {
            value: self.value + other.value,
            error_estimate: self.error_estimate + other.error_estimate,
            evaluations: self.evaluations + other.evaluations,
        }
    }

    pub fn scale(self, c: f64) -> Self {
        Self {
            value: c * self.value,
            error_estimate: c.abs() * self.error_estimate,
            evaluations: self.evaluations,
        }
    }
}

// 21-point Kronrod extension of the 10-point Gauss rule.
const XGK: [f64; 11] = [
    0.995657163025808080735527280689003,
    0.973906528517171720077964012084452,
    0.930157491355708226001207180059508,
    0.865063366688984510732096688423493,
    0.780817726586416897063717578345042,
    0.679409568299024406234327365114874,
    0.562757134668604683339000099272694,
    0.433395394129247190799265943165784,
    0.294392862701460198131126603103866,
    0.148874338981631210884826001129720,
    0.0,
];
const WGK: [f64; 11] = [
    0.011694638867371874278064396062192,
    0.032558162307964727478818972459390,
    0.054755896574351996031381300244580,
    0.075039674810919952767043140916190,
    0.093125454583697605535065465083366,
    0.109387158802297641899210590325805,
    0.123491976262065851077958109831074,
    0.134709217311473325928054001771707,
    0.142775938577060080797094273138717,
    0.147739104901338491374841515972068,
    0.149445554002916905664936468389821,
];
const WG: [f64; 5] = [
    0.066671344308688137593568809893332,
    0.149451349150580593145776339657697,
    0.219086362515982043995534934228163,
    0.269266719309996355091226921569469,
    0.295524224714752870173892994651338,
];

#[derive(Clone, Copy, Debug, PartialEq)]
enum Kind {
    Plain,
    /// x = start + t/(1-t) on t in [0,1).
    Tail(f64),
}

#[derive(Clone, Copy, Debug)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
    kind: Kind,
    /// error estimate is at the roundoff floor; splitting cannot help
    at_floor: bool,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        // larger error first; ties broken by position for determinism
        self.error
            .total_cmp(&other.error)
            .then_with(|| other.a.total_cmp(&self.a))
    }
}

fn eval<F: Fn(f64) -> f64>(f: &F, kind: Kind, t: f64) -> Result<f64> {
    let y = match kind {
        Kind::Plain => f(t),
        Kind::Tail(start) => {
            let om = 1.0 - t;
            let fx = f(start + t / om);
            if fx == 0.0 {
                0.0
            } else {
                fx / (om * om)
            }
        }
    };
    if y.is_finite() {
        Ok(y)
    } else {
        let x = match kind {
            Kind::Plain => t,
            Kind::Tail(start) => start + t / (1.0 - t),
        };
        Err(Error::NonFinite(format!("integrand returned {y} at x = {x}")))
    }
}

fn gk21<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, kind: Kind) -> Result<Segment> {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = eval(f, kind, center)?;
    let mut res_k = fc * WGK[10];
    let mut res_g = 0.0;
    let mut res_abs = res_k.abs();
    let mut fv1 = [0.0; 10];
    let mut fv2 = [0.0; 10];
    for j in 0..10 {
        let dx = half * XGK[j];
        let f1 = eval(f, kind, center - dx)?;
        let f2 = eval(f, kind, center + dx)?;
        fv1[j] = f1;
        fv2[j] = f2;
        res_k += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_g += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * res_k;
    let mut res_asc = WGK[10] * (fc - mean).abs();
    for j in 0..10 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let value = res_k * half;
    let res_abs = res_abs * half.abs();
    let res_asc = res_asc * half.abs();
    let mut err = ((res_k - res_g) * half).abs();
    if res_asc != 0.0 && err != 0.0 {
        err = res_asc * (200.0 * err / res_asc).powf(1.5).min(1.0);
    }
    let mut at_floor = false;
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        let floor = 50.0 * f64::EPSILON * res_abs;
        at_floor = err <= floor;
        err = err.max(floor);
    }
    Ok(Segment { a, b, value, error: err, kind, at_floor })
}

fn adaptive<F: Fn(f64) -> f64>(f: &F, initial: Vec<(f64, f64, Kind)>, cfg: &QuadratureConfig) -> Result<QuadratureResult> {
    cfg.validate()?;
    let mut heap = BinaryHeap::new();
    let mut frozen: Vec<Segment> = Vec::new();
    let mut evaluations = 0usize;
    for (a, b, kind) in initial {
        if b > a {
            heap.push(gk21(f, a, b, kind)?);
            evaluations += 21;
        }
    }
    let mut splits = 0usize;
    let (mut run_val, mut run_err) = totals(&heap, &frozen);
    loop {
        if run_err <= cfg.abs_tol.max(cfg.rel_tol * run_val.abs()) || heap.is_empty() {
            // confirm with an ordered re-summation before accepting
            let (total, err) = totals(&heap, &frozen);
            let target = cfg.abs_tol.max(cfg.rel_tol * total.abs());
            if err <= target || heap.is_empty() {
                return Ok(QuadratureResult { value: total, error_estimate: err, evaluations });
            }
            run_val = total;
            run_err = err;
        }
        let worst = heap.pop().expect("heap checked non-empty");
        let mid = 0.5 * (worst.a + worst.b);
        let width_floor = 4.0 * f64::EPSILON * worst.a.abs().max(worst.b.abs()).max(f64::MIN_POSITIVE);
        if worst.at_floor || worst.b - worst.a <= width_floor || mid <= worst.a || mid >= worst.b {
            frozen.push(worst);
            continue;
        }
        if splits >= cfg.max_subdivisions {
            let (total, err) = totals(&heap, &frozen);
            let err = err + worst.error;
            let total = total + worst.value;
            return Err(Error::NonConvergent(format!(
                "{} subdivisions exhausted; estimate {total:e} with error {err:e}",
                cfg.max_subdivisions
            )));
        }
        splits += 1;
        let left = gk21(f, worst.a, mid, worst.kind)?;
        let right = gk21(f, mid, worst.b, worst.kind)?;
        evaluations += 42;
        run_val += left.value + right.value - worst.value;
        run_err += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
    }
}

fn totals(heap: &BinaryHeap<Segment>, frozen: &[Segment]) -> (f64, f64) {
    // sum in position order so the result does not depend on heap layout
    let mut segs: Vec<&Segment> = heap.iter().chain(frozen.iter()).collect();
    segs.sort_by(|x, y| {
        let kx = matches!(x.kind, Kind::Tail(_)) as u8;
        let ky = matches!(y.kind, Kind::Tail(_)) as u8;
        kx.cmp(&ky).then(x.a.total_cmp(&y.a))
    });
    let mut v = 0.0;
    let mut e = 0.0;
    for s in segs {
        v += s.value;
        e += s.error;
    }
    (v, e)
}

fn sorted_points(a: f64, b: f64, breaks: &[f64]) -> Vec<f64> {
    let mut pts = vec![a];
    let mut inner: Vec<f64> = breaks.iter().copied().filter(|&x| x > a && x < b).collect();
    inner.sort_by(f64::total_cmp);
    inner.dedup();
    pts.extend(inner);
    pts.push(b);
    pts
}

/// Adaptive GK21 over a finite interval.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, cfg: &QuadratureConfig) -> Result<QuadratureResult> {
    integrate_with_breaks(f, a, b, &[], cfg)
}

/// Adaptive GK21 over `[a, b]` with the given interior break points.
pub fn integrate_with_breaks<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    breaks: &[f64],
    cfg: &QuadratureConfig,
) -> Result<QuadratureResult> {
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::DomainError(format!("finite interval expected, got [{a}, {b}]")));
    }
    if b == a {
        return Ok(QuadratureResult::zero());
    }
    if b < a {
        return integrate_with_breaks(f, b, a, breaks, cfg).map(|r| r.scale(-1.0));
    }
    let pts = sorted_points(a, b, breaks);
    let init = pts.windows(2).map(|w| (w[0], w[1], Kind::Plain)).collect();
    adaptive(&f, init, cfg)
}

/// ∫₀^∞ f. The part `[0, tail_cut]` is refined directly, the rest through
/// the map x = tail_cut + t/(1−t).
pub fn integrate_semi_infinite<F: Fn(f64) -> f64>(f: F, cfg: &QuadratureConfig) -> Result<QuadratureResult> {
    integrate_from(f, 0.0, &[], cfg)
}

/// ∫ₐ^∞ f with break points; the tail starts at `max(a, tail_cut)`.
pub fn integrate_from<F: Fn(f64) -> f64>(f: F, a: f64, breaks: &[f64], cfg: &QuadratureConfig) -> Result<QuadratureResult> {
    let start = if cfg.tail_cut > a { cfg.tail_cut } else { a };
    let pts = sorted_points(a, start, breaks);
    let mut init: Vec<(f64, f64, Kind)> = pts.windows(2).map(|w| (w[0], w[1], Kind::Plain)).collect();
    // split the mapped tail at t = 1/2 so both ends get their own estimate
    init.push((0.0, 0.5, Kind::Tail(start)));
    init.push((0.5, 1.0, Kind::Tail(start)));
    adaptive(&f, init, cfg)
}

/// Central finite difference of order 1, 2 or 3 with one Richardson step.
///
/// The base step is ε^{1/(order+4)}·max(1,|x|): after extrapolation the
/// truncation error is O(h⁴), so this balances it against round-off.
pub fn differentiate<F: Fn(f64) -> f64>(f: F, x: f64, order: u32) -> Result<f64> {
    if !(1..=3).contains(&order) {
        return Err(Error::RangeError(format!("derivative order {order} not in 1..=3")));
    }
    let h = f64::EPSILON.powf(1.0 / (order as f64 + 4.0)) * x.abs().max(1.0);
    let stencil = |h: f64| -> Result<f64> {
        let s = |k: f64| -> Result<f64> {
            let y = f(x + k * h);
            if y.is_finite() {
                Ok(y)
            } else {
                Err(Error::NonFinite(format!("f({}) = {y}", x + k * h)))
            }
        };
        Ok(match order {
            1 => (s(1.0)? - s(-1.0)?) / (2.0 * h),
            2 => (s(1.0)? - 2.0 * s(0.0)? + s(-1.0)?) / (h * h),
            _ => (s(2.0)? - 2.0 * s(1.0)? + 2.0 * s(-1.0)? - s(-2.0)?) / (2.0 * h * h * h),
        })
    };
    let d1 = stencil(h)?;
    let d2 = stencil(0.5 * h)?;
    Ok((4.0 * d2 - d1) / 3.0)
}

/// Brent root finder for f(x) = y on a bracket where f is increasing.
pub fn invert_monotone<F: Fn(f64) -> f64>(f: F, y: f64, bracket: [f64; 2]) -> Result<f64> {
    let [a, b] = bracket;
    let fa = f(a);
    let fb = f(b);
    if !(fa.is_finite() && fb.is_finite()) {
        return Err(Error::NonFinite(format!("bracket values f({a}) = {fa}, f({b}) = {fb}")));
    }
    if y < fa || y > fb {
        return Err(Error::BracketError { y, lo: fa, hi: fb });
    }
    if fa == y {
        return Ok(a);
    }
    if fb == y {
        return Ok(b);
    }
    // iterate to full x precision; small targets such as Φ(t) ~ t^N need relative accuracy
    brent_root(|x| f(x) - y, a, b, fa - y, fb - y, 0.0)
}

fn brent_root<G: Fn(f64) -> f64>(g: G, a0: f64, b0: f64, ga0: f64, gb0: f64, tol_y: f64) -> Result<f64> {
    let (mut a, mut b, mut fa, mut fb) = (a0, b0, ga0, gb0);
    let mut c = a;
    let mut fc = fa;
    let mut d = b - a;
    let mut e = d;
    for _ in 0..300 {
        if (fb > 0.0) == (fc > 0.0) {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol = 2.0 * f64::EPSILON * b.abs() + 1e-300;
        let m = 0.5 * (c - b);
        if fb.abs() <= tol_y || m.abs() <= tol {
            return Ok(b);
        }
        if e.abs() >= tol && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * m * s;
                q = 1.0 - s;
            } else {
                let qq = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * m * qq * (qq - r) - (b - a) * (r - 1.0));
                q = (qq - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            } else {
                p = -p;
            }
            if 2.0 * p < (3.0 * m * q - (tol * q).abs()).min((e * q).abs()) {
                e = d;
                d = p / q;
            } else {
                d = m;
                e = d;
            }
        } else {
            d = m;
            e = d;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol { d } else { tol.copysign(m) };
        fb = g(b);
        if !fb.is_finite() {
            return Err(Error::NonFinite(format!("root finder hit {fb} at {b}")));
        }
    }
    Err(Error::NonConvergent("root finder exceeded iteration limit".into()))
}

/// Root of `g` on `[a, b]` given a sign change; used for level crossings.
pub fn find_root<G: Fn(f64) -> f64>(g: G, a: f64, b: f64) -> Result<f64> {
    let ga = g(a);
    let gb = g(b);
    if ga == 0.0 {
        return Ok(a);
    }
    if gb == 0.0 {
        return Ok(b);
    }
    if (ga > 0.0) == (gb > 0.0) {
        return Err(Error::BracketError { y: 0.0, lo: ga.min(gb), hi: ga.max(gb) });
    }
    brent_root(g, a, b, ga, gb, 0.0)
}

/// Grid scan followed by Brent refinement around the best grid point.
/// Returns `(argmin, min)`; the minimum never exceeds any grid value.
pub fn minimize_scalar<F: Fn(f64) -> f64>(f: F, grid: (f64, f64, usize)) -> Result<(f64, f64)> {
    let (lo, hi, count) = grid;
    if count < 3 || !(hi > lo) {
        return Err(Error::RangeError(format!("grid needs count >= 3 and t_max > t_min, got {grid:?}")));
    }
    let pts = linspace(lo, hi, count);
    let mut best = 0;
    let mut best_val = f64::INFINITY;
    for (i, &t) in pts.iter().enumerate() {
        let v = f(t);
        if !v.is_finite() {
            return Err(Error::NonFinite(format!("objective {v} at t = {t}")));
        }
        if v < best_val {
            best_val = v;
            best = i;
        }
    }
    let a = pts[best.saturating_sub(1)];
    let b = pts[(best + 1).min(count - 1)];
    let (x, fx) = brent_min(&f, a, b, pts[best], best_val);
    if fx.is_finite() && fx < best_val {
        Ok((x, fx))
    } else {
        Ok((pts[best], best_val))
    }
}

fn brent_min<F: Fn(f64) -> f64>(f: &F, mut a: f64, mut b: f64, x0: f64, f0: f64) -> (f64, f64) {
    const CGOLD: f64 = 0.381_966_011_250_105_1;
    let (mut x, mut w, mut v) = (x0, x0, x0);
    let (mut fx, mut fw, mut fv) = (f0, f0, f0);
    let mut d: f64 = 0.0;
    let mut e: f64 = 0.0;
    for _ in 0..200 {
        let xm = 0.5 * (a + b);
        let tol1 = 1e-10 * x.abs() + 1e-14;
        let tol2 = 2.0 * tol1;
        if (x - xm).abs() <= tol2 - 0.5 * (b - a) {
            break;
        }
        let mut golden = true;
        if e.abs() > tol1 {
            let r = (x - w) * (fx - fv);
            let mut q = (x - v) * (fx - fw);
            let mut p = (x - v) * q - (x - w) * r;
            q = 2.0 * (q - r);
            if q > 0.0 {
                p = -p;
            }
            q = q.abs();
            let etemp = e;
            e = d;
            if !(p.abs() >= (0.5 * q * etemp).abs() || p <= q * (a - x) || p >= q * (b - x)) {
                d = p / q;
                let u = x + d;
                if u - a < tol2 || b - u < tol2 {
                    d = tol1.copysign(xm - x);
                }
                golden = false;
            }
        }
        if golden {
            e = if x >= xm { a - x } else { b - x };
            d = CGOLD * e;
        }
        let u = if d.abs() >= tol1 { x + d } else { x + tol1.copysign(d) };
        let fu = f(u);
        if !fu.is_finite() {
            break;
        }
        if fu <= fx {
            if u >= x {
                a = x;
            } else {
                b = x;
            }
            v = w;
            fv = fw;
            w = x;
            fw = fx;
            x = u;
            fx = fu;
        } else {
            if u < x {
                a = u;
            } else {
                b = u;
            }
            if fu <= fw || w == x {
                v = w;
                fv = fw;
                w = u;
                fw = fu;
            } else if fu <= fv || v == x || v == w {
                v = u;
                fv = fu;
            }
        }
    }
    (x, fx)
}

/// `count` equally spaced points from `lo` to `hi` inclusive.
pub fn linspace(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    match count {
        0 => vec![],
        1 => vec![lo],
        _ => {
            let step = (hi - lo) / (count - 1) as f64;
            (0..count)
                .map(|i| if i == count - 1 { hi } else { lo + step * i as f64 })
                .collect()
        }
    }
}

pub fn erf(x: f64) -> f64 {
    if x < 0.0 {
        -libm::erf(-x)
    } else {
        libm::erf(x)
    }
}

pub fn erfc(x: f64) -> f64 {
    libm::erfc(x)
}

pub fn gamma(x: f64) -> f64 {
    libm::tgamma(x)
}

pub fn ln_gamma(x: f64) -> f64 {
    libm::lgamma(x)
}

/// ln sinh t for t > 0 without overflow.
pub fn ln_sinh(t: f64) -> f64 {
    if t > 20.0 {
        t - std::f64::consts::LN_2 + (-(-2.0 * t).exp()).ln_1p()
    } else {
        t.sinh().ln()
    }
}

/// ρ·coth ρ, with its Taylor series near the origin.
pub fn rho_coth(rho: f64) -> f64 {
    let r = rho.abs();
    if r < 1e-3 {
        let r2 = r * r;
        1.0 + r2 / 3.0 - r2 * r2 / 45.0
    } else {
        r / r.tanh()
    }
}
