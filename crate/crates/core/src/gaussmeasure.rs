//! The Gaussian-weighted probability measure dm = G⁻¹e^{−ρ²/2}dV on ℍ^N.

use crate::constants::{gaussian_c2, gaussian_normalization, gaussian_normalization_quadrature};
use crate::error::{Error, Result};
use crate::manifold::ManifoldModel;
use crate::numerics::{rho_coth, QuadratureConfig, QuadratureResult};
use crate::rearrange::RadialProfile;

/// dm on ℍ^N together with the quadrature settings used by its functionals.
#[derive(Debug, Clone)]
pub struct GaussianMeasure {
    n: usize,
    g: f64,
    model: ManifoldModel,
    cfg: QuadratureConfig,
}

impl GaussianMeasure {
    /// G from the erf series.
    pub fn new(n: usize) -> Result<Self> {
        Self::with_config(n, false, QuadratureConfig::default())
    }

    /// `quadrature_g` replaces the series G by radial quadrature, for
    /// cross-validation runs.
    pub fn with_config(n: usize, quadrature_g: bool, cfg: QuadratureConfig) -> Result<Self> {
        cfg.validate()?;
        let model = ManifoldModel::hyperbolic(n)?;
        let g = if quadrature_g {
            gaussian_normalization_quadrature(n, &cfg)?
        } else {
            gaussian_normalization(n)?
        };
        Ok(Self { n, g, model, cfg })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// The normalization G.
    pub fn normalization(&self) -> f64 {
        self.g
    }

    pub fn model(&self) -> &ManifoldModel {
        &self.model
    }

    /// ρ₁(ρ) = G⁻¹e^{−ρ²/2}
    pub fn density(&self, rho: f64) -> f64 {
        (-rho * rho / 2.0).exp() / self.g
    }

    /// Radius beyond which e^{−ρ²/2}ψ^{N−1} is below e^{−700}.
    fn cutoff(&self) -> f64 {
        40.0 + self.n as f64
    }

    /// ∫f dm. Any f growing at most like e^{kρ}, k ≲ 10, is integrable;
    /// the domain is truncated at [`Self::cutoff`].
    pub fn dm_integral<F: Fn(f64) -> f64>(&self, f: F, breaks: &[f64]) -> Result<QuadratureResult> {
        let mut pts = vec![(self.n as f64 + 1.0), (self.n as f64 + 1.0) + 12.0];
        pts.extend_from_slice(breaks);
        let g = self.g;
        let r = self.model.radial_integral(
            |rho| {
                let v = f(rho);
                if v == 0.0 {
                    return 0.0;
                }
                // fold the Gaussian into the value so that the product never overflows
                v.signum() * (v.abs().ln() - rho * rho / 2.0).exp()
            },
            Some(self.cutoff()),
            &pts,
            &self.cfg,
        )?;
        if !r.value.is_finite() {
            return Err(Error::NonFinite("dm integral".into()));
        }
        Ok(r.scale(1.0 / g))
    }

    /// ∫|u|^p dm
    pub fn lp_dm(&self, u: &RadialProfile, p: f64) -> Result<QuadratureResult> {
        if !(p > 0.0) {
            return Err(Error::RangeError(format!("exponent {p} must be positive")));
        }
        self.dm_integral(|r| u.value(r).abs().powf(p), u.breaks())
    }

    /// ∫u² dm
    pub fn l2_dm(&self, u: &RadialProfile) -> Result<QuadratureResult> {
        self.dm_integral(|r| u.value(r).powi(2), u.breaks())
    }

    /// ∫|u'|² dm
    pub fn dirichlet_dm(&self, u: &RadialProfile) -> Result<QuadratureResult> {
        if !u.is_lipschitz() {
            return Err(Error::DomainError(format!("'{}' has a jump; its gradient is not a function", u.label())));
        }
        self.dm_integral(|r| u.derivative(r).powi(2), u.breaks())
    }

    /// ∫u²log(u²) dm, with 0·log 0 = 0.
    pub fn entropy_dm(&self, u: &RadialProfile) -> Result<QuadratureResult> {
        self.dm_integral(
            |r| {
                let v2 = u.value(r).powi(2);
                if v2 == 0.0 {
                    0.0
                } else {
                    v2 * v2.ln()
                }
            },
            u.breaks(),
        )
    }

    /// Ent(u) = ∫u²log u² dm − (∫u²dm)·log(∫u²dm)
    pub fn relative_entropy(&self, u: &RadialProfile) -> Result<QuadratureResult> {
        let a = self.l2_dm(u)?;
        let e = self.entropy_dm(u)?;
        if !(a.value > 0.0) {
            return Err(Error::LogArgumentNonpositive(format!("∫u²dm = {} for '{}'", a.value, u.label())));
        }
        Ok(QuadratureResult {
            value: e.value - a.value * a.value.ln(),
            error_estimate: e.error_estimate + a.error_estimate * (1.0 + a.value.ln().abs()),
            evaluations: e.evaluations + a.evaluations,
        })
    }

    /// (N−1)(ρcoth ρ − 1) − N²(N−1)/(2(N+2)) + log C₂
    pub fn bracket(&self, rho: f64) -> Result<f64> {
        let nf = self.n as f64;
        Ok((nf - 1.0) * (rho_coth(rho) - 1.0) - nf * nf * (nf - 1.0) / (2.0 * (nf + 2.0)) + gaussian_c2(self.n)?.ln())
    }

    /// ∫[bracket]·u² dm
    pub fn potential_term(&self, u: &RadialProfile) -> Result<QuadratureResult> {
        let nf = self.n as f64;
        let shift = -nf * nf * (nf - 1.0) / (2.0 * (nf + 2.0)) + gaussian_c2(self.n)?.ln();
        self.dm_integral(|r| ((nf - 1.0) * (rho_coth(r) - 1.0) + shift) * u.value(r).powi(2), u.breaks())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bracket_at_origin() {
        let gm = GaussianMeasure::new(3).unwrap();
        let want = -0.9 * 2.0 + (std::f64::consts::E.powi(2) / 2.0).ln();
        assert!((gm.bracket(0.0).unwrap() - want).abs() < 1e-12);
    }

    #[test]
    fn n2_has_no_c2() {
        let gm = GaussianMeasure::new(2).unwrap();
        assert!(gm.potential_term(&RadialProfile::constant(1.0).unwrap()).is_err());
    }
}
