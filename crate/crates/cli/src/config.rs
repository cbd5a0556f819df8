//! The batch-run config document.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use ineq_forge::constants::ExponentParams;
use ineq_forge::manifold::ManifoldModel;
use ineq_forge::numerics::QuadratureConfig;
use ineq_forge::rearrange::RadialProfile;
use ineq_forge::verify::InequalityId;
use serde::Deserialize;

use crate::error::{CliError, CliResult};

pub const OUTPUT_ENV: &str = "INEQ_FORGE_OUTPUT";

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// warping specs; suites and audits may only use these
    #[serde(default)]
    pub manifolds: Vec<String>,
    /// profile specs; suites may only use these
    #[serde(default)]
    pub profiles: Vec<String>,
    #[serde(default)]
    pub suites: Vec<SuiteSpec>,
    /// condition audits written to conditions.json
    #[serde(default)]
    pub audits: Vec<AuditSpec>,
    #[serde(default)]
    pub quadrature: QuadratureConfig,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("ineq-forge-out")
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SuiteSpec {
    pub inequality: InequalityId,
    pub manifold: String,
    /// subset of the top-level profiles; all of them when absent
    #[serde(default)]
    pub profiles: Option<Vec<String>>,
    pub params: Vec<ExponentParams>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AuditSpec {
    pub manifold: String,
    #[serde(rename = "N")]
    pub n: usize,
    pub p: f64,
    /// [t_min, t_max, count]; the validity-clipped default scan when absent
    #[serde(default)]
    pub scan: Option<(f64, f64, usize)>,
}

/// A config whose specs have all been parsed.
pub struct ValidConfig {
    pub raw: RunConfig,
    pub profiles: Vec<RadialProfile>,
    pub output_dir: PathBuf,
}

impl RunConfig {
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("config {}: {e}", path.display())))
    }

    pub fn validate(self) -> CliResult<ValidConfig> {
        self.quadrature.validate().map_err(|e| CliError::Usage(format!("quadrature: {e}")))?;
        let mut profiles = Vec::with_capacity(self.profiles.len());
        let mut seen = BTreeSet::new();
        for spec in &self.profiles {
            if !seen.insert(spec.trim()) {
                return Err(CliError::Usage(format!("profile '{spec}' listed twice")));
            }
            let u = RadialProfile::parse(spec).map_err(|e| CliError::Usage(format!("profile '{spec}': {e}")))?;
            profiles.push(u);
        }
        for spec in &self.manifolds {
            ManifoldModel::parse(spec, 3).map_err(|e| CliError::Usage(format!("manifold '{spec}': {e}")))?;
        }
        let known_manifold = |spec: &str| -> CliResult<()> {
            if self.manifolds.iter().any(|m| m.trim() == spec.trim()) {
                Ok(())
            } else {
                Err(CliError::Usage(format!("manifold '{spec}' is not listed in manifolds")))
            }
        };
        for (k, s) in self.suites.iter().enumerate() {
            known_manifold(&s.manifold)?;
            if let Some(list) = &s.profiles {
                for spec in list {
                    if !seen.contains(spec.trim()) {
                        return Err(CliError::Usage(format!(
                            "suite {k} ({}) references unknown profile '{spec}'",
                            s.inequality
                        )));
                    }
                }
            }
            for params in &s.params {
                if params.n < 2 || !params.p.is_finite() {
                    return Err(CliError::Usage(format!(
                        "suite {k} ({}): bad parameters N = {}, p = {}",
                        s.inequality, params.n, params.p
                    )));
                }
                ManifoldModel::parse(&s.manifold, params.n)
                    .map_err(|e| CliError::Usage(format!("suite {k}: manifold '{}': {e}", s.manifold)))?;
            }
        }
        for a in &self.audits {
            known_manifold(&a.manifold)?;
        }
        let output_dir = match std::env::var_os(OUTPUT_ENV) {
            Some(v) if !v.is_empty() => PathBuf::from(v),
            _ => self.output_dir.clone(),
        };
        Ok(ValidConfig { raw: self, profiles, output_dir })
    }
}

impl ValidConfig {
    pub fn profile(&self, spec: &str) -> &RadialProfile {
        let k = self.raw.profiles.iter().position(|p| p.trim() == spec.trim()).expect("validated profile");
        &self.profiles[k]
    }

    /// Profiles of a suite, in the suite's order.
    pub fn suite_profiles(&self, s: &SuiteSpec) -> Vec<RadialProfile> {
        match &s.profiles {
            Some(list) => list.iter().map(|p| self.profile(p).clone()).collect(),
            None => self.profiles.clone(),
        }
    }
}
