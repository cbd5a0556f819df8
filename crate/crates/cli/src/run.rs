//! `run --config`: suites, audits and the report directory.

use std::fs;

use ineq_forge::constants::{ExponentParams, DEFAULT_SCAN};
use ineq_forge::manifold::{ConditionReport, ManifoldModel};
use ineq_forge::verify::{verify_suite, InequalityId, InequalityReport, SkippedItem};
use serde::Serialize;

use crate::config::{ValidConfig, AuditSpec};
use crate::error::{CliError, CliResult};
use crate::output::{json_bytes, reports_csv, write_atomic};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Summary {
    pub total: usize,
    pub passed: usize,
    pub failed: usize,
    pub skipped: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct AuditOutcome {
    pub manifold: String,
    #[serde(rename = "N")]
    pub n: usize,
    pub p: f64,
    pub scan: (f64, f64, usize),
    #[serde(skip_serializing_if = "Option::is_none")]
    pub conditions: Option<Vec<ConditionReport>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

pub struct RunOutcome {
    pub reports: Vec<InequalityReport>,
    pub skipped: Vec<SkippedItem>,
    pub audits: Vec<AuditOutcome>,
    pub summary: Summary,
}

fn audit(a: &AuditSpec) -> AuditOutcome {
    let mut out = AuditOutcome {
        manifold: a.manifold.clone(),
        n: a.n,
        p: a.p,
        scan: a.scan.unwrap_or(DEFAULT_SCAN),
        conditions: None,
        error: None,
    };
    let res = ManifoldModel::parse(&a.manifold, a.n).and_then(|m| {
        if a.scan.is_none() {
            out.scan.1 = out.scan.1.min(0.999 * m.validity_upper());
        }
        m.check_conditions(a.p, out.scan)
    });
    match res {
        Ok(c) => out.conditions = Some(c),
        Err(e) => out.error = Some(e.to_string()),
    }
    out
}

/// Suites in config order; within a suite, dimensions in order of first
/// appearance, then ids × profiles × params.
pub fn execute(cfg: &ValidConfig) -> CliResult<RunOutcome> {
    let mut reports = Vec::new();
    let mut skipped = Vec::new();
    for s in &cfg.raw.suites {
        let profiles = cfg.suite_profiles(s);
        let mut dims: Vec<usize> = Vec::new();
        for p in &s.params {
            if !dims.contains(&p.n) {
                dims.push(p.n);
            }
        }
        for n in dims {
            let m = ManifoldModel::parse(&s.manifold, n)?;
            let grid: Vec<ExponentParams> = s.params.iter().filter(|p| p.n == n).copied().collect();
            let out = verify_suite(&[s.inequality], &profiles, &m, &grid, &cfg.raw.quadrature);
            reports.extend(out.reports);
            skipped.extend(out.skipped);
        }
    }
    let audits: Vec<AuditOutcome> = cfg.raw.audits.iter().map(audit).collect();
    let passed = reports.iter().filter(|r| r.passes()).count();
    let summary = Summary {
        total: reports.len() + skipped.len(),
        passed,
        failed: reports.len() - passed,
        skipped: skipped.len(),
    };
    Ok(RunOutcome { reports, skipped, audits, summary })
}

/// Write every output file; nothing is written until all items are done.
pub fn persist(cfg: &ValidConfig, out: &RunOutcome) -> CliResult<()> {
    let dir = &cfg.output_dir;
    fs::create_dir_all(dir)
        .map_err(|e| CliError::Usage(format!("output_dir {} is not writable: {e}", dir.display())))?;
    let files: [(&str, Vec<u8>); 5] = [
        ("reports.json", json_bytes(&out.reports)?),
        ("reports.csv", reports_csv(&out.reports)?),
        ("conditions.json", json_bytes(&out.audits)?),
        ("skipped.json", json_bytes(&out.skipped)?),
        ("summary.json", json_bytes(&out.summary)?),
    ];
    for (name, bytes) in files {
        write_atomic(&dir.join(name), &bytes)?;
    }
    Ok(())
}

pub fn failures(out: &RunOutcome) -> Vec<(InequalityId, String, f64)> {
    out.reports
        .iter()
        .filter(|r| !r.passes())
        .map(|r| (r.id, r.profile.clone(), r.deficit))
        .collect()
}
