//! Atomic file writes and the CSV layouts.

use std::fs;
use std::io::Write;
use std::path::Path;

use ineq_forge::manifold::KernelSample;
use ineq_forge::verify::InequalityReport;
use serde::Serialize;

use crate::error::CliResult;

/// Write to `<name>.tmp` in the same directory, then rename over `path`.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> CliResult<()> {
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = Path::new(&tmp);
    {
        let mut f = fs::File::create(tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    fs::rename(tmp, path)?;
    Ok(())
}

pub fn json_bytes<T: Serialize + ?Sized>(value: &T) -> CliResult<Vec<u8>> {
    let mut out = serde_json::to_vec_pretty(value)?;
    out.push(b'\n');
    Ok(out)
}

/// Shortest round-trip form; non-finite values as `inf`, `-inf`, `NaN`.
pub fn fmt_f64(x: f64) -> String {
    if x.is_finite() {
        format!("{x:?}")
    } else if x.is_nan() {
        "NaN".into()
    } else if x > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_f64).unwrap_or_default()
}

pub const KERNEL_COLUMNS: [&str; 5] = ["t", "psi", "phi", "k", "quotient"];

pub fn kernel_csv(samples: &[KernelSample]) -> CliResult<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(KERNEL_COLUMNS)?;
    for s in samples {
        w.write_record([s.t, s.psi, s.phi, s.k, s.quotient].map(fmt_f64))?;
    }
    w.into_inner().map_err(|e| crate::error::CliError::Io(e.to_string()))
}

pub const REPORT_COLUMNS: [&str; 15] = [
    "id",
    "manifold",
    "N",
    "p",
    "alpha",
    "q",
    "s",
    "lambda",
    "profile",
    "lhs",
    "rhs",
    "deficit",
    "quad_error",
    "normalized",
    "passed",
];

pub fn reports_csv(reports: &[InequalityReport]) -> CliResult<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(REPORT_COLUMNS)?;
    for r in reports {
        w.write_record([
            r.id.to_string(),
            r.manifold.clone(),
            r.n.to_string(),
            fmt_f64(r.p),
            fmt_opt(r.alpha),
            fmt_opt(r.q),
            fmt_opt(r.s),
            fmt_opt(r.lambda),
            r.profile.clone(),
            fmt_f64(r.lhs),
            fmt_f64(r.rhs),
            fmt_f64(r.deficit),
            fmt_f64(r.quad_error),
            r.normalized.to_string(),
            r.passes().to_string(),
        ])?;
    }
    w.into_inner().map_err(|e| crate::error::CliError::Io(e.to_string()))
}
