use std::path::PathBuf;

use ineq_forge::constants::{
    correction_lower_constant, gaussian_c2, gaussian_normalization, gn_constant, lambda_log, log_sobolev_constant,
    poincare_constant, quotient_limit_zero, sharp_sobolev_constant, ExponentParams, GnBranch,
};
use ineq_forge::heat::{
    chapman_kolmogorov_origin, heat_kernel, heat_normalization, heat_pde_residual, HeatKernelSpec, PdeGrid,
};
use ineq_forge::manifold::{ConditionId, ManifoldModel, Witness};
use ineq_forge::numerics::{linspace, QuadratureConfig};
use ineq_forge::rearrange::RadialProfile;
use ineq_forge::verify::{verify_with, InequalityId, ManifoldClass};
use ineq_forge::Error;
use serde::Serialize;

use crate::config::RunConfig;
use crate::error::{CliError, CliResult};
use crate::output::{json_bytes, kernel_csv, write_atomic};
use crate::run;

fn print_json<T: Serialize>(v: &T) -> CliResult<()> {
    let bytes = json_bytes(v)?;
    print!("{}", String::from_utf8_lossy(&bytes));
    Ok(())
}

fn model(spec: &str, n: usize) -> CliResult<ManifoldModel> {
    ManifoldModel::parse(spec, n).map_err(|e| CliError::Usage(format!("manifold '{spec}': {e}")))
}

#[derive(Serialize)]
struct Formulas {
    poincare: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    lambda_log: Option<&'static str>,
    #[serde(rename = "L_Np")]
    l_np: &'static str,
    #[serde(rename = "S_Np")]
    s_np: &'static str,
    #[serde(rename = "GN1", skip_serializing_if = "Option::is_none")]
    gn1: Option<&'static str>,
    #[serde(rename = "GN2", skip_serializing_if = "Option::is_none")]
    gn2: Option<&'static str>,
    #[serde(rename = "C2", skip_serializing_if = "Option::is_none")]
    c2: Option<&'static str>,
    #[serde(rename = "G")]
    g: &'static str,
}

#[derive(Serialize)]
struct ConstantsOut {
    #[serde(rename = "N")]
    n: usize,
    p: f64,
    manifold: String,
    poincare: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    lambda_log: Option<f64>,
    #[serde(rename = "L_Np")]
    l_np: f64,
    #[serde(rename = "S_Np")]
    s_np: f64,
    #[serde(rename = "GN1", skip_serializing_if = "Option::is_none")]
    gn1: Option<f64>,
    #[serde(rename = "GN2", skip_serializing_if = "Option::is_none")]
    gn2: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    theta: Option<f64>,
    #[serde(rename = "C2", skip_serializing_if = "Option::is_none")]
    c2: Option<f64>,
    #[serde(rename = "G")]
    g: f64,
    formulas: Formulas,
}

pub fn constants(n: usize, p: f64, alpha: Option<f64>, manifold: &str) -> CliResult<()> {
    if n < 2 {
        return Err(CliError::Usage(format!("--dim {n} must be >= 2")));
    }
    if !(p > 1.0 && p < n as f64) {
        return Err(CliError::Usage(format!("--p {p} must satisfy 1 < p < N = {n}")));
    }
    let m = model(manifold, n)?;
    let lambda = if p >= 2.0 { Some(lambda_log(n, p, &m)?) } else { None };
    let (mut gn1, mut gn2, mut theta) = (None, None, None);
    if let Some(a) = alpha {
        let branch = GnBranch::for_alpha(a)?;
        let gn = gn_constant(&ExponentParams::new(n, p).with_alpha(a), branch)?;
        theta = Some(gn.theta);
        match branch {
            GnBranch::AlphaGt1 => gn1 = Some(gn.constant),
            GnBranch::AlphaLt1 => gn2 = Some(gn.constant),
        }
    }
    let c2 = if n >= 3 { Some(gaussian_c2(n)?) } else { None };
    let out = ConstantsOut {
        n,
        p,
        manifold: m.label().to_string(),
        poincare: poincare_constant(n, p)?,
        lambda_log: lambda,
        l_np: log_sobolev_constant(n, p)?,
        s_np: sharp_sobolev_constant(n, p)?,
        gn1,
        gn2,
        theta,
        c2,
        g: gaussian_normalization(n)?,
        formulas: Formulas {
            poincare: "poincare_constant",
            lambda_log: lambda.map(|_| {
                if m.is_hyperbolic() && p == 2.0 {
                    "hyperbolic_lambda_p2"
                } else {
                    "lambda_from_c"
                }
            }),
            l_np: "log_sobolev_constant",
            s_np: "talenti_sobolev_constant",
            gn1: gn1.map(|_| "gn_constant_alpha_gt_1"),
            gn2: gn2.map(|_| "gn_constant_alpha_lt_1"),
            c2: c2.map(|_| "gaussian_c2"),
            g: "gaussian_normalization",
        },
    };
    print_json(&out)
}

#[derive(Serialize)]
struct KernelSummary {
    #[serde(rename = "C")]
    c: Option<f64>,
    /// number, or "inf" when the quotient blows up at the pole
    limit_zero: serde_json::Value,
    limit_infinity: Option<f64>,
    argmin: Option<f64>,
    grid_min: Option<f64>,
    max_abs_k: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    violated: Option<ConditionId>,
    #[serde(skip_serializing_if = "Option::is_none")]
    witness: Option<Witness>,
}

fn extended(x: f64) -> serde_json::Value {
    if x.is_finite() {
        serde_json::json!(x)
    } else {
        serde_json::json!(crate::output::fmt_f64(x))
    }
}

pub struct KernelArgs {
    pub manifold: String,
    pub n: usize,
    pub p: f64,
    pub tmin: f64,
    pub tmax: f64,
    pub grid: usize,
    pub csv: Option<PathBuf>,
}

pub fn kernel(a: &KernelArgs) -> CliResult<()> {
    if a.grid < 10 {
        return Err(CliError::Usage(format!("--grid {} must be >= 10", a.grid)));
    }
    if !(a.tmin > 0.0 && a.tmax > a.tmin) {
        return Err(CliError::Usage(format!("need 0 < tmin < tmax, got {} and {}", a.tmin, a.tmax)));
    }
    let m = model(&a.manifold, a.n)?;
    if a.tmax > m.validity_upper() {
        return Err(CliError::Usage(format!(
            "--tmax {} exceeds the validity bound {} of '{}'",
            a.tmax,
            m.validity_upper(),
            a.manifold
        )));
    }
    let samples = linspace(a.tmin, a.tmax, a.grid)
        .into_iter()
        .map(|t| m.kernel_at_radius(a.p, t))
        .collect::<Result<Vec<_>, _>>()?;
    if let Some(path) = &a.csv {
        write_atomic(path, &kernel_csv(&samples)?)?;
    }
    let max_abs_k = samples.iter().map(|s| s.k.abs()).fold(0.0, f64::max);
    let scan = (a.tmin, a.tmax, a.grid);
    match correction_lower_constant(&m, a.p, scan) {
        Ok(lc) => print_json(&KernelSummary {
            c: Some(lc.c),
            limit_zero: extended(lc.limit_zero),
            limit_infinity: lc.limit_infinity,
            argmin: Some(lc.argmin),
            grid_min: Some(lc.grid_min),
            max_abs_k,
            violated: None,
            witness: None,
        }),
        Err(Error::ConditionViolated(msg)) => {
            let witness = m
                .check_conditions(a.p, scan)?
                .into_iter()
                .find(|r| r.condition_id == ConditionId::KernelPositive)
                .and_then(|r| r.witness);
            print_json(&KernelSummary {
                c: None,
                limit_zero: extended(quotient_limit_zero(&m, a.p)?),
                limit_infinity: None,
                argmin: None,
                grid_min: None,
                max_abs_k,
                violated: Some(ConditionId::KernelPositive),
                witness,
            })?;
            Err(CliError::Condition(msg))
        }
        Err(e) => Err(e.into()),
    }
}

pub fn conditions(manifold: &str, n: usize, p: f64, scan: (f64, f64, usize)) -> CliResult<()> {
    let m = model(manifold, n)?;
    let reports = m.check_conditions(p, scan)?;
    print_json(&reports)?;
    let failed: Vec<String> = reports.iter().filter(|r| !r.passed).map(|r| format!("{:?}", r.condition_id)).collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::Condition(format!("'{manifold}' fails {}", failed.join(", "))))
    }
}

pub struct VerifyArgs {
    pub inequality: String,
    pub profile: String,
    pub manifold: Option<String>,
    pub params: ExponentParams,
}

pub fn verify(a: &VerifyArgs) -> CliResult<()> {
    let id: InequalityId = a.inequality.parse()?;
    let u = RadialProfile::parse(&a.profile)?;
    let spec = a.manifold.clone().unwrap_or_else(|| match id.manifold_class() {
        ManifoldClass::Euclidean => "id".to_string(),
        _ => "sinh".to_string(),
    });
    let m = model(&spec, a.params.n)?;
    let report = verify_with(id, &u, &m, &a.params, &QuadratureConfig::default())?;
    print_json(&report)?;
    if report.passes() {
        Ok(())
    } else {
        Err(CliError::Deficit(format!(
            "deficit {} is below -{} for {id} on '{}'",
            report.deficit,
            report.tolerance(),
            report.profile
        )))
    }
}

pub fn run(config: &std::path::Path) -> CliResult<()> {
    let cfg = RunConfig::load(config)?.validate()?;
    let out = run::execute(&cfg)?;
    run::persist(&cfg, &out)?;
    print_json(&out.summary)?;
    let bad = run::failures(&out);
    if bad.is_empty() {
        Ok(())
    } else {
        let list: Vec<String> = bad.iter().map(|(id, u, d)| format!("{id}/{u} (deficit {d})")).collect();
        Err(CliError::Deficit(list.join("; ")))
    }
}

#[derive(Serialize)]
struct Check {
    name: String,
    value: f64,
    tolerance: f64,
    passed: bool,
}

fn check(name: String, err: f64, tolerance: f64) -> Check {
    Check { name, value: err, tolerance, passed: err <= tolerance }
}

#[derive(Serialize)]
struct HeatSelfTest {
    #[serde(rename = "N")]
    n: usize,
    checks: Vec<Check>,
    passed: bool,
}

/// Mass, PDE residual, Chapman–Kolmogorov and (N = 3) the closed form at the pole.
pub fn heat(n: usize) -> CliResult<()> {
    HeatKernelSpec::new(n, 1.0, 1.0)?;
    let (mass_tol, pde_tol, ck_tol) = if n == 3 { (1e-6, 1e-4, 1e-5) } else { (1e-4, 1e-3, 1e-4) };
    let mut checks = Vec::new();
    for t in [0.25, 0.5, 1.0, 2.0, 4.0] {
        let mass = heat_normalization(&HeatKernelSpec::new(n, t, 1.0)?)?;
        checks.push(check(format!("mass t={t}"), (mass - 1.0).abs(), mass_tol));
    }
    checks.push(check("pde residual".into(), heat_pde_residual(n, &PdeGrid::default())?, pde_tol));
    let unit = HeatKernelSpec::new(n, 1.0, 1.0)?;
    for (s, t) in [(0.5, 0.5), (0.3, 0.7), (1.0, 1.0)] {
        let (l, r) = chapman_kolmogorov_origin(&unit, s, t)?;
        checks.push(check(format!("chapman-kolmogorov s={s} t={t}"), (l - r).abs() / r, ck_tol));
    }
    if n == 3 {
        let want = (4.0 * std::f64::consts::PI).powf(-1.5) * (-1f64).exp();
        checks.push(check("p3(0,1)".into(), (heat_kernel(&unit, 0.0)? - want).abs(), 1e-8));
    }
    let passed = checks.iter().all(|c| c.passed);
    print_json(&HeatSelfTest { n, checks, passed })?;
    if passed {
        Ok(())
    } else {
        Err(CliError::Deficit(format!("heat self-test failed for N = {n}")))
    }
}
