//! Command-line front end: `run`, `verify`, `suite` and `catalog`.
//!
//! Exit codes: 0 success, 1 a check or criterion failed, 2 usage error.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use crate::bpm::{self, BpmConfig, Termination};
use crate::error::{invalid, BroxError, Result};
use crate::geometry::{Geometry, GeometrySpec};
use crate::objective::{catalog, FiniteDomainObjective, Objective};
use crate::oracle::{OracleConfig, OracleKind, DEFAULT_GRID_N, DEFAULT_REFINE, DEFAULT_SAMPLES};
use crate::suite::{self, Injection, SuiteOptions};
use crate::verify::{Check, CheckArgs, Report, Verdict, VerifyConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

/// Environment variable capping worker threads.
pub const THREADS_ENV: &str = "BROXLAB_THREADS";

/// Points sampled for `landscape.csv`.
pub const LANDSCAPE_POINTS: usize = 2001;

#[derive(Debug, Parser)]
#[command(name = "broxlab", version, about = "Ball proximal point method: runs, checks and the acceptance suite")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run BPM and write traj.json, traj.csv, manifest.json and (1-D) landscape.csv.
    Run(RunArgs),
    /// Run one check and write its report.
    Verify(VerifyArgs),
    /// Run the acceptance battery.
    Suite(SuiteArgs),
    /// List built-in objectives.
    Catalog(CatalogArgs),
}

#[derive(Debug, Clone, Args)]
pub struct OracleArgs {
    /// auto, exhaustive, grid1d or multistart.
    #[arg(long, default_value = "auto")]
    pub oracle: String,
    #[arg(long, default_value_t = DEFAULT_GRID_N)]
    pub grid_n: usize,
    /// Trisection rounds (grid1d) or step halvings (multistart).
    #[arg(long, default_value_t = DEFAULT_REFINE)]
    pub refine: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    /// Catalog key or path to a finite-domain JSON file.
    #[arg(long)]
    pub objective: String,
    /// `identity`, `diag:a,b,...`, row-major entries `a,b,c,d`, inline JSON or a JSON file.
    #[arg(long)]
    pub geometry: Option<String>,
    #[arg(long)]
    pub t: f64,
    /// Comma-separated start point.
    #[arg(long, allow_hyphen_values = true)]
    pub x0: String,
    #[command(flatten)]
    pub oracle: OracleArgs,
    /// Multistart samples per step.
    #[arg(long, default_value_t = DEFAULT_SAMPLES)]
    pub samples: usize,
    #[arg(long, default_value_t = bpm::DEFAULT_MAX_ITERS)]
    pub max_iters: usize,
    #[arg(long)]
    pub opt_tol: Option<f64>,
    /// Output directory.
    #[arg(long, default_value = "broxlab-run")]
    pub out: PathBuf,
    /// Trajectory CSV path (default: traj.csv in the output directory).
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    #[arg(long)]
    pub objective: String,
    #[arg(long)]
    pub check: String,
    #[arg(long)]
    pub geometry: Option<String>,
    #[arg(long)]
    pub t: Option<f64>,
    /// Second radius of the monotonicity checks.
    #[arg(long)]
    pub t2: Option<f64>,
    #[arg(long, default_value_t = 1.0)]
    pub zeta: f64,
    #[arg(long, default_value_t = 1.0)]
    pub theta: f64,
    /// Minimizer to try first.
    #[arg(long, allow_hyphen_values = true)]
    pub x_star: Option<String>,
    /// Point for `normal_cone`.
    #[arg(long, allow_hyphen_values = true)]
    pub x0: Option<String>,
    #[command(flatten)]
    pub oracle: OracleArgs,
    /// Sampled configurations.
    #[arg(long, default_value_t = VerifyConfig::default().samples)]
    pub samples: usize,
    /// Multistart samples per broximal step.
    #[arg(long, default_value_t = DEFAULT_SAMPLES)]
    pub oracle_samples: usize,
    #[arg(long)]
    pub opt_tol: Option<f64>,
    /// Report JSON path (default: stdout).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Witness CSV path.
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct SuiteArgs {
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Comma-separated criteria to run, e.g. `1,2,5`.
    #[arg(long)]
    pub only: Option<String>,
    /// Comma-separated catalog keys restricting per-objective entries.
    #[arg(long)]
    pub objectives: Option<String>,
    /// Expected failure OBJECTIVE@CHECK@T; repeatable.
    #[arg(long = "expect-fail")]
    pub expect_fail: Vec<String>,
    /// Summary JSON path.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Entry CSV path.
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct CatalogArgs {
    /// Describe one entry instead of listing all.
    #[arg(long)]
    pub objective: Option<String>,
    /// Emit JSON.
    #[arg(long)]
    pub json: bool,
}

/// What a command was asked to do; written next to its outputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub objective: String,
    pub geometry: GeometrySpec,
    pub oracle: OracleConfig,
    pub t: f64,
    pub x0: Vec<f64>,
    pub max_iters: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub opt_tol: Option<f64>,
    pub outputs: Vec<String>,
    pub seed: u64,
}

/// Parses arguments and runs the command, returning the exit code.
pub fn main_with<I, S>(args: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let outcome = match cli.command {
        Command::Run(a) => cmd_run(&a),
        Command::Verify(a) => cmd_verify(&a),
        Command::Suite(a) => cmd_suite(&a),
        Command::Catalog(a) => cmd_catalog(&a),
    };
    outcome.unwrap_or_else(|e| {
        eprintln!("broxlab: {e}");
        EXIT_USAGE
    })
}

/// Thread count from [`THREADS_ENV`], if set.
pub fn threads_from_env() -> Result<Option<usize>> {
    match std::env::var(THREADS_ENV) {
        Err(_) => Ok(None),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(invalid(format!("{THREADS_ENV} must be a positive integer, got `{v}`"))),
        },
    }
}

pub fn parse_point(text: &str) -> Result<Vec<f64>> {
    let inner = text.trim().trim_start_matches('[').trim_end_matches(']');
    inner
        .split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| invalid(format!("bad number `{}` in point `{text}`", s.trim())))
        })
        .collect()
}

/// A catalog key, or a path to a finite-domain JSON file.
pub fn load_objective(key: &str) -> Result<Objective> {
    let path = Path::new(key);
    if path.extension().is_some_and(|e| e == "json") || path.is_file() {
        let text = fs::read_to_string(path)
            .map_err(|e| invalid(format!("cannot read objective file `{key}`: {e}")))?;
        let name = path.file_stem().map_or("finite", |s| s.to_str().unwrap_or("finite"));
        return FiniteDomainObjective::from_json(&text)?.into_objective(name);
    }
    catalog::builtin(key)
}

/// Geometry from a shorthand, inline JSON or a JSON file; identity when absent.
pub fn load_geometry(spec: Option<&str>, dim: usize) -> Result<Geometry> {
    let Some(spec) = spec.map(str::trim) else {
        return Ok(Geometry::identity(dim));
    };
    let g = if spec.eq_ignore_ascii_case("identity") {
        Geometry::identity(dim)
    } else if let Some(d) = spec.strip_prefix("diag:") {
        Geometry::diagonal(&parse_point(d)?)?
    } else if spec.starts_with('{') {
        GeometrySpec::from_json(spec)?
    } else if Path::new(spec).is_file() {
        GeometrySpec::from_json(&fs::read_to_string(spec)?)?
    } else {
        let entries = parse_point(spec)?;
        let n = (entries.len() as f64).sqrt().round() as usize;
        if n * n != entries.len() {
            return Err(invalid(format!("geometry `{spec}` is not a square matrix, a file or a shorthand")));
        }
        Geometry::new(n, entries)?
    };
    if g.dim() != dim {
        return Err(BroxError::DimensionMismatch { expected: dim, got: g.dim() });
    }
    Ok(g)
}

fn oracle_config(a: &OracleArgs, samples: usize) -> Result<OracleConfig> {
    let kind: OracleKind = a.oracle.parse()?;
    let cfg = OracleConfig { kind, grid_n: a.grid_n, samples, refine: a.refine, seed: a.seed };
    cfg.validate()?;
    Ok(cfg)
}

/// Writes a line to stdout; a closed pipe is not an error.
fn emit(line: &str) {
    let mut out = std::io::stdout().lock();
    let _ = writeln!(out, "{line}");
}

fn create_parent(path: &Path) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    Ok(())
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    create_parent(path)?;
    let mut file = fs::File::create(path)?;
    file.write_all(text.as_bytes())?;
    if !text.ends_with('\n') {
        file.write_all(b"\n")?;
    }
    Ok(())
}

pub fn cmd_run(a: &RunArgs) -> Result<i32> {
    let f = load_objective(&a.objective)?;
    let g = load_geometry(a.geometry.as_deref(), f.dim())?;
    let x0 = parse_point(&a.x0)?;
    let oracle = oracle_config(&a.oracle, a.samples)?;
    let mut cfg = BpmConfig::new(a.t).with_max_iters(a.max_iters).with_oracle(oracle.clone());
    if let Some(tol) = a.opt_tol {
        cfg = cfg.with_opt_tol(tol);
    }
    let traj = bpm::run(&f, &g, &x0, &cfg)?;

    fs::create_dir_all(&a.out)?;
    let json_path = a.out.join("traj.json");
    let csv_path = a.csv.clone().unwrap_or_else(|| a.out.join("traj.csv"));
    traj.write_json(&json_path)?;
    create_parent(&csv_path)?;
    traj.write_csv_file(&csv_path)?;
    let mut outputs = vec![json_path.display().to_string(), csv_path.display().to_string()];
    if f.dim() == 1 {
        let (lo, hi) = landscape_window(&f, a.t, x0[0]);
        let samples = bpm::landscape(&f, lo, hi, LANDSCAPE_POINTS)?;
        let path = a.out.join("landscape.csv");
        bpm::write_landscape_csv(fs::File::create(&path)?, &samples)?;
        outputs.push(path.display().to_string());
    }
    let manifest_path = a.out.join("manifest.json");
    outputs.push(manifest_path.display().to_string());
    let manifest = RunManifest {
        command: "run".into(),
        objective: a.objective.clone(),
        geometry: GeometrySpec::from(&g),
        oracle,
        t: a.t,
        x0,
        max_iters: a.max_iters,
        opt_tol: a.opt_tol,
        outputs,
        seed: a.oracle.seed,
    };
    write_text(&manifest_path, &serde_json::to_string_pretty(&manifest)?)?;

    emit(&format!(
        "{}: {} after {} steps, x = {:?}, f = {}",
        f.name(),
        termination_label(traj.termination),
        traj.steps(),
        traj.last(),
        traj.last_value()
    ));
    if let Some(msg) = &traj.failure {
        eprintln!("oracle failure: {msg}");
    }
    Ok(if traj.termination == Termination::OracleFailure { EXIT_FAILED } else { EXIT_OK })
}

/// `[x⋆ − 5t, x0 + t]`, widened to contain `x0 − t` and `x⋆ + t` when the
/// start lies left of the minimizer.
pub fn landscape_window(f: &Objective, t: f64, x0: f64) -> (f64, f64) {
    let x_star = f.minimizers().first().map_or(x0, |m| m[0]);
    let lo = (x_star - 5.0 * t).min(x0 - t);
    let hi = (x0 + t).max(x_star + t);
    (lo, hi)
}

fn termination_label(t: Termination) -> &'static str {
    match t {
        Termination::ReachedOptimum => "reached_optimum",
        Termination::MaxIters => "max_iters",
        Termination::OracleFailure => "oracle_failure",
    }
}

pub fn cmd_verify(a: &VerifyArgs) -> Result<i32> {
    let f = load_objective(&a.objective)?;
    let f = match a.opt_tol {
        Some(tol) => f.with_opt_tol(tol),
        None => f,
    };
    let g = load_geometry(a.geometry.as_deref(), f.dim())?;
    let check: Check = a.check.parse()?;
    let cfg = VerifyConfig::default()
        .with_samples(a.samples)
        .with_seed(a.oracle.seed)
        .with_oracle(oracle_config(&a.oracle, a.oracle_samples)?);
    let args = CheckArgs {
        t: a.t,
        t2: a.t2,
        zeta: a.zeta,
        theta: a.theta,
        x_star: a.x_star.as_deref().map(parse_point).transpose()?,
        x: a.x0.as_deref().map(parse_point).transpose()?,
    };
    let report = check.run(&f, &g, &args, &cfg)?;
    let json = report.to_json()?;
    match &a.out {
        Some(path) => write_text(path, &json)?,
        None => emit(&json),
    }
    if let Some(path) = &a.csv {
        create_parent(path)?;
        write_witness_csv(fs::File::create(path)?, &report)?;
    }
    eprintln!(
        "{} on {}: {} ({} samples, {} violations)",
        report.check, report.objective, report.verdict, report.samples, report.violations
    );
    Ok(if report.verdict == Verdict::Pass { EXIT_OK } else { EXIT_FAILED })
}

fn join(v: &Option<Vec<f64>>) -> String {
    v.as_ref()
        .map(|p| p.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(" "))
        .unwrap_or_default()
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// Columns `kind,x,u,x_star,inner,margin,lambda,t`; points are space-separated.
pub fn write_witness_csv<W: Write>(out: W, report: &Report) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["kind", "x", "u", "x_star", "inner", "margin", "lambda", "t"])?;
    for wit in &report.witnesses {
        w.write_record([
            wit.kind.clone().unwrap_or_else(|| report.check.clone()),
            join(&Some(wit.x.clone())),
            join(&wit.u),
            join(&wit.x_star),
            opt(wit.inner),
            wit.margin.to_string(),
            opt(wit.lambda),
            opt(wit.t),
        ])?;
    }
    w.flush()?;
    Ok(())
}

fn parse_list<T: std::str::FromStr>(text: &str, what: &str) -> Result<Vec<T>> {
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<T>().map_err(|_| invalid(format!("bad {what} `{s}`"))))
        .collect()
}

pub fn cmd_suite(a: &SuiteArgs) -> Result<i32> {
    let opts = SuiteOptions {
        seed: a.seed,
        only: a.only.as_deref().map(|s| parse_list::<u8>(s, "criterion")).transpose()?,
        objectives: a.objectives.as_deref().map(|s| parse_list::<String>(s, "objective")).transpose()?,
        expect_fail: a
            .expect_fail
            .iter()
            .map(|s| s.parse::<Injection>())
            .collect::<Result<Vec<_>>>()?,
    };
    let summary = suite::run_suite(&opts)?;
    for c in &summary.criteria {
        emit(&c.to_string());
    }
    for (k, secs) in &summary.timings {
        eprintln!("criterion {k}: {secs:.2} s");
    }
    if let Some(path) = &a.out {
        write_text(path, &summary.to_json()?)?;
    }
    if let Some(path) = &a.csv {
        create_parent(path)?;
        let mut w = csv::Writer::from_writer(fs::File::create(path)?);
        w.write_record(["criterion", "id", "objective", "expected", "verdict", "ok", "detail"])?;
        for e in &summary.entries {
            w.write_record([
                e.criterion.to_string(),
                e.id.clone(),
                e.objective.clone(),
                e.expected.to_string(),
                e.verdict.to_string(),
                e.ok.to_string(),
                e.detail.clone(),
            ])?;
        }
        w.flush()?;
    }
    emit(&format!("suite: {}", if summary.passed { "PASS" } else { "FAIL" }));
    Ok(if summary.passed { EXIT_OK } else { EXIT_FAILED })
}

#[derive(Debug, Serialize)]
struct CatalogEntry {
    key: String,
    name: String,
    dim: usize,
    f_star: Option<f64>,
    minimizers: Vec<Vec<f64>>,
    finite_domain: bool,
    gradient: bool,
}

fn describe(key: &str) -> Result<CatalogEntry> {
    let f = load_objective(key)?;
    Ok(CatalogEntry {
        key: key.to_string(),
        name: f.name().to_string(),
        dim: f.dim(),
        f_star: f.f_star(),
        minimizers: f.minimizers().to_vec(),
        finite_domain: f.is_finite_domain(),
        gradient: f.has_gradient(),
    })
}

pub fn cmd_catalog(a: &CatalogArgs) -> Result<i32> {
    if let Some(key) = &a.objective {
        let e = describe(key)?;
        if a.json {
            emit(&serde_json::to_string_pretty(&e)?);
        } else {
            emit(&format!("{} (dim {}), f* = {:?}, minimizers {:?}", e.name, e.dim, e.f_star, e.minimizers));
        }
        return Ok(EXIT_OK);
    }
    if a.json {
        let list: Vec<serde_json::Value> = catalog::CATALOG
            .iter()
            .map(|(k, d)| serde_json::json!({ "key": k, "description": d }))
            .collect();
        emit(&serde_json::to_string_pretty(&list)?);
    } else {
        for (k, d) in catalog::CATALOG {
            emit(&format!("{k:<30} {d}"));
        }
    }
    Ok(EXIT_OK)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn points_parse() {
        assert_eq!(parse_point("3,0").unwrap(), vec![3.0, 0.0]);
        assert_eq!(parse_point("[-1.5, 2]").unwrap(), vec![-1.5, 2.0]);
        assert!(parse_point("1,,2").is_err());
    }

    #[test]
    fn geometry_forms() {
        assert!(load_geometry(None, 2).unwrap().is_identity());
        assert!(load_geometry(Some("identity"), 3).unwrap().is_identity());
        assert_eq!(load_geometry(Some("diag:2,3"), 2).unwrap().matrix(), &[2.0, 0.0, 0.0, 3.0]);
        assert_eq!(load_geometry(Some("2,0.5,0.5,1"), 2).unwrap().matrix(), &[2.0, 0.5, 0.5, 1.0]);
        let g = load_geometry(Some(r#"{"dim": 2, "X": [1, 0, 0, 4]}"#), 2).unwrap();
        assert_eq!(g.matrix(), &[1.0, 0.0, 0.0, 4.0]);
        assert!(load_geometry(Some("1,2,3"), 2).is_err());
        assert!(load_geometry(Some("diag:1,1,1"), 2).is_err());
    }

    #[test]
    fn usage_errors_exit_two() {
        assert_eq!(main_with(["broxlab", "run", "--objective", "nope", "--t", "1", "--x0", "0"]), EXIT_USAGE);
        assert_eq!(main_with(["broxlab", "frobnicate"]), EXIT_USAGE);
        assert_eq!(main_with(["broxlab", "suite", "--objectives", ""]), EXIT_USAGE);
        assert_eq!(main_with(["broxlab", "suite", "--only", "8"]), EXIT_USAGE);
    }

    #[test]
    fn landscape_covers_the_declared_window() {
        let f = catalog::example1();
        let (lo, hi) = landscape_window(&f, std::f64::consts::TAU, 20.0);
        assert!((lo - (catalog::EXAMPLE1_MINIMIZER - 5.0 * std::f64::consts::TAU)).abs() < 1e-12);
        assert_eq!(hi, 20.0 + std::f64::consts::TAU);
    }
}
