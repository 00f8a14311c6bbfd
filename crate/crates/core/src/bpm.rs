//! Constant-radius ball proximal point method `x_{k+1} ∈ BProx_t(x_k)`.

use std::fmt;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{check_dim, invalid, Result};
use crate::geometry::Geometry;
use crate::objective::Objective;
use crate::oracle::{BroxResult, OracleConfig};

pub const DEFAULT_MAX_ITERS: usize = 100;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BpmConfig {
    pub t: f64,
    pub max_iters: usize,
    /// Overrides the objective's own optimality tolerance when set.
    pub opt_tol: Option<f64>,
    pub oracle: OracleConfig,
}

impl BpmConfig {
    pub fn new(t: f64) -> Self {
        Self {
            t,
            max_iters: DEFAULT_MAX_ITERS,
            opt_tol: None,
            oracle: OracleConfig::default(),
        }
    }

    pub fn with_max_iters(mut self, max_iters: usize) -> Self {
        self.max_iters = max_iters;
        self
    }

    pub fn with_opt_tol(mut self, tol: f64) -> Self {
        self.opt_tol = Some(tol);
        self
    }

    pub fn with_oracle(mut self, oracle: OracleConfig) -> Self {
        self.oracle = oracle;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.t > 0.0) || !self.t.is_finite() {
            return Err(invalid(format!("radius must be finite and positive, got {}", self.t)));
        }
        if self.max_iters == 0 {
            return Err(invalid("max_iters must be at least 1"));
        }
        if let Some(tol) = self.opt_tol {
            if !(tol >= 0.0) {
                return Err(invalid(format!("opt_tol must be ≥ 0, got {tol}")));
            }
        }
        self.oracle.validate()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    ReachedOptimum,
    MaxIters,
    OracleFailure,
}

impl fmt::Display for Termination {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Termination::ReachedOptimum => "reached_optimum",
            Termination::MaxIters => "max_iters",
            Termination::OracleFailure => "oracle_failure",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub objective: String,
    pub t: f64,
    pub iterates: Vec<Vec<f64>>,
    pub values: Vec<f64>,
    /// `dist_X(x_k, X_f)`; `None` when no minimizer is declared.
    pub dists: Vec<Option<f64>>,
    pub termination: Termination,
    /// Oracle value slack of each step.
    pub epsilons: Vec<f64>,
    pub failure: Option<String>,
    pub seed: u64,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub brox_records: Vec<BroxResult>,
}

impl Trajectory {
    pub fn last(&self) -> &[f64] {
        self.iterates.last().expect("a trajectory holds at least x0")
    }

    pub fn last_value(&self) -> f64 {
        *self.values.last().expect("a trajectory holds at least x0")
    }

    /// Number of broximal steps taken.
    pub fn steps(&self) -> usize {
        self.iterates.len() - 1
    }

    pub fn max_epsilon(&self) -> f64 {
        self.epsilons.iter().cloned().fold(0.0, f64::max)
    }

    /// JSON without the per-step oracle records.
    pub fn to_json(&self) -> Result<String> {
        let mut slim = self.clone();
        slim.brox_records.clear();
        Ok(serde_json::to_string_pretty(&slim)?)
    }

    pub fn write_json(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut file = std::fs::File::create(path)?;
        file.write_all(self.to_json()?.as_bytes())?;
        file.write_all(b"\n")?;
        Ok(())
    }

    /// Columns `k, x1..xd, f, dist`; `dist` is empty when undefined.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let d = self.iterates.first().map_or(0, Vec::len);
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec!["k".to_string()];
        if d == 1 {
            header.push("x".into());
        } else {
            header.extend((1..=d).map(|i| format!("x{i}")));
        }
        header.extend(["f".to_string(), "dist".to_string()]);
        w.write_record(&header)?;
        for (k, x) in self.iterates.iter().enumerate() {
            let mut row = vec![k.to_string()];
            row.extend(x.iter().map(|v| v.to_string()));
            row.push(self.values[k].to_string());
            row.push(self.dists[k].map_or(String::new(), |v| v.to_string()));
            w.write_record(&row)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn write_csv_file(&self, path: impl AsRef<Path>) -> Result<()> {
        self.write_csv(std::fs::File::create(path)?)
    }
}

fn dist_to_minimizers(f: &Objective, g: &Geometry, x: &[f64]) -> Option<f64> {
    if f.minimizers().is_empty() {
        None
    } else {
        g.dist_to_set(x, f.minimizers()).ok()
    }
}

/// Runs BPM from `x0`. Stops at the first iterate with `f(x_k) ≤ f⋆ + opt_tol`
/// or after `max_iters` steps. Oracle errors end the run with
/// [`Termination::OracleFailure`]; only invalid inputs are returned as `Err`.
pub fn run(f: &Objective, g: &Geometry, x0: &[f64], cfg: &BpmConfig) -> Result<Trajectory> {
    cfg.validate()?;
    check_dim(f.dim(), x0.len())?;
    check_dim(f.dim(), g.dim())?;
    let v0 = f.value(x0);
    if !v0.is_finite() {
        return Err(invalid(format!("x0 = {x0:?} is outside the domain of `{}`", f.name())));
    }
    let opt_tol = cfg.opt_tol.unwrap_or_else(|| f.opt_tol());
    let optimal = |v: f64| f.f_star().is_some_and(|fs| v <= fs + opt_tol);

    let mut traj = Trajectory {
        objective: f.name().to_string(),
        t: cfg.t,
        iterates: vec![x0.to_vec()],
        values: vec![v0],
        dists: vec![dist_to_minimizers(f, g, x0)],
        termination: Termination::MaxIters,
        epsilons: Vec::new(),
        failure: None,
        seed: cfg.oracle.seed,
        brox_records: Vec::new(),
    };
    loop {
        if optimal(traj.last_value()) {
            traj.termination = Termination::ReachedOptimum;
            break;
        }
        if traj.steps() == cfg.max_iters {
            traj.termination = Termination::MaxIters;
            break;
        }
        match cfg.oracle.solve(f, g, traj.last(), cfg.t) {
            Ok(step) => {
                traj.dists.push(dist_to_minimizers(f, g, &step.selected));
                traj.iterates.push(step.selected.clone());
                traj.values.push(step.selected_value);
                traj.epsilons.push(step.epsilon);
                traj.brox_records.push(step);
            }
            Err(e) => {
                traj.termination = Termination::OracleFailure;
                traj.failure = Some(e.to_string());
                break;
            }
        }
    }
    Ok(traj)
}

/// Smallest `K` with `⌊K/3⌋ ≥ 3 ‖x0 − x⋆‖²_X / t²`, i.e. `3 ⌈ratio⌉`.
/// A ratio within a relative `1e-12` of an integer is rounded to it.
pub fn kappa_bound(g: &Geometry, x0: &[f64], x_star: &[f64], t: f64) -> Result<usize> {
    if !(t > 0.0) {
        return Err(invalid(format!("radius must be positive, got {t}")));
    }
    let d = g.dist(x0, x_star)?;
    let ratio = 3.0 * d * d / (t * t);
    let nearest = ratio.round();
    let whole = if (ratio - nearest).abs() <= 1e-12 * ratio.max(1.0) {
        nearest
    } else {
        ratio.ceil()
    };
    Ok(3 * whole as usize)
}

/// Dense samples `(x, f(x))` of a 1-D objective over `[lo, hi]`.
pub fn landscape(f: &Objective, lo: f64, hi: f64, n: usize) -> Result<Vec<(f64, f64)>> {
    if f.dim() != 1 {
        return Err(invalid("landscape sampling needs a 1-D objective"));
    }
    if !(lo < hi) || n < 2 {
        return Err(invalid(format!("bad landscape window [{lo}, {hi}] with {n} points")));
    }
    let h = (hi - lo) / (n - 1) as f64;
    Ok((0..n)
        .map(|i| {
            let x = if i == n - 1 { hi } else { lo + i as f64 * h };
            (x, f.value(&[x]))
        })
        .collect())
}

pub fn write_landscape_csv<W: Write>(out: W, samples: &[(f64, f64)]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["x", "f"])?;
    for (x, v) in samples {
        w.write_record([x.to_string(), v.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::objective::catalog;
    use crate::oracle::OracleKind;
    use std::f64::consts::PI;

    #[test]
    fn sphere_one_step() {
        let f = catalog::sphere(1);
        let tr = run(&f, &Geometry::identity(1), &[0.5], &BpmConfig::new(1.0)).unwrap();
        assert_eq!(tr.termination, Termination::ReachedOptimum);
        assert_eq!(tr.steps(), 1);
    }

    #[test]
    fn appendix_d_path() {
        let f = catalog::app_d_ex1();
        let cfg = BpmConfig::new(1.0)
            .with_oracle(OracleConfig::default().with_kind(OracleKind::Exhaustive));
        let tr = run(&f, &Geometry::identity(2), &[3.0, 0.0], &cfg).unwrap();
        assert_eq!(
            tr.iterates,
            vec![vec![3.0, 0.0], vec![2.0, 0.0], vec![1.0, 0.0], vec![0.0, 0.0]]
        );
        assert_eq!(tr.termination, Termination::ReachedOptimum);
        assert_eq!(tr.epsilons, vec![0.0; 3]);
    }

    #[test]
    fn example1_from_twenty() {
        let f = catalog::example1();
        let tr = run(&f, &Geometry::identity(1), &[20.0], &BpmConfig::new(2.0 * PI)).unwrap();
        assert_eq!(tr.termination, Termination::ReachedOptimum);
        assert!(tr.steps() <= 10);
        assert!((tr.last()[0] - catalog::EXAMPLE1_MINIMIZER).abs() <= 1e-3);
        for w in tr.values.windows(2) {
            assert!(w[1] <= w[0]);
        }
    }

    #[test]
    fn oracle_failure_is_not_an_error() {
        let f = catalog::app_d_ex1();
        let cfg = BpmConfig::new(1.0)
            .with_oracle(OracleConfig::default().with_kind(OracleKind::Grid1d));
        let tr = run(&f, &Geometry::identity(2), &[3.0, 0.0], &cfg).unwrap();
        assert_eq!(tr.termination, Termination::OracleFailure);
        assert!(tr.failure.is_some());
    }

    #[test]
    fn max_iters_without_optimum() {
        let f = catalog::cubic();
        let tr = run(&f, &Geometry::identity(1), &[0.0], &BpmConfig::new(1.0).with_max_iters(4)).unwrap();
        assert_eq!(tr.termination, Termination::MaxIters);
        assert_eq!(tr.steps(), 4);
        assert_eq!(tr.dists, vec![None; 5]);
        assert!((tr.last()[0] + 4.0).abs() < 1e-12);
    }

    #[test]
    fn invalid_inputs() {
        let f = catalog::halfline();
        let g = Geometry::identity(1);
        assert!(run(&f, &g, &[-1.0], &BpmConfig::new(1.0)).is_err());
        assert!(run(&f, &g, &[1.0], &BpmConfig::new(-1.0)).is_err());
        assert!(run(&f, &g, &[1.0], &BpmConfig::new(1.0).with_max_iters(0)).is_err());
    }

    #[test]
    fn kappa_examples() {
        let g = Geometry::identity(1);
        assert_eq!(kappa_bound(&g, &[1.0], &[1.0], 1.0).unwrap(), 0);
        for t in [0.1, 1.0, 2.0 * PI, 7.3] {
            assert_eq!(kappa_bound(&g, &[t], &[0.0], t).unwrap(), 9);
        }
        assert_eq!(kappa_bound(&g, &[1.1], &[0.0], 1.0).unwrap(), 12);
    }

    #[test]
    fn csv_and_json_shapes() {
        let f = catalog::sphere(2);
        let tr = run(&f, &Geometry::identity(2), &[3.0, 0.0], &BpmConfig::new(1.0)).unwrap();
        let mut buf = Vec::new();
        tr.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("k,x1,x2,f,dist\n"));
        assert_eq!(text.lines().count(), tr.iterates.len() + 1);
        let v: serde_json::Value = serde_json::from_str(&tr.to_json().unwrap()).unwrap();
        assert_eq!(v["termination"], "reached_optimum");
        assert!(v.get("brox_records").is_none());
    }

    #[test]
    fn landscape_endpoints() {
        let pts = landscape(&catalog::sphere(1), -1.0, 2.0, 4).unwrap();
        assert_eq!(pts, vec![(-1.0, 1.0), (0.0, 0.0), (1.0, 1.0), (2.0, 4.0)]);
    }
}
