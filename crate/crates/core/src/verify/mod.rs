//! Sampling-based certifiers and falsifiers.
//!
//! Every check returns a [`Report`]. A `pass` verdict means no violation was
//! found among the tested configurations; it is never a proof. A `fail`
//! carries witnesses that [`replay`] re-evaluates deterministically.
//! Finite-domain objectives are enumerated instead of sampled.

mod assumptions;
mod classes;
mod monotonicity;
mod named;
mod sampler;
mod stationarity;
mod trajectory;

use std::cmp::Ordering;
use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::geometry::Geometry;
use crate::objective::{Objective, Window};
use crate::oracle::selection::lex_cmp;
use crate::oracle::OracleConfig;

pub use assumptions::{check_assumption1, check_assumption2, check_two_point};
pub use classes::{
    check_aiming, check_gradients, check_pseudoconvex, check_quasar, check_quasiconvex,
    differentiable_at,
};
pub use monotonicity::{
    check_f1_nonmonotone_witnesses, check_f2_monotonicity, check_uba, check_uba_monotonicity,
};
pub use named::{Check, CheckArgs, GRADIENT_REL_TOL};
pub use sampler::Sampler;
pub use stationarity::check_normal_cone;
pub use trajectory::check_trajectory;

pub const PASS_NOTE: &str =
    "pass means no violation was found at this sampling density; it is not a proof";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    Inconclusive,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::Inconclusive => "inconclusive",
        })
    }
}

/// One tested configuration.
///
/// For alignment checks `inner = ⟨x − u, u − x⋆⟩_X`, which must be
/// nonnegative; `u` is the broximal point or the comparison point `z`.
/// Pair checks store the second point in `u`. `margin` is the tolerance the
/// configuration was judged with.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub x: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub u: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x_star: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub inner: Option<f64>,
    pub margin: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t: Option<f64>,
    /// Which property a multi-property check found violated.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kind: Option<String>,
}

impl Witness {
    pub fn at(x: Vec<f64>, margin: f64) -> Self {
        Self {
            x,
            u: None,
            x_star: None,
            inner: None,
            margin,
            lambda: None,
            t: None,
            kind: None,
        }
    }

    pub fn with_u(mut self, u: Vec<f64>) -> Self {
        self.u = Some(u);
        self
    }

    pub fn with_x_star(mut self, x_star: Vec<f64>) -> Self {
        self.x_star = Some(x_star);
        self
    }

    pub fn with_inner(mut self, inner: f64) -> Self {
        self.inner = Some(inner);
        self
    }

    pub fn with_lambda(mut self, lambda: f64) -> Self {
        self.lambda = Some(lambda);
        self
    }

    pub fn with_t(mut self, t: f64) -> Self {
        self.t = Some(t);
        self
    }

    pub fn with_kind(mut self, kind: &str) -> Self {
        self.kind = Some(kind.to_string());
        self
    }
}

fn opt_lex(a: &Option<Vec<f64>>, b: &Option<Vec<f64>>) -> Ordering {
    match (a, b) {
        (Some(a), Some(b)) => lex_cmp(a, b),
        (a, b) => a.is_some().cmp(&b.is_some()),
    }
}

fn canonical(a: &Witness, b: &Witness) -> Ordering {
    a.kind
        .cmp(&b.kind)
        .then_with(|| opt_lex(&a.x_star, &b.x_star))
        .then_with(|| a.t.unwrap_or(0.0).total_cmp(&b.t.unwrap_or(0.0)))
        .then_with(|| lex_cmp(&a.x, &b.x))
        .then_with(|| opt_lex(&a.u, &b.u))
        .then_with(|| a.lambda.unwrap_or(0.0).total_cmp(&b.lambda.unwrap_or(0.0)))
}

/// Tunables shared by all checks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyConfig {
    pub samples: usize,
    pub seed: u64,
    pub oracle: OracleConfig,
    /// Alignment violations need `inner < −rel · ‖x − u‖ · ‖x⋆ − u‖`.
    pub violation_tol_rel: f64,
    /// Points within `t · (1 + rel)` of the minimizer set are not tested.
    pub boundary_margin_rel: f64,
    /// Margin for strict inequalities, relative to the natural scale.
    pub strict_margin_rel: f64,
    pub grad_tol: f64,
    /// Relative residual allowed when testing collinearity with the normal cone.
    pub normal_tol: f64,
    /// Extra BPM steps followed from each sample in the stall check.
    pub orbit: usize,
    /// Witnesses kept per (property, minimizer) group.
    pub max_witnesses: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window: Option<Window>,
    /// Explicit points replacing the sampler.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub points: Option<Vec<Vec<f64>>>,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            samples: 2000,
            seed: 0,
            oracle: OracleConfig::default(),
            violation_tol_rel: 1e-9,
            boundary_margin_rel: 1e-6,
            strict_margin_rel: 1e-8,
            grad_tol: 1e-6,
            normal_tol: 1e-5,
            orbit: 1,
            max_witnesses: 16,
            window: None,
            points: None,
        }
    }
}

impl VerifyConfig {
    pub fn with_samples(mut self, samples: usize) -> Self {
        self.samples = samples;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_oracle(mut self, oracle: OracleConfig) -> Self {
        self.oracle = oracle;
        self
    }

    pub fn with_window(mut self, window: Window) -> Self {
        self.window = Some(window);
        self
    }

    pub fn with_points(mut self, points: Vec<Vec<f64>>) -> Self {
        self.points = Some(points);
        self
    }

    pub fn sampler(&self) -> Sampler {
        match &self.points {
            Some(p) => Sampler::Points(p.clone()),
            None => Sampler::Uniform {
                n: self.samples,
                seed: self.seed,
                window: self.window.clone(),
            },
        }
    }
}

/// Parameters of the generalized-convexity and alignment checks.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassParams {
    pub zeta: f64,
    pub theta: f64,
    pub t: f64,
}

impl Default for ClassParams {
    fn default() -> Self {
        Self {
            zeta: 1.0,
            theta: 1.0,
            t: 1.0,
        }
    }
}

impl ClassParams {
    pub fn validate(&self) -> Result<()> {
        validate_zeta(self.zeta)?;
        validate_theta(self.theta)?;
        validate_radius(self.t)
    }
}

pub(crate) fn validate_zeta(zeta: f64) -> Result<()> {
    if zeta > 0.0 && zeta <= 1.0 {
        Ok(())
    } else {
        Err(invalid(format!("zeta must lie in (0, 1], got {zeta}")))
    }
}

pub(crate) fn validate_theta(theta: f64) -> Result<()> {
    if theta > 0.0 && theta.is_finite() {
        Ok(())
    } else {
        Err(invalid(format!("theta must be positive, got {theta}")))
    }
}

pub(crate) fn validate_radius(t: f64) -> Result<()> {
    if t > 0.0 && t.is_finite() {
        Ok(())
    } else {
        Err(invalid(format!("radius must be finite and positive, got {t}")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub check: String,
    pub objective: String,
    pub verdict: Verdict,
    /// Configurations actually tested.
    pub samples: usize,
    /// Total violations found; `witnesses` keeps a canonical subset.
    pub violations: usize,
    pub witnesses: Vec<Witness>,
    /// Check-specific parameters (`t`, `zeta`, ...).
    pub params: BTreeMap<String, f64>,
    pub config: VerifyConfig,
    /// Minimizer under which an alignment check passed.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub certified: Option<Vec<f64>>,
    /// Every tested configuration, recorded for enumerated finite domains.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub observations: Vec<Witness>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub diagnostics: Vec<String>,
    pub note: String,
}

impl Report {
    pub(crate) fn new(check: &str, f: &Objective, cfg: &VerifyConfig) -> Self {
        Self {
            check: check.to_string(),
            objective: f.name().to_string(),
            verdict: Verdict::Inconclusive,
            samples: 0,
            violations: 0,
            witnesses: Vec::new(),
            params: BTreeMap::new(),
            config: cfg.clone(),
            certified: None,
            observations: Vec::new(),
            diagnostics: Vec::new(),
            note: PASS_NOTE.to_string(),
        }
    }

    pub(crate) fn param(mut self, key: &str, v: f64) -> Self {
        self.params.insert(key.to_string(), v);
        self
    }

    /// Sorts and trims witnesses, then sets the verdict: any violation
    /// fails; otherwise unresolved configurations make it inconclusive.
    pub(crate) fn finish(mut self, mut witnesses: Vec<Witness>, unresolved: bool) -> Self {
        self.violations = witnesses.len();
        witnesses.sort_by(canonical);
        let mut kept: Vec<Witness> = Vec::new();
        let mut run = 0;
        for w in witnesses {
            let same = kept
                .last()
                .is_some_and(|k| k.kind == w.kind && k.x_star == w.x_star && k.t == w.t);
            run = if same { run + 1 } else { 1 };
            if run <= self.config.max_witnesses {
                kept.push(w);
            }
        }
        self.witnesses = kept;
        self.observations.sort_by(canonical);
        self.verdict = if !self.witnesses.is_empty() {
            Verdict::Fail
        } else if unresolved {
            Verdict::Inconclusive
        } else {
            Verdict::Pass
        };
        self
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }

    pub fn failed(&self) -> bool {
        self.verdict == Verdict::Fail
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub(crate) fn required(&self, key: &str) -> Result<f64> {
        self.params
            .get(key)
            .copied()
            .ok_or_else(|| invalid(format!("report `{}` lacks parameter `{key}`", self.check)))
    }
}

/// Re-runs a report's check on its witnesses only. A reproducible failure
/// yields a `fail` report again.
pub fn replay(f: &Objective, g: &Geometry, report: &Report) -> Result<Report> {
    let mut cfg = report.config.clone();
    let xs: Vec<Vec<f64>> = report.witnesses.iter().map(|w| w.x.clone()).collect();
    cfg.points = Some(xs.clone());
    let star = |w: &Witness| w.x_star.clone();
    match report.check.as_str() {
        "assumption1" => {
            let t = report.required("t")?;
            check_assumption1(f, g, t, None, &cfg)
        }
        "assumption2" => {
            cfg.orbit = 0;
            check_assumption2(f, g, report.required("t")?, &cfg)
        }
        "quasiconvex" | "strict_quasiconvex" => {
            let strict = report.check == "strict_quasiconvex";
            classes::quasiconvex_on(f, strict, &triples(report)?, &cfg)
        }
        "pseudoconvex" => classes::pseudoconvex_on(f, &pairs(report)?, &cfg),
        "quasar" => {
            let x_star = report.witnesses.first().and_then(star);
            check_quasar(f, report.required("zeta")?, x_star.as_deref(), &cfg)
        }
        "aiming" => check_aiming(f, report.required("theta")?, &cfg),
        "uba" => monotonicity::uba_on(f, g, report.required("t")?, &pairs(report)?, &cfg),
        "normal_cone" => {
            let t = report.required("t")?;
            let x = xs.first().ok_or_else(|| invalid("no witness to replay"))?;
            check_normal_cone(f, g, x, t, &cfg)
        }
        "f2_monotonicity" => {
            cfg.orbit = 0;
            check_f2_monotonicity(f, g, report.required("t1")?, report.required("t2")?, &cfg)
        }
        other => Err(invalid(format!("check `{other}` has no witness replay"))),
    }
}

fn pairs(report: &Report) -> Result<Vec<(Vec<f64>, Vec<f64>)>> {
    report
        .witnesses
        .iter()
        .map(|w| {
            w.u.clone()
                .map(|u| (w.x.clone(), u))
                .ok_or_else(|| invalid("pair witness without second point"))
        })
        .collect()
}

type Triple = (Vec<f64>, Vec<f64>, f64);

fn triples(report: &Report) -> Result<Vec<Triple>> {
    report
        .witnesses
        .iter()
        .map(|w| match (&w.u, w.lambda) {
            (Some(u), Some(l)) => Ok((w.x.clone(), u.clone(), l)),
            _ => Err(invalid("triple witness without second point or lambda")),
        })
        .collect()
}

/// Relative scale `max(1, |v|)`.
pub(crate) fn scale(v: f64) -> f64 {
    v.abs().max(1.0)
}

pub(crate) fn euclid_dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::objective::catalog;

    #[test]
    fn class_params_validation() {
        assert!(ClassParams::default().validate().is_ok());
        assert!(ClassParams { zeta: 2.0, ..Default::default() }.validate().is_err());
        assert!(ClassParams { zeta: 0.0, ..Default::default() }.validate().is_err());
        assert!(ClassParams { theta: -1.0, ..Default::default() }.validate().is_err());
        assert!(ClassParams { t: 0.0, ..Default::default() }.validate().is_err());
    }

    #[test]
    fn finish_sorts_trims_and_decides() {
        let f = catalog::sphere(1);
        let cfg = VerifyConfig { max_witnesses: 2, ..Default::default() };
        let ws = vec![
            Witness::at(vec![3.0], 0.0),
            Witness::at(vec![1.0], 0.0),
            Witness::at(vec![2.0], 0.0),
        ];
        let r = Report::new("demo", &f, &cfg).finish(ws, false);
        assert_eq!(r.verdict, Verdict::Fail);
        assert_eq!(r.violations, 3);
        assert_eq!(r.witnesses.iter().map(|w| w.x[0]).collect::<Vec<_>>(), vec![1.0, 2.0]);
        assert_eq!(Report::new("demo", &f, &cfg).finish(vec![], true).verdict, Verdict::Inconclusive);
        assert_eq!(Report::new("demo", &f, &cfg).finish(vec![], false).verdict, Verdict::Pass);
    }

    #[test]
    fn report_json_schema() {
        let f = catalog::sphere(1);
        let cfg = VerifyConfig::default();
        let r = Report::new("demo", &f, &cfg)
            .param("t", 1.0)
            .finish(vec![Witness::at(vec![1.0], 0.5).with_u(vec![0.0]).with_inner(-1.0)], false);
        let v: serde_json::Value = serde_json::from_str(&r.to_json().unwrap()).unwrap();
        for key in ["check", "verdict", "samples", "witnesses", "config"] {
            assert!(v.get(key).is_some(), "{key}");
        }
        assert_eq!(v["verdict"], "fail");
        assert_eq!(v["witnesses"][0]["inner"], -1.0);
        assert!(v["witnesses"][0].get("lambda").is_none());
    }
}
