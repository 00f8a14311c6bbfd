//! Broximal oracles: approximate `argmin { f(z) : ‖z − x‖_X ≤ t }`.
//!
//! Every solver returns the ε-optimal set it found together with the point
//! BPM should move to (see [`selection`]).

mod exhaustive;
mod grid;
mod multistart;
pub mod selection;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{check_dim, invalid, BroxError, Result};
use crate::geometry::Geometry;
use crate::objective::Objective;

pub use exhaustive::brox_exhaustive;
pub use grid::brox_grid_1d;
pub use multistart::brox_multistart;

/// Relative value slack of the continuous solvers: `ε = 1e-9 · max(1, |value|)`.
pub const VALUE_EPS_REL: f64 = 1e-9;

/// Candidates closer than `1e-7 · max(1, t)` are treated as one point.
pub const CLUSTER_REL: f64 = 1e-7;

pub const DEFAULT_GRID_N: usize = 1001;
pub const DEFAULT_SAMPLES: usize = 128;
pub const DEFAULT_REFINE: usize = 50;
pub const DEFAULT_SEED: u64 = 0;

/// Outcome of one broximal step.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BroxResult {
    /// ε-optimal points in the ball, sorted lexicographically.
    pub candidates: Vec<Vec<f64>>,
    pub candidate_values: Vec<f64>,
    /// Smallest value found.
    pub value: f64,
    pub selected: Vec<f64>,
    pub selected_value: f64,
    pub epsilon: f64,
    /// Position resolution: points closer than this are not distinguished.
    pub resolution: f64,
    pub evaluations: usize,
}

impl BroxResult {
    /// Whether some candidate other than `x` (beyond the resolution) exists.
    pub fn leaves(&self, g: &Geometry, x: &[f64]) -> bool {
        self.candidates
            .iter()
            .any(|c| g.dist_unchecked(c, x) > self.resolution)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OracleKind {
    /// Exhaustive for finite domains, grid1d in one dimension, multistart otherwise.
    Auto,
    Exhaustive,
    Grid1d,
    Multistart,
}

impl FromStr for OracleKind {
    type Err = BroxError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "auto" => Ok(OracleKind::Auto),
            "exhaustive" => Ok(OracleKind::Exhaustive),
            "grid1d" | "grid" => Ok(OracleKind::Grid1d),
            "multistart" => Ok(OracleKind::Multistart),
            other => Err(invalid(format!(
                "unknown oracle `{other}` (expected auto, exhaustive, grid1d or multistart)"
            ))),
        }
    }
}

impl fmt::Display for OracleKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OracleKind::Auto => "auto",
            OracleKind::Exhaustive => "exhaustive",
            OracleKind::Grid1d => "grid1d",
            OracleKind::Multistart => "multistart",
        })
    }
}

/// Solver selection plus its parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleConfig {
    pub kind: OracleKind,
    pub grid_n: usize,
    pub samples: usize,
    /// Trisection rounds (grid1d) or step halvings (multistart).
    pub refine: usize,
    pub seed: u64,
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self {
            kind: OracleKind::Auto,
            grid_n: DEFAULT_GRID_N,
            samples: DEFAULT_SAMPLES,
            refine: DEFAULT_REFINE,
            seed: DEFAULT_SEED,
        }
    }
}

impl OracleConfig {
    pub fn with_kind(mut self, kind: OracleKind) -> Self {
        self.kind = kind;
        self
    }

    pub fn with_samples(mut self, samples: usize) -> Self {
        self.samples = samples;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.grid_n < 3 {
            return Err(invalid("grid size must be at least 3"));
        }
        if self.samples == 0 {
            return Err(invalid("multistart needs at least one sample"));
        }
        Ok(())
    }

    /// The concrete solver used for `f`.
    pub fn resolve(&self, f: &Objective) -> OracleKind {
        match self.kind {
            OracleKind::Auto if f.is_finite_domain() => OracleKind::Exhaustive,
            OracleKind::Auto if f.dim() == 1 => OracleKind::Grid1d,
            OracleKind::Auto => OracleKind::Multistart,
            k => k,
        }
    }

    pub fn solve(&self, f: &Objective, g: &Geometry, x: &[f64], t: f64) -> Result<BroxResult> {
        self.validate()?;
        match self.resolve(f) {
            OracleKind::Exhaustive => brox_exhaustive(f, g, x, t),
            OracleKind::Grid1d => brox_grid_1d(f, g, x, t, self.grid_n, self.refine),
            _ => brox_multistart(f, g, x, t, self.samples, self.refine, self.seed),
        }
    }
}

pub(crate) fn check_inputs(f: &Objective, g: &Geometry, x: &[f64], t: f64) -> Result<()> {
    check_dim(f.dim(), x.len())?;
    check_dim(f.dim(), g.dim())?;
    if !(t > 0.0) || !t.is_finite() {
        return Err(invalid(format!("radius must be finite and positive, got {t}")));
    }
    if x.iter().any(|v| !v.is_finite()) {
        return Err(invalid(format!("center {x:?} has non-finite coordinates")));
    }
    Ok(())
}

pub(crate) fn continuous_only(f: &Objective, solver: &str) -> Result<()> {
    if f.is_finite_domain() {
        return Err(invalid(format!(
            "{solver} needs a continuous domain; use the exhaustive oracle for `{}`",
            f.name()
        )));
    }
    Ok(())
}

/// Absolute ball-membership slack for a ball of radius `t` around `x`.
pub(crate) fn membership_tol(x: &[f64], t: f64) -> f64 {
    let scale = x.iter().fold(t.max(1.0), |m, v| m.max(v.abs()));
    1e-10 * scale
}

pub(crate) fn value_eps(value: f64) -> f64 {
    VALUE_EPS_REL * value.abs().max(1.0)
}

pub(crate) fn cluster_tol(t: f64) -> f64 {
    CLUSTER_REL * t.max(1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::objective::catalog;

    #[test]
    fn auto_resolution() {
        let cfg = OracleConfig::default();
        assert_eq!(cfg.resolve(&catalog::app_d_ex1()), OracleKind::Exhaustive);
        assert_eq!(cfg.resolve(&catalog::example1()), OracleKind::Grid1d);
        assert_eq!(cfg.resolve(&catalog::sphere(2)), OracleKind::Multistart);
    }

    #[test]
    fn parse_kinds() {
        assert_eq!("GRID1D".parse::<OracleKind>().unwrap(), OracleKind::Grid1d);
        assert!("newton".parse::<OracleKind>().is_err());
    }

    #[test]
    fn rejects_bad_radius_and_config() {
        let f = catalog::sphere(1);
        let g = Geometry::identity(1);
        let cfg = OracleConfig::default();
        assert!(cfg.solve(&f, &g, &[1.0], 0.0).is_err());
        assert!(cfg.solve(&f, &g, &[1.0], f64::NAN).is_err());
        assert!(cfg.solve(&f, &g, &[1.0, 2.0], 1.0).is_err());
        let bad = OracleConfig { grid_n: 2, ..OracleConfig::default() };
        assert!(bad.solve(&f, &g, &[1.0], 1.0).is_err());
        let ex = OracleConfig::default().with_kind(OracleKind::Exhaustive);
        assert!(ex.solve(&f, &g, &[1.0], 1.0).is_err());
    }
}
