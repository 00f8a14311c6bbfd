use std::fmt;
use std::str::FromStr;

use super::{
    check_aiming, check_assumption1, check_assumption2, check_f1_nonmonotone_witnesses,
    check_f2_monotonicity, check_gradients, check_normal_cone, check_pseudoconvex, check_quasar,
    check_quasiconvex, check_two_point, check_uba, check_uba_monotonicity, Report, VerifyConfig,
};
use crate::error::{invalid, Result};
use crate::geometry::Geometry;
use crate::objective::Objective;

/// Relative tolerance for analytic against finite-difference gradients.
pub const GRADIENT_REL_TOL: f64 = 1e-4;

/// A check addressed by name, as on the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Check {
    Assumption1,
    Assumption2,
    TwoPoint,
    Quasiconvex,
    StrictQuasiconvex,
    Pseudoconvex,
    Quasar,
    Aiming,
    Gradients,
    Uba,
    UbaMonotonicity,
    F2Monotonicity,
    F1Witnesses,
    NormalCone,
}

impl Check {
    pub const ALL: [Check; 14] = [
        Check::Assumption1,
        Check::Assumption2,
        Check::TwoPoint,
        Check::Quasiconvex,
        Check::StrictQuasiconvex,
        Check::Pseudoconvex,
        Check::Quasar,
        Check::Aiming,
        Check::Gradients,
        Check::Uba,
        Check::UbaMonotonicity,
        Check::F2Monotonicity,
        Check::F1Witnesses,
        Check::NormalCone,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Check::Assumption1 => "assumption1",
            Check::Assumption2 => "assumption2",
            Check::TwoPoint => "two_point",
            Check::Quasiconvex => "quasiconvex",
            Check::StrictQuasiconvex => "strict_quasiconvex",
            Check::Pseudoconvex => "pseudoconvex",
            Check::Quasar => "quasar",
            Check::Aiming => "aiming",
            Check::Gradients => "gradients",
            Check::Uba => "uba",
            Check::UbaMonotonicity => "uba_monotonicity",
            Check::F2Monotonicity => "f2_monotonicity",
            Check::F1Witnesses => "f1_nonmonotone_witnesses",
            Check::NormalCone => "normal_cone",
        }
    }

    /// Runs the check. Radius-based checks need `args.t`; the monotonicity
    /// checks also need `args.t2`; `normal_cone` needs `args.x`.
    pub fn run(self, f: &Objective, g: &Geometry, args: &CheckArgs, cfg: &VerifyConfig) -> Result<Report> {
        let t = || args.t.ok_or_else(|| invalid(format!("check `{}` needs --t", self.name())));
        let t2 = || args.t2.ok_or_else(|| invalid(format!("check `{}` needs --t2", self.name())));
        let x_star = args.x_star.as_deref();
        match self {
            Check::Assumption1 => check_assumption1(f, g, t()?, x_star, cfg),
            Check::Assumption2 => check_assumption2(f, g, t()?, cfg),
            Check::TwoPoint => check_two_point(f, g, t()?, cfg),
            Check::Quasiconvex => check_quasiconvex(f, false, cfg),
            Check::StrictQuasiconvex => check_quasiconvex(f, true, cfg),
            Check::Pseudoconvex => check_pseudoconvex(f, cfg),
            Check::Quasar => check_quasar(f, args.zeta, x_star, cfg),
            Check::Aiming => check_aiming(f, args.theta, cfg),
            Check::Gradients => check_gradients(f, GRADIENT_REL_TOL, cfg),
            Check::Uba => check_uba(f, g, t()?, x_star, cfg),
            Check::UbaMonotonicity => check_uba_monotonicity(f, g, t()?, t2()?, cfg),
            Check::F2Monotonicity => check_f2_monotonicity(f, g, t()?, t2()?, cfg),
            Check::F1Witnesses => check_f1_nonmonotone_witnesses(cfg),
            Check::NormalCone => {
                let x = args
                    .x
                    .as_deref()
                    .ok_or_else(|| invalid("check `normal_cone` needs a point (--x0)"))?;
                check_normal_cone(f, g, x, t()?, cfg)
            }
        }
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Check {
    type Err = crate::error::BroxError;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_lowercase().replace('-', "_");
        let alias = match key.as_str() {
            "a1" => "assumption1",
            "a2" => "assumption2",
            "f1_witnesses" => "f1_nonmonotone_witnesses",
            other => other,
        };
        Check::ALL
            .into_iter()
            .find(|c| c.name() == alias)
            .ok_or_else(|| invalid(format!("unknown check `{s}`")))
    }
}

/// Per-check parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckArgs {
    pub t: Option<f64>,
    pub t2: Option<f64>,
    pub zeta: f64,
    pub theta: f64,
    pub x_star: Option<Vec<f64>>,
    pub x: Option<Vec<f64>>,
}

impl Default for CheckArgs {
    fn default() -> Self {
        Self { t: None, t2: None, zeta: 1.0, theta: 1.0, x_star: None, x: None }
    }
}

impl CheckArgs {
    pub fn at(t: f64) -> Self {
        Self { t: Some(t), ..Self::default() }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::objective::catalog;

    #[test]
    fn names_round_trip() {
        for c in Check::ALL {
            assert_eq!(c.name().parse::<Check>().unwrap(), c);
        }
        assert_eq!("A1".parse::<Check>().unwrap(), Check::Assumption1);
        assert!("bogus".parse::<Check>().is_err());
    }

    #[test]
    fn missing_radius_is_an_error() {
        let f = catalog::sphere(1);
        let g = Geometry::identity(1);
        let cfg = VerifyConfig::default().with_samples(10);
        assert!(Check::Assumption1.run(&f, &g, &CheckArgs::default(), &cfg).is_err());
        assert!(Check::Assumption1.run(&f, &g, &CheckArgs::at(1.0), &cfg).unwrap().passed());
    }
}
