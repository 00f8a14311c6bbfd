//! Objectives whose domain is a finite list of points.
//!
//! JSON form: `{"points": [{"x": [0, 0], "f": 0.0}, ...]}`.

use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{points_match, DomainKind, Objective};
use crate::error::{check_dim, invalid, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FinitePoint {
    pub x: Vec<f64>,
    pub f: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FiniteDomainObjective {
    pub points: Vec<FinitePoint>,
}

impl FiniteDomainObjective {
    pub fn new(points: Vec<(Vec<f64>, f64)>) -> Self {
        Self {
            points: points.into_iter().map(|(x, f)| FinitePoint { x, f }).collect(),
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<usize> {
        let first = self
            .points
            .first()
            .ok_or_else(|| invalid("finite domain must contain at least one point"))?;
        let dim = first.x.len();
        if dim == 0 {
            return Err(invalid("finite-domain points must have positive dimension"));
        }
        for (i, p) in self.points.iter().enumerate() {
            check_dim(dim, p.x.len())?;
            if !p.f.is_finite() {
                return Err(invalid(format!("value at point {:?} is not finite", p.x)));
            }
            if p.x.iter().any(|v| !v.is_finite()) {
                return Err(invalid(format!("point {:?} has non-finite coordinates", p.x)));
            }
            if self.points[..i].iter().any(|q| q.x == p.x) {
                return Err(invalid(format!("duplicate domain point {:?}", p.x)));
            }
        }
        Ok(dim)
    }

    /// Builds the objective: `+∞` off the listed points, minimizers are all
    /// points attaining the smallest listed value.
    pub fn into_objective(self, name: impl Into<String>) -> Result<Objective> {
        let dim = self.validate()?;
        let f_star = self
            .points
            .iter()
            .map(|p| p.f)
            .fold(f64::INFINITY, f64::min);
        let minimizers: Vec<Vec<f64>> = self
            .points
            .iter()
            .filter(|p| p.f == f_star)
            .map(|p| p.x.clone())
            .collect();
        finite_objective(name.into(), dim, self.points)
            .with_opt_tol(0.0)
            .with_minimizers(minimizers, f_star)
    }
}

pub(crate) fn finite_objective(name: String, dim: usize, points: Vec<FinitePoint>) -> Objective {
    let table = Arc::new(points.clone());
    let eval = Arc::new(move |x: &[f64]| {
        table
            .iter()
            .find(|p| points_match(x, &p.x))
            .map_or(f64::INFINITY, |p| p.f)
    });
    Objective::from_parts(name, dim, eval, DomainKind::Finite(points))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_load_and_eval() {
        let text = r#"{"points": [{"x": [0, 0], "f": 0}, {"x": [2, 0], "f": 1}, {"x": [2, 1], "f": 0.1}]}"#;
        let f = FiniteDomainObjective::from_json(text)
            .unwrap()
            .into_objective("json")
            .unwrap();
        assert_eq!(f.value(&[2.0, 1.0]), 0.1);
        assert_eq!(f.value(&[1.0, 1.0]), f64::INFINITY);
        assert_eq!(f.minimizers(), &[vec![0.0, 0.0]]);
        assert_eq!(f.f_star(), Some(0.0));
    }

    #[test]
    fn rejects_duplicates_and_infinite_values() {
        let dup = FiniteDomainObjective::new(vec![(vec![0.0], 1.0), (vec![0.0], 2.0)]);
        assert!(dup.into_objective("d").is_err());
        let inf = FiniteDomainObjective::new(vec![(vec![0.0], f64::INFINITY)]);
        assert!(inf.into_objective("i").is_err());
        let empty = FiniteDomainObjective { points: vec![] };
        assert!(empty.into_objective("e").is_err());
        let ragged = FiniteDomainObjective::new(vec![(vec![0.0], 1.0), (vec![0.0, 1.0], 2.0)]);
        assert!(ragged.into_objective("r").is_err());
    }
}
