//! Reduction of evaluated points to the ε-optimal set and the next iterate.
//!
//! The next iterate is the candidate farthest from the center in the X-norm.
//! Distances within a relative `1e-12` count as equal and the
//! lexicographically smallest point wins. Because the center is at distance
//! zero, any other candidate beats it: BPM leaves `x` whenever it can.

use std::cmp::Ordering;

use super::BroxResult;
use crate::error::{BroxError, Result};
use crate::geometry::Geometry;

const DIST_TIE_REL: f64 = 1e-12;

pub fn lex_cmp(a: &[f64], b: &[f64]) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        match x.total_cmp(y) {
            Ordering::Equal => continue,
            o => return o,
        }
    }
    a.len().cmp(&b.len())
}

/// Index of the farthest point from `x`, ties broken lexicographically.
pub fn select_farthest<P: AsRef<[f64]>>(g: &Geometry, x: &[f64], points: &[P]) -> Option<usize> {
    let dists: Vec<f64> = points
        .iter()
        .map(|p| g.dist_unchecked(p.as_ref(), x))
        .collect();
    let dmax = dists.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let cut = dmax - DIST_TIE_REL * dmax.max(1.0);
    (0..points.len())
        .filter(|&i| dists[i] >= cut)
        .min_by(|&i, &j| lex_cmp(points[i].as_ref(), points[j].as_ref()))
}

/// How evaluated points are reduced to candidates.
pub(crate) type Probe<'a> = &'a dyn Fn(&[f64]) -> f64;

pub(crate) struct Reduction<'a> {
    pub eps_of: fn(f64) -> f64,
    /// Points this close to a kept candidate are merged into it.
    pub cluster: f64,
    pub resolution: f64,
    /// Evaluates midpoints: two ε-optimal points whose midpoint is also
    /// ε-optimal belong to the same basin and are merged.
    pub probe: Option<Probe<'a>>,
}

/// Builds a [`BroxResult`] from `(point, value)` pairs that lie in the ball.
/// Each cluster is represented by its best point, farther from `x` first.
pub(crate) fn assemble(
    g: &Geometry,
    x: &[f64],
    evaluated: Vec<(Vec<f64>, f64)>,
    red: &Reduction<'_>,
    evaluations: usize,
) -> Result<BroxResult> {
    let value = evaluated
        .iter()
        .map(|(_, v)| *v)
        .fold(f64::INFINITY, f64::min);
    if !value.is_finite() {
        return Err(BroxError::Infeasible(format!(
            "no point of the ball around {x:?} has a finite value"
        )));
    }
    let epsilon = (red.eps_of)(value);
    let mut pool: Vec<(Vec<f64>, f64, f64)> = evaluated
        .into_iter()
        .filter(|(_, v)| *v <= value + epsilon)
        .map(|(p, v)| {
            let d = g.dist_unchecked(&p, x);
            (p, v, d)
        })
        .collect();
    pool.sort_by(|a, b| {
        a.1.total_cmp(&b.1)
            .then(b.2.total_cmp(&a.2))
            .then_with(|| lex_cmp(&a.0, &b.0))
    });
    let mut evaluations = evaluations;
    let mut kept: Vec<(Vec<f64>, f64)> = Vec::new();
    for (p, v, _) in pool {
        if kept.iter().any(|(q, _)| g.dist_unchecked(&p, q) <= red.cluster) {
            continue;
        }
        let merged = red.probe.is_some_and(|probe| {
            kept.iter().any(|(q, _)| {
                let mid: Vec<f64> = p.iter().zip(q).map(|(a, b)| 0.5 * (a + b)).collect();
                evaluations += 1;
                probe(&mid) <= value + epsilon
            })
        });
        if !merged {
            kept.push((p, v));
        }
    }
    kept.sort_by(|a, b| lex_cmp(&a.0, &b.0));
    let (candidates, candidate_values): (Vec<_>, Vec<_>) = kept.into_iter().unzip();
    let s = select_farthest(g, x, &candidates).expect("candidate set is nonempty");
    Ok(BroxResult {
        selected: candidates[s].clone(),
        selected_value: candidate_values[s],
        candidates,
        candidate_values,
        value,
        epsilon,
        resolution: red.resolution,
        evaluations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn exact() -> Reduction<'static> {
        Reduction { eps_of: |_| 0.0, cluster: 0.0, resolution: 0.0, probe: None }
    }

    #[test]
    fn flat_basin_collapses_to_its_best_point() {
        let g = Geometry::identity(1);
        let f = |p: &[f64]| (p[0] - 0.5).powi(2);
        let pts: Vec<(Vec<f64>, f64)> = [0.5 - 2e-5, 0.5, 0.5 + 3e-5, -0.5]
            .iter()
            .map(|&p| (vec![p], f(&[p])))
            .collect();
        let red = Reduction { eps_of: |_| 1e-9, cluster: 1e-7, resolution: 1e-7, probe: Some(&f) };
        let r = assemble(&g, &[0.0], pts.clone(), &red, 4).unwrap();
        assert_eq!(r.candidates, vec![vec![0.5]]);
        assert_eq!(r.evaluations, 6);
        let apart = Reduction { probe: None, ..red };
        assert_eq!(assemble(&g, &[0.0], pts, &apart, 4).unwrap().candidates.len(), 3);
    }

    #[test]
    fn separated_minima_stay_apart() {
        let g = Geometry::identity(1);
        let f = |p: &[f64]| (p[0] * p[0] - 1.0).powi(2);
        let pts = vec![(vec![-1.0], 0.0), (vec![1.0], 0.0)];
        let red = Reduction { eps_of: |_| 1e-9, cluster: 1e-7, resolution: 1e-7, probe: Some(&f) };
        let r = assemble(&g, &[0.2], pts, &red, 2).unwrap();
        assert_eq!(r.candidates.len(), 2);
        assert_eq!(r.selected, vec![-1.0]);
    }

    #[test]
    fn farthest_then_lexicographic() {
        let g = Geometry::identity(2);
        let pts = vec![vec![1.0, 0.0], vec![0.0, 1.0], vec![0.0, -1.0], vec![0.5, 0.0]];
        assert_eq!(select_farthest(&g, &[0.0, 0.0], &pts), Some(2));
    }

    #[test]
    fn center_loses_to_any_other_candidate() {
        let g = Geometry::identity(1);
        let r = assemble(
            &g,
            &[0.0],
            vec![(vec![0.0], 1.0), (vec![0.3], 1.0), (vec![0.9], 2.0)],
            &exact(),
            3,
        )
        .unwrap();
        assert_eq!(r.candidates, vec![vec![0.0], vec![0.3]]);
        assert_eq!(r.selected, vec![0.3]);
        assert!(r.leaves(&g, &[0.0]));
    }

    #[test]
    fn clustering_keeps_best_representative() {
        let g = Geometry::identity(1);
        let r = assemble(
            &g,
            &[0.0],
            vec![(vec![1.0], 0.5), (vec![1.0 + 1e-9], 0.5 + 1e-12), (vec![-1.0], 0.5)],
            &Reduction { eps_of: |_| 1e-9, cluster: 1e-7, resolution: 1e-7, probe: None },
            3,
        )
        .unwrap();
        assert_eq!(r.candidates, vec![vec![-1.0], vec![1.0]]);
        assert_eq!(r.selected, vec![-1.0]);
    }

    #[test]
    fn all_infinite_is_infeasible() {
        let g = Geometry::identity(1);
        let r = assemble(&g, &[0.0], vec![(vec![0.0], f64::INFINITY)], &exact(), 1);
        assert!(matches!(r, Err(BroxError::Infeasible(_))));
    }
}
