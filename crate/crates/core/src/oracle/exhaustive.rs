use super::selection::{assemble, Reduction};
use super::{check_inputs, membership_tol, BroxResult};
use crate::error::{invalid, Result};
use crate::geometry::Geometry;
use crate::objective::Objective;

/// Exact broximal step on a finite domain: enumerate every domain point in
/// the ball. `ε = 0`.
pub fn brox_exhaustive(f: &Objective, g: &Geometry, x: &[f64], t: f64) -> Result<BroxResult> {
    check_inputs(f, g, x, t)?;
    let points = f.finite_points().ok_or_else(|| {
        invalid(format!(
            "the exhaustive oracle needs a finite domain; `{}` is continuous",
            f.name()
        ))
    })?;
    let tol = membership_tol(x, t);
    let inside: Vec<(Vec<f64>, f64)> = points
        .iter()
        .filter(|p| g.dist_unchecked(&p.x, x) <= t + tol)
        .map(|p| (p.x.clone(), p.f))
        .collect();
    let n = inside.len();
    let red = Reduction { eps_of: |_| 0.0, cluster: 0.0, resolution: 0.0, probe: None };
    assemble(g, x, inside, &red, n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::BroxError;
    use crate::objective::catalog;

    fn step(f: &Objective, x: [f64; 2], t: f64) -> BroxResult {
        brox_exhaustive(f, &Geometry::identity(2), &x, t).unwrap()
    }

    #[test]
    fn appendix_d_steps() {
        let ex1 = catalog::app_d_ex1();
        let r = step(&ex1, [2.0, 0.0], 1.0);
        assert_eq!((r.selected.clone(), r.value), (vec![1.0, 0.0], 1.0));
        assert_eq!(r.candidates, vec![vec![1.0, 0.0]]);
        let r = step(&ex1, [3.0, 0.0], 2.0);
        assert_eq!((r.selected, r.value), (vec![3.0, 2.0], 0.5));
        let r = step(&catalog::app_d_ex2(), [2.0, 0.0], 1.0);
        assert_eq!((r.selected, r.value), (vec![2.0, 1.0], 0.1));
        assert_eq!(r.epsilon, 0.0);
    }

    #[test]
    fn empty_ball_is_infeasible() {
        let r = brox_exhaustive(&catalog::app_d_ex1(), &Geometry::identity(2), &[10.0, 10.0], 1.0);
        assert!(matches!(r, Err(BroxError::Infeasible(_))));
    }
}
