use super::selection::{assemble, Reduction};
use super::{check_inputs, cluster_tol, continuous_only, membership_tol, value_eps, BroxResult};
use crate::error::{invalid, Result};
use crate::geometry::Geometry;
use crate::objective::Objective;

/// At most this many discrete local minima of the grid are refined.
const MAX_REFINED_MINIMA: usize = 16;

/// One-dimensional broximal step: uniform grid of `n` points over the ball
/// (endpoints included), then `refine_iters` trisection rounds around each
/// discrete local minimum. The center and any declared special points in
/// the ball are evaluated too.
pub fn brox_grid_1d(
    f: &Objective,
    g: &Geometry,
    x: &[f64],
    t: f64,
    n: usize,
    refine_iters: usize,
) -> Result<BroxResult> {
    check_inputs(f, g, x, t)?;
    continuous_only(f, "grid1d")?;
    if f.dim() != 1 {
        return Err(invalid(format!("grid1d needs a 1-D objective, `{}` has dimension {}", f.name(), f.dim())));
    }
    if n < 3 {
        return Err(invalid("grid size must be at least 3"));
    }
    let c = x[0];
    let r = t / g.matrix()[0].sqrt();
    let (lo, hi) = (c - r, c + r);
    let h = (hi - lo) / (n - 1) as f64;
    let eval = |z: f64| f.value(&[z]);

    let grid: Vec<f64> = (0..n)
        .map(|i| if i == n - 1 { hi } else { lo + i as f64 * h })
        .collect();
    let vals: Vec<f64> = grid.iter().map(|&z| eval(z)).collect();
    let mut evaluations = n;
    let mut evaluated: Vec<(Vec<f64>, f64)> = grid.iter().zip(&vals).map(|(&z, &v)| (vec![z], v)).collect();

    let mut minima: Vec<usize> = (1..n - 1)
        .filter(|&i| {
            vals[i].is_finite()
                && vals[i] <= vals[i - 1]
                && vals[i] <= vals[i + 1]
                && (vals[i] < vals[i - 1] || vals[i] < vals[i + 1])
        })
        .collect();
    minima.sort_by(|&a, &b| vals[a].total_cmp(&vals[b]).then(a.cmp(&b)));
    minima.truncate(MAX_REFINED_MINIMA);
    for i in minima {
        let (mut a, mut b) = (grid[i - 1], grid[i + 1]);
        let mut best = (grid[i], vals[i]);
        for _ in 0..refine_iters {
            let m1 = a + (b - a) / 3.0;
            let m2 = b - (b - a) / 3.0;
            let (f1, f2) = (eval(m1), eval(m2));
            evaluations += 2;
            for (m, v) in [(m1, f1), (m2, f2)] {
                if v < best.1 {
                    best = (m, v);
                }
            }
            if f1 < f2 {
                b = m2;
            } else if f2 < f1 {
                a = m1;
            } else {
                a = m1;
                b = m2;
            }
        }
        let mid = 0.5 * (a + b);
        let vm = eval(mid);
        evaluations += 1;
        if vm < best.1 {
            best = (mid, vm);
        }
        evaluated.push((vec![best.0], best.1));
    }

    evaluated.push((vec![c], eval(c)));
    evaluations += 1;
    let tol = membership_tol(x, t);
    for p in f.special_points() {
        if g.dist_unchecked(p, x) <= t + tol {
            evaluated.push((p.clone(), eval(p[0])));
            evaluations += 1;
        }
    }
    let refined = h * (2.0_f64 / 3.0).powi(refine_iters.min(1000) as i32);
    let resolution = refined.max(cluster_tol(t));
    let probe = |p: &[f64]| f.value(p);
    let red = Reduction { eps_of: value_eps, cluster: cluster_tol(t), resolution, probe: Some(&probe) };
    assemble(g, x, evaluated, &red, evaluations)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::BroxError;
    use crate::objective::catalog;

    fn step(f: &Objective, x: f64, t: f64) -> BroxResult {
        brox_grid_1d(f, &Geometry::identity(1), &[x], t, 1001, 50).unwrap()
    }

    #[test]
    fn sphere_boundary_and_interior() {
        let f = catalog::sphere(1);
        let r = step(&f, 5.0, 1.0);
        assert_eq!(r.selected, vec![4.0]);
        assert_eq!(r.value, 16.0);
        let r = step(&f, 0.5, 1.0);
        assert!(r.selected[0].abs() < 1e-9);
        assert!(r.value < 1e-12);
    }

    #[test]
    fn example1_first_step_descends_inside_ball() {
        let f = catalog::example1();
        let t = 2.0 * std::f64::consts::PI;
        let r = step(&f, 20.0, t);
        assert!((r.selected[0] - 20.0).abs() <= t + 1e-12);
        assert!(r.value < f.value(&[20.0]));
    }

    #[test]
    fn geometry_scales_the_interval() {
        let f = catalog::sphere(1);
        let g = Geometry::new(1, vec![4.0]).unwrap();
        let r = brox_grid_1d(&f, &g, &[5.0], 1.0, 1001, 50).unwrap();
        assert_eq!(r.selected, vec![4.5]);
    }

    #[test]
    fn halfline_reaches_the_domain_edge() {
        let f = catalog::halfline();
        let r = step(&f, 0.5, 1.0);
        assert!(r.selected[0] >= 0.0 && r.selected[0] < 1e-9);
    }

    #[test]
    fn infeasible_and_wrong_dimension() {
        let f = catalog::halfline();
        let far = brox_grid_1d(&f, &Geometry::identity(1), &[-50.0], 1.0, 11, 5);
        assert!(matches!(far, Err(BroxError::Infeasible(_))));
        let two = catalog::sphere(2);
        assert!(brox_grid_1d(&two, &Geometry::identity(2), &[0.0, 0.0], 1.0, 11, 5).is_err());
    }

    #[test]
    fn special_points_are_probed() {
        let f = catalog::example2(vec![3.0]).unwrap();
        let r = step(&f, 2.5, 1.0);
        assert_eq!(r.selected, vec![3.0]);
        assert_eq!(r.value, 0.0);
    }
}
