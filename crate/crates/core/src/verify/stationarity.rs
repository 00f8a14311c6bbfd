use super::classes::differentiable_at;
use super::{euclid_dot, scale, validate_radius, Report, VerifyConfig, Witness};
use crate::error::{check_dim, Result};
use crate::geometry::Geometry;
use crate::objective::Objective;

/// First-order optimality of the broximal point `u` of `x`: if `u` is
/// interior then `∇f(u) ≈ 0`; on the sphere `‖u − x‖_X = t` the gradient
/// must be a nonnegative multiple of `X(x − u)`, judged by the relative
/// residual of its projection onto that direction.
pub fn check_normal_cone(
    f: &Objective,
    g: &Geometry,
    x: &[f64],
    t: f64,
    cfg: &VerifyConfig,
) -> Result<Report> {
    validate_radius(t)?;
    check_dim(f.dim(), x.len())?;
    check_dim(f.dim(), g.dim())?;
    let mut report = Report::new("normal_cone", f, cfg).param("t", t);
    let step = match cfg.oracle.solve(f, g, x, t) {
        Ok(s) => s,
        Err(e) => {
            report.diagnostics.push(format!("oracle failed at {x:?}: {e}"));
            return Ok(report.finish(Vec::new(), true));
        }
    };
    let u = step.selected;
    if !differentiable_at(f, &u) {
        report.diagnostics.push(format!("not differentiable at the broximal point {u:?}"));
        return Ok(report.finish(Vec::new(), true));
    }
    let grad = f.gradient(&u)?;
    report.samples = 1;
    let gnorm = euclid_dot(&grad, &grad).sqrt();
    let d = g.dist_unchecked(x, &u);
    let grad_tol = cfg.grad_tol * scale(f.value(&u));
    let witness = |kind: &str, measured: f64, margin: f64| {
        Witness::at(x.to_vec(), margin)
            .with_u(u.clone())
            .with_inner(measured)
            .with_t(t)
            .with_kind(kind)
    };
    let mut witnesses = Vec::new();
    if d < t * (1.0 - cfg.boundary_margin_rel) {
        if gnorm > grad_tol {
            witnesses.push(witness("interior", gnorm, grad_tol));
        }
    } else if gnorm > grad_tol {
        let diff: Vec<f64> = x.iter().zip(&u).map(|(a, b)| a - b).collect();
        let v = g.apply(&diff);
        let c = euclid_dot(&grad, &v) / euclid_dot(&v, &v);
        let resid: Vec<f64> = grad.iter().zip(&v).map(|(a, b)| a - c * b).collect();
        let rel = euclid_dot(&resid, &resid).sqrt() / gnorm;
        if rel > cfg.normal_tol {
            witnesses.push(witness("collinearity", rel, cfg.normal_tol));
        }
        if c < -cfg.grad_tol {
            witnesses.push(witness("sign", c, cfg.grad_tol));
        }
    }
    Ok(report.finish(witnesses, false))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::objective::{catalog, Objective};

    fn run(f: &Objective, g: &Geometry, x: &[f64], t: f64) -> Report {
        check_normal_cone(f, g, x, t, &VerifyConfig::default()).unwrap()
    }

    #[test]
    fn sphere_boundary_and_interior() {
        let s1 = catalog::sphere(1);
        assert!(run(&s1, &Geometry::identity(1), &[5.0], 1.0).passed());
        let s2 = catalog::sphere(2);
        assert!(run(&s2, &Geometry::identity(2), &[0.1, -0.2], 3.0).passed());
        let g = Geometry::new(2, vec![3.0, 1.0, 1.0, 2.0]).unwrap();
        assert!(run(&s2, &g, &[3.0, 2.0], 1.0).passed());
    }

    #[test]
    fn example1_boundary_step() {
        let f = catalog::example1();
        let r = run(&f, &Geometry::identity(1), &[10.9], 2.0 * std::f64::consts::PI);
        assert!(r.passed(), "{:?}", r.witnesses);
    }

    #[test]
    fn wrong_direction_is_caught() {
        let f = Objective::new("tilted", 1, |x| x[0]).with_gradient(|_| vec![-1.0]);
        let r = run(&f, &Geometry::identity(1), &[0.0], 1.0);
        assert!(r.failed());
        assert_eq!(r.witnesses[0].kind.as_deref(), Some("sign"));
    }
}
