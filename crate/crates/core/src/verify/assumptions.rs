use rayon::prelude::*;

use super::{sub, validate_radius, Report, VerifyConfig, Witness};
use crate::error::{check_dim, invalid, Result};
use crate::geometry::Geometry;
use crate::objective::{points_match, Objective};
use crate::oracle::{brox_exhaustive, BroxResult};

fn common_checks(f: &Objective, g: &Geometry, t: f64) -> Result<()> {
    validate_radius(t)?;
    check_dim(f.dim(), g.dim())
}

/// Order in which minimizers are tried: the requested one first.
fn minimizer_order(f: &Objective, x_star: Option<&[f64]>) -> Result<Vec<Vec<f64>>> {
    if f.minimizers().is_empty() {
        return Err(invalid(format!("`{}` declares no minimizer", f.name())));
    }
    let mut order = Vec::new();
    if let Some(xs) = x_star {
        check_dim(f.dim(), xs.len())?;
        if !f.is_optimal(xs) {
            return Err(invalid(format!("x_star = {xs:?} is not optimal for `{}`", f.name())));
        }
        order.push(xs.to_vec());
    }
    for m in f.minimizers() {
        if !order.iter().any(|o| points_match(o, m)) {
            order.push(m.clone());
        }
    }
    Ok(order)
}

/// `⟨x − u, u − x⋆⟩_X` and the tolerance it is judged with.
pub(crate) fn alignment(g: &Geometry, rel: f64, x: &[f64], u: &[f64], x_star: &[f64]) -> (f64, f64) {
    let a = sub(x, u);
    let b = sub(u, x_star);
    let inner = g.inner_unchecked(&a, &b);
    let tol = rel * g.norm_unchecked(&a) * g.norm_unchecked(&b);
    (inner, tol)
}

/// Broximal alignment at radius `t`: some minimizer `x⋆` satisfies
/// `⟨x − u, u − x⋆⟩_X ≥ 0` for every tested `x` farther than `t` from the
/// minimizer set and every broximal candidate `u` of `x`. All declared
/// minimizers are tried, `x_star` first; the one that works is reported as
/// `certified`.
pub fn check_assumption1(
    f: &Objective,
    g: &Geometry,
    t: f64,
    x_star: Option<&[f64]>,
    cfg: &VerifyConfig,
) -> Result<Report> {
    common_checks(f, g, t)?;
    let order = minimizer_order(f, x_star)?;
    let reach = t * (1.0 + cfg.boundary_margin_rel);
    let far: Vec<Vec<f64>> = cfg
        .sampler()
        .points(f)
        .into_iter()
        .filter(|x| x.len() == f.dim() && f.value(x).is_finite() && !f.is_optimal(x))
        .filter(|x| g.dist_to_set(x, f.minimizers()).is_ok_and(|d| d > reach))
        .collect();
    let steps: Vec<Result<BroxResult>> = far
        .par_iter()
        .map(|x| cfg.oracle.solve(f, g, x, t))
        .collect();

    let mut report = Report::new("assumption1", f, cfg).param("t", t);
    report.samples = far.len();
    let mut unresolved = false;
    for (x, s) in far.iter().zip(&steps) {
        if let Err(e) = s {
            unresolved = true;
            if report.diagnostics.len() < 8 {
                report.diagnostics.push(format!("oracle failed at {x:?}: {e}"));
            }
        }
    }
    if far.is_empty() {
        report
            .diagnostics
            .push(format!("vacuous: no tested point lies farther than t = {t} from the minimizer set"));
    }

    let mut all_witnesses = Vec::new();
    for xs in &order {
        let mut witnesses = Vec::new();
        for (x, s) in far.iter().zip(&steps) {
            let Ok(step) = s else { continue };
            for u in &step.candidates {
                let (inner, tol) = alignment(g, cfg.violation_tol_rel, x, u, xs);
                let w = Witness::at(x.clone(), tol)
                    .with_u(u.clone())
                    .with_x_star(xs.clone())
                    .with_inner(inner)
                    .with_t(t);
                if f.is_finite_domain() {
                    report.observations.push(w.clone());
                }
                if inner < -tol {
                    witnesses.push(w);
                }
            }
        }
        if witnesses.is_empty() {
            report.certified = Some(xs.clone());
            all_witnesses.clear();
            break;
        }
        all_witnesses.extend(witnesses);
    }
    Ok(report.finish(all_witnesses, unresolved))
}

/// No stalling at radius `t`: at every tested non-optimal `x` the oracle
/// finds an ε-optimal point other than `x`. Each sample is followed for
/// `cfg.orbit` further BPM steps so that points on actual trajectories are
/// tested too.
pub fn check_assumption2(f: &Objective, g: &Geometry, t: f64, cfg: &VerifyConfig) -> Result<Report> {
    common_checks(f, g, t)?;
    let starts: Vec<Vec<f64>> = cfg
        .sampler()
        .points(f)
        .into_iter()
        .filter(|x| x.len() == f.dim() && f.value(x).is_finite())
        .collect();
    let outcomes: Vec<(usize, Option<Witness>, Option<String>)> = starts
        .par_iter()
        .map(|x0| {
            let mut cur = x0.clone();
            let mut tested = 0;
            for _ in 0..=cfg.orbit {
                if f.is_optimal(&cur) {
                    break;
                }
                tested += 1;
                match cfg.oracle.solve(f, g, &cur, t) {
                    Err(e) => return (tested, None, Some(format!("oracle failed at {cur:?}: {e}"))),
                    Ok(step) => {
                        if !step.leaves(g, &cur) {
                            let w = Witness::at(cur.clone(), step.resolution)
                                .with_u(step.selected.clone())
                                .with_t(t);
                            return (tested, Some(w), None);
                        }
                        cur = step.selected;
                    }
                }
            }
            (tested, None, None)
        })
        .collect();

    let mut report = Report::new("assumption2", f, cfg).param("t", t);
    let mut witnesses = Vec::new();
    let mut unresolved = false;
    for (n, w, err) in outcomes {
        report.samples += n;
        witnesses.extend(w);
        if let Some(e) = err {
            unresolved = true;
            if report.diagnostics.len() < 8 {
                report.diagnostics.push(e);
            }
        }
    }
    Ok(report.finish(witnesses, unresolved))
}

/// Two-point property on a finite domain: no two distinct non-optimal
/// points are broximal points of each other.
pub fn check_two_point(f: &Objective, g: &Geometry, t: f64, cfg: &VerifyConfig) -> Result<Report> {
    common_checks(f, g, t)?;
    let pts: Vec<Vec<f64>> = f
        .finite_points()
        .ok_or_else(|| invalid("the two-point check enumerates finite domains only"))?
        .iter()
        .map(|p| p.x.clone())
        .collect();
    let prox: Vec<Vec<Vec<f64>>> = pts
        .iter()
        .map(|p| brox_exhaustive(f, g, p, t).map(|r| r.candidates))
        .collect::<Result<_>>()?;
    let mut report = Report::new("two_point", f, cfg).param("t", t);
    let mut witnesses = Vec::new();
    for i in 0..pts.len() {
        for j in (i + 1)..pts.len() {
            report.samples += 1;
            if f.is_optimal(&pts[i]) || f.is_optimal(&pts[j]) {
                continue;
            }
            if prox[i].contains(&pts[j]) && prox[j].contains(&pts[i]) {
                witnesses.push(Witness::at(pts[i].clone(), 0.0).with_u(pts[j].clone()).with_t(t));
            }
        }
    }
    Ok(report.finish(witnesses, false))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::objective::catalog;
    use crate::verify::{replay, Verdict};

    fn id2() -> Geometry {
        Geometry::identity(2)
    }

    #[test]
    fn appendix_d_example1_radius1_passes_with_exact_products() {
        let f = catalog::app_d_ex1();
        let r = check_assumption1(&f, &id2(), 1.0, Some(&[0.0, 0.0]), &VerifyConfig::default()).unwrap();
        assert_eq!(r.verdict, Verdict::Pass);
        let mut inner: Vec<f64> = r.observations.iter().map(|w| w.inner.unwrap()).collect();
        inner.sort_by(f64::total_cmp);
        assert_eq!(inner, vec![0.0, 1.0, 2.0]);
        assert_eq!(r.certified, Some(vec![0.0, 0.0]));
    }

    #[test]
    fn appendix_d_example1_radius2_fails_with_minus_four() {
        let f = catalog::app_d_ex1();
        let r = check_assumption1(&f, &id2(), 2.0, Some(&[0.0, 0.0]), &VerifyConfig::default()).unwrap();
        assert_eq!(r.verdict, Verdict::Fail);
        let w = &r.witnesses[0];
        assert_eq!((w.x.clone(), w.u.clone().unwrap(), w.inner), (vec![3.0, 0.0], vec![3.0, 2.0], Some(-4.0)));
        assert!(replay(&f, &id2(), &r).unwrap().failed());
    }

    #[test]
    fn appendix_d_example2() {
        let f = catalog::app_d_ex2();
        let r = check_assumption1(&f, &id2(), 1.0, None, &VerifyConfig::default()).unwrap();
        assert!(r.failed());
        assert_eq!(r.witnesses[0].inner, Some(-1.0));
        let r = check_assumption1(&f, &id2(), 3.0, None, &VerifyConfig::default()).unwrap();
        assert!(r.passed());
        assert_eq!(r.samples, 0);
    }

    #[test]
    fn punctured_quadratic_aligns() {
        let f = catalog::example2(vec![2.0, 0.0]).unwrap();
        let cfg = VerifyConfig::default().with_samples(300);
        let r = check_assumption1(&f, &id2(), 0.5, None, &cfg).unwrap();
        assert!(r.passed(), "{:?}", r.witnesses);
        assert!(r.samples > 200);
    }

    #[test]
    fn non_optimal_x_star_rejected() {
        let f = catalog::sphere(1);
        let g = Geometry::identity(1);
        assert!(check_assumption1(&f, &g, 1.0, Some(&[1.0]), &VerifyConfig::default()).is_err());
        assert!(check_assumption1(&catalog::cubic(), &g, 1.0, None, &VerifyConfig::default()).is_err());
    }

    #[test]
    fn isolated_local_min_stalls_only_at_small_radius() {
        let f = catalog::isolated_local_min();
        let cfg = VerifyConfig::default().with_samples(200);
        let r = check_assumption2(&f, &id2(), 0.5, &cfg).unwrap();
        assert!(r.failed());
        assert_eq!(r.witnesses[0].x, catalog::ISOLATED_MIN_CENTER.to_vec());
        assert!(replay(&f, &id2(), &r).unwrap().failed());
        assert!(check_assumption2(&f, &id2(), 6.0, &cfg).unwrap().passed());
    }

    #[test]
    fn example1_stall_free_at_two_pi() {
        let f = catalog::example1();
        let cfg = VerifyConfig::default().with_samples(300);
        let r = check_assumption2(&f, &Geometry::identity(1), 2.0 * std::f64::consts::PI, &cfg).unwrap();
        assert!(r.passed(), "{:?}", r.witnesses);
    }

    #[test]
    fn optimal_points_exempt() {
        let f = catalog::sphere(1);
        let cfg = VerifyConfig::default().with_points(vec![vec![0.0]]);
        let r = check_assumption2(&f, &Geometry::identity(1), 1.0, &cfg).unwrap();
        assert_eq!(r.samples, 0);
        assert!(r.passed());
    }

    #[test]
    fn two_point_on_appendix_examples() {
        for f in [catalog::app_d_ex1(), catalog::app_d_ex2()] {
            for t in [1.0, 2.0, 3.0] {
                let r = check_two_point(&f, &id2(), t, &VerifyConfig::default()).unwrap();
                assert!(r.passed(), "{} t={t}", f.name());
            }
        }
    }

    #[test]
    fn two_point_detects_mutual_pair() {
        let f = crate::objective::FiniteDomainObjective::new(vec![
            (vec![0.0], 0.0),
            (vec![5.0], 1.0),
            (vec![6.0], 1.0),
        ])
        .into_objective("pair")
        .unwrap();
        let r = check_two_point(&f, &Geometry::identity(1), 1.0, &VerifyConfig::default()).unwrap();
        assert!(r.failed());
        assert_eq!(r.witnesses[0].x, vec![5.0]);
    }
}
