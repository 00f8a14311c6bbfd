//! Convergence guarantees checked along a recorded BPM trajectory.

use super::{scale, Report, VerifyConfig, Witness};
use crate::bpm::{kappa_bound, Termination, Trajectory};
use crate::error::{check_dim, invalid, Result};
use crate::geometry::Geometry;
use crate::objective::Objective;

/// Relative slack of distance comparisons.
const DIST_SLACK_REL: f64 = 1e-9;

/// Checks a trajectory against the guarantees that hold when both
/// alignment assumptions hold with minimizer `x_star`:
///
/// * `absorption`: a ball meeting the minimizer set yields an optimal next
///   iterate, a ball missing it does not;
/// * `values_monotone`: `f(x_{k+1}) ≤ f(x_k) + ε_k`;
/// * `distance_monotone`: `‖x_{k+1} − x⋆‖ ≤ ‖x_k − x⋆‖` while `x_k` is
///   farther than `t` from the minimizer set;
/// * `three_step_drop`: for `k ≥ 2` in the same regime,
///   `‖x_{k+1} − x⋆‖² ≤ ‖x_{k−2} − x⋆‖² − t²/3`;
/// * `kappa`: optimality is reached within [`kappa_bound`] steps;
/// * `leaves_nonoptimal`: a non-optimal iterate always moves;
/// * `three_step_separation`: `‖x_k − x_{k+3}‖ > t` while `x_{k+1}` is not
///   optimal.
///
/// Slacks combine a relative `1e-9`, the strictness margin and the oracle
/// resolution; each witness records the slack it was judged with.
pub fn check_trajectory(
    f: &Objective,
    g: &Geometry,
    traj: &Trajectory,
    x_star: &[f64],
    cfg: &VerifyConfig,
) -> Result<Report> {
    check_dim(f.dim(), x_star.len())?;
    check_dim(f.dim(), g.dim())?;
    let f_star = f.require_f_star()?;
    let t = traj.t;
    let xs = &traj.iterates;
    let set_dist: Vec<f64> = traj
        .dists
        .iter()
        .map(|d| d.ok_or_else(|| invalid("trajectory lacks distances to the minimizer set")))
        .collect::<Result<_>>()?;
    let optimal = |k: usize| f.is_optimal_value(traj.values[k]);
    let res = traj
        .brox_records
        .iter()
        .map(|r| r.resolution)
        .fold(0.0, f64::max);
    let eps = |k: usize| traj.epsilons.get(k).copied().unwrap_or(0.0);
    let to_star: Vec<f64> = xs.iter().map(|x| g.dist_unchecked(x, x_star)).collect();
    let far = |k: usize| set_dist[k] > t * (1.0 + cfg.boundary_margin_rel);
    let steps = traj.steps();

    let mut report = Report::new("trajectory", f, cfg)
        .param("t", t)
        .param("resolution", res);
    report.certified = Some(x_star.to_vec());
    let mut witnesses = Vec::new();
    let mut tested = 0;
    let mut flag = |k: usize, kind: &str, measured: f64, margin: f64, other: usize| {
        witnesses.push(
            Witness::at(xs[k].clone(), margin)
                .with_u(xs[other].clone())
                .with_x_star(x_star.to_vec())
                .with_inner(measured)
                .with_t(t)
                .with_kind(kind),
        );
    };

    for k in 0..steps {
        tested += 1;
        if set_dist[k] <= t {
            let bound = f_star + f.opt_tol() + eps(k);
            if traj.values[k + 1] > bound {
                flag(k, "absorption", traj.values[k + 1], bound, k + 1);
            }
        } else if far(k) && traj.values[k + 1] <= f_star {
            flag(k, "absorption", traj.values[k + 1], f_star, k + 1);
        }

        tested += 1;
        if traj.values[k + 1] > traj.values[k] + eps(k) {
            flag(k, "values_monotone", traj.values[k + 1] - traj.values[k], eps(k), k + 1);
        }

        if !optimal(k) {
            tested += 1;
            let moved = g.dist_unchecked(&xs[k], &xs[k + 1]);
            if moved <= res {
                flag(k, "leaves_nonoptimal", moved, res, k + 1);
            }
        }

        if far(k) {
            tested += 1;
            let slack = DIST_SLACK_REL * scale(to_star[k]) + res;
            if to_star[k + 1] > to_star[k] + slack {
                flag(k, "distance_monotone", to_star[k + 1] - to_star[k], slack, k + 1);
            }
            if k >= 2 {
                tested += 1;
                let base = to_star[k - 2];
                let slack = DIST_SLACK_REL * scale(base * base) + 2.0 * res * (base + t);
                let lhs = to_star[k + 1] * to_star[k + 1];
                let rhs = base * base - t * t / 3.0;
                if lhs > rhs + slack {
                    flag(k - 2, "three_step_drop", lhs - rhs, slack, k + 1);
                }
            }
        }

        if k + 3 <= steps && !optimal(k + 1) {
            tested += 1;
            let gap = g.dist_unchecked(&xs[k], &xs[k + 3]);
            let slack = cfg.strict_margin_rel * t + 2.0 * res;
            if gap <= t - slack {
                flag(k, "three_step_separation", gap, slack, k + 3);
            }
        }
    }

    tested += 1;
    let kappa = kappa_bound(g, &xs[0], x_star, t)?;
    report = report.param("kappa_bound", kappa as f64);
    let mut unresolved = false;
    match traj.termination {
        Termination::ReachedOptimum if steps > kappa => {
            flag(0, "kappa", steps as f64, kappa as f64, steps);
        }
        Termination::ReachedOptimum => {}
        Termination::MaxIters if steps >= kappa => {
            flag(0, "kappa", steps as f64, kappa as f64, steps);
        }
        _ => {
            unresolved = true;
            report.diagnostics.push(format!(
                "run ended with {} after {steps} steps; kappa bound {kappa} not decidable",
                traj.termination
            ));
        }
    }
    report.samples = tested;
    Ok(report.finish(witnesses, unresolved))
}
