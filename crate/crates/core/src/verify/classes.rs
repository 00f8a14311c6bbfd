//! Generalized-convexity classes in the Euclidean geometry.

use super::{euclid_dot, scale, sub, validate_theta, validate_zeta, Report, VerifyConfig, Witness};
use crate::error::{check_dim, invalid, Result};
use crate::objective::{default_fd_step, finite_diff_grad, Objective};

/// Interpolation weights are drawn from `[LAMBDA_LO, 1 − LAMBDA_LO)`.
const LAMBDA_LO: f64 = 0.05;
/// Interpolation weights tested per sampled pair.
const LAMBDAS_PER_PAIR: usize = 4;
/// Partners tested against each declared special point.
const SPECIAL_PARTNERS: usize = 64;
/// Rounding slack of the non-strict quasiconvexity inequality.
const ROUNDING_REL: f64 = 1e-12;
/// Forward and backward difference quotients must agree to this relative
/// accuracy for a point to count as differentiable.
const KINK_REL: f64 = 1e-3;

/// One-sided difference quotients agree in every coordinate.
pub fn differentiable_at(f: &Objective, x: &[f64]) -> bool {
    one_sided(f, x) == Some(true)
}

/// `None` when `f(x)` or the stencil is infinite, otherwise whether the
/// forward and backward quotients agree.
fn one_sided(f: &Objective, x: &[f64]) -> Option<bool> {
    let v0 = f.value(x);
    if !v0.is_finite() {
        return None;
    }
    let h = default_fd_step(x);
    let mut probe = x.to_vec();
    let mut smooth = true;
    for i in 0..x.len() {
        probe[i] = x[i] + h;
        let fp = f.value(&probe);
        probe[i] = x[i] - h;
        let fm = f.value(&probe);
        probe[i] = x[i];
        if !fp.is_finite() || !fm.is_finite() {
            return None;
        }
        let (fwd, bwd) = ((fp - v0) / h, (v0 - fm) / h);
        if (fwd - bwd).abs() > KINK_REL * fwd.abs().max(bwd.abs()).max(1.0) {
            smooth = false;
        }
    }
    Some(smooth)
}

enum Probe {
    Smooth(Vec<f64>),
    Kink,
    Skip,
}

/// The differentiable classes are violated outright at a kink or a jump;
/// points whose stencil leaves the domain are skipped.
fn probe_gradient(f: &Objective, x: &[f64]) -> Probe {
    match one_sided(f, x) {
        Some(true) => f.gradient(x).map_or(Probe::Skip, Probe::Smooth),
        Some(false) => Probe::Kink,
        None => Probe::Skip,
    }
}

fn kink_witness(x: &[f64]) -> Witness {
    Witness::at(x.to_vec(), KINK_REL).with_kind("nondifferentiable")
}

fn in_domain_points(f: &Objective, cfg: &VerifyConfig) -> Vec<Vec<f64>> {
    cfg.sampler()
        .points(f)
        .into_iter()
        .filter(|x| x.len() == f.dim())
        .collect()
}

fn note_skipped(report: &mut Report, skipped: usize) {
    if skipped > 0 {
        report
            .diagnostics
            .push(format!("{skipped} points skipped: outside the domain or at its boundary"));
    }
}

/// `f((1 − λ)x + λy) ≤ max(f(x), f(y))`; with `strict`, `<` by a margin of
/// `strict_margin_rel · max(1, |max|)` for `x ≠ y`.
pub fn check_quasiconvex(f: &Objective, strict: bool, cfg: &VerifyConfig) -> Result<Report> {
    let sampler = cfg.sampler();
    let xs = in_domain_points(f, cfg);
    let ys = sampler.partners(f, xs.len(), 1);
    let lambdas = sampler.scalars(xs.len() * LAMBDAS_PER_PAIR, 2, LAMBDA_LO, 1.0 - LAMBDA_LO);
    let mut triples = Vec::new();
    if f.is_finite_domain() {
        for (i, x) in xs.iter().enumerate() {
            for y in &ys {
                triples.push((x.clone(), y.clone(), lambdas[i]));
            }
        }
    } else {
        for (i, (x, y)) in xs.iter().zip(&ys).enumerate() {
            for l in &lambdas[i * LAMBDAS_PER_PAIR..(i + 1) * LAMBDAS_PER_PAIR] {
                triples.push((x.clone(), y.clone(), *l));
            }
        }
        if cfg.points.is_none() {
            let special: Vec<&Vec<f64>> = f.special_points().collect();
            let mut partners: Vec<&Vec<f64>> = ys.iter().take(SPECIAL_PARTNERS).collect();
            partners.extend(special.iter().copied());
            for (i, s) in special.iter().enumerate() {
                for (j, y) in partners.iter().enumerate() {
                    let l = lambdas[(i * partners.len() + j) % lambdas.len().max(1)];
                    if !lambdas.is_empty() && s != y {
                        triples.push(((*s).clone(), (*y).clone(), l));
                    }
                }
            }
        }
    }
    quasiconvex_on(f, strict, &triples, cfg)
}

pub(crate) fn quasiconvex_on(
    f: &Objective,
    strict: bool,
    triples: &[(Vec<f64>, Vec<f64>, f64)],
    cfg: &VerifyConfig,
) -> Result<Report> {
    let name = if strict { "strict_quasiconvex" } else { "quasiconvex" };
    let mut report = Report::new(name, f, cfg);
    let mut witnesses = Vec::new();
    for (x, y, l) in triples {
        check_dim(f.dim(), x.len())?;
        check_dim(f.dim(), y.len())?;
        let m = f.value(x).max(f.value(y));
        if !m.is_finite() || (strict && x == y) {
            continue;
        }
        report.samples += 1;
        let z: Vec<f64> = x.iter().zip(y).map(|(a, b)| (1.0 - l) * a + l * b).collect();
        let fz = f.value(&z);
        let (bad, margin) = if strict {
            let margin = cfg.strict_margin_rel * scale(m);
            (fz >= m - margin, margin)
        } else {
            let margin = ROUNDING_REL * scale(m);
            (fz > m + margin, margin)
        };
        if bad {
            witnesses.push(Witness::at(x.clone(), margin).with_u(y.clone()).with_lambda(*l));
        }
    }
    let unresolved = report.samples == 0;
    Ok(report.finish(witnesses, unresolved))
}

/// `⟨∇f(x), y − x⟩ ≥ −grad_tol` implies `f(y) ≥ f(x) − grad_tol · max(1, |f(x)|)`.
pub fn check_pseudoconvex(f: &Objective, cfg: &VerifyConfig) -> Result<Report> {
    let xs = in_domain_points(f, cfg);
    let ys = cfg.sampler().partners(f, xs.len(), 1);
    let mut pairs: Vec<(Vec<f64>, Vec<f64>)> = Vec::new();
    if cfg.points.is_none() && !f.is_finite_domain() {
        for s in f.special_points() {
            pairs.extend(ys.iter().take(SPECIAL_PARTNERS).map(|y| (s.clone(), y.clone())));
            pairs.extend(xs.iter().take(SPECIAL_PARTNERS).map(|x| (x.clone(), s.clone())));
        }
    }
    pairs.extend(xs.into_iter().zip(ys));
    pseudoconvex_on(f, &pairs, cfg)
}

pub(crate) fn pseudoconvex_on(
    f: &Objective,
    pairs: &[(Vec<f64>, Vec<f64>)],
    cfg: &VerifyConfig,
) -> Result<Report> {
    let mut report = Report::new("pseudoconvex", f, cfg).param("grad_tol", cfg.grad_tol);
    let mut witnesses = Vec::new();
    let mut skipped = 0;
    for (x, y) in pairs {
        check_dim(f.dim(), x.len())?;
        check_dim(f.dim(), y.len())?;
        let (fx, fy) = (f.value(x), f.value(y));
        let grad = match probe_gradient(f, x) {
            Probe::Smooth(g) => g,
            Probe::Kink => {
                report.samples += 1;
                witnesses.push(kink_witness(x).with_u(y.clone()));
                continue;
            }
            Probe::Skip => {
                skipped += 1;
                continue;
            }
        };
        report.samples += 1;
        let inner = euclid_dot(&grad, &sub(y, x));
        let margin = cfg.grad_tol * scale(fx);
        if inner >= -cfg.grad_tol && fy < fx - margin {
            witnesses.push(Witness::at(x.clone(), margin).with_u(y.clone()).with_inner(inner));
        }
    }
    note_skipped(&mut report, skipped);
    let unresolved = report.samples == 0;
    Ok(report.finish(witnesses, unresolved))
}

/// `f(x) − f⋆ ≤ (1/ζ) ⟨∇f(x), x − x⋆⟩` up to `grad_tol · max(1, f(x) − f⋆)`.
/// `x_star` defaults to the first declared minimizer.
pub fn check_quasar(f: &Objective, zeta: f64, x_star: Option<&[f64]>, cfg: &VerifyConfig) -> Result<Report> {
    validate_zeta(zeta)?;
    let f_star = f.require_f_star()?;
    let x_star = match x_star {
        Some(x) => x.to_vec(),
        None => f
            .minimizers()
            .first()
            .cloned()
            .ok_or_else(|| invalid(format!("`{}` declares no minimizer", f.name())))?,
    };
    check_dim(f.dim(), x_star.len())?;
    let mut report = Report::new("quasar", f, cfg).param("zeta", zeta);
    let mut witnesses = Vec::new();
    let mut skipped = 0;
    for x in in_domain_points(f, cfg) {
        let grad = match probe_gradient(f, &x) {
            Probe::Smooth(g) => g,
            Probe::Kink => {
                report.samples += 1;
                witnesses.push(kink_witness(&x));
                continue;
            }
            Probe::Skip => {
                skipped += 1;
                continue;
            }
        };
        report.samples += 1;
        let gap = f.value(&x) - f_star;
        let inner = euclid_dot(&grad, &sub(&x, &x_star));
        let margin = cfg.grad_tol * scale(gap);
        if gap > inner / zeta + margin {
            witnesses.push(Witness::at(x, margin).with_x_star(x_star.clone()).with_inner(inner));
        }
    }
    note_skipped(&mut report, skipped);
    let unresolved = report.samples == 0;
    Ok(report.finish(witnesses, unresolved))
}

/// `θ f(x) ≤ ⟨∇f(x), x − x̄⟩` for some nearest declared minimizer `x̄`.
/// Requires `f⋆ = 0`.
pub fn check_aiming(f: &Objective, theta: f64, cfg: &VerifyConfig) -> Result<Report> {
    validate_theta(theta)?;
    let f_star = f.require_f_star()?;
    if f_star.abs() > f.opt_tol() {
        return Err(invalid(format!(
            "the aiming condition assumes f⋆ = 0; `{}` has f⋆ = {f_star}",
            f.name()
        )));
    }
    if f.minimizers().is_empty() {
        return Err(invalid(format!("`{}` declares no minimizer", f.name())));
    }
    let mut report = Report::new("aiming", f, cfg).param("theta", theta);
    let mut witnesses = Vec::new();
    let mut skipped = 0;
    for x in in_domain_points(f, cfg) {
        let grad = match probe_gradient(f, &x) {
            Probe::Smooth(g) => g,
            Probe::Kink => {
                report.samples += 1;
                witnesses.push(kink_witness(&x));
                continue;
            }
            Probe::Skip => {
                skipped += 1;
                continue;
            }
        };
        report.samples += 1;
        let dists: Vec<f64> = f
            .minimizers()
            .iter()
            .map(|m| euclid_dot(&sub(&x, m), &sub(&x, m)).sqrt())
            .collect();
        let dmin = dists.iter().cloned().fold(f64::INFINITY, f64::min);
        let fx = f.value(&x);
        let margin = cfg.grad_tol * scale(fx);
        let nearest: Vec<&Vec<f64>> = f
            .minimizers()
            .iter()
            .zip(&dists)
            .filter(|(_, d)| **d <= dmin * (1.0 + 1e-12))
            .map(|(m, _)| m)
            .collect();
        let inners: Vec<f64> = nearest.iter().map(|m| euclid_dot(&grad, &sub(&x, m))).collect();
        if inners.iter().all(|inner| theta * fx > inner + margin) {
            witnesses.push(
                Witness::at(x.clone(), margin)
                    .with_x_star(nearest[0].clone())
                    .with_inner(inners[0]),
            );
        }
    }
    note_skipped(&mut report, skipped);
    let unresolved = report.samples == 0;
    Ok(report.finish(witnesses, unresolved))
}

/// Analytic gradients against central differences: every component within
/// `rel_tol · max(1, |analytic|)`. Points where the objective is not
/// differentiable are skipped.
pub fn check_gradients(f: &Objective, rel_tol: f64, cfg: &VerifyConfig) -> Result<Report> {
    if !f.has_gradient() {
        return Err(invalid(format!("`{}` has no analytic gradient", f.name())));
    }
    let mut report = Report::new("gradients", f, cfg).param("rel_tol", rel_tol);
    let mut witnesses = Vec::new();
    let mut skipped = 0;
    for x in in_domain_points(f, cfg) {
        if !differentiable_at(f, &x) {
            skipped += 1;
            continue;
        }
        let (Some(a), Ok(n)) = (f.analytic_gradient(&x), finite_diff_grad(f, &x, None)) else {
            skipped += 1;
            continue;
        };
        report.samples += 1;
        let worst = a
            .iter()
            .zip(&n)
            .map(|(p, q)| (p - q).abs() / p.abs().max(1.0))
            .fold(0.0, f64::max);
        if worst > rel_tol {
            witnesses.push(Witness::at(x, rel_tol).with_u(n).with_inner(worst));
        }
    }
    note_skipped(&mut report, skipped);
    let unresolved = report.samples == 0;
    Ok(report.finish(witnesses, unresolved))
}
