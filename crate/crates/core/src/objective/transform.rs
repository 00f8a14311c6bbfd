//! Transformations that keep broximal alignment intact: strictly increasing
//! reparametrization of values, `X`-orthogonal affine changes of variables,
//! positive affine maps of values, and patching a closed set to the minimum
//! value.

use std::sync::Arc;

use nalgebra::DMatrix;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::finite::finite_objective;
use super::{points_match, DomainKind, FinitePoint, GradFn, Objective, Window};
use crate::error::{check_dim, invalid, Result};
use crate::geometry::Geometry;

/// Number of ordered value pairs used to spot-check strict monotonicity.
pub const MONOTONE_SPOT_CHECKS: usize = 10_000;
const MONOTONE_SEED: u64 = 0x6d6f_6e6f;

/// Tolerance for `QᵀXQ = X`.
pub const ORTHOGONALITY_TOL: f64 = 1e-9;

fn sample_region(h: &Objective) -> Window {
    if let Some(w) = h.window() {
        return w.clone();
    }
    let center = h
        .minimizers()
        .first()
        .cloned()
        .unwrap_or_else(|| vec![0.0; h.dim()]);
    Window {
        lo: center.iter().map(|c| c - 10.0).collect(),
        hi: center.iter().map(|c| c + 10.0).collect(),
    }
}

/// Finite values of `h` used to spot-check the scalar map.
fn range_samples(h: &Objective, count: usize) -> Vec<f64> {
    let mut values: Vec<f64> = h
        .special_points()
        .map(|p| h.value(p))
        .chain(h.finite_points().into_iter().flatten().map(|p| p.f))
        .filter(|v| v.is_finite())
        .collect();
    if !h.is_finite_domain() {
        let region = sample_region(h);
        let mut rng = ChaCha8Rng::seed_from_u64(MONOTONE_SEED);
        let mut x = vec![0.0; h.dim()];
        let mut attempts = 0;
        while values.len() < count && attempts < 20 * count {
            attempts += 1;
            for (i, xi) in x.iter_mut().enumerate() {
                *xi = rng.random_range(region.lo[i]..region.hi[i]);
            }
            let v = h.value(&x);
            if v.is_finite() {
                values.push(v);
            }
        }
    }
    values
}

/// `f = g ∘ h`, with `f = +∞` wherever `h = +∞`.
///
/// Strict monotonicity of `g` on the range of `h` is spot-checked on
/// sampled ordered value pairs; it is not proven.
pub fn compose_monotone<G>(h: &Objective, g: G) -> Result<Objective>
where
    G: Fn(f64) -> f64 + Send + Sync + 'static,
{
    let values = range_samples(h, 2 * MONOTONE_SPOT_CHECKS);
    let mut rng = ChaCha8Rng::seed_from_u64(MONOTONE_SEED ^ 1);
    let pairs = if values.len() < 2 { 0 } else { MONOTONE_SPOT_CHECKS };
    for k in 0..pairs {
        let (i, j) = if k < values.len() - 1 {
            (k, k + 1)
        } else {
            (
                rng.random_range(0..values.len()),
                rng.random_range(0..values.len()),
            )
        };
        let (a, b) = (values[i].min(values[j]), values[i].max(values[j]));
        let (ga, gb) = (g(a), g(b));
        if !ga.is_finite() || !gb.is_finite() {
            return Err(invalid(format!("g is not finite on the range of h (at {a} or {b})")));
        }
        if (a < b && !(ga < gb)) || (a == b && ga != gb) {
            return Err(invalid(format!(
                "g is not strictly increasing: g({a}) = {ga}, g({b}) = {gb}"
            )));
        }
    }
    for v in &values {
        if !g(*v).is_finite() {
            return Err(invalid(format!("g is not finite on the range of h (at {v})")));
        }
    }

    let g = Arc::new(g);
    let name = format!("compose({})", h.name());
    let mut f = match h.domain() {
        DomainKind::Finite(points) => {
            let mapped = points
                .iter()
                .map(|p| FinitePoint {
                    x: p.x.clone(),
                    f: g(p.f),
                })
                .collect();
            finite_objective(name, h.dim(), mapped)
        }
        DomainKind::Continuous => {
            let inner = h.eval_fn().clone();
            let outer = g.clone();
            let eval = Arc::new(move |x: &[f64]| {
                let v = inner(x);
                if v.is_finite() {
                    outer(v)
                } else {
                    f64::INFINITY
                }
            });
            Objective::from_parts(name, h.dim(), eval, DomainKind::Continuous)
        }
    };
    f.opt_tol = h.opt_tol();
    f.anchors = h.anchors().to_vec();
    f.window = h.window().cloned();
    if let Some(fs) = h.f_star() {
        f = f.with_minimizers(h.minimizers().to_vec(), g(fs))?;
    }
    Ok(f)
}

fn mat_vec(m: &DMatrix<f64>, v: &[f64]) -> Vec<f64> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m[(i, j)] * v[j]).sum())
        .collect()
}

/// `f(y) = h(Q y + b)` for an invertible `Q` with `QᵀXQ = X`.
///
/// Minimizers map to `Q⁻¹(m − b)`; `X`-distances are preserved.
pub fn pullback_orthogonal_affine(
    h: &Objective,
    q_row_major: &[f64],
    b: &[f64],
    geometry: &Geometry,
) -> Result<Objective> {
    let d = h.dim();
    check_dim(d, geometry.dim())?;
    check_dim(d * d, q_row_major.len())?;
    check_dim(d, b.len())?;
    let q = DMatrix::from_row_slice(d, d, q_row_major);
    let x = geometry.matrix_dmatrix();
    let residual = (q.transpose() * &x * &q - &x).amax();
    let scale = x.amax().max(1.0);
    if residual > ORTHOGONALITY_TOL * scale {
        return Err(invalid(format!(
            "Q is not X-orthogonal: max |QᵀXQ − X| = {residual:e}"
        )));
    }
    let q_inv = q
        .clone()
        .try_inverse()
        .ok_or_else(|| invalid("Q is singular"))?;

    let forward = {
        let q = q.clone();
        let b = b.to_vec();
        move |y: &[f64]| -> Vec<f64> {
            let mut z = mat_vec(&q, y);
            z.iter_mut().zip(&b).for_each(|(zi, bi)| *zi += bi);
            z
        }
    };
    let backward = |z: &[f64]| -> Vec<f64> {
        let shifted: Vec<f64> = z.iter().zip(b).map(|(zi, bi)| zi - bi).collect();
        mat_vec(&q_inv, &shifted)
    };

    let name = format!("pullback({})", h.name());
    let mut f = match h.domain() {
        DomainKind::Finite(points) => {
            let mapped = points
                .iter()
                .map(|p| FinitePoint {
                    x: backward(&p.x),
                    f: p.f,
                })
                .collect();
            finite_objective(name, d, mapped)
        }
        DomainKind::Continuous => {
            let inner = h.eval_fn().clone();
            let fwd = forward.clone();
            let eval = Arc::new(move |y: &[f64]| inner(&fwd(y)));
            let grad: Option<GradFn> = h.grad_fn().cloned().map(|hg| {
                let qt = q.transpose();
                let fwd = forward.clone();
                Arc::new(move |y: &[f64]| mat_vec(&qt, &hg(&fwd(y)))) as GradFn
            });
            Objective::from_parts(name, d, eval, DomainKind::Continuous).with_gradient_arc(grad)
        }
    };
    f.opt_tol = h.opt_tol();
    f.anchors = h.anchors().iter().map(|a| backward(a)).collect();
    if let Some(w) = h.window() {
        let mut lo = vec![f64::INFINITY; d];
        let mut hi = vec![f64::NEG_INFINITY; d];
        for mask in 0..(1usize << d) {
            let corner: Vec<f64> = (0..d)
                .map(|i| if mask >> i & 1 == 1 { w.hi[i] } else { w.lo[i] })
                .collect();
            for (i, c) in backward(&corner).into_iter().enumerate() {
                lo[i] = lo[i].min(c);
                hi[i] = hi[i].max(c);
            }
        }
        f.window = Some(Window { lo, hi });
    }
    if let Some(fs) = h.f_star() {
        let mins = h.minimizers().iter().map(|m| backward(m)).collect();
        f = f.with_minimizers(mins, fs)?;
    }
    Ok(f)
}

/// `f = a·g + b` with `a > 0`.
pub fn affine_value(g0: &Objective, a: f64, b: f64) -> Result<Objective> {
    if !(a > 0.0) || !a.is_finite() {
        return Err(invalid(format!("affine scale must be positive, got {a}")));
    }
    if !b.is_finite() {
        return Err(invalid("affine shift must be finite"));
    }
    let name = format!("affine({})", g0.name());
    let mut f = match g0.domain() {
        DomainKind::Finite(points) => {
            let mapped = points
                .iter()
                .map(|p| FinitePoint {
                    x: p.x.clone(),
                    f: a * p.f + b,
                })
                .collect();
            finite_objective(name, g0.dim(), mapped)
        }
        DomainKind::Continuous => {
            let inner = g0.eval_fn().clone();
            let eval = Arc::new(move |x: &[f64]| a * inner(x) + b);
            let grad: Option<GradFn> = g0.grad_fn().cloned().map(|gg| {
                Arc::new(move |x: &[f64]| gg(x).into_iter().map(|v| a * v).collect()) as GradFn
            });
            Objective::from_parts(name, g0.dim(), eval, DomainKind::Continuous)
                .with_gradient_arc(grad)
        }
    };
    f.opt_tol = g0.opt_tol();
    f.anchors = g0.anchors().to_vec();
    f.window = g0.window().cloned();
    if let Some(fs) = g0.f_star() {
        f = f.with_minimizers(g0.minimizers().to_vec(), a * fs + b)?;
    }
    Ok(f)
}

/// Sets `f = min g` on the finite closed set `patch` and `f = g` elsewhere.
/// The minimizer set becomes `𝒳_g ∪ patch`.
pub fn patch_to_min(g0: &Objective, patch: &[Vec<f64>]) -> Result<Objective> {
    if patch.is_empty() {
        return Ok(g0.clone());
    }
    let g_inf = g0.require_f_star()?;
    for c in patch {
        check_dim(g0.dim(), c.len())?;
        let v = g0.value(c);
        if !v.is_finite() {
            return Err(invalid(format!("patch point {c:?} lies outside dom g")));
        }
        if g0.is_optimal_value(v) || g0.minimizers().iter().any(|m| points_match(c, m)) {
            return Err(invalid(format!("patch point {c:?} intersects the minimizer set of g")));
        }
    }
    let name = format!("patch({})", g0.name());
    let mut f = match g0.domain() {
        DomainKind::Finite(points) => {
            for c in patch {
                if !points.iter().any(|p| points_match(c, &p.x)) {
                    return Err(invalid(format!("patch point {c:?} lies outside dom g")));
                }
            }
            let mapped = points
                .iter()
                .map(|p| FinitePoint {
                    x: p.x.clone(),
                    f: if patch.iter().any(|c| points_match(&p.x, c)) {
                        g_inf
                    } else {
                        p.f
                    },
                })
                .collect();
            finite_objective(name, g0.dim(), mapped)
        }
        DomainKind::Continuous => {
            let inner = g0.eval_fn().clone();
            let set = Arc::new(patch.to_vec());
            let eval = Arc::new(move |x: &[f64]| {
                if set.iter().any(|c| points_match(x, c)) {
                    g_inf
                } else {
                    inner(x)
                }
            });
            Objective::from_parts(name, g0.dim(), eval, DomainKind::Continuous)
                .with_gradient_arc(g0.grad_fn().cloned())
        }
    };
    f.opt_tol = g0.opt_tol();
    f.window = g0.window().cloned();
    f.anchors = g0.anchors().iter().chain(patch).cloned().collect();
    let mut mins = g0.minimizers().to_vec();
    mins.extend(patch.iter().cloned());
    f.with_minimizers(mins, g_inf)
}

#[cfg(test)]
mod tests {
    use super::super::catalog;
    use super::super::certify::grid_argmin_set;
    use super::*;
    use crate::geometry::Geometry;

    fn rotation(theta: f64) -> Vec<f64> {
        let (s, c) = theta.sin_cos();
        vec![c, -s, s, c]
    }

    #[test]
    fn compose_exp_on_sphere() {
        let f = compose_monotone(&catalog::sphere(1), f64::exp).unwrap();
        assert_eq!(f.value(&[0.0]), 1.0);
        assert_eq!(f.minimizers(), &[vec![0.0]]);
        assert_eq!(f.f_star(), Some(1.0));
    }

    #[test]
    fn compose_keeps_example1_argmin() {
        let h = catalog::example1();
        let f = compose_monotone(&h, |v| v * v * v + v).unwrap();
        let ah = grid_argmin_set(|x| h.value(&[x]), -30.0, 30.0, 1e-3, 1e-8).unwrap();
        let af = grid_argmin_set(|x| f.value(&[x]), -30.0, 30.0, 1e-3, 1e-8).unwrap();
        assert_eq!(ah, af);
        assert_eq!(f.minimizers(), h.minimizers());
    }

    #[test]
    fn compose_scales_finite_domain() {
        let f = compose_monotone(&catalog::app_d_ex2(), |v| 2.0 * v).unwrap();
        assert_eq!(f.value(&[0.0, 0.0]), 0.0);
        assert_eq!(f.value(&[2.0, 0.0]), 2.0);
        assert_eq!(f.value(&[2.0, 1.0]), 0.2);
        assert!(f.is_finite_domain());
    }

    #[test]
    fn compose_rejects_decreasing_map() {
        assert!(compose_monotone(&catalog::sphere(1), |v| -v).is_err());
        assert!(compose_monotone(&catalog::example1(), |v| v.floor()).is_err());
    }

    #[test]
    fn compose_propagates_infinity() {
        let f = compose_monotone(&catalog::halfline(), f64::exp).unwrap();
        assert_eq!(f.value(&[-1.0]), f64::INFINITY);
    }

    #[test]
    fn pullback_identity_is_identity() {
        let h = catalog::example1();
        let g = Geometry::identity(1);
        let f = pullback_orthogonal_affine(&h, &[1.0], &[0.0], &g).unwrap();
        for x in [-3.0, 0.0, 1.5, 20.0] {
            assert_eq!(f.value(&[x]), h.value(&[x]));
        }
    }

    #[test]
    fn pullback_rotation_fixes_origin() {
        let g = Geometry::identity(2);
        let f = pullback_orthogonal_affine(
            &catalog::sphere(2),
            &rotation(std::f64::consts::FRAC_PI_2),
            &[0.0, 0.0],
            &g,
        )
        .unwrap();
        assert!(f.minimizers()[0].iter().all(|v| v.abs() < 1e-15));
    }

    #[test]
    fn pullback_maps_punctured_quadratic_minimizers() {
        let g = Geometry::identity(2);
        let q = rotation(std::f64::consts::FRAC_PI_4);
        let h = catalog::example2(vec![2.0, 0.0]).unwrap();
        let f = pullback_orthogonal_affine(&h, &q, &[1.0, 0.0], &g).unwrap();
        // Q⁻¹ = Qᵀ for a rotation.
        let inv = |z: [f64; 2]| [q[0] * z[0] + q[2] * z[1], q[1] * z[0] + q[3] * z[1]];
        let expected = [inv([-1.0, 0.0]), inv([1.0, 0.0])];
        assert_eq!(f.minimizers().len(), 2);
        for (m, e) in f.minimizers().iter().zip(expected) {
            assert!((m[0] - e[0]).abs() < 1e-14 && (m[1] - e[1]).abs() < 1e-14);
            assert!(f.value(m).abs() < 1e-15, "{}", f.value(m));
        }
    }

    #[test]
    fn pullback_rejects_non_orthogonal() {
        let g = Geometry::diagonal(&[4.0, 1.0]).unwrap();
        let q = rotation(0.3);
        assert!(pullback_orthogonal_affine(&catalog::sphere(2), &q, &[0.0, 0.0], &g).is_err());
        let g = Geometry::identity(2);
        assert!(pullback_orthogonal_affine(&catalog::sphere(2), &[0.0; 4], &[0.0, 0.0], &g).is_err());
    }

    #[test]
    fn affine_value_cases() {
        let h = catalog::sphere(1);
        let id = affine_value(&h, 1.0, 0.0).unwrap();
        assert_eq!(id.value(&[3.0]), 9.0);
        let f = affine_value(&h, 2.0, -1.0).unwrap();
        assert_eq!(f.f_star(), Some(-1.0));
        assert!(affine_value(&h, 0.0, 1.0).is_err());
        assert!(affine_value(&h, -2.0, 1.0).is_err());

        let e = catalog::example1();
        let f = affine_value(&e, 3.0, 5.0).unwrap();
        let ae = grid_argmin_set(|x| e.value(&[x]), -30.0, 30.0, 1e-3, 1e-8).unwrap();
        let af = grid_argmin_set(|x| f.value(&[x]), -30.0, 30.0, 1e-3, 3e-8).unwrap();
        assert_eq!(ae, af);
    }

    #[test]
    fn patch_adds_minimizers() {
        let f = patch_to_min(&catalog::sphere(2), &[vec![5.0, 5.0]]).unwrap();
        assert_eq!(f.value(&[5.0, 5.0]), 0.0);
        assert_eq!(f.minimizers(), &[vec![0.0, 0.0], vec![5.0, 5.0]]);
        let same = patch_to_min(&catalog::sphere(2), &[]).unwrap();
        assert_eq!(same.value(&[1.0, 1.0]), 2.0);
        assert!(patch_to_min(&catalog::sphere(2), &[vec![0.0, 0.0]]).is_err());
        assert!(patch_to_min(&catalog::halfline(), &[vec![-1.0]]).is_err());
    }

    #[test]
    fn patch_is_lower_semicontinuous_at_patch() {
        let g = catalog::sphere(1);
        let f = patch_to_min(&g, &[vec![3.0]]).unwrap();
        let g_inf = g.f_star().unwrap();
        for k in 1..40 {
            let eps = 2f64.powi(-k);
            assert!(f.value(&[3.0 + eps]) >= g_inf);
            assert!(f.value(&[3.0 - eps]) >= g_inf);
        }
    }
}
