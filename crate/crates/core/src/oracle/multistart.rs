use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::selection::{assemble, Reduction};
use super::{check_inputs, cluster_tol, continuous_only, membership_tol, value_eps, BroxResult};
use crate::error::{invalid, Result};
use crate::geometry::Geometry;
use crate::objective::Objective;

/// Number of best sample points polished by pattern search.
const STARTS: usize = 4;
const MIN_STEP: f64 = 1e-13;
/// Accepted moves per step size before the step is halved regardless.
const MOVES_PER_STEP: usize = 64;
/// Whitened points this close to the unit sphere also poll along it.
const SPHERE_TOL: f64 = 1e-12;

const PRIMES: [u8; 54] = [
    2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89,
    97, 101, 103, 107, 109, 113, 127, 131, 137, 139, 149, 151, 157, 163, 167, 173, 179, 181, 191,
    193, 197, 199, 211, 223, 227, 229, 233, 239, 241, 251,
];

/// Radial map of the cube `[-1, 1]^d` onto the unit ball.
fn cube_to_ball(v: &mut [f64]) {
    let n2 = v.iter().map(|a| a * a).sum::<f64>().sqrt();
    if n2 > 0.0 {
        let ninf = v.iter().fold(0.0_f64, |m, a| m.max(a.abs()));
        let s = ninf / n2;
        v.iter_mut().for_each(|a| *a *= s);
    }
}

fn norm(w: &[f64]) -> f64 {
    w.iter().map(|a| a * a).sum::<f64>().sqrt()
}

fn project_unit(w: &mut [f64]) {
    let n = norm(w);
    if n > 1.0 {
        w.iter_mut().for_each(|a| *a /= n);
    }
}

/// Trial points for one coordinate move: the radial projection, and from
/// the sphere also the renormalized point so the search can slide along it.
fn polls(w: &[f64], j: usize, s: f64) -> Vec<Vec<f64>> {
    let mut trial = w.to_vec();
    trial[j] += s;
    let n = norm(&trial);
    let mut out = Vec::with_capacity(2);
    if norm(w) >= 1.0 - SPHERE_TOL && n > 0.0 && n < 1.0 {
        out.push(trial.iter().map(|a| a / n).collect());
    }
    project_unit(&mut trial);
    out.push(trial);
    out
}

/// Shifted Halton points in the unit ball (independent uniform points once
/// the dimension exceeds the available prime bases).
fn ball_samples(d: usize, samples: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let shift: Vec<f64> = (0..d).map(|_| rng.random::<f64>()).collect();
    (1..=samples)
        .map(|k| {
            let mut v: Vec<f64> = (0..d)
                .map(|j| {
                    let u = if d <= PRIMES.len() {
                        (halton::number(PRIMES[j], k) + shift[j]).fract()
                    } else {
                        rng.random::<f64>()
                    };
                    2.0 * u - 1.0
                })
                .collect();
            cube_to_ball(&mut v);
            v
        })
        .collect()
}

/// Broximal step for any dimension: low-discrepancy sampling of the X-ball
/// in whitened coordinates `z = x + t L⁻ᵀ w`, `‖w‖ ≤ 1`, followed by a
/// comparison-only coordinate pattern search from the best samples, with
/// radial projection back onto the ball. The center, the whitened axis
/// points `±eᵢ` and declared special points in the ball are always probed.
/// Deterministic for a fixed seed.
pub fn brox_multistart(
    f: &Objective,
    g: &Geometry,
    x: &[f64],
    t: f64,
    samples: usize,
    refine_iters: usize,
    seed: u64,
) -> Result<BroxResult> {
    check_inputs(f, g, x, t)?;
    continuous_only(f, "multistart")?;
    if samples == 0 {
        return Err(invalid("multistart needs at least one sample"));
    }
    let d = f.dim();
    let to_point = |w: &[f64]| -> Vec<f64> {
        g.unwhiten(w)
            .iter()
            .zip(x)
            .map(|(y, c)| c + t * y)
            .collect()
    };
    let eval_w = |w: &[f64]| f.value(&to_point(w));

    let mut ws: Vec<Vec<f64>> = vec![vec![0.0; d]];
    for i in 0..d {
        for s in [1.0, -1.0] {
            let mut e = vec![0.0; d];
            e[i] = s;
            ws.push(e);
        }
    }
    ws.extend(ball_samples(d, samples, seed));
    let tol = membership_tol(x, t);
    for p in f.special_points() {
        if g.dist_unchecked(p, x) <= t + tol {
            let diff: Vec<f64> = p.iter().zip(x).map(|(a, b)| (a - b) / t).collect();
            let mut w = g.factor_transpose_apply(&diff);
            project_unit(&mut w);
            ws.push(w);
        }
    }
    let mut evaluations = ws.len();
    let mut scored: Vec<(Vec<f64>, f64)> = ws
        .into_iter()
        .map(|w| {
            let v = eval_w(&w);
            (w, v)
        })
        .collect();

    let mut order: Vec<usize> = (0..scored.len()).filter(|&i| scored[i].1.is_finite()).collect();
    order.sort_by(|&a, &b| scored[a].1.total_cmp(&scored[b].1).then(a.cmp(&b)));
    let mut starts: Vec<usize> = Vec::with_capacity(STARTS);
    for i in order {
        if starts.len() == STARTS {
            break;
        }
        let far = starts.iter().all(|&j| {
            scored[i]
                .0
                .iter()
                .zip(&scored[j].0)
                .any(|(a, b)| (a - b).abs() > 1e-9)
        });
        if far {
            starts.push(i);
        }
    }

    let step0 = (2.0 / (samples as f64).powf(1.0 / d as f64)).min(0.5);
    let mut polished = Vec::with_capacity(starts.len());
    for &i in &starts {
        let (mut w, mut v) = scored[i].clone();
        let mut step = step0;
        for _ in 0..refine_iters {
            if step < MIN_STEP {
                break;
            }
            let mut moves = 0;
            let mut improved = true;
            while improved && moves < MOVES_PER_STEP {
                improved = false;
                for j in 0..d {
                    for s in [step, -step] {
                        for trial in polls(&w, j, s) {
                            let tv = eval_w(&trial);
                            evaluations += 1;
                            if tv < v {
                                w = trial;
                                v = tv;
                                improved = true;
                                moves += 1;
                                break;
                            }
                        }
                    }
                }
            }
            step *= 0.5;
        }
        polished.push((w, v));
    }
    scored.extend(polished);

    let evaluated = scored
        .into_iter()
        .map(|(w, v)| (to_point(&w), v))
        .collect();
    let ct = cluster_tol(t);
    let probe = |p: &[f64]| f.value(p);
    let red = Reduction { eps_of: value_eps, cluster: ct, resolution: ct, probe: Some(&probe) };
    assemble(g, x, evaluated, &red, evaluations)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::BroxError;
    use crate::objective::catalog;

    fn step(f: &Objective, g: &Geometry, x: &[f64], t: f64) -> BroxResult {
        brox_multistart(f, g, x, t, 128, 50, 0).unwrap()
    }

    fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
        a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
    }

    #[test]
    fn slides_along_the_boundary_in_three_dimensions() {
        let f = catalog::sphere(3);
        let g = Geometry::identity(3);
        let x = [2.0565573667558112, -2.256519717195824, 0.22696726403007972];
        let n = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        for t in [0.2, 1.0, 2.9] {
            let r = step(&f, &g, &x, t);
            let err = r
                .selected
                .iter()
                .zip(&x)
                .map(|(u, v)| (u - v * (1.0 - t / n)).abs())
                .fold(0.0, f64::max);
            assert!(err < 1e-7, "t = {t}: {err}");
        }
    }

    #[test]
    fn samples_stay_in_unit_ball() {
        for d in [1, 2, 3, 7] {
            for w in ball_samples(d, 200, 3) {
                assert!(w.iter().map(|a| a * a).sum::<f64>() <= 1.0 + 1e-12);
            }
        }
    }

    #[test]
    fn punctured_quadratic_boundary_step() {
        let f = catalog::example2(vec![9.0, 9.0]).unwrap();
        let g = Geometry::identity(2);
        let r = step(&f, &g, &[4.0, 0.0], 1.0);
        assert!(close(&r.selected, &[3.0, 0.0], 1e-6), "{:?}", r.selected);
        assert!((r.value - 9.0).abs() < 1e-9);
    }

    #[test]
    fn punctured_point_in_ball_wins() {
        let a = vec![2.0, 0.0];
        let f = catalog::example2(a.clone()).unwrap();
        let g = Geometry::identity(2);
        let r = step(&f, &g, &[2.5, 0.5], 1.0);
        assert_eq!(r.selected, a);
        assert_eq!(r.value, 0.0);
    }

    #[test]
    fn center_minimizer() {
        let f = catalog::sphere(2);
        let g = Geometry::identity(2);
        let r = step(&f, &g, &[0.0, 0.0], 1.0);
        assert_eq!(r.selected, vec![0.0, 0.0]);
        assert_eq!(r.value, 0.0);
    }

    #[test]
    fn respects_x_norm_ball() {
        let f = catalog::sphere(2);
        let g = Geometry::new(2, vec![2.0, 0.5, 0.5, 1.0]).unwrap();
        let x = [3.0, -2.0];
        let r = step(&f, &g, &x, 1.0);
        for c in &r.candidates {
            assert!(g.dist(c, &x).unwrap() <= 1.0 + 1e-9);
        }
        assert!(r.value < f.value(&x));
    }

    #[test]
    fn deterministic_for_fixed_seed() {
        let f = catalog::quasar_demo();
        let g = Geometry::identity(2);
        let a = brox_multistart(&f, &g, &[2.0, 1.0], 1.5, 64, 30, 11).unwrap();
        let b = brox_multistart(&f, &g, &[2.0, 1.0], 1.5, 64, 30, 11).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn isolated_local_min_stalls() {
        let f = catalog::isolated_local_min();
        let g = Geometry::identity(2);
        let c = catalog::ISOLATED_MIN_CENTER;
        let r = step(&f, &g, &c, 0.5);
        assert!(!r.leaves(&g, &c));
        let r = step(&f, &g, &c, 6.0);
        assert!(r.leaves(&g, &c));
    }

    #[test]
    fn finite_domain_rejected() {
        let f = catalog::app_d_ex1();
        let r = brox_multistart(&f, &Geometry::identity(2), &[0.0, 0.0], 1.0, 8, 5, 0);
        assert!(matches!(r, Err(BroxError::InvalidArgument(_))));
    }
}
