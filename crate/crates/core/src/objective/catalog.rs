//! Built-in objectives.
//!
//! Every entry carries its declared minimizer set. `example1`'s minimizer
//! was located with a dense grid over `[-30, 30]` at step `1e-6` and then
//! polished on the stationarity condition `10 cos x = 1`; both numbers are
//! frozen here.

use super::certify::GridCertificate;
use super::finite::FiniteDomainObjective;
use super::transform::patch_to_min;
use super::{Objective, Window};
use crate::error::{invalid, BroxError, Result};

/// Global minimizer of `|x| + 10 sin x`.
pub const EXAMPLE1_MINIMIZER: f64 = -1.470_628_905_633_336_8;

/// Certificate from the dense grid scan that located [`EXAMPLE1_MINIMIZER`].
pub fn example1_certificate() -> GridCertificate {
    GridCertificate {
        argmin: -1.470_629_000_000_002_4,
        value: -8.479_245_465_432_818,
        lo: -30.0,
        hi: 30.0,
        step: 1e-6,
    }
}

/// `(key, description)` for every catalog entry.
pub const CATALOG: &[(&str, &str)] = &[
    ("example1_sin_abs", "|x| + 10 sin x; local minima every 2π (alias: example1)"),
    ("example2_punctured_quadratic", "‖x‖² except f(a) = 0; minimizers {0, a}; key example2[:a1,a2,...], default a = (2,0)"),
    ("appD_F1_ex1", "5-point domain in R²: in F₁(1) but not F₁(2)"),
    ("appD_F1_ex2", "3-point domain in R²: in F₁(3) but not F₁(1)"),
    ("sphere", "‖x‖²; keys sphere1, sphere2, sphere:d"),
    ("abs", "|x| in one dimension"),
    ("strictly_quasiconvex_1d", "ln(1 + x²): strictly quasiconvex and pseudoconvex, not quasar convex"),
    ("quasar_demo", "r²(1 + 0.8 sin 3θ) in R²: star convex with non-convex sublevel sets"),
    ("isolated_local_min", "min(‖x‖², ‖x − (6,0)‖² + 1): a strict non-global local minimum"),
    ("halfline", "x on [0, ∞), +∞ elsewhere"),
    ("cubic", "x³; no minimizer, stationary point at 0"),
    ("constant", "f ≡ 1 in one dimension"),
];

fn unwrap(r: Result<Objective>) -> Objective {
    r.expect("catalog entries are internally consistent")
}

pub fn example1() -> Objective {
    let f = Objective::new("example1_sin_abs", 1, |x| x[0].abs() + 10.0 * x[0].sin())
        .with_gradient(|x| {
            let s = if x[0] > 0.0 {
                1.0
            } else if x[0] < 0.0 {
                -1.0
            } else {
                0.0
            };
            vec![s + 10.0 * x[0].cos()]
        });
    let f_star = f.value(&[EXAMPLE1_MINIMIZER]);
    unwrap(
        f.with_minimizers(vec![vec![EXAMPLE1_MINIMIZER]], f_star)
            .and_then(|f| f.with_window(Window::cube(1, 30.0))),
    )
    .with_certificate(example1_certificate())
}

/// `‖x‖²` with the extra minimizer `a ≠ 0` where `f(a) = 0`.
///
/// Built by patching the quadratic at `a`, so `a` is matched within a
/// relative `1e-12` of its coordinates.
pub fn example2(a: Vec<f64>) -> Result<Objective> {
    if a.is_empty() {
        return Err(invalid("example2 needs a point a"));
    }
    if a.iter().all(|v| *v == 0.0) {
        return Err(invalid("example2 needs a ≠ 0"));
    }
    let half = a.iter().fold(10.0_f64, |m, v| m.max(2.0 * v.abs()));
    let base = sphere(a.len()).with_window(Window::cube(a.len(), half))?;
    Ok(patch_to_min(&base, &[a])?.renamed("example2_punctured_quadratic"))
}

pub fn app_d_ex1() -> Objective {
    unwrap(
        FiniteDomainObjective::new(vec![
            (vec![0.0, 0.0], 0.0),
            (vec![1.0, 0.0], 1.0),
            (vec![2.0, 0.0], 2.0),
            (vec![3.0, 0.0], 3.0),
            (vec![3.0, 2.0], 0.5),
        ])
        .into_objective("appD_F1_ex1"),
    )
}

pub fn app_d_ex2() -> Objective {
    unwrap(
        FiniteDomainObjective::new(vec![
            (vec![0.0, 0.0], 0.0),
            (vec![2.0, 0.0], 1.0),
            (vec![2.0, 1.0], 0.1),
        ])
        .into_objective("appD_F1_ex2"),
    )
}

pub fn sphere(dim: usize) -> Objective {
    let f = Objective::new(format!("sphere{dim}"), dim, |x| x.iter().map(|v| v * v).sum())
        .with_gradient(|x| x.iter().map(|v| 2.0 * v).collect());
    unwrap(
        f.with_minimizers(vec![vec![0.0; dim]], 0.0)
            .and_then(|f| f.with_window(Window::cube(dim, 5.0))),
    )
}

pub fn abs_value() -> Objective {
    let f = Objective::new("abs", 1, |x| x[0].abs()).with_gradient(|x| vec![x[0].signum()]);
    unwrap(
        f.with_minimizers(vec![vec![0.0]], 0.0)
            .and_then(|f| f.with_window(Window::cube(1, 10.0))),
    )
}

pub fn log1p_square() -> Objective {
    let f = Objective::new("strictly_quasiconvex_1d", 1, |x| (x[0] * x[0]).ln_1p())
        .with_gradient(|x| vec![2.0 * x[0] / (1.0 + x[0] * x[0])]);
    unwrap(
        f.with_minimizers(vec![vec![0.0]], 0.0)
            .and_then(|f| f.with_window(Window::cube(1, 30.0))),
    )
}

const PETAL: f64 = 0.8;

fn quasar_value(x: &[f64]) -> f64 {
    let r2 = x[0] * x[0] + x[1] * x[1];
    if r2 == 0.0 {
        return 0.0;
    }
    let r = r2.sqrt();
    // r² sin 3θ · r = 3x²y − y³
    r2 + PETAL * (3.0 * x[0] * x[0] * x[1] - x[1].powi(3)) / r
}

fn quasar_grad(x: &[f64]) -> Vec<f64> {
    let (a, b) = (x[0], x[1]);
    let r2 = a * a + b * b;
    if r2 == 0.0 {
        return vec![0.0, 0.0];
    }
    let r = r2.sqrt();
    let r3 = r2 * r;
    let p = 3.0 * a * a * b - b * b * b;
    vec![
        2.0 * a + PETAL * (6.0 * a * b / r - p * a / r3),
        2.0 * b + PETAL * ((3.0 * a * a - 3.0 * b * b) / r - p * b / r3),
    ]
}

/// `r²(1 + 0.8 sin 3θ)`: `⟨∇f(x), x⟩ = 2 f(x)`, so it is star convex and
/// satisfies the aiming inequality with `θ ≤ 2`, yet its sublevel sets are
/// three-petal shapes and not convex.
pub fn quasar_demo() -> Objective {
    let f = Objective::new("quasar_demo", 2, quasar_value).with_gradient(quasar_grad);
    unwrap(
        f.with_minimizers(vec![vec![0.0, 0.0]], 0.0)
            .and_then(|f| f.with_window(Window::cube(2, 5.0))),
    )
}

pub const ISOLATED_MIN_CENTER: [f64; 2] = [6.0, 0.0];

pub fn isolated_local_min() -> Objective {
    let c = ISOLATED_MIN_CENTER;
    let f = Objective::new("isolated_local_min", 2, move |x| {
        let near = (x[0] - c[0]).powi(2) + (x[1] - c[1]).powi(2) + 1.0;
        (x[0] * x[0] + x[1] * x[1]).min(near)
    })
    .with_gradient(move |x| {
        let near = (x[0] - c[0]).powi(2) + (x[1] - c[1]).powi(2) + 1.0;
        if x[0] * x[0] + x[1] * x[1] <= near {
            vec![2.0 * x[0], 2.0 * x[1]]
        } else {
            vec![2.0 * (x[0] - c[0]), 2.0 * (x[1] - c[1])]
        }
    });
    unwrap(
        f.with_minimizers(vec![vec![0.0, 0.0]], 0.0)
            .and_then(|f| f.with_anchors(vec![c.to_vec()]))
            .and_then(|f| f.with_window(Window::cube(2, 10.0))),
    )
}

pub fn halfline() -> Objective {
    let f = Objective::new("halfline", 1, |x| if x[0] >= 0.0 { x[0] } else { f64::INFINITY })
        .with_gradient(|_| vec![1.0]);
    unwrap(
        f.with_minimizers(vec![vec![0.0]], 0.0)
            .and_then(|f| f.with_window(Window::new(vec![-5.0], vec![20.0])?)),
    )
}

/// `x³`. Unbounded below, so no minimizer is declared; the stationary
/// point `0` is an anchor.
pub fn cubic() -> Objective {
    unwrap(
        Objective::new("cubic", 1, |x| x[0].powi(3))
            .with_gradient(|x| vec![3.0 * x[0] * x[0]])
            .with_anchors(vec![vec![0.0]])
            .and_then(|f| f.with_window(Window::cube(1, 2.0))),
    )
}

pub fn constant(dim: usize, c: f64) -> Objective {
    unwrap(
        Objective::new("constant", dim, move |_| c)
            .with_gradient(move |_| vec![0.0; dim])
            .with_minimizers(vec![vec![0.0; dim]], c)
            .and_then(|f| f.with_window(Window::cube(dim, 5.0))),
    )
}

fn parse_list(args: &str) -> Result<Vec<f64>> {
    args.split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| invalid(format!("cannot parse `{s}` as a number")))
        })
        .collect()
}

/// Resolves a catalog key such as `example1`, `sphere2`, `sphere:3`,
/// `example2:9,9` or `appD_F1_ex1`.
pub fn builtin(key: &str) -> Result<Objective> {
    let key = key.trim();
    let (name, args) = if let Some((n, a)) = key.split_once(':') {
        (n, Some(a))
    } else if let (Some(open), true) = (key.find('('), key.ends_with(')')) {
        (&key[..open], Some(&key[open + 1..key.len() - 1]))
    } else {
        (key, None)
    };
    let name = name.to_ascii_lowercase();
    match (name.as_str(), args) {
        ("example1" | "example1_sin_abs", None) => Ok(example1()),
        ("example2" | "example2_punctured_quadratic", None) => example2(vec![2.0, 0.0]),
        ("example2" | "example2_punctured_quadratic", Some(a)) => example2(parse_list(a)?),
        ("appd_f1_ex1", None) => Ok(app_d_ex1()),
        ("appd_f1_ex2", None) => Ok(app_d_ex2()),
        ("sphere", Some(d)) => {
            let d: usize = d
                .trim()
                .parse()
                .map_err(|_| invalid(format!("bad sphere dimension `{d}`")))?;
            if d == 0 {
                return Err(invalid("sphere dimension must be positive"));
            }
            Ok(sphere(d))
        }
        (s, None) if s.starts_with("sphere") && s.len() > 6 => builtin(&format!("sphere:{}", &s[6..])),
        ("abs", None) => Ok(abs_value()),
        ("strictly_quasiconvex_1d" | "log1p_square", None) => Ok(log1p_square()),
        ("quasar_demo", None) => Ok(quasar_demo()),
        ("isolated_local_min", None) => Ok(isolated_local_min()),
        ("halfline", None) => Ok(halfline()),
        ("cubic", None) => Ok(cubic()),
        ("constant", None) => Ok(constant(1, 1.0)),
        _ => Err(BroxError::Catalog(key.to_string())),
    }
}
