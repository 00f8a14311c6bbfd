//! A user-defined objective with declared minimizers, checked and minimized.

use broxlab::verify::{check_assumption1, check_gradients};
use broxlab::{bpm, BpmConfig, Geometry, Objective, VerifyConfig};

fn main() -> broxlab::Result<()> {
    // two wells, the right one deeper
    let f = Objective::new("double_well", 1, |x| {
        let x = x[0];
        (x * x - 4.0).powi(2) - x
    })
    .with_gradient(|x| vec![4.0 * x[0] * (x[0] * x[0] - 4.0) - 1.0]);
    let x_star = newton(2.0, |x| 4.0 * x * (x * x - 4.0) - 1.0, |x| 12.0 * x * x - 16.0);
    let f_star = f.value(&[x_star]);
    let f = f.with_minimizers(vec![vec![x_star]], f_star)?;

    let g = Geometry::identity(1);
    let cfg = VerifyConfig::default().with_samples(1000);
    println!("gradients: {}", check_gradients(&f, 1e-4, &cfg)?.verdict);
    for t in [1.0, 4.5] {
        let r = check_assumption1(&f, &g, t, None, &cfg)?;
        let traj = bpm::run(&f, &g, &[-3.0], &BpmConfig::new(t).with_max_iters(20))?;
        println!(
            "t={t}: alignment {} ({} violations); BPM from -3 -> {:.6} ({})",
            r.verdict,
            r.violations,
            traj.last()[0],
            traj.termination
        );
    }
    Ok(())
}

fn newton(mut x: f64, f: impl Fn(f64) -> f64, df: impl Fn(f64) -> f64) -> f64 {
    for _ in 0..50 {
        x -= f(x) / df(x);
    }
    x
}
