//! BPM on |x| + 10 sin x from x0 = 20 with t = 2π, printed step by step.
//!
//! ```text
//! cargo run --example sin_abs_trajectory
//! ```

use std::f64::consts::TAU;

use broxlab::{bpm, catalog, BpmConfig, Geometry};

fn main() -> broxlab::Result<()> {
    let f = catalog::example1();
    let g = Geometry::identity(1);
    let traj = bpm::run(&f, &g, &[20.0], &BpmConfig::new(TAU))?;

    println!("{:>3} {:>20} {:>20}", "k", "x", "f(x)");
    for (k, (x, v)) in traj.iterates.iter().zip(&traj.values).enumerate() {
        println!("{k:>3} {:>20.12} {v:>20.12}", x[0]);
    }
    println!("{} after {} steps", traj.termination, traj.steps());
    println!("certified minimizer {:.12}", catalog::EXAMPLE1_MINIMIZER);

    let curve = bpm::landscape(&f, -25.0, 25.0, 11)?;
    for (x, v) in curve {
        println!("f({x:>6.1}) = {v:>9.4}");
    }
    Ok(())
}
