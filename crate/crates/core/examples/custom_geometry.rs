//! BPM in a non-Euclidean X-norm.

use broxlab::{bpm, catalog, BpmConfig, Geometry, GeometrySpec};

fn main() -> broxlab::Result<()> {
    let f = catalog::sphere(2);
    let g = Geometry::new(2, vec![4.0, 1.0, 1.0, 1.0])?;
    let traj = bpm::run(&f, &g, &[3.0, -4.0], &BpmConfig::new(1.0))?;
    for (x, d) in traj.iterates.iter().zip(&traj.dists) {
        println!("x = [{:>9.5}, {:>9.5}]  dist_X = {:.5}", x[0], x[1], d.unwrap_or(f64::NAN));
    }
    println!("{}", traj.termination);

    let diag = GeometrySpec::from_json(r#"{"dim": 2, "X": [1, 0, 0, 9]}"#)?;
    let u = [1.0, 1.0];
    println!("‖(1,1)‖ under diag(1,9): {}", diag.norm(&u)?);
    Ok(())
}
