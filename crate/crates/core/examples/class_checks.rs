//! Sampling-based membership in the classic function classes, set against
//! broximal alignment.

use broxlab::objective::transform::affine_value;
use broxlab::verify::{check_aiming, check_assumption1, check_assumption2, check_pseudoconvex, check_quasar, check_quasiconvex};
use broxlab::{catalog, Geometry, VerifyConfig};

fn main() -> broxlab::Result<()> {
    let cfg = VerifyConfig::default().with_samples(2000);
    for key in ["sphere2", "strictly_quasiconvex_1d", "quasar_demo", "example1", "example2"] {
        let f = catalog::builtin(key)?;
        let g = Geometry::identity(f.dim());
        let sqc = check_quasiconvex(&f, true, &cfg)?.verdict;
        let pc = check_pseudoconvex(&f, &cfg)?.verdict;
        let quasar = check_quasar(&f, 0.5, None, &cfg)?.verdict;
        let shifted = affine_value(&f, 1.0, -f.require_f_star()?)?;
        let aiming = check_aiming(&shifted, 1.0, &cfg)?.verdict;
        let t = if key == "example1" { std::f64::consts::TAU } else { 1.0 };
        let a1 = check_assumption1(&f, &g, t, None, &cfg)?.verdict;
        let a2 = check_assumption2(&f, &g, t, &cfg)?.verdict;
        println!("{:<30} sqc={sqc} pc={pc} quasar={quasar} aiming={aiming} | A1={a1} A2={a2} at t={t:.3}", f.name());
    }
    Ok(())
}
