//! Exact alignment checks on the two five- and three-point domains: one is
//! aligned at t = 1 but not t = 2, the other only at t = 3.

use broxlab::verify::{check_assumption1, check_f1_nonmonotone_witnesses};
use broxlab::{catalog, Geometry, OracleConfig, OracleKind, VerifyConfig};

fn main() -> broxlab::Result<()> {
    let g = Geometry::identity(2);
    let cfg = VerifyConfig::default().with_oracle(OracleConfig::default().with_kind(OracleKind::Exhaustive));

    for (f, t) in [
        (catalog::app_d_ex1(), 1.0),
        (catalog::app_d_ex1(), 2.0),
        (catalog::app_d_ex2(), 1.0),
        (catalog::app_d_ex2(), 3.0),
    ] {
        let r = check_assumption1(&f, &g, t, None, &cfg)?;
        println!("{} t={t}: {} ({} configurations)", f.name(), r.verdict, r.samples);
        for w in &r.observations {
            if let (Some(u), Some(inner)) = (&w.u, w.inner) {
                println!("  x={:?} u={u:?} inner={inner}", w.x);
            }
        }
    }

    let r = check_f1_nonmonotone_witnesses(&cfg)?;
    println!("non-monotonicity of F1 in t: {}", r.verdict);
    Ok(())
}
