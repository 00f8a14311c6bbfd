//! The same broximal step solved by each oracle.

use broxlab::{catalog, Geometry, OracleConfig, OracleKind};

fn main() -> broxlab::Result<()> {
    let g = Geometry::identity(1);
    let f = catalog::example1();
    let x = [10.0];
    let t = 4.0;

    for kind in [OracleKind::Grid1d, OracleKind::Multistart, OracleKind::Auto] {
        let r = OracleConfig::default().with_kind(kind).solve(&f, &g, &x, t)?;
        println!(
            "{kind}: selected {:.9} value {:.9} ({} candidates, {} evaluations)",
            r.selected[0],
            r.selected_value,
            r.candidates.len(),
            r.evaluations
        );
    }

    let f = catalog::quasar_demo();
    let g = Geometry::identity(2);
    let r = OracleConfig::default().with_samples(512).solve(&f, &g, &[3.0, -1.0], 1.5)?;
    println!("quasar_demo: {:?} -> {:.9}", r.selected, r.selected_value);
    Ok(())
}
