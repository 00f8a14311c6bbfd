//! Broximal steps are unchanged by monotone and affine value maps and move
//! with X-orthogonal changes of variable.

use broxlab::objective::transform::{affine_value, compose_monotone, pullback_orthogonal_affine};
use broxlab::{catalog, Geometry, OracleConfig};

fn main() -> broxlab::Result<()> {
    let cfg = OracleConfig::default();
    let g = Geometry::identity(2);
    let h = catalog::quasar_demo();
    let (x, t) = ([2.0, 1.5], 1.0);

    let base = cfg.solve(&h, &g, &x, t)?.selected;
    let exp = compose_monotone(&h, |v| (v / 10.0).exp())?;
    let affine = affine_value(&h, 3.0, -7.0)?;
    println!("h:          {base:?}");
    println!("exp(h/10):  {:?}", cfg.solve(&exp, &g, &x, t)?.selected);
    println!("3h - 7:     {:?}", cfg.solve(&affine, &g, &x, t)?.selected);

    let (c, s) = (0.7f64.cos(), 0.7f64.sin());
    let q = [c, -s, s, c];
    let b = [1.0, -2.0];
    let f = pullback_orthogonal_affine(&h, &q, &b, &g)?;
    // y = Q⁻¹(x − b) steps to Q⁻¹(u − b)
    let y = [c * (x[0] - b[0]) + s * (x[1] - b[1]), -s * (x[0] - b[0]) + c * (x[1] - b[1])];
    let v = cfg.solve(&f, &g, &y, t)?.selected;
    let mapped = [c * v[0] - s * v[1] + b[0], s * v[0] + c * v[1] + b[1]];
    println!("pullback:   {mapped:?}");
    Ok(())
}
