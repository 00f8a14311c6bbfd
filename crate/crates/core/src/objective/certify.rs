//! Dense-grid certification of one-dimensional global minimizers.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Result of exhaustively scanning `[lo, hi]` with a uniform step.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridCertificate {
    pub argmin: f64,
    pub value: f64,
    pub lo: f64,
    pub hi: f64,
    pub step: f64,
}

fn grid_len(lo: f64, hi: f64, step: f64) -> Result<usize> {
    if !(lo < hi) || !(step > 0.0) || !lo.is_finite() || !hi.is_finite() {
        return Err(invalid(format!("bad grid [{lo}, {hi}] with step {step}")));
    }
    Ok(((hi - lo) / step).floor() as usize + 1)
}

/// Scans `lo + i·step` for every grid index and returns the smallest value.
/// Ties keep the leftmost point.
pub fn dense_grid_argmin<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, step: f64) -> Result<GridCertificate> {
    let n = grid_len(lo, hi, step)?;
    let (mut best_x, mut best_v) = (f64::NAN, f64::INFINITY);
    for i in 0..n {
        let x = lo + i as f64 * step;
        let v = f(x);
        if v < best_v {
            best_v = v;
            best_x = x;
        }
    }
    if !best_v.is_finite() {
        return Err(invalid("objective is +inf on the whole grid"));
    }
    Ok(GridCertificate {
        argmin: best_x,
        value: best_v,
        lo,
        hi,
        step,
    })
}

/// Grid points whose value lies within `value_tol` of the grid minimum.
pub fn grid_argmin_set<F: Fn(f64) -> f64>(
    f: F,
    lo: f64,
    hi: f64,
    step: f64,
    value_tol: f64,
) -> Result<Vec<f64>> {
    let n = grid_len(lo, hi, step)?;
    let mut best = f64::INFINITY;
    let mut set: Vec<(f64, f64)> = Vec::new();
    for i in 0..n {
        let x = lo + i as f64 * step;
        let v = f(x);
        if v < best {
            best = v;
            set.retain(|(_, w)| *w <= best + value_tol);
        }
        if v <= best + value_tol {
            set.push((x, v));
        }
    }
    if !best.is_finite() {
        return Err(invalid("objective is +inf on the whole grid"));
    }
    Ok(set.into_iter().map(|(x, _)| x).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parabola_argmin() {
        let c = dense_grid_argmin(|x| (x - 0.25) * (x - 0.25), -1.0, 1.0, 1e-3).unwrap();
        assert!((c.argmin - 0.25).abs() <= 1e-3);
        assert!(dense_grid_argmin(|x| x, 1.0, 0.0, 0.1).is_err());
        assert!(dense_grid_argmin(|_| f64::INFINITY, 0.0, 1.0, 0.1).is_err());
    }

    #[test]
    fn argmin_set_collects_ties() {
        let set = grid_argmin_set(|x: f64| (x * x - 1.0).powi(2), -2.0, 2.0, 0.5, 1e-12).unwrap();
        assert_eq!(set, vec![-1.0, 1.0]);
    }
}
