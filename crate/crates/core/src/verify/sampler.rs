use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::objective::{Objective, Window};

/// Half-width of the sampling cube when an objective declares no window.
pub const DEFAULT_HALF_WIDTH: f64 = 10.0;

/// Source of test points.
#[derive(Debug, Clone, PartialEq)]
pub enum Sampler {
    /// `n` uniform points in the window (the objective's own window by
    /// default) plus its declared special points. Finite domains are
    /// enumerated instead.
    Uniform {
        n: usize,
        seed: u64,
        window: Option<Window>,
    },
    /// Exactly these points.
    Points(Vec<Vec<f64>>),
}

fn window_of(f: &Objective, window: &Option<Window>) -> Window {
    window
        .clone()
        .or_else(|| f.window().cloned())
        .unwrap_or_else(|| Window::cube(f.dim(), DEFAULT_HALF_WIDTH))
}

fn uniform(window: &Window, n: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            window
                .lo
                .iter()
                .zip(&window.hi)
                .map(|(a, b)| a + (b - a) * rng.random::<f64>())
                .collect()
        })
        .collect()
}

fn stream_seed(seed: u64, stream: u64) -> u64 {
    seed ^ stream.wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

impl Sampler {
    pub fn points(&self, f: &Objective) -> Vec<Vec<f64>> {
        match self {
            Sampler::Points(p) => p.clone(),
            Sampler::Uniform { n, seed, window } => {
                if let Some(pts) = f.finite_points() {
                    return pts.iter().map(|p| p.x.clone()).collect();
                }
                let mut out: Vec<Vec<f64>> = f.special_points().cloned().collect();
                out.extend(uniform(&window_of(f, window), *n, *seed));
                out
            }
        }
    }

    /// An independent stream of `n` partner points (domain points for
    /// finite domains).
    pub fn partners(&self, f: &Objective, n: usize, stream: u64) -> Vec<Vec<f64>> {
        if let Some(pts) = f.finite_points() {
            return pts.iter().map(|p| p.x.clone()).collect();
        }
        let (seed, window) = match self {
            Sampler::Uniform { seed, window, .. } => (*seed, window.clone()),
            Sampler::Points(_) => (0, None),
        };
        uniform(&window_of(f, &window), n, stream_seed(seed, stream))
    }

    /// `n` numbers uniform in `[lo, hi)`.
    pub fn scalars(&self, n: usize, stream: u64, lo: f64, hi: f64) -> Vec<f64> {
        let seed = match self {
            Sampler::Uniform { seed, .. } => *seed,
            Sampler::Points(_) => 0,
        };
        let mut rng = ChaCha8Rng::seed_from_u64(stream_seed(seed, stream));
        (0..n).map(|_| lo + (hi - lo) * rng.random::<f64>()).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::objective::catalog;

    #[test]
    fn uniform_includes_special_points_and_stays_in_window() {
        let f = catalog::isolated_local_min();
        let s = Sampler::Uniform { n: 50, seed: 1, window: None };
        let pts = s.points(&f);
        assert_eq!(pts.len(), 52);
        assert_eq!(pts[1], catalog::ISOLATED_MIN_CENTER.to_vec());
        assert!(pts.iter().all(|p| p.iter().all(|v| v.abs() <= 10.0)));
        assert_eq!(pts, s.points(&f));
        assert_ne!(s.partners(&f, 5, 1), s.partners(&f, 5, 2));
    }

    #[test]
    fn finite_domains_are_enumerated() {
        let f = catalog::app_d_ex1();
        let s = Sampler::Uniform { n: 1000, seed: 1, window: None };
        assert_eq!(s.points(&f).len(), 5);
    }
}
