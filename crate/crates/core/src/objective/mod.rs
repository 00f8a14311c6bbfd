//! Extended-real objectives with declared minimizer metadata.
//!
//! An [`Objective`] wraps a pure evaluation closure together with what is
//! known about its global minimizers. Optimality is decided by value
//! (`f(x) ≤ f⋆ + opt_tol`), which works uniformly for disconnected
//! minimizer sets.

pub mod catalog;
pub mod certify;
pub mod finite;
pub mod transform;

use std::cmp::Ordering;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{check_dim, invalid, BroxError, Result};

pub use finite::{FiniteDomainObjective, FinitePoint};

pub type EvalFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;
pub type GradFn = Arc<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>;

/// Default value tolerance for membership in the minimizer set.
pub const DEFAULT_OPT_TOL: f64 = 1e-8;

/// Relative tolerance used when matching a query point against an isolated
/// point (finite domains, patched points).
pub const POINT_MATCH_TOL: f64 = 1e-12;

/// A value in `R ∪ {+∞}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum ExtReal {
    Finite(f64),
    PosInf,
}

impl ExtReal {
    /// `+∞` and NaN both map to [`ExtReal::PosInf`]: a NaN value is treated
    /// as outside the domain.
    pub fn from_f64(v: f64) -> Self {
        if v.is_finite() {
            ExtReal::Finite(v)
        } else if v == f64::NEG_INFINITY {
            ExtReal::Finite(f64::MIN)
        } else {
            ExtReal::PosInf
        }
    }

    pub fn to_f64(self) -> f64 {
        match self {
            ExtReal::Finite(v) => v,
            ExtReal::PosInf => f64::INFINITY,
        }
    }

    pub fn finite(self) -> Option<f64> {
        match self {
            ExtReal::Finite(v) => Some(v),
            ExtReal::PosInf => None,
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, ExtReal::Finite(_))
    }

    /// `min` with `+∞` as the neutral element.
    pub fn min(self, other: Self) -> Self {
        match (self, other) {
            (ExtReal::Finite(a), ExtReal::Finite(b)) => ExtReal::Finite(a.min(b)),
            (ExtReal::Finite(a), ExtReal::PosInf) | (ExtReal::PosInf, ExtReal::Finite(a)) => {
                ExtReal::Finite(a)
            }
            _ => ExtReal::PosInf,
        }
    }
}

impl PartialOrd for ExtReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match (self, other) {
            (ExtReal::Finite(a), ExtReal::Finite(b)) => a.partial_cmp(b),
            (ExtReal::Finite(_), ExtReal::PosInf) => Some(Ordering::Less),
            (ExtReal::PosInf, ExtReal::Finite(_)) => Some(Ordering::Greater),
            (ExtReal::PosInf, ExtReal::PosInf) => Some(Ordering::Equal),
        }
    }
}

impl fmt::Display for ExtReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtReal::Finite(v) => write!(f, "{v}"),
            ExtReal::PosInf => write!(f, "+inf"),
        }
    }
}

/// Continuous objectives are searched by sampling; finite ones are
/// enumerated.
#[derive(Debug, Clone, PartialEq)]
pub enum DomainKind {
    Continuous,
    Finite(Vec<FinitePoint>),
}

/// Axis-aligned box used as the default sampling and plotting window.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Window {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl Window {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        check_dim(lo.len(), hi.len())?;
        if lo.iter().zip(&hi).any(|(a, b)| !(a < b)) {
            return Err(invalid("window needs lo < hi in every coordinate"));
        }
        Ok(Self { lo, hi })
    }

    pub fn cube(dim: usize, half_width: f64) -> Self {
        Self {
            lo: vec![-half_width; dim],
            hi: vec![half_width; dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }
}

/// Extended-real-valued objective `f: R^d → R ∪ {+∞}`.
///
/// Cloning is cheap; the closures are shared. Evaluation must be pure.
#[derive(Clone)]
pub struct Objective {
    name: String,
    dim: usize,
    eval: EvalFn,
    grad: Option<GradFn>,
    minimizers: Vec<Vec<f64>>,
    f_star: Option<f64>,
    opt_tol: f64,
    domain: DomainKind,
    anchors: Vec<Vec<f64>>,
    window: Option<Window>,
    certificate: Option<certify::GridCertificate>,
}

impl fmt::Debug for Objective {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Objective")
            .field("name", &self.name)
            .field("dim", &self.dim)
            .field("has_grad", &self.grad.is_some())
            .field("minimizers", &self.minimizers)
            .field("f_star", &self.f_star)
            .field("opt_tol", &self.opt_tol)
            .field("finite_domain", &matches!(self.domain, DomainKind::Finite(_)))
            .finish()
    }
}

impl Objective {
    /// A continuous objective with no minimizer metadata yet.
    pub fn new<F>(name: impl Into<String>, dim: usize, eval: F) -> Self
    where
        F: Fn(&[f64]) -> f64 + Send + Sync + 'static,
    {
        assert!(dim > 0, "objective dimension must be positive");
        Self {
            name: name.into(),
            dim,
            eval: Arc::new(eval),
            grad: None,
            minimizers: Vec::new(),
            f_star: None,
            opt_tol: DEFAULT_OPT_TOL,
            domain: DomainKind::Continuous,
            anchors: Vec::new(),
            window: None,
            certificate: None,
        }
    }

    pub(crate) fn from_parts(name: String, dim: usize, eval: EvalFn, domain: DomainKind) -> Self {
        Self {
            name,
            dim,
            eval,
            grad: None,
            minimizers: Vec::new(),
            f_star: None,
            opt_tol: DEFAULT_OPT_TOL,
            domain,
            anchors: Vec::new(),
            window: None,
            certificate: None,
        }
    }

    pub fn with_gradient<G>(mut self, grad: G) -> Self
    where
        G: Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static,
    {
        self.grad = Some(Arc::new(grad));
        self
    }

    pub(crate) fn with_gradient_arc(mut self, grad: Option<GradFn>) -> Self {
        self.grad = grad;
        self
    }

    pub fn with_opt_tol(mut self, tol: f64) -> Self {
        self.opt_tol = tol;
        self
    }

    /// Declares the global minimizers and optimal value, validating that the
    /// objective is proper on them and that each declared point attains `f⋆`
    /// within `opt_tol`.
    pub fn with_minimizers(mut self, points: Vec<Vec<f64>>, f_star: f64) -> Result<Self> {
        if !f_star.is_finite() {
            return Err(invalid("f_star must be finite"));
        }
        for p in &points {
            check_dim(self.dim, p.len())?;
            let v = (self.eval)(p);
            if !v.is_finite() {
                return Err(invalid(format!(
                    "declared minimizer {p:?} is outside the domain of `{}`",
                    self.name
                )));
            }
            if (v - f_star).abs() > self.opt_tol {
                return Err(invalid(format!(
                    "declared minimizer {p:?} of `{}` has value {v}, expected f_star = {f_star}",
                    self.name
                )));
            }
        }
        self.minimizers = points;
        self.f_star = Some(f_star);
        Ok(self)
    }

    /// Extra points every oracle evaluates in addition to its own search.
    /// Used for isolated features (patched points, punctures) that sampling
    /// cannot hit.
    pub fn with_anchors(mut self, anchors: Vec<Vec<f64>>) -> Result<Self> {
        for a in &anchors {
            check_dim(self.dim, a.len())?;
        }
        self.anchors = anchors;
        Ok(self)
    }

    pub fn with_window(mut self, window: Window) -> Result<Self> {
        check_dim(self.dim, window.dim())?;
        self.window = Some(window);
        Ok(self)
    }

    pub fn with_certificate(mut self, cert: certify::GridCertificate) -> Self {
        self.certificate = Some(cert);
        self
    }

    pub fn renamed(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn f_star(&self) -> Option<f64> {
        self.f_star
    }

    pub fn require_f_star(&self) -> Result<f64> {
        self.f_star.ok_or_else(|| {
            invalid(format!("objective `{}` has no declared optimal value", self.name))
        })
    }

    pub fn opt_tol(&self) -> f64 {
        self.opt_tol
    }

    pub fn minimizers(&self) -> &[Vec<f64>] {
        &self.minimizers
    }

    pub fn anchors(&self) -> &[Vec<f64>] {
        &self.anchors
    }

    pub fn window(&self) -> Option<&Window> {
        self.window.as_ref()
    }

    pub fn certificate(&self) -> Option<&certify::GridCertificate> {
        self.certificate.as_ref()
    }

    pub fn domain(&self) -> &DomainKind {
        &self.domain
    }

    pub fn is_finite_domain(&self) -> bool {
        matches!(self.domain, DomainKind::Finite(_))
    }

    pub fn finite_points(&self) -> Option<&[FinitePoint]> {
        match &self.domain {
            DomainKind::Finite(p) => Some(p),
            DomainKind::Continuous => None,
        }
    }

    pub fn has_gradient(&self) -> bool {
        self.grad.is_some()
    }

    pub(crate) fn eval_fn(&self) -> &EvalFn {
        &self.eval
    }

    pub(crate) fn grad_fn(&self) -> Option<&GradFn> {
        self.grad.as_ref()
    }

    /// Raw evaluation; `+∞` outside the domain.
    #[inline]
    pub fn value(&self, x: &[f64]) -> f64 {
        debug_assert_eq!(x.len(), self.dim);
        let v = (self.eval)(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    }

    pub fn eval(&self, x: &[f64]) -> ExtReal {
        ExtReal::from_f64(self.value(x))
    }

    pub fn try_eval(&self, x: &[f64]) -> Result<ExtReal> {
        check_dim(self.dim, x.len())?;
        Ok(self.eval(x))
    }

    /// `f(x) ≤ f⋆ + opt_tol`. False when no optimal value is declared.
    pub fn is_optimal(&self, x: &[f64]) -> bool {
        match self.f_star {
            Some(fs) => self.value(x) <= fs + self.opt_tol,
            None => false,
        }
    }

    pub fn is_optimal_value(&self, v: f64) -> bool {
        self.f_star.is_some_and(|fs| v <= fs + self.opt_tol)
    }

    pub fn analytic_gradient(&self, x: &[f64]) -> Option<Vec<f64>> {
        self.grad.as_ref().map(|g| g(x))
    }

    /// Analytic gradient when available, central differences otherwise.
    pub fn gradient(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_dim(self.dim, x.len())?;
        match &self.grad {
            Some(g) => Ok(g(x)),
            None => finite_diff_grad(self, x, None),
        }
    }

    /// Declared minimizers plus anchors; the points oracles always probe.
    pub fn special_points(&self) -> impl Iterator<Item = &Vec<f64>> {
        self.minimizers.iter().chain(self.anchors.iter())
    }
}

/// Default central-difference step `1e-6 · max(1, ‖x‖)`.
pub fn default_fd_step(x: &[f64]) -> f64 {
    1e-6 * x.iter().map(|v| v * v).sum::<f64>().sqrt().max(1.0)
}

/// Central-difference gradient `(f(x + h eᵢ) − f(x − h eᵢ)) / 2h`.
pub fn finite_diff_grad(f: &Objective, x: &[f64], step: Option<f64>) -> Result<Vec<f64>> {
    check_dim(f.dim(), x.len())?;
    let h = step.unwrap_or_else(|| default_fd_step(x));
    if !(h > 0.0) {
        return Err(invalid("finite-difference step must be positive"));
    }
    let mut probe = x.to_vec();
    let mut grad = Vec::with_capacity(x.len());
    for i in 0..x.len() {
        probe[i] = x[i] + h;
        let fp = f.value(&probe);
        probe[i] = x[i] - h;
        let fm = f.value(&probe);
        probe[i] = x[i];
        if !fp.is_finite() || !fm.is_finite() {
            return Err(BroxError::DomainBoundary(x.to_vec()));
        }
        grad.push((fp - fm) / (2.0 * h));
    }
    Ok(grad)
}

pub(crate) fn points_match(a: &[f64], b: &[f64]) -> bool {
    let scale = b.iter().fold(1.0_f64, |m, v| m.max(v.abs()));
    a.iter()
        .zip(b)
        .all(|(x, y)| (x - y).abs() <= POINT_MATCH_TOL * scale)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ext_real_ordering_and_min() {
        assert!(ExtReal::Finite(1e300) < ExtReal::PosInf);
        assert_eq!(ExtReal::PosInf.min(ExtReal::Finite(2.0)), ExtReal::Finite(2.0));
        assert_eq!(ExtReal::from_f64(f64::NAN), ExtReal::PosInf);
        assert_eq!(ExtReal::PosInf.to_f64(), f64::INFINITY);
    }

    #[test]
    fn declared_minimizer_must_attain_f_star() {
        let f = Objective::new("sq", 1, |x| x[0] * x[0]);
        assert!(f.clone().with_minimizers(vec![vec![0.0]], 0.0).is_ok());
        assert!(f.clone().with_minimizers(vec![vec![1.0]], 0.0).is_err());
        let g = Objective::new("inf", 1, |_| f64::INFINITY);
        assert!(g.with_minimizers(vec![vec![0.0]], 0.0).is_err());
    }

    #[test]
    fn fd_gradient_of_quadratic() {
        let f = catalog::sphere(2);
        let g = finite_diff_grad(&f, &[1.0, 2.0], None).unwrap();
        assert!((g[0] - 2.0).abs() < 1e-5 && (g[1] - 4.0).abs() < 1e-5, "{g:?}");
    }

    #[test]
    fn fd_gradient_of_example1() {
        let f = catalog::example1();
        let g = finite_diff_grad(&f, &[3.0], None).unwrap();
        let exact = 1.0 + 10.0 * 3.0_f64.cos();
        assert!((g[0] - exact).abs() < 1e-6, "{} vs {exact}", g[0]);
    }

    #[test]
    fn fd_gradient_of_constant_is_zero() {
        let f = catalog::constant(3, 1.5);
        let g = finite_diff_grad(&f, &[0.3, -2.0, 7.0], None).unwrap();
        assert!(g.iter().all(|v| *v == 0.0));
    }

    #[test]
    fn fd_gradient_hits_domain_boundary() {
        let f = catalog::halfline();
        assert!(matches!(
            finite_diff_grad(&f, &[0.0], None),
            Err(BroxError::DomainBoundary(_))
        ));
        assert!(finite_diff_grad(&f, &[1.0], None).is_ok());
    }

    #[test]
    fn optimality_is_by_value() {
        let f = catalog::example2(vec![2.0, 0.0]).unwrap();
        assert!(f.is_optimal(&[0.0, 0.0]));
        assert!(f.is_optimal(&[2.0, 0.0]));
        assert!(!f.is_optimal(&[1.0, 0.0]));
    }
}
