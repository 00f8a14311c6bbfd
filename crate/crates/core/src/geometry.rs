//! Inner products, norms, balls and distances induced by a symmetric
//! positive definite matrix `X`.
//!
//! Every quantity is computed through the lower Cholesky factor `L` of
//! `X = L Lᵀ`: `⟨u, v⟩_X = (Lᵀu)·(Lᵀv)`. This keeps `⟨v, v⟩_X` a sum of
//! squares in floating point and makes the inner product symmetric bit for
//! bit.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, invalid, BroxError, Result};

/// Relative tolerance used when validating symmetry of `X`.
pub const SYMMETRY_TOL: f64 = 1e-12;

/// Default slack for ball membership tests.
pub const DEFAULT_MEMBERSHIP_TOL: f64 = 1e-10;

/// Norm geometry `‖v‖_X = sqrt(vᵀ X v)`. Immutable once built.
#[derive(Debug, Clone, PartialEq)]
pub struct Geometry {
    dim: usize,
    /// `X`, row major.
    matrix: Vec<f64>,
    /// Lower Cholesky factor, row major, zeros above the diagonal.
    chol: Vec<f64>,
    identity: bool,
}

impl Geometry {
    pub fn identity(dim: usize) -> Self {
        assert!(dim > 0, "geometry dimension must be positive");
        let mut matrix = vec![0.0; dim * dim];
        for i in 0..dim {
            matrix[i * dim + i] = 1.0;
        }
        Self {
            dim,
            chol: matrix.clone(),
            matrix,
            identity: true,
        }
    }

    /// Builds a geometry from a row-major `dim × dim` matrix.
    ///
    /// Asymmetric input is rejected, not symmetrized.
    pub fn new(dim: usize, row_major: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(invalid("geometry dimension must be positive"));
        }
        check_dim(dim * dim, row_major.len())?;
        if row_major.iter().any(|v| !v.is_finite()) {
            return Err(invalid("X has non-finite entries"));
        }
        let scale = row_major.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        for i in 0..dim {
            for j in (i + 1)..dim {
                let (a, b) = (row_major[i * dim + j], row_major[j * dim + i]);
                if (a - b).abs() > SYMMETRY_TOL * scale {
                    return Err(invalid(format!(
                        "X is not symmetric: X[{i}][{j}] = {a} but X[{j}][{i}] = {b}"
                    )));
                }
            }
        }
        let m = DMatrix::from_row_slice(dim, dim, &row_major);
        let factor = m
            .cholesky()
            .ok_or_else(|| invalid("X is not positive definite (Cholesky failed)"))?;
        let l = factor.l();
        let mut chol = vec![0.0; dim * dim];
        for i in 0..dim {
            if l[(i, i)] <= 0.0 {
                return Err(invalid("X is not positive definite (non-positive pivot)"));
            }
            for j in 0..=i {
                chol[i * dim + j] = l[(i, j)];
            }
        }
        let identity = (0..dim).all(|i| {
            (0..dim).all(|j| row_major[i * dim + j] == if i == j { 1.0 } else { 0.0 })
        });
        Ok(Self {
            dim,
            matrix: row_major,
            chol,
            identity,
        })
    }

    pub fn diagonal(diag: &[f64]) -> Result<Self> {
        let dim = diag.len();
        let mut m = vec![0.0; dim * dim];
        for (i, d) in diag.iter().enumerate() {
            m[i * dim + i] = *d;
        }
        Self::new(dim, m)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_identity(&self) -> bool {
        self.identity
    }

    /// `X` in row-major order.
    pub fn matrix(&self) -> &[f64] {
        &self.matrix
    }

    /// Lower Cholesky factor of `X` in row-major order.
    pub fn cholesky(&self) -> &[f64] {
        &self.chol
    }

    pub fn matrix_dmatrix(&self) -> DMatrix<f64> {
        DMatrix::from_row_slice(self.dim, self.dim, &self.matrix)
    }

    #[inline]
    fn l(&self, i: usize, j: usize) -> f64 {
        self.chol[i * self.dim + j]
    }

    /// `Lᵀ v`.
    pub fn factor_transpose_apply(&self, v: &[f64]) -> Vec<f64> {
        if self.identity {
            return v.to_vec();
        }
        (0..self.dim)
            .map(|i| (i..self.dim).map(|j| self.l(j, i) * v[j]).sum())
            .collect()
    }

    /// `X v`.
    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        (0..self.dim)
            .map(|i| (0..self.dim).map(|j| self.matrix[i * self.dim + j] * v[j]).sum())
            .collect()
    }

    /// Solves `Lᵀ y = w`. Maps whitened coordinates (Euclidean unit ball)
    /// onto displacements with `‖y‖_X = ‖w‖₂`.
    pub fn unwhiten(&self, w: &[f64]) -> Vec<f64> {
        if self.identity {
            return w.to_vec();
        }
        let n = self.dim;
        let mut y = vec![0.0; n];
        for i in (0..n).rev() {
            let s: f64 = ((i + 1)..n).map(|j| self.l(j, i) * y[j]).sum();
            y[i] = (w[i] - s) / self.l(i, i);
        }
        y
    }

    /// `⟨u, v⟩_X`.
    pub fn inner(&self, u: &[f64], v: &[f64]) -> Result<f64> {
        check_dim(self.dim, u.len())?;
        check_dim(self.dim, v.len())?;
        Ok(self.inner_unchecked(u, v))
    }

    pub(crate) fn inner_unchecked(&self, u: &[f64], v: &[f64]) -> f64 {
        debug_assert_eq!(u.len(), self.dim);
        debug_assert_eq!(v.len(), self.dim);
        if self.identity {
            return u.iter().zip(v).map(|(a, b)| a * b).sum();
        }
        let (lu, lv) = (self.factor_transpose_apply(u), self.factor_transpose_apply(v));
        lu.iter().zip(&lv).map(|(a, b)| a * b).sum()
    }

    pub fn norm(&self, v: &[f64]) -> Result<f64> {
        check_dim(self.dim, v.len())?;
        Ok(self.norm_unchecked(v))
    }

    pub(crate) fn norm_unchecked(&self, v: &[f64]) -> f64 {
        if self.identity {
            return v.iter().map(|a| a * a).sum::<f64>().sqrt();
        }
        (0..self.dim)
            .map(|i| {
                let s: f64 = (i..self.dim).map(|j| self.l(j, i) * v[j]).sum();
                s * s
            })
            .sum::<f64>()
            .sqrt()
    }

    /// `‖a − b‖_X` without allocating.
    pub fn dist(&self, a: &[f64], b: &[f64]) -> Result<f64> {
        check_dim(self.dim, a.len())?;
        check_dim(self.dim, b.len())?;
        Ok(self.dist_unchecked(a, b))
    }

    pub(crate) fn dist_unchecked(&self, a: &[f64], b: &[f64]) -> f64 {
        if self.identity {
            return a
                .iter()
                .zip(b)
                .map(|(x, y)| (x - y) * (x - y))
                .sum::<f64>()
                .sqrt();
        }
        (0..self.dim)
            .map(|i| {
                let s: f64 = (i..self.dim).map(|j| self.l(j, i) * (a[j] - b[j])).sum();
                s * s
            })
            .sum::<f64>()
            .sqrt()
    }

    /// `inf_{s ∈ set} ‖x − s‖_X` over a finite set.
    pub fn dist_to_set<P: AsRef<[f64]>>(&self, x: &[f64], set: &[P]) -> Result<f64> {
        check_dim(self.dim, x.len())?;
        if set.is_empty() {
            return Err(invalid("distance to an empty set"));
        }
        let mut best = f64::INFINITY;
        for s in set {
            let s = s.as_ref();
            check_dim(self.dim, s.len())?;
            best = best.min(self.dist_unchecked(x, s));
        }
        Ok(best)
    }

    pub fn ball(&self, center: Vec<f64>, radius: f64) -> Result<Ball> {
        check_dim(self.dim, center.len())?;
        Ball::new(center, radius)
    }
}

/// Closed ball `{z : ‖z − center‖_X ≤ radius}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Ball {
    pub center: Vec<f64>,
    pub radius: f64,
    pub membership_tol: f64,
}

impl Ball {
    pub fn new(center: Vec<f64>, radius: f64) -> Result<Self> {
        if !(radius >= 0.0) || !radius.is_finite() {
            return Err(invalid(format!("ball radius must be finite and ≥ 0, got {radius}")));
        }
        Ok(Self {
            center,
            radius,
            membership_tol: DEFAULT_MEMBERSHIP_TOL,
        })
    }

    pub fn with_membership_tol(mut self, tol: f64) -> Self {
        self.membership_tol = tol;
        self
    }

    pub fn contains(&self, g: &Geometry, z: &[f64]) -> bool {
        z.len() == self.center.len()
            && g.dist_unchecked(z, &self.center) <= self.radius + self.membership_tol
    }
}

/// JSON form of a geometry: `{"dim": n, "X": [row-major...]}` or
/// `{"dim": n, "X": "identity"}`.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct GeometrySpec {
    pub dim: usize,
    #[serde(rename = "X")]
    pub x: MatrixSpec,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(untagged)]
pub enum MatrixSpec {
    Named(String),
    RowMajor(Vec<f64>),
}

impl GeometrySpec {
    pub fn build(&self) -> Result<Geometry> {
        match &self.x {
            MatrixSpec::Named(s) if s == "identity" => {
                if self.dim == 0 {
                    return Err(invalid("geometry dimension must be positive"));
                }
                Ok(Geometry::identity(self.dim))
            }
            MatrixSpec::Named(other) => Err(invalid(format!("unknown matrix shorthand `{other}`"))),
            MatrixSpec::RowMajor(v) => Geometry::new(self.dim, v.clone()),
        }
    }

    pub fn from_json(text: &str) -> Result<Geometry> {
        let spec: GeometrySpec = serde_json::from_str(text)?;
        spec.build()
    }
}

impl From<&Geometry> for GeometrySpec {
    fn from(g: &Geometry) -> Self {
        let x = if g.is_identity() {
            MatrixSpec::Named("identity".into())
        } else {
            MatrixSpec::RowMajor(g.matrix().to_vec())
        };
        GeometrySpec { dim: g.dim(), x }
    }
}

impl TryFrom<GeometrySpec> for Geometry {
    type Error = BroxError;
    fn try_from(spec: GeometrySpec) -> Result<Self> {
        spec.build()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn identity_inner_products() {
        let g = Geometry::identity(2);
        assert_eq!(g.inner(&[1.0, 0.0], &[0.0, 1.0]).unwrap(), 0.0);
        // (3,0)-(2,0) against (2,0)-(0,0)
        assert_eq!(g.inner(&[1.0, 0.0], &[2.0, 0.0]).unwrap(), 2.0);
    }

    #[test]
    fn diagonal_inner_product() {
        let g = Geometry::diagonal(&[4.0, 1.0]).unwrap();
        let v = g.inner(&[1.0, 1.0], &[1.0, -1.0]).unwrap();
        assert!((v - 3.0).abs() < 1e-15, "{v}");
    }

    #[test]
    fn dimension_mismatch_is_rejected() {
        let g = Geometry::identity(2);
        assert!(matches!(
            g.inner(&[1.0], &[1.0, 2.0]),
            Err(BroxError::DimensionMismatch { .. })
        ));
        assert!(g.norm(&[1.0, 2.0, 3.0]).is_err());
    }

    #[test]
    fn asymmetric_and_indefinite_rejected() {
        assert!(Geometry::new(2, vec![2.0, 1.0, 0.0, 2.0]).is_err());
        assert!(Geometry::new(2, vec![1.0, 2.0, 2.0, 1.0]).is_err());
        assert!(Geometry::new(2, vec![0.0, 0.0, 0.0, 1.0]).is_err());
        assert!(Geometry::new(2, vec![2.0, 1.0, 1.0, 2.0]).is_ok());
    }

    #[test]
    fn dist_to_set_cases() {
        let g = Geometry::identity(2);
        assert_eq!(g.dist_to_set(&[3.0, 0.0], &[vec![0.0, 0.0]]).unwrap(), 3.0);
        let g1 = Geometry::identity(1);
        assert_eq!(g1.dist_to_set(&[0.0], &[vec![0.0]]).unwrap(), 0.0);
        let empty: Vec<Vec<f64>> = vec![];
        assert!(g.dist_to_set(&[0.0, 0.0], &empty).is_err());
    }

    #[test]
    fn unwhiten_preserves_norm() {
        let g = Geometry::new(2, vec![4.0, 1.0, 1.0, 3.0]).unwrap();
        let w = [0.6, -0.8];
        let y = g.unwhiten(&w);
        assert!((g.norm(&y).unwrap() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn ball_membership_and_tolerance() {
        let g = Geometry::identity(2);
        let b = g.ball(vec![0.0, 0.0], 1.0).unwrap();
        assert!(b.contains(&g, &[1.0, 0.0]));
        assert!(b.contains(&g, &[1.0 + 5e-11, 0.0]));
        assert!(!b.contains(&g, &[1.0 + 1e-9, 0.0]));
        let strict = b.clone().with_membership_tol(0.0);
        assert!(!strict.contains(&g, &[1.0 + 5e-11, 0.0]));
        assert!(Ball::new(vec![0.0], -1.0).is_err());
    }

    #[test]
    fn json_round_trip() {
        let g = GeometrySpec::from_json(r#"{"dim": 2, "X": "identity"}"#).unwrap();
        assert!(g.is_identity());
        let g = GeometrySpec::from_json(r#"{"dim": 2, "X": [4, 1, 1, 3]}"#).unwrap();
        assert_eq!(g.matrix(), &[4.0, 1.0, 1.0, 3.0]);
        let text = serde_json::to_string(&GeometrySpec::from(&g)).unwrap();
        assert_eq!(GeometrySpec::from_json(&text).unwrap(), g);
        assert!(GeometrySpec::from_json(r#"{"dim": 2, "X": "spectral"}"#).is_err());
    }

    fn spd3() -> Geometry {
        Geometry::new(3, vec![4.0, 1.0, 0.5, 1.0, 3.0, 0.2, 0.5, 0.2, 2.0]).unwrap()
    }

    fn vec3() -> impl Strategy<Value = Vec<f64>> {
        prop::collection::vec(-10.0..10.0f64, 3)
    }

    proptest! {
        #[test]
        fn cauchy_schwarz(u in vec3(), v in vec3()) {
            let g = spd3();
            let lhs = g.inner(&u, &v).unwrap().abs();
            let rhs = g.norm(&u).unwrap() * g.norm(&v).unwrap();
            prop_assert!(lhs <= rhs * (1.0 + 1e-9) + 1e-12);
        }

        #[test]
        fn inner_symmetric_exactly(u in vec3(), v in vec3()) {
            let g = spd3();
            prop_assert_eq!(g.inner(&u, &v).unwrap(), g.inner(&v, &u).unwrap());
            prop_assert!(g.inner(&u, &u).unwrap() >= 0.0);
        }

        #[test]
        fn three_point_expansion(a in vec3(), b in vec3(), c in vec3()) {
            // ‖b−c‖² = ‖a−c‖² − 2⟨a−b, b−c⟩ − ‖b−a‖²
            let g = spd3();
            let sub = |p: &[f64], q: &[f64]| p.iter().zip(q).map(|(x, y)| x - y).collect::<Vec<_>>();
            let lhs = g.norm(&sub(&b, &c)).unwrap().powi(2);
            let rhs = g.norm(&sub(&a, &c)).unwrap().powi(2)
                - 2.0 * g.inner(&sub(&a, &b), &sub(&b, &c)).unwrap()
                - g.norm(&sub(&b, &a)).unwrap().powi(2);
            let scale = 1.0 + g.norm(&a).unwrap().powi(2) + g.norm(&b).unwrap().powi(2) + g.norm(&c).unwrap().powi(2);
            prop_assert!((lhs - rhs).abs() <= 1e-9 * scale);
        }

        #[test]
        fn membership_monotone_in_radius(z in vec3(), t in 0.0..20.0f64, extra in 0.0..5.0f64) {
            let g = spd3();
            let small = g.ball(vec![0.0; 3], t).unwrap();
            let big = g.ball(vec![0.0; 3], t + extra).unwrap();
            prop_assert!(!small.contains(&g, &z) || big.contains(&g, &z));
        }
    }
}
