//! Plurisubharmonic weights with two-sided curvature bounds.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{hermitian_defect, hermitian_eigenvalues, identity2, Mat2};
use crate::point::Point2;

/// A weight `φ` on ℂ² (or ℂ, using the first variable).
///
/// Complex Hessians follow the convention `∂²φ/∂z_i∂z̄_j`, so `|z|²` has the
/// identity as its Hessian.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Weight {
    Gaussian,
    QuadraticForm { q: Mat2 },
}

impl Default for Weight {
    fn default() -> Self {
        Weight::Gaussian
    }
}

impl Weight {
    pub fn gaussian() -> Self {
        Weight::Gaussian
    }

    /// `φ(z) = z* Q z` for a positive-definite Hermitian `Q`.
    pub fn quadratic(q: Mat2) -> Result<Self> {
        if hermitian_defect(&q) > 1e-12 {
            return Err(Error::Domain("quadratic weight matrix is not Hermitian".into()));
        }
        if hermitian_eigenvalues(&q).0 <= 0.0 {
            return Err(Error::Domain(
                "quadratic weight must be positive definite (lower curvature bound ε > 0)".into(),
            ));
        }
        Ok(Weight::QuadraticForm { q })
    }

    pub fn matrix(&self) -> Mat2 {
        match self {
            Weight::Gaussian => identity2(),
            Weight::QuadraticForm { q } => *q,
        }
    }

    /// Curvature bounds `(ε, C)` with `ε·I ≤ Hess φ ≤ C·I`.
    pub fn bounds(&self) -> (f64, f64) {
        hermitian_eigenvalues(&self.matrix())
    }

    pub fn eval(&self, z: Point2) -> f64 {
        match self {
            Weight::Gaussian => z.norm_sqr(),
            Weight::QuadraticForm { q } => {
                let qz = z.transform(q);
                qz.dot(z).re
            }
        }
    }

    /// One-variable restriction `φ(z, 0)`.
    pub fn eval1(&self, z: C64) -> f64 {
        match self {
            Weight::Gaussian => z.norm_sqr(),
            Weight::QuadraticForm { q } => q[0][0].re * z.norm_sqr(),
        }
    }

    /// Complex Hessian (constant for every weight in scope).
    pub fn hessian(&self) -> Mat2 {
        self.matrix()
    }

    /// Closed-form ball average `φ_r(z)` over the Euclidean ball of radius `r`
    /// in ℂ^dim.
    pub fn ball_average(&self, z: Point2, r: f64, dim: usize) -> Result<f64> {
        if r <= 0.0 {
            return Err(Error::Domain(format!("ball radius must be positive, got {r}")));
        }
        let q = self.matrix();
        match dim {
            // mean of |ζ|² over a disk of radius r is r²/2
            1 => Ok(self.eval1(z.x) + q[0][0].re * r * r / 2.0),
            // each complex coordinate carries r²/3 on the 4-ball
            2 => Ok(self.eval(z) + (q[0][0].re + q[1][1].re) * r * r / 3.0),
            _ => Err(Error::Domain(format!("dimension {dim} not supported"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gaussian_bounds_are_unit() {
        assert_eq!(Weight::gaussian().bounds(), (1.0, 1.0));
    }

    #[test]
    fn rejects_indefinite_form() {
        let q = [
            [C64::new(1.0, 0.0), C64::new(2.0, 0.0)],
            [C64::new(2.0, 0.0), C64::new(1.0, 0.0)],
        ];
        assert!(Weight::quadratic(q).is_err());
    }

    #[test]
    fn closed_form_ball_averages() {
        let w = Weight::gaussian();
        let r = 1.7;
        assert!((w.ball_average(Point2::ORIGIN, r, 1).unwrap() - r * r / 2.0).abs() < 1e-14);
        assert!((w.ball_average(Point2::ORIGIN, r, 2).unwrap() - 2.0 * r * r / 3.0).abs() < 1e-14);
        assert!(w.ball_average(Point2::ORIGIN, 0.0, 2).is_err());
    }
}
