use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

/// A point (or vector) of ℂ².
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point2 {
    pub x: C64,
    pub y: C64,
}

impl Point2 {
    pub const ORIGIN: Point2 = Point2 {
        x: C64::new(0.0, 0.0),
        y: C64::new(0.0, 0.0),
    };

    pub fn new(x: C64, y: C64) -> Self {
        Point2 { x, y }
    }

    pub fn real(x: f64, y: f64) -> Self {
        Point2::new(C64::new(x, 0.0), C64::new(y, 0.0))
    }

    /// Builds a point from its four real coordinates `(Re x, Im x, Re y, Im y)`.
    pub fn from_reals(r: [f64; 4]) -> Self {
        Point2::new(C64::new(r[0], r[1]), C64::new(r[2], r[3]))
    }

    pub fn to_reals(self) -> [f64; 4] {
        [self.x.re, self.x.im, self.y.re, self.y.im]
    }

    pub fn norm_sqr(self) -> f64 {
        self.x.norm_sqr() + self.y.norm_sqr()
    }

    pub fn norm(self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// Hermitian inner product `⟨self, other⟩ = Σ self_i · conj(other_i)`.
    pub fn dot(self, other: Point2) -> C64 {
        self.x * other.x.conj() + self.y * other.y.conj()
    }

    pub fn conj(self) -> Point2 {
        Point2::new(self.x.conj(), self.y.conj())
    }

    pub fn scale(self, c: C64) -> Point2 {
        Point2::new(self.x * c, self.y * c)
    }

    pub fn normalized(self) -> Point2 {
        let n = self.norm();
        Point2::new(self.x / n, self.y / n)
    }

    pub fn dist(self, other: Point2) -> f64 {
        (self - other).norm()
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    /// Applies the 2×2 complex matrix `m` (row-major) to the point.
    pub fn transform(self, m: &[[C64; 2]; 2]) -> Point2 {
        Point2::new(
            m[0][0] * self.x + m[0][1] * self.y,
            m[1][0] * self.x + m[1][1] * self.y,
        )
    }
}

impl Add for Point2 {
    type Output = Point2;
    fn add(self, o: Point2) -> Point2 {
        Point2::new(self.x + o.x, self.y + o.y)
    }
}

impl Sub for Point2 {
    type Output = Point2;
    fn sub(self, o: Point2) -> Point2 {
        Point2::new(self.x - o.x, self.y - o.y)
    }
}

impl Neg for Point2 {
    type Output = Point2;
    fn neg(self) -> Point2 {
        Point2::new(-self.x, -self.y)
    }
}

impl Mul<C64> for Point2 {
    type Output = Point2;
    fn mul(self, c: C64) -> Point2 {
        self.scale(c)
    }
}

impl Mul<f64> for Point2 {
    type Output = Point2;
    fn mul(self, c: f64) -> Point2 {
        Point2::new(self.x * c, self.y * c)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inner_product_is_conjugate_linear_in_second_slot() {
        let a = Point2::new(C64::new(1.0, 2.0), C64::new(0.5, -1.0));
        let b = Point2::new(C64::new(-0.3, 0.7), C64::new(2.0, 0.1));
        let c = C64::new(0.4, 1.3);
        let lhs = a.dot(b.scale(c));
        let rhs = a.dot(b) * c.conj();
        assert!((lhs - rhs).norm() < 1e-14);
        assert!((a.dot(a).re - a.norm_sqr()).abs() < 1e-14);
    }

    #[test]
    fn real_coordinates_round_trip() {
        let p = Point2::from_reals([1.0, -2.0, 3.5, 0.25]);
        assert_eq!(Point2::from_reals(p.to_reals()), p);
    }
}
