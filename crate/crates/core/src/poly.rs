//! Dense one- and two-variable complex polynomials.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::point::Point2;

const ZERO: C64 = C64::new(0.0, 0.0);

/// `ln n!`, exact summation up to 170 and Stirling's series beyond.
pub fn ln_factorial(n: usize) -> f64 {
    if n < 2 {
        return 0.0;
    }
    if n <= 170 {
        return (2..=n).map(|k| (k as f64).ln()).sum();
    }
    let x = n as f64 + 1.0;
    // ln Γ(x) by Stirling with three correction terms
    (x - 0.5) * x.ln() - x + 0.5 * (2.0 * std::f64::consts::PI).ln() + 1.0 / (12.0 * x)
        - 1.0 / (360.0 * x.powi(3))
        + 1.0 / (1260.0 * x.powi(5))
}

/// A one-variable polynomial `Σ a_k t^k`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Poly1 {
    pub coeffs: Vec<C64>,
}

impl Poly1 {
    pub fn new(coeffs: Vec<C64>) -> Self {
        Poly1 { coeffs }
    }

    pub fn zero() -> Self {
        Poly1 { coeffs: Vec::new() }
    }

    pub fn constant(c: C64) -> Self {
        Poly1 { coeffs: vec![c] }
    }

    pub fn monomial(k: usize, c: C64) -> Self {
        let mut coeffs = vec![ZERO; k + 1];
        coeffs[k] = c;
        Poly1 { coeffs }
    }

    /// Index of the highest stored coefficient (`None` for the empty polynomial).
    pub fn len_degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn eval(&self, t: C64) -> C64 {
        self.coeffs.iter().rev().fold(ZERO, |acc, &c| acc * t + c)
    }

    pub fn derivative(&self) -> Poly1 {
        Poly1::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, &c)| c * k as f64)
                .collect(),
        )
    }

    pub fn add(&self, other: &Poly1) -> Poly1 {
        let n = self.coeffs.len().max(other.coeffs.len());
        Poly1::new(
            (0..n)
                .map(|k| {
                    self.coeffs.get(k).copied().unwrap_or(ZERO)
                        + other.coeffs.get(k).copied().unwrap_or(ZERO)
                })
                .collect(),
        )
    }

    pub fn mul(&self, other: &Poly1) -> Poly1 {
        if self.coeffs.is_empty() || other.coeffs.is_empty() {
            return Poly1::zero();
        }
        let mut out = vec![ZERO; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly1::new(out)
    }

    pub fn scale(&self, c: C64) -> Poly1 {
        Poly1::new(self.coeffs.iter().map(|&a| a * c).collect())
    }

    /// Synthetic division by `(t - root)`: returns the quotient and the remainder.
    pub fn deflate(&self, root: C64) -> (Poly1, C64) {
        if self.coeffs.is_empty() {
            return (Poly1::zero(), ZERO);
        }
        let n = self.coeffs.len();
        let mut q = vec![ZERO; n - 1];
        let mut carry = ZERO;
        for k in (0..n).rev() {
            let v = self.coeffs[k] + carry * root;
            if k == 0 {
                return (Poly1::new(q), v);
            }
            q[k - 1] = v;
            carry = v;
        }
        unreachable!()
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }
}

/// A two-variable polynomial `Σ c_{mn} x^m y^n` of total degree at most `degree`.
///
/// Coefficients are stored densely, ordered by total degree and then by the
/// power of `y`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Poly2 {
    degree: usize,
    coeffs: Vec<C64>,
}

impl Poly2 {
    pub fn zero(degree: usize) -> Self {
        Poly2 {
            degree,
            coeffs: vec![ZERO; Self::dim(degree)],
        }
    }

    pub fn constant(c: C64) -> Self {
        let mut p = Poly2::zero(0);
        p.set(0, 0, c);
        p
    }

    /// Number of monomials of total degree `≤ degree`.
    pub fn dim(degree: usize) -> usize {
        (degree + 1) * (degree + 2) / 2
    }

    pub fn index(m: usize, n: usize) -> usize {
        let k = m + n;
        k * (k + 1) / 2 + n
    }

    /// Monomial exponents in storage order.
    pub fn exponents(degree: usize) -> impl Iterator<Item = (usize, usize)> {
        (0..=degree).flat_map(|k| (0..=k).map(move |n| (k - n, n)))
    }

    pub fn from_terms(terms: &[((usize, usize), C64)]) -> Self {
        let degree = terms.iter().map(|((m, n), _)| m + n).max().unwrap_or(0);
        let mut p = Poly2::zero(degree);
        for &((m, n), c) in terms {
            let cur = p.get(m, n);
            p.set(m, n, cur + c);
        }
        p
    }

    pub fn from_coeffs(degree: usize, coeffs: Vec<C64>) -> Self {
        assert_eq!(coeffs.len(), Self::dim(degree));
        Poly2 { degree, coeffs }
    }

    /// Embeds a polynomial in `x` alone.
    pub fn from_x(p: &Poly1) -> Self {
        let d = p.len_degree().unwrap_or(0);
        let mut out = Poly2::zero(d);
        for (k, &c) in p.coeffs.iter().enumerate() {
            out.set(k, 0, c);
        }
        out
    }

    /// Embeds a polynomial in `y` alone.
    pub fn from_y(p: &Poly1) -> Self {
        let d = p.len_degree().unwrap_or(0);
        let mut out = Poly2::zero(d);
        for (k, &c) in p.coeffs.iter().enumerate() {
            out.set(0, k, c);
        }
        out
    }

    /// `a x + b y + c`.
    pub fn linear(a: C64, b: C64, c: C64) -> Self {
        Poly2::from_terms(&[((1, 0), a), ((0, 1), b), ((0, 0), c)])
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    pub fn get(&self, m: usize, n: usize) -> C64 {
        if m + n > self.degree {
            ZERO
        } else {
            self.coeffs[Self::index(m, n)]
        }
    }

    pub fn set(&mut self, m: usize, n: usize, c: C64) {
        if m + n > self.degree {
            self.raise_degree(m + n);
        }
        self.coeffs[Self::index(m, n)] = c;
    }

    fn raise_degree(&mut self, degree: usize) {
        if degree <= self.degree {
            return;
        }
        self.coeffs.resize(Self::dim(degree), ZERO);
        self.degree = degree;
    }

    /// Nonzero terms in storage order.
    pub fn terms(&self) -> impl Iterator<Item = ((usize, usize), C64)> + '_ {
        Self::exponents(self.degree)
            .zip(self.coeffs.iter().copied())
            .filter(|(_, c)| *c != ZERO)
    }

    /// Largest total degree carrying a nonzero coefficient.
    pub fn effective_degree(&self) -> usize {
        self.terms().map(|((m, n), _)| m + n).max().unwrap_or(0)
    }

    pub fn eval(&self, p: Point2) -> C64 {
        // Horner in y for each power of x, then Horner in x.
        let d = self.degree;
        let mut acc = ZERO;
        for m in (0..=d).rev() {
            let mut inner = ZERO;
            for n in (0..=(d - m)).rev() {
                inner = inner * p.y + self.coeffs[Self::index(m, n)];
            }
            acc = acc * p.x + inner;
        }
        acc
    }

    /// `(∂F/∂x, ∂F/∂y)` at `p`.
    pub fn gradient(&self, p: Point2) -> Point2 {
        let mut dx = ZERO;
        let mut dy = ZERO;
        for ((m, n), c) in self.terms() {
            if m > 0 {
                dx += c * m as f64 * p.x.powu(m as u32 - 1) * p.y.powu(n as u32);
            }
            if n > 0 {
                dy += c * n as f64 * p.x.powu(m as u32) * p.y.powu(n as u32 - 1);
            }
        }
        Point2::new(dx, dy)
    }

    pub fn add(&self, other: &Poly2) -> Poly2 {
        let mut out = Poly2::zero(self.degree.max(other.degree));
        for ((m, n), c) in self.terms().chain(other.terms()) {
            let cur = out.get(m, n);
            out.set(m, n, cur + c);
        }
        out
    }

    pub fn sub(&self, other: &Poly2) -> Poly2 {
        self.add(&other.scale(C64::new(-1.0, 0.0)))
    }

    pub fn scale(&self, c: C64) -> Poly2 {
        Poly2 {
            degree: self.degree,
            coeffs: self.coeffs.iter().map(|&a| a * c).collect(),
        }
    }

    pub fn mul(&self, other: &Poly2) -> Poly2 {
        let mut out = Poly2::zero(self.degree + other.degree);
        for ((m1, n1), a) in self.terms() {
            for ((m2, n2), b) in other.terms() {
                let i = Self::index(m1 + m2, n1 + n2);
                out.coeffs[i] += a * b;
            }
        }
        out
    }

    /// Restriction to the complex line `t ↦ base + t·dir`, as a polynomial in `t`.
    pub fn restrict_to_line(&self, base: Point2, dir: Point2) -> Poly1 {
        let xl = Poly1::new(vec![base.x, dir.x]);
        let yl = Poly1::new(vec![base.y, dir.y]);
        let d = self.degree;
        let mut xpow = vec![Poly1::constant(C64::new(1.0, 0.0))];
        let mut ypow = vec![Poly1::constant(C64::new(1.0, 0.0))];
        for k in 1..=d {
            xpow.push(xpow[k - 1].mul(&xl));
            ypow.push(ypow[k - 1].mul(&yl));
        }
        let mut out = Poly1::new(vec![ZERO; d + 1]);
        for ((m, n), c) in self.terms() {
            out = out.add(&xpow[m].mul(&ypow[n]).scale(c));
        }
        out
    }

    /// Multiplies every coefficient by a unit-modulus (or any) scalar.
    pub fn map_coeffs(&self, f: impl Fn((usize, usize), C64) -> C64) -> Poly2 {
        Poly2 {
            degree: self.degree,
            coeffs: Self::exponents(self.degree)
                .zip(self.coeffs.iter())
                .map(|(e, &c)| f(e, c))
                .collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn poly2_eval_matches_term_sum() {
        let p = Poly2::from_terms(&[((2, 1), c(1.0, -0.5)), ((0, 3), c(0.2, 0.0)), ((1, 0), c(0.0, 2.0))]);
        let z = Point2::new(c(0.3, 0.7), c(-1.1, 0.4));
        let direct: C64 = p
            .terms()
            .map(|((m, n), a)| a * z.x.powu(m as u32) * z.y.powu(n as u32))
            .sum();
        assert!((p.eval(z) - direct).norm() < 1e-14);
    }

    #[test]
    fn deflation_recovers_factor() {
        // (t - 2)(t + i) = t² + (i - 2) t - 2i
        let p = Poly1::new(vec![c(0.0, -2.0), c(-2.0, 1.0), c(1.0, 0.0)]);
        let (q, r) = p.deflate(c(2.0, 0.0));
        assert!(r.norm() < 1e-14);
        assert!((q.coeffs[0] - c(0.0, 1.0)).norm() < 1e-14);
        assert!((q.coeffs[1] - c(1.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn restriction_to_line() {
        let p = Poly2::from_terms(&[((1, 1), c(1.0, 0.0))]); // xy
        let r = p.restrict_to_line(Point2::real(1.0, 0.0), Point2::real(0.0, 1.0)); // (1, t)
        assert!((r.eval(c(0.7, 0.2)) - c(0.7, 0.2)).norm() < 1e-14);
    }

    #[test]
    fn ln_factorial_matches_direct_product_and_stirling_branch() {
        assert!((ln_factorial(10) - 3_628_800f64.ln()).abs() < 1e-12);
        let exact_171: f64 = (2..=171).map(|k| (k as f64).ln()).sum();
        assert!((ln_factorial(171) - exact_171).abs() < 1e-10);
    }
}
