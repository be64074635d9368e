//! Bargmann–Fock norms, ball averages and Bergman-type ratio diagnostics.
//!
//! Monomials are orthogonal for the Gaussian weight, with
//! `∫_ℂ |z|^{2n} e^{-|z|²} dA = π n!`, so the square norm of a polynomial
//! is a weighted sum of its squared coefficients. [`quad_norm`] computes the
//! same quantity by iterated adaptive quadrature and serves as the numeric
//! oracle for every closed form in the crate.

use std::cell::Cell;
use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::point::Point2;
use crate::poly::{ln_factorial, Poly1, Poly2};
use crate::quad::{self, Estimate, Tolerance};
use crate::weight::Weight;

/// Exact Gaussian square norm `π Σ n! |a_n|²` of a one-variable polynomial.
pub fn fock_norm_sqr1(p: &Poly1) -> Result<f64> {
    let mut total = 0.0;
    for (n, a) in p.coeffs.iter().enumerate() {
        total += weighted_term(n, a.norm_sqr(), PI.ln() + ln_factorial(n))?;
    }
    Ok(total)
}

/// Exact Gaussian square norm `π² Σ m! n! |c_{mn}|²` of a two-variable polynomial.
pub fn fock_norm_sqr2(p: &Poly2) -> Result<f64> {
    let mut total = 0.0;
    for ((m, n), c) in p.terms() {
        total += weighted_term(
            m + n,
            c.norm_sqr(),
            2.0 * PI.ln() + ln_factorial(m) + ln_factorial(n),
        )?;
    }
    Ok(total)
}

fn weighted_term(degree: usize, abs_sqr: f64, ln_weight: f64) -> Result<f64> {
    if !abs_sqr.is_finite() {
        return Err(Error::Range {
            degree,
            what: "non-finite coefficient".into(),
        });
    }
    if abs_sqr == 0.0 {
        return Ok(0.0);
    }
    let v = (abs_sqr.ln() + ln_weight).exp();
    if !v.is_finite() {
        return Err(Error::Range {
            degree,
            what: format!("weighted term e^{:.1} overflows f64", abs_sqr.ln() + ln_weight),
        });
    }
    Ok(v)
}

/// Square norm of a monomial `x^m y^n` for the Gaussian weight.
pub fn monomial_norm_sqr(m: usize, n: usize) -> f64 {
    (2.0 * PI.ln() + ln_factorial(m) + ln_factorial(n)).exp()
}

/// Integration regions for [`quad_norm`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Region {
    FullPlane,
    /// Euclidean ball (a disk in one variable).
    Ball { center: Point2, r: f64 },
    /// Product of two disks of radius `r` (a disk in one variable).
    Bidisk { center: Point2, r: f64 },
    /// One-variable annulus around `center.x`.
    Annulus { center: Point2, r_in: f64, r_out: f64 },
}

impl Region {
    pub fn contains(&self, p: Point2) -> bool {
        match *self {
            Region::FullPlane => true,
            Region::Ball { center, r } => (p - center).norm() < r,
            Region::Bidisk { center, r } => (p.x - center.x).norm() < r && (p.y - center.y).norm() < r,
            Region::Annulus { center, r_in, r_out } => {
                let d = (p.x - center.x).norm();
                d > r_in && d < r_out
            }
        }
    }
}

/// `∫ |f|² e^{-φ}` over a region of ℂ^dim by iterated adaptive quadrature.
///
/// Each complex variable is integrated in polar coordinates: an adaptive
/// Gauss–Kronrod radial integral around a trapezoid angular mean. The default
/// relative tolerance is `1e-10` for the Gaussian weight and `1e-6` otherwise.
pub fn quad_norm<F>(f: F, dim: usize, region: Region, w: &Weight) -> Result<Estimate>
where
    F: Fn(Point2) -> C64,
{
    let rel = match w {
        Weight::Gaussian => quad::RADIAL_REL_TOL,
        Weight::QuadraticForm { .. } => quad::GENERIC_REL_TOL,
    };
    quad_norm_with_tol(f, dim, region, w, rel)
}

pub fn quad_norm_with_tol<F>(f: F, dim: usize, region: Region, w: &Weight, rel: f64) -> Result<Estimate>
where
    F: Fn(Point2) -> C64,
{
    match dim {
        1 => quad_norm_1d(&f, region, w, rel),
        2 => quad_norm_2d(&f, region, w, rel),
        _ => Err(Error::Domain(format!("dimension {dim} not supported"))),
    }
}

/// Integral over a disk (or annulus, or the plane) in one complex variable of
/// `g`, in polar coordinates around `center`.
pub(crate) fn polar_integral<G>(g: G, center: C64, r_in: f64, r_out: Option<f64>, rel: f64) -> Result<Estimate>
where
    G: Fn(C64) -> f64,
{
    let ang_tol = Tolerance::rel(rel * 0.1).with_abs(1e-300);
    let inner_err = Cell::new(0.0f64);
    let failure = Cell::new(None::<Error>);
    let radial = |rho: f64| {
        if rho == 0.0 {
            return 0.0;
        }
        let mean = quad::periodic_mean_rel(
            |t| g(center + C64::from_polar(rho, t)),
            ang_tol,
        );
        match mean {
            Ok(est) => {
                inner_err.set(inner_err.get().max(est.rel_err()));
                2.0 * PI * rho * est.value
            }
            Err(e) => {
                failure.set(Some(e));
                0.0
            }
        }
    };
    let tol = Tolerance::rel(rel).with_abs(1e-300);
    let est = match r_out {
        Some(r) => quad::integrate(&radial, r_in, r, tol)?,
        None => quad::integrate_to_infinity(&radial, r_in, tol)?,
    };
    if let Some(e) = failure.take() {
        return Err(e);
    }
    Ok(Estimate::new(
        est.value,
        est.abs_err + inner_err.get() * est.value.abs(),
    ))
}

fn quad_norm_1d<F: Fn(Point2) -> C64>(f: &F, region: Region, w: &Weight, rel: f64) -> Result<Estimate> {
    let integrand = |z: C64| {
        let v = f(Point2::new(z, C64::new(0.0, 0.0)));
        v.norm_sqr() * (-w.eval1(z)).exp()
    };
    match region {
        Region::FullPlane => polar_integral(integrand, C64::new(0.0, 0.0), 0.0, None, rel),
        Region::Ball { center, r } | Region::Bidisk { center, r } => {
            if r <= 0.0 {
                return Ok(Estimate::default());
            }
            polar_integral(integrand, center.x, 0.0, Some(r), rel)
        }
        Region::Annulus { center, r_in, r_out } => {
            if r_out <= r_in {
                return Ok(Estimate::default());
            }
            polar_integral(integrand, center.x, r_in.max(0.0), Some(r_out), rel)
        }
    }
}

fn quad_norm_2d<F: Fn(Point2) -> C64>(f: &F, region: Region, w: &Weight, rel: f64) -> Result<Estimate> {
    let inner_rel = rel * 0.1;
    let failure = Cell::new(None::<Error>);
    let inner_err = Cell::new(0.0f64);
    let (cx, cy) = match region {
        Region::Ball { center, .. } | Region::Bidisk { center, .. } => (center.x, center.y),
        Region::FullPlane => (C64::new(0.0, 0.0), C64::new(0.0, 0.0)),
        Region::Annulus { .. } => {
            return Err(Error::Domain("annulus regions are one-variable only".into()))
        }
    };
    let outer = |x: C64| {
        let y_radius = match region {
            Region::FullPlane => None,
            Region::Ball { r, .. } => {
                let rem = r * r - (x - cx).norm_sqr();
                if rem <= 0.0 {
                    return 0.0;
                }
                Some(rem.sqrt())
            }
            Region::Bidisk { r, .. } => Some(r),
            Region::Annulus { .. } => unreachable!(),
        };
        let g = |y: C64| {
            let p = Point2::new(x, y);
            f(p).norm_sqr() * (-w.eval(p)).exp()
        };
        match polar_integral(g, cy, 0.0, y_radius, inner_rel) {
            Ok(est) => {
                inner_err.set(inner_err.get().max(est.rel_err()));
                est.value
            }
            Err(e) => {
                failure.set(Some(e));
                0.0
            }
        }
    };
    let est = match region {
        Region::FullPlane => polar_integral(outer, cx, 0.0, None, rel)?,
        Region::Ball { r, .. } | Region::Bidisk { r, .. } => {
            if r <= 0.0 {
                return Ok(Estimate::default());
            }
            polar_integral(outer, cx, 0.0, Some(r), rel)?
        }
        Region::Annulus { .. } => unreachable!(),
    };
    if let Some(e) = failure.take() {
        return Err(e);
    }
    Ok(Estimate::new(
        est.value,
        est.abs_err + inner_err.get() * est.value.abs(),
    ))
}

/// Mean of `field` over the Euclidean ball `B(z, r)` in ℂ^dim by tensor
/// Gauss–Legendre/trapezoid quadrature; the error estimate compares two
/// orders.
///
/// For a weight, prefer the closed form [`Weight::ball_average`].
pub fn ball_average<F>(field: F, z: Point2, r: f64, dim: usize) -> Result<Estimate>
where
    F: Fn(Point2) -> f64 + Sync,
{
    if r <= 0.0 || !r.is_finite() {
        return Err(Error::Domain(format!("ball radius must be positive, got {r}")));
    }
    let coarse = ball_average_order(&field, z, r, dim, 16)?;
    let fine = ball_average_order(&field, z, r, dim, 32)?;
    Ok(Estimate::new(fine, (fine - coarse).abs()))
}

/// Fixed-order ball average; `order` Gauss–Legendre nodes per radial
/// direction and `2·order` trapezoid nodes per angle.
pub fn ball_average_order<F>(field: &F, z: Point2, r: f64, dim: usize, order: usize) -> Result<f64>
where
    F: Fn(Point2) -> f64 + Sync,
{
    let angles: Vec<C64> = (0..2 * order)
        .map(|k| C64::from_polar(1.0, 2.0 * PI * (k as f64 + 0.5) / (2 * order) as f64))
        .collect();
    match dim {
        1 => {
            // (2/r²) ∫₀^r ρ mean_θ f dρ
            let rule = quad::gauss_legendre_on(order, 0.0, r);
            let mut total = 0.0;
            for (rho, wr) in rule {
                let mean: f64 = angles
                    .iter()
                    .map(|e| field(Point2::new(z.x + e * rho, z.y)))
                    .sum::<f64>()
                    / angles.len() as f64;
                total += wr * rho * mean;
            }
            Ok(2.0 * total / (r * r))
        }
        2 => {
            // ζ = z + (R√(1-u) e^{iθ₁}, R√u e^{iθ₂}); dV = (R³/2) dR du dθ₁ dθ₂
            let radial = quad::gauss_legendre_on(order, 0.0, r);
            let split = quad::gauss_legendre_on(order, 0.0, 1.0);
            let total: f64 = radial
                .par_iter()
                .map(|&(rr, wr)| {
                    let mut acc = 0.0;
                    for &(u, wu) in &split {
                        let a = rr * (1.0 - u).sqrt();
                        let b = rr * u.sqrt();
                        let mut mean = 0.0;
                        for e1 in &angles {
                            for e2 in &angles {
                                mean += field(Point2::new(z.x + e1 * a, z.y + e2 * b));
                            }
                        }
                        mean /= (angles.len() * angles.len()) as f64;
                        acc += wu * mean;
                    }
                    wr * rr.powi(3) * acc
                })
                .sum();
            Ok(4.0 * total / r.powi(4))
        }
        _ => Err(Error::Domain(format!("dimension {dim} not supported"))),
    }
}

/// Holomorphic polynomials accepted by [`bergman_ratio`].
#[derive(Debug, Clone, Copy)]
pub enum FockPoly<'a> {
    One(&'a Poly1),
    Two(&'a Poly2),
}

impl FockPoly<'_> {
    pub fn dim(&self) -> usize {
        match self {
            FockPoly::One(_) => 1,
            FockPoly::Two(_) => 2,
        }
    }

    pub fn degree(&self) -> usize {
        match self {
            FockPoly::One(p) => p.len_degree().unwrap_or(0),
            FockPoly::Two(p) => p.effective_degree(),
        }
    }

    pub fn norm_sqr(&self, w: &Weight) -> Result<f64> {
        match (self, w) {
            (FockPoly::One(p), Weight::Gaussian) => fock_norm_sqr1(p),
            (FockPoly::Two(p), Weight::Gaussian) => fock_norm_sqr2(p),
            (FockPoly::One(p), _) => {
                Ok(quad_norm(|z| p.eval(z.x), 1, Region::FullPlane, w)?.value)
            }
            (FockPoly::Two(p), _) => Ok(quad_norm(|z| p.eval(z), 2, Region::FullPlane, w)?.value),
        }
    }
}

/// A polar sampling grid, the same in each variable.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PolarGrid {
    pub radii: usize,
    pub angles: usize,
    pub radius: f64,
}

impl PolarGrid {
    /// 64 radii × 64 angles over radius `2√D` (at least 1).
    pub fn for_degree(degree: usize) -> Self {
        PolarGrid {
            radii: 64,
            angles: 64,
            radius: (2.0 * (degree as f64).sqrt()).max(1.0),
        }
    }

    fn nodes(&self) -> Vec<C64> {
        let mut out = Vec::with_capacity(self.radii * self.angles + 1);
        out.push(C64::new(0.0, 0.0));
        for i in 1..=self.radii {
            let rho = self.radius * i as f64 / self.radii as f64;
            for k in 0..self.angles {
                out.push(C64::from_polar(rho, 2.0 * PI * k as f64 / self.angles as f64));
            }
        }
        out
    }
}

/// Sup and gradient ratios of the weighted Bergman inequality.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BergmanRatio {
    /// `sup |F|² e^{-φ} / ‖F‖²`.
    pub sup_ratio: f64,
    /// `(sup |d(|F| e^{-φ/2})|)² / ‖F‖²`.
    pub gradient_ratio: f64,
    pub norm_sqr: f64,
    pub argmax: Point2,
}

/// Samples `|F|² e^{-φ}` and `|d(|F|e^{-φ/2})|` on a polar grid, polishes the
/// best grid points by pattern search, and divides by the square norm.
///
/// The gradient uses the identity
/// `|d(|F|e^{-φ/2})| = e^{-φ/2} |∂F - F ∂φ|` (real gradient length of the
/// modulus), valid away from zeros of `F` and bounded across them.
pub fn bergman_ratio(f: FockPoly<'_>, w: &Weight, grid: &PolarGrid) -> Result<BergmanRatio> {
    if grid.radii == 0 || grid.angles == 0 || !(grid.radius > 0.0) {
        return Err(Error::Domain("empty sampling grid".into()));
    }
    let norm_sqr = f.norm_sqr(w)?;
    if norm_sqr <= 0.0 {
        return Err(Error::Domain("zero polynomial has no Bergman ratio".into()));
    }
    let nodes = grid.nodes();
    let (value, grad) = pointwise_fields(f, w);
    let (best_v, best_g) = match f {
        FockPoly::One(_) => {
            let v = nodes
                .iter()
                .map(|&x| (value(Point2::new(x, C64::new(0.0, 0.0))), Point2::new(x, C64::new(0.0, 0.0))))
                .max_by(|a, b| a.0.total_cmp(&b.0))
                .expect("nonempty");
            let g = nodes
                .iter()
                .map(|&x| (grad(Point2::new(x, C64::new(0.0, 0.0))), Point2::new(x, C64::new(0.0, 0.0))))
                .max_by(|a, b| a.0.total_cmp(&b.0))
                .expect("nonempty");
            (v, g)
        }
        FockPoly::Two(_) => {
            let per_y: Vec<((f64, Point2), (f64, Point2))> = nodes
                .par_iter()
                .map(|&y| {
                    let mut bv = (f64::NEG_INFINITY, Point2::ORIGIN);
                    let mut bg = (f64::NEG_INFINITY, Point2::ORIGIN);
                    for &x in &nodes {
                        let p = Point2::new(x, y);
                        let v = value(p);
                        if v > bv.0 {
                            bv = (v, p);
                        }
                        let g = grad(p);
                        if g > bg.0 {
                            bg = (g, p);
                        }
                    }
                    (bv, bg)
                })
                .collect();
            let v = per_y
                .iter()
                .map(|r| r.0)
                .max_by(|a, b| a.0.total_cmp(&b.0))
                .expect("nonempty");
            let g = per_y
                .iter()
                .map(|r| r.1)
                .max_by(|a, b| a.0.total_cmp(&b.0))
                .expect("nonempty");
            (v, g)
        }
    };
    let step = grid.radius / grid.radii as f64;
    let dim = f.dim();
    let (sup_v, argmax) = polish_max(&value, best_v.1, step, dim);
    let (sup_g, _) = polish_max(&grad, best_g.1, step, dim);
    let ratio = BergmanRatio {
        sup_ratio: sup_v.max(best_v.0) / norm_sqr,
        gradient_ratio: sup_g.max(best_g.0).powi(2) / norm_sqr,
        norm_sqr,
        argmax,
    };
    if !ratio.sup_ratio.is_finite() || !ratio.gradient_ratio.is_finite() {
        return Err(Error::Range {
            degree: f.degree(),
            what: "Bergman ratio is not finite".into(),
        });
    }
    Ok(ratio)
}

type Field<'a> = Box<dyn Fn(Point2) -> f64 + Sync + 'a>;

fn pointwise_fields<'a>(f: FockPoly<'a>, w: &'a Weight) -> (Field<'a>, Field<'a>) {
    let q = w.matrix();
    // ∂φ/∂z_k = Σ_i z̄_i Q_ik
    let dphi = move |p: Point2| {
        let zb = p.conj();
        Point2::new(zb.x * q[0][0] + zb.y * q[1][0], zb.x * q[0][1] + zb.y * q[1][1])
    };
    match f {
        FockPoly::One(poly) => {
            let dpoly = poly.derivative();
            let value = move |p: Point2| poly.eval(p.x).norm_sqr() * (-w.eval1(p.x)).exp();
            let grad = move |p: Point2| {
                let fv = poly.eval(p.x);
                let dz = dpoly.eval(p.x) - fv * p.x.conj() * q[0][0].re;
                (-0.5 * w.eval1(p.x)).exp() * dz.norm()
            };
            (Box::new(value), Box::new(grad))
        }
        FockPoly::Two(poly) => {
            let value = move |p: Point2| poly.eval(p).norm_sqr() * (-w.eval(p)).exp();
            let grad = move |p: Point2| {
                let fv = poly.eval(p);
                let g = poly.gradient(p);
                let d = dphi(p);
                let a = g.x - fv * d.x;
                let b = g.y - fv * d.y;
                (-0.5 * w.eval(p)).exp() * (a.norm_sqr() + b.norm_sqr()).sqrt()
            };
            (Box::new(value), Box::new(grad))
        }
    }
}

/// Compass search over the real coordinates, starting at `start`.
fn polish_max(field: &dyn Fn(Point2) -> f64, start: Point2, step: f64, dim: usize) -> (f64, Point2) {
    let mut best = field(start);
    let mut at = start.to_reals();
    let mut h = step;
    let coords = if dim == 1 { 2 } else { 4 };
    while h > 1e-9 * step.max(1.0) {
        let mut improved = false;
        for i in 0..coords {
            for sign in [-1.0, 1.0] {
                let mut trial = at;
                trial[i] += sign * h;
                let v = field(Point2::from_reals(trial));
                if v > best {
                    best = v;
                    at = trial;
                    improved = true;
                }
            }
        }
        if !improved {
            h *= 0.5;
        }
    }
    (best, Point2::from_reals(at))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    // ∫_ℂ |z|^{2n} e^{-|z|²} dA = π n!, by direct radial quadrature.
    fn radial_oracle(n: i32) -> f64 {
        2.0 * PI
            * quad::integrate_to_infinity(|r| r.powi(2 * n + 1) * (-r * r).exp(), 0.0, Tolerance::rel(1e-13))
                .unwrap()
                .value
    }

    #[test]
    fn constant_has_norm_pi() {
        let v = fock_norm_sqr1(&Poly1::constant(c(1.0, 0.0))).unwrap();
        assert!((v - radial_oracle(0)).abs() < 1e-12);
        assert!((v - PI).abs() < 1e-14);
    }

    #[test]
    fn mixed_monomial_norm() {
        let p = Poly2::from_terms(&[((1, 2), c(1.0, 0.0))]);
        let v = fock_norm_sqr2(&p).unwrap();
        assert!((v - radial_oracle(1) * radial_oracle(2)).abs() < 1e-10);
        assert!((v - 2.0 * PI * PI).abs() < 1e-12);
    }

    #[test]
    fn zero_polynomial_has_zero_norm() {
        assert_eq!(fock_norm_sqr1(&Poly1::zero()).unwrap(), 0.0);
    }

    #[test]
    fn overflow_names_the_degree() {
        let p = Poly1::monomial(200, c(1e30, 0.0));
        match fock_norm_sqr1(&p) {
            Err(Error::Range { degree, .. }) => assert_eq!(degree, 200),
            other => panic!("expected range error, got {other:?}"),
        }
        // large degree with small coefficients stays representable
        assert!(fock_norm_sqr1(&Poly1::monomial(200, c(1e-190, 0.0))).unwrap().is_finite());
    }

    #[test]
    fn quad_norm_full_plane_examples() {
        let w = Weight::gaussian();
        let one = quad_norm(|_| c(1.0, 0.0), 1, Region::FullPlane, &w).unwrap();
        assert!((one.value - PI).abs() < 1e-10 * PI);
        let z = quad_norm(|p| p.x, 1, Region::FullPlane, &w).unwrap();
        assert!((z.value - PI).abs() < 1e-10 * PI);
    }

    #[test]
    fn quad_norm_on_empty_ball() {
        let w = Weight::gaussian();
        let v = quad_norm(|_| c(1.0, 0.0), 1, Region::Ball { center: Point2::ORIGIN, r: 0.0 }, &w).unwrap();
        assert_eq!(v.value, 0.0);
    }

    #[test]
    fn quad_norm_two_variables_matches_closed_form() {
        let p = Poly2::from_terms(&[((0, 0), c(0.5, 0.1)), ((2, 1), c(-0.3, 0.7)), ((0, 3), c(0.2, -0.2))]);
        let exact = fock_norm_sqr2(&p).unwrap();
        let q = quad_norm(|z| p.eval(z), 2, Region::FullPlane, &Weight::gaussian()).unwrap();
        assert!((q.value - exact).abs() < 1e-8 * exact, "{} vs {}", q.value, exact);
    }

    #[test]
    fn quad_norm_on_bidisk_matches_incomplete_gamma() {
        // ∫_{|x|<ε} e^{-|x|²} = π(1 - e^{-ε²}) per factor
        let eps: f64 = 0.4;
        let v = quad_norm(
            |_| c(1.0, 0.0),
            2,
            Region::Bidisk { center: Point2::ORIGIN, r: eps },
            &Weight::gaussian(),
        )
        .unwrap();
        let per = PI * (1.0 - (-eps * eps).exp());
        assert!((v.value - per * per).abs() < 1e-10 * per * per);
    }

    #[test]
    fn ball_average_closed_forms() {
        let r = 1.3;
        let one = ball_average(|p| p.x.norm_sqr(), Point2::ORIGIN, r, 1).unwrap();
        assert!((one.value - r * r / 2.0).abs() < 1e-12);
        let two = ball_average(|p| p.norm_sqr(), Point2::ORIGIN, r, 2).unwrap();
        assert!((two.value - 2.0 * r * r / 3.0).abs() < 1e-12);
        let c7 = ball_average(|_| 7.0, Point2::real(3.0, 1.0), r, 2).unwrap();
        assert!((c7.value - 7.0).abs() < 1e-12);
        assert!(ball_average(|_| 1.0, Point2::ORIGIN, -1.0, 2).is_err());
    }

    #[test]
    fn mean_value_property_for_pluriharmonic_fields() {
        let z = Point2::new(c(0.4, -1.2), c(2.0, 0.3));
        let fields: [fn(Point2) -> f64; 2] = [|p| p.x.re, |p| (p.x * p.y).re];
        for f in fields {
            let avg = ball_average(f, z, 0.9, 2).unwrap();
            assert!((avg.value - f(z)).abs() < 1e-10);
        }
    }

    #[test]
    fn bergman_ratio_examples() {
        let w = Weight::gaussian();
        let one = Poly1::constant(c(1.0, 0.0));
        let r = bergman_ratio(FockPoly::One(&one), &w, &PolarGrid::for_degree(0)).unwrap();
        assert!((r.sup_ratio - 1.0 / PI).abs() < 1e-12);
        let z = Poly1::monomial(1, c(1.0, 0.0));
        let r = bergman_ratio(FockPoly::One(&z), &w, &PolarGrid::for_degree(1)).unwrap();
        assert!((r.sup_ratio - (-1.0f64).exp() / PI).abs() < 1e-10);
        // |d(e^{-|z|²/2})| = |z| e^{-|z|²/2}, maximal value e^{-1/2} at |z| = 1
        let r = bergman_ratio(FockPoly::One(&one), &w, &PolarGrid::for_degree(1)).unwrap();
        assert!((r.gradient_ratio - (-1.0f64).exp() / PI).abs() < 1e-10);
        assert!(bergman_ratio(FockPoly::One(&Poly1::zero()), &w, &PolarGrid::for_degree(1)).is_err());
        let empty = PolarGrid { radii: 0, angles: 8, radius: 1.0 };
        assert!(bergman_ratio(FockPoly::One(&one), &w, &empty).is_err());
    }

    #[test]
    fn gradient_identity_matches_finite_differences() {
        let w = Weight::gaussian();
        let p = Poly2::from_terms(&[((0, 0), c(0.3, 0.2)), ((1, 1), c(1.0, -0.4)), ((0, 2), c(-0.5, 0.0))]);
        let (value, grad) = pointwise_fields(FockPoly::Two(&p), &w);
        let modulus = |r: [f64; 4]| value(Point2::from_reals(r)).sqrt();
        let at = [0.3, -0.5, 0.8, 0.1];
        let h = 1e-6;
        let mut g2 = 0.0;
        for i in 0..4 {
            let mut a = at;
            let mut b = at;
            a[i] += h;
            b[i] -= h;
            g2 += ((modulus(a) - modulus(b)) / (2.0 * h)).powi(2);
        }
        assert!((g2.sqrt() - grad(Point2::from_reals(at))).abs() < 1e-7);
    }
}
