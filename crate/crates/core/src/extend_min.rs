//! Minimal-norm polynomial extension from finitely many points, division by
//! linear forms, and the branch-by-branch extension across normal crossings.
//!
//! In the Gaussian Fock space of ℂ² the monomials are orthogonal with
//! `‖xᵐyⁿ‖² = π² m! n!`, so after scaling columns by `1/√(π² m! n!)` the
//! minimal-norm interpolant is the least-norm solution of a plain linear
//! system and its squared norm is the Euclidean norm of the solution.
//! A quadratic weight `z* Q z` reduces to this case through `w = Q^{1/2} z`.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{polar_integral, Region};
use crate::geometry::{datum_norm, make_crossing, Curve, LinearForm};
use crate::linalg::{least_norm, Mat2};
use crate::point::Point2;
use crate::poly::{ln_factorial, Poly1, Poly2};
use crate::weight::Weight;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

/// Constraint residual tolerance on unit-scaled data.
pub const RESIDUAL_TOL: f64 = 1e-8;
/// Relative vanishing threshold for divisibility witnesses.
pub const DIVISIBILITY_TOL: f64 = 1e-7;

/// Point evaluations `F(pᵢ) = vᵢ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstraintSet {
    pub points: Vec<Point2>,
    pub values: Vec<C64>,
    pub provenance: Vec<String>,
}

impl ConstraintSet {
    pub fn empty() -> Self {
        ConstraintSet {
            points: Vec::new(),
            values: Vec::new(),
            provenance: Vec::new(),
        }
    }

    /// Builds a constraint set, merging coincident points whose values agree.
    pub fn new(points: Vec<Point2>, values: Vec<C64>, provenance: Vec<String>) -> Result<Self> {
        if points.len() != values.len() || (!provenance.is_empty() && provenance.len() != points.len()) {
            return Err(Error::Domain("points, values and provenance differ in length".into()));
        }
        let mut cs = ConstraintSet::empty();
        for (i, (p, v)) in points.into_iter().zip(values).enumerate() {
            let label = provenance.get(i).cloned().unwrap_or_default();
            cs.push(p, v, label)?;
        }
        Ok(cs)
    }

    pub fn push(&mut self, p: Point2, v: C64, label: String) -> Result<()> {
        if !p.is_finite() || !v.is_finite() {
            return Err(Error::Domain(format!("non-finite constraint at {p:?}")));
        }
        if let Some(k) = self.points.iter().position(|q| q.dist(p) <= 1e-9) {
            let scale = 1.0 + v.norm().max(self.values[k].norm());
            if (self.values[k] - v).norm() > 1e-9 * scale {
                return Err(Error::Consistency {
                    at: p,
                    detail: format!(
                        "values {:?} ({}) and {:?} ({label}) disagree",
                        self.values[k], self.provenance[k], v
                    ),
                });
            }
            return Ok(());
        }
        self.points.push(p);
        self.values.push(v);
        self.provenance.push(label);
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// `Σ |vᵢ|² e^{-φ(pᵢ)}`.
    pub fn discrete_norm_sqr(&self, w: &Weight) -> f64 {
        self.points
            .iter()
            .zip(&self.values)
            .map(|(p, v)| v.norm_sqr() * (-w.eval(*p)).exp())
            .sum()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtensionResult {
    pub f: Poly2,
    /// `max |F(pᵢ) - vᵢ|`.
    pub datum_residual: f64,
    pub fock_norm_sqr: f64,
    pub datum_norm_sqr: f64,
    pub ratio: f64,
    pub rank: usize,
    pub sigma_min: f64,
}

fn hermitian_sqrt(q: &Mat2) -> Mat2 {
    // √M = (M + √det I) / √(tr M + 2√det) for 2×2 positive definite M
    let det = (q[0][0] * q[1][1] - q[0][1] * q[1][0]).re;
    let sd = det.sqrt();
    let t = (q[0][0].re + q[1][1].re + 2.0 * sd).sqrt();
    [
        [(q[0][0] + sd) / t, q[0][1] / t],
        [q[1][0] / t, (q[1][1] + sd) / t],
    ]
}

/// `G(z) = P(A z)` for a 2×2 matrix `A`.
pub fn compose_linear(p: &Poly2, a: &Mat2) -> Poly2 {
    let lx = Poly2::linear(a[0][0], a[0][1], ZERO);
    let ly = Poly2::linear(a[1][0], a[1][1], ZERO);
    let d = p.degree();
    let mut xp = vec![Poly2::constant(ONE)];
    let mut yp = vec![Poly2::constant(ONE)];
    for k in 1..=d {
        xp.push(xp[k - 1].mul(&lx));
        yp.push(yp[k - 1].mul(&ly));
    }
    let mut out = Poly2::zero(d);
    for ((m, n), c) in p.terms() {
        out = out.add(&xp[m].mul(&yp[n]).scale(c));
    }
    out
}

/// The polynomial of total degree `≤ degree` of least weighted norm with
/// `F(pᵢ) = vᵢ`.
pub fn minimal_extension(cs: &ConstraintSet, degree: usize, w: &Weight) -> Result<ExtensionResult> {
    let datum = cs.discrete_norm_sqr(w);
    if cs.is_empty() {
        return Ok(ExtensionResult {
            f: Poly2::zero(degree),
            datum_residual: 0.0,
            fock_norm_sqr: 0.0,
            datum_norm_sqr: 0.0,
            ratio: 0.0,
            rank: 0,
            sigma_min: f64::INFINITY,
        });
    }
    let (a, det_a) = match w {
        Weight::Gaussian => (None, 1.0),
        Weight::QuadraticForm { q } => {
            let a = hermitian_sqrt(q);
            let det = (a[0][0] * a[1][1] - a[0][1] * a[1][0]).norm();
            (Some(a), det)
        }
    };
    let pts: Vec<Point2> = match &a {
        Some(a) => cs.points.iter().map(|p| p.transform(a)).collect(),
        None => cs.points.clone(),
    };
    let exps: Vec<(usize, usize)> = Poly2::exponents(degree).collect();
    let ln_scale: Vec<f64> = exps
        .iter()
        .map(|&(m, n)| -0.5 * (2.0 * PI.ln() + ln_factorial(m) + ln_factorial(n)))
        .collect();
    let mat = DMatrix::from_fn(pts.len(), exps.len(), |i, k| {
        let (m, n) = exps[k];
        let p = pts[i];
        p.x.powu(m as u32) * p.y.powu(n as u32) * ln_scale[k].exp()
    });
    let sol = least_norm(&mat, &cs.values, 1e-12, RESIDUAL_TOL)?;
    let coeffs: Vec<C64> = sol
        .solution
        .iter()
        .zip(&ln_scale)
        .map(|(y, ls)| y * ls.exp())
        .collect();
    let g = Poly2::from_coeffs(degree, coeffs);
    let norm: f64 = sol.solution.iter().map(|y| y.norm_sqr()).sum::<f64>() / (det_a * det_a);
    let f = match &a {
        Some(a) => compose_linear(&g, a),
        None => g,
    };
    let datum_residual = cs
        .points
        .iter()
        .zip(&cs.values)
        .map(|(p, v)| (f.eval(*p) - v).norm())
        .fold(0.0, f64::max);
    if datum_residual > RESIDUAL_TOL * cs.values.iter().map(|v| v.norm()).fold(1.0, f64::max) {
        return Err(Error::IllPosed {
            sigma: sol.sigma_min_kept,
            residual: datum_residual,
        });
    }
    Ok(ExtensionResult {
        f,
        datum_residual,
        fock_norm_sqr: norm,
        datum_norm_sqr: datum,
        ratio: if datum > 0.0 { norm / datum } else { 0.0 },
        rank: sol.rank,
        sigma_min: sol.sigma_min_kept,
    })
}

/// Minimal interpolant in the full Gaussian Fock space of ℂ²:
/// `F = Σ αⱼ K(·, pⱼ)` with `K(z, w) = e^{⟨z, w⟩}/π²`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelExtension {
    pub points: Vec<Point2>,
    pub alpha: Vec<C64>,
    pub norm_sqr: f64,
}

impl KernelExtension {
    pub fn eval(&self, z: Point2) -> C64 {
        self.points
            .iter()
            .zip(&self.alpha)
            .map(|(p, a)| a * z.dot(*p).exp())
            .sum::<C64>()
            / (PI * PI)
    }
}

pub fn kernel_extension(cs: &ConstraintSet) -> Result<KernelExtension> {
    let n = cs.len();
    let gram = DMatrix::from_fn(n, n, |i, j| cs.points[i].dot(cs.points[j]).exp() / (PI * PI));
    let rhs = nalgebra::DVector::from_column_slice(&cs.values);
    let chol = gram
        .clone()
        .cholesky()
        .ok_or_else(|| Error::IllPosed { sigma: 0.0, residual: f64::NAN })?;
    let alpha = chol.solve(&rhs);
    let norm = rhs.dotc(&alpha).re;
    Ok(KernelExtension {
        points: cs.points.clone(),
        alpha: alpha.iter().copied().collect(),
        norm_sqr: norm,
    })
}

/// `Σ |c_{mn}| |x|ᵐ |y|ⁿ`, the natural size of `G(p)`.
fn eval_scale(g: &Poly2, p: Point2) -> f64 {
    g.terms()
        .map(|((m, n), c)| c.norm() * p.x.norm().powi(m as i32) * p.y.norm().powi(n as i32))
        .sum()
}

fn swap_xy(g: &Poly2) -> Poly2 {
    let mut out = Poly2::zero(g.degree());
    for ((m, n), c) in g.terms() {
        out.set(n, m, c);
    }
    out
}

/// Quotient `Q` with `G = L·Q` and the residual `max |G - L·Q|` on a test grid.
pub fn branch_divide(g: &Poly2, l: &LinearForm) -> Result<(Poly2, f64)> {
    let (p0, dir) = l.point_and_direction();
    let d = g.degree();
    // vanishing on the line, starting at its point nearest the origin
    for k in 0..(2 * d + 1) {
        let t = if k == 0 {
            ZERO
        } else {
            C64::from_polar(1.0 + 0.5 * (k % 3) as f64, 2.0 * PI * k as f64 / (2 * d + 1) as f64)
        };
        let p = p0 + dir.scale(t);
        let v = g.eval(p);
        if v.norm() > DIVISIBILITY_TOL * (1.0 + eval_scale(g, p)) {
            return Err(Error::NotDivisible {
                witness: p,
                value: v.norm(),
            });
        }
    }
    let swapped = l.b.norm() > l.a.norm();
    let (gg, a, b, c) = if swapped {
        (swap_xy(g), l.b, l.a, l.c)
    } else {
        (g.clone(), l.a, l.b, l.c)
    };
    // G = Σ gₘ(y) xᵐ, L = a (x - r(y)), r(y) = -(b y + c)/a
    let r = Poly1::new(vec![-c / a, -b / a]);
    let coeff = |m: usize| Poly1::new((0..=d.saturating_sub(m)).map(|n| gg.get(m, n)).collect());
    let mut q: Vec<Poly1> = vec![Poly1::zero(); d.max(1)];
    if d > 0 {
        q[d - 1] = coeff(d);
        for m in (1..d).rev() {
            q[m - 1] = coeff(m).add(&r.mul(&q[m]));
        }
    }
    let mut quotient = Poly2::zero(d.saturating_sub(1));
    for (m, qm) in q.iter().enumerate().take(d) {
        for (n, &cf) in qm.coeffs.iter().enumerate() {
            if cf != ZERO {
                quotient.set(m, n, cf / a);
            }
        }
    }
    if swapped {
        quotient = swap_xy(&quotient);
    }
    let lp = Poly2::linear(l.a, l.b, l.c);
    let prod = lp.mul(&quotient);
    let mut resid: f64 = 0.0;
    let mut scale: f64 = 0.0;
    for i in 0..7 {
        for j in 0..7 {
            let p = Point2::real(-1.5 + 0.5 * i as f64, -1.5 + 0.5 * j as f64);
            resid = resid.max((g.eval(p) - prod.eval(p)).norm());
            scale = scale.max(eval_scale(g, p));
        }
    }
    if resid > 1e-9 * scale.max(1e-300) && resid > 0.0 {
        return Err(Error::NotDivisible {
            witness: p0,
            value: resid,
        });
    }
    Ok((quotient, resid))
}

/// Extension across a union of lines, one branch at a time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrossingExtension {
    pub result: ExtensionResult,
    pub order: Vec<usize>,
    /// `max |F - fᵢ| / max |fᵢ|` on each branch.
    pub branch_residuals: Vec<f64>,
    pub branch_datum_norms: Vec<f64>,
    /// `‖F‖² / Σᵢ ‖fᵢ‖²_{Wᵢ}`.
    pub c_run: f64,
}

/// Per-branch datum, evaluated at points of that branch.
pub type BranchDatum<'a> = &'a (dyn Fn(Point2) -> C64 + Sync);

/// Fits the polynomial `σ ↦ h(σ)` of degree `≤ d` from `m ≥ 2(d+1)` samples on
/// the unit circle, rejecting data with energy above degree `d`.
fn fit_on_circle(h: impl Fn(C64) -> C64, d: usize) -> Result<Poly1> {
    let m = 2 * (d + 1);
    let samples: Vec<C64> = (0..m)
        .map(|k| h(C64::from_polar(1.0, 2.0 * PI * k as f64 / m as f64)))
        .collect();
    let scale = samples.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let coef = |n: usize| {
        samples
            .iter()
            .enumerate()
            .map(|(k, v)| v * C64::from_polar(1.0, -2.0 * PI * (k * n) as f64 / m as f64))
            .sum::<C64>()
            / m as f64
    };
    let coeffs: Vec<C64> = (0..=d).map(coef).collect();
    let alias = (d + 1..m).map(|n| coef(n).norm()).fold(0.0, f64::max);
    if alias > 1e-9 * scale.max(1e-300) {
        return Err(Error::Bandwidth {
            residual: alias / scale,
        });
    }
    Ok(Poly1::new(coeffs))
}

fn trim(p: &Poly1, rel: f64) -> Poly1 {
    let scale = p.max_abs_coeff();
    let mut c = p.coeffs.clone();
    while c.len() > 1 && c.last().map_or(false, |v| v.norm() <= rel * scale) {
        c.pop();
    }
    Poly1::new(c)
}

/// Extends per-branch data on a union of lines, in the given branch order.
/// Data must be polynomial of degree `≤ degree` along each line.
pub fn crossing_extend(
    data: &[BranchDatum<'_>],
    curve: &Curve,
    degree: usize,
    order: Option<&[usize]>,
    w: &Weight,
) -> Result<CrossingExtension> {
    let forms = curve
        .line_forms()
        .ok_or_else(|| Error::Domain("crossing extension needs a union of lines".into()))?;
    if data.len() != forms.len() {
        return Err(Error::Domain(format!(
            "{} data for {} branches",
            data.len(),
            forms.len()
        )));
    }
    let order: Vec<usize> = match order {
        Some(o) => o.to_vec(),
        None => (0..forms.len()).collect(),
    };
    let mut f_acc = Poly2::zero(0);
    let mut done: Vec<usize> = Vec::new();
    for &j in &order {
        let (p0, dir) = forms[j].point_and_direction();
        let on = |s: C64| p0 + dir.scale(s);
        let fj = data[j];
        let star = fit_on_circle(|s| fj(on(s)) - f_acc.eval(on(s)), degree + done.len())?;
        let scale = 1.0 + star.max_abs_coeff();
        let mut quotient = star.clone();
        let mut product = Poly2::constant(ONE);
        for &i in &done {
            let li = &forms[i];
            // Tᵢ(p0 + σ dir) = α σ + β
            let alpha = li.a * dir.x + li.b * dir.y;
            let beta = li.eval(p0);
            if alpha.norm() <= 1e-14 * li.gradient().norm() {
                quotient = quotient.scale(beta.inv());
            } else {
                let root = -beta / alpha;
                let (q, rem) = quotient.deflate(root);
                let tol = DIVISIBILITY_TOL * scale * (1.0 + root.norm()).powi(quotient.coeffs.len() as i32);
                if rem.norm() > tol {
                    return Err(Error::Consistency {
                        at: on(root),
                        detail: format!(
                            "data on branches {i} and {j} disagree at their intersection (mismatch {:.3e})",
                            rem.norm()
                        ),
                    });
                }
                quotient = q.scale(alpha.inv());
            }
            product = product.mul(&Poly2::linear(li.a, li.b, li.c));
        }
        let quotient = trim(&quotient, 1e-13);
        let dq = quotient.len_degree().unwrap_or(0);
        let mut cs = ConstraintSet::empty();
        let m = 2 * (dq + 1);
        for k in 0..m {
            let s = C64::from_polar(1.0, 2.0 * PI * k as f64 / m as f64);
            cs.push(on(s), quotient.eval(s), format!("branch {j}"))?;
        }
        let h = minimal_extension(&cs, dq, w)?;
        f_acc = f_acc.add(&h.f.mul(&product));
        done.push(j);
    }
    let mut branch_residuals = Vec::with_capacity(forms.len());
    let mut branch_datum_norms = Vec::with_capacity(forms.len());
    for (j, form) in forms.iter().enumerate() {
        let (p0, dir) = form.point_and_direction();
        let mut worst: f64 = 0.0;
        let mut scale: f64 = 0.0;
        for k in 0..64 {
            let s = C64::from_polar(0.5 + (k % 4) as f64, 2.0 * PI * k as f64 / 64.0);
            let p = p0 + dir.scale(s);
            let v = data[j](p);
            scale = scale.max(v.norm());
            worst = worst.max((f_acc.eval(p) - v).norm());
        }
        branch_residuals.push(if scale > 0.0 { worst / scale } else { worst });
        let single = make_crossing(&[*form])?;
        branch_datum_norms.push(datum_norm(data[j], &single, w, &Region::FullPlane)?.value);
    }
    let fock = fock_norm_weighted(&f_acc, w)?;
    let datum: f64 = branch_datum_norms.iter().sum();
    let result = ExtensionResult {
        datum_residual: branch_residuals.iter().cloned().fold(0.0, f64::max),
        fock_norm_sqr: fock,
        datum_norm_sqr: datum,
        ratio: if datum > 0.0 { fock / datum } else { 0.0 },
        rank: 0,
        sigma_min: f64::NAN,
        f: f_acc,
    };
    Ok(CrossingExtension {
        c_run: result.ratio,
        result,
        order,
        branch_residuals,
        branch_datum_norms,
    })
}

/// `∫ |F|² e^{-φ} dV` for a quadratic weight.
pub fn fock_norm_weighted(f: &Poly2, w: &Weight) -> Result<f64> {
    match w {
        Weight::Gaussian => crate::fock::fock_norm_sqr2(f),
        Weight::QuadraticForm { q } => {
            let a = hermitian_sqrt(q);
            let det = (a[0][0] * a[1][1] - a[0][1] * a[1][0]).norm();
            // F(z) = G(A z) with G = F ∘ A⁻¹
            let inv_det = C64::new(1.0, 0.0) / (a[0][0] * a[1][1] - a[0][1] * a[1][0]);
            let ainv = [
                [a[1][1] * inv_det, -a[0][1] * inv_det],
                [-a[1][0] * inv_det, a[0][0] * inv_det],
            ];
            Ok(crate::fock::fock_norm_sqr2(&compose_linear(f, &ainv))? / (det * det))
        }
    }
}

/// Both sides of the denominator-clearing estimate on branch `j`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DenomCheck {
    /// `∫_{Wⱼ ∩ B(0, shrink·R)} |g|² e^{-φ} / |T₁⋯T_{j-1}|² dA`.
    pub lhs: f64,
    /// `∫_{Wⱼ} |g|² e^{-φ} dA`.
    pub rhs: f64,
    pub ratio: f64,
}

/// Dyadic shells around each intersection with earlier branches detect
/// non-integrable `1/|T|²` singularities.
pub fn denom_clear_check<G>(g: G, curve: &Curve, j: usize, radius: f64, shrink: f64, w: &Weight) -> Result<DenomCheck>
where
    G: Fn(Point2) -> C64 + Sync,
{
    let forms = curve
        .line_forms()
        .ok_or_else(|| Error::Domain("denominator check needs a union of lines".into()))?;
    if j >= forms.len() {
        return Err(Error::Domain(format!("branch {j} out of range")));
    }
    if !(shrink > 0.0 && shrink <= 1.0) || !(radius > 0.0) {
        return Err(Error::Domain("need radius > 0 and shrink in (0, 1]".into()));
    }
    let (p0, dir) = forms[j].point_and_direction();
    let on = |s: C64| p0 + dir.scale(s);
    let earlier = &forms[..j];
    let denom = |p: Point2| earlier.iter().map(|f| f.eval(p)).product::<C64>().norm_sqr();
    let integrand = |s: C64| {
        let p = on(s);
        let v = g(p).norm_sqr();
        if v == 0.0 {
            return 0.0;
        }
        v * (-w.eval(p)).exp() / denom(p)
    };
    let plain = |s: C64| {
        let p = on(s);
        g(p).norm_sqr() * (-w.eval(p)).exp()
    };
    let rhs = polar_integral(plain, ZERO, 0.0, None, 1e-9)?.value;
    for f in earlier {
        let alpha = f.a * dir.x + f.b * dir.y;
        if alpha.norm() == 0.0 {
            continue;
        }
        let root = -f.eval(p0) / alpha;
        let mut shells = Vec::new();
        for k in 4..10 {
            let hi = 2f64.powi(-k);
            let v = polar_integral(integrand, root, 0.5 * hi, Some(hi), 1e-8)?.value;
            shells.push(v);
        }
        let (a, b) = (shells[shells.len() - 2], shells[shells.len() - 1]);
        if a > 0.0 {
            let ratio = b / a;
            if ratio > 0.7 {
                return Err(Error::Integrability { at: on(root), ratio });
            }
        }
    }
    let lhs = polar_integral(integrand, ZERO, 0.0, Some(shrink * radius), 1e-8)?.value;
    Ok(DenomCheck {
        lhs,
        rhs,
        ratio: if rhs > 0.0 { lhs / rhs } else { 0.0 },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn single_point_constraint() {
        let cs = ConstraintSet::new(vec![Point2::ORIGIN], vec![c(1.0)], vec![]).unwrap();
        for d in [0, 3, 7] {
            let r = minimal_extension(&cs, d, &Weight::gaussian()).unwrap();
            assert!((r.f.eval(Point2::real(0.3, -0.2)) - c(1.0)).norm() < 1e-12);
            assert!((r.fock_norm_sqr - PI * PI).abs() < 1e-10);
        }
        let k = kernel_extension(&cs).unwrap();
        assert!((k.norm_sqr - PI * PI).abs() < 1e-10);
    }

    #[test]
    fn empty_and_conflicting_sets() {
        let r = minimal_extension(&ConstraintSet::empty(), 4, &Weight::gaussian()).unwrap();
        assert_eq!(r.fock_norm_sqr, 0.0);
        let bad = ConstraintSet::new(vec![Point2::ORIGIN, Point2::ORIGIN], vec![c(1.0), c(0.0)], vec![]);
        assert!(matches!(bad, Err(Error::Consistency { .. })));
    }

    #[test]
    fn divide_examples() {
        let g = Poly2::from_terms(&[((2, 0), c(1.0)), ((1, 1), c(2.0))]);
        let (q, r) = branch_divide(&g, &LinearForm::x()).unwrap();
        assert!(r < 1e-12);
        assert!((q.get(1, 0) - c(1.0)).norm() < 1e-14 && (q.get(0, 1) - c(2.0)).norm() < 1e-14);
        let bad = Poly2::from_terms(&[((1, 0), c(1.0)), ((0, 0), c(0.01))]);
        match branch_divide(&bad, &LinearForm::x()) {
            Err(Error::NotDivisible { witness, .. }) => assert_eq!(witness, Point2::ORIGIN),
            other => panic!("{other:?}"),
        }
        let l = Poly2::linear(c(1.0), c(1.0), ZERO);
        let q0 = Poly2::from_terms(&[((1, 0), c(1.0)), ((0, 2), c(-3.0))]);
        let (q, _) = branch_divide(&l.mul(&q0), &LinearForm::new(c(1.0), c(1.0), ZERO)).unwrap();
        for ((m, n), v) in q0.terms() {
            assert!((q.get(m, n) - v).norm() < 1e-12);
        }
    }

    #[test]
    fn quadratic_weight_matches_gaussian_after_scaling() {
        // φ = 2|z|²: ‖1‖² = π²/4
        let q = [[c(2.0), ZERO], [ZERO, c(2.0)]];
        let w = Weight::quadratic(q).unwrap();
        let cs = ConstraintSet::new(vec![Point2::ORIGIN], vec![c(1.0)], vec![]).unwrap();
        let r = minimal_extension(&cs, 3, &w).unwrap();
        assert!((r.fock_norm_sqr - PI * PI / 4.0).abs() < 1e-10);
        let p = Poly2::from_terms(&[((1, 1), c(1.0))]);
        // ∫|xy|² e^{-2|z|²} = (π/4)²
        assert!((fock_norm_weighted(&p, &w).unwrap() - (PI / 4.0).powi(2)).abs() < 1e-12);
    }
}
