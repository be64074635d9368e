//! Explicit extension from the model hyperbola `W_s = {xy = s}`.
//!
//! A datum on `W_s` pulls back along `t ↦ (t, s/t)` to a Laurent series
//! `Σ aₙ tⁿ`, and `F(x, y) = a₀ + Σ_{n>0} (aₙ xⁿ + s⁻ⁿ a₋ₙ yⁿ)` restricts to
//! it. With the area measure on the curve,
//!
//! ```text
//! ∫_{W_s} |f|² e^{-|z|²} dA = 2 Σ |aₙ|² C_{n,|s|},
//! C_{j,|s|} = π ∫₀^∞ r^{2j} (1 + |s|² r⁻⁴) e^{-(r² + |s|²/r²)} r dr.
//! ```

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use rayon::prelude::*;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::point::Point2;
use crate::poly::{ln_factorial, Poly1, Poly2};
use crate::quad::{self, Estimate, Tolerance};
use crate::report::Table;

pub const DEFAULT_TERMS: usize = 32;
pub const DEFAULT_NODES: usize = 512;

const ZERO: C64 = C64::new(0.0, 0.0);

/// Coefficients `aₙ`, `n ∈ [-N, N]`, of a datum pulled back to `ℂ*`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LaurentSeries {
    /// `coeffs[n + N] = aₙ`.
    pub coeffs: Vec<C64>,
    pub n: usize,
    pub s: C64,
    pub contour_radius: f64,
    /// Relative reconstruction error at the contour midpoints.
    pub residual: f64,
}

impl LaurentSeries {
    pub fn from_coeffs(s: C64, coeffs: Vec<C64>) -> Result<Self> {
        if coeffs.len() % 2 == 0 || coeffs.len() < 3 {
            return Err(Error::Domain("Laurent coefficients need odd length 2N+1 with N ≥ 1".into()));
        }
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::Domain("non-finite Laurent coefficient".into()));
        }
        let n = coeffs.len() / 2;
        Ok(LaurentSeries {
            coeffs,
            n,
            s,
            contour_radius: s.norm().sqrt(),
            residual: 0.0,
        })
    }

    pub fn get(&self, k: i64) -> C64 {
        let idx = k + self.n as i64;
        if idx < 0 || idx as usize >= self.coeffs.len() {
            ZERO
        } else {
            self.coeffs[idx as usize]
        }
    }

    pub fn eval(&self, t: C64) -> C64 {
        let mut acc = ZERO;
        let mut pw = C64::new(1.0, 0.0);
        for k in 0..=self.n {
            acc += self.get(k as i64) * pw;
            pw *= t;
        }
        let inv = t.inv();
        let mut pw = inv;
        for k in 1..=self.n {
            acc += self.get(-(k as i64)) * pw;
            pw *= inv;
        }
        acc
    }

    /// `Σ |aₙ|² wₙ` for per-index weights.
    fn weighted_sum(&self, weight: impl Fn(i64) -> Result<f64>) -> Result<f64> {
        let mut total = 0.0;
        for k in -(self.n as i64)..=self.n as i64 {
            let a = self.get(k).norm_sqr();
            if a > 0.0 {
                total += a * weight(k)?;
            }
        }
        Ok(total)
    }

    /// `∫_{W_s} |f|² e^{-|z|²} dA` from the coefficients.
    pub fn datum_norm_sqr(&self) -> Result<f64> {
        let sa = self.s.norm();
        self.weighted_sum(|k| Ok(2.0 * cjs(k, sa, None)?.value))
    }

    /// The same over the clipped curve `W_s(ε)`.
    pub fn clipped_datum_norm_sqr(&self, eps: f64) -> Result<f64> {
        let sa = self.s.norm();
        self.weighted_sum(|k| Ok(2.0 * cjs(k, sa, Some(eps))?.value))
    }
}

/// Laurent coefficients of `t ↦ f(t, s/t)` on the circle `|t| = √|s|`.
pub fn laurent_coeffs<F>(f: F, s: C64, n: usize, m_nodes: usize) -> Result<LaurentSeries>
where
    F: Fn(Point2) -> C64,
{
    laurent_coeffs_on(f, s, n, m_nodes, s.norm().sqrt())
}

pub fn laurent_coeffs_on<F>(f: F, s: C64, n: usize, m_nodes: usize, radius: f64) -> Result<LaurentSeries>
where
    F: Fn(Point2) -> C64,
{
    if s.norm() == 0.0 {
        return Err(Error::UseCrossing);
    }
    if n < 1 || m_nodes < 2 * n + 1 {
        return Err(Error::Domain(format!("need N ≥ 1 and at least 2N+1 nodes (N = {n}, nodes = {m_nodes})")));
    }
    if !(radius > 0.0) {
        return Err(Error::Domain(format!("contour radius must be positive, got {radius}")));
    }
    let on_curve = |t: C64| f(Point2::new(t, s / t));
    let node = |k: f64| C64::from_polar(radius, 2.0 * PI * k / m_nodes as f64);
    let mut buf: Vec<C64> = (0..m_nodes).map(|k| on_curve(node(k as f64))).collect();
    if buf.iter().any(|v| !v.is_finite()) {
        return Err(Error::Domain("datum is not finite on the contour".into()));
    }
    let scale = buf.iter().map(|v| v.norm()).fold(0.0, f64::max);
    FftPlanner::new().plan_fft_forward(m_nodes).process(&mut buf);
    let mut coeffs = vec![ZERO; 2 * n + 1];
    for k in -(n as i64)..=n as i64 {
        let idx = k.rem_euclid(m_nodes as i64) as usize;
        let c = buf[idx] / (m_nodes as f64 * radius.powi(k as i32));
        coeffs[(k + n as i64) as usize] = c;
    }
    let mut series = LaurentSeries {
        coeffs,
        n,
        s,
        contour_radius: radius,
        residual: 0.0,
    };
    let mut worst: f64 = 0.0;
    for k in 0..m_nodes {
        let t = node(k as f64 + 0.5);
        worst = worst.max((series.eval(t) - on_curve(t)).norm());
    }
    series.residual = if scale > 0.0 { worst / scale } else { worst };
    if series.residual > 1e-6 {
        return Err(Error::Bandwidth { residual: series.residual });
    }
    Ok(series)
}

fn ln_1p_exp(y_ln: f64) -> f64 {
    // ln(1 + e^{y_ln})
    if y_ln > 30.0 {
        y_ln + (-y_ln).exp().ln_1p()
    } else {
        y_ln.exp().ln_1p()
    }
}

/// `C_{j,|s|}`, or its clipped version (radii in `(|s|/ε, ε)`) when `eps` is
/// given. Computed in `u = ln r` to `1e-10` relative.
pub fn cjs(j: i64, s_abs: f64, eps: Option<f64>) -> Result<Estimate> {
    if !(s_abs > 0.0) || !s_abs.is_finite() {
        return Err(Error::Domain(format!("|s| must be a positive real, got {s_abs}")));
    }
    let ls = s_abs.ln();
    // log of the integrand in u
    let h = |u: f64| {
        (2 * j + 2) as f64 * u - (2.0 * u).exp() - (2.0 * ls - 2.0 * u).exp() + ln_1p_exp(2.0 * ls - 4.0 * u)
    };
    let (lo_lim, hi_lim) = match eps {
        Some(e) => {
            if !(e > 0.0) || e * e <= s_abs {
                return Err(Error::Domain(format!("clipping needs ε² > |s| (ε = {e:?}, |s| = {s_abs})")));
            }
            (ls - e.ln(), e.ln())
        }
        None => (f64::NEG_INFINITY, f64::INFINITY),
    };
    // peak of r^{2j+2} e^{-(r² + s²/r²)}
    let jp = (j + 1) as f64;
    let x = 0.5 * (jp + (jp * jp + 4.0 * s_abs * s_abs).sqrt());
    let u0 = (0.5 * x.ln()).clamp(lo_lim, hi_lim);
    let step = 0.25;
    let mut hmax = h(u0);
    let walk = |dir: f64, hmax: &mut f64| {
        let mut pts = vec![u0];
        let mut u = u0;
        loop {
            let next = u + dir * step;
            let beyond = if dir > 0.0 { next >= hi_lim } else { next <= lo_lim };
            if beyond {
                pts.push(if dir > 0.0 { hi_lim } else { lo_lim });
                break;
            }
            u = next;
            pts.push(u);
            let v = h(u);
            if v > *hmax {
                *hmax = v;
            }
            // past the peak region and far below the maximum
            if v < *hmax - 760.0 && (if dir > 0.0 { u > 0.5 * x.ln() } else { u < ls }) {
                break;
            }
        }
        pts
    };
    let right = walk(1.0, &mut hmax);
    let left = walk(-1.0, &mut hmax);
    if !hmax.is_finite() {
        return Err(Error::Range {
            degree: j.unsigned_abs() as usize,
            what: "C constant integrand".into(),
        });
    }
    let mut breaks: Vec<f64> = left.into_iter().rev().chain(right.into_iter().skip(1)).collect();
    breaks.dedup();
    let g = |u: f64| (h(u) - hmax).exp();
    let pieces: Vec<Result<Estimate>> = breaks
        .windows(2)
        .map(|w| quad::integrate(&g, w[0], w[1], Tolerance::rel(1e-12).with_abs(1e-16)))
        .collect();
    let mut sum = Estimate::default();
    for p in pieces {
        let p = p?;
        sum.value += p.value;
        sum.abs_err += p.abs_err;
    }
    let ln_value = PI.ln() + hmax + sum.value.ln();
    if ln_value > 709.0 {
        return Err(Error::Range {
            degree: j.unsigned_abs() as usize,
            what: format!("C_{{{j},{s_abs}}} overflows"),
        });
    }
    let value = ln_value.exp();
    Ok(Estimate::new(value, value * sum.abs_err / sum.value))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CjsEntry {
    pub j: i64,
    pub s_abs: f64,
    pub eps: Option<f64>,
    pub value: f64,
    pub err: f64,
    /// `|C_j - |s|^{2j} C_{-j}| / C_j` for the unclipped constants.
    pub identity_residual: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CjsTable {
    pub entries: Vec<CjsEntry>,
}

impl CjsTable {
    pub fn build(js: &[i64], s_values: &[f64], eps: Option<f64>) -> Result<Self> {
        let jobs: Vec<(i64, f64)> = s_values
            .iter()
            .flat_map(|&s| js.iter().map(move |&j| (j, s)))
            .collect();
        let entries: Vec<Result<CjsEntry>> = jobs
            .par_iter()
            .map(|&(j, s)| {
                let c = cjs(j, s, eps)?;
                let identity_residual = match eps {
                    None => {
                        let mirror = cjs(-j, s, None)?;
                        let other = ((2 * j) as f64 * s.ln() + mirror.value.ln()).exp();
                        Some((c.value - other).abs() / c.value)
                    }
                    Some(_) => None,
                };
                Ok(CjsEntry {
                    j,
                    s_abs: s,
                    eps,
                    value: c.value,
                    err: c.abs_err,
                    identity_residual,
                })
            })
            .collect();
        Ok(CjsTable {
            entries: entries.into_iter().collect::<Result<_>>()?,
        })
    }

    pub fn to_table(&self) -> Table {
        let mut t = Table::new(&["j", "s_abs", "eps", "value", "err", "identity_residual"]);
        for e in &self.entries {
            t.push(vec![
                e.j.into(),
                e.s_abs.into(),
                e.eps.map_or(f64::NAN, |v| v).into(),
                e.value.into(),
                e.err.into(),
                e.identity_residual.map_or(f64::NAN, |v| v).into(),
            ]);
        }
        t
    }
}

/// The extension `F = X(x) + Y(y)` of a Laurent datum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelExtension {
    pub s: C64,
    /// `a₀, a₁, …, a_N`.
    pub x_tail: Poly1,
    /// `0, s⁻¹a₋₁, …, s⁻ᴺa₋ᴺ`.
    pub y_tail: Poly1,
    /// `∫_{ℂ²} |F|² e^{-|z|²} dV`.
    pub norm_sqr: f64,
}

impl ModelExtension {
    pub fn eval(&self, p: Point2) -> C64 {
        self.x_tail.eval(p.x) + self.y_tail.eval(p.y)
    }

    pub fn to_poly2(&self) -> Poly2 {
        Poly2::from_x(&self.x_tail).add(&Poly2::from_y(&self.y_tail))
    }

    /// `max |F(t, s/t) - f(t, s/t)| / max |f|` over `m` contour points.
    pub fn restriction_residual<F: Fn(Point2) -> C64>(&self, f: F, radius: f64, m: usize) -> f64 {
        let mut worst: f64 = 0.0;
        let mut scale: f64 = 0.0;
        for k in 0..m {
            let t = C64::from_polar(radius, 2.0 * PI * (k as f64 + 0.25) / m as f64);
            let p = Point2::new(t, self.s / t);
            let v = f(p);
            scale = scale.max(v.norm());
            worst = worst.max((self.eval(p) - v).norm());
        }
        if scale > 0.0 {
            worst / scale
        } else {
            worst
        }
    }
}

/// Builds `F(x, y) = a₀ + Σ_{n>0} (aₙ xⁿ + s⁻ⁿ a₋ₙ yⁿ)` and its Fock norm
/// `π² (Σ_{n≥0} |aₙ|² n! + Σ_{n>0} |a₋ₙ|² |s|⁻²ⁿ n!)`.
pub fn model_extend(a: &LaurentSeries) -> Result<ModelExtension> {
    let s = a.s;
    if s.norm() == 0.0 {
        return Err(Error::UseCrossing);
    }
    let ls = s.norm().ln();
    let mut y = vec![ZERO; a.n + 1];
    let mut ln_terms: Vec<f64> = Vec::with_capacity(2 * a.n + 1);
    for k in 0..=a.n {
        let c = a.get(k as i64);
        if c.norm() > 0.0 {
            ln_terms.push(2.0 * c.norm().ln() + ln_factorial(k));
        }
    }
    for k in 1..=a.n {
        let c = a.get(-(k as i64));
        if c.norm() == 0.0 {
            continue;
        }
        let ln_mod = c.norm().ln() - k as f64 * ls;
        if ln_mod > 709.0 {
            return Err(Error::Range {
                degree: k,
                what: "y-tail coefficient s⁻ⁿa₋ₙ".into(),
            });
        }
        let phase = c.arg() - k as f64 * s.arg();
        y[k] = C64::from_polar(ln_mod.exp(), phase);
        ln_terms.push(2.0 * ln_mod + ln_factorial(k));
    }
    let norm_sqr = if ln_terms.is_empty() {
        0.0
    } else {
        let m = ln_terms.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let ln_total = 2.0 * PI.ln() + m + ln_terms.iter().map(|t| (t - m).exp()).sum::<f64>().ln();
        if ln_total > 709.0 {
            return Err(Error::Range {
                degree: a.n,
                what: "Fock norm of the extension".into(),
            });
        }
        ln_total.exp()
    };
    let x = (0..=a.n).map(|k| a.get(k as i64)).collect();
    Ok(ModelExtension {
        s,
        x_tail: Poly1::new(x),
        y_tail: Poly1::new(y),
        norm_sqr,
    })
}

/// `f_c(ζ) = f(ζ + c) exp(-⟨ζ, c⟩ - |c|²/2)`, where `⟨ζ, c⟩ = Σ ζᵢ c̄ᵢ`;
/// `|f_c(ζ)|² e^{-|ζ|²} = |f(ζ + c)|² e^{-|ζ + c|²}`.
pub fn twist<F>(f: F, c: Point2) -> impl Fn(Point2) -> C64
where
    F: Fn(Point2) -> C64,
{
    move |z: Point2| f(z + c) * (-z.dot(c) - 0.5 * c.norm_sqr()).exp()
}

/// Inverse of [`twist`]: `F(z) = F_c(z - c) exp(⟨z - c, c⟩ + |c|²/2)`.
pub fn untwist<F>(fc: F, c: Point2) -> impl Fn(Point2) -> C64
where
    F: Fn(Point2) -> C64,
{
    move |z: Point2| {
        let zeta = z - c;
        fc(zeta) * (zeta.dot(c) + 0.5 * c.norm_sqr()).exp()
    }
}

/// `γ(n+1, x) = ∫₀ˣ tⁿ e^{-t} dt` by its power series.
pub fn lower_gamma_int(n: usize, x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    let mut term = 1.0 / (n as f64 + 1.0);
    let mut sum = term;
    let mut k = 1.0;
    while term > 1e-17 * sum {
        term *= x / (n as f64 + 1.0 + k);
        sum += term;
        k += 1.0;
        if k > 10_000.0 {
            break;
        }
    }
    ((n as f64 + 1.0) * x.ln() - x).exp() * sum
}

/// Extension over the bidisk `Δ²_c(ε)` from the clipped translated curve
/// `{(x - c₁)(y - c₂) = s} ∩ Δ²_c(ε)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClippedExtension {
    pub s: C64,
    pub eps: f64,
    pub c: Point2,
    pub laurent: LaurentSeries,
    /// Extension of the recentered datum.
    pub centered: ModelExtension,
    /// `∫_{Δ²_c(ε)} |F|² e^{-|z|²} dV`.
    pub bidisk_norm_sqr: f64,
    /// `∫_{W_s(ε;c)} |f|² e^{-|z|²} dA`.
    pub datum_norm_sqr: f64,
    pub ratio: f64,
    pub bound: f64,
    pub holds: bool,
}

impl ClippedExtension {
    pub fn eval(&self, z: Point2) -> C64 {
        untwist(|p| self.centered.eval(p), self.c)(z)
    }
}

pub fn clipped_extend<F>(f: F, s: C64, eps: f64, c: Point2, n: usize, m_nodes: usize) -> Result<ClippedExtension>
where
    F: Fn(Point2) -> C64,
{
    if !(eps > 0.0) || eps * eps <= s.norm() {
        return Err(Error::Domain(format!("clipping needs ε² > |s| (ε = {eps}, |s| = {})", s.norm())));
    }
    let fc = twist(f, c);
    let laurent = laurent_coeffs(&fc, s, n, m_nodes)?;
    let centered = model_extend(&laurent)?;
    let e2 = eps * eps;
    let p0 = PI * lower_gamma_int(0, e2);
    let mut lhs = 0.0;
    for k in 0..=n {
        lhs += centered.x_tail.coeffs.get(k).map_or(0.0, |c| c.norm_sqr()) * PI * lower_gamma_int(k, e2) * p0;
    }
    for k in 1..=n {
        lhs += centered.y_tail.coeffs.get(k).map_or(0.0, |c| c.norm_sqr()) * PI * lower_gamma_int(k, e2) * p0;
    }
    let datum = laurent.clipped_datum_norm_sqr(eps)?;
    let ratio = if datum > 0.0 { lhs / datum } else { 0.0 };
    Ok(ClippedExtension {
        s,
        eps,
        c,
        laurent,
        centered,
        bidisk_norm_sqr: lhs,
        datum_norm_sqr: datum,
        ratio,
        bound: 2.0 * PI * datum,
        holds: lhs <= 2.0 * PI * datum,
    })
}

/// `ψₙ(z) = (-1)^{n+1} (z + nπ) sin z / (nπ)`, normalized so that
/// `(-1)^{n+1} ψₙ'(0) = 1`.
pub fn psi(n: i64, z: C64) -> C64 {
    let npi = n as f64 * PI;
    let sign = if n.rem_euclid(2) == 1 { 1.0 } else { -1.0 };
    sign * (z + npi) * z.sin() / npi
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PerturbationMap {
    pub n: i64,
    pub eps: f64,
    /// `sup_{|z|<ε} |(-1)^{n+1} ψₙ'(z) - 1|` by central differences.
    pub deviation: f64,
    /// `s` in `W ∩ Δ²_{(0,nπ)}(ε) = {x ψₙ(y - nπ) = s}`.
    pub s: f64,
}

impl PerturbationMap {
    pub fn eval(&self, z: C64) -> C64 {
        psi(self.n, z)
    }
}

pub fn perturbation_map(n: i64, eps: f64) -> Result<PerturbationMap> {
    if n == 0 {
        return Err(Error::Domain("n must be nonzero".into()));
    }
    if !(eps > 0.0) {
        return Err(Error::Domain(format!("ε must be positive, got {eps}")));
    }
    let sign = if n.rem_euclid(2) == 1 { 1.0 } else { -1.0 };
    let h = 1e-5;
    let mut dev: f64 = 0.0;
    for a in 0..=16 {
        let r = eps * a as f64 / 16.0 * (1.0 - 1e-9);
        for b in 0..32 {
            let z = C64::from_polar(r, 2.0 * PI * b as f64 / 32.0);
            let d = (psi(n, z + h) - psi(n, z - h)) / (2.0 * h);
            dev = dev.max((sign * d - 1.0).norm());
            if a == 0 {
                break;
            }
        }
    }
    Ok(PerturbationMap {
        n,
        eps,
        deviation: dev,
        // x (y sin y) = 1 with y sin y = -nπ ψₙ(y - nπ)
        s: -1.0 / (n as f64 * PI),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn laurent_of_coordinates() {
        let s = c(0.05, 0.02);
        let a = laurent_coeffs(|p| p.x, s, 4, 64).unwrap();
        for k in -4..=4 {
            let expect = if k == 1 { c(1.0, 0.0) } else { ZERO };
            assert!((a.get(k) - expect).norm() < 1e-12, "{k}");
        }
        let b = laurent_coeffs(|p| p.y, s, 4, 64).unwrap();
        assert!((b.get(-1) - s).norm() < 1e-14);
    }

    #[test]
    fn bandwidth_error_for_undersampled_data() {
        let s = c(0.1, 0.0);
        let r = laurent_coeffs(|p| (p.x * 40.0).exp(), s, 2, 8);
        assert!(matches!(r, Err(Error::Bandwidth { .. })));
    }

    #[test]
    fn cjs_small_cases() {
        // j = 0, s → 0: two bumps of mass π/2 each
        let c0 = cjs(0, 1e-6, None).unwrap().value;
        assert!((c0 - PI).abs() < 1e-4, "{c0}");
        let c3 = cjs(3, 1e-6, None).unwrap().value;
        assert!((c3 - 0.5 * PI * 6.0).abs() < 1e-4, "{c3}");
        let lo = cjs(2, 0.1, Some(0.5)).unwrap().value;
        let mid = cjs(2, 0.1, Some(1.0)).unwrap().value;
        let full = cjs(2, 0.1, None).unwrap().value;
        assert!(lo < mid && mid < full);
        assert!(cjs(0, 0.5, Some(0.5)).is_err());
    }

    #[test]
    fn model_extension_of_inverse() {
        let s = c(0.1, 0.0);
        let a = LaurentSeries::from_coeffs(s, vec![c(1.0, 0.0), ZERO, ZERO]).unwrap();
        let e = model_extend(&a).unwrap();
        assert!((e.eval(Point2::real(0.3, 0.7)) - c(7.0, 0.0)).norm() < 1e-12);
        assert!((e.norm_sqr - PI * PI * 100.0).abs() < 1e-9);
    }

    #[test]
    fn twist_round_trip() {
        let f = |p: Point2| p.x * p.y + 2.0;
        let c0 = Point2::new(c(0.5, -1.0), c(1.5, 0.2));
        let g = untwist(twist(f, c0), c0);
        let z = Point2::new(c(0.3, 0.1), c(-0.2, 0.4));
        assert!((g(z) - f(z)).norm() < 1e-12);
    }

    #[test]
    fn incomplete_gamma_series() {
        // γ(3, x) = 2 - e^{-x}(x² + 2x + 2)
        let x: f64 = 1.7;
        let exact = 2.0 - (-x).exp() * (x * x + 2.0 * x + 2.0);
        assert!((lower_gamma_int(2, x) - exact).abs() < 1e-14);
    }

    #[test]
    fn psi_normalization() {
        for n in [-3, -2, 1, 2, 7] {
            assert_eq!(psi(n, ZERO), ZERO);
            let m = perturbation_map(n, 1e-6).unwrap();
            assert!(m.deviation < 1e-6);
        }
        assert!(perturbation_map(0, 0.1).is_err());
    }
}
