//! Growth of minimal interpolation norms forced by the comb's closing gaps.
//!
//! After the Gaussian shift the hardest pair of constraints becomes
//! `F(0) = 1`, `F(-δ) = 0` with `δ = 1/k`, in the one-variable Fock space
//! with kernel `e^{z w̄}/π`. Its minimal norm² is `π e^{δ²} / (e^{δ²} - 1)`,
//! which grows like `π k²`.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::density::{upper_density, DensityReport};
use crate::error::{Error, Result};
use crate::geometry::{comb_abscissa, make_comb};
use crate::linalg::least_norm;
use crate::point::Point2;
use crate::poly::ln_factorial;
use crate::quad::{self, Estimate, Tolerance};
use crate::report::Table;
use crate::weight::Weight;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "kebab-case")]
pub enum Mode {
    /// Closed 2×2 Gram inverse in the full space.
    Kernel,
    /// Least-norm solve over polynomials of degree `≤ degree`.
    Truncated { degree: usize },
}

fn gap(k: usize) -> Result<f64> {
    if k == 0 {
        return Err(Error::Domain("k must be at least 1".into()));
    }
    Ok(1.0 / k as f64)
}

/// Minimal one-variable Fock norm² of `F` with `F(0) = 1`, `F(-1/k) = 0`.
pub fn comb_min_norm(k: usize, mode: Mode) -> Result<f64> {
    let d = gap(k)?;
    match mode {
        Mode::Kernel => {
            // v* G⁻¹ v with G = [[1, 1], [1, e^{δ²}]]/π, v = (1, 0)
            let e = (d * d).exp();
            Ok(PI * e / (d * d).exp_m1())
        }
        Mode::Truncated { degree } => {
            two_point_truncated(&[C64::new(0.0, 0.0), C64::new(-d, 0.0)], &[0.0, f64::NEG_INFINITY], degree)
        }
    }
}

/// The same problem before recentering: `F(k²) = e^{k⁴/2}`, `F(k² - 1/k) = 0`,
/// by a truncated solve with rows rescaled in log space. Equal to the
/// recentered value by unitarity of the shift.
pub fn comb_min_norm_raw(k: usize, degree: Option<usize>) -> Result<f64> {
    gap(k)?;
    let z0 = comb_abscissa(2 * k);
    let z1 = comb_abscissa(2 * k + 1);
    let reach = z0.abs().max(z1.abs());
    let deg = degree.unwrap_or((reach * reach + 10.0 * reach + 40.0).ceil() as usize);
    two_point_truncated(&[C64::new(z0, 0.0), C64::new(z1, 0.0)], &[0.5 * z0 * z0, f64::NEG_INFINITY], deg)
}

/// Least-norm interpolation with values `exp(ln_values[i])` (or 0 for
/// `-∞`) at the given points, columns `zⁿ/√(π n!)`, rows scaled to unit max.
fn two_point_truncated(points: &[C64], ln_values: &[f64], degree: usize) -> Result<f64> {
    let cols = degree + 1;
    let ln_col = |z: C64, n: usize| {
        let lz = if z.norm() == 0.0 {
            if n == 0 {
                0.0
            } else {
                f64::NEG_INFINITY
            }
        } else {
            n as f64 * z.norm().ln()
        };
        lz - 0.5 * (PI.ln() + ln_factorial(n))
    };
    let row_max: Vec<f64> = points
        .iter()
        .map(|&z| (0..cols).map(|n| ln_col(z, n)).fold(f64::NEG_INFINITY, f64::max))
        .collect();
    let a = DMatrix::from_fn(points.len(), cols, |i, n| {
        let z = points[i];
        let m = (ln_col(z, n) - row_max[i]).exp();
        C64::from_polar(m, n as f64 * z.arg())
    });
    let b: Vec<C64> = ln_values
        .iter()
        .zip(&row_max)
        .map(|(lv, m)| C64::new((lv - m).exp(), 0.0))
        .collect();
    let sol = least_norm(&a, &b, 1e-14, 1e-8).map_err(|e| match e {
        Error::IllPosed { residual, .. } => Error::Resolution(format!(
            "degree {degree} cannot separate the points (residual {residual:.3e})"
        )),
        other => other,
    })?;
    let scale = b.iter().map(|v| v.norm()).fold(1e-300, f64::max);
    if sol.residual > 1e-8 * scale {
        return Err(Error::Resolution(format!(
            "degree {degree} cannot separate the points (residual {:.3e})",
            sol.residual
        )));
    }
    Ok(sol.solution.iter().map(|y| y.norm_sqr()).sum())
}

/// `∫₂^∞ r³ e^{-r²} dr`, by quadrature.
pub fn lower_bound_integral() -> Result<Estimate> {
    quad::integrate_to_infinity(|r| r.powi(3) * (-r * r).exp(), 2.0, Tolerance::rel(1e-12))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GrowthRow {
    pub k: usize,
    pub gap: f64,
    pub min_norm_sq: f64,
    /// `2πk ∫₂^∞ r³ e^{-r²} dr`.
    pub paper_lower_bound: f64,
    /// Ratio to the previous row (1 for the first).
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrowthTable {
    pub mode: Mode,
    pub rows: Vec<GrowthRow>,
    pub lower_bound_integral: Estimate,
    pub threshold: f64,
    /// First `k` whose minimal norm² exceeds `threshold`.
    pub exceeds_from: Option<usize>,
    pub increasing: bool,
}

impl GrowthTable {
    pub fn to_table(&self) -> Table {
        let mut t = Table::new(&["k", "gap", "min_norm_sq", "paper_lower_bound", "ratio"]);
        for r in &self.rows {
            t.push(vec![
                r.k.into(),
                r.gap.into(),
                r.min_norm_sq.into(),
                r.paper_lower_bound.into(),
                r.ratio.into(),
            ]);
        }
        t
    }
}

pub fn growth_table(ks: &[usize], mode: Mode, threshold: f64) -> Result<GrowthTable> {
    if ks.is_empty() {
        return Err(Error::Domain("empty k range".into()));
    }
    let integral = lower_bound_integral()?;
    let values: Vec<Result<f64>> = ks.par_iter().map(|&k| comb_min_norm(k, mode)).collect();
    let mut rows = Vec::with_capacity(ks.len());
    let mut prev: Option<f64> = None;
    for (&k, v) in ks.iter().zip(values) {
        let v = v?;
        rows.push(GrowthRow {
            k,
            gap: 1.0 / k as f64,
            min_norm_sq: v,
            paper_lower_bound: 2.0 * PI * k as f64 * integral.value,
            ratio: prev.map_or(1.0, |p| v / p),
        });
        prev = Some(v);
    }
    Ok(GrowthTable {
        mode,
        increasing: rows.windows(2).all(|w| w[1].min_norm_sq > w[0].min_norm_sq),
        exceeds_from: rows.iter().find(|r| r.min_norm_sq > threshold).map(|r| r.k),
        rows,
        lower_bound_integral: integral,
        threshold,
    })
}

/// `Σ π (R² - d_j²)` over the comb lines at distance `d_j < R` from `center`.
pub fn comb_area_oracle(k: usize, center: Point2, r: f64) -> f64 {
    (2..=k)
        .map(|j| (center.x - C64::new(comb_abscissa(j), 0.0)).norm())
        .filter(|d| *d < r)
        .map(|d| PI * (r * r - d * d))
        .sum()
}

/// Density sweep of the comb with `K` teeth.
pub fn comb_density_scan(k: usize, radii: &[f64], centers: &[Point2], n_mc: usize, seed: u64) -> Result<DensityReport> {
    let comb = make_comb(k)?;
    upper_density(Some(&comb), &Weight::gaussian(), radii, centers, n_mc, seed)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kernel_values() {
        let v1 = comb_min_norm(1, Mode::Kernel).unwrap();
        assert!((v1 - PI * 1f64.exp() / 1f64.exp_m1()).abs() < 1e-12);
        let v2 = comb_min_norm(2, Mode::Kernel).unwrap();
        assert!((v2 - 14.2025).abs() < 1e-3, "{v2}");
        assert!(comb_min_norm(0, Mode::Kernel).is_err());
    }

    #[test]
    fn truncated_converges_from_above() {
        let exact = comb_min_norm(3, Mode::Kernel).unwrap();
        let mut last = f64::INFINITY;
        for d in [2, 4, 8, 16, 40] {
            let v = comb_min_norm(3, Mode::Truncated { degree: d }).unwrap();
            assert!(v >= exact * (1.0 - 1e-12) && v <= last);
            last = v;
        }
        assert!((last / exact - 1.0).abs() < 1e-6);
    }

    #[test]
    fn raw_problem_matches_after_shift() {
        for k in 1..=3 {
            let raw = comb_min_norm_raw(k, None).unwrap();
            let exact = comb_min_norm(k, Mode::Kernel).unwrap();
            assert!((raw / exact - 1.0).abs() < 1e-6, "k={k}: {raw} vs {exact}");
        }
    }

    #[test]
    fn lower_bound_integral_closed_form() {
        let i = lower_bound_integral().unwrap();
        assert!((i.value - 2.5 * (-4f64).exp()).abs() < 1e-12);
    }
}
