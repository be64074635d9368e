//! Density tensor of a curve, density ratios, the singular weight `s_r` and
//! the gradient diagnostic of `ρ_r = e^{s_r/2}`.
//!
//! ## Density tensor
//!
//! The ball average of the current of integration `[W]` at `z` is the
//! Hermitian matrix `(1/Vol B(r)) ∫_{W ∩ B(z,r)} ν ν* dA`, where `ν` is the
//! unit normal of `W`: for the line `{x = 0}` the current is `δ_W` times
//! `(i/2) dx ∧ dx̄`. Its trace is `Area(W ∩ B)/Vol B`.
//!
//! ## Singular weight
//!
//! Slicing the ball `B(z, r) ⊂ ℂ²` by the complex lines through `z`, the
//! volume becomes `|λ|² dA(λ)` times the Fubini–Study measure on directions.
//! Jensen's formula on each slice gives, for `T(z) ≠ 0`,
//!
//! ```text
//! s_r(z) = -⨍_v Σ_{|a| < r} κ(|a|/r),   κ(x) = -2 ln x - 1/2 + x⁴/2,
//! ```
//!
//! the sum running over zeros `a` of `λ ↦ T(z + λ v)`. Since `κ ≥ 0` on
//! `(0, 1]`, `s_r ≤ 0`, and only the zeros of `T` enter, so `s_r` does not
//! change when `T` is multiplied by a constant.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{self, Region};
use crate::geometry::{surface_samples, Curve};
use crate::linalg::{hermitian_eigenvalues, pencil_max_eigenvalue, zero2, Mat2};
use crate::point::Point2;
use crate::quad::{self, Estimate};
use crate::report::Table;
use crate::weight::Weight;

/// Volume of the Euclidean ball of radius `r` in ℂ² (real dimension 4).
pub fn ball_volume(r: f64) -> f64 {
    0.5 * PI * PI * r.powi(4)
}

/// Ball average of `[W]` at `z`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DensityMatrix {
    pub m: Mat2,
    pub z: Point2,
    pub r: f64,
    /// Standard error of the trace.
    pub stderr: f64,
    /// Estimated `Area(W ∩ B(z, r))`.
    pub area: f64,
    pub samples: usize,
}

impl DensityMatrix {
    pub fn trace(&self) -> f64 {
        self.m[0][0].re + self.m[1][1].re
    }
}

/// `(1/Vol) Σ w ν ν*` over area samples of `W ∩ B(z, r)`.
pub fn density_matrix(curve: &Curve, z: Point2, r: f64, n_mc: usize, seed: u64) -> Result<DensityMatrix> {
    if !(r > 0.0) {
        return Err(Error::Domain(format!("radius must be positive, got {r}")));
    }
    let samples = surface_samples(curve, &Region::Ball { center: z, r }, n_mc, seed)?;
    let vol = ball_volume(r);
    let mut m = zero2();
    for (nu, w) in samples.normals.iter().zip(&samples.weights) {
        let v = [nu.x, nu.y];
        for i in 0..2 {
            for j in 0..2 {
                m[i][j] += v[i] * v[j].conj() * (*w / vol);
            }
        }
    }
    // exact Hermitian symmetry
    let off = 0.5 * (m[0][1] + m[1][0].conj());
    m[0][1] = off;
    m[1][0] = off.conj();
    m[0][0] = C64::new(m[0][0].re, 0.0);
    m[1][1] = C64::new(m[1][1].re, 0.0);
    let area = samples.total_weight();
    Ok(DensityMatrix {
        m,
        z,
        r,
        stderr: samples.stderr / vol,
        area,
        samples: samples.len(),
    })
}

/// `D_r(W; z)`: top eigenvalue of the density matrix against the complex
/// Hessian of `φ_r` (constant for the weights in scope).
pub fn density_ratio(curve: &Curve, z: Point2, r: f64, w: &Weight, n_mc: usize, seed: u64) -> Result<Estimate> {
    let dm = density_matrix(curve, z, r, n_mc, seed)?;
    ratio_of(&dm, w)
}

fn ratio_of(dm: &DensityMatrix, w: &Weight) -> Result<Estimate> {
    let hess = w.hessian();
    let value = pencil_max_eigenvalue(&dm.m, &hess)?.max(0.0);
    let (eps, _) = w.bounds();
    Ok(Estimate::new(value, dm.stderr / eps))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DensityRow {
    pub center_index: usize,
    pub z: Point2,
    pub r: f64,
    pub ratio: f64,
    pub stderr: f64,
    pub trace: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Trend {
    Decreasing,
    Increasing,
    Mixed,
}

/// Per-radius sup of `D_r` over centers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityReport {
    pub rows: Vec<DensityRow>,
    /// `(r, sup over centers, stderr at the sup)`.
    pub sup_per_radius: Vec<(f64, f64, f64)>,
    pub trend: Trend,
    /// The last radius' sup; no limit model is fitted.
    pub last_sup: f64,
}

impl DensityReport {
    pub fn to_table(&self) -> Table {
        let mut t = Table::new(&["center", "x_re", "x_im", "y_re", "y_im", "r", "ratio", "stderr"]);
        for row in &self.rows {
            t.push(vec![
                row.center_index.into(),
                row.z.x.re.into(),
                row.z.x.im.into(),
                row.z.y.re.into(),
                row.z.y.im.into(),
                row.r.into(),
                row.ratio.into(),
                row.stderr.into(),
            ]);
        }
        t
    }
}

/// Sweeps `D_r(W; z)` over centers and increasing radii. Each (center,
/// radius) pair draws from its own seeded stream.
pub fn upper_density(
    curve: Option<&Curve>,
    w: &Weight,
    radii: &[f64],
    centers: &[Point2],
    n_mc: usize,
    seed: u64,
) -> Result<DensityReport> {
    if radii.windows(2).any(|p| p[1] <= p[0]) {
        return Err(Error::Domain("radii must be strictly increasing".into()));
    }
    let jobs: Vec<(usize, usize)> = (0..radii.len())
        .flat_map(|ri| (0..centers.len()).map(move |ci| (ri, ci)))
        .collect();
    let rows: Vec<Result<DensityRow>> = jobs
        .par_iter()
        .map(|&(ri, ci)| {
            let (r, z) = (radii[ri], centers[ci]);
            let (ratio, trace) = match curve {
                Some(c) => {
                    let task = (ci as u64) << 16 | ri as u64;
                    let dm = density_matrix(c, z, r, n_mc, derive_seed(seed, task))?;
                    (ratio_of(&dm, w)?, dm.trace())
                }
                None => (Estimate::default(), 0.0),
            };
            Ok(DensityRow {
                center_index: ci,
                z,
                r,
                ratio: ratio.value,
                stderr: ratio.abs_err,
                trace,
            })
        })
        .collect();
    let rows = rows.into_iter().collect::<Result<Vec<_>>>()?;
    let sup_per_radius: Vec<(f64, f64, f64)> = radii
        .iter()
        .map(|&r| {
            rows.iter()
                .filter(|row| row.r == r)
                .map(|row| (r, row.ratio, row.stderr))
                .fold((r, 0.0, 0.0), |a, b| if b.1 > a.1 { b } else { a })
        })
        .collect();
    let sups: Vec<f64> = sup_per_radius.iter().map(|s| s.1).collect();
    let trend = if sups.windows(2).all(|p| p[1] < p[0]) {
        Trend::Decreasing
    } else if sups.windows(2).all(|p| p[1] > p[0]) {
        Trend::Increasing
    } else {
        Trend::Mixed
    };
    Ok(DensityReport {
        last_sup: sups.last().copied().unwrap_or(0.0),
        rows,
        sup_per_radius,
        trend,
    })
}

/// Counter-based seed for task `task` of a run.
pub fn derive_seed(master: u64, task: u64) -> u64 {
    // splitmix64 finalizer
    let mut z = master ^ task.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Quadrature over complex directions through a point: Gauss–Legendre in
/// `u = |v₁|²` (uniform for the Fubini–Study measure) times a trapezoid rule
/// in the phase of `v₂`.
#[derive(Debug, Clone, PartialEq)]
pub struct DirectionRule {
    pub nodes: Vec<(Point2, f64)>,
}

impl DirectionRule {
    pub fn new(n_u: usize, n_phase: usize) -> Self {
        let mut nodes = Vec::with_capacity(n_u * n_phase);
        for (u, wu) in quad::gauss_legendre_on(n_u, 0.0, 1.0) {
            for k in 0..n_phase {
                let ph = 2.0 * PI * (k as f64 + 0.5) / n_phase as f64;
                let v = Point2::new(C64::new(u.sqrt(), 0.0), C64::from_polar((1.0 - u).sqrt(), ph));
                nodes.push((v, wu / n_phase as f64));
            }
        }
        DirectionRule { nodes }
    }
}

impl Default for DirectionRule {
    fn default() -> Self {
        DirectionRule::new(24, 24)
    }
}

/// `κ(x) = -2 ln x - 1/2 + x⁴/2`, the Jensen kernel of a zero at relative
/// distance `x` for the `|λ|²`-weighted disk average.
pub fn jensen_kernel(x: f64) -> f64 {
    if x >= 1.0 {
        0.0
    } else {
        -2.0 * x.ln() - 0.5 + 0.5 * x.powi(4)
    }
}

/// `⨍_v Σ κ(|a|/r)` over zeros `a` of `T(z + λv)` in `|λ| < r`, skipping
/// `skip_origin` zeros at `λ = 0`.
fn mean_jensen_sum(curve: &Curve, z: Point2, r: f64, rule: &DirectionRule, skip_origin: bool) -> Result<f64> {
    let parts: Vec<Result<f64>> = rule
        .nodes
        .par_iter()
        .map(|(v, wt)| {
            let mut zeros = curve.line_zeros(z, *v, r)?;
            if skip_origin {
                if let Some((idx, _)) = zeros
                    .iter()
                    .enumerate()
                    .min_by(|a, b| a.1.norm().total_cmp(&b.1.norm()))
                {
                    zeros.swap_remove(idx);
                }
            }
            Ok(wt * zeros.iter().map(|a| jensen_kernel(a.norm() / r)).sum::<f64>())
        })
        .collect();
    let mut total = 0.0;
    for p in parts {
        total += p?;
    }
    Ok(total)
}

/// `s_r(z) = log|T(z)|² - ⨍_{B(z,r)} log|T|²`; `-∞` on the curve.
pub fn singular_fn(curve: &Curve, z: Point2, r: f64) -> Result<f64> {
    singular_fn_with(curve, z, r, &DirectionRule::default())
}

pub fn singular_fn_with(curve: &Curve, z: Point2, r: f64, rule: &DirectionRule) -> Result<f64> {
    if !(r > 0.0) {
        return Err(Error::Domain(format!("radius must be positive, got {r}")));
    }
    if curve.t(z).norm() == 0.0 {
        return Ok(f64::NEG_INFINITY);
    }
    Ok(-mean_jensen_sum(curve, z, r, rule, false)?)
}

/// `s_r` straight from its definition, with the ball average of
/// `log|T|²` done by 4-dimensional quadrature. Slow; used as an oracle.
pub fn singular_fn_direct<T>(t: T, z: Point2, r: f64) -> Result<Estimate>
where
    T: Fn(Point2) -> C64 + Sync,
{
    let here = t(z).norm_sqr().ln();
    let avg = fock::ball_average(|p| t(p).norm_sqr().ln(), z, r, 2)?;
    Ok(Estimate::new(here - avg.value, avg.abs_err))
}

/// Closed form of `s_r` for a single line at distance `d` from `z`.
pub fn singular_fn_line(d: f64, r: f64) -> f64 {
    if d >= r {
        return 0.0;
    }
    let x = d / r;
    // -∫₀¹ κ(x/√u) du over u > x²
    2.0 * x.ln() + 1.5 - 2.0 * x * x + 0.5 * x.powi(4)
}

/// `|∂ρ_r|² = |dT(w)|² exp(-⨍_{B(w,r)} log|T|²)` at a regular point `w` of
/// the curve.
pub fn drho_norm(curve: &Curve, w: Point2, r: f64) -> Result<f64> {
    drho_norm_with(curve, w, r, &DirectionRule::default())
}

pub fn drho_norm_with(curve: &Curve, w: Point2, r: f64, rule: &DirectionRule) -> Result<f64> {
    if !(r > 0.0) {
        return Err(Error::Domain(format!("radius must be positive, got {r}")));
    }
    let tv = curve.t(w).norm();
    if tv > 1e-8 * curve.t_scale(w) {
        return Err(Error::Domain(format!("point is not on the curve (|T| = {tv:.3e})")));
    }
    if curve.dt(w).norm() == 0.0 {
        return Err(Error::Domain("dT vanishes: not a regular point".into()));
    }
    // slices through w: log|T(w+λv)|² = log|λ|² + log|dT(w)·v + O(λ)|²,
    // so the |dT|² factor cancels and the remaining zeros enter through κ
    let rest = mean_jensen_sum(curve, w, r, rule, true)?;
    Ok((1.5 - 2.0 * r.ln() - rest).exp())
}

/// Outcome of the positivity check of `ψ = φ_r + s_r`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PatchCheck {
    pub min_eigenvalue: f64,
    pub at: Point2,
    pub points: usize,
}

/// Minimum over `grid` of the smallest eigenvalue of the complex Hessian of
/// `ψ = φ_r + s_r`, with the `s_r` part by Richardson-extrapolated finite
/// differences (steps `h` and `h/2`).
pub fn patch_weight_check(
    curve: Option<&Curve>,
    w: &Weight,
    r: f64,
    grid: &[Point2],
    margin: f64,
    rule: &DirectionRule,
) -> Result<PatchCheck> {
    if grid.is_empty() {
        return Err(Error::Domain("empty grid".into()));
    }
    let hess_phi = w.hessian();
    let mut best = PatchCheck {
        min_eigenvalue: f64::INFINITY,
        at: grid[0],
        points: grid.len(),
    };
    for &z in grid {
        let mut h = hess_phi;
        if let Some(c) = curve {
            if let Some(d) = c.distance(z, margin) {
                return Err(Error::Domain(format!(
                    "grid point {z:?} is within {d:.3e} of the curve (margin {margin})"
                )));
            }
            let f = |p: Point2| singular_fn_with(c, p, r, rule);
            let hs = complex_hessian_fd(&f, z, 1e-3)?;
            for i in 0..2 {
                for j in 0..2 {
                    h[i][j] += hs[i][j];
                }
            }
        }
        let lo = hermitian_eigenvalues(&h).0;
        if lo < best.min_eigenvalue {
            best.min_eigenvalue = lo;
            best.at = z;
        }
    }
    Ok(best)
}

/// Complex Hessian `∂²f/∂z_i∂z̄_j` of a real function on ℂ² from the real
/// Hessian in `(Re x, Im x, Re y, Im y)`, Richardson-combined over `h`, `h/2`.
pub fn complex_hessian_fd<F>(f: &F, z: Point2, h: f64) -> Result<Mat2>
where
    F: Fn(Point2) -> Result<f64>,
{
    let base = z.to_reals();
    let f0 = f(z)?;
    let real_hessian = |h: f64| -> Result<[[f64; 4]; 4]> {
        let at = |d: [f64; 4]| {
            let mut p = base;
            for k in 0..4 {
                p[k] += d[k];
            }
            f(Point2::from_reals(p))
        };
        let mut hm = [[0.0; 4]; 4];
        for i in 0..4 {
            let mut e = [0.0; 4];
            e[i] = h;
            let plus = at(e)?;
            e[i] = -h;
            let minus = at(e)?;
            hm[i][i] = (plus - 2.0 * f0 + minus) / (h * h);
            for j in i + 1..4 {
                let mut d = [0.0; 4];
                let mut s = 0.0;
                for (si, sj, sign) in [(1.0, 1.0, 1.0), (1.0, -1.0, -1.0), (-1.0, 1.0, -1.0), (-1.0, -1.0, 1.0)] {
                    d[i] = si * h;
                    d[j] = sj * h;
                    s += sign * at(d)?;
                }
                hm[i][j] = s / (4.0 * h * h);
                hm[j][i] = hm[i][j];
            }
        }
        Ok(hm)
    };
    let coarse = real_hessian(h)?;
    let fine = real_hessian(0.5 * h)?;
    let mut hr = [[0.0; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            hr[i][j] = (4.0 * fine[i][j] - coarse[i][j]) / 3.0;
        }
    }
    let mut out = zero2();
    for i in 0..2 {
        for j in 0..2 {
            let (xi, yi, xj, yj) = (2 * i, 2 * i + 1, 2 * j, 2 * j + 1);
            out[i][j] = C64::new(
                0.25 * (hr[xi][xj] + hr[yi][yj]),
                0.25 * (hr[xi][yj] - hr[yi][xj]),
            );
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{make_crossing, LinearForm};

    fn line() -> Curve {
        make_crossing(&[LinearForm::x()]).unwrap()
    }

    #[test]
    fn line_density_matrix_closed_form() {
        let r = 2.0;
        let dm = density_matrix(&line(), Point2::ORIGIN, r, 2000, 3).unwrap();
        let expect = 2.0 / (PI * r * r);
        assert!((dm.m[0][0].re - expect).abs() < 1e-9 * expect);
        assert!(dm.m[1][1].norm() < 1e-12 && dm.m[0][1].norm() < 1e-12);
        let d = density_ratio(&line(), Point2::ORIGIN, r, &Weight::gaussian(), 2000, 3).unwrap();
        assert!((d.value - expect).abs() < 1e-9 * expect);
    }

    #[test]
    fn far_center_has_zero_density() {
        let dm = density_matrix(&line(), Point2::real(5.0, 0.0), 1.0, 500, 0).unwrap();
        assert_eq!(dm.trace(), 0.0);
    }

    #[test]
    fn jensen_kernel_is_nonnegative_and_flat_at_one() {
        for k in 1..100 {
            assert!(jensen_kernel(k as f64 / 100.0) >= 0.0);
        }
        let h = 1e-6;
        assert!(jensen_kernel(1.0 - h) < 1e-10);
    }

    #[test]
    fn line_singular_fn_matches_closed_form_and_oracle() {
        let r = 1.0;
        assert_eq!(singular_fn(&line(), Point2::real(1.5, 0.0), r).unwrap(), 0.0);
        let z = Point2::real(0.5, 0.2);
        let s = singular_fn(&line(), z, r).unwrap();
        let exact = singular_fn_line(0.5, r);
        assert!((s - exact).abs() < 1e-4, "{s} vs {exact}");
        assert!(exact < -0.01);
        let direct = singular_fn_direct(|p| p.x, z, r).unwrap();
        assert!((direct.value - exact).abs() < 2e-3, "{} vs {exact}", direct.value);
    }

    #[test]
    fn drho_on_line_is_constant() {
        let r = 2.0;
        let v = drho_norm(&line(), Point2::real(0.0, 3.0), r).unwrap();
        assert!((v - 1.5f64.exp() / (r * r)).abs() < 1e-12);
    }

    #[test]
    fn complex_hessian_of_norm_squared_is_identity() {
        let h = complex_hessian_fd(&|p: Point2| Ok(p.norm_sqr() + (p.x * p.y).re), Point2::real(0.3, 0.1), 1e-3)
            .unwrap();
        assert!((h[0][0].re - 1.0).abs() < 1e-8 && (h[1][1].re - 1.0).abs() < 1e-8);
        assert!(h[0][1].norm() < 1e-8);
    }
}
