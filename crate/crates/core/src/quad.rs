//! One-dimensional quadrature: adaptive Gauss–Kronrod (7/15) on finite and
//! infinite intervals, periodic trapezoid means and Gauss–Legendre rules.
//!
//! Every higher-dimensional integral in the crate is assembled from these by
//! iteration.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// An integral value with an absolute error estimate.
#[derive(Debug, Clone, Copy, PartialEq, Default, serde::Serialize, serde::Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub abs_err: f64,
}

impl Estimate {
    pub fn new(value: f64, abs_err: f64) -> Self {
        Estimate { value, abs_err }
    }

    pub fn rel_err(&self) -> f64 {
        if self.value == 0.0 {
            self.abs_err
        } else {
            self.abs_err / self.value.abs()
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
    pub max_intervals: usize,
}

impl Tolerance {
    pub fn rel(rel: f64) -> Self {
        Tolerance {
            abs: 0.0,
            rel,
            max_intervals: 2000,
        }
    }

    pub fn abs(abs: f64) -> Self {
        Tolerance {
            abs,
            rel: 0.0,
            max_intervals: 2000,
        }
    }

    pub fn with_abs(mut self, abs: f64) -> Self {
        self.abs = abs;
        self
    }

    fn target(&self, value: f64) -> f64 {
        self.abs.max(self.rel * value.abs())
    }
}

/// Relative target for radially reducible integrands.
pub const RADIAL_REL_TOL: f64 = 1e-10;
/// Relative target for everything else.
pub const GENERIC_REL_TOL: f64 = 1e-6;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn kronrod15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut res_k = fc * WGK[7];
    let mut res_g = fc * WG[3];
    let mut res_abs = res_k.abs();
    let mut fv1 = [0.0; 7];
    let mut fv2 = [0.0; 7];
    for j in 0..7 {
        let x = half * XGK[j];
        let f1 = f(center - x);
        let f2 = f(center + x);
        fv1[j] = f1;
        fv2[j] = f2;
        res_k += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_g += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * res_k;
    let mut res_asc = WGK[7] * (fc - mean).abs();
    for j in 0..7 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let result = res_k * half;
    res_abs *= half.abs();
    res_asc *= half.abs();
    let mut err = ((res_k - res_g) * half).abs();
    if res_asc != 0.0 && err != 0.0 {
        err = res_asc * (200.0 * err / res_asc).powf(1.5).min(1.0);
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * res_abs);
    }
    (result, err)
}

/// Adaptive Gauss–Kronrod integration of `f` over `[a, b]`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: Tolerance) -> Result<Estimate> {
    if a == b {
        return Ok(Estimate::default());
    }
    let (v, e) = kronrod15(&f, a, b);
    if !v.is_finite() {
        return Err(Error::NoConvergence {
            last: [v, v],
            evals: 15,
        });
    }
    let mut intervals = vec![(a, b, v, e)];
    let mut total = v;
    let mut total_err = e;
    let mut previous = v;
    let mut evals = 15;
    while total_err > tol.target(total) {
        if intervals.len() >= tol.max_intervals {
            return Err(Error::NoConvergence {
                last: [previous, total],
                evals,
            });
        }
        let (idx, _) = intervals
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .3.total_cmp(&y.1 .3))
            .expect("nonempty");
        let (lo, hi, val, err) = intervals.swap_remove(idx);
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            // interval collapsed to machine resolution
            return Err(Error::NoConvergence {
                last: [previous, total],
                evals,
            });
        }
        let (v1, e1) = kronrod15(&f, lo, mid);
        let (v2, e2) = kronrod15(&f, mid, hi);
        evals += 30;
        previous = total;
        total += v1 + v2 - val;
        total_err += e1 + e2 - err;
        intervals.push((lo, mid, v1, e1));
        intervals.push((mid, hi, v2, e2));
        if !total.is_finite() {
            return Err(Error::NoConvergence {
                last: [previous, total],
                evals,
            });
        }
    }
    // Re-sum to shed accumulated cancellation in the running totals.
    let value: f64 = intervals.iter().map(|i| i.2).sum();
    let err: f64 = intervals.iter().map(|i| i.3).sum();
    Ok(Estimate::new(value, err))
}

/// Integrates over `[a, ∞)` with the substitution `x = a + t/(1-t)`.
pub fn integrate_to_infinity<F: Fn(f64) -> f64>(f: F, a: f64, tol: Tolerance) -> Result<Estimate> {
    let g = |t: f64| {
        if t >= 1.0 {
            return 0.0;
        }
        let u = 1.0 - t;
        let x = a + t / u;
        let v = f(x) / (u * u);
        if v.is_finite() {
            v
        } else {
            0.0
        }
    };
    integrate(g, 0.0, 1.0, tol)
}

/// Integrates over the whole real line, split at `center`.
pub fn integrate_real_line<F: Fn(f64) -> f64>(f: F, center: f64, tol: Tolerance) -> Result<Estimate> {
    let right = integrate_to_infinity(&f, center, tol)?;
    let left = integrate_to_infinity(|x| f(2.0 * center - x), center, tol)?;
    Ok(Estimate::new(
        right.value + left.value,
        right.abs_err + left.abs_err,
    ))
}

/// Mean of a 2π-periodic function by the trapezoid rule, doubling the node
/// count from `min_nodes` until two successive means agree to `abs_tol`.
pub fn periodic_mean<F: Fn(f64) -> f64>(
    f: F,
    abs_tol: f64,
    min_nodes: usize,
    max_nodes: usize,
) -> Result<Estimate> {
    let mut m = min_nodes.max(4);
    let mut sum: f64 = (0..m).map(|k| f(2.0 * PI * k as f64 / m as f64)).sum();
    let mut mean = sum / m as f64;
    loop {
        // midpoints of the current grid
        let extra: f64 = (0..m)
            .map(|k| f(2.0 * PI * (k as f64 + 0.5) / m as f64))
            .sum();
        sum += extra;
        let m2 = 2 * m;
        let mean2 = sum / m2 as f64;
        let err = (mean2 - mean).abs();
        if err <= abs_tol {
            return Ok(Estimate::new(mean2, err));
        }
        if m2 >= max_nodes {
            return Err(Error::NoConvergence {
                last: [mean, mean2],
                evals: m2,
            });
        }
        m = m2;
        mean = mean2;
    }
}

/// [`periodic_mean`] with a target relative to the size of the mean.
pub fn periodic_mean_rel<F: Fn(f64) -> f64>(f: F, tol: Tolerance) -> Result<Estimate> {
    let coarse = periodic_mean(&f, f64::INFINITY, 16, 1 << 16)?;
    let target = tol.abs.max(tol.rel * coarse.value.abs());
    periodic_mean(&f, target, 16, 1 << 16)
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Gauss–Legendre rule mapped to `[a, b]`.
pub fn gauss_legendre_on(n: usize, a: f64, b: f64) -> Vec<(f64, f64)> {
    let (x, w) = gauss_legendre(n);
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    x.iter().zip(&w).map(|(xi, wi)| (c + h * xi, h * wi)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gaussian_half_line() {
        let est = integrate_to_infinity(|r| r * (-r * r).exp(), 0.0, Tolerance::rel(1e-12)).unwrap();
        assert!((est.value - 0.5).abs() < 1e-12);
        assert!(est.abs_err < 1e-11);
    }

    #[test]
    fn real_line_gaussian() {
        let est = integrate_real_line(|x| (-x * x).exp(), 0.3, Tolerance::rel(1e-12)).unwrap();
        assert!((est.value - PI.sqrt()).abs() < 1e-11);
    }

    #[test]
    fn log_singularity_is_integrable() {
        // ∫₀¹ ln x dx = -1
        let est = integrate(|x: f64| x.ln(), 0.0, 1.0, Tolerance::abs(1e-10)).unwrap();
        assert!((est.value + 1.0).abs() < 1e-9);
    }

    #[test]
    fn budget_exhaustion_reports_last_estimates() {
        let tol = Tolerance {
            abs: 0.0,
            rel: 1e-15,
            max_intervals: 3,
        };
        match integrate(|x: f64| (1.0 / x).sin(), 1e-3, 1.0, tol) {
            Err(Error::NoConvergence { last, .. }) => assert!(last[0].is_finite() && last[1].is_finite()),
            other => panic!("expected non-convergence, got {other:?}"),
        }
    }

    #[test]
    fn gauss_legendre_is_exact_for_polynomials() {
        let (x, w) = gauss_legendre(6);
        // exact up to degree 11
        let integral: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(10)).sum();
        assert!((integral - 2.0 / 11.0).abs() < 1e-14);
        assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-14);
    }

    #[test]
    fn periodic_mean_of_trig_polynomial() {
        let est = periodic_mean(|t| 2.0 + (3.0 * t).cos().powi(2), 1e-14, 4, 1 << 12).unwrap();
        assert!((est.value - 2.5).abs() < 1e-14);
    }
}
