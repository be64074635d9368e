//! Small dense linear algebra: closed-form 2×2 Hermitian spectra and a
//! least-norm solver for complex underdetermined systems.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

pub type Mat2 = [[C64; 2]; 2];

pub fn zero2() -> Mat2 {
    [[C64::new(0.0, 0.0); 2]; 2]
}

pub fn identity2() -> Mat2 {
    [
        [C64::new(1.0, 0.0), C64::new(0.0, 0.0)],
        [C64::new(0.0, 0.0), C64::new(1.0, 0.0)],
    ]
}

pub fn hermitian_defect(m: &Mat2) -> f64 {
    (m[0][1] - m[1][0].conj())
        .norm()
        .max(m[0][0].im.abs())
        .max(m[1][1].im.abs())
}

/// Eigenvalues `(λ_min, λ_max)` of a 2×2 Hermitian matrix.
pub fn hermitian_eigenvalues(m: &Mat2) -> (f64, f64) {
    let a = m[0][0].re;
    let d = m[1][1].re;
    let b = 0.5 * (m[0][1] + m[1][0].conj());
    let mean = 0.5 * (a + d);
    let rad = (0.25 * (a - d) * (a - d) + b.norm_sqr()).sqrt();
    (mean - rad, mean + rad)
}

/// Largest eigenvalue of the pencil `(a, b)`, i.e. `sup_v (v*Av)/(v*Bv)`,
/// for Hermitian `a` and positive-definite Hermitian `b`.
pub fn pencil_max_eigenvalue(a: &Mat2, b: &Mat2) -> Result<f64> {
    // Cholesky b = L L*, then eigen of L⁻¹ a L⁻*.
    let l00 = b[0][0].re;
    if l00 <= 0.0 {
        return Err(Error::Domain("pencil denominator is not positive definite".into()));
    }
    let l00 = l00.sqrt();
    let l10 = b[1][0] / l00;
    let s = b[1][1].re - l10.norm_sqr();
    if s <= 0.0 {
        return Err(Error::Domain("pencil denominator is not positive definite".into()));
    }
    let l11 = s.sqrt();
    // L⁻¹ = [[1/l00, 0], [-l10/(l00 l11), 1/l11]]
    let inv: Mat2 = [
        [C64::new(1.0 / l00, 0.0), C64::new(0.0, 0.0)],
        [-l10 / (l00 * l11), C64::new(1.0 / l11, 0.0)],
    ];
    let c = mul2(&mul2(&inv, a), &adjoint2(&inv));
    Ok(hermitian_eigenvalues(&c).1)
}

pub fn mul2(a: &Mat2, b: &Mat2) -> Mat2 {
    let mut out = zero2();
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

pub fn adjoint2(a: &Mat2) -> Mat2 {
    [
        [a[0][0].conj(), a[1][0].conj()],
        [a[0][1].conj(), a[1][1].conj()],
    ]
}

/// Minimal-norm solution of an underdetermined (or consistent
/// rank-deficient) complex system.
#[derive(Debug, Clone)]
pub struct LeastNorm {
    pub solution: Vec<C64>,
    /// `max_i |(A x - b)_i|`.
    pub residual: f64,
    /// Smallest singular value kept in the pseudo-inverse.
    pub sigma_min_kept: f64,
    /// Largest singular value discarded (0 when none).
    pub sigma_max_dropped: f64,
    pub rank: usize,
}

/// Solves `min |x|` subject to `A x = b` through the singular value
/// decomposition, discarding singular values below `rel_cut · σ_max`.
///
/// A consistent rank-deficient system is solved; an inconsistent one (residual
/// above `residual_tol · max(1, |b|_∞)`) is reported as ill-posed.
pub fn least_norm(
    a: &DMatrix<C64>,
    b: &[C64],
    rel_cut: f64,
    residual_tol: f64,
) -> Result<LeastNorm> {
    let (rows, cols) = a.shape();
    assert_eq!(rows, b.len());
    if rows == 0 {
        return Ok(LeastNorm {
            solution: vec![C64::new(0.0, 0.0); cols],
            residual: 0.0,
            sigma_min_kept: f64::INFINITY,
            sigma_max_dropped: 0.0,
            rank: 0,
        });
    }
    let svd = a.clone().svd(true, true);
    let u = svd.u.as_ref().expect("u computed");
    let v_t = svd.v_t.as_ref().expect("v_t computed");
    let sigma = &svd.singular_values;
    let smax = sigma.iter().cloned().fold(0.0, f64::max);
    let cut = rel_cut * smax;
    let rhs = DVector::from_column_slice(b);
    let mut x = DVector::<C64>::zeros(cols);
    let mut kept_min = f64::INFINITY;
    let mut dropped_max: f64 = 0.0;
    let mut rank = 0;
    for k in 0..sigma.len() {
        let s = sigma[k];
        if s > cut && s > 0.0 {
            let coeff = u.column(k).adjoint() * &rhs;
            let coef = coeff[(0, 0)] / s;
            x += v_t.row(k).adjoint() * coef;
            kept_min = kept_min.min(s);
            rank += 1;
        } else {
            dropped_max = dropped_max.max(s);
        }
    }
    let r = a * &x - &rhs;
    let residual = r.iter().map(|c| c.norm()).fold(0.0, f64::max);
    let scale = b.iter().map(|c| c.norm()).fold(1.0, f64::max);
    if residual > residual_tol * scale {
        let sigma = if dropped_max > 0.0 { dropped_max } else { kept_min };
        return Err(Error::IllPosed { sigma, residual });
    }
    Ok(LeastNorm {
        solution: x.iter().copied().collect(),
        residual,
        sigma_min_kept: kept_min,
        sigma_max_dropped: dropped_max,
        rank,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn eigenvalues_of_diagonal_and_offdiagonal() {
        let m = [[c(2.0, 0.0), c(0.0, 1.0)], [c(0.0, -1.0), c(2.0, 0.0)]];
        let (lo, hi) = hermitian_eigenvalues(&m);
        assert!((lo - 1.0).abs() < 1e-14 && (hi - 3.0).abs() < 1e-14);
    }

    #[test]
    fn pencil_against_identity_is_top_eigenvalue() {
        let a = [[c(0.3, 0.0), c(0.1, 0.2)], [c(0.1, -0.2), c(0.7, 0.0)]];
        let top = pencil_max_eigenvalue(&a, &identity2()).unwrap();
        assert!((top - hermitian_eigenvalues(&a).1).abs() < 1e-14);
        // scaling the denominator by 2 halves the ratio
        let b = [[c(2.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(2.0, 0.0)]];
        assert!((pencil_max_eigenvalue(&a, &b).unwrap() - top / 2.0).abs() < 1e-14);
    }

    #[test]
    fn least_norm_picks_minimal_solution() {
        // x0 + x1 = 2 → minimal (1, 1)
        let a = DMatrix::from_row_slice(1, 2, &[c(1.0, 0.0), c(1.0, 0.0)]);
        let sol = least_norm(&a, &[c(2.0, 0.0)], 1e-12, 1e-10).unwrap();
        assert!((sol.solution[0] - c(1.0, 0.0)).norm() < 1e-12);
        assert!((sol.solution[1] - c(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn inconsistent_rank_deficient_system_is_ill_posed() {
        let a = DMatrix::from_row_slice(2, 1, &[c(1.0, 0.0), c(1.0, 0.0)]);
        let err = least_norm(&a, &[c(1.0, 0.0), c(0.0, 0.0)], 1e-12, 1e-8).unwrap_err();
        assert!(matches!(err, Error::IllPosed { .. }));
    }
}
