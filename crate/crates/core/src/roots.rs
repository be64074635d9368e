//! Zeros of a holomorphic function of one variable inside a disk.
//!
//! Squares are counted by the argument principle on their boundary and split
//! until each holds at most one zero, which Newton's method then polishes.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

/// Work limits for [`zeros_in_disk`].
#[derive(Debug, Clone, Copy)]
pub struct RootBudget {
    pub max_boxes: usize,
    pub min_side: f64,
}

impl Default for RootBudget {
    fn default() -> Self {
        RootBudget {
            max_boxes: 20_000,
            min_side: 1e-9,
        }
    }
}

struct Square {
    lo: C64,
    w: f64,
    h: f64,
    count: i64,
}

impl Square {
    fn center(&self) -> C64 {
        self.lo + C64::new(0.5 * self.w, 0.5 * self.h)
    }

    fn side(&self) -> f64 {
        self.w.max(self.h)
    }
}

/// All zeros of `g` (with multiplicity) in `|λ| < radius`.
///
/// `dg` is the derivative of `g`. Zeros on the circle itself may be included
/// or dropped; callers use weights that vanish there.
pub fn zeros_in_disk<G, D>(g: G, dg: D, radius: f64, budget: RootBudget) -> Result<Vec<C64>>
where
    G: Fn(C64) -> C64,
    D: Fn(C64) -> C64,
{
    // An off-center square avoids boundaries through symmetric points.
    let half = radius * (1.0 + 1.3e-3);
    let lo = C64::new(-half * 1.000_37, -half * 0.999_71);
    let side = 2.0 * half * 1.000_7;
    let count = winding_rect(&g, lo, side, side)?;
    let mut stack = vec![Square { lo, w: side, h: side, count }];
    let mut zeros = Vec::new();
    let mut boxes = 1usize;
    while let Some(sq) = stack.pop() {
        if sq.count <= 0 {
            continue;
        }
        // squares wholly outside the disk carry no wanted zeros
        if !square_meets_disk(&sq, radius) {
            continue;
        }
        if sq.count == 1 {
            if let Some(z) = newton_in(&g, &dg, &sq) {
                if z.norm() < radius {
                    zeros.push(z);
                }
                continue;
            }
        }
        if sq.side() < budget.min_side {
            let c = sq.center();
            if c.norm() < radius {
                for _ in 0..sq.count {
                    zeros.push(c);
                }
            }
            continue;
        }
        boxes += 4;
        if boxes > budget.max_boxes {
            return Err(Error::RootBudget(format!(
                "more than {} squares while isolating zeros in radius {radius}",
                budget.max_boxes
            )));
        }
        // uneven split so children do not share edges with earlier squares
        let a = sq.w * 0.5123;
        let b = sq.w - a;
        let c = sq.h * 0.5123;
        let d = sq.h - c;
        let children = [
            (sq.lo, a, c),
            (sq.lo + C64::new(a, 0.0), b, c),
            (sq.lo + C64::new(0.0, c), a, d),
            (sq.lo + C64::new(a, c), b, d),
        ];
        let mut total = 0;
        let mut rects = Vec::with_capacity(4);
        for (lo, w, h) in children {
            let c = winding_rect(&g, lo, w, h)?;
            total += c;
            rects.push(Square { lo, w, h, count: c });
        }
        if total != sq.count {
            return Err(Error::RootBudget(format!(
                "inconsistent zero count {total} vs {} near {}",
                sq.count, sq.lo
            )));
        }
        stack.extend(rects);
    }
    zeros.sort_by(|p, q| p.re.total_cmp(&q.re).then(p.im.total_cmp(&q.im)));
    Ok(zeros)
}

fn square_meets_disk(sq: &Square, radius: f64) -> bool {
    let cx = 0.0f64.clamp(sq.lo.re, sq.lo.re + sq.w);
    let cy = 0.0f64.clamp(sq.lo.im, sq.lo.im + sq.h);
    cx * cx + cy * cy < radius * radius
}

fn newton_in<G, D>(g: &G, dg: &D, sq: &Square) -> Option<C64>
where
    G: Fn(C64) -> C64,
    D: Fn(C64) -> C64,
{
    let mut z = sq.center();
    for _ in 0..60 {
        let d = dg(z);
        if d.norm() == 0.0 {
            return None;
        }
        let step = g(z) / d;
        z -= step;
        let slack = 0.05 * sq.side();
        if z.re < sq.lo.re - slack
            || z.im < sq.lo.im - slack
            || z.re > sq.lo.re + sq.w + slack
            || z.im > sq.lo.im + sq.h + slack
        {
            return None;
        }
        if step.norm() <= 1e-14 * (1.0 + z.norm()) {
            return Some(z);
        }
    }
    None
}

/// Winding number of `g` around 0 along the rectangle boundary.
fn winding_rect<G: Fn(C64) -> C64>(g: &G, lo: C64, w: f64, h: f64) -> Result<i64> {
    let corners = [
        lo,
        lo + C64::new(w, 0.0),
        lo + C64::new(w, h),
        lo + C64::new(0.0, h),
    ];
    let mut total = 0.0;
    for k in 0..4 {
        let a = corners[k];
        let b = corners[(k + 1) % 4];
        total += edge_phase(g, a, b)?;
    }
    Ok((total / (2.0 * PI)).round() as i64)
}

fn edge_phase<G: Fn(C64) -> C64>(g: &G, a: C64, b: C64) -> Result<f64> {
    const PIECES: usize = 8;
    let mut total = 0.0;
    let mut prev = value_at(g, a)?;
    for i in 1..=PIECES {
        let z0 = a + (b - a) * ((i - 1) as f64 / PIECES as f64);
        let z1 = a + (b - a) * (i as f64 / PIECES as f64);
        let v1 = value_at(g, z1)?;
        total += phase_step(g, z0, prev, z1, v1, 0)?;
        prev = v1;
    }
    Ok(total)
}

fn value_at<G: Fn(C64) -> C64>(g: &G, z: C64) -> Result<C64> {
    let v = g(z);
    if v.norm() == 0.0 || !v.is_finite() {
        return Err(Error::RootBudget(format!("zero or overflow on a contour at {z}")));
    }
    Ok(v)
}

/// Phase increment of `g` from `z0` to `z1`, bisecting until both halves
/// turn by less than π/4 and agree with the direct increment.
fn phase_step<G: Fn(C64) -> C64>(g: &G, z0: C64, v0: C64, z1: C64, v1: C64, depth: usize) -> Result<f64> {
    let zm = 0.5 * (z0 + z1);
    let vm = value_at(g, zm)?;
    let d1 = (vm / v0).arg();
    let d2 = (v1 / vm).arg();
    let d = (v1 / v0).arg();
    if d1.abs() < PI / 4.0 && d2.abs() < PI / 4.0 && (d1 + d2 - d).abs() < 1e-9 {
        return Ok(d);
    }
    if depth >= 40 {
        return Err(Error::RootBudget(format!("contour through a zero near {zm}")));
    }
    Ok(phase_step(g, z0, v0, zm, vm, depth + 1)? + phase_step(g, zm, vm, z1, v1, depth + 1)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_polynomial_zeros() {
        let roots = [C64::new(0.3, 0.2), C64::new(-1.1, 0.5), C64::new(2.0, -2.0)];
        let g = |z: C64| roots.iter().map(|r| z - r).product::<C64>();
        let dg = |z: C64| {
            let mut s = C64::new(0.0, 0.0);
            for i in 0..3 {
                let mut p = C64::new(1.0, 0.0);
                for (j, r) in roots.iter().enumerate() {
                    if j != i {
                        p *= z - r;
                    }
                }
                s += p;
            }
            s
        };
        let found = zeros_in_disk(g, dg, 2.0, RootBudget::default()).unwrap();
        assert_eq!(found.len(), 2);
        assert!((found[0] - roots[1]).norm() < 1e-12);
        assert!((found[1] - roots[0]).norm() < 1e-12);
    }

    #[test]
    fn finds_sine_zeros_on_the_real_axis() {
        let found = zeros_in_disk(|z| z.sin(), |z| z.cos(), 10.0, RootBudget::default()).unwrap();
        assert_eq!(found.len(), 7);
        for z in found {
            let k = (z.re / PI).round();
            assert!((z - C64::new(k * PI, 0.0)).norm() < 1e-12);
        }
    }
}
