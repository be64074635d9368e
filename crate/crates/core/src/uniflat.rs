//! Desk-scale checks of uniform flatness: the normal-disk (tubular) radius,
//! graph deviation over tangent disks, transversality at singular points and
//! area bounds on balls.
//!
//! The tubular radius of `W - U_{aε}(W_sing)` is the infimum, over points
//! `q` having two distinct normal feet `f₁, f₂` on the curve (both at least
//! `aε` from the singular set), of `max(|q - f₁|, |q - f₂|)`. Candidate
//! pairs come from solving the normal-disk intersection for pairs of samples;
//! each candidate is then refined by moving `q` and re-projecting.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::Region;
use crate::geometry::{sample_curve, surface_samples, Curve, Placement};
use crate::point::Point2;
use crate::quad::Estimate;
use crate::report::Table;

/// Standoff factor around singular points.
pub const DEFAULT_STANDOFF: f64 = 2.0;

const CANDIDATES: usize = 24;

/// A point of `ℂ²` with two normal feet on the curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Collision {
    pub q: Point2,
    pub feet: [Point2; 2],
    pub branches: [usize; 2],
    /// `max |q - fᵢ|`: the disk radius at which the two normal disks meet.
    pub eps: f64,
    /// Distance from the feet to the singular set.
    pub sing_dist: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TubularRadius {
    /// Largest disk radius without collisions (capped by the region bound).
    pub eps: f64,
    /// The collision realizing `eps`, if any was found.
    pub witness: Option<Collision>,
    /// All refined collisions, sorted by `eps`.
    pub collisions: Vec<Collision>,
    pub samples: usize,
    pub standoff: f64,
}

impl TubularRadius {
    /// Whether normal disks of radius `eps` are pairwise disjoint. Collisions
    /// whose feet sit within `a·eps` of the singular set do not count.
    pub fn passes(&self, eps: f64) -> bool {
        eps <= self.eps_bound()
            && !self
                .collisions
                .iter()
                .any(|c| c.eps <= eps && eps * self.standoff <= c.sing_dist)
    }

    fn eps_bound(&self) -> f64 {
        self.eps.max(self.collisions.iter().map(|c| c.eps).fold(0.0, f64::max))
    }

    /// Witness rows in the sample CSV layout.
    pub fn witness_table(&self) -> Table {
        let mut t = Table::new(&["x_re", "x_im", "y_re", "y_im", "weight"]);
        if let Some(c) = &self.witness {
            for p in c.feet {
                t.push(vec![p.x.re.into(), p.x.im.into(), p.y.re.into(), p.y.im.into(), 1.0.into()]);
            }
        }
        t
    }
}

fn region_bound(region: &Region) -> f64 {
    match *region {
        Region::Ball { r, .. } | Region::Bidisk { r, .. } => r,
        Region::Annulus { r_out, .. } => r_out,
        Region::FullPlane => f64::INFINITY,
    }
}

fn sing_dist(curve: &Curve, p: Point2) -> f64 {
    curve
        .singular_points
        .iter()
        .map(|s| s.dist(p))
        .fold(f64::INFINITY, f64::min)
}

/// Disk radius at which the normal disks at two samples meet, or `None`.
/// `gap` is the sampling tolerance used for (nearly) parallel disks.
fn pair_estimate(p1: Point2, n1: Point2, p2: Point2, n2: Point2, gap: f64) -> Option<(f64, Point2)> {
    let d = p2 - p1;
    let mut best: Option<(f64, Point2)> = None;
    // ζ n1 - ζ' n2 = d
    let det = -n1.x * n2.y + n2.x * n1.y;
    if det.norm() > 1e-6 {
        let zeta = (-d.x * n2.y + n2.x * d.y) / det;
        let zeta2 = (n1.x * d.y - d.x * n1.y) / det;
        let q = p1 + n1.scale(zeta);
        best = Some((zeta.norm().max(zeta2.norm()), q));
    }
    let c = d.dot(n1);
    let resid = (d - n1.scale(c)).norm();
    if resid <= gap && c.norm() > gap {
        let e = 0.5 * c.norm();
        if best.map_or(true, |b| e < b.0) {
            best = Some((e, p1 + n1.scale(c * 0.5)));
        }
    }
    best
}

/// Tubular radius of the curve inside `region`, from about `grid_density`
/// deterministic samples.
pub fn tubular_radius(curve: &Curve, region: &Region, grid_density: usize) -> Result<TubularRadius> {
    tubular_radius_with(curve, region, grid_density, DEFAULT_STANDOFF)
}

pub fn tubular_radius_with(
    curve: &Curve,
    region: &Region,
    grid_density: usize,
    standoff: f64,
) -> Result<TubularRadius> {
    let samples = sample_curve(curve, region, grid_density, 0, Placement::Centered)?;
    if samples.len() < 8 {
        return Err(Error::Resolution(format!(
            "only {} samples of the curve in the region",
            samples.len()
        )));
    }
    let n = samples.len();
    let sd: Vec<f64> = samples.points.iter().map(|p| sing_dist(curve, *p)).collect();
    let cands: Vec<(f64, usize, usize, Point2)> = (0..n)
        .into_par_iter()
        .flat_map_iter(|i| {
            let samples = &samples;
            let sd = &sd;
            (i + 1..n).filter_map(move |j| {
                let gap = 0.5 * samples.spacing[i].max(samples.spacing[j]);
                let (p1, p2) = (samples.points[i], samples.points[j]);
                let (e, q) = pair_estimate(p1, samples.normals[i], p2, samples.normals[j], gap)?;
                let sep = p1.dist(p2);
                if samples.branch[i] == samples.branch[j] && sep <= (e / 4.0).max(4.0 * gap) {
                    return None;
                }
                if sd[i].min(sd[j]) < standoff * e {
                    return None;
                }
                Some((e, i, j, q))
            })
        })
        .collect();
    let mut cands = cands;
    cands.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
    // keep candidates from different neighbourhoods
    let mut chosen: Vec<(f64, usize, usize, Point2)> = Vec::new();
    for c in cands {
        if chosen.len() >= CANDIDATES {
            break;
        }
        if chosen.iter().any(|k| k.3.dist(c.3) < 0.25 * c.0.max(1e-9)) {
            continue;
        }
        chosen.push(c);
    }
    let mut collisions: Vec<Collision> = chosen
        .par_iter()
        .filter_map(|&(e, i, j, q)| {
            refine(
                curve,
                region,
                standoff,
                q,
                e,
                [samples.branch[i], samples.branch[j]],
                [samples.params[i], samples.params[j]],
            )
        })
        .collect();
    let mut focal: Vec<(f64, usize)> = (0..n)
        .filter_map(|i| {
            let k = curve.branches[samples.branch[i]].curvature(samples.params[i]);
            (k > 0.0 && sd[i] >= standoff / k).then(|| (1.0 / k, i))
        })
        .collect();
    focal.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    let mut seeds: Vec<(f64, usize)> = Vec::new();
    for c in focal {
        if seeds.len() >= CANDIDATES {
            break;
        }
        if seeds
            .iter()
            .any(|k| samples.points[k.1].dist(samples.points[c.1]) < 0.25 * c.0)
        {
            continue;
        }
        seeds.push(c);
    }
    collisions.extend(
        seeds
            .par_iter()
            .filter_map(|&(_, i)| refine_focal(curve, region, standoff, samples.branch[i], samples.params[i]))
            .collect::<Vec<_>>(),
    );
    collisions.sort_by(|a, b| a.eps.total_cmp(&b.eps));
    let bound = region_bound(region);
    let witness = collisions.first().copied().filter(|c| c.eps < bound);
    Ok(TubularRadius {
        eps: witness.map_or(bound, |c| c.eps),
        witness,
        collisions,
        samples: n,
        standoff,
    })
}

fn refine(
    curve: &Curve,
    region: &Region,
    standoff: f64,
    q0: Point2,
    e0: f64,
    branches: [usize; 2],
    starts: [C64; 2],
) -> Option<Collision> {
    let eval = |q: Point2, starts: [C64; 2]| -> Option<(f64, [Point2; 2], [C64; 2], f64)> {
        let mut feet = [Point2::ORIGIN; 2];
        let mut taus = starts;
        let mut dmax: f64 = 0.0;
        for k in 0..2 {
            let b = &curve.branches[branches[k]];
            let (tau, d) = b.project(q, starts[k])?;
            let f = b.point(tau)?;
            if !region.contains(f) || (q - f).dot(b.tangent(tau)).norm() > 1e-7 * (1.0 + d) {
                return None;
            }
            feet[k] = f;
            taus[k] = tau;
            dmax = dmax.max(d);
        }
        let sdist = sing_dist(curve, feet[0]).min(sing_dist(curve, feet[1]));
        if feet[0].dist(feet[1]) <= dmax / 4.0 || sdist < standoff * dmax {
            return None;
        }
        Some((dmax, feet, taus, sdist))
    };
    let mut starts = starts;
    let mut q = q0;
    let (mut best, mut feet, taus, mut sdist) = eval(q, starts)?;
    starts = taus;
    let mut step = (0.25 * e0).max(1e-3);
    let mut rounds = 0;
    while step > 1e-8 * (1.0 + best) && rounds < 400 {
        rounds += 1;
        let mut improved = false;
        let mut dirs: Vec<[f64; 4]> = Vec::with_capacity(11);
        let u = [(feet[0] - q).normalized(), (feet[1] - q).normalized()];
        for d in [u[0], u[1], (u[0] + u[1]).normalized()] {
            if d.is_finite() {
                dirs.push(d.to_reals());
            }
        }
        for k in 0..4 {
            for sgn in [1.0, -1.0] {
                let mut r = [0.0; 4];
                r[k] = sgn;
                dirs.push(r);
            }
        }
        for dir in dirs {
            let mut r = q.to_reals();
            for k in 0..4 {
                r[k] += step * dir[k];
            }
            let cand = Point2::from_reals(r);
            if let Some((v, f, t, s)) = eval(cand, starts) {
                if v < best {
                    best = v;
                    feet = f;
                    starts = t;
                    sdist = s;
                    q = cand;
                    improved = true;
                }
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    Some(Collision {
        q,
        feet,
        branches,
        eps: best,
        sing_dist: sdist,
    })
}

/// Minimizes the focal distance `1/κ` over the branch parameter near `tau0`.
fn refine_focal(curve: &Curve, region: &Region, standoff: f64, bi: usize, tau0: C64) -> Option<Collision> {
    let b = &curve.branches[bi];
    let eval = |tau: C64| -> Option<(f64, Point2, f64)> {
        let f = b.point(tau)?;
        let k = b.curvature(tau);
        if !region.contains(f) || !(k > 0.0) {
            return None;
        }
        let sd = sing_dist(curve, f);
        (sd >= standoff / k).then_some((1.0 / k, f, sd))
    };
    let mut tau = tau0;
    let (mut best, mut foot, mut sdist) = eval(tau)?;
    let mut step = 0.25 * best / b.velocity(tau).norm();
    let mut rounds = 0;
    while step > 1e-10 * (1.0 + tau.norm()) && rounds < 400 {
        rounds += 1;
        let mut improved = false;
        for d in [C64::new(1.0, 0.0), C64::new(-1.0, 0.0), C64::new(0.0, 1.0), C64::new(0.0, -1.0)] {
            let cand = tau + d * step;
            if let Some((v, f, sd)) = eval(cand) {
                if v < best {
                    best = v;
                    foot = f;
                    sdist = sd;
                    tau = cand;
                    improved = true;
                }
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    Some(Collision {
        q: foot + b.normal(tau) * best,
        feet: [foot, foot],
        branches: [bi, bi],
        eps: best,
        sing_dist: sdist,
    })
}

/// Orthonormal frame `(tangent, normal)` of the curve at a regular point.
fn frame(curve: &Curve, w: Point2) -> Result<(usize, C64, Point2, Point2)> {
    let (bi, tau, d) = curve
        .nearest(w, 1.0)
        .ok_or_else(|| Error::Domain(format!("{w:?} is not on the curve")))?;
    if d > 1e-8 * (1.0 + w.norm()) {
        return Err(Error::Domain(format!("{w:?} is {d:.3e} away from the curve")));
    }
    let b = &curve.branches[bi];
    Ok((bi, tau, b.tangent(tau), b.normal(tau)))
}

/// `sup |f(x)| ε / |x|²` over the tangent disk of radius `ε` at `w`, where
/// the curve is the graph `x ↦ w + x t + f(x) ν` over its tangent line.
pub fn graph_deviation(curve: &Curve, w: Point2, eps: f64) -> Result<f64> {
    if !(eps > 0.0) {
        return Err(Error::Domain(format!("ε must be positive, got {eps}")));
    }
    let (bi, tau0, t, nu) = frame(curve, w)?;
    let sd = sing_dist(curve, w);
    if sd <= (DEFAULT_STANDOFF + 1.0) * eps {
        return Err(Error::Domain(format!(
            "point is {sd:.3e} from the singular set, need more than {:.3e}",
            (DEFAULT_STANDOFF + 1.0) * eps
        )));
    }
    let b = &curve.branches[bi];
    let (n_r, n_a) = (16, 32);
    let mut sup: f64 = 0.0;
    let mut graph: Vec<(C64, C64)> = Vec::new();
    for a in 0..n_a {
        let dir = C64::from_polar(1.0, 2.0 * PI * a as f64 / n_a as f64);
        let mut tau = tau0;
        for k in 1..=n_r {
            let x = dir * (eps * k as f64 / n_r as f64);
            // solve ⟨γ(τ) - w, t⟩ = x by Newton from the previous ring
            let mut ok = false;
            for _ in 0..50 {
                let p = b.point(tau).ok_or_else(|| Error::Domain("graph left the branch domain".into()))?;
                let g = (p - w).dot(t) - x;
                let dg = b.velocity(tau).dot(t);
                if dg.norm() == 0.0 {
                    break;
                }
                let step = g / dg;
                tau -= step;
                if step.norm() <= 1e-14 * (1.0 + tau.norm()) {
                    ok = true;
                    break;
                }
            }
            let p = b.point(tau).ok_or_else(|| Error::Domain("graph left the branch domain".into()))?;
            if !ok && ((p - w).dot(t) - x).norm() > 1e-10 * eps {
                return Err(Error::Domain("graph recovery did not converge".into()));
            }
            let f = (p - w).dot(nu);
            graph.push((x, f));
            sup = sup.max(f.norm() * eps / x.norm_sqr());
        }
    }
    // any other sheet of the curve over the tangent disk
    let region = Region::Ball { center: w, r: 2.0 * eps };
    let samples = surface_samples(curve, &region, 4000, 7)?;
    for p in &samples.points {
        let x = (*p - w).dot(t);
        if x.norm() >= eps {
            continue;
        }
        let y = (*p - w).dot(nu);
        let near = graph
            .iter()
            .min_by(|a, b| (a.0 - x).norm().total_cmp(&(b.0 - x).norm()))
            .copied()
            .unwrap_or((C64::new(0.0, 0.0), C64::new(0.0, 0.0)));
        let slack = eps / 4.0 + 4.0 * (near.0 - x).norm();
        if (y - near.1).norm() > slack {
            return Err(Error::Multivalued {
                at: x.norm(),
                first: near.1.norm(),
                second: y.norm(),
            });
        }
    }
    Ok(sup)
}

/// Branches and pairwise angles at a singular point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SingularReport {
    pub point: Point2,
    pub n_p: usize,
    /// Angles between complex tangent lines, in `[0, π/2]`.
    pub angles: Vec<f64>,
    pub min_angle: f64,
    pub max_angle: f64,
    pub eps: f64,
    pub passes: bool,
}

/// Angle between the complex lines spanned by `a` and `b`.
pub fn line_angle(a: Point2, b: Point2) -> f64 {
    let c = a.dot(b).norm() / (a.norm() * b.norm());
    c.min(1.0).acos()
}

pub fn singular_structure(curve: &Curve, p: Point2, eps: f64) -> Result<SingularReport> {
    let tol = 1e-9 * (1.0 + p.norm());
    if !curve.singular_points.iter().any(|s| s.dist(p) <= tol) {
        return Err(Error::Domain(format!("{p:?} is not a singular point of the curve")));
    }
    let dirs: Vec<Point2> = curve
        .branches
        .iter()
        .filter_map(|b| {
            let (tau, d) = b.project(p, C64::new(0.0, 0.0))?;
            (d <= tol).then(|| b.tangent(tau))
        })
        .collect();
    let mut angles = Vec::new();
    for i in 0..dirs.len() {
        for j in i + 1..dirs.len() {
            angles.push(line_angle(dirs[i], dirs[j]));
        }
    }
    let min_angle = angles.iter().copied().fold(f64::INFINITY, f64::min);
    let max_angle = angles.iter().copied().fold(0.0, f64::max);
    let n_p = dirs.len();
    let passes = n_p as f64 <= 1.0 / eps && angles.iter().all(|&a| a >= eps && a <= PI - eps);
    Ok(SingularReport {
        point: p,
        n_p,
        angles,
        min_angle,
        max_angle,
        eps,
        passes,
    })
}

/// `sup_z Area(W ∩ B(z, R))` over the centers, with the standard error of the
/// maximizing estimate.
pub fn area_scan(curve: &Curve, r: f64, centers: &[Point2], n_mc: usize, seed: u64) -> Result<Estimate> {
    let areas: Vec<Result<Estimate>> = centers
        .par_iter()
        .enumerate()
        .map(|(i, &z)| {
            let s = surface_samples(
                curve,
                &Region::Ball { center: z, r },
                n_mc,
                crate::density::derive_seed(seed, i as u64),
            )?;
            Ok(Estimate::new(s.total_weight(), s.stderr))
        })
        .collect();
    let mut best = Estimate::default();
    for a in areas {
        let a = a?;
        if a.value > best.value {
            best = a;
        }
    }
    Ok(best)
}

/// Summary of all uniform-flatness checks at one scale.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlatnessReport {
    pub eps_candidate: f64,
    pub standoff: f64,
    pub tubular_radius: f64,
    pub tubular_pass: bool,
    pub witness: Option<Collision>,
    pub graph_points: Vec<Point2>,
    pub graph_max_deviation: f64,
    pub singular: Vec<SingularReport>,
    pub area_radius: f64,
    pub area_sup: f64,
    pub area_stderr: f64,
    /// Dyadic sweep `(ε, passes)` below `eps_candidate`.
    pub strict: Vec<(f64, bool)>,
    pub scope: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FlatnessConfig {
    pub eps: f64,
    pub region: Region,
    pub grid_density: usize,
    pub graph_points: Vec<Point2>,
    pub area_radius: f64,
    pub area_centers: Vec<Point2>,
    pub n_mc: usize,
    pub seed: u64,
    pub strict_levels: usize,
}

pub fn flatness_report(curve: &Curve, cfg: &FlatnessConfig) -> Result<FlatnessReport> {
    let tube = tubular_radius(curve, &cfg.region, cfg.grid_density)?;
    let mut graph_max: f64 = 0.0;
    for &w in &cfg.graph_points {
        graph_max = graph_max.max(graph_deviation(curve, w, cfg.eps)?);
    }
    let singular = curve
        .singular_points
        .iter()
        .filter(|p| cfg.region.contains(**p))
        .map(|&p| singular_structure(curve, p, cfg.eps))
        .collect::<Result<Vec<_>>>()?;
    let area = area_scan(curve, cfg.area_radius, &cfg.area_centers, cfg.n_mc, cfg.seed)?;
    let strict = (0..cfg.strict_levels)
        .map(|k| {
            let e = cfg.eps / 2f64.powi(k as i32);
            (e, tube.passes(e))
        })
        .collect();
    Ok(FlatnessReport {
        eps_candidate: cfg.eps,
        standoff: tube.standoff,
        tubular_radius: tube.eps,
        tubular_pass: tube.passes(cfg.eps),
        witness: if tube.passes(cfg.eps) { None } else { tube.witness },
        graph_points: cfg.graph_points.clone(),
        graph_max_deviation: graph_max,
        singular,
        area_radius: cfg.area_radius,
        area_sup: area.value,
        area_stderr: area.abs_err,
        strict,
        scope: format!("sampled region {:?}", cfg.region),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{make_crossing, make_model_curve, LinearForm};

    fn ball(r: f64) -> Region {
        Region::Ball { center: Point2::ORIGIN, r }
    }

    #[test]
    fn single_line_never_collides() {
        let c = make_crossing(&[LinearForm::x()]).unwrap();
        let t = tubular_radius(&c, &ball(2.0), 800).unwrap();
        assert!(t.witness.is_none());
        assert_eq!(t.eps, 2.0);
        assert!(t.passes(1.9));
    }

    #[test]
    fn parallel_lines_meet_at_the_midplane() {
        let d = 0.8;
        let c = make_crossing(&[LinearForm::x(), LinearForm::vertical(C64::new(d, 0.0))]).unwrap();
        let t = tubular_radius(&c, &ball(2.0), 800).unwrap();
        assert!((t.eps - d / 2.0).abs() < 1e-3, "{}", t.eps);
    }

    #[test]
    fn model_waist_radius() {
        let s = 0.04;
        let c = make_model_curve(C64::new(s, 0.0), None, Point2::ORIGIN).unwrap();
        let t = tubular_radius(&c, &ball(1.0), 3000).unwrap();
        let expect = (2.0 * s).sqrt();
        assert!((t.eps - expect).abs() < 1e-3, "{} vs {expect}", t.eps);
    }

    #[test]
    fn graph_deviation_examples() {
        let line = make_crossing(&[LinearForm::x()]).unwrap();
        assert!(graph_deviation(&line, Point2::real(0.0, 1.0), 0.3).unwrap() < 1e-12);
        let s: f64 = 0.25;
        let m = make_model_curve(C64::new(s, 0.0), None, Point2::ORIGIN).unwrap();
        let w = Point2::real(s.sqrt(), s.sqrt());
        let eps = 0.01;
        let dev = graph_deviation(&m, w, eps).unwrap();
        let expect = eps / (2.0 * 2f64.sqrt() * s.sqrt());
        assert!((dev / expect - 1.0).abs() < 0.05, "{dev} vs {expect}");
    }

    #[test]
    fn singular_structure_examples() {
        let c = make_crossing(&[LinearForm::x(), LinearForm::y()]).unwrap();
        let r = singular_structure(&c, Point2::ORIGIN, 0.5).unwrap();
        assert_eq!(r.n_p, 2);
        assert!((r.min_angle - PI / 2.0).abs() < 1e-12 && r.passes);
        let three = make_crossing(&[
            LinearForm::x(),
            LinearForm::y(),
            LinearForm::new(C64::new(1.0, 0.0), C64::new(1.0, 0.0), C64::new(0.0, 0.0)),
        ])
        .unwrap();
        assert!(singular_structure(&three, Point2::ORIGIN, 1.0 / 3.0).unwrap().passes);
        assert!(!singular_structure(&three, Point2::ORIGIN, 0.34).unwrap().passes);
        assert!(singular_structure(&c, Point2::real(1.0, 0.0), 0.1).is_err());
    }
}
