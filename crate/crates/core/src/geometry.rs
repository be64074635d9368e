//! Curves in ℂ²: constructors, defining functions, parametrized charts, area
//! sampling and branch quadrature of data on the curve.
//!
//! Every branch is the image of a holomorphic map from a planar parameter
//! domain. Sampling works chart by chart on rectangles of real parameters
//! `(p, q)`; the area element is `|Φ'(τ)|²` times the chart's own Jacobian.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use rand::Rng as _;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{polar_integral, Region};
use crate::linalg::Mat2;
use crate::point::Point2;
use crate::quad::{self, Estimate, Tolerance};
use crate::report::Table;
use crate::rng;
use crate::weight::Weight;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

/// The affine form `a x + b y + c`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinearForm {
    pub a: C64,
    pub b: C64,
    #[serde(default)]
    pub c: C64,
}

impl LinearForm {
    pub fn new(a: C64, b: C64, c: C64) -> Self {
        LinearForm { a, b, c }
    }

    pub fn x() -> Self {
        LinearForm::new(ONE, ZERO, ZERO)
    }

    pub fn y() -> Self {
        LinearForm::new(ZERO, ONE, ZERO)
    }

    /// The vertical line `x = x0`.
    pub fn vertical(x0: C64) -> Self {
        LinearForm::new(ONE, ZERO, -x0)
    }

    pub fn eval(&self, p: Point2) -> C64 {
        self.a * p.x + self.b * p.y + self.c
    }

    pub fn gradient(&self) -> Point2 {
        Point2::new(self.a, self.b)
    }

    /// Point of the line closest to the origin and a unit direction.
    pub fn point_and_direction(&self) -> (Point2, Point2) {
        let n2 = self.a.norm_sqr() + self.b.norm_sqr();
        let p0 = Point2::new(-self.c * self.a.conj() / n2, -self.c * self.b.conj() / n2);
        let dir = Point2::new(-self.b, self.a).normalized();
        (p0, dir)
    }

    pub fn is_proportional(&self, other: &LinearForm) -> bool {
        let u = [self.a, self.b, self.c];
        let v = [other.a, other.b, other.c];
        let scale = u.iter().chain(&v).map(|z| z.norm()).fold(0.0, f64::max);
        (0..3).all(|i| (i + 1..3).all(|j| (u[i] * v[j] - u[j] * v[i]).norm() <= 1e-12 * scale * scale))
    }

    /// Form of the image line under `z ↦ U z + w` for unitary `U`.
    pub fn transformed(&self, u: &Mat2, w: Point2) -> LinearForm {
        // L'(z') = (a, b) U* (z' - w) + c
        let a = self.a * u[0][0].conj() + self.b * u[0][1].conj();
        let b = self.a * u[1][0].conj() + self.b * u[1][1].conj();
        LinearForm::new(a, b, self.c - a * w.x - b * w.y)
    }
}

/// Truncation settings for the curve `xy sin y = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SineConfig {
    /// Samples with `|x|` beyond this cutoff are dropped.
    pub x_cut: f64,
    /// Radius of the disk around `y = nπ` covered by the log-polar chart.
    pub inner_radius: f64,
    /// `|Im y|` extent used when no bounded region is given.
    pub im_max: f64,
}

impl Default for SineConfig {
    fn default() -> Self {
        SineConfig {
            x_cut: 1e6,
            inner_radius: 0.1,
            im_max: 4.0,
        }
    }
}

/// Serializable description of a curve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum CurveSpec {
    Model {
        s: C64,
        eps: Option<f64>,
        #[serde(default)]
        center: Point2,
    },
    Sine {
        ns: Vec<i64>,
        #[serde(default)]
        config: SineConfig,
    },
    Crossing {
        forms: Vec<LinearForm>,
    },
    Comb {
        k: usize,
    },
}

impl CurveSpec {
    pub fn build(&self) -> Result<Curve> {
        match self {
            CurveSpec::Model { s, eps, center } => make_model_curve(*s, *eps, *center),
            CurveSpec::Sine { ns, config } => make_sine_curve_with(ns, *config),
            CurveSpec::Crossing { forms } => make_crossing(forms),
            CurveSpec::Comb { k } => make_comb(*k),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CurveKind {
    Model,
    Sine,
    Crossing,
    Comb,
}

#[derive(Debug, Clone, PartialEq)]
pub enum BranchGeom {
    /// `τ ↦ p0 + τ·dir`.
    Line { form: LinearForm, p0: Point2, dir: Point2 },
    /// `τ ↦ center + (τ, s/τ)` over `|s|/ε < |τ| < ε` (or `ℂ*`).
    Hyperbola { s: C64, center: Point2, eps: Option<f64> },
    /// `τ ↦ (1/(y sin y), y)` with `y = nπ + τ`, `Re τ ∈ [-π/2, π/2)`.
    SineSheet { n: i64, config: SineConfig },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Branch {
    pub label: String,
    pub geom: BranchGeom,
}

impl Branch {
    /// Point of the branch at parameter `tau`, or `None` outside its domain.
    pub fn point(&self, tau: C64) -> Option<Point2> {
        match &self.geom {
            BranchGeom::Line { p0, dir, .. } => Some(*p0 + dir.scale(tau)),
            BranchGeom::Hyperbola { s, center, eps } => {
                if tau.norm() == 0.0 {
                    return None;
                }
                if let Some(e) = eps {
                    let r = tau.norm();
                    if r >= *e || r <= s.norm() / e {
                        return None;
                    }
                }
                Some(*center + Point2::new(tau, s / tau))
            }
            BranchGeom::SineSheet { n, config } => {
                if tau.re < -PI / 2.0 || tau.re >= PI / 2.0 {
                    return None;
                }
                let y = C64::new(*n as f64 * PI, 0.0) + tau;
                let d = y * y.sin();
                let x = d.inv();
                if d.norm() == 0.0 || !x.is_finite() || x.norm() > config.x_cut {
                    return None;
                }
                Some(Point2::new(x, y))
            }
        }
    }

    /// Derivative of the parametrization.
    pub fn velocity(&self, tau: C64) -> Point2 {
        match &self.geom {
            BranchGeom::Line { dir, .. } => *dir,
            BranchGeom::Hyperbola { s, .. } => Point2::new(ONE, -s / (tau * tau)),
            BranchGeom::SineSheet { n, .. } => {
                let y = C64::new(*n as f64 * PI, 0.0) + tau;
                let d = y * y.sin();
                let dd = y.sin() + y * y.cos();
                Point2::new(-dd / (d * d), ONE)
            }
        }
    }

    pub fn acceleration(&self, tau: C64) -> Point2 {
        match &self.geom {
            BranchGeom::Line { .. } => Point2::ORIGIN,
            BranchGeom::Hyperbola { s, .. } => Point2::new(C64::new(0.0, 0.0), 2.0 * s / (tau * tau * tau)),
            BranchGeom::SineSheet { n, .. } => {
                let y = C64::new(*n as f64 * PI, 0.0) + tau;
                let d = y * y.sin();
                let d1 = y.sin() + y * y.cos();
                let d2 = 2.0 * y.cos() - y * y.sin();
                Point2::new((2.0 * d1 * d1 - d * d2) / (d * d * d), C64::new(0.0, 0.0))
            }
        }
    }

    /// `|⟨P'', ν⟩| / |P'|²`; its reciprocal is the distance to the focal
    /// circle in the normal line.
    pub fn curvature(&self, tau: C64) -> f64 {
        let v = self.velocity(tau);
        self.acceleration(tau).dot(self.normal(tau)).norm() / v.norm_sqr()
    }

    /// Unit normal (Hermitian-orthogonal to the tangent line) at `tau`.
    pub fn normal(&self, tau: C64) -> Point2 {
        let v = self.velocity(tau);
        Point2::new(-v.y.conj(), v.x.conj()).normalized()
    }

    /// Unit tangent at `tau`.
    pub fn tangent(&self, tau: C64) -> Point2 {
        self.velocity(tau).normalized()
    }

    /// Projection of `z` onto the branch from a starting parameter: Newton on
    /// `⟨P(τ) - z, P'(τ)⟩ = 0` with a Gauss–Newton fallback, both damped so
    /// the distance never increases.
    pub fn project(&self, z: Point2, start: C64) -> Option<(C64, f64)> {
        let mut tau = start;
        let mut p = self.point(tau)?;
        for _ in 0..300 {
            let v = self.velocity(tau);
            let a = v.norm_sqr();
            let g = (p - z).dot(v);
            let gn = -g / a;
            let acc = self.acceleration(tau);
            // A δ + c δ̄ = -g
            let c = (p - z).dot(acc);
            let den = a * a - c.norm_sqr();
            let mut steps = vec![gn];
            if den.abs() > 1e-12 * a * a {
                steps.insert(0, (-g * a + c * g.conj()) / den);
            }
            let mut moved = None;
            for step in steps {
                if !step.is_finite() {
                    continue;
                }
                let mut t = 1.0;
                while t > 1e-4 {
                    let cand = tau + step * t;
                    if let Some(q) = self.point(cand) {
                        if q.dist(z) <= p.dist(z) {
                            moved = Some((cand, q, (step * t).norm()));
                            break;
                        }
                    }
                    t *= 0.5;
                }
                if moved.is_some() {
                    break;
                }
            }
            let Some((cand, q, len)) = moved else { break };
            tau = cand;
            p = q;
            if len < 1e-13 * (1.0 + tau.norm()) {
                break;
            }
        }
        Some((tau, p.dist(z)))
    }
}

/// A possibly singular curve given by branches and a global defining function.
#[derive(Debug, Clone, PartialEq)]
pub struct Curve {
    pub spec: CurveSpec,
    pub kind: CurveKind,
    pub branches: Vec<Branch>,
    pub singular_points: Vec<Point2>,
}

impl Serialize for Curve {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        self.spec.serialize(ser)
    }
}

impl<'de> Deserialize<'de> for Curve {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let spec = CurveSpec::deserialize(de)?;
        spec.build().map_err(serde::de::Error::custom)
    }
}

/// The model hyperbola `(x-a)(y-b) = s`, clipped to `max(|x-a|, |y-b|) < ε`
/// when `eps` is given.
pub fn make_model_curve(s: C64, eps: Option<f64>, center: Point2) -> Result<Curve> {
    if s.norm() == 0.0 {
        return Err(Error::UseCrossing);
    }
    if let Some(e) = eps {
        if !(e > 0.0) || e * e <= s.norm() {
            return Err(Error::EmptyCurve(format!(
                "clipped model curve needs ε² > |s| (ε = {e}, |s| = {})",
                s.norm()
            )));
        }
    }
    Ok(Curve {
        spec: CurveSpec::Model { s, eps, center },
        kind: CurveKind::Model,
        branches: vec![Branch {
            label: "hyperbola".into(),
            geom: BranchGeom::Hyperbola { s, center, eps },
        }],
        singular_points: Vec::new(),
    })
}

/// The sheets of `xy sin y = 1` over the cells `|Re y - nπ| ≤ π/2`.
pub fn make_sine_curve(ns: &[i64]) -> Result<Curve> {
    make_sine_curve_with(ns, SineConfig::default())
}

/// The window `±1, …, ±n_max`.
pub fn sine_window(n_max: i64) -> Vec<i64> {
    (1..=n_max).flat_map(|n| [-n, n]).collect()
}

pub fn make_sine_curve_with(ns: &[i64], config: SineConfig) -> Result<Curve> {
    if ns.is_empty() {
        return Err(Error::EmptyCurve("empty sine window".into()));
    }
    if ns.contains(&0) {
        return Err(Error::Domain(
            "the sine window may not contain n = 0 (y sin y has a double zero at y = 0)".into(),
        ));
    }
    let mut sorted = ns.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    Ok(Curve {
        spec: CurveSpec::Sine { ns: sorted.clone(), config },
        kind: CurveKind::Sine,
        branches: sorted
            .iter()
            .map(|&n| Branch {
                label: format!("sheet n={n}"),
                geom: BranchGeom::SineSheet { n, config },
            })
            .collect(),
        singular_points: Vec::new(),
    })
}

/// Union of the lines `{L_j = 0}`; singular points are pairwise intersections.
pub fn make_crossing(forms: &[LinearForm]) -> Result<Curve> {
    let curve = lines_curve(forms, CurveKind::Crossing)?;
    Ok(Curve {
        spec: CurveSpec::Crossing { forms: forms.to_vec() },
        ..curve
    })
}

/// `z_{2k} = k²`, `z_{2k+1} = k² - 1/k`.
pub fn comb_abscissa(j: usize) -> f64 {
    let k = (j / 2) as f64;
    if j % 2 == 0 {
        k * k
    } else {
        k * k - 1.0 / k
    }
}

/// The vertical lines `{z_j} × ℂ` for `j = 2..=K`.
pub fn make_comb(k: usize) -> Result<Curve> {
    if k < 2 {
        return Err(Error::Domain(format!("comb needs K ≥ 2, got {k}")));
    }
    let forms: Vec<LinearForm> = (2..=k)
        .map(|j| LinearForm::vertical(C64::new(comb_abscissa(j), 0.0)))
        .collect();
    let mut curve = lines_curve(&forms, CurveKind::Comb)?;
    for (b, j) in curve.branches.iter_mut().zip(2..) {
        b.label = format!("z_{j} = {}", comb_abscissa(j));
    }
    Ok(Curve {
        spec: CurveSpec::Comb { k },
        ..curve
    })
}

fn lines_curve(forms: &[LinearForm], kind: CurveKind) -> Result<Curve> {
    if forms.is_empty() {
        return Err(Error::EmptyCurve("no linear forms".into()));
    }
    for f in forms {
        if f.a.norm() == 0.0 && f.b.norm() == 0.0 {
            return Err(Error::Degenerate("linear form with zero gradient".into()));
        }
    }
    let mut singular: Vec<Point2> = Vec::new();
    for i in 0..forms.len() {
        for j in i + 1..forms.len() {
            let (f, g) = (&forms[i], &forms[j]);
            if f.is_proportional(g) {
                return Err(Error::Degenerate(format!("forms {i} and {j} define the same line")));
            }
            let det = f.a * g.b - f.b * g.a;
            let scale = f.gradient().norm() * g.gradient().norm();
            if det.norm() <= 1e-14 * scale {
                continue;
            }
            let p = Point2::new((-f.c * g.b + g.c * f.b) / det, (-f.a * g.c + g.a * f.c) / det);
            if !singular.iter().any(|q| q.dist(p) < 1e-12 * (1.0 + p.norm())) {
                singular.push(p);
            }
        }
    }
    let branches = forms
        .iter()
        .enumerate()
        .map(|(i, &form)| {
            let (p0, dir) = form.point_and_direction();
            Branch {
                label: format!("line {i}"),
                geom: BranchGeom::Line { form, p0, dir },
            }
        })
        .collect();
    Ok(Curve {
        spec: CurveSpec::Crossing { forms: forms.to_vec() },
        kind,
        branches,
        singular_points: singular,
    })
}

impl Curve {
    pub fn line_forms(&self) -> Option<Vec<LinearForm>> {
        self.branches
            .iter()
            .map(|b| match b.geom {
                BranchGeom::Line { form, .. } => Some(form),
                _ => None,
            })
            .collect()
    }

    /// Defining function `T`.
    pub fn t(&self, p: Point2) -> C64 {
        match &self.spec {
            CurveSpec::Model { s, center, .. } => (p.x - center.x) * (p.y - center.y) - s,
            CurveSpec::Sine { .. } => p.x * p.y * p.y.sin() - 1.0,
            CurveSpec::Crossing { .. } | CurveSpec::Comb { .. } => self
                .line_forms()
                .expect("line curve")
                .iter()
                .map(|f| f.eval(p))
                .product(),
        }
    }

    /// Holomorphic differential `(∂T/∂x, ∂T/∂y)`.
    pub fn dt(&self, p: Point2) -> Point2 {
        match &self.spec {
            CurveSpec::Model { center, .. } => Point2::new(p.y - center.y, p.x - center.x),
            CurveSpec::Sine { .. } => {
                Point2::new(p.y * p.y.sin(), p.x * (p.y.sin() + p.y * p.y.cos()))
            }
            CurveSpec::Crossing { .. } | CurveSpec::Comb { .. } => {
                let forms = self.line_forms().expect("line curve");
                let values: Vec<C64> = forms.iter().map(|f| f.eval(p)).collect();
                let mut grad = Point2::ORIGIN;
                for (i, f) in forms.iter().enumerate() {
                    let others: C64 = values
                        .iter()
                        .enumerate()
                        .filter(|(j, _)| *j != i)
                        .map(|(_, v)| *v)
                        .product();
                    grad = grad + f.gradient().scale(others);
                }
                grad
            }
        }
    }

    /// Scale of `T` near `p`, used for on-curve tolerances.
    pub fn t_scale(&self, p: Point2) -> f64 {
        match self.kind {
            CurveKind::Sine => 1.0 + p.x.norm() * p.y.norm() * p.y.sin().norm(),
            _ => 1.0 + self.dt(p).norm() * (1.0 + p.norm()),
        }
    }

    /// Zeros `λ` of `T(z + λ v)` with `|λ| < r`, for a unit vector `v`.
    pub fn line_zeros(&self, z: Point2, v: Point2, r: f64) -> Result<Vec<C64>> {
        match &self.spec {
            CurveSpec::Crossing { .. } | CurveSpec::Comb { .. } => {
                let mut out = Vec::new();
                for f in self.line_forms().expect("line curve") {
                    let slope = f.a * v.x + f.b * v.y;
                    if slope.norm() == 0.0 {
                        continue;
                    }
                    let lam = -f.eval(z) / slope;
                    if lam.norm() < r {
                        out.push(lam);
                    }
                }
                Ok(out)
            }
            CurveSpec::Model { s, center, .. } => {
                let al = z.x - center.x;
                let be = z.y - center.y;
                let qa = v.x * v.y;
                let qb = al * v.y + be * v.x;
                let qc = al * be - s;
                Ok(quadratic_roots(qa, qb, qc)
                    .into_iter()
                    .filter(|l| l.norm() < r)
                    .collect())
            }
            CurveSpec::Sine { .. } => {
                let g = |l: C64| self.t(z + v.scale(l));
                let dg = |l: C64| {
                    let d = self.dt(z + v.scale(l));
                    d.x * v.x + d.y * v.y
                };
                crate::roots::zeros_in_disk(g, dg, r, crate::roots::RootBudget::default())
            }
        }
    }

    /// Nearest point of the curve within `search` of `z`, as (branch, parameter, distance).
    pub fn nearest(&self, z: Point2, search: f64) -> Option<(usize, C64, f64)> {
        let mut best: Option<(usize, C64, f64)> = None;
        let mut consider = |cand: Option<(usize, C64, f64)>| {
            if let Some(c) = cand {
                if best.map_or(true, |b| c.2 < b.2) {
                    best = Some(c);
                }
            }
        };
        for (i, b) in self.branches.iter().enumerate() {
            match &b.geom {
                BranchGeom::Line { p0, dir, .. } => {
                    let tau = (z - *p0).dot(*dir);
                    let p = *p0 + dir.scale(tau);
                    consider(Some((i, tau, p.dist(z))));
                }
                _ => {
                    for seed in self.branch_seeds(i, z, search) {
                        consider(b.project(z, seed).map(|(t, d)| (i, t, d)));
                    }
                }
            }
        }
        best.filter(|b| b.2 <= search)
    }

    fn branch_seeds(&self, i: usize, z: Point2, search: f64) -> Vec<C64> {
        let region = Region::Ball { center: z, r: search };
        let mut seeds = Vec::new();
        for chart in self.branch_charts(i, &region) {
            let (np, nq) = (12, 12);
            for a in 0..np {
                for c in 0..nq {
                    let p = chart.p.0 + (chart.p.1 - chart.p.0) * (a as f64 + 0.5) / np as f64;
                    let q = chart.q.0 + (chart.q.1 - chart.q.0) * (c as f64 + 0.5) / nq as f64;
                    let tau = chart.param(p, q);
                    if self.branches[i].point(tau).is_some() && chart.accepts(tau) {
                        seeds.push(tau);
                    }
                }
            }
        }
        seeds
    }

    /// Distance from `z` to the curve, if it is below `search`.
    pub fn distance(&self, z: Point2, search: f64) -> Option<f64> {
        self.nearest(z, search).map(|b| b.2)
    }

    /// Image of a line arrangement under `z ↦ U z + w` (`U` unitary).
    pub fn transformed(&self, u: &Mat2, w: Point2) -> Result<Curve> {
        let forms = self.line_forms().ok_or_else(|| {
            Error::Domain("only line arrangements can be moved by a unitary map".into())
        })?;
        let moved: Vec<LinearForm> = forms.iter().map(|f| f.transformed(u, w)).collect();
        let mut c = make_crossing(&moved)?;
        c.kind = self.kind;
        Ok(c)
    }

    /// Charts covering `branch ∩ region` (possibly a superset).
    pub fn branch_charts(&self, i: usize, region: &Region) -> Vec<Chart> {
        let (center, r, bidisk) = match *region {
            Region::Ball { center, r } => (center, r, false),
            Region::Bidisk { center, r } => (center, r, true),
            Region::FullPlane | Region::Annulus { .. } => return Vec::new(),
        };
        if !(r > 0.0) {
            return Vec::new();
        }
        let b = &self.branches[i];
        match &b.geom {
            BranchGeom::Line { p0, dir, .. } => {
                let tc = (center - *p0).dot(*dir);
                let d2 = (*p0 + dir.scale(tc)).dist(center).powi(2);
                let reach2 = if bidisk { 2.0 * r * r } else { r * r };
                if d2 >= reach2 {
                    return Vec::new();
                }
                vec![Chart {
                    branch: i,
                    map: ChartMap::Polar { center: tc },
                    p: (0.0, (reach2 - d2).sqrt()),
                    q: (0.0, 2.0 * PI),
                    hole: None,
                }]
            }
            BranchGeom::Hyperbola { s, center: c0, eps } => {
                let reach = if bidisk { r } else { r };
                let mut hi = (center.x - c0.x).norm() + reach;
                let mut lo = s.norm() / ((center.y - c0.y).norm() + reach);
                if let Some(e) = eps {
                    hi = hi.min(*e);
                    lo = lo.max(s.norm() / e);
                }
                if lo >= hi {
                    return Vec::new();
                }
                vec![Chart {
                    branch: i,
                    map: ChartMap::LogPolar,
                    p: (lo.ln(), hi.ln()),
                    q: (0.0, 2.0 * PI),
                    hole: None,
                }]
            }
            BranchGeom::SineSheet { n, config } => {
                let ny = *n as f64 * PI;
                let reach = if bidisk { r * std::f64::consts::SQRT_2 } else { r };
                let re_lo = (center.y.re - ny - r).max(-PI / 2.0);
                let re_hi = (center.y.re - ny + r).min(PI / 2.0);
                let im_lo = center.y.im - r;
                let im_hi = center.y.im + r;
                if re_lo >= re_hi {
                    return Vec::new();
                }
                let mut charts = vec![Chart {
                    branch: i,
                    map: ChartMap::Cartesian,
                    p: (re_lo, re_hi),
                    q: (im_lo, im_hi),
                    hole: Some(config.inner_radius),
                }];
                // the inner disk, where the sheet runs off to large |x|
                let box_dist_re = 0.0f64.clamp(re_lo, re_hi).abs();
                let box_dist_im = 0.0f64.clamp(im_lo, im_hi).abs();
                if box_dist_re.hypot(box_dist_im) < config.inner_radius {
                    let x_max = config.x_cut.min(center.x.norm() + reach);
                    let w_lo = 0.99 / (x_max * (ny.abs() + 1.0) * 1.01);
                    if w_lo < config.inner_radius {
                        charts.push(Chart {
                            branch: i,
                            map: ChartMap::LogPolar,
                            p: (w_lo.ln(), config.inner_radius.ln()),
                            q: (0.0, 2.0 * PI),
                            hole: None,
                        });
                    }
                }
                charts
            }
        }
    }
}

fn quadratic_roots(a: C64, b: C64, c: C64) -> Vec<C64> {
    let scale = a.norm().max(b.norm()).max(c.norm());
    if scale == 0.0 {
        return Vec::new();
    }
    if a.norm() <= 1e-15 * scale {
        if b.norm() == 0.0 {
            return Vec::new();
        }
        return vec![-c / b];
    }
    let disc = (b * b - 4.0 * a * c).sqrt();
    // choose the sign that avoids cancellation
    let q = if (b.conj() * disc).re >= 0.0 {
        -0.5 * (b + disc)
    } else {
        -0.5 * (b - disc)
    };
    if q.norm() == 0.0 {
        return vec![ZERO, ZERO];
    }
    vec![q / a, c / q]
}

/// How chart coordinates `(p, q)` map to the branch parameter `τ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ChartMap {
    /// `τ = center + p e^{iq}`, Jacobian `p`.
    Polar { center: C64 },
    /// `τ = e^{p + iq}`, Jacobian `|τ|²`.
    LogPolar,
    /// `τ = p + iq`.
    Cartesian,
}

/// A rectangle `[p0, p1] × [q0, q1]` of chart coordinates on one branch.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Chart {
    pub branch: usize,
    pub map: ChartMap,
    pub p: (f64, f64),
    pub q: (f64, f64),
    /// Parameters with `|τ|` below this radius belong to another chart.
    pub hole: Option<f64>,
}

impl Chart {
    pub fn param(&self, p: f64, q: f64) -> C64 {
        match self.map {
            ChartMap::Polar { center } => center + C64::from_polar(p, q),
            ChartMap::LogPolar => C64::from_polar(p.exp(), q),
            ChartMap::Cartesian => C64::new(p, q),
        }
    }

    pub fn accepts(&self, tau: C64) -> bool {
        self.hole.map_or(true, |h| tau.norm() >= h)
    }

    fn coordinate_jacobian(&self, p: f64, tau: C64) -> f64 {
        match self.map {
            ChartMap::Polar { .. } => p,
            ChartMap::LogPolar => tau.norm_sqr(),
            ChartMap::Cartesian => 1.0,
        }
    }

    /// Ambient size of a `dp × dq` cell at `(p, τ)`.
    pub fn spacing(&self, b: &Branch, p: f64, tau: C64, dp: f64, dq: f64) -> f64 {
        let speed = b.velocity(tau).norm();
        match self.map {
            ChartMap::Polar { .. } => speed * dp.max(p * dq),
            ChartMap::LogPolar => speed * tau.norm() * dp.max(dq),
            ChartMap::Cartesian => speed * dp.max(dq),
        }
    }

    /// Point and area density at chart coordinates, if in the domain.
    pub fn eval(&self, b: &Branch, p: f64, q: f64) -> Option<(Point2, C64, f64)> {
        let tau = self.param(p, q);
        if !self.accepts(tau) {
            return None;
        }
        let pt = b.point(tau)?;
        let jac = b.velocity(tau).norm_sqr() * self.coordinate_jacobian(p, tau);
        Some((pt, tau, jac))
    }
}

/// Area-weighted nodes on the regular part of a curve.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SurfaceSamples {
    pub points: Vec<Point2>,
    pub weights: Vec<f64>,
    /// Unit normals at the points.
    pub normals: Vec<Point2>,
    pub branch: Vec<usize>,
    pub params: Vec<C64>,
    /// Stratification cell of each sample; samples of a cell are adjacent.
    pub cell: Vec<u32>,
    /// Local node spacing (ambient distance) at each sample.
    pub spacing: Vec<f64>,
    pub seed: u64,
    /// Standard error of `Σ weights`.
    pub stderr: f64,
}

impl SurfaceSamples {
    fn empty(seed: u64) -> Self {
        SurfaceSamples {
            points: Vec::new(),
            weights: Vec::new(),
            normals: Vec::new(),
            branch: Vec::new(),
            params: Vec::new(),
            cell: Vec::new(),
            spacing: Vec::new(),
            seed,
            stderr: 0.0,
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn total_weight(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// Standard error of `Σ_i c_i` from the within-cell spread of the
    /// per-sample contributions `c_i` (paired stratified sampling).
    pub fn stderr_of(&self, contributions: &[f64]) -> f64 {
        let mut var = 0.0;
        let mut i = 0;
        while i < contributions.len() {
            let mut j = i + 1;
            while j < contributions.len() && self.cell[j] == self.cell[i] {
                j += 1;
            }
            let diff = if j - i >= 2 {
                contributions[i] - contributions[i + 1]
            } else {
                contributions[i]
            };
            var += diff * diff;
            i = j;
        }
        var.sqrt()
    }

    pub fn to_table(&self) -> Table {
        let mut t = Table::new(&["x_re", "x_im", "y_re", "y_im", "weight"]);
        for (p, w) in self.points.iter().zip(&self.weights) {
            t.push(vec![p.x.re.into(), p.x.im.into(), p.y.re.into(), p.y.im.into(), (*w).into()]);
        }
        t
    }
}

/// How sample positions are chosen inside a stratification cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Placement {
    /// Two uniform random points per cell (unbiased, with error estimate).
    Jittered,
    /// The cell center (deterministic grids for geometric tests).
    Centered,
}

const MARGINAL_P: usize = 256;
const MARGINAL_Q: usize = 32;

/// Per-chart mass profile along `p`, restricted to the region.
fn chart_profile(curve: &Curve, chart: &Chart, region: &Region) -> Vec<f64> {
    let b = &curve.branches[chart.branch];
    let dp = (chart.p.1 - chart.p.0) / MARGINAL_P as f64;
    let dq = (chart.q.1 - chart.q.0) / MARGINAL_Q as f64;
    (0..MARGINAL_P)
        .map(|i| {
            let p = chart.p.0 + (i as f64 + 0.5) * dp;
            let mut m = 0.0;
            for j in 0..MARGINAL_Q {
                let q = chart.q.0 + (j as f64 + 0.5) * dq;
                if let Some((pt, _, jac)) = chart.eval(b, p, q) {
                    if region.contains(pt) {
                        m += jac;
                    }
                }
            }
            m * dp * dq
        })
        .collect()
}

/// Cell boundaries in `p` holding equal shares of the profile mass.
fn equal_mass_cuts(chart: &Chart, profile: &[f64], cells: usize) -> Vec<f64> {
    let total: f64 = profile.iter().sum();
    let dp = (chart.p.1 - chart.p.0) / profile.len() as f64;
    // keep a floor so that empty-looking stretches still get probed
    let floor = total * 0.02 / profile.len() as f64;
    let adj: Vec<f64> = profile.iter().map(|m| m + floor).collect();
    let adj_total: f64 = adj.iter().sum();
    let mut cuts = vec![chart.p.0];
    let mut acc = 0.0;
    let mut k = 1;
    for (i, m) in adj.iter().enumerate() {
        while k < cells && acc + m >= adj_total * k as f64 / cells as f64 {
            let need = adj_total * k as f64 / cells as f64 - acc;
            let frac = if *m > 0.0 { need / m } else { 0.0 };
            cuts.push(chart.p.0 + (i as f64 + frac) * dp);
            k += 1;
        }
        acc += m;
    }
    while cuts.len() < cells {
        cuts.push(chart.p.1);
    }
    cuts.push(chart.p.1);
    cuts
}

/// Area sampling of `W ∩ region` with about `n` nodes, stratified so that
/// node density follows the area density of each chart.
pub fn surface_samples(curve: &Curve, region: &Region, n: usize, seed: u64) -> Result<SurfaceSamples> {
    sample_curve(curve, region, n, seed, Placement::Jittered)
}

pub fn sample_curve(
    curve: &Curve,
    region: &Region,
    n: usize,
    seed: u64,
    placement: Placement,
) -> Result<SurfaceSamples> {
    if n == 0 {
        return Err(Error::Domain("sample count must be at least 1".into()));
    }
    if matches!(region, Region::FullPlane | Region::Annulus { .. }) {
        return Err(Error::Domain("surface sampling needs a ball or bidisk region".into()));
    }
    let charts: Vec<Chart> = (0..curve.branches.len())
        .flat_map(|i| curve.branch_charts(i, region))
        .collect();
    let profiles: Vec<Vec<f64>> = charts
        .par_iter()
        .map(|c| chart_profile(curve, c, region))
        .collect();
    let masses: Vec<f64> = profiles.iter().map(|p| p.iter().sum()).collect();
    let total: f64 = masses.iter().sum();
    if total <= 0.0 {
        return Ok(SurfaceSamples::empty(seed));
    }
    let per_cell = match placement {
        Placement::Jittered => 2,
        Placement::Centered => 1,
    };
    let parts: Vec<Vec<(Point2, f64, Point2, usize, C64, u32, f64)>> = charts
        .par_iter()
        .enumerate()
        .map(|(ci, chart)| {
            if masses[ci] <= 0.0 {
                return Vec::new();
            }
            let share = (n as f64 * masses[ci] / total / per_cell as f64).ceil() as usize;
            let cells = share.max(4);
            let np = ((cells as f64).sqrt().ceil() as usize).max(2);
            let nq = cells.div_ceil(np).max(2);
            let nq = nq + nq % 2;
            let cuts = equal_mass_cuts(chart, &profiles[ci], np);
            let b = &curve.branches[chart.branch];
            let dq = (chart.q.1 - chart.q.0) / nq as f64;
            let mut rng = rng::stream(seed, ci as u64);
            let mut out = Vec::with_capacity(np * nq * per_cell);
            for a in 0..np {
                let (p0, p1) = (cuts[a], cuts[a + 1]);
                if p1 <= p0 {
                    continue;
                }
                for c in 0..nq {
                    let q0 = chart.q.0 + c as f64 * dq;
                    let cell_id = ((ci as u64) << 24 | (a * nq + c) as u64) as u32;
                    for _ in 0..per_cell {
                        let u = match placement {
                            Placement::Jittered => rng.gen::<f64>(),
                            Placement::Centered => 0.5,
                        };
                        let v = match placement {
                            Placement::Jittered => rng.gen::<f64>(),
                            Placement::Centered => 0.5,
                        };
                        let q = q0 + dq * v;
                        // polar cells are sampled uniformly in area
                        let (p, area) = match chart.map {
                            ChartMap::Polar { .. } => (
                                (p0 * p0 + u * (p1 * p1 - p0 * p0)).sqrt(),
                                0.5 * (p1 * p1 - p0 * p0) * dq,
                            ),
                            _ => (p0 + u * (p1 - p0), (p1 - p0) * dq),
                        };
                        if let Some((pt, tau, jac)) = chart.eval(b, p, q) {
                            if region.contains(pt) {
                                let jac = match chart.map {
                                    ChartMap::Polar { .. } => jac / p,
                                    _ => jac,
                                };
                                let w = jac * area / per_cell as f64;
                                let h = chart.spacing(b, p, tau, p1 - p0, dq);
                                out.push((pt, w, b.normal(tau), chart.branch, tau, cell_id, h));
                            }
                        }
                    }
                }
            }
            out
        })
        .collect();
    let mut s = SurfaceSamples::empty(seed);
    for part in parts {
        for (pt, w, nrm, br, tau, cell, h) in part {
            s.points.push(pt);
            s.weights.push(w);
            s.normals.push(nrm);
            s.branch.push(br);
            s.params.push(tau);
            s.cell.push(cell);
            s.spacing.push(h);
        }
    }
    let w = s.weights.clone();
    s.stderr = s.stderr_of(&w);
    Ok(s)
}

/// `∫_{W_reg ∩ region} |f|² e^{-φ}` by branch quadrature.
///
/// Lines and hyperbolas use iterated adaptive quadrature in their natural
/// parameter; sine sheets fall back to stratified sampling with `fallback_n`
/// nodes.
pub fn datum_norm<F>(f: F, curve: &Curve, w: &Weight, region: &Region) -> Result<Estimate>
where
    F: Fn(Point2) -> C64 + Sync,
{
    datum_norm_with(f, curve, w, region, 1e-10, 200_000, 0)
}

pub fn datum_norm_with<F>(
    f: F,
    curve: &Curve,
    w: &Weight,
    region: &Region,
    rel: f64,
    fallback_n: usize,
    seed: u64,
) -> Result<Estimate>
where
    F: Fn(Point2) -> C64 + Sync,
{
    let mut total = Estimate::default();
    for (i, b) in curve.branches.iter().enumerate() {
        let g = |p: Point2| {
            if region.contains(p) {
                f(p).norm_sqr() * (-w.eval(p)).exp()
            } else {
                0.0
            }
        };
        let est = match &b.geom {
            BranchGeom::Line { p0, dir, .. } => {
                let (tc, radius) = match *region {
                    Region::FullPlane => ((Point2::ORIGIN - *p0).dot(*dir), None),
                    Region::Ball { center, r } | Region::Bidisk { center, r } => {
                        let tc = (center - *p0).dot(*dir);
                        let d2 = (*p0 + dir.scale(tc)).dist(center).powi(2);
                        let reach2 = if matches!(region, Region::Ball { .. }) { r * r } else { 2.0 * r * r };
                        if d2 >= reach2 {
                            continue;
                        }
                        (tc, Some((reach2 - d2).sqrt()))
                    }
                    Region::Annulus { .. } => {
                        return Err(Error::Domain("annulus regions are one-variable only".into()))
                    }
                };
                polar_integral(|t| g(*p0 + dir.scale(t)), tc, 0.0, radius, rel)?
            }
            BranchGeom::Hyperbola { s, center, eps } => {
                let bounds = match *region {
                    Region::FullPlane => eps.map(|e| ((s.norm() / e).ln(), e.ln())),
                    _ => {
                        let charts = curve.branch_charts(i, region);
                        match charts.first() {
                            Some(c) => Some(c.p),
                            None => continue,
                        }
                    }
                };
                let radial = |u: f64| {
                    let r = u.exp();
                    let mean = quad::periodic_mean_rel(
                        |th| {
                            let t = C64::from_polar(r, th);
                            let p = *center + Point2::new(t, s / t);
                            if b.point(t).is_none() {
                                return 0.0;
                            }
                            g(p) * (1.0 + s.norm_sqr() / r.powi(4)) * r * r
                        },
                        Tolerance::rel(rel * 0.1).with_abs(1e-300),
                    );
                    mean.map(|m| 2.0 * PI * m.value).unwrap_or(f64::NAN)
                };
                let tol = Tolerance::rel(rel).with_abs(1e-300);
                match bounds {
                    Some((lo, hi)) => quad::integrate(radial, lo, hi, tol)?,
                    None => quad::integrate_real_line(radial, 0.5 * s.norm().ln(), tol)?,
                }
            }
            BranchGeom::SineSheet { .. } => {
                if matches!(region, Region::FullPlane) {
                    return Err(Error::Domain(
                        "the sine curve has infinite area; give a bounded region".into(),
                    ));
                }
                let single = Curve {
                    branches: vec![b.clone()],
                    ..curve.clone()
                };
                let samples = surface_samples(&single, region, fallback_n, rng_seed(seed, i))?;
                let contrib: Vec<f64> = samples
                    .points
                    .iter()
                    .zip(&samples.weights)
                    .map(|(p, wt)| wt * g(*p))
                    .collect();
                Estimate::new(contrib.iter().sum(), samples.stderr_of(&contrib))
            }
        };
        total = Estimate::new(total.value + est.value, total.abs_err + est.abs_err);
    }
    Ok(total)
}

fn rng_seed(seed: u64, i: usize) -> u64 {
    seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(i as u64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn model_curve_examples() {
        let w = make_model_curve(c(1.0, 0.0), None, Point2::ORIGIN).unwrap();
        assert_eq!(w.t(Point2::real(1.0, 1.0)), ZERO);
        assert!(matches!(
            make_model_curve(c(0.25, 0.0), Some(0.4), Point2::ORIGIN),
            Err(Error::EmptyCurve(_))
        ));
        assert!(matches!(make_model_curve(ZERO, None, Point2::ORIGIN), Err(Error::UseCrossing)));
        let w = make_model_curve(c(0.01, 0.0), Some(0.5), Point2::real(2.0, 3.0)).unwrap();
        assert!(w.t(Point2::real(2.1, 3.1)).norm() < 1e-15);
    }

    #[test]
    fn model_parametrization_is_exact() {
        let s = c(0.3, -0.2);
        let w = make_model_curve(s, None, Point2::new(c(1.0, 2.0), c(-0.5, 0.0))).unwrap();
        let b = &w.branches[0];
        let mut worst: f64 = 0.0;
        for k in 0..1000 {
            let t = C64::from_polar(0.05 + 0.01 * k as f64, 0.37 * k as f64);
            let p = b.point(t).unwrap();
            worst = worst.max(w.t(p).norm() / w.t_scale(p));
        }
        assert!(worst <= 1e-12, "{worst}");
    }

    #[test]
    fn sine_curve_examples() {
        let w = make_sine_curve(&[1, 2]).unwrap();
        let y = PI / 2.0 + 2.0 * PI;
        assert!(w.t(Point2::real(1.0 / y, y)).norm() < 1e-15);
        assert!((w.t(Point2::real(1.0, 1.0)).re - (1.0f64.sin() - 1.0)).abs() < 1e-15);
        assert!(make_sine_curve(&[-1, 0, 1]).is_err());
        let w10 = make_sine_curve(&[10]).unwrap();
        // near (0, nπ) the curve is close to the hyperbola x·(y - nπ) = 1/(nπ),
        // whose waist lies at distance √(2/(nπ))
        let d = w10.distance(Point2::real(0.0, 10.0 * PI), 1.0).unwrap();
        let waist = (2.0 / (10.0 * PI)).sqrt();
        assert!((d - waist).abs() < 0.01 * waist, "{d} vs {waist}");
    }

    #[test]
    fn crossing_examples() {
        let w = make_crossing(&[LinearForm::x(), LinearForm::y()]).unwrap();
        assert_eq!(w.branches.len(), 2);
        assert_eq!(w.singular_points, vec![Point2::ORIGIN]);
        assert!(make_crossing(&[LinearForm::x(), LinearForm::x()]).is_err());
        let three = make_crossing(&[
            LinearForm::x(),
            LinearForm::y(),
            LinearForm::new(ONE, ONE, ZERO),
        ])
        .unwrap();
        assert_eq!(three.singular_points.len(), 1);
        assert_eq!(three.branches.len(), 3);
    }

    #[test]
    fn comb_examples() {
        assert_eq!(comb_abscissa(4), 4.0);
        assert_eq!(comb_abscissa(5), 3.5);
        assert_eq!(make_comb(4).unwrap().branches.len(), 3);
        assert!((comb_abscissa(8) - comb_abscissa(9) - 0.25).abs() < 1e-15);
    }

    #[test]
    fn line_area_in_ball_is_exact() {
        let w = make_crossing(&[LinearForm::x()]).unwrap();
        let r = 1.5;
        let s = surface_samples(&w, &Region::Ball { center: Point2::ORIGIN, r }, 4000, 1).unwrap();
        assert!((s.total_weight() - PI * r * r).abs() < 1e-9 * PI * r * r);
        for p in &s.points {
            assert!(w.t(*p).norm() <= 1e-8 * (1.0 + p.norm_sqr()));
        }
    }

    #[test]
    fn far_region_and_model_near_origin_are_empty() {
        let w = make_crossing(&[LinearForm::x()]).unwrap();
        let far = Region::Ball { center: Point2::real(10.0, 0.0), r: 1.0 };
        assert!(surface_samples(&w, &far, 100, 0).unwrap().is_empty());
        let m = make_model_curve(ONE, None, Point2::ORIGIN).unwrap();
        let near = Region::Ball { center: Point2::ORIGIN, r: 0.5 };
        assert!(surface_samples(&m, &near, 1000, 0).unwrap().is_empty());
    }

    #[test]
    fn datum_norm_examples() {
        let g = Weight::gaussian();
        let line = make_crossing(&[LinearForm::x()]).unwrap();
        let v = datum_norm(|_| ONE, &line, &g, &Region::FullPlane).unwrap();
        assert!((v.value - PI).abs() < 1e-9);
        assert_eq!(datum_norm(|_| ZERO, &line, &g, &Region::FullPlane).unwrap().value, 0.0);
        let comb = make_comb(5).unwrap();
        let z4 = comb_abscissa(4);
        let f = |p: Point2| {
            if (p.x.re - z4).abs() < 1e-9 {
                c((0.5 * z4 * z4).exp(), 0.0)
            } else {
                ZERO
            }
        };
        let v = datum_norm(f, &comb, &g, &Region::FullPlane).unwrap();
        assert!((v.value - PI).abs() < 1e-8, "{}", v.value);
    }
}
