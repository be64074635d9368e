use std::f64::consts::PI;

use fockext::counterexample::{comb_min_norm, Mode};
use fockext::density::{singular_fn, singular_fn_line, singular_fn_with, DirectionRule};
use fockext::extend_min::{minimal_extension, ConstraintSet};
use fockext::extend_model::{cjs, model_extend, twist, LaurentSeries};
use fockext::fock::{fock_norm_sqr2, Region};
use fockext::geometry::{datum_norm, make_crossing, make_model_curve, LinearForm};
use fockext::{Point2, Poly2, Weight, C64};
use proptest::prelude::*;

fn c64() -> impl Strategy<Value = C64> {
    (-1.0..1.0f64, -1.0..1.0f64).prop_map(|(a, b)| C64::new(a, b))
}

fn point(r: f64) -> impl Strategy<Value = Point2> {
    (-r..r, -r..r, -r..r, -r..r).prop_map(|(a, b, c, d)| Point2::from_reals([a, b, c, d]))
}

fn unitary(a: f64, b: f64, c: f64) -> [[C64; 2]; 2] {
    let (ca, sa) = (a.cos(), a.sin());
    let p = C64::from_polar(1.0, b);
    let q = C64::from_polar(1.0, c);
    [[p * ca, -q.conj() * sa], [q * sa, p.conj() * ca]]
}

#[test]
fn datum_norm_matches_curve_quadrature() {
    let s = C64::new(0.08, 0.0);
    let a = LaurentSeries::from_coeffs(s, vec![C64::new(0.3, 0.1), C64::new(-0.2, 0.5), C64::new(1.0, 0.0)]).unwrap();
    let curve = make_model_curve(s, None, Point2::ORIGIN).unwrap();
    let quad = datum_norm(|p| a.eval(p.x), &curve, &Weight::gaussian(), &Region::FullPlane).unwrap();
    let coeffs = a.datum_norm_sqr().unwrap();
    assert!((quad.value / coeffs - 1.0).abs() < 1e-7, "{} vs {coeffs}", quad.value);
}

#[test]
fn comb_norms_increase_with_k() {
    let v: Vec<f64> = (1..=16).map(|k| comb_min_norm(k, Mode::Kernel).unwrap()).collect();
    assert!(v.windows(2).all(|w| w[1] > w[0]));
    // π k² asymptotics
    assert!((v[15] / (PI * 256.0) - 1.0).abs() < 0.01);
}

#[test]
fn singular_fn_vanishes_far_from_line() {
    let line = make_crossing(&[LinearForm::x()]).unwrap();
    let z = Point2::real(3.0, 0.5);
    assert!(singular_fn(&line, z, 2.0).unwrap().abs() < 1e-12);
    assert_eq!(singular_fn_line(3.0, 2.0), 0.0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn cjs_substitution_identity(j in -6i64..=6, s in 0.005..0.5f64) {
        let a = cjs(j, s, None).unwrap().value;
        let b = cjs(-j, s, None).unwrap().value;
        let mirrored = ((2 * j) as f64 * s.ln() + b.ln()).exp();
        prop_assert!((a - mirrored).abs() <= 1e-9 * a);
    }

    #[test]
    fn model_extension_norm_bound(coeffs in prop::collection::vec(c64(), 3..=9usize).prop_filter("odd", |v| v.len() % 2 == 1),
                                  s_abs in 0.01..0.1f64, phase in 0.0..6.28f64) {
        let s = C64::from_polar(s_abs, phase);
        let a = LaurentSeries::from_coeffs(s, coeffs).unwrap();
        let e = model_extend(&a).unwrap();
        prop_assert!(e.norm_sqr <= 2.0 * PI * a.datum_norm_sqr().unwrap() + 1e-6);
        prop_assert!(e.restriction_residual(|p| a.eval(p.x), s_abs.sqrt(), 33) <= 1e-8);
    }

    #[test]
    fn twist_is_pointwise_unitary(c in point(2.0), z in point(2.0), k0 in c64(), k1 in c64()) {
        let f = |p: Point2| k0 + k1 * p.x * p.y;
        let fc = twist(f, c);
        let lhs = fc(z).norm_sqr() * (-z.norm_sqr()).exp();
        let rhs = f(z + c).norm_sqr() * (-(z + c).norm_sqr()).exp();
        prop_assert!((lhs - rhs).abs() <= 1e-10 * lhs.max(rhs).max(1e-300));
    }

    #[test]
    fn singular_fn_is_nonpositive(z in point(1.5), r in 0.3..3.0f64) {
        let cross = make_crossing(&[LinearForm::x(), LinearForm::y()]).unwrap();
        prop_assert!(singular_fn(&cross, z, r).unwrap() <= 1e-12);
    }

    #[test]
    fn singular_fn_is_rotation_invariant(z in point(1.0), a in 0.0..1.5f64, b in 0.0..6.28f64, c in 0.0..6.28f64, w in point(1.0)) {
        let cross = make_crossing(&[LinearForm::x(), LinearForm::y()]).unwrap();
        let u = unitary(a, b, c);
        let moved = cross.transformed(&u, w).unwrap();
        // the direction rule is not rotation invariant, so agreement is up to its quadrature error
        let rule = DirectionRule::new(48, 48);
        let before = singular_fn_with(&cross, z, 1.2, &rule).unwrap();
        let after = singular_fn_with(&moved, z.transform(&u) + w, 1.2, &rule).unwrap();
        prop_assert!((before - after).abs() <= 1e-4 * (1.0 + before.abs()), "{before} vs {after}");
    }

    #[test]
    fn minimal_extension_beats_perturbations(h in prop::collection::vec(c64(), 3), seed_vals in prop::collection::vec(c64(), 5)) {
        let s = C64::new(0.2, 0.0);
        let pts: Vec<Point2> = (0..5)
            .map(|k| {
                let t = C64::from_polar(0.6 + 0.2 * k as f64, 1.3 * k as f64);
                Point2::new(t, s / t)
            })
            .collect();
        let cs = ConstraintSet::new(pts.clone(), seed_vals, Vec::new()).unwrap();
        let ext = minimal_extension(&cs, 4, &Weight::gaussian()).unwrap();
        prop_assert!(ext.datum_residual <= 1e-8);
        // (xy - s)·h vanishes on every constraint point
        let q = Poly2::from_terms(&[((1, 1), C64::new(1.0, 0.0)), ((0, 0), -s)]);
        let hp = Poly2::from_terms(&[((0, 0), h[0]), ((1, 0), h[1]), ((0, 1), h[2])]);
        let other = ext.f.add(&q.mul(&hp));
        for p in &pts {
            prop_assert!((other.eval(*p) - ext.f.eval(*p)).norm() <= 1e-9);
        }
        let n0 = fock_norm_sqr2(&ext.f).unwrap();
        prop_assert!((n0 / ext.fock_norm_sqr - 1.0).abs() <= 1e-9);
        prop_assert!(fock_norm_sqr2(&other).unwrap() >= n0 * (1.0 - 1e-9));
    }
}
