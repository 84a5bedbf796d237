//! Randomized laws of the exact layers.

mod common;

use common::{affine_map, mobius_text, projective_map, q, rng};
use curveproj::algebra::{
    gcd, isolate_real_roots, resultant, squarefree_part, MultiPoly, RationalFunction, Var,
};
use curveproj::curves::parse::parse_expr;
use curveproj::curves::PlanarCurve;
use curveproj::invariants::{affine_invariants, projective_invariants};
use curveproj::points::{affine_point_invariants, projective_point_invariants, PointList2D};
use curveproj::signatures::{equivalent, implicitize, Verdict};
use proptest::prelude::*;
use rug::{Integer, Rational};

fn upoly(c: &[i64]) -> MultiPoly {
    MultiPoly::from_coeffs(
        Var::T,
        &c.iter().map(|&k| Integer::from(k)).collect::<Vec<_>>(),
    )
}

fn coeffs(deg: usize) -> impl Strategy<Value = Vec<i64>> {
    prop::collection::vec(-5i64..=5, 1..=deg + 1)
}

fn nonzero_coeffs(deg: usize) -> impl Strategy<Value = Vec<i64>> {
    coeffs(deg).prop_filter("nonzero", |c| c.iter().any(|&k| k != 0))
}

fn rf(num: &[i64], den: &[i64]) -> RationalFunction {
    RationalFunction::new(upoly(num), upoly(den))
}

/// A polynomial planar curve of degree three or four, rejected when constant.
fn poly_curve() -> impl Strategy<Value = PlanarCurve> {
    let c = || prop::collection::vec(-5i64..=5, 4..=5);
    (c(), c()).prop_filter_map("constant", |(a, b)| {
        PlanarCurve::new(
            RationalFunction::from_poly(upoly(&a)),
            RationalFunction::from_poly(upoly(&b)),
        )
        .ok()
    })
}

fn sign_at(p: &MultiPoly, x: &Rational) -> std::cmp::Ordering {
    p.eval_all(&[(Var::T, x.clone())]).cmp0()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn product_rule(a in coeffs(3), b in nonzero_coeffs(2), c in coeffs(3), d in nonzero_coeffs(2)) {
        let (f, g) = (rf(&a, &b), rf(&c, &d));
        prop_assert_eq!(f.mul(&g).diff(), f.diff().mul(&g).add(&f.mul(&g.diff())));
    }

    #[test]
    fn resultant_detects_common_factors(a in nonzero_coeffs(3), b in nonzero_coeffs(3), c in nonzero_coeffs(2)) {
        let (p, r) = (upoly(&a), upoly(&b));
        prop_assume!(p.degree(Var::T) > 0 && r.degree(Var::T) > 0);
        let common = gcd(&p, &r).degree(Var::T) > 0;
        prop_assert_eq!(resultant(&p, &r, Var::T).unwrap().is_zero(), common);
        let f = upoly(&c);
        if f.degree(Var::T) > 0 {
            prop_assert!(resultant(&p.mul(&f), &r.mul(&f), Var::T).unwrap().is_zero());
        }
    }

    #[test]
    fn isolating_intervals_are_disjoint_and_single(roots in prop::collection::vec(-8i64..=8, 0..5), extra in nonzero_coeffs(3)) {
        let p = roots.iter().fold(upoly(&extra), |acc, &r| acc.mul(&upoly(&[-r, 1])));
        prop_assume!(p.degree(Var::T) > 0);
        let sf = squarefree_part(&p);
        let boxes = isolate_real_roots(&p.to_univariate(Var::T).unwrap());
        let ivs: Vec<_> = boxes.iter().map(|b| b.coords[0].clone()).collect();
        for iv in &ivs {
            if iv.is_exact() {
                prop_assert!(sign_at(&sf, &iv.lo).is_eq());
            } else {
                let (sl, sh) = (sign_at(&sf, &iv.lo), sign_at(&sf, &iv.hi));
                prop_assert!(sl.is_ne() && sh.is_ne() && sl != sh);
            }
        }
        for w in ivs.windows(2) {
            prop_assert!(w[0].hi < w[1].lo);
        }
        let mut distinct = roots.clone();
        distinct.sort();
        distinct.dedup();
        for r in distinct {
            let r = q(r);
            prop_assert!(ivs.iter().any(|iv| iv.lo <= r && r <= iv.hi));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn affine_invariants_literal_reparameterization(c in poly_curve(), seed in any::<u64>()) {
        let Ok(base) = affine_invariants(&c) else { return Ok(()) };
        let phi = parse_expr(&mobius_text(&mut rng(seed))).unwrap();
        let re = affine_invariants(&c.compose(&phi).unwrap()).unwrap();
        prop_assert_eq!(re.j, base.j.compose_t(&phi));
        prop_assert_eq!(re.k, base.k.compose_t(&phi));
    }

    #[test]
    fn affine_invariants_literal_group_action(c in poly_curve(), seed in any::<u64>()) {
        let Ok(base) = affine_invariants(&c) else { return Ok(()) };
        let (a, b) = affine_map(&mut rng(seed));
        prop_assert_eq!(affine_invariants(&c.affine_image(&a, &b).unwrap()).unwrap(), base);
    }

    #[test]
    fn signature_map_lies_on_its_implicit_curve(c in poly_curve()) {
        let Ok(map) = affine_invariants(&c) else { return Ok(()) };
        prop_assume!(!map.is_constant());
        let f = implicitize(&map).unwrap();
        for t in -3..=3 {
            let t = q(t);
            let (Some(j), Some(k)) = (map.j.eval_rational(&t), map.k.eval_rational(&t)) else { continue };
            prop_assert_eq!(f.eval_all(&[(Var::J, j), (Var::K, k)]), Rational::new());
        }
    }

    #[test]
    fn affine_images_are_equivalent(c in poly_curve(), seed in any::<u64>()) {
        let (a, b) = affine_map(&mut rng(seed));
        let img = c.affine_image(&a, &b).unwrap();
        let Ok(v) = equivalent(&c, &img, curveproj::invariants::GroupTag::Affine) else { return Ok(()) };
        prop_assert_eq!(v.verdict, Verdict::Equivalent);
    }

    #[test]
    fn point_invariants_under_group_maps(pts in prop::collection::vec((-6i64..=6, -6i64..=6), 4..9), seed in any::<u64>()) {
        let x = PointList2D::new(pts.iter().map(|&(a, b)| [q(a), q(b)]).collect());
        let mut r = rng(seed);
        if let Ok(ai) = affine_point_invariants(&x) {
            let (a, b) = affine_map(&mut r);
            prop_assert_eq!(affine_point_invariants(&x.affine_image(&a, &b)).unwrap(), ai);
        }
        if let Ok(pi) = projective_point_invariants(&x) {
            if let Some(y) = x.projective_image(&projective_map(&mut r)) {
                prop_assert_eq!(projective_point_invariants(&y).unwrap(), pi);
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn projective_invariants_literal_group_action(a in nonzero_coeffs(3), seed in any::<u64>()) {
        let c = PlanarCurve::new(RationalFunction::t(), RationalFunction::from_poly(upoly(&a))).unwrap();
        let Ok(base) = projective_invariants(&c) else { return Ok(()) };
        let Ok(img) = c.projective_image(&projective_map(&mut rng(seed))) else { return Ok(()) };
        prop_assert_eq!(projective_invariants(&img).unwrap(), base);
    }
}
