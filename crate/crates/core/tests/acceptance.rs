//! Acceptance report: one PASS/FAIL line per criterion.
//!
//! Runs without the libtest harness so the report is always printed. The process fails when a
//! criterion outside `KNOWN_RED` fails; known-red criteria are reported but do not fail the run.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use common::fd::{max_rel_error, REL_TOL};
use common::suites::{planted_curves, planted_point_agreement};
use common::{affine_map, mobius_text, rng};
use curveproj::algebra::ser::parse_rational;
use curveproj::algebra::{MultiPoly, Var};
use curveproj::curves::parse::{parse_expr, parse_expr_with, parse_signature_poly};
use curveproj::curves::{classify, make_affine_families, parse_planar, parse_spatial, PlanarCurve};
use curveproj::invariants::{
    affine_invariants, equiaffine_invariants, mu_restricted, projective_invariants, GroupTag,
};
use curveproj::projection::{
    decide_affine, decide_finite, verify_witness, Answer, CameraClass, FamilyId,
};
use curveproj::signatures::{equivalent, normalize_implicit, signature, SignatureObject, Verdict};
use rug::Rational;

/// Criteria expected to fail; see the decisions ledger.
const KNOWN_RED: &[usize] = &[3];

/// Wall-clock budgets per criterion.
const BUDGET: [Duration; 6] = [
    Duration::from_secs(3 * 5 * 60),
    Duration::from_secs(2 * 60),
    Duration::from_secs(3 * 60),
    Duration::from_secs(20 * 60),
    Duration::from_secs(10 * 60),
    Duration::from_secs(5 * 60),
];

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

fn ensure(ok: bool, what: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(what.into())
    }
}

fn q(s: &str) -> Rational {
    parse_rational(s).unwrap()
}

fn qs(v: &[&str]) -> Vec<Rational> {
    v.iter().map(|s| q(s)).collect()
}

fn implicit(c: &PlanarCurve, group: GroupTag) -> Result<MultiPoly, String> {
    match signature(c, group).map_err(|e| e.to_string())? {
        SignatureObject::Curve { implicit, .. } => Ok(normalize_implicit(&implicit)),
        SignatureObject::DegeneratePoint { j, k } => {
            Err(format!("degenerate signature ({j}, {k})"))
        }
    }
}

fn expected_poly(s: &str) -> MultiPoly {
    normalize_implicit(&parse_signature_poly(s).unwrap())
}

fn criterion_1() -> Check {
    let g = parse_spatial("(s^3, s^2, s)").unwrap();
    let g1 = parse_planar("(t^2, t)").unwrap();
    let d = decide_finite(&g, &g1).map_err(|e| e.to_string())?;
    ensure(d.verdict == Answer::Yes, "gamma_1 not projected")?;
    ensure(
        d.witness.unwrap().params == qs(&["0", "0", "0"]),
        "gamma_1 witness",
    )?;

    let g2 = parse_planar("(t^3/(t+1), t^2/(t+1))").unwrap();
    let inv = projective_invariants(&g2).map_err(|e| e.to_string())?;
    ensure(
        inv.constant_point() == Some((q("250047/12800"), q("0"))),
        "gamma_2 constants",
    )?;
    let d = decide_finite(&g, &g2).map_err(|e| e.to_string())?;
    ensure(d.verdict == Answer::Yes, "gamma_2 not projected")?;
    ensure(
        d.witness.unwrap().params == qs(&["0", "0", "1"]),
        "gamma_2 witness",
    )?;

    let g3 = parse_planar("(t, t^5)").unwrap();
    let inv = projective_invariants(&g3).map_err(|e| e.to_string())?;
    ensure(
        inv.constant_point() == Some((q("1029/128"), q("0"))),
        "gamma_3 constants",
    )?;
    let d = decide_finite(&g, &g3).map_err(|e| e.to_string())?;
    ensure(d.verdict == Answer::No, "gamma_3 projected")?;
    Ok("Yes (0,0,0), Yes (0,0,1), No; constants exact".into())
}

fn criterion_2() -> Check {
    let g = parse_spatial("(s^4 + 1, s^2, s)").unwrap();
    let (_, beta, _) = make_affine_families(&g);
    let inv = affine_invariants(&beta.generic_curve().map_err(|e| e.to_string())?)
        .map_err(|e| e.to_string())?;
    let b = [("b", Var::B)];
    let j1 = parse_expr_with("100*s^2*(3*b - 14*s^2)^2/(b - 14*s^2)^3", &b).unwrap();
    let k1 = parse_expr_with("-5*(140*s^4 - 56*b*s^2 + b^2)/(b - 14*s^2)^2", &b).unwrap();
    ensure(
        inv.j == j1 && inv.k == k1,
        "beta_b invariants differ from the parametric formulas",
    )?;
    let b0 =
        affine_invariants(&beta.specialize(&qs(&["0"])).unwrap()).map_err(|e| e.to_string())?;
    ensure(
        b0.constant_point() == Some((q("-50/7"), q("-25/7"))),
        "beta_0 constants",
    )?;
    let gamma = parse_planar("(t, t^4 + t^2)").unwrap();
    let s1 = expected_poly("-448*J^2 + (3780*K + 14525)*J + 245*K^3 + 40000 - 6000*K - 1575*K^2");
    ensure(
        implicit(&gamma, GroupTag::Affine)? == s1,
        "quartic signature differs from the expected equation",
    )?;
    let d = decide_affine(&g, &gamma).map_err(|e| e.to_string())?;
    ensure(d.verdict == Answer::Yes, "not projected")?;
    let w = d.witness.unwrap();
    ensure(
        w.family == FamilyId::Beta && w.params[0] != 0,
        "witness not beta with b != 0",
    )?;
    ensure(
        verify_witness(&g, &gamma, w.family, &w.params)
            .unwrap()
            .passed,
        "witness fails verification",
    )?;
    Ok(format!("Yes via beta, b = {}", w.params[0]))
}

fn criterion_3() -> Check {
    let g = parse_spatial("(s^2 + s, s^3 - 3*s^2, s^4)").unwrap();
    let c: Vec<PlanarCurve> = [
        "(t^4 + t, t^2)",
        "(t^3 - t, t^3 + t^2)",
        "(t/(1 + t^3), t^2/(1 + t^3))",
    ]
    .iter()
    .map(|s| parse_planar(s).unwrap())
    .collect();
    let sigs = [
        "(165 + 75*K)*J - 448 - 560*K - 175*K^2",
        "9261*J^2 - (26460*K + 132300)*J + 160*K^3 + 160000 + 264000*K + 12900*K^2",
        "10*K + 1",
    ];
    for (i, (curve, sig)) in c.iter().zip(sigs).enumerate() {
        ensure(
            implicit(curve, GroupTag::Affine)? == expected_poly(sig),
            format!("signature {} differs", i + 1),
        )?;
    }
    let ev = equivalent(&c[0], &c[1], GroupTag::Affine).map_err(|e| e.to_string())?;
    ensure(ev.verdict == Verdict::NotEquivalent, "gamma_1 ~ gamma_2")?;
    let want = [Some(qs(&["0", "1/2"])), Some(qs(&["0", "0"])), None];
    let mut got = Vec::new();
    let mut ok = true;
    for (curve, want) in c.iter().zip(want) {
        let d = decide_affine(&g, curve).map_err(|e| e.to_string())?;
        let params = d.witness.map(|w| w.params);
        got.push(match &params {
            Some(p) => format!(
                "Yes ({})",
                p.iter()
                    .map(|r| r.to_string())
                    .collect::<Vec<_>>()
                    .join(",")
            ),
            None => format!("{:?}", d.verdict),
        });
        ok &= params == want;
    }
    let line = got.join(", ");
    ensure(ok, format!("{line} (expected Yes (0,1/2), Yes (0,0), No)"))?;
    Ok(line)
}

fn criterion_4() -> Check {
    let fin = planted_curves(CameraClass::Finite, 11, 25);
    let aff = planted_curves(CameraClass::Affine, 12, 25);
    let pf = planted_point_agreement(CameraClass::Finite, 71, 25);
    let pa = planted_point_agreement(CameraClass::Affine, 72, 25);
    let line = format!(
        "curves finite {fin}/25, affine {aff}/25; point lists {}/50",
        pf + pa
    );
    ensure(fin == 25 && aff == 25 && pf + pa == 50, line.clone())?;
    Ok(line)
}

fn criterion_5() -> Check {
    let mut r = rng(81);
    let bases = ["(t, t^4 + t^2)", "(t^2 + t, t^3 - 2*t)", "(t, t^5 + t^2)"]
        .map(|s| parse_planar(s).unwrap());
    let keys: Vec<_> = bases
        .iter()
        .map(|c| implicit(c, GroupTag::Affine))
        .collect::<Result<_, _>>()?;
    let classes: Vec<_> = bases
        .iter()
        .map(|c| classify(c, GroupTag::Affine).unwrap())
        .collect();
    for i in 0..50 {
        let k = i % bases.len();
        let img = if i < 25 {
            let (a, b) = affine_map(&mut r);
            bases[k].affine_image(&a, &b).unwrap()
        } else {
            bases[k]
                .compose(&parse_expr(&mobius_text(&mut r)).unwrap())
                .unwrap()
        };
        ensure(
            implicit(&img, GroupTag::Affine)? == keys[k],
            format!("signature changed on {img}"),
        )?;
        ensure(
            classify(&img, GroupTag::Affine).unwrap() == classes[k],
            format!("class changed on {img}"),
        )?;
    }
    let parabola = parse_planar("(t, t^2)").unwrap();
    for _ in 0..10 {
        let (a, b) = affine_map(&mut r);
        let img = parabola.affine_image(&a, &b).unwrap();
        let (_, mu) = mu_restricted(&img).map_err(|e| e.to_string())?;
        ensure(mu.coeff().is_zero(), format!("mu nonzero on {img}"))?;
    }
    let circle = parse_planar("((1 - t^2)/(1 + t^2), 2*t/(1 + t^2))").unwrap();
    let pair = equiaffine_invariants(&circle).map_err(|e| e.to_string())?;
    let (chain, mu) = mu_restricted(&circle).map_err(|e| e.to_string())?;
    let positive =
        mu.sign_at(&Rational::from(0), &chain.table) == Some(std::cmp::Ordering::Greater);
    ensure(
        pair.j.constant_value() == Some(Rational::from(1)) && pair.k.is_zero() && positive,
        "mu not 1 on circle",
    )?;
    Ok("50 maps and reparameterizations, 10 parabolas, unit circle".into())
}

fn criterion_6() -> Check {
    let cases = [
        ("(t, t^3 + t^2 + 1)", GroupTag::EquiAffine, 61),
        ("(t^2 + 1, t^3 - t)", GroupTag::EquiAffine, 62),
        ("(t, t^4 + t^2)", GroupTag::Affine, 63),
        ("(t^2 + t, t^3 - 2*t)", GroupTag::Affine, 64),
        ("(t/(t^2 + 2), t^3/(t^2 + 2))", GroupTag::Affine, 65),
        ("(t^2 + t, t^3 - 2*t)", GroupTag::Projective, 66),
        ("(t, t^4 + t^2)", GroupTag::Projective, 67),
    ];
    let worst = cases
        .iter()
        .map(|&(c, g, seed)| max_rel_error(c, g, seed))
        .fold(0f64, f64::max);
    let line = format!("max relative error {worst:.2e} (tolerance {REL_TOL:e})");
    ensure(worst <= REL_TOL, line.clone())?;
    Ok(line)
}

fn main() {
    let criteria: [Criterion; 6] = [
        ("finite projections of the twisted cubic", criterion_1),
        (
            "affine projections of the space quartic, beta family",
            criterion_2,
        ),
        ("three affine targets of the space quartic", criterion_3),
        ("planted round trips", criterion_4),
        ("invariance suites", criterion_5),
        ("finite-difference cross-check", criterion_6),
    ];
    let mut unexpected = 0;
    for (i, (name, f)) in criteria.into_iter().enumerate() {
        let n = i + 1;
        let started = Instant::now();
        let res = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| Err("panicked".into()));
        let took = started.elapsed();
        let res = match res {
            Ok(_) if took > BUDGET[i] => Err(format!("over budget ({took:.1?} > {:?})", BUDGET[i])),
            other => other,
        };
        let red = KNOWN_RED.contains(&n);
        match &res {
            Ok(detail) => println!("PASS criterion {n} ({name}): {detail} [{took:.1?}]"),
            Err(why) if red => {
                println!("FAIL criterion {n} ({name}): {why} [known red] [{took:.1?}]")
            }
            Err(why) => println!("FAIL criterion {n} ({name}): {why} [{took:.1?}]"),
        }
        unexpected += (res.is_err() && !red) as usize;
    }
    if unexpected > 0 {
        std::process::exit(1);
    }
}
