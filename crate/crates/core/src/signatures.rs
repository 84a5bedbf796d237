//! Signature maps, implicit signature polynomials and the group-equivalence decider.

use std::cmp::Ordering;

use rug::ops::Pow;
use rug::{Integer, Rational};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::gcd::{content_in, gcd, squarefree_part};
use crate::algebra::roots::count_real_roots;
use crate::algebra::{resultant::resultant_interpolated, MultiPoly, RationalFunction, Var};
use crate::curves::{classify, probe_points, CurveClass, PlanarCurve};
use crate::invariants::{self, GroupTag, InvariantError, InvariantPair};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SignatureError {
    #[error("curve is exceptional for the {0} group ({1})")]
    Exceptional(&'static str, &'static str),
    #[error("signature map is constant")]
    ConstantMap,
    #[error("signature map depends on parameters other than t")]
    Parametric,
    #[error("no factor of the eliminant vanishes along the map")]
    Implicitization,
    #[error(transparent)]
    Invariant(#[from] InvariantError),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SignatureObject {
    DegeneratePoint {
        j: Rational,
        k: Rational,
    },
    Curve {
        map: InvariantPair,
        implicit: MultiPoly,
    },
}

impl SignatureObject {
    pub fn implicit(&self) -> Option<&MultiPoly> {
        match self {
            SignatureObject::Curve { implicit, .. } => Some(implicit),
            SignatureObject::DegeneratePoint { .. } => None,
        }
    }
}

/// Sign-normalised primitive form used for syntactic comparison of implicit equations.
pub fn normalize_implicit(p: &MultiPoly) -> MultiPoly {
    squarefree_part(&p.primitive()).primitive()
}

/// `den^deg * F(num/den)` for both coordinates: the numerator of `F(J, K)` along the map.
pub fn pullback(f: &MultiPoly, map: &InvariantPair) -> MultiPoly {
    let a = f.degree(Var::J);
    let b = f.degree(Var::K);
    let (nj, dj) = (map.j.num(), map.j.den());
    let (nk, dk) = (map.k.num(), map.k.den());
    let powers = |n: &MultiPoly, d: &MultiPoly, top: u32| -> Vec<MultiPoly> {
        // n^i d^(top - i)
        let mut np = vec![MultiPoly::one()];
        let mut dp = vec![MultiPoly::one()];
        for i in 1..=top as usize {
            np.push(np[i - 1].mul(n));
            dp.push(dp[i - 1].mul(d));
        }
        (0..=top as usize)
            .map(|i| np[i].mul(&dp[top as usize - i]))
            .collect()
    };
    let pj = powers(nj, dj, a);
    let pk = powers(nk, dk, b);
    let mut acc = MultiPoly::zero();
    for (jpow, row) in f.coeffs_in(Var::J).iter().enumerate() {
        for (kpow, c) in row.coeffs_in(Var::K).iter().enumerate() {
            if !c.is_zero() {
                acc = acc.add(&c.mul(&pj[jpow]).mul(&pk[kpow]));
            }
        }
    }
    acc
}

/// Implicit equation of the image of a rational map `t -> (J(t), K(t))` by elimination.
pub fn implicitize(map: &InvariantPair) -> Result<MultiPoly, SignatureError> {
    let only_t = |r: &RationalFunction| r.support() & !(1u16 << Var::T.index()) == 0;
    if !only_t(&map.j) || !only_t(&map.k) {
        return Err(SignatureError::Parametric);
    }
    let (jv, kv) = (MultiPoly::var(Var::J), MultiPoly::var(Var::K));
    let f = map.j.den().mul(&jv).sub(map.j.num());
    let g = map.k.den().mul(&kv).sub(map.k.num());
    let eliminant = match (map.j.is_free_of_t(), map.k.is_free_of_t()) {
        (true, true) => return Err(SignatureError::ConstantMap),
        (true, false) => f,
        (false, true) => g,
        (false, false) => resultant_interpolated(&f, &g, Var::T, Var::J, Var::K),
    };
    let sq = squarefree_part(&eliminant.primitive());
    // The eliminant vanishes on the image by construction. Factors in J alone or K alone come
    // from simultaneous vanishing of the leading coefficients in t; with both coordinates
    // non-constant they cannot vanish along the map.
    let mut cand = sq;
    for v in [Var::J, Var::K] {
        let other = if v == Var::J { Var::K } else { Var::J };
        if cand.has_var(other) {
            let c = content_in(&cand, other);
            if !c.is_constant() {
                cand = cand.div_exact(&c).expect("content divides");
            }
        }
    }
    let cand = normalize_implicit(&cand);
    if !vanishes_at_samples(&cand, map, 6) {
        return Err(SignatureError::Implicitization);
    }
    Ok(cand)
}

/// Exact evaluation of `f(J(t), K(t))` at the first `count` probe parameters.
fn vanishes_at_samples(f: &MultiPoly, map: &InvariantPair, count: usize) -> bool {
    sample_points(map, count)
        .iter()
        .all(|(_, j, k)| f.eval_all(&[(Var::J, j.clone()), (Var::K, k.clone())]) == 0)
}

pub fn signature(curve: &PlanarCurve, group: GroupTag) -> Result<SignatureObject, SignatureError> {
    let class = classify(curve, group)?;
    if class.is_exceptional(group) {
        return Err(SignatureError::Exceptional(group.name(), class.name()));
    }
    let map = invariants::invariants(curve, group)?;
    signature_of_map(map)
}

pub fn signature_of_map(map: InvariantPair) -> Result<SignatureObject, SignatureError> {
    if let Some((j, k)) = map.constant_point() {
        return Ok(SignatureObject::DegeneratePoint { j, k });
    }
    let implicit = implicitize(&map)?;
    Ok(SignatureObject::Curve { map, implicit })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    Equivalent,
    NotEquivalent,
}

/// One membership probe: a point of one signature and whether the other map reaches it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MembershipSample {
    #[serde(with = "crate::algebra::ser::rational")]
    pub t: Rational,
    #[serde(with = "crate::algebra::ser::rational")]
    pub j: Rational,
    #[serde(with = "crate::algebra::ser::rational")]
    pub k: Rational,
    /// Number of distinct real preimage parameters on the other curve.
    pub preimages: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Evidence {
    pub class_1: Option<CurveClass>,
    pub class_2: Option<CurveClass>,
    pub rule: String,
    /// Normalised implicit polynomials, when both signatures are curves.
    pub implicit_1: Option<String>,
    pub implicit_2: Option<String>,
    pub implicit_match: Option<bool>,
    pub forward: Vec<MembershipSample>,
    pub backward: Vec<MembershipSample>,
    pub degenerate_case: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EquivalenceVerdict {
    pub verdict: Verdict,
    pub evidence: Evidence,
}

impl EquivalenceVerdict {
    pub fn is_equivalent(&self) -> bool {
        self.verdict == Verdict::Equivalent
    }
}

fn exceptional_rule(c1: &CurveClass, c2: &CurveClass, group: GroupTag) -> (bool, &'static str) {
    match group {
        GroupTag::Projective => match (c1 == &CurveClass::Line, c2 == &CurveClass::Line) {
            (true, true) => (true, "both lines"),
            (false, false) => (true, "both conics"),
            _ => (false, "line versus conic"),
        },
        _ => {
            if c1 == c2 {
                (true, "same exceptional class")
            } else {
                (false, "different exceptional classes")
            }
        }
    }
}

/// Point of the map at `t`, if defined there.
fn map_at(map: &InvariantPair, t: &Rational) -> Option<(Rational, Rational)> {
    Some((map.j.eval_rational(t)?, map.k.eval_rational(t)?))
}

/// Number of distinct real `t` with `map(t) = (j, k)`.
pub fn preimage_count(map: &InvariantPair, j: &Rational, k: &Rational) -> usize {
    let eq = |r: &RationalFunction, v: &Rational| -> MultiPoly {
        // den(v) * num(t) - num(v) * den(t)
        r.num().scale(v.denom()).sub(&r.den().scale(v.numer()))
    };
    let g = gcd(&eq(&map.j, j), &eq(&map.k, k));
    if g.is_zero() {
        // both coordinates constant and equal: every parameter maps there
        return usize::MAX;
    }
    if g.is_constant() {
        return 0;
    }
    count_real_roots(&g.to_univariate(Var::T).expect("univariate in t"))
}

/// `count` sample points of the map at distinct rational parameters where it is defined.
pub fn sample_points(map: &InvariantPair, count: usize) -> Vec<(Rational, Rational, Rational)> {
    probe_points()
        .filter_map(|t| map_at(map, &t).map(|(j, k)| (t, j, k)))
        .take(count)
        .collect()
}

fn membership(from: &InvariantPair, to: &InvariantPair, count: usize) -> Vec<MembershipSample> {
    sample_points(from, count)
        .into_iter()
        .map(|(t, j, k)| {
            let preimages = preimage_count(to, &j, &k);
            MembershipSample { t, j, k, preimages }
        })
        .collect()
}

/// A curve with its class and, unless the class is special, its signature.
#[derive(Clone, Debug)]
pub struct PreparedCurve {
    pub class: CurveClass,
    pub signature: Option<SignatureObject>,
}

pub fn prepare(curve: &PlanarCurve, group: GroupTag) -> Result<PreparedCurve, SignatureError> {
    let class = classify(curve, group)?;
    let signature = if class.is_special(group) {
        None
    } else {
        Some(signature_of_map(invariants::invariants(curve, group)?)?)
    };
    Ok(PreparedCurve { class, signature })
}

/// Decides group equivalence of two planar rational curves.
pub fn equivalent(
    g1: &PlanarCurve,
    g2: &PlanarCurve,
    group: GroupTag,
) -> Result<EquivalenceVerdict, SignatureError> {
    let p1 = prepare(g1, group)?;
    let p2 = prepare(g2, group)?;
    compare_prepared(&p1, &p2, group)
}

pub fn compare_prepared(
    p1: &PreparedCurve,
    p2: &PreparedCurve,
    group: GroupTag,
) -> Result<EquivalenceVerdict, SignatureError> {
    let (c1, c2) = (&p1.class, &p2.class);
    let mut ev = Evidence {
        class_1: Some(c1.clone()),
        class_2: Some(c2.clone()),
        ..Default::default()
    };
    match (&p1.signature, &p2.signature) {
        (Some(s1), Some(s2)) => compare_signatures(s1, s2, ev),
        (None, None) => {
            let (ok, rule) = exceptional_rule(c1, c2, group);
            ev.rule = rule.into();
            let verdict = if ok {
                Verdict::Equivalent
            } else {
                Verdict::NotEquivalent
            };
            Ok(EquivalenceVerdict {
                verdict,
                evidence: ev,
            })
        }
        _ => {
            ev.rule = "special class versus signature curve".into();
            Ok(EquivalenceVerdict {
                verdict: Verdict::NotEquivalent,
                evidence: ev,
            })
        }
    }
}

/// Comparison of two signatures: exact point equality, or equal implicit equations plus
/// bidirectional membership sampling.
pub fn compare_signatures(
    s1: &SignatureObject,
    s2: &SignatureObject,
    mut ev: Evidence,
) -> Result<EquivalenceVerdict, SignatureError> {
    use SignatureObject::*;
    let v = match (s1, s2) {
        (DegeneratePoint { j: j1, k: k1 }, DegeneratePoint { j: j2, k: k2 }) => {
            let same = j1 == j2 && k1 == k2;
            ev.rule = "degenerate signature points".into();
            ev.degenerate_case = same;
            if same {
                Verdict::Equivalent
            } else {
                Verdict::NotEquivalent
            }
        }
        (
            Curve {
                map: m1,
                implicit: f1,
            },
            Curve {
                map: m2,
                implicit: f2,
            },
        ) => {
            ev.implicit_1 = Some(f1.to_string());
            ev.implicit_2 = Some(f2.to_string());
            let same = f1 == f2;
            ev.implicit_match = Some(same);
            if !same {
                ev.rule = "implicit equations differ".into();
                Verdict::NotEquivalent
            } else {
                let count = f1.total_degree() as usize + 3;
                ev.forward = membership(m1, m2, count);
                ev.backward = membership(m2, m1, count);
                let ok = ev
                    .forward
                    .iter()
                    .chain(&ev.backward)
                    .all(|s| s.preimages > 0);
                ev.rule = if ok {
                    "implicit match and membership"
                } else {
                    "membership failed"
                }
                .into();
                if ok {
                    Verdict::Equivalent
                } else {
                    Verdict::NotEquivalent
                }
            }
        }
        _ => {
            ev.rule = "point signature versus curve signature".into();
            Verdict::NotEquivalent
        }
    };
    Ok(EquivalenceVerdict {
        verdict: v,
        evidence: ev,
    })
}

/// Exact decimal truncated to `digits` significant digits.
pub fn truncate_decimal(r: &Rational, digits: u32) -> String {
    if r.cmp0() == Ordering::Equal {
        return "0".into();
    }
    let neg = r.cmp0() == Ordering::Less;
    let a = Rational::from(r.abs_ref());
    // e with 10^e <= a < 10^(e+1)
    let mut e = (a.numer().significant_bits() as i64 - a.denom().significant_bits() as i64) * 30103
        / 100000;
    let ten = |k: i64| -> Rational {
        let p: Integer = Pow::pow(Integer::from(10), k.unsigned_abs() as u32);
        if k >= 0 {
            Rational::from(p)
        } else {
            Rational::from((Integer::from(1), p))
        }
    };
    while ten(e) > a {
        e -= 1;
    }
    while ten(e + 1) <= a {
        e += 1;
    }
    let shift = digits as i64 - 1 - e;
    let scaled = &a * ten(shift);
    let m = Integer::from(scaled.numer() / scaled.denom());
    let ds = m.to_string();
    let mut out = String::new();
    if neg {
        out.push('-');
    }
    if (-6..=15).contains(&e) {
        // plain notation: value = m * 10^(-shift)
        if shift <= 0 {
            out.push_str(&ds);
            out.push_str(&"0".repeat((-shift) as usize));
        } else if (shift as usize) < ds.len() {
            let (ip, fp) = ds.split_at(ds.len() - shift as usize);
            let fp = fp.trim_end_matches('0');
            out.push_str(ip);
            if !fp.is_empty() {
                out.push('.');
                out.push_str(fp);
            }
        } else {
            let fp = format!("{}{}", "0".repeat(shift as usize - ds.len()), ds);
            out.push_str("0.");
            out.push_str(fp.trim_end_matches('0'));
        }
    } else {
        let (h, rest) = ds.split_at(1);
        let rest = rest.trim_end_matches('0');
        out.push_str(h);
        if !rest.is_empty() {
            out.push('.');
            out.push_str(rest);
        }
        out.push_str(&format!("e{e}"));
    }
    out
}

/// CSV with header `t,J,K` at the given parameters (skipping undefined ones).
pub fn samples_csv(map: &InvariantPair, ts: &[Rational]) -> String {
    let mut s = String::from("t,J,K\n");
    for t in ts {
        if let Some((j, k)) = map_at(map, t) {
            s.push_str(&format!(
                "{},{},{}\n",
                truncate_decimal(t, 12),
                truncate_decimal(&j, 12),
                truncate_decimal(&k, 12)
            ));
        }
    }
    s
}

/// Evenly spaced rational parameters `lo + i (hi - lo)/(n - 1)`.
pub fn parameter_grid(lo: &Rational, hi: &Rational, n: usize) -> Vec<Rational> {
    if n < 2 {
        return vec![lo.clone()];
    }
    let step = Rational::from(hi - lo) / (n as u32 - 1);
    (0..n)
        .map(|i| lo + Rational::from(&step * i as u32))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curves::parse_planar;

    fn jk(terms: &[(i64, u16, u16)]) -> MultiPoly {
        let vars: Vec<Vec<(Var, u16)>> = terms
            .iter()
            .map(|&(_, a, b)| vec![(Var::J, a), (Var::K, b)])
            .collect();
        let spec: Vec<(i64, &[(Var, u16)])> = terms
            .iter()
            .zip(&vars)
            .map(|(t, v)| (t.0, v.as_slice()))
            .collect();
        MultiPoly::from_i64_terms(&spec)
    }

    fn same_up_to_scalar(a: &MultiPoly, b: &MultiPoly) -> bool {
        normalize_implicit(a) == normalize_implicit(b)
    }

    fn rf(s: &str) -> RationalFunction {
        crate::curves::parse::parse_expr(s).unwrap()
    }

    #[test]
    fn trivial_maps() {
        let m = InvariantPair {
            j: rf("t^2"),
            k: rf("t^3"),
        };
        assert!(same_up_to_scalar(
            &implicitize(&m).unwrap(),
            &jk(&[(1, 0, 2), (-1, 3, 0)])
        ));
        let m = InvariantPair {
            j: rf("t"),
            k: rf("t"),
        };
        assert!(same_up_to_scalar(
            &implicitize(&m).unwrap(),
            &jk(&[(1, 0, 1), (-1, 1, 0)])
        ));
        let m = InvariantPair {
            j: rf("2"),
            k: rf("3"),
        };
        assert_eq!(implicitize(&m), Err(SignatureError::ConstantMap));
    }

    #[test]
    fn quartic_affine_signature() {
        let s = signature(&parse_planar("(t, t^4 + t^2)").unwrap(), GroupTag::Affine).unwrap();
        // -448J^2 + (3780K + 14525)J + 245K^3 + 40000 - 6000K - 1575K^2
        let expect = jk(&[
            (-448, 2, 0),
            (3780, 1, 1),
            (14525, 1, 0),
            (245, 0, 3),
            (40000, 0, 0),
            (-6000, 0, 1),
            (-1575, 0, 2),
        ]);
        assert!(
            same_up_to_scalar(s.implicit().unwrap(), &expect),
            "{:?}",
            s.implicit()
        );
    }

    #[test]
    fn folium_affine_signature() {
        let s = signature(
            &parse_planar("(t/(1+t^3), t^2/(1+t^3))").unwrap(),
            GroupTag::Affine,
        )
        .unwrap();
        assert!(same_up_to_scalar(
            s.implicit().unwrap(),
            &jk(&[(10, 0, 1), (1, 0, 0)])
        ));
    }

    #[test]
    fn degenerate_projective_signature() {
        let s = signature(
            &parse_planar("(t^3/(t+1), t^2/(t+1))").unwrap(),
            GroupTag::Projective,
        )
        .unwrap();
        assert_eq!(
            s,
            SignatureObject::DegeneratePoint {
                j: Rational::from((250047, 12800)),
                k: Rational::new()
            }
        );
    }

    #[test]
    fn equivalence_examples() {
        let p = |s: &str| parse_planar(s).unwrap();
        let v = equivalent(&p("(t^2, t)"), &p("(t^2+t, 3*t-1)"), GroupTag::Projective).unwrap();
        assert!(v.is_equivalent());
        let g = p("(t, t^4 + t^2)");
        let a = g
            .affine_image(
                &[
                    [Rational::from(1), Rational::from(2)],
                    [Rational::from(0), Rational::from(3)],
                ],
                &[Rational::from(1), Rational::from(-4)],
            )
            .unwrap();
        let v = equivalent(&g, &a, GroupTag::Affine).unwrap();
        assert!(v.is_equivalent(), "{:?}", v.evidence);
        assert_eq!(v.evidence.forward.len(), v.evidence.backward.len());
        let v = equivalent(&g, &p("(t^2, t^5)"), GroupTag::Affine).unwrap();
        assert!(!v.is_equivalent());
    }

    #[test]
    fn decimal_truncation() {
        assert_eq!(
            truncate_decimal(&Rational::from((250047, 12800)), 12),
            "19.534921875"
        );
        assert_eq!(
            truncate_decimal(&Rational::from((-1, 3)), 12),
            "-0.333333333333"
        );
        assert_eq!(
            truncate_decimal(&Rational::from((2, 3)), 12),
            "0.666666666666"
        );
        assert_eq!(truncate_decimal(&Rational::from(1000), 12), "1000");
        assert_eq!(
            truncate_decimal(&Rational::from((1, 10_000_000)), 12),
            "1e-7"
        );
    }
}
