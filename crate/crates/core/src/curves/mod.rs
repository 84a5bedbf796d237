//! Planar and spatial rational curves, camera families and exceptional-curve classification.

pub mod parse;

use std::cmp::Ordering;
use std::fmt;

use rug::Rational;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::{RationalFunction, Var};
use crate::invariants::{self, GradedChain, GroupTag, InvariantError};

pub use parse::ParseError;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CurveError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("curve image is a single point")]
    SinglePoint,
    #[error("denominator vanishes identically after substitution")]
    Undefined,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PlanarCurve {
    pub x: RationalFunction,
    pub y: RationalFunction,
}

impl PlanarCurve {
    pub fn new(x: RationalFunction, y: RationalFunction) -> Result<PlanarCurve, CurveError> {
        if x.is_free_of_t() && y.is_free_of_t() {
            return Err(CurveError::SinglePoint);
        }
        Ok(PlanarCurve { x, y })
    }

    /// Reparameterization `t -> phi(t)`.
    pub fn compose(&self, phi: &RationalFunction) -> Result<PlanarCurve, CurveError> {
        PlanarCurve::new(self.x.compose_t(phi), self.y.compose_t(phi))
    }

    /// Image under `(x, y) -> (a00 x + a01 y + b0, a10 x + a11 y + b1)`.
    pub fn affine_image(
        &self,
        a: &[[Rational; 2]; 2],
        b: &[Rational; 2],
    ) -> Result<PlanarCurve, CurveError> {
        let row = |r: &[Rational; 2], c: &Rational| {
            self.x
                .scale(&r[0])
                .add(&self.y.scale(&r[1]))
                .add(&RationalFunction::from_rational(c))
        };
        PlanarCurve::new(row(&a[0], &b[0]), row(&a[1], &b[1]))
    }

    /// Image under the projective map with homogeneous matrix `h` acting on `(x, y, 1)`.
    pub fn projective_image(&self, h: &[[Rational; 3]; 3]) -> Result<PlanarCurve, CurveError> {
        let row = |r: &[Rational; 3]| {
            self.x
                .scale(&r[0])
                .add(&self.y.scale(&r[1]))
                .add(&RationalFunction::from_rational(&r[2]))
        };
        let w = row(&h[2]);
        if w.is_zero() {
            return Err(CurveError::Undefined);
        }
        PlanarCurve::new(
            row(&h[0]).div(&w).expect("w nonzero"),
            row(&h[1]).div(&w).expect("w nonzero"),
        )
    }

    /// Exact point at a rational parameter value.
    pub fn point_at(&self, t: &Rational) -> Option<(Rational, Rational)> {
        Some((self.x.eval_rational(t)?, self.y.eval_rational(t)?))
    }
}

impl fmt::Display for PlanarCurve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpatialCurve {
    pub z: [RationalFunction; 3],
}

impl SpatialCurve {
    pub fn new(
        z1: RationalFunction,
        z2: RationalFunction,
        z3: RationalFunction,
    ) -> Result<SpatialCurve, CurveError> {
        if z1.is_free_of_t() && z2.is_free_of_t() && z3.is_free_of_t() {
            return Err(CurveError::SinglePoint);
        }
        Ok(SpatialCurve { z: [z1, z2, z3] })
    }

    pub fn point_at(&self, s: &Rational) -> Option<[Rational; 3]> {
        let [a, b, c] = &self.z;
        Some([
            a.eval_rational(s)?,
            b.eval_rational(s)?,
            c.eval_rational(s)?,
        ])
    }
}

impl fmt::Display for SpatialCurve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.z[0], self.z[1], self.z[2])
    }
}

/// A planar curve whose coordinates also depend polynomially on camera parameters.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CurveFamily {
    pub x: RationalFunction,
    pub y: RationalFunction,
    pub params: Vec<Var>,
}

impl CurveFamily {
    pub fn specialize(&self, values: &[Rational]) -> Result<PlanarCurve, CurveError> {
        assert_eq!(values.len(), self.params.len());
        let asg: Vec<(Var, Rational)> = self
            .params
            .iter()
            .copied()
            .zip(values.iter().cloned())
            .collect();
        let x = self.x.specialize(&asg).ok_or(CurveError::Undefined)?;
        let y = self.y.specialize(&asg).ok_or(CurveError::Undefined)?;
        PlanarCurve::new(x, y)
    }

    /// The family viewed as one curve over the parameter ring.
    pub fn generic_curve(&self) -> Result<PlanarCurve, CurveError> {
        PlanarCurve::new(self.x.clone(), self.y.clone())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ParsedCurve {
    Planar(PlanarCurve),
    Spatial(SpatialCurve),
}

pub fn parse_curve(text: &str, dim: usize) -> Result<ParsedCurve, CurveError> {
    let (mut c, _) = parse::parse_components(text)?;
    if c.len() != dim {
        return Err(ParseError::ComponentCount {
            expected: dim,
            found: c.len(),
        }
        .into());
    }
    if dim == 2 {
        let y = c.pop().unwrap();
        let x = c.pop().unwrap();
        Ok(ParsedCurve::Planar(PlanarCurve::new(x, y)?))
    } else {
        let z3 = c.pop().unwrap();
        let z2 = c.pop().unwrap();
        let z1 = c.pop().unwrap();
        Ok(ParsedCurve::Spatial(SpatialCurve::new(z1, z2, z3)?))
    }
}

pub fn parse_planar(text: &str) -> Result<PlanarCurve, CurveError> {
    match parse_curve(text, 2)? {
        ParsedCurve::Planar(p) => Ok(p),
        ParsedCurve::Spatial(_) => unreachable!(),
    }
}

pub fn parse_spatial(text: &str) -> Result<SpatialCurve, CurveError> {
    match parse_curve(text, 3)? {
        ParsedCurve::Spatial(s) => Ok(s),
        ParsedCurve::Planar(_) => unreachable!(),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "tag")]
pub enum CurveClass {
    Line,
    Parabola,
    Ellipse,
    Hyperbola,
    DegenerateSignature {
        #[serde(with = "crate::algebra::ser::rational")]
        j: Rational,
        #[serde(with = "crate::algebra::ser::rational")]
        k: Rational,
    },
    Generic,
}

impl CurveClass {
    pub fn is_conic(&self) -> bool {
        matches!(
            self,
            CurveClass::Parabola | CurveClass::Ellipse | CurveClass::Hyperbola
        )
    }

    /// Whether the class is exceptional for `group`: lines and parabolas for the affine group,
    /// lines and all conics for the projective group, lines for the equi-affine group.
    pub fn is_exceptional(&self, group: GroupTag) -> bool {
        match group {
            GroupTag::EquiAffine => *self == CurveClass::Line,
            GroupTag::Affine => matches!(self, CurveClass::Line | CurveClass::Parabola),
            GroupTag::Projective => *self == CurveClass::Line || self.is_conic(),
        }
    }

    /// Classes that equivalence decides by class alone. For the affine group this adds
    /// ellipses and hyperbolas to the exceptional classes: both have the single signature
    /// point `(0, 0)`, and affine maps preserve the conic type.
    pub fn is_special(&self, group: GroupTag) -> bool {
        match group {
            GroupTag::EquiAffine => *self == CurveClass::Line,
            GroupTag::Affine | GroupTag::Projective => *self == CurveClass::Line || self.is_conic(),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            CurveClass::Line => "Line",
            CurveClass::Parabola => "Parabola",
            CurveClass::Ellipse => "Ellipse",
            CurveClass::Hyperbola => "Hyperbola",
            CurveClass::DegenerateSignature { .. } => "DegenerateSignature",
            CurveClass::Generic => "Generic",
        }
    }
}

/// Small rationals used as probe parameters.
pub(crate) fn probe_points() -> impl Iterator<Item = Rational> {
    (1..200i64).map(|i| Rational::from((i * 7 + 3, 11)) * if i % 2 == 0 { 1 } else { -1 })
}

/// Conic type, line and parabola tests from the graded chain, then constancy of the group
/// invariants.
pub fn classify(curve: &PlanarCurve, group: GroupTag) -> Result<CurveClass, InvariantError> {
    let chain = GradedChain::new(curve)?;
    if chain.is_line() {
        return Ok(CurveClass::Line);
    }
    let mu = chain.mu()?;
    if mu.coeff().is_zero() {
        return Ok(CurveClass::Parabola);
    }
    let dmu = mu.diff(&chain.table)?;
    if dmu.coeff().is_zero() {
        let sign = probe_points()
            .find_map(|t| mu.sign_at(&t, &chain.table).filter(|s| !s.is_eq()))
            .expect("nonzero constant has a nonzero sample");
        return Ok(if sign == Ordering::Greater {
            CurveClass::Ellipse
        } else {
            CurveClass::Hyperbola
        });
    }
    let pair = invariants::invariants(curve, group)?;
    Ok(match pair.constant_point() {
        Some((j, k)) => CurveClass::DegenerateSignature { j, k },
        None => CurveClass::Generic,
    })
}

/// `((z1 + c1)/(z3 + c3), (z2 + c2)/(z3 + c3))`.
pub fn make_epsilon_family(space: &SpatialCurve) -> CurveFamily {
    let [z1, z2, z3] = &space.z;
    let w = z3.add(&RationalFunction::var(Var::C3));
    let x = z1
        .add(&RationalFunction::var(Var::C1))
        .div(&w)
        .expect("z3 + c3 is nonzero");
    let y = z2
        .add(&RationalFunction::var(Var::C2))
        .div(&w)
        .expect("z3 + c3 is nonzero");
    CurveFamily {
        x,
        y,
        params: vec![Var::C1, Var::C2, Var::C3],
    }
}

/// The three reduced affine families `alpha = (z2, z3)`, `beta_b = (z1 + b z2, z3)` and
/// `delta = (z1 + c z3, z2 + f z3)`.
pub fn make_affine_families(space: &SpatialCurve) -> (CurveFamily, CurveFamily, CurveFamily) {
    let [z1, z2, z3] = &space.z;
    let alpha = CurveFamily {
        x: z2.clone(),
        y: z3.clone(),
        params: vec![],
    };
    let beta = CurveFamily {
        x: z1.add(&z2.mul(&RationalFunction::var(Var::B))),
        y: z3.clone(),
        params: vec![Var::B],
    };
    let delta = CurveFamily {
        x: z1.add(&z3.mul(&RationalFunction::var(Var::C))),
        y: z2.add(&z3.mul(&RationalFunction::var(Var::F))),
        params: vec![Var::C, Var::F],
    };
    (alpha, beta, delta)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::from((n, d))
    }

    fn cls(s: &str, g: GroupTag) -> CurveClass {
        classify(&parse_planar(s).unwrap(), g).unwrap()
    }

    #[test]
    fn classify_examples() {
        assert_eq!(cls("(t, 2*t+1)", GroupTag::Affine), CurveClass::Line);
        assert_eq!(cls("(t^2, t)", GroupTag::Affine), CurveClass::Parabola);
        assert_eq!(
            cls("((1-t^2)/(1+t^2), 2*t/(1+t^2))", GroupTag::Affine),
            CurveClass::Ellipse
        );
        assert_eq!(cls("(t, 1/t)", GroupTag::Affine), CurveClass::Hyperbola);
        assert_eq!(
            cls("(t, t^5)", GroupTag::Projective),
            CurveClass::DegenerateSignature {
                j: q(1029, 128),
                k: q(0, 1)
            }
        );
        assert_eq!(cls("(t, t^4 + t^2)", GroupTag::Affine), CurveClass::Generic);
    }

    #[test]
    fn parse_errors() {
        assert!(matches!(
            parse_curve("(t, sin(t))", 2),
            Err(CurveError::Parse(ParseError::NonRational { .. }))
        ));
        assert!(matches!(
            parse_curve("(t, t)", 3),
            Err(CurveError::Parse(ParseError::ComponentCount {
                expected: 3,
                found: 2
            }))
        ));
        assert_eq!(parse_curve("(1, 2)", 2), Err(CurveError::SinglePoint));
    }

    #[test]
    fn epsilon_family_of_twisted_cubic() {
        let g = parse_spatial("(s^3, s^2, s)").unwrap();
        let fam = make_epsilon_family(&g);
        let at0 = fam.specialize(&[q(0, 1), q(0, 1), q(0, 1)]).unwrap();
        assert_eq!(at0, parse_planar("(t^2, t)").unwrap());
        let line = parse_spatial("(s, s, s)").unwrap();
        assert_eq!(make_epsilon_family(&line).params.len(), 3);
    }

    #[test]
    fn affine_families() {
        let g = parse_spatial("(s^4+1, s^2, s)").unwrap();
        let (alpha, beta, _) = make_affine_families(&g);
        let b = RationalFunction::var(Var::B);
        let s = RationalFunction::t();
        assert_eq!(
            beta.x,
            s.pow(4)
                .unwrap()
                .add(&RationalFunction::one())
                .add(&b.mul(&s.pow(2).unwrap()))
        );
        assert_eq!(
            classify(&alpha.generic_curve().unwrap(), GroupTag::Affine).unwrap(),
            CurveClass::Parabola
        );
        let g = parse_spatial("(s^2+s, s^3-3*s^2, s^4)").unwrap();
        let (_, _, delta) = make_affine_families(&g);
        let at = delta.specialize(&[q(1, 1), q(2, 1)]).unwrap();
        assert_eq!(at, parse_planar("(s^2+s+s^4, s^3-3*s^2+2*s^4)").unwrap());
    }

    #[test]
    fn print_parse_roundtrip() {
        let c = parse_planar("(t^3/(t+1) - 2/3, (t^2 - 1/2)/(3*t - 7))").unwrap();
        assert_eq!(parse_planar(&c.to_string()).unwrap(), c);
    }
}
