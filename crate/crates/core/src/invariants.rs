//! Restrictions of the equi-affine, affine and projective differential invariants to rational
//! curves.
//!
//! Two independent routes are provided. The graded route composes the curvature chain inside
//! [`GradedElement`] arithmetic, one derivative operator at a time. The jet route uses closed
//! polynomial expressions in the derivatives of `x` and `y` with every radical already cleared;
//! it needs no radicand bookkeeping and is the one used for curve families with camera
//! parameters. The two must agree exactly, which the tests check.

use rug::Rational;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::RationalFunction;
use crate::curves::PlanarCurve;
use crate::extension::{GradeError, GradedElement, RadicandId, RadicandTable};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GroupTag {
    EquiAffine,
    Affine,
    Projective,
}

impl GroupTag {
    pub fn name(self) -> &'static str {
        match self {
            GroupTag::EquiAffine => "equiaffine",
            GroupTag::Affine => "affine",
            GroupTag::Projective => "projective",
        }
    }

    pub fn from_name(s: &str) -> Option<GroupTag> {
        match s {
            "equiaffine" => Some(GroupTag::EquiAffine),
            "affine" => Some(GroupTag::Affine),
            "projective" => Some(GroupTag::Projective),
            _ => None,
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum InvariantError {
    #[error("curve is a single point")]
    SinglePoint,
    #[error("curve is a straight line (curvature vanishes)")]
    Line,
    #[error("curve is a parabola (equi-affine curvature vanishes)")]
    Parabola,
    #[error("curve is a conic (mu_alpha vanishes)")]
    Conic,
    #[error(transparent)]
    Grade(#[from] GradeError),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InvariantPair {
    pub j: RationalFunction,
    pub k: RationalFunction,
}

impl InvariantPair {
    pub fn is_constant(&self) -> bool {
        self.j.is_free_of_t() && self.k.is_free_of_t()
    }

    pub fn constant_point(&self) -> Option<(Rational, Rational)> {
        Some((self.j.constant_value()?, self.k.constant_value()?))
    }

    pub fn compose_t(&self, phi: &RationalFunction) -> InvariantPair {
        InvariantPair {
            j: self.j.compose_t(phi),
            k: self.k.compose_t(phi),
        }
    }
}

fn q(n: i64, d: i64) -> Rational {
    Rational::from((n, d))
}

/// The graded curvature chain of one curve.
pub struct GradedChain {
    pub table: RadicandTable,
    /// `A^(-1/2)`, the factor of `d/ds`.
    inv_speed: GradedElement,
    pub kappa: GradedElement,
}

impl GradedChain {
    pub fn new(curve: &PlanarCurve) -> Result<GradedChain, InvariantError> {
        let (xd, yd) = (curve.x.diff(), curve.y.diff());
        let a = xd.mul(&xd).add(&yd.mul(&yd));
        if a.is_zero() {
            return Err(InvariantError::SinglePoint);
        }
        let n = xd.mul(&yd.diff()).sub(&curve.x.diff().diff().mul(&yd));
        let mut table = RadicandTable::new();
        table.insert(RadicandId::A, a)?;
        let inv_speed = GradedElement::radicand_power(&table, RadicandId::A, &q(-1, 2))?;
        let a32 = GradedElement::radicand_power(&table, RadicandId::A, &q(-3, 2))?;
        let kappa = if n.is_zero() {
            GradedElement::rational(RationalFunction::zero())
        } else {
            table.insert(RadicandId::N, n)?;
            GradedElement::radicand_power(&table, RadicandId::N, &q(1, 1))?.mul(&a32, &table)?
        };
        Ok(GradedChain {
            table,
            inv_speed,
            kappa,
        })
    }

    pub fn is_line(&self) -> bool {
        self.kappa.coeff().is_zero()
    }

    /// `d/ds = A^(-1/2) D`.
    pub fn d_s(&self, e: &GradedElement) -> Result<GradedElement, InvariantError> {
        Ok(self.inv_speed.mul(&e.diff(&self.table)?, &self.table)?)
    }

    /// `d/dalpha = kappa^(-1/3) d/ds`.
    pub fn d_alpha(&self, e: &GradedElement) -> Result<GradedElement, InvariantError> {
        let k13 = self.kappa.pow(&q(-1, 3), &self.table)?;
        Ok(k13.mul(&self.d_s(e)?, &self.table)?)
    }

    /// Equi-affine curvature `mu = (3 kappa (kappa_ss + 3 kappa^3) - 5 kappa_s^2) / (9 kappa^(8/3))`.
    pub fn mu(&self) -> Result<GradedElement, InvariantError> {
        if self.is_line() {
            return Err(InvariantError::Line);
        }
        let t = &self.table;
        let k = &self.kappa;
        let ks = self.d_s(k)?;
        let kss = self.d_s(&ks)?;
        let k3 = k.pow(&q(3, 1), t)?;
        let inner = kss.add(&k3.scale(&q(3, 1)))?;
        let num = k
            .mul(&inner, t)?
            .scale(&q(3, 1))
            .sub(&ks.mul(&ks, t)?.scale(&q(5, 1)))?;
        Ok(num.mul(&k.pow(&q(-8, 3), t)?, t)?.scale(&q(1, 9)))
    }
}

pub fn kappa_restricted(
    curve: &PlanarCurve,
) -> Result<(GradedChain, GradedElement), InvariantError> {
    let chain = GradedChain::new(curve)?;
    let k = chain.kappa.clone();
    Ok((chain, k))
}

pub fn mu_restricted(curve: &PlanarCurve) -> Result<(GradedChain, GradedElement), InvariantError> {
    let chain = GradedChain::new(curve)?;
    let mu = chain.mu()?;
    Ok((chain, mu))
}

/// Equi-affine curvature data: `mu^3` and `mu_alpha`, both rational.
pub fn equiaffine_invariants(curve: &PlanarCurve) -> Result<InvariantPair, InvariantError> {
    let chain = GradedChain::new(curve)?;
    let mu = chain.mu()?;
    let mu_a = chain.d_alpha(&mu)?;
    let mu3 = mu.pow(&q(3, 1), &chain.table)?;
    Ok(InvariantPair {
        j: mu3.to_rational()?,
        k: mu_a.to_rational()?,
    })
}

/// `J_a = mu_alpha^2 / mu^3`, `K_a = mu_alphaalpha / (3 mu^2)` by the graded route.
pub fn affine_invariants(curve: &PlanarCurve) -> Result<InvariantPair, InvariantError> {
    let chain = GradedChain::new(curve)?;
    let t = &chain.table;
    let mu = chain.mu()?;
    if mu.coeff().is_zero() {
        return Err(InvariantError::Parabola);
    }
    let mu_a = chain.d_alpha(&mu)?;
    let mu_aa = chain.d_alpha(&mu_a)?;
    let j = mu_a.mul(&mu_a, t)?.mul(&mu.pow(&q(-3, 1), t)?, t)?;
    let k = mu_aa.mul(&mu.pow(&q(-2, 1), t)?, t)?.scale(&q(1, 3));
    Ok(InvariantPair {
        j: j.to_rational()?,
        k: k.to_rational()?,
    })
}

/// `J_p = eta^3`, `K_p = eta_rho` by the graded route, with third radicand `M = mu_alpha`.
pub fn projective_invariants(curve: &PlanarCurve) -> Result<InvariantPair, InvariantError> {
    let mut chain = GradedChain::new(curve)?;
    let mu = chain.mu()?;
    if mu.coeff().is_zero() {
        return Err(InvariantError::Parabola);
    }
    let mu_a = chain.d_alpha(&mu)?;
    let m = mu_a.to_rational()?;
    if m.is_zero() {
        return Err(InvariantError::Conic);
    }
    chain.table.insert(RadicandId::M, m)?;
    let mu_aa = chain.d_alpha(&mu_a)?;
    let mu_aaa = chain.d_alpha(&mu_aa)?;
    let t = &chain.table;
    let num = mu_aaa
        .mul(&mu_a, t)?
        .scale(&q(6, 1))
        .sub(&mu_aa.mul(&mu_aa, t)?.scale(&q(7, 1)))?
        .sub(&mu_a.mul(&mu_a, t)?.mul(&mu, t)?.scale(&q(9, 1)))?;
    let m_pow = GradedElement::radicand_power(t, RadicandId::M, &q(-8, 3))?;
    let eta = num.mul(&m_pow, t)?.scale(&q(1, 6));
    let j = eta.pow(&q(3, 1), t)?;
    let m13 = GradedElement::radicand_power(t, RadicandId::M, &q(-1, 3))?;
    let k = m13.mul(&chain.d_alpha(&eta)?, t)?;
    Ok(InvariantPair {
        j: j.to_rational()?,
        k: k.to_rational()?,
    })
}

pub fn invariants(curve: &PlanarCurve, group: GroupTag) -> Result<InvariantPair, InvariantError> {
    match group {
        GroupTag::EquiAffine => equiaffine_invariants(curve),
        GroupTag::Affine => affine_invariants(curve),
        GroupTag::Projective => projective_invariants(curve),
    }
}

/// Radical-free jet expressions.
///
/// With `D` the derivative in the curve parameter, `N = x'y'' - x''y'` and
/// `B = x''y''' - x'''y''`:
///
/// ```text
/// P = 9NB + 3NN'' - 5N'^2          mu        = P / (9 N^(8/3))
/// Q = 3P'N - 8PN'                  mu_alpha  = Q / (27 N^4)
/// R = Q'N - 4QN'                   J_a = Q^2/P^3,  K_a = R/P^2
/// S = 3R'N - 16RN'
/// T = 2SQ - 7R^2 - PQ^2            J_p = 27 T^3 / (8 Q^8)
///                                  K_p = 3N (3T'Q - 8TQ') / (2 Q^4)
/// ```
pub mod jet {
    use super::*;

    pub struct Jets {
        pub n: RationalFunction,
        pub p: RationalFunction,
        pub q: RationalFunction,
    }

    fn lin(terms: &[(i64, &RationalFunction, &RationalFunction)]) -> RationalFunction {
        let mut acc = RationalFunction::zero();
        for (c, a, b) in terms {
            acc = acc.add(&a.mul(b).scale(&Rational::from(*c)));
        }
        acc
    }

    /// `N`, `P`, `Q` without any exceptional-curve checks; zero values are allowed.
    pub fn jets_of(x: &RationalFunction, y: &RationalFunction) -> Jets {
        let (x1, y1) = (x.diff(), y.diff());
        let (x2, y2) = (x1.diff(), y1.diff());
        let (x3, y3) = (x2.diff(), y2.diff());
        let n = lin(&[(1, &x1, &y2), (-1, &x2, &y1)]);
        let b = lin(&[(1, &x2, &y3), (-1, &x3, &y2)]);
        let n1 = n.diff();
        let n2 = n1.diff();
        let p = lin(&[(9, &n, &b), (3, &n, &n2), (-5, &n1, &n1)]);
        let qq = lin(&[(3, &p.diff(), &n), (-8, &p, &n1)]);
        Jets { n, p, q: qq }
    }

    pub fn jets(curve: &PlanarCurve) -> Result<Jets, InvariantError> {
        if curve.x.diff().is_zero() && curve.y.diff().is_zero() {
            return Err(InvariantError::SinglePoint);
        }
        let js = jets_of(&curve.x, &curve.y);
        if js.n.is_zero() {
            return Err(InvariantError::Line);
        }
        Ok(js)
    }

    /// `mu^3 = P^3 / (729 N^8)` and `mu_alpha = Q / (27 N^4)`.
    pub fn equiaffine_invariants(curve: &PlanarCurve) -> Result<InvariantPair, InvariantError> {
        let js = jets(curve)?;
        let n4 = js.n.pow(4).expect("N nonzero");
        let j =
            js.p.pow(3)
                .expect("int")
                .div(&n4.mul(&n4).scale(&q(729, 1)))
                .expect("N nonzero");
        let k = js.q.div(&n4.scale(&q(27, 1))).expect("N nonzero");
        Ok(InvariantPair { j, k })
    }

    pub fn affine_invariants(curve: &PlanarCurve) -> Result<InvariantPair, InvariantError> {
        let js = jets(curve)?;
        affine_from_jets(&js)
    }

    pub fn affine_from_jets(js: &Jets) -> Result<InvariantPair, InvariantError> {
        if js.n.is_zero() {
            return Err(InvariantError::Line);
        }
        if js.p.is_zero() {
            return Err(InvariantError::Parabola);
        }
        let r = lin(&[(1, &js.q.diff(), &js.n), (-4, &js.q, &js.n.diff())]);
        let p2 = js.p.mul(&js.p);
        let j = js.q.mul(&js.q).div(&p2.mul(&js.p)).expect("P nonzero");
        let k = r.div(&p2).expect("P nonzero");
        Ok(InvariantPair { j, k })
    }

    pub fn projective_invariants(curve: &PlanarCurve) -> Result<InvariantPair, InvariantError> {
        let js = jets(curve)?;
        projective_from_jets(&js)
    }

    pub fn projective_from_jets(js: &Jets) -> Result<InvariantPair, InvariantError> {
        if js.n.is_zero() {
            return Err(InvariantError::Line);
        }
        if js.p.is_zero() {
            return Err(InvariantError::Parabola);
        }
        if js.q.is_zero() {
            return Err(InvariantError::Conic);
        }
        let (n, qq, p) = (&js.n, &js.q, &js.p);
        let n1 = n.diff();
        let r = lin(&[(1, &qq.diff(), n), (-4, qq, &n1)]);
        let s = lin(&[(3, &r.diff(), n), (-16, &r, &n1)]);
        let pq = p.mul(qq);
        let t = lin(&[(2, &s, qq), (-7, &r, &r), (-1, &pq, qq)]);
        let q2 = qq.mul(qq);
        let q4 = q2.mul(&q2);
        let j = t
            .pow(3)
            .expect("int")
            .div(&q4.mul(&q4))
            .expect("Q nonzero")
            .scale(&q(27, 8));
        let inner = lin(&[(3, &t.diff(), qq), (-8, &t, &qq.diff())]);
        let k = inner.mul(n).div(&q4).expect("Q nonzero").scale(&q(3, 2));
        Ok(InvariantPair { j, k })
    }
}
