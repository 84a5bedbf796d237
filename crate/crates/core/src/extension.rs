//! Graded radical functions `f * A^a * N^n * M^m` with `f` rational and exponents in sixths.
//!
//! The radicands are the fixed rational functions `A = x'^2 + y'^2`, `N = x'y'' - x''y'` and
//! `M = mu_alpha` of a curve. Elements are kept with every exponent in `[0, 1)`; integer
//! parts are multiplied into the coefficient. Differentiation preserves the grade, so the
//! curvature chain stays inside one exactly representable algebra.

use std::fmt;

use rug::Rational;
use thiserror::Error;

use crate::algebra::{RationalFunction, RfError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GradeError {
    #[error("grade mismatch in sum: {0} vs {1}")]
    GradeMismatch(String, String),
    #[error("fractional power of a non-monomial element")]
    NonMonomialPower,
    #[error("exponent {0} is not a multiple of 1/6")]
    BadExponent(String),
    #[error("residual fractional grade {0}")]
    ResidualGrade(String),
    #[error("radicand {0} is not registered or identically zero")]
    MissingRadicand(&'static str),
    #[error(transparent)]
    Rf(#[from] RfError),
}

/// Identifier of one of the three radicands.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum RadicandId {
    A,
    N,
    M,
}

impl RadicandId {
    pub const ALL: [RadicandId; 3] = [RadicandId::A, RadicandId::N, RadicandId::M];

    fn index(self) -> usize {
        match self {
            RadicandId::A => 0,
            RadicandId::N => 1,
            RadicandId::M => 2,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            RadicandId::A => "A",
            RadicandId::N => "N",
            RadicandId::M => "M",
        }
    }
}

/// A radicand together with its logarithmic derivative.
#[derive(Clone, Debug)]
pub struct Radicand {
    pub id: RadicandId,
    pub value: RationalFunction,
    log_derivative: RationalFunction,
}

/// The radicand table of one curve.
#[derive(Clone, Debug, Default)]
pub struct RadicandTable {
    entries: [Option<Radicand>; 3],
}

impl RadicandTable {
    pub fn new() -> RadicandTable {
        RadicandTable::default()
    }

    pub fn insert(&mut self, id: RadicandId, value: RationalFunction) -> Result<(), GradeError> {
        if value.is_zero() {
            return Err(GradeError::MissingRadicand(id.name()));
        }
        let log_derivative = value.diff().div(&value)?;
        self.entries[id.index()] = Some(Radicand {
            id,
            value,
            log_derivative,
        });
        Ok(())
    }

    pub fn get(&self, id: RadicandId) -> Result<&Radicand, GradeError> {
        self.entries[id.index()]
            .as_ref()
            .ok_or(GradeError::MissingRadicand(id.name()))
    }
}

/// Exponents in sixths, indexed like [`RadicandId::ALL`].
pub type Grade = [i32; 3];

#[derive(Clone)]
pub struct GradedElement {
    coeff: RationalFunction,
    grade: Grade,
    /// When known: the element equals `sign * prod R_i^(mono_i / 6)` exactly.
    monomial: Option<(i8, Grade)>,
}

impl PartialEq for GradedElement {
    fn eq(&self, other: &Self) -> bool {
        self.coeff == other.coeff && self.grade == other.grade
    }
}

impl Eq for GradedElement {}

fn sixths(e: &Rational) -> Result<i32, GradeError> {
    let six = Rational::from(e * 6u32);
    if *six.denom() != 1 {
        return Err(GradeError::BadExponent(e.to_string()));
    }
    six.numer()
        .to_i32()
        .ok_or_else(|| GradeError::BadExponent(e.to_string()))
}

fn grade_string(g: &Grade) -> String {
    let parts: Vec<String> = RadicandId::ALL
        .iter()
        .zip(g)
        .filter(|(_, e)| **e != 0)
        .map(|(id, e)| format!("{}^{}", id.name(), Rational::from((*e, 6))))
        .collect();
    if parts.is_empty() {
        "1".into()
    } else {
        parts.join("*")
    }
}

impl GradedElement {
    /// A grade-free element.
    pub fn rational(f: RationalFunction) -> GradedElement {
        let monomial = f.constant_value().and_then(|c| {
            if c == 1 {
                Some((1, [0; 3]))
            } else if c == -1 {
                Some((-1, [0; 3]))
            } else {
                None
            }
        });
        GradedElement {
            coeff: f,
            grade: [0; 3],
            monomial,
        }
    }

    pub fn constant(r: &Rational) -> GradedElement {
        GradedElement::rational(RationalFunction::from_rational(r))
    }

    /// `R^e` for a registered radicand.
    pub fn radicand_power(
        table: &RadicandTable,
        id: RadicandId,
        e: &Rational,
    ) -> Result<GradedElement, GradeError> {
        table.get(id)?;
        let mut grade = [0; 3];
        grade[id.index()] = sixths(e)?;
        let mut g = GradedElement {
            coeff: RationalFunction::one(),
            grade,
            monomial: Some((1, grade)),
        };
        g.fold(table)?;
        Ok(g)
    }

    pub fn coeff(&self) -> &RationalFunction {
        &self.coeff
    }

    /// Fractional grade as exact rationals in `[0, 1)`.
    pub fn grade(&self) -> [Rational; 3] {
        [0, 1, 2].map(|i| Rational::from((self.grade[i], 6)))
    }

    pub fn grade_sixths(&self) -> Grade {
        self.grade
    }

    pub fn is_grade_free(&self) -> bool {
        self.grade == [0; 3]
    }

    /// Moves integer parts of the exponents into the coefficient.
    fn fold(&mut self, table: &RadicandTable) -> Result<(), GradeError> {
        for id in RadicandId::ALL {
            let i = id.index();
            let e = self.grade[i];
            let q = e.div_euclid(6);
            if q != 0 {
                let r = &table.get(id)?.value;
                self.coeff = self.coeff.mul(&r.pow(q)?);
                self.grade[i] = e.rem_euclid(6);
            }
        }
        Ok(())
    }

    pub fn mul(
        &self,
        other: &GradedElement,
        table: &RadicandTable,
    ) -> Result<GradedElement, GradeError> {
        let grade: Grade = std::array::from_fn(|i| self.grade[i] + other.grade[i]);
        let monomial = match (self.monomial, other.monomial) {
            (Some((s1, m1)), Some((s2, m2))) => {
                Some((s1 * s2, [m1[0] + m2[0], m1[1] + m2[1], m1[2] + m2[2]]))
            }
            _ => None,
        };
        let mut g = GradedElement {
            coeff: self.coeff.mul(&other.coeff),
            grade,
            monomial,
        };
        g.fold(table)?;
        Ok(g)
    }

    pub fn add(&self, other: &GradedElement) -> Result<GradedElement, GradeError> {
        if self.grade != other.grade {
            return Err(GradeError::GradeMismatch(
                grade_string(&self.grade),
                grade_string(&other.grade),
            ));
        }
        Ok(GradedElement {
            coeff: self.coeff.add(&other.coeff),
            grade: self.grade,
            monomial: None,
        })
    }

    pub fn sub(&self, other: &GradedElement) -> Result<GradedElement, GradeError> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> GradedElement {
        GradedElement {
            coeff: self.coeff.neg(),
            grade: self.grade,
            monomial: self.monomial.map(|(s, m)| (-s, m)),
        }
    }

    pub fn scale(&self, k: &Rational) -> GradedElement {
        let monomial = if *k == 1 {
            self.monomial
        } else if *k == -1 {
            self.monomial.map(|(s, m)| (-s, m))
        } else {
            None
        };
        GradedElement {
            coeff: self.coeff.scale(k),
            grade: self.grade,
            monomial,
        }
    }

    /// Derivative with respect to the curve parameter:
    /// `D(f prod R^e) = (f' + f sum e R'/R) prod R^e`.
    pub fn diff(&self, table: &RadicandTable) -> Result<GradedElement, GradeError> {
        let mut c = self.coeff.diff();
        for id in RadicandId::ALL {
            let e = self.grade[id.index()];
            if e != 0 {
                let ld = &table.get(id)?.log_derivative;
                c = c.add(&self.coeff.mul(ld).scale(&Rational::from((e, 6))));
            }
        }
        Ok(GradedElement {
            coeff: c,
            grade: self.grade,
            monomial: None,
        })
    }

    /// `self^e` with `e` a multiple of 1/6. Fractional powers need a monomial element.
    pub fn pow(&self, e: &Rational, table: &RadicandTable) -> Result<GradedElement, GradeError> {
        let e6 = sixths(e)?;
        if e6 % 6 == 0 {
            let k = e6 / 6;
            let grade = self.grade.map(|g| g * k);
            let monomial = self.monomial.map(|(s, m)| {
                let sign = if k % 2 == 0 { 1 } else { s };
                (sign, [m[0] * k, m[1] * k, m[2] * k])
            });
            let mut g = GradedElement {
                coeff: self.coeff.pow(k)?,
                grade,
                monomial,
            };
            g.fold(table)?;
            return Ok(g);
        }
        let Some((sign, m)) = self.monomial else {
            return Err(GradeError::NonMonomialPower);
        };
        // radical signs are treated as formally positive; odd roots keep the sign
        let mut grade = [0; 3];
        for i in 0..3 {
            let prod = m[i] * e6;
            if prod % 6 != 0 {
                return Err(GradeError::BadExponent(format!(
                    "{}*{}",
                    Rational::from((m[i], 6)),
                    e
                )));
            }
            grade[i] = prod / 6;
        }
        let coeff = if sign < 0 {
            RationalFunction::from_integer(-1)
        } else {
            RationalFunction::one()
        };
        let mut g = GradedElement {
            coeff,
            grade,
            monomial: Some((sign, grade)),
        };
        g.fold(table)?;
        Ok(g)
    }

    /// The coefficient, provided no fractional grade remains.
    pub fn to_rational(&self) -> Result<RationalFunction, GradeError> {
        if !self.is_grade_free() {
            return Err(GradeError::ResidualGrade(grade_string(&self.grade)));
        }
        Ok(self.coeff.clone())
    }

    /// Exact sign at a rational `t`; `None` where the coefficient or a radicand is undefined
    /// or a radicand under an even root is not positive.
    pub fn sign_at(&self, t: &Rational, table: &RadicandTable) -> Option<std::cmp::Ordering> {
        let mut sign = self.coeff.eval_rational(t)?.cmp0();
        for id in RadicandId::ALL {
            let e = self.grade[id.index()];
            if e == 0 {
                continue;
            }
            let r = table.get(id).ok()?.value.eval_rational(t)?;
            match r.cmp0() {
                std::cmp::Ordering::Equal => return Some(std::cmp::Ordering::Equal),
                std::cmp::Ordering::Less if e % 2 == 1 => return None,
                std::cmp::Ordering::Less if (e / 2) % 2 == 1 => sign = sign.reverse(),
                _ => {}
            }
        }
        Some(sign)
    }

    /// Floating-point value at `t`. Radicands under an even root must be positive there.
    pub fn eval_f64(&self, t: f64, table: &RadicandTable) -> Result<f64, GradeError> {
        let mut v = self.coeff.eval_t_f64(t);
        for id in RadicandId::ALL {
            let e = self.grade[id.index()];
            if e != 0 {
                let r = table.get(id)?.value.eval_t_f64(t);
                // odd roots are real cube roots; even roots need r > 0
                let odd = e % 2 == 0;
                v *= if odd && r < 0.0 {
                    let sign = if (e / 2) % 2 == 0 { 1.0 } else { -1.0 };
                    sign * (-r).powf(e as f64 / 6.0)
                } else {
                    r.powf(e as f64 / 6.0)
                };
            }
        }
        Ok(v)
    }
}

impl fmt::Debug for GradedElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}] * {}", self.coeff, grade_string(&self.grade))
    }
}

// Free-function aliases in the vocabulary of the operation list.
pub fn ge_mul(
    a: &GradedElement,
    b: &GradedElement,
    table: &RadicandTable,
) -> Result<GradedElement, GradeError> {
    a.mul(b, table)
}

pub fn ge_add(a: &GradedElement, b: &GradedElement) -> Result<GradedElement, GradeError> {
    a.add(b)
}

pub fn ge_diff(a: &GradedElement, table: &RadicandTable) -> Result<GradedElement, GradeError> {
    a.diff(table)
}

pub fn ge_pow(
    a: &GradedElement,
    e: &Rational,
    table: &RadicandTable,
) -> Result<GradedElement, GradeError> {
    a.pow(e, table)
}

pub fn ge_to_rational(a: &GradedElement) -> Result<RationalFunction, GradeError> {
    a.to_rational()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::poly::{pconst, pvar};
    use crate::algebra::{MultiPoly, Var};

    fn q(n: i64, d: i64) -> Rational {
        Rational::from((n, d))
    }

    /// Radicands of the parabola (t, t^2): A = 1 + 4t^2, N = 2.
    fn parabola_table() -> RadicandTable {
        let t = pvar(Var::T);
        let mut tab = RadicandTable::new();
        tab.insert(
            RadicandId::A,
            RationalFunction::from_poly(&pconst(1) + &t.pow(2).scale(&4.into())),
        )
        .unwrap();
        tab.insert(RadicandId::N, RationalFunction::from_integer(2))
            .unwrap();
        tab
    }

    fn rf(p: MultiPoly) -> RationalFunction {
        RationalFunction::from_poly(p)
    }

    #[test]
    fn half_powers_fold() {
        let tab = parabola_table();
        let h = GradedElement::radicand_power(&tab, RadicandId::A, &q(1, 2)).unwrap();
        let f = GradedElement::rational(rf(pvar(Var::T)))
            .mul(&h, &tab)
            .unwrap();
        let g = GradedElement::rational(rf(&pvar(Var::T) + &pconst(1)))
            .mul(&h, &tab)
            .unwrap();
        let p = f.mul(&g, &tab).unwrap();
        assert!(p.is_grade_free());
        let a = tab.get(RadicandId::A).unwrap().value.clone();
        assert_eq!(
            p.to_rational().unwrap(),
            rf(pvar(Var::T))
                .mul(&rf(&pvar(Var::T) + &pconst(1)))
                .mul(&a)
        );
    }

    #[test]
    fn third_powers_accumulate() {
        let tab = parabola_table();
        let n13 = GradedElement::radicand_power(&tab, RadicandId::N, &q(1, 3)).unwrap();
        let p = n13.mul(&n13, &tab).unwrap();
        assert_eq!(p.grade(), [q(0, 1), q(2, 3), q(0, 1)]);
    }

    #[test]
    fn mismatched_sum_rejected() {
        let tab = parabola_table();
        let a = GradedElement::radicand_power(&tab, RadicandId::A, &q(1, 2)).unwrap();
        let b = GradedElement::radicand_power(&tab, RadicandId::A, &q(1, 3)).unwrap();
        assert!(matches!(a.add(&b), Err(GradeError::GradeMismatch(..))));
        let one_plus = GradedElement::constant(&q(1, 1))
            .mul(&a, &tab)
            .unwrap()
            .add(&a)
            .unwrap();
        assert!(matches!(
            one_plus.pow(&q(1, 3), &tab),
            Err(GradeError::NonMonomialPower)
        ));
    }

    #[test]
    fn derivative_of_sqrt() {
        let tab = parabola_table();
        let a = GradedElement::radicand_power(&tab, RadicandId::A, &q(1, 2)).unwrap();
        let d = a.diff(&tab).unwrap();
        let av = &tab.get(RadicandId::A).unwrap().value;
        let expect = av.diff().div(&av.scale(&q(2, 1))).unwrap();
        assert_eq!(d.coeff(), &expect);
        assert_eq!(d.grade_sixths(), a.grade_sixths());
    }

    #[test]
    fn cube_root_cubed() {
        let tab = parabola_table();
        // kappa = N * A^(-3/2)
        let kappa = GradedElement::radicand_power(&tab, RadicandId::N, &q(1, 1))
            .unwrap()
            .mul(
                &GradedElement::radicand_power(&tab, RadicandId::A, &q(-3, 2)).unwrap(),
                &tab,
            )
            .unwrap();
        let r = kappa.pow(&q(1, 3), &tab).unwrap();
        let back = r.mul(&r, &tab).unwrap().mul(&r, &tab).unwrap();
        assert_eq!(back, kappa);
        assert!(kappa.to_rational().is_err());
    }
}
