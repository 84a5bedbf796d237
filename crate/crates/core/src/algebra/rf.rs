//! Rational functions in the curve parameter `t` whose coefficients may involve camera
//! parameters.
//!
//! Normal form: numerator and denominator are integer polynomials with no common factor
//! in `Z[vars]` (integer content included) and the denominator's lex-leading coefficient is
//! positive. Two rational functions are equal iff their normal forms are identical.

use std::fmt;

use rug::ops::Pow;
use rug::{Integer, Rational};
use thiserror::Error;

use super::gcd::gcd;
use super::poly::MultiPoly;
use super::var::Var;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RfError {
    #[error("division by an identically zero rational function")]
    DivisionByZero,
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RationalFunction {
    num: MultiPoly,
    den: MultiPoly,
}

impl RationalFunction {
    /// Reduces `num/den` to normal form. Panics on a zero denominator.
    pub fn new(num: MultiPoly, den: MultiPoly) -> RationalFunction {
        assert!(!den.is_zero(), "zero denominator");
        if num.is_zero() {
            return RationalFunction::zero();
        }
        let g = gcd(&num, &den);
        let (mut n, mut d) = if g.is_one() {
            (num, den)
        } else {
            (
                num.div_exact(&g).expect("gcd divides"),
                den.div_exact(&g).expect("gcd divides"),
            )
        };
        if d.leading_coeff().cmp0().is_lt() {
            n = n.neg();
            d = d.neg();
        }
        RationalFunction { num: n, den: d }
    }

    pub fn zero() -> RationalFunction {
        RationalFunction {
            num: MultiPoly::zero(),
            den: MultiPoly::one(),
        }
    }

    pub fn one() -> RationalFunction {
        RationalFunction::from_poly(MultiPoly::one())
    }

    pub fn from_poly(p: MultiPoly) -> RationalFunction {
        RationalFunction {
            num: p,
            den: MultiPoly::one(),
        }
    }

    pub fn from_integer(k: i64) -> RationalFunction {
        RationalFunction::from_poly(MultiPoly::constant(Integer::from(k)))
    }

    pub fn from_rational(r: &Rational) -> RationalFunction {
        RationalFunction::new(
            MultiPoly::constant(r.numer().clone()),
            MultiPoly::constant(r.denom().clone()),
        )
    }

    pub fn var(v: Var) -> RationalFunction {
        RationalFunction::from_poly(MultiPoly::var(v))
    }

    pub fn t() -> RationalFunction {
        RationalFunction::var(Var::T)
    }

    pub fn num(&self) -> &MultiPoly {
        &self.num
    }

    pub fn den(&self) -> &MultiPoly {
        &self.den
    }

    pub fn into_parts(self) -> (MultiPoly, MultiPoly) {
        (self.num, self.den)
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }

    /// True when the function does not depend on `t`.
    pub fn is_free_of_t(&self) -> bool {
        !self.num.has_var(Var::T) && !self.den.has_var(Var::T)
    }

    /// The value when the function is a pure rational constant.
    pub fn constant_value(&self) -> Option<Rational> {
        let n = self.num.constant_value()?;
        let d = self.den.constant_value()?;
        Some(Rational::from((n, d)))
    }

    pub fn support(&self) -> u16 {
        self.num.support() | self.den.support()
    }

    pub fn has_var(&self, v: Var) -> bool {
        self.num.has_var(v) || self.den.has_var(v)
    }

    pub fn neg(&self) -> RationalFunction {
        RationalFunction {
            num: self.num.neg(),
            den: self.den.clone(),
        }
    }

    pub fn add(&self, other: &RationalFunction) -> RationalFunction {
        self.add_signed(other, false)
    }

    pub fn sub(&self, other: &RationalFunction) -> RationalFunction {
        self.add_signed(other, true)
    }

    fn add_signed(&self, other: &RationalFunction, negate: bool) -> RationalFunction {
        if other.is_zero() {
            return self.clone();
        }
        if self.is_zero() {
            return if negate { other.neg() } else { other.clone() };
        }
        let on = if negate {
            other.num.neg()
        } else {
            other.num.clone()
        };
        if self.den == other.den {
            return RationalFunction::new(self.num.add(&on), self.den.clone());
        }
        let g = gcd(&self.den, &other.den);
        if g.is_one() {
            let n = self.num.mul(&other.den).add(&on.mul(&self.den));
            let d = self.den.mul(&other.den);
            // a prime dividing d1 and n would divide num1 * d2, impossible for coprime pairs
            let mut r = RationalFunction { num: n, den: d };
            r.fix_sign();
            return r;
        }
        let d1 = self.den.div_exact(&g).expect("gcd");
        let d2 = other.den.div_exact(&g).expect("gcd");
        let n = self.num.mul(&d2).add(&on.mul(&d1));
        if n.is_zero() {
            return RationalFunction::zero();
        }
        let h = gcd(&n, &g);
        let (n, gg) = if h.is_one() {
            (n, g)
        } else {
            (n.div_exact(&h).unwrap(), g.div_exact(&h).unwrap())
        };
        let d = d1.mul(&d2).mul(&gg);
        let mut r = RationalFunction { num: n, den: d };
        r.fix_sign();
        r
    }

    fn fix_sign(&mut self) {
        if self.den.leading_coeff().cmp0().is_lt() {
            self.num = self.num.neg();
            self.den = self.den.neg();
        }
    }

    pub fn mul(&self, other: &RationalFunction) -> RationalFunction {
        if self.is_zero() || other.is_zero() {
            return RationalFunction::zero();
        }
        let g1 = gcd(&self.num, &other.den);
        let g2 = gcd(&other.num, &self.den);
        let n1 = self.num.div_exact(&g1).unwrap();
        let d2 = other.den.div_exact(&g1).unwrap();
        let n2 = other.num.div_exact(&g2).unwrap();
        let d1 = self.den.div_exact(&g2).unwrap();
        let mut r = RationalFunction {
            num: n1.mul(&n2),
            den: d1.mul(&d2),
        };
        r.fix_sign();
        r
    }

    pub fn recip(&self) -> Result<RationalFunction, RfError> {
        if self.is_zero() {
            return Err(RfError::DivisionByZero);
        }
        let mut r = RationalFunction {
            num: self.den.clone(),
            den: self.num.clone(),
        };
        r.fix_sign();
        Ok(r)
    }

    pub fn div(&self, other: &RationalFunction) -> Result<RationalFunction, RfError> {
        Ok(self.mul(&other.recip()?))
    }

    pub fn scale(&self, k: &Rational) -> RationalFunction {
        self.mul(&RationalFunction::from_rational(k))
    }

    pub fn mul_poly(&self, p: &MultiPoly) -> RationalFunction {
        self.mul(&RationalFunction::from_poly(p.clone()))
    }

    pub fn pow(&self, e: i32) -> Result<RationalFunction, RfError> {
        let base = if e < 0 { self.recip()? } else { self.clone() };
        let e = e.unsigned_abs();
        // powers of a reduced fraction stay reduced
        let mut r = RationalFunction {
            num: base.num.pow(e),
            den: base.den.pow(e),
        };
        r.fix_sign();
        Ok(r)
    }

    /// Derivative with respect to `v` (usually `t`).
    pub fn diff_in(&self, v: Var) -> RationalFunction {
        if self.is_zero() {
            return RationalFunction::zero();
        }
        if !self.den.has_var(v) {
            return RationalFunction::new(self.num.diff(v), self.den.clone());
        }
        // (n/d)' = (n' d/g - n d'/g) / (d * d/g) with g = gcd(d, d')
        let dd = self.den.diff(v);
        let g = gcd(&self.den, &dd);
        let dg = self.den.div_exact(&g).unwrap();
        let ddg = dd.div_exact(&g).unwrap();
        let n = self.num.diff(v).mul(&dg).sub(&self.num.mul(&ddg));
        RationalFunction::new(n, self.den.mul(&dg))
    }

    pub fn diff(&self) -> RationalFunction {
        self.diff_in(Var::T)
    }

    /// Value at `t = r`; `None` where the denominator vanishes.
    pub fn eval_t(&self, r: &Rational) -> Option<RationalFunction> {
        let d = self.den.eval_rational_cleared(Var::T, r);
        let n = self.num.eval_rational_cleared(Var::T, r);
        if d.is_zero() {
            return None;
        }
        // both were scaled by q^deg; fix the mismatch in degrees
        let dn = self.num.degree(Var::T) as i64;
        let dd = self.den.degree(Var::T) as i64;
        let q = r.denom();
        let (n, d) = match dn.cmp(&dd) {
            std::cmp::Ordering::Less => (n.scale(&Integer::from(Pow::pow(q, (dd - dn) as u32))), d),
            std::cmp::Ordering::Greater => {
                (n, d.scale(&Integer::from(Pow::pow(q, (dn - dd) as u32))))
            }
            std::cmp::Ordering::Equal => (n, d),
        };
        Some(RationalFunction::new(n, d))
    }

    /// Value at a rational `t` when no other variables are present.
    pub fn eval_rational(&self, r: &Rational) -> Option<Rational> {
        self.eval_t(r)?.constant_value()
    }

    /// Substitutes rational values for parameters other than `t`. `None` if the denominator
    /// becomes identically zero.
    pub fn specialize(&self, assignment: &[(Var, Rational)]) -> Option<RationalFunction> {
        let mut n = self.num.clone();
        let mut d = self.den.clone();
        for (v, r) in assignment {
            let dn = n.degree(*v) as i64;
            let ddeg = d.degree(*v) as i64;
            n = n.eval_rational_cleared(*v, r);
            d = d.eval_rational_cleared(*v, r);
            let q = r.denom();
            if dn < ddeg {
                n = n.scale(&Integer::from(Pow::pow(q, (ddeg - dn) as u32)));
            } else if dn > ddeg {
                d = d.scale(&Integer::from(Pow::pow(q, (dn - ddeg) as u32)));
            }
        }
        if d.is_zero() {
            return None;
        }
        Some(RationalFunction::new(n, d))
    }

    /// Composition `self(phi(t))`.
    pub fn compose_t(&self, phi: &RationalFunction) -> RationalFunction {
        let (a, b) = (&phi.num, &phi.den);
        let hom = |p: &MultiPoly| -> (MultiPoly, u32) {
            let d = p.degree(Var::T);
            let coeffs = p.coeffs_in(Var::T);
            let mut acc = MultiPoly::zero();
            let mut apow = MultiPoly::one();
            let bpows: Vec<MultiPoly> = {
                let mut v = vec![MultiPoly::one()];
                for i in 1..=d as usize {
                    let next = v[i - 1].mul(b);
                    v.push(next);
                }
                v
            };
            for (i, c) in coeffs.iter().enumerate() {
                if !c.is_zero() {
                    acc = acc.add(&c.mul(&apow).mul(&bpows[d as usize - i]));
                }
                apow = apow.mul(a);
            }
            (acc, d)
        };
        let (n, dn) = hom(&self.num);
        let (d, dd) = hom(&self.den);
        let (n, d) = match dn.cmp(&dd) {
            std::cmp::Ordering::Less => (n.mul(&b.pow(dd - dn)), d),
            std::cmp::Ordering::Greater => (n, d.mul(&b.pow(dn - dd))),
            std::cmp::Ordering::Equal => (n, d),
        };
        RationalFunction::new(n, d)
    }

    pub fn eval_f64(&self, point: &[(Var, f64)]) -> f64 {
        self.num.eval_f64(point) / self.den.eval_f64(point)
    }

    pub fn eval_t_f64(&self, t: f64) -> f64 {
        self.eval_f64(&[(Var::T, t)])
    }

    /// Largest degree in `t` of numerator and denominator.
    pub fn degree_t(&self) -> u32 {
        self.num.degree(Var::T).max(self.den.degree(Var::T))
    }

    pub fn max_bits(&self) -> u32 {
        self.num.max_bits().max(self.den.max_bits())
    }
}

impl fmt::Debug for RationalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for RationalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({})/({})", self.num, self.den)
        }
    }
}
