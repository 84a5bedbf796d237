//! Sparse multivariate polynomials with integer coefficients.
//!
//! Terms are kept sorted by decreasing monomial (lex order, `t` first) with no zero
//! coefficients, so structural equality is polynomial equality.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use rug::ops::Pow;
use rug::{Integer, Rational};

use super::var::{Mono, Var, NVARS};

#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct MultiPoly {
    terms: Vec<(Mono, Integer)>,
}

impl MultiPoly {
    pub fn zero() -> MultiPoly {
        MultiPoly { terms: Vec::new() }
    }

    pub fn one() -> MultiPoly {
        MultiPoly::constant(Integer::from(1))
    }

    pub fn constant(c: impl Into<Integer>) -> MultiPoly {
        let c = c.into();
        if c.cmp0().is_eq() {
            MultiPoly::zero()
        } else {
            MultiPoly {
                terms: vec![(Mono::ONE, c)],
            }
        }
    }

    pub fn var(v: Var) -> MultiPoly {
        MultiPoly {
            terms: vec![(Mono::var(v, 1), Integer::from(1))],
        }
    }

    pub fn monomial(m: Mono, c: impl Into<Integer>) -> MultiPoly {
        MultiPoly::constant(c).mul_mono(&m)
    }

    /// Builds a polynomial from unsorted terms, combining duplicates.
    pub fn from_terms(terms: impl IntoIterator<Item = (Mono, Integer)>) -> MultiPoly {
        let mut map: HashMap<Mono, Integer> = HashMap::new();
        for (m, c) in terms {
            *map.entry(m).or_default() += c;
        }
        MultiPoly::from_map(map)
    }

    fn from_map(map: HashMap<Mono, Integer>) -> MultiPoly {
        let mut terms: Vec<(Mono, Integer)> =
            map.into_iter().filter(|(_, c)| !c.cmp0().is_eq()).collect();
        terms.sort_unstable_by_key(|a| std::cmp::Reverse(a.0));
        MultiPoly { terms }
    }

    /// Univariate polynomial in `v` from coefficients in increasing degree.
    pub fn from_coeffs(v: Var, coeffs: &[Integer]) -> MultiPoly {
        let mut terms: Vec<(Mono, Integer)> = coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.cmp0().is_eq())
            .map(|(i, c)| (Mono::var(v, i as u16), c.clone()))
            .collect();
        terms.reverse();
        MultiPoly { terms }
    }

    /// Polynomial `sum_i coeffs[i] * v^i` with polynomial coefficients free of `v`.
    pub fn from_poly_coeffs(v: Var, coeffs: &[MultiPoly]) -> MultiPoly {
        let mut terms = Vec::new();
        for (i, c) in coeffs.iter().enumerate() {
            for (m, a) in &c.terms {
                debug_assert_eq!(m.exp(v), 0);
                terms.push((m.with_exp(v, i as u16), a.clone()));
            }
        }
        terms.sort_unstable_by_key(|a| std::cmp::Reverse(a.0));
        MultiPoly { terms }
    }

    pub fn terms(&self) -> &[(Mono, Integer)] {
        &self.terms
    }

    pub fn into_terms(self) -> Vec<(Mono, Integer)> {
        self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms[0].0.is_one() && self.terms[0].1 == 1
    }

    pub fn is_constant(&self) -> bool {
        self.terms.is_empty() || (self.terms.len() == 1 && self.terms[0].0.is_one())
    }

    pub fn constant_value(&self) -> Option<Integer> {
        match self.terms.as_slice() {
            [] => Some(Integer::new()),
            [(m, c)] if m.is_one() => Some(c.clone()),
            _ => None,
        }
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Leading term in lex order.
    pub fn leading(&self) -> Option<&(Mono, Integer)> {
        self.terms.first()
    }

    pub fn leading_coeff(&self) -> Integer {
        self.terms.first().map(|t| t.1.clone()).unwrap_or_default()
    }

    pub fn support(&self) -> u16 {
        self.terms.iter().fold(0, |acc, (m, _)| acc | m.support())
    }

    pub fn vars(&self) -> Vec<Var> {
        let s = self.support();
        Var::all().filter(|v| s & (1 << v.index()) != 0).collect()
    }

    pub fn has_var(&self, v: Var) -> bool {
        self.support() & (1 << v.index()) != 0
    }

    pub fn degree(&self, v: Var) -> u32 {
        self.terms
            .iter()
            .map(|(m, _)| m.exp(v) as u32)
            .max()
            .unwrap_or(0)
    }

    pub fn total_degree(&self) -> u32 {
        self.terms
            .iter()
            .map(|(m, _)| m.total_degree())
            .max()
            .unwrap_or(0)
    }

    pub fn max_bits(&self) -> u32 {
        self.terms
            .iter()
            .map(|(_, c)| c.significant_bits())
            .max()
            .unwrap_or(0)
    }

    /// Gcd of the integer coefficients, positive (zero for the zero polynomial).
    pub fn content(&self) -> Integer {
        let mut g = Integer::new();
        for (_, c) in &self.terms {
            g.gcd_mut(c);
            if g == 1 {
                break;
            }
        }
        g
    }

    /// Divides out the integer content and makes the leading coefficient positive.
    pub fn primitive(&self) -> MultiPoly {
        if self.is_zero() {
            return MultiPoly::zero();
        }
        let mut g = self.content();
        if self.terms[0].1.cmp0().is_lt() {
            g = -g;
        }
        self.div_integer(&g)
    }

    pub fn neg(&self) -> MultiPoly {
        MultiPoly {
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (*m, Integer::from(-c)))
                .collect(),
        }
    }

    pub fn scale(&self, k: &Integer) -> MultiPoly {
        if k.cmp0().is_eq() {
            return MultiPoly::zero();
        }
        MultiPoly {
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (*m, Integer::from(c * k)))
                .collect(),
        }
    }

    /// Exact division of every coefficient by `k`.
    pub fn div_integer(&self, k: &Integer) -> MultiPoly {
        MultiPoly {
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (*m, Integer::from(c.div_exact_ref(k))))
                .collect(),
        }
    }

    pub fn mul_mono(&self, mono: &Mono) -> MultiPoly {
        MultiPoly {
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.mul(mono), c.clone()))
                .collect(),
        }
    }

    pub fn add(&self, other: &MultiPoly) -> MultiPoly {
        self.combine(other, false)
    }

    pub fn sub(&self, other: &MultiPoly) -> MultiPoly {
        self.combine(other, true)
    }

    fn combine(&self, other: &MultiPoly, negate: bool) -> MultiPoly {
        let mut out = Vec::with_capacity(self.terms.len() + other.terms.len());
        let (mut i, mut j) = (0, 0);
        let (a, b) = (&self.terms, &other.terms);
        while i < a.len() || j < b.len() {
            let ord = if i == a.len() {
                std::cmp::Ordering::Less
            } else if j == b.len() {
                std::cmp::Ordering::Greater
            } else {
                a[i].0.cmp(&b[j].0)
            };
            match ord {
                std::cmp::Ordering::Greater => {
                    out.push(a[i].clone());
                    i += 1;
                }
                std::cmp::Ordering::Less => {
                    let c = if negate {
                        Integer::from(-&b[j].1)
                    } else {
                        b[j].1.clone()
                    };
                    out.push((b[j].0, c));
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    let c = if negate {
                        Integer::from(&a[i].1 - &b[j].1)
                    } else {
                        Integer::from(&a[i].1 + &b[j].1)
                    };
                    if !c.cmp0().is_eq() {
                        out.push((a[i].0, c));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        MultiPoly { terms: out }
    }

    pub fn mul(&self, other: &MultiPoly) -> MultiPoly {
        if self.is_zero() || other.is_zero() {
            return MultiPoly::zero();
        }
        let (small, big) = if self.terms.len() <= other.terms.len() {
            (self, other)
        } else {
            (other, self)
        };
        if small.terms.len() == 1 {
            let (m, c) = &small.terms[0];
            return MultiPoly {
                terms: big
                    .terms
                    .iter()
                    .map(|(n, d)| (n.mul(m), Integer::from(c * d)))
                    .collect(),
            };
        }
        let mut map: HashMap<Mono, Integer> =
            HashMap::with_capacity(small.terms.len() * big.terms.len() / 2 + 1);
        for (m1, c1) in &small.terms {
            for (m2, c2) in &big.terms {
                let e = map.entry(m1.mul(m2)).or_default();
                *e += c1 * c2;
            }
        }
        MultiPoly::from_map(map)
    }

    pub fn square(&self) -> MultiPoly {
        self.mul(self)
    }

    pub fn pow(&self, e: u32) -> MultiPoly {
        let mut result = MultiPoly::one();
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.square();
            }
        }
        result
    }

    /// Exact division; `None` when `d` does not divide `self` in `Z[vars]`.
    pub fn div_exact(&self, d: &MultiPoly) -> Option<MultiPoly> {
        assert!(!d.is_zero(), "division by zero polynomial");
        if self.is_zero() {
            return Some(MultiPoly::zero());
        }
        if d.is_constant() {
            let k = &d.terms[0].1;
            if self.terms.iter().all(|(_, c)| c.is_divisible(k)) {
                return Some(self.div_integer(k));
            }
            return None;
        }
        let (dm, dc) = &d.terms[0];
        // quick rejection on degrees
        for v in Var::all() {
            if d.degree(v) > self.degree(v) {
                return None;
            }
        }
        let mut rem: BTreeMap<Mono, Integer> = self.terms.iter().cloned().collect();
        let mut quot = Vec::new();
        while let Some((m, c)) = rem.pop_last() {
            let qm = m.div(dm)?;
            if !c.is_divisible(dc) {
                return None;
            }
            let qc = Integer::from(c.div_exact_ref(dc));
            for (n, e) in &d.terms[1..] {
                let key = n.mul(&qm);
                let entry = rem.entry(key).or_default();
                *entry -= &qc * e;
                if entry.cmp0().is_eq() {
                    rem.remove(&key);
                }
            }
            quot.push((qm, qc));
        }
        Some(MultiPoly { terms: quot })
    }

    /// Partial derivative.
    pub fn diff(&self, v: Var) -> MultiPoly {
        let terms = self
            .terms
            .iter()
            .filter(|(m, _)| m.exp(v) > 0)
            .map(|(m, c)| {
                let e = m.exp(v);
                (m.with_exp(v, e - 1), Integer::from(c * e))
            })
            .collect();
        MultiPoly { terms }
    }

    /// Coefficients with respect to `v`, indexed by degree.
    pub fn coeffs_in(&self, v: Var) -> Vec<MultiPoly> {
        let d = self.degree(v) as usize;
        let mut out: Vec<Vec<(Mono, Integer)>> = vec![Vec::new(); d + 1];
        for (m, c) in &self.terms {
            let e = m.exp(v) as usize;
            out[e].push((m.with_exp(v, 0), c.clone()));
        }
        // lex order is preserved within each slice once `v` is cleared
        out.into_iter()
            .map(|mut t| {
                t.sort_unstable_by_key(|a| std::cmp::Reverse(a.0));
                MultiPoly { terms: t }
            })
            .collect()
    }

    /// Leading coefficient with respect to `v`.
    pub fn lc_in(&self, v: Var) -> MultiPoly {
        let d = self.degree(v);
        let mut t: Vec<(Mono, Integer)> = self
            .terms
            .iter()
            .filter(|(m, _)| m.exp(v) as u32 == d)
            .map(|(m, c)| (m.with_exp(v, 0), c.clone()))
            .collect();
        t.sort_unstable_by_key(|a| std::cmp::Reverse(a.0));
        MultiPoly { terms: t }
    }

    /// Substitutes an integer for `v`.
    pub fn eval_integer(&self, v: Var, x: &Integer) -> MultiPoly {
        if !self.has_var(v) {
            return self.clone();
        }
        let d = self.degree(v) as usize;
        let mut pows = Vec::with_capacity(d + 1);
        pows.push(Integer::from(1));
        for i in 1..=d {
            pows.push(Integer::from(&pows[i - 1] * x));
        }
        MultiPoly::from_terms(self.terms.iter().map(|(m, c)| {
            (
                m.with_exp(v, 0),
                Integer::from(c * &pows[m.exp(v) as usize]),
            )
        }))
    }

    /// Substitutes `p/q` for `v` and clears the denominator: returns `q^deg_v * self(p/q)`.
    pub fn eval_rational_cleared(&self, v: Var, r: &Rational) -> MultiPoly {
        if !self.has_var(v) {
            return self.clone();
        }
        let d = self.degree(v) as usize;
        let (p, q) = (r.numer(), r.denom());
        let mut pp = Vec::with_capacity(d + 1);
        let mut qp = Vec::with_capacity(d + 1);
        pp.push(Integer::from(1));
        qp.push(Integer::from(1));
        for i in 1..=d {
            pp.push(Integer::from(&pp[i - 1] * p));
            qp.push(Integer::from(&qp[i - 1] * q));
        }
        MultiPoly::from_terms(self.terms.iter().map(|(m, c)| {
            let e = m.exp(v) as usize;
            (m.with_exp(v, 0), Integer::from(c * &pp[e]) * &qp[d - e])
        }))
    }

    /// Evaluates at a full rational point (missing variables are treated as zero).
    pub fn eval_all(&self, point: &[(Var, Rational)]) -> Rational {
        let mut vals: [Option<&Rational>; NVARS] = [None; NVARS];
        for (v, r) in point {
            vals[v.index()] = Some(r);
        }
        let mut acc = Rational::new();
        for (m, c) in &self.terms {
            let mut t = Rational::from(c);
            for v in Var::all() {
                let e = m.exp(v);
                if e > 0 {
                    match vals[v.index()] {
                        Some(x) => t *= Rational::from(x.pow(e as u32)),
                        None => {
                            t = Rational::new();
                            break;
                        }
                    }
                }
            }
            acc += t;
        }
        acc
    }

    /// Floating-point evaluation.
    pub fn eval_f64(&self, point: &[(Var, f64)]) -> f64 {
        let mut vals = [0.0f64; NVARS];
        for (v, x) in point {
            vals[v.index()] = *x;
        }
        self.terms
            .iter()
            .map(|(m, c)| {
                let mut t = c.to_f64();
                for v in Var::all() {
                    let e = m.exp(v);
                    if e > 0 {
                        t *= vals[v.index()].powi(e as i32);
                    }
                }
                t
            })
            .sum()
    }

    /// Substitutes a polynomial for `v`.
    pub fn compose(&self, v: Var, q: &MultiPoly) -> MultiPoly {
        if !self.has_var(v) {
            return self.clone();
        }
        let coeffs = self.coeffs_in(v);
        // Horner
        let mut acc = MultiPoly::zero();
        for c in coeffs.iter().rev() {
            acc = acc.mul(q).add(c);
        }
        acc
    }

    /// Renames variable `from` to `to` (`to` must not occur).
    pub fn rename(&self, from: Var, to: Var) -> MultiPoly {
        if from == to || !self.has_var(from) {
            return self.clone();
        }
        assert!(!self.has_var(to), "rename target already present");
        MultiPoly::from_terms(self.terms.iter().map(|(m, c)| {
            let e = m.exp(from);
            (m.with_exp(from, 0).with_exp(to, e), c.clone())
        }))
    }

    /// Dense coefficient vector when the polynomial involves only `v`.
    pub fn to_univariate(&self, v: Var) -> Option<Vec<Integer>> {
        if self.support() & !(1u16 << v.index()) != 0 {
            return None;
        }
        let d = self.degree(v) as usize;
        let mut out = vec![Integer::new(); if self.is_zero() { 0 } else { d + 1 }];
        for (m, c) in &self.terms {
            out[m.exp(v) as usize] = c.clone();
        }
        Some(out)
    }

    /// Sign normalization: leading coefficient positive.
    pub fn make_lc_positive(&self) -> MultiPoly {
        if self
            .terms
            .first()
            .map(|t| t.1.cmp0().is_lt())
            .unwrap_or(false)
        {
            self.neg()
        } else {
            self.clone()
        }
    }

    pub fn from_i64_terms(terms: &[(i64, &[(Var, u16)])]) -> MultiPoly {
        MultiPoly::from_terms(terms.iter().map(|(c, vs)| {
            let mut m = Mono::ONE;
            for (v, e) in vs.iter() {
                m = m.with_exp(*v, m.exp(*v) + e);
            }
            (m, Integer::from(*c))
        }))
    }
}

/// Convenience constructor for tests and fixed formulas.
pub fn pvar(v: Var) -> MultiPoly {
    MultiPoly::var(v)
}

pub fn pconst(c: i64) -> MultiPoly {
    MultiPoly::constant(Integer::from(c))
}

impl fmt::Debug for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, (m, c)) in self.terms.iter().enumerate() {
            let neg = c.cmp0().is_lt();
            let abs = Integer::from(c.abs_ref());
            if i == 0 {
                if neg {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if neg { " - " } else { " + " })?;
            }
            if m.is_one() {
                write!(f, "{abs}")?;
            } else if abs == 1 {
                write!(f, "{m:?}")?;
            } else {
                write!(f, "{abs}*{m:?}")?;
            }
        }
        Ok(())
    }
}

impl std::ops::Add for &MultiPoly {
    type Output = MultiPoly;
    fn add(self, rhs: &MultiPoly) -> MultiPoly {
        MultiPoly::add(self, rhs)
    }
}

impl std::ops::Sub for &MultiPoly {
    type Output = MultiPoly;
    fn sub(self, rhs: &MultiPoly) -> MultiPoly {
        MultiPoly::sub(self, rhs)
    }
}

impl std::ops::Mul for &MultiPoly {
    type Output = MultiPoly;
    fn mul(self, rhs: &MultiPoly) -> MultiPoly {
        MultiPoly::mul(self, rhs)
    }
}

impl std::ops::Neg for &MultiPoly {
    type Output = MultiPoly;
    fn neg(self) -> MultiPoly {
        MultiPoly::neg(self)
    }
}
