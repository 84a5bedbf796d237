//! Real root isolation for univariate integer polynomials (Descartes bisection).

use std::cmp::Ordering;

use rug::ops::Pow;
use rug::{Integer, Rational};
use serde::{Deserialize, Serialize};

use super::gcd::squarefree_part;
use super::poly::MultiPoly;
use super::var::Var;

/// Closed rational interval; `lo == hi` marks an exactly known value.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Interval {
    #[serde(with = "crate::algebra::ser::rational")]
    pub lo: Rational,
    #[serde(with = "crate::algebra::ser::rational")]
    pub hi: Rational,
}

impl Interval {
    pub fn exact(r: Rational) -> Interval {
        Interval {
            lo: r.clone(),
            hi: r,
        }
    }

    pub fn is_exact(&self) -> bool {
        self.lo == self.hi
    }

    pub fn exact_value(&self) -> Option<&Rational> {
        self.is_exact().then_some(&self.lo)
    }

    pub fn width(&self) -> Rational {
        Rational::from(&self.hi - &self.lo)
    }

    pub fn midpoint(&self) -> Rational {
        Rational::from(&self.lo + &self.hi) / 2
    }

    pub fn to_f64(&self) -> f64 {
        self.midpoint().to_f64()
    }
}

/// One isolated real solution: an interval per unknown, each containing exactly one root of
/// its defining squarefree polynomial.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IsolatingBox {
    pub coords: Vec<Interval>,
    #[serde(with = "crate::algebra::ser::rational")]
    pub width_bound: Rational,
}

impl IsolatingBox {
    pub fn is_exact(&self) -> bool {
        self.coords.iter().all(Interval::is_exact)
    }

    pub fn exact_point(&self) -> Option<Vec<Rational>> {
        self.coords
            .iter()
            .map(|c| c.exact_value().cloned())
            .collect()
    }
}

/// Dense coefficients, lowest degree first, no trailing zeros.
pub type UPoly = Vec<Integer>;

pub fn trim(p: &mut UPoly) {
    while p.last().map(|c| c.cmp0().is_eq()).unwrap_or(false) {
        p.pop();
    }
}

fn degree(p: &[Integer]) -> usize {
    p.len().saturating_sub(1)
}

/// Sign of `p(r)` computed exactly.
pub fn sign_at(p: &[Integer], r: &Rational) -> Ordering {
    if p.is_empty() {
        return Ordering::Equal;
    }
    let n = p.len() - 1;
    let (num, den) = (r.numer(), r.denom());
    // den^n * p(num/den) = sum a_i num^i den^(n-i), den > 0
    let mut acc = Integer::new();
    let mut npow = Integer::from(1);
    let mut dpows = Vec::with_capacity(n + 1);
    dpows.push(Integer::from(1));
    for i in 1..=n {
        dpows.push(Integer::from(&dpows[i - 1] * den));
    }
    for (i, a) in p.iter().enumerate() {
        if !a.cmp0().is_eq() {
            acc += Integer::from(a * &npow) * &dpows[n - i];
        }
        npow *= num;
    }
    acc.cmp0()
}

pub fn eval_rational(p: &[Integer], r: &Rational) -> Rational {
    let mut acc = Rational::new();
    for a in p.iter().rev() {
        acc *= r;
        acc += a;
    }
    acc
}

fn taylor_shift1(p: &mut UPoly) {
    let n = p.len();
    for i in 0..n {
        for j in (i..n - 1).rev() {
            let t = p[j + 1].clone();
            p[j] += t;
        }
    }
}

fn sign_variations(p: &[Integer]) -> usize {
    let mut last = Ordering::Equal;
    let mut count = 0;
    for c in p {
        let s = c.cmp0();
        if s.is_eq() {
            continue;
        }
        if !last.is_eq() && s != last {
            count += 1;
        }
        last = s;
    }
    count
}

/// Descartes bound for roots of `q` in the open unit interval.
fn descartes_01(q: &[Integer]) -> usize {
    let mut r: UPoly = q.iter().rev().cloned().collect();
    taylor_shift1(&mut r);
    sign_variations(&r)
}

fn root_bound_log2(p: &[Integer]) -> u32 {
    let n = degree(p);
    let lc_bits = p[n].significant_bits();
    let max_bits = p[..n]
        .iter()
        .map(|c| c.significant_bits())
        .max()
        .unwrap_or(0);
    (max_bits as i64 - lc_bits as i64 + 2).max(1) as u32
}

/// Isolates positive roots of a squarefree polynomial with nonzero constant term.
fn isolate_positive(p: &[Integer], out: &mut Vec<Interval>) {
    let n = degree(p);
    if n == 0 {
        return;
    }
    let k = root_bound_log2(p);
    let bound = Integer::from(1) << k;
    // q(x) = p(bound * x)
    let mut q: UPoly = Vec::with_capacity(n + 1);
    let mut bp = Integer::from(1);
    for a in p {
        q.push(Integer::from(a * &bp));
        bp *= &bound;
    }
    let scale = Rational::from(bound);
    // (poly on unit interval, numerator c, level j) for the interval (c/2^j, (c+1)/2^j)
    let mut stack: Vec<(UPoly, Integer, u32)> = vec![(q, Integer::new(), 0)];
    let mut found = Vec::new();
    while let Some((mut q, c, j)) = stack.pop() {
        let denom = Rational::from(Integer::from(1) << j);
        if q[0].cmp0().is_eq() {
            let r = Rational::from(c.clone()) / &denom * &scale;
            found.push(Interval::exact(r));
            q.remove(0);
            trim(&mut q);
        }
        if q.len() <= 1 {
            continue;
        }
        match descartes_01(&q) {
            0 => {}
            1 => {
                let lo = Rational::from(c.clone()) / &denom * &scale;
                let hi = Rational::from(Integer::from(&c + 1u32)) / &denom * &scale;
                found.push(Interval { lo, hi });
            }
            _ => {
                let m = q.len() - 1;
                let left: UPoly = q
                    .iter()
                    .enumerate()
                    .map(|(i, a)| Integer::from(a << (m - i) as u32))
                    .collect();
                let mut right = left.clone();
                taylor_shift1(&mut right);
                let c2 = Integer::from(&c * 2u32);
                stack.push((right, Integer::from(&c2 + 1u32), j + 1));
                stack.push((left, c2, j + 1));
            }
        }
    }
    out.extend(found);
}

fn primitive_squarefree(p: &[Integer]) -> UPoly {
    let mp = MultiPoly::from_coeffs(Var::T, p);
    let s = squarefree_part(&mp);
    let mut out = s.to_univariate(Var::T).expect("univariate");
    trim(&mut out);
    out
}

/// Real roots of `p` in increasing order, as exact values where rational roots were
/// recognised, else as open isolating intervals.
pub fn isolate(p: &[Integer]) -> Vec<Interval> {
    let mut p: UPoly = p.to_vec();
    trim(&mut p);
    assert!(!p.is_empty(), "isolate_real_roots: zero polynomial");
    if p.len() == 1 {
        return Vec::new();
    }
    let mut q = primitive_squarefree(&p);
    let mut roots = Vec::new();
    if q[0].cmp0().is_eq() {
        roots.push(Interval::exact(Rational::new()));
        q.remove(0);
    }
    isolate_positive(&q, &mut roots);
    let neg: UPoly = q
        .iter()
        .enumerate()
        .map(|(i, a)| {
            if i % 2 == 1 {
                Integer::from(-a)
            } else {
                a.clone()
            }
        })
        .collect();
    let mut negs = Vec::new();
    isolate_positive(&neg, &mut negs);
    for iv in negs {
        roots.push(Interval {
            lo: Rational::from(-&iv.hi),
            hi: Rational::from(-&iv.lo),
        });
    }
    let mut out: Vec<Interval> = roots
        .into_iter()
        .map(|iv| {
            if iv.is_exact() {
                iv
            } else {
                recognise_rational(&q, iv)
            }
        })
        .collect();
    out.sort_by(|a, b| a.lo.cmp(&b.lo));
    out
}

/// Public wrapper matching the isolating-box vocabulary.
pub fn isolate_real_roots(p: &[Integer]) -> Vec<IsolatingBox> {
    isolate(p)
        .into_iter()
        .map(|iv| {
            let w = iv.width();
            IsolatingBox {
                coords: vec![iv],
                width_bound: w,
            }
        })
        .collect()
}

/// Bisects until `width < target`. `p` must be squarefree with one root in the open interval.
pub fn refine(p: &[Integer], iv: &Interval, target: &Rational) -> Interval {
    let mut iv = iv.clone();
    if iv.is_exact() {
        return iv;
    }
    // sign just right of `lo`; an endpoint may itself be a (simple) root found by a neighbour
    let mut slo = sign_at(p, &iv.lo);
    if slo.is_eq() {
        let dp: UPoly = p
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, a)| Integer::from(a * i as u32))
            .collect();
        slo = sign_at(&dp, &iv.lo);
    }
    while iv.width() >= *target {
        let m = iv.midpoint();
        let sm = sign_at(p, &m);
        if sm.is_eq() {
            return Interval::exact(m);
        }
        if sm == slo {
            iv.lo = m;
            slo = sm;
        } else {
            iv.hi = m;
        }
    }
    iv
}

/// Turns an isolating interval into an exact value when the enclosed root is rational.
/// A rational root `a/b` of a primitive integer polynomial has `b | lc`, so `lc * root` is an
/// integer; once the interval is narrower than `1/|lc|` at most one candidate remains.
fn recognise_rational(p: &[Integer], iv: Interval) -> Interval {
    let lc = Integer::from(p[p.len() - 1].abs_ref());
    let target = Rational::from((Integer::from(1), Integer::from(&lc * 2u32)));
    let iv = refine(p, &iv, &target);
    if iv.is_exact() {
        return iv;
    }
    let lo = Rational::from(&iv.lo * &lc);
    let hi = Rational::from(&iv.hi * &lc);
    let m = Integer::from(lo.ceil_ref());
    if m.clone() <= hi {
        let cand = Rational::from((m, lc));
        if sign_at(p, &cand).is_eq() {
            return Interval::exact(cand);
        }
    }
    iv
}

/// Distinct rational roots of `p`.
pub fn rational_roots(p: &[Integer]) -> Vec<Rational> {
    isolate(p)
        .into_iter()
        .filter_map(|iv| iv.exact_value().cloned())
        .collect()
}

/// Number of distinct real roots of `p`.
pub fn count_real_roots(p: &[Integer]) -> usize {
    isolate(p).len()
}

/// Floating approximation of each real root.
pub fn approx_roots(p: &[Integer], digits: u32) -> Vec<f64> {
    let mut q = p.to_vec();
    trim(&mut q);
    let sq = primitive_squarefree(&q);
    let target = Rational::from((Integer::from(1), Integer::from(10).pow(digits)));
    isolate(&q)
        .iter()
        .map(|iv| refine(&sq, iv, &target).to_f64())
        .collect()
}
