//! Nested finite differences for the invariants.
//!
//! The oracle never touches the jet formulas: it works with the equi-affine arc length
//! `d sigma = (x'y'' - x''y')^(1/3) dt` and `mu = det(C_sigma_sigma, C_sigma_sigma_sigma)`,
//! differentiating numerically with dyadic steps so every sample of the curve is exact.
//! Arithmetic is fixed point on big integers with `PREC` fractional bits.

use std::rc::Rc;

use super::rng;
use curveproj::algebra::rf::RationalFunction;
use curveproj::curves::{parse_planar, PlanarCurve};
use curveproj::invariants::{invariants, GroupTag};
use rand::Rng;
use rug::{Integer, Rational};

pub const REL_TOL: f64 = 1e-6;
/// Values below this are compared absolutely.
pub const ABS_FLOOR: f64 = 1e-12;
const PREC: u32 = 3000;
const STEP_BITS: u32 = 100;

/// Fixed-point number `n / 2^PREC`.
#[derive(Clone, Debug)]
pub struct Fx(Integer);

impl Fx {
    fn from_rational(r: &Rational) -> Fx {
        Fx(Integer::from(r.numer() << PREC) / r.denom())
    }
    fn int(k: i64) -> Fx {
        Fx(Integer::from(k) << PREC)
    }
    fn sub(&self, o: &Fx) -> Fx {
        Fx(Integer::from(&self.0 - &o.0))
    }
    fn mul(&self, o: &Fx) -> Fx {
        Fx(Integer::from(&self.0 * &o.0) >> PREC)
    }
    fn div(&self, o: &Fx) -> Fx {
        Fx(Integer::from(&self.0 << PREC) / &o.0)
    }
    fn powi(&self, e: u32) -> Fx {
        (1..e).fold(self.clone(), |acc, _| acc.mul(self))
    }
    /// Real cube root.
    fn cbrt(&self) -> Fx {
        let a = Integer::from(self.0.abs_ref()) << (2 * PREC);
        let r = a.root(3);
        Fx(if self.0 < 0 { -r } else { r })
    }
    pub fn to_f64(&self) -> f64 {
        Rational::from((self.0.clone(), Integer::from(1) << PREC)).to_f64()
    }
}

pub type Fun = Rc<dyn Fn(&Rational) -> Fx>;

pub struct Oracle {
    h: Rational,
    n: Fun,
    x: Fun,
    y: Fun,
}

impl Oracle {
    pub fn new(c: &PlanarCurve) -> Oracle {
        let h = Rational::from((1, 1)) >> STEP_BITS;
        let coord = |f: RationalFunction| -> Fun {
            Rc::new(move |t: &Rational| {
                Fx::from_rational(&f.eval_rational(t).expect("pole in stencil"))
            })
        };
        let (x, y) = (coord(c.x.clone()), coord(c.y.clone()));
        let (x1, y1) = (d_t(&x, &h), d_t(&y, &h));
        let (x2, y2) = (d_t(&x1, &h), d_t(&y1, &h));
        let n: Fun = Rc::new(move |t: &Rational| x1(t).mul(&y2(t)).sub(&x2(t).mul(&y1(t))));
        Oracle { h, n, x, y }
    }

    fn d_sigma(&self, g: &Fun) -> Fun {
        let dg = d_t(g, &self.h);
        let n = self.n.clone();
        Rc::new(move |t: &Rational| dg(t).div(&n(t).cbrt()))
    }

    /// `mu` and its first three derivatives in equi-affine arc length.
    pub fn mu_chain(&self) -> [Fun; 4] {
        let (x1, y1) = (self.d_sigma(&self.x), self.d_sigma(&self.y));
        let (x2, y2) = (self.d_sigma(&x1), self.d_sigma(&y1));
        let (x3, y3) = (self.d_sigma(&x2), self.d_sigma(&y2));
        let mu: Fun = Rc::new(move |t: &Rational| x2(t).mul(&y3(t)).sub(&x3(t).mul(&y2(t))));
        let mu1 = self.d_sigma(&mu);
        let mu2 = self.d_sigma(&mu1);
        let mu3 = self.d_sigma(&mu2);
        [mu, mu1, mu2, mu3]
    }

    fn pair(&self, group: GroupTag, t: &Rational) -> (f64, f64) {
        let [mu, mu1, mu2, mu3] = self.mu_chain();
        match group {
            GroupTag::EquiAffine => (mu(t).powi(3).to_f64(), mu1(t).to_f64()),
            GroupTag::Affine => {
                let (m, m1, m2) = (mu(t), mu1(t), mu2(t));
                let j = m1.powi(2).div(&m.powi(3));
                let k = m2.div(&m.powi(2).mul(&Fx::int(3)));
                (j.to_f64(), k.to_f64())
            }
            GroupTag::Projective => {
                let eta: Fun = Rc::new(move |t: &Rational| {
                    let (m, m1, m2, m3) = (mu(t), mu1(t), mu2(t), mu3(t));
                    let num = Fx::int(6)
                        .mul(&m3)
                        .mul(&m1)
                        .sub(&Fx::int(7).mul(&m2.powi(2)))
                        .sub(&Fx::int(9).mul(&m1.powi(2)).mul(&m));
                    num.div(&Fx::int(6).mul(&m1.cbrt().powi(8)))
                });
                let e = eta(t);
                let j = e.powi(3);
                let k = self.d_sigma(&eta)(t).div(&self.mu_chain()[1](t).cbrt());
                (j.to_f64(), k.to_f64())
            }
        }
    }
}

/// Central difference with step `h`.
fn d_t(g: &Fun, h: &Rational) -> Fun {
    let g = g.clone();
    let h = h.clone();
    let shift = STEP_BITS + 1;
    Rc::new(move |t: &Rational| {
        let a = g(&Rational::from(t + &h));
        let b = g(&Rational::from(t - &h));
        Fx(a.sub(&b).0 << shift)
    })
}

pub fn rel_error(got: f64, want: f64) -> f64 {
    let scale = got.abs().max(want.abs());
    if scale < ABS_FLOOR {
        return 0.0;
    }
    let e = (got - want).abs() / scale;
    if e.is_nan() {
        f64::INFINITY
    } else {
        e
    }
}

/// Ten random parameters `k/8` away from poles of the invariants and from inflections.
pub fn params(seed: u64, c: &PlanarCurve, group: GroupTag) -> Vec<Rational> {
    let pair = invariants(c, group).unwrap();
    let (x1, y1) = (c.x.diff(), c.y.diff());
    let n = x1.mul(&y1.diff()).sub(&x1.diff().mul(&y1));
    let mut r = rng(seed);
    let mut out = Vec::new();
    while out.len() < 10 {
        let t = Rational::from((r.gen_range(-20..=20), 8));
        let ok = [&pair.j, &pair.k].iter().all(|f| {
            RationalFunction::from_poly(f.den().clone())
                .eval_t_f64(t.to_f64())
                .abs()
                > 1e-3
        });
        if ok && n.eval_t_f64(t.to_f64()).abs() > 1e-3 && !out.contains(&t) {
            out.push(t);
        }
    }
    out
}

/// Largest relative error of the symbolic `J`, `K` against the oracle over ten parameters.
pub fn max_rel_error(text: &str, group: GroupTag, seed: u64) -> f64 {
    let c = parse_planar(text).unwrap();
    let pair = invariants(&c, group).unwrap();
    let oracle = Oracle::new(&c);
    let mut worst = 0f64;
    for t in params(seed, &c, group) {
        let (j, k) = oracle.pair(group, &t);
        let (sj, sk) = (pair.j.eval_t_f64(t.to_f64()), pair.k.eval_t_f64(t.to_f64()));
        worst = worst.max(rel_error(sj, j)).max(rel_error(sk, k));
    }
    worst
}
