//! Polynomial gcd over `Z[vars]`.
//!
//! The fast path is the heuristic gcd (evaluate one variable at a large integer, recurse,
//! rebuild the candidate from its balanced base-x digits, confirm by trial division). When
//! six evaluation points fail, a primitive pseudo-remainder sequence takes over.

use rug::Integer;

use super::poly::MultiPoly;
use super::var::{Mono, Var};

/// Gcd with positive leading coefficient. `gcd(0, 0) = 0`.
pub fn gcd(f: &MultiPoly, g: &MultiPoly) -> MultiPoly {
    if f.is_zero() {
        return g.make_lc_positive();
    }
    if g.is_zero() {
        return f.make_lc_positive();
    }
    let cf = f.content();
    let cg = g.content();
    let c = Integer::from(cf.gcd_ref(&cg));
    if f.is_constant() || g.is_constant() {
        return MultiPoly::constant(c);
    }
    let fp = f.div_integer(&cf);
    let gp = g.div_integer(&cg);
    let h = gcd_primitive(&fp, &gp);
    h.scale(&c).make_lc_positive()
}

pub fn gcd_list<'a>(polys: impl IntoIterator<Item = &'a MultiPoly>) -> MultiPoly {
    let mut acc = MultiPoly::zero();
    for p in polys {
        acc = gcd(&acc, p);
        if acc.is_constant() && !acc.is_zero() {
            return MultiPoly::one();
        }
    }
    acc
}

/// Gcd of the coefficients of `f` with respect to `v` (a polynomial free of `v`).
pub fn content_in(f: &MultiPoly, v: Var) -> MultiPoly {
    if !f.has_var(v) {
        return f.make_lc_positive();
    }
    let mut cs = f.coeffs_in(v);
    cs.retain(|c| !c.is_zero());
    cs.sort_by_key(|c| c.len());
    gcd_list(cs.iter())
}

/// `f` divided by its content with respect to `v`.
pub fn primitive_in(f: &MultiPoly, v: Var) -> MultiPoly {
    if f.is_zero() {
        return MultiPoly::zero();
    }
    let c = content_in(f, v);
    f.div_exact(&c).expect("content divides").make_lc_positive()
}

/// Inputs have unit integer content and are non-constant.
fn gcd_primitive(f: &MultiPoly, g: &MultiPoly) -> MultiPoly {
    let sf = f.support();
    let sg = g.support();
    // A variable present in only one operand cannot occur in the gcd.
    for v in Var::all() {
        let bit = 1u16 << v.index();
        if sf & bit != 0 && sg & bit == 0 {
            let c = content_in(f, v);
            return gcd(&c, g);
        }
        if sg & bit != 0 && sf & bit == 0 {
            let c = content_in(g, v);
            return gcd(f, &c);
        }
    }
    if f == g {
        return f.make_lc_positive();
    }
    if let Some(h) = heuristic_gcd(f, g) {
        return h;
    }
    gcd_prs(f, g)
}

fn max_norm(f: &MultiPoly) -> Integer {
    f.terms()
        .iter()
        .map(|(_, c)| Integer::from(c.abs_ref()))
        .max()
        .unwrap_or_default()
}

fn heuristic_gcd(f: &MultiPoly, g: &MultiPoly) -> Option<MultiPoly> {
    let support = f.support() | g.support();
    let v = Var::all().find(|v| support & (1 << v.index()) != 0)?;
    let nf = max_norm(f);
    let ng = max_norm(g);
    let b: Integer = Integer::from(2) * nf.clone().min(ng.clone()) + 29u32;
    let lf = Integer::from(f.leading_coeff().abs_ref());
    let lg = Integer::from(g.leading_coeff().abs_ref());
    let r1 = Integer::from(&nf / &lf);
    let r2 = Integer::from(&ng / &lg);
    let bound = Integer::from(b.sqrt_ref()) * 99u32;
    let mut x = b.min(bound).max(Integer::from(2) * r1.min(r2) + 2);
    for _ in 0..6 {
        let ff = f.eval_integer(v, &x);
        let gg = g.eval_integer(v, &x);
        if !ff.is_zero() && !gg.is_zero() {
            let h = gcd(&ff, &gg);
            let hi = interpolate(&h, &x, v).primitive();
            if !hi.is_zero() && f.div_exact(&hi).is_some() && g.div_exact(&hi).is_some() {
                return Some(hi);
            }
            if let Some(cff) = ff.div_exact(&h) {
                let ci = interpolate(&cff, &x, v);
                if !ci.is_zero() {
                    if let Some(hh) = f.div_exact(&ci) {
                        if !hh.is_zero() && g.div_exact(&hh).is_some() {
                            return Some(hh.primitive());
                        }
                    }
                }
            }
            if let Some(cfg) = gg.div_exact(&h) {
                let ci = interpolate(&cfg, &x, v);
                if !ci.is_zero() {
                    if let Some(hh) = g.div_exact(&ci) {
                        if !hh.is_zero() && f.div_exact(&hh).is_some() {
                            return Some(hh.primitive());
                        }
                    }
                }
            }
        }
        let r = Integer::from(x.sqrt_ref()).sqrt();
        x = x * r * 73794u32 / 27011u32;
    }
    None
}

/// Rebuilds a polynomial in `v` from the balanced base-`x` digits of each coefficient.
fn interpolate(h: &MultiPoly, x: &Integer, v: Var) -> MultiPoly {
    let half = Integer::from(x >> 1);
    let mut terms = Vec::new();
    for (m, c) in h.terms() {
        let mut c = c.clone();
        let mut i: u16 = 0;
        while c.cmp0() != std::cmp::Ordering::Equal {
            let mut d = Integer::from(&c % x);
            if d.cmp0().is_lt() {
                d += x;
            }
            if d > half {
                d -= x;
            }
            c -= &d;
            c.div_exact_mut(x);
            if d.cmp0() != std::cmp::Ordering::Equal {
                terms.push((m.with_exp(v, i), d));
            }
            i += 1;
        }
    }
    MultiPoly::from_terms(terms)
}

/// Pseudo-remainder `lc(b)^(deg a - deg b + 1) * a mod b` with respect to `v`.
pub fn prem(a: &MultiPoly, b: &MultiPoly, v: Var) -> MultiPoly {
    let db = b.degree(v);
    let da = a.degree(v);
    if a.is_zero() || da < db {
        return a.clone();
    }
    let lb = b.lc_in(v);
    let mut r = a.clone();
    let mut steps = da - db + 1;
    while !r.is_zero() && r.degree(v) >= db {
        let e = r.degree(v) - db;
        let lr = r.lc_in(v);
        r = r.mul(&lb).sub(&lr.mul_mono(&Mono::var(v, e as u16)).mul(b));
        steps -= 1;
    }
    if steps > 0 {
        r = r.mul(&lb.pow(steps));
    }
    r
}

/// Primitive pseudo-remainder sequence gcd.
pub fn gcd_prs(f: &MultiPoly, g: &MultiPoly) -> MultiPoly {
    let support = f.support() | g.support();
    let Some(v) = Var::all().find(|v| support & (1 << v.index()) != 0) else {
        return MultiPoly::constant(Integer::from(f.content().gcd_ref(&g.content())));
    };
    if !f.has_var(v) {
        return gcd(f, &content_in(g, v));
    }
    if !g.has_var(v) {
        return gcd(&content_in(f, v), g);
    }
    let cf = content_in(f, v);
    let cg = content_in(g, v);
    let c = gcd(&cf, &cg);
    let mut a = f.div_exact(&cf).expect("content");
    let mut b = g.div_exact(&cg).expect("content");
    if a.degree(v) < b.degree(v) {
        std::mem::swap(&mut a, &mut b);
    }
    loop {
        let r = prem(&a, &b, v);
        if r.is_zero() {
            break;
        }
        if r.degree(v) == 0 {
            b = MultiPoly::one();
            break;
        }
        a = b;
        b = primitive_in(&r, v);
    }
    let b = primitive_in(&b, v);
    b.mul(&c).make_lc_positive()
}

/// Squarefree part (product of the distinct irreducible factors), primitive, lc positive.
pub fn squarefree_part(f: &MultiPoly) -> MultiPoly {
    if f.is_zero() {
        return MultiPoly::zero();
    }
    let f = f.primitive();
    let Some(v) = f.vars().into_iter().next() else {
        return MultiPoly::one();
    };
    let c = content_in(&f, v);
    let p = f.div_exact(&c).expect("content");
    let g = gcd(&p, &p.diff(v));
    let ps = p.div_exact(&g).expect("gcd divides");
    ps.mul(&squarefree_part(&c)).primitive()
}

/// Removes from `f` every factor it shares with `g` (saturation by repeated gcd).
pub fn remove_common(f: &MultiPoly, g: &MultiPoly) -> MultiPoly {
    let mut f = f.clone();
    loop {
        let h = gcd(&f, g);
        if h.is_constant() {
            return f;
        }
        f = f.div_exact(&h).expect("gcd divides");
    }
}
