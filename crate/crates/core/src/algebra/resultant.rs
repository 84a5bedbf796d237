//! Resultants by the subresultant pseudo-remainder sequence, and by evaluation and
//! interpolation for inputs in one eliminated and two surviving variables.

use rug::{Integer, Rational};
use thiserror::Error;

use super::gcd::prem;
use super::poly::MultiPoly;
use super::var::{Mono, Var};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ResultantError {
    #[error("resultant input is constant in {0}")]
    DegenerateDegree(Var),
}

/// `Res_v(p, q)`; both inputs must have positive degree in `v`.
pub fn resultant(p: &MultiPoly, q: &MultiPoly, v: Var) -> Result<MultiPoly, ResultantError> {
    if p.degree(v) == 0 || q.degree(v) == 0 {
        return Err(ResultantError::DegenerateDegree(v));
    }
    Ok(resultant_any(p, q, v))
}

/// Resultant that also accepts inputs of degree zero in `v`
/// (`Res(a, q) = a^deg q` for a constant `a`).
pub fn resultant_any(p: &MultiPoly, q: &MultiPoly, v: Var) -> MultiPoly {
    if p.is_zero() || q.is_zero() {
        return MultiPoly::zero();
    }
    let (dp, dq) = (p.degree(v), q.degree(v));
    if dp == 0 {
        return p.pow(dq);
    }
    if dq == 0 {
        return q.pow(dp);
    }
    let (mut a, mut b) = (p.clone(), q.clone());
    let mut s_neg = false;
    if dp < dq {
        std::mem::swap(&mut a, &mut b);
        if dp % 2 == 1 && dq % 2 == 1 {
            s_neg = true;
        }
    }
    let mut g = MultiPoly::one();
    let mut h = MultiPoly::one();
    loop {
        let (da, db) = (a.degree(v), b.degree(v));
        let delta = da - db;
        if da % 2 == 1 && db % 2 == 1 {
            s_neg = !s_neg;
        }
        let r = prem(&a, &b, v);
        if r.is_zero() {
            return MultiPoly::zero();
        }
        a = b;
        let divisor = g.mul(&h.pow(delta));
        b = r
            .div_exact(&divisor)
            .expect("subresultant division is exact");
        g = a.lc_in(v);
        // h <- g^delta / h^(delta - 1)
        if delta > 0 {
            h = g.pow(delta).div_exact(&h.pow(delta - 1)).expect("exact");
        }
        if b.degree(v) == 0 {
            break;
        }
    }
    let da = a.degree(v);
    let res = b.pow(da).div_exact(&h.pow(da - 1)).expect("exact");
    if s_neg {
        res.neg()
    } else {
        res
    }
}

/// Discriminant-free helper: resultant of `p` and its derivative in `v`.
pub fn resultant_with_derivative(p: &MultiPoly, v: Var) -> MultiPoly {
    resultant_any(p, &p.diff(v), v)
}

/// Formal resultant `Res_{m,n}(p, q)` of univariate integer polynomials whose actual degrees
/// may have dropped below the formal ones `m`, `n`.
fn formal_resultant(p: &MultiPoly, q: &MultiPoly, v: Var, m: u32, n: u32) -> MultiPoly {
    let (m1, n1) = (p.degree(v), q.degree(v));
    if (p.is_zero() || m1 < m) && (q.is_zero() || n1 < n) {
        return MultiPoly::zero();
    }
    if p.is_zero() || q.is_zero() {
        return MultiPoly::zero();
    }
    let base = resultant_any(p, q, v);
    if m1 < m {
        // expand the Sylvester determinant along its leading zero columns
        let mut f = q.lc_in(v).pow(m - m1);
        if (n * (m - m1)) % 2 == 1 {
            f = f.neg();
        }
        return base.mul(&f);
    }
    if n1 < n {
        return base.mul(&p.lc_in(v).pow(n - n1));
    }
    base
}

/// Newton interpolation through `(xs[i], ys[i])`; returns monomial coefficients.
fn interpolate_dense(xs: &[Integer], ys: &[Rational]) -> Vec<Rational> {
    let n = xs.len();
    let mut dd: Vec<Rational> = ys.to_vec();
    for k in 1..n {
        for i in (k..n).rev() {
            let num = Rational::from(&dd[i] - &dd[i - 1]);
            let den = Integer::from(&xs[i] - &xs[i - k]);
            dd[i] = num / den;
        }
    }
    // Horner on the Newton form
    let mut coeffs = vec![Rational::new(); n];
    for i in (0..n).rev() {
        // coeffs <- coeffs * (x - xs[i]) + dd[i]
        let mut next = vec![Rational::new(); n];
        for j in 0..n {
            if coeffs[j].cmp0().is_ne() {
                if j + 1 < n {
                    next[j + 1] += &coeffs[j];
                }
                next[j] -= Rational::from(&coeffs[j] * &xs[i]);
            }
        }
        next[0] += &dd[i];
        coeffs = next;
    }
    coeffs
}

/// `Res_v(p, q)` for `p`, `q` in `v`, `x` and `y` only, computed from integer specializations
/// of `x` and `y` on a grid sized by the a priori degree bounds.
pub fn resultant_interpolated(p: &MultiPoly, q: &MultiPoly, v: Var, x: Var, y: Var) -> MultiPoly {
    let allowed = (1u16 << v.index()) | (1u16 << x.index()) | (1u16 << y.index());
    assert!(
        p.support() & !allowed == 0 && q.support() & !allowed == 0,
        "unexpected variables"
    );
    if p.is_zero() || q.is_zero() {
        return MultiPoly::zero();
    }
    let (m, n) = (p.degree(v), q.degree(v));
    if m == 0 || n == 0 {
        return resultant_any(p, q, v);
    }
    let bx = (n * p.degree(x) + m * q.degree(x)) as usize;
    let by = (n * p.degree(y) + m * q.degree(y)) as usize;
    let xs: Vec<Integer> = (0..=bx as i64)
        .map(|i| Integer::from(i - (bx as i64) / 2))
        .collect();
    let ys: Vec<Integer> = (0..=by as i64)
        .map(|i| Integer::from(i - (by as i64) / 2))
        .collect();
    // for each x value, interpolate in y
    let rows: Vec<Vec<Rational>> = std::thread::scope(|scope| {
        let handles: Vec<_> = xs
            .iter()
            .map(|xv| {
                let ys = &ys;
                scope.spawn(move || {
                    let (px, qx) = (p.eval_integer(x, xv), q.eval_integer(x, xv));
                    let vals: Vec<Rational> = ys
                        .iter()
                        .map(|yv| {
                            let r = formal_resultant(
                                &px.eval_integer(y, yv),
                                &qx.eval_integer(y, yv),
                                v,
                                m,
                                n,
                            );
                            Rational::from(
                                r.constant_value()
                                    .expect("specialized resultant is constant"),
                            )
                        })
                        .collect();
                    interpolate_dense(ys, &vals)
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("worker"))
            .collect()
    });
    let mut terms = Vec::new();
    for j in 0..=by {
        let col: Vec<Rational> = rows.iter().map(|r| r[j].clone()).collect();
        for (i, c) in interpolate_dense(&xs, &col).into_iter().enumerate() {
            if c.cmp0().is_ne() {
                let (num, den) = c.into_numer_denom();
                assert!(den == 1, "resultant coefficients are integers");
                terms.push((Mono::var(x, i as u16).mul(&Mono::var(y, j as u16)), num));
            }
        }
    }
    MultiPoly::from_terms(terms)
}
