//! Real solutions of small polynomial systems by gcd splitting and resultant projection.
//!
//! The unknowns are projected away one at a time (last unknown first). Every stage first
//! splits off the common factor of the system, which captures hypersurface components;
//! the coprime remainder is projected with resultants against its smallest member. Exact
//! rational points are lifted by substitution. Positive-dimensional components are sampled
//! at small rationals in a fixed order to produce exact witnesses.

use rug::Rational;
use serde::Serialize;
use thiserror::Error;

use super::gcd::{gcd, gcd_list};
use super::poly::MultiPoly;
use super::resultant::resultant_any;
use super::roots::{isolate, Interval, IsolatingBox};
use super::var::Var;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SolveError {
    #[error("elimination exceeded the size limit ({0})")]
    LimitExceeded(String),
}

#[derive(Clone, Debug)]
pub struct SolveOptions {
    /// Maximum number of exact witnesses collected on positive-dimensional components.
    pub max_witnesses: usize,
    /// Values tried for a free coordinate inside one fibre.
    pub fibre_budget: usize,
    /// Sample prefixes tried on a hypersurface before giving up.
    pub prefix_budget: usize,
    /// Upper bound on `deg_v(a) + deg_v(b)` times total degree for a single resultant.
    pub max_resultant_work: u64,
    /// Upper bound on the coefficient bit size of any eliminant.
    pub max_bits: u32,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            max_witnesses: 20,
            fibre_budget: 4,
            prefix_budget: 64,
            max_resultant_work: 40_000,
            max_bits: 200_000,
        }
    }
}

/// Result of [`solve_system`].
#[derive(Clone, Debug, Default, Serialize)]
pub struct SolveReport {
    /// Isolated real solutions; coordinates follow the caller's unknown order.
    pub isolated: Vec<IsolatingBox>,
    /// Some component of the complex solution set has positive dimension.
    pub positive_dimensional: bool,
    /// Exact rational points found on positive-dimensional components, in enumeration order.
    #[serde(serialize_with = "ser_points")]
    pub witnesses: Vec<Vec<Rational>>,
    /// Real solutions whose leading coordinate is irrational and could not be lifted exactly.
    pub unresolved: usize,
}

fn ser_points<S: serde::Serializer>(v: &[Vec<Rational>], s: S) -> Result<S::Ok, S::Error> {
    use super::ser::rational_to_string;
    s.collect_seq(
        v.iter()
            .map(|p| p.iter().map(rational_to_string).collect::<Vec<_>>()),
    )
}

/// Coarse classification of a [`SolveReport`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SolveOutcome {
    Infeasible,
    Solutions(Vec<IsolatingBox>),
    PositiveDimensional { witnesses: Vec<Vec<Rational>> },
}

impl SolveReport {
    pub fn outcome(&self) -> SolveOutcome {
        if self.positive_dimensional {
            SolveOutcome::PositiveDimensional {
                witnesses: self.witnesses.clone(),
            }
        } else if self.isolated.is_empty() && self.unresolved == 0 {
            SolveOutcome::Infeasible
        } else {
            SolveOutcome::Solutions(self.isolated.clone())
        }
    }

    pub fn is_infeasible(&self) -> bool {
        self.outcome() == SolveOutcome::Infeasible
    }

    /// Exact rational solutions: exact isolated points followed by witnesses.
    pub fn exact_points(&self) -> Vec<Vec<Rational>> {
        let mut out: Vec<Vec<Rational>> = self
            .isolated
            .iter()
            .filter_map(IsolatingBox::exact_point)
            .collect();
        out.extend(self.witnesses.iter().cloned());
        out
    }
}

/// Small rationals by increasing height: 0, 1, -1, 1/2, -1/2, 2, -2, 1/3, ...
pub fn enumeration(count: usize) -> Vec<Rational> {
    let mut out = vec![Rational::new()];
    let mut h: u32 = 1;
    while out.len() < count {
        let mut batch = Vec::new();
        for q in 1..=h {
            for p in 1..=h {
                if p.max(q) != h || gcd_u32(p, q) != 1 {
                    continue;
                }
                batch.push(Rational::from((p, q)));
            }
        }
        // order within a height: smaller denominators' reciprocals first as in 1/2, 2
        batch.sort_by(|a, b| {
            let ka = (
                a.numer().clone().min(a.denom().clone()),
                a > &Rational::from(1),
            );
            let kb = (
                b.numer().clone().min(b.denom().clone()),
                b > &Rational::from(1),
            );
            ka.cmp(&kb)
        });
        for r in batch {
            out.push(r.clone());
            out.push(-r);
        }
        h += 1;
    }
    out.truncate(count);
    out
}

fn gcd_u32(a: u32, b: u32) -> u32 {
    if b == 0 {
        a
    } else {
        gcd_u32(b, a % b)
    }
}

/// Index tuples of length `n` ordered by total then lexicographically.
pub fn diagonal_tuples(n: usize, limit: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut total = 0;
    while out.len() < limit {
        let mut cur = vec![0; n];
        gen_with_total(n, total, 0, &mut cur, &mut out, limit);
        total += 1;
        if n == 0 {
            break;
        }
    }
    out
}

fn gen_with_total(
    n: usize,
    total: usize,
    pos: usize,
    cur: &mut Vec<usize>,
    out: &mut Vec<Vec<usize>>,
    limit: usize,
) {
    if out.len() >= limit {
        return;
    }
    if pos + 1 == n {
        cur[pos] = total;
        out.push(cur.clone());
        return;
    }
    if n == 0 {
        if total == 0 {
            out.push(Vec::new());
        }
        return;
    }
    for first in 0..=total {
        cur[pos] = first;
        gen_with_total(n, total - first, pos + 1, cur, out, limit);
    }
}

type Point = Vec<(Var, Interval)>;

#[derive(Default)]
struct Partial {
    points: Vec<Point>,
    witnesses: Vec<Vec<(Var, Rational)>>,
    positive_dim: bool,
    unresolved: usize,
}

impl Partial {
    fn merge(&mut self, other: Partial) {
        for p in other.points {
            if !self.points.contains(&p) {
                self.points.push(p);
            }
        }
        for w in other.witnesses {
            if !self.witnesses.contains(&w) {
                self.witnesses.push(w);
            }
        }
        self.positive_dim |= other.positive_dim;
        self.unresolved += other.unresolved;
    }
}

struct Solver<'a> {
    opts: &'a SolveOptions,
}

/// Solves `eqs = 0` over the reals in the given unknowns (at most a handful).
pub fn solve_system(eqs: &[MultiPoly], unknowns: &[Var]) -> SolveReport {
    solve_system_with(eqs, unknowns, &SolveOptions::default()).expect("default limits")
}

pub fn solve_system_with(
    eqs: &[MultiPoly],
    unknowns: &[Var],
    opts: &SolveOptions,
) -> Result<SolveReport, SolveError> {
    for e in eqs {
        let allowed: u16 = unknowns.iter().fold(0, |a, v| a | (1 << v.index()));
        assert!(
            e.support() & !allowed == 0,
            "equation {e} has variables outside the unknowns"
        );
    }
    let solver = Solver { opts };
    let part = solver.solve(eqs.to_vec(), unknowns.to_vec())?;
    let order = |p: &[(Var, Interval)]| -> Vec<Interval> {
        unknowns
            .iter()
            .map(|v| {
                p.iter()
                    .find(|(w, _)| w == v)
                    .map(|(_, i)| i.clone())
                    .expect("coordinate")
            })
            .collect()
    };
    let mut isolated: Vec<IsolatingBox> = part
        .points
        .iter()
        .map(|p| {
            let coords = order(p);
            let width_bound = coords.iter().map(Interval::width).max().unwrap_or_default();
            IsolatingBox {
                coords,
                width_bound,
            }
        })
        .collect();
    isolated.sort_by(|a, b| {
        for (x, y) in a.coords.iter().zip(&b.coords) {
            let c = x.lo.cmp(&y.lo);
            if c.is_ne() {
                return c;
            }
        }
        std::cmp::Ordering::Equal
    });
    let witnesses = part
        .witnesses
        .iter()
        .map(|w| {
            unknowns
                .iter()
                .map(|v| {
                    w.iter()
                        .find(|(x, _)| x == v)
                        .map(|(_, r)| r.clone())
                        .expect("coord")
                })
                .collect()
        })
        .collect();
    Ok(SolveReport {
        isolated,
        positive_dimensional: part.positive_dim,
        witnesses,
        unresolved: part.unresolved,
    })
}

/// Drops exact solutions at which every polynomial of `exclude` vanishes. A positive-dimensional
/// report whose witnesses are all excluded is downgraded to its remaining isolated solutions;
/// the second return value counts such witnesses.
pub fn exclude_points(
    report: &SolveReport,
    unknowns: &[Var],
    exclude: &[MultiPoly],
) -> (SolveReport, usize) {
    let excluded = |p: &[Rational]| -> bool {
        let point: Vec<(Var, Rational)> = unknowns.iter().copied().zip(p.iter().cloned()).collect();
        exclude.iter().all(|e| e.eval_all(&point).cmp0().is_eq())
    };
    let mut out = report.clone();
    out.isolated.retain(|b| match b.exact_point() {
        Some(p) => !excluded(&p),
        None => true,
    });
    let before = out.witnesses.len();
    out.witnesses.retain(|w| !excluded(w));
    let dropped = before - out.witnesses.len();
    if out.positive_dimensional && out.witnesses.is_empty() && before > 0 {
        out.positive_dimensional = false;
    }
    (out, dropped)
}

fn clean(eqs: Vec<MultiPoly>) -> Option<Vec<MultiPoly>> {
    let mut out: Vec<MultiPoly> = Vec::new();
    for e in eqs {
        if e.is_zero() {
            continue;
        }
        if e.is_constant() {
            return None;
        }
        let p = e.primitive();
        if !out.contains(&p) {
            out.push(p);
        }
    }
    out.sort_by_key(|p| (p.total_degree(), p.len()));
    Some(out)
}

impl<'a> Solver<'a> {
    fn solve(&self, eqs: Vec<MultiPoly>, vars: Vec<Var>) -> Result<Partial, SolveError> {
        let Some(eqs) = clean(eqs) else {
            return Ok(Partial::default());
        };
        let support = eqs.iter().fold(0u16, |a, e| a | e.support());
        let involved: Vec<Var> = vars
            .iter()
            .copied()
            .filter(|v| support & (1 << v.index()) != 0)
            .collect();
        let free: Vec<Var> = vars
            .iter()
            .copied()
            .filter(|v| support & (1 << v.index()) == 0)
            .collect();
        if !free.is_empty() {
            let inner = self.solve(eqs, involved)?;
            return Ok(self.extend_free(inner, &free));
        }
        if vars.is_empty() {
            // no unknowns left and every equation vanished
            return Ok(Partial {
                points: vec![Vec::new()],
                ..Partial::default()
            });
        }
        if vars.len() == 1 {
            return Ok(self.univariate(&gcd_list(eqs.iter()), vars[0]));
        }
        let g = gcd_list(eqs.iter());
        if !g.is_constant() {
            let mut part = self.hypersurface(&g, &vars)?;
            let rest: Vec<MultiPoly> = eqs
                .iter()
                .map(|e| e.div_exact(&g).expect("gcd divides"))
                .collect();
            part.merge(self.solve(rest, vars)?);
            return Ok(part);
        }
        self.project_and_lift(eqs, vars)
    }

    fn univariate(&self, p: &MultiPoly, v: Var) -> Partial {
        if p.is_zero() {
            return self.extend_free(
                Partial {
                    points: vec![Vec::new()],
                    ..Partial::default()
                },
                &[v],
            );
        }
        if p.is_constant() {
            return Partial::default();
        }
        let u = p.to_univariate(v).expect("univariate");
        Partial {
            points: isolate(&u).into_iter().map(|iv| vec![(v, iv)]).collect(),
            ..Partial::default()
        }
    }

    /// Every solution of `inner` extended by arbitrary values of the free unknowns.
    fn extend_free(&self, inner: Partial, free: &[Var]) -> Partial {
        if inner.points.is_empty() && inner.witnesses.is_empty() && !inner.positive_dim {
            return inner;
        }
        let mut out = Partial {
            positive_dim: true,
            unresolved: inner.unresolved,
            ..Partial::default()
        };
        let values = enumeration(self.opts.fibre_budget.max(1));
        let tuples = diagonal_tuples(free.len(), self.opts.max_witnesses);
        let mut bases: Vec<Vec<(Var, Rational)>> = inner
            .points
            .iter()
            .filter_map(|p| {
                p.iter()
                    .map(|(v, iv)| iv.exact_value().map(|r| (*v, r.clone())))
                    .collect()
            })
            .collect();
        out.unresolved += inner.points.len() - bases.len();
        bases.extend(inner.witnesses);
        for base in bases {
            for t in &tuples {
                if out.witnesses.len() >= self.opts.max_witnesses {
                    return out;
                }
                if t.iter().any(|&i| i >= values.len()) {
                    continue;
                }
                let mut w = base.clone();
                for (v, &i) in free.iter().zip(t) {
                    w.push((*v, values[i].clone()));
                }
                out.witnesses.push(w);
            }
        }
        out
    }

    /// Samples a hypersurface `g = 0` at small rational prefixes.
    fn hypersurface(&self, g: &MultiPoly, vars: &[Var]) -> Result<Partial, SolveError> {
        let involved: Vec<Var> = vars.iter().copied().filter(|v| g.has_var(*v)).collect();
        if involved.len() < vars.len() {
            let free: Vec<Var> = vars.iter().copied().filter(|v| !g.has_var(*v)).collect();
            let inner = self.hypersurface(g, &involved)?;
            return Ok(self.extend_free(inner, &free));
        }
        if vars.len() == 1 {
            return Ok(self.univariate(g, vars[0]));
        }
        let n = vars.len();
        let last = vars[n - 1];
        let values = enumeration(self.opts.prefix_budget.max(4));
        let tuples = diagonal_tuples(n - 1, self.opts.prefix_budget);
        let mut out = Partial {
            positive_dim: true,
            ..Partial::default()
        };
        for t in tuples {
            if out.witnesses.len() >= self.opts.max_witnesses {
                break;
            }
            let mut p = g.clone();
            let mut prefix = Vec::new();
            for (v, &i) in vars[..n - 1].iter().zip(&t) {
                let r = values[i].clone();
                p = p.eval_rational_cleared(*v, &r);
                prefix.push((*v, r));
            }
            let fibre = self.univariate(&p, last);
            let mut added = 0;
            for pt in fibre.points {
                if let Some(r) = pt[0].1.exact_value() {
                    let mut w = prefix.clone();
                    w.push((last, r.clone()));
                    out.witnesses.push(w);
                    added += 1;
                }
            }
            for w in fibre.witnesses {
                if added >= self.opts.fibre_budget {
                    break;
                }
                let mut full = prefix.clone();
                full.extend(w);
                out.witnesses.push(full);
                added += 1;
            }
        }
        out.witnesses.truncate(self.opts.max_witnesses);
        Ok(out)
    }

    fn project_and_lift(&self, eqs: Vec<MultiPoly>, vars: Vec<Var>) -> Result<Partial, SolveError> {
        let n = vars.len();
        let v = vars[n - 1];
        let lower_vars: Vec<Var> = vars[..n - 1].to_vec();
        let mut with_v: Vec<MultiPoly> = eqs.iter().filter(|e| e.has_var(v)).cloned().collect();
        let without: Vec<MultiPoly> = eqs.iter().filter(|e| !e.has_var(v)).cloned().collect();
        with_v.sort_by_key(|p| (p.degree(v), p.len()));

        let mut projected = without.clone();
        if with_v.len() >= 2 {
            let a = &with_v[0];
            for f in &with_v[1..] {
                // a shared factor splits the system instead of killing the resultant
                let h = gcd(a, f);
                if h.has_var(v) {
                    return self.split_on_factor(&eqs, a, f, &h, vars);
                }
            }
            for f in with_v[1..].iter().take(8) {
                let work = (a.degree(v) + f.degree(v)) as u64
                    * (a.total_degree() + f.total_degree()) as u64;
                if work > self.opts.max_resultant_work {
                    return Err(SolveError::LimitExceeded(format!("resultant work {work}")));
                }
                let r = resultant_any(a, f, v);
                if r.max_bits() > self.opts.max_bits {
                    return Err(SolveError::LimitExceeded(format!(
                        "eliminant of {} bits",
                        r.max_bits()
                    )));
                }
                if !r.is_zero() {
                    projected.push(r);
                }
            }
        }
        let lower = self.solve(projected, lower_vars)?;
        let mut out = Partial {
            unresolved: lower.unresolved,
            ..Partial::default()
        };
        for p in &lower.points {
            let exact: Option<Vec<(Var, Rational)>> = p
                .iter()
                .map(|(w, iv)| iv.exact_value().map(|r| (*w, r.clone())))
                .collect();
            match exact {
                Some(prefix) => {
                    let lifted = self.lift(&eqs, &prefix, v)?;
                    out.merge(lifted);
                }
                None => out.unresolved += 1,
            }
        }
        if lower.positive_dim {
            out.positive_dim = true;
            for w in &lower.witnesses {
                if out.witnesses.len() >= self.opts.max_witnesses {
                    break;
                }
                let lifted = self.lift(&eqs, w, v)?;
                for pt in lifted.points {
                    let exact: Option<Vec<(Var, Rational)>> = pt
                        .iter()
                        .map(|(x, iv)| iv.exact_value().map(|r| (*x, r.clone())))
                        .collect();
                    if let Some(e) = exact {
                        out.witnesses.push(e);
                    }
                }
                out.witnesses.extend(lifted.witnesses);
            }
            out.witnesses.truncate(self.opts.max_witnesses);
        }
        Ok(out)
    }

    /// Lifts an exact prefix to solutions in the remaining unknown `v`.
    fn lift(
        &self,
        eqs: &[MultiPoly],
        prefix: &[(Var, Rational)],
        v: Var,
    ) -> Result<Partial, SolveError> {
        let sub: Vec<MultiPoly> = eqs
            .iter()
            .map(|e| {
                let mut p = e.clone();
                for (w, r) in prefix {
                    p = p.eval_rational_cleared(*w, r);
                }
                p
            })
            .collect();
        let fibre = self.solve(sub, vec![v])?;
        let mut out = Partial {
            positive_dim: fibre.positive_dim,
            unresolved: fibre.unresolved,
            ..Partial::default()
        };
        for pt in fibre.points {
            let mut full: Point = prefix
                .iter()
                .map(|(w, r)| (*w, Interval::exact(r.clone())))
                .collect();
            full.extend(pt);
            out.points.push(full);
        }
        for w in fibre.witnesses {
            let mut full: Vec<(Var, Rational)> = prefix.to_vec();
            full.extend(w);
            out.witnesses.push(full);
        }
        Ok(out)
    }

    /// `{a = 0, f = 0, rest}` with `a = h a'`, `f = h f'` splits as
    /// `{h = 0, rest} ∪ {a' = 0, f' = 0, rest}`.
    fn split_on_factor(
        &self,
        eqs: &[MultiPoly],
        a: &MultiPoly,
        f: &MultiPoly,
        h: &MultiPoly,
        vars: Vec<Var>,
    ) -> Result<Partial, SolveError> {
        let rest: Vec<MultiPoly> = eqs.iter().filter(|e| *e != a && *e != f).cloned().collect();
        let mut first = rest.clone();
        first.push(h.clone());
        let mut second = rest;
        second.push(a.div_exact(h).expect("factor"));
        second.push(f.div_exact(h).expect("factor"));
        let mut part = self.solve(first, vars.clone())?;
        part.merge(self.solve(second, vars)?);
        Ok(part)
    }
}
