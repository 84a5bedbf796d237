//! Recursive-descent parser for rational parametric curves.
//!
//! ```text
//! expr   := term (('+'|'-') term)*
//! term   := factor (('*'|'/') factor)*
//! factor := base ('^' integer)?
//! base   := rational-literal | identifier | '(' expr ')'
//! curve  := '(' expr (',' expr){1,2} ')'
//! ```
//!
//! A leading `-` on a factor is accepted as shorthand for `0 - factor`. The first identifier
//! seen is the curve parameter; any other identifier is rejected.

use rug::ops::Pow;
use rug::{Integer, Rational};
use thiserror::Error;

use crate::algebra::{MultiPoly, RationalFunction, Var};

const MAX_EXPONENT: i64 = 64;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("syntax error at {pos}: expected {expected}, found {found}")]
    Syntax {
        pos: usize,
        expected: String,
        found: String,
    },
    #[error("expected {expected} components, found {found}")]
    ComponentCount { expected: usize, found: usize },
    #[error("non-rational construct at {pos}: {what}")]
    NonRational { pos: usize, what: String },
    #[error("second identifier `{name}` at {pos}; the curve parameter is `{param}`")]
    ExtraIdentifier {
        pos: usize,
        name: String,
        param: String,
    },
    #[error("division by zero at {pos}")]
    DivisionByZero { pos: usize },
    #[error("exponent {value} at {pos} exceeds the limit {MAX_EXPONENT}")]
    ExponentTooLarge { pos: usize, value: String },
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(Rational),
    Ident(String),
    Sym(char),
    End,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Num(r) => format!("number `{r}`"),
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Sym(c) => format!("`{c}`"),
            Tok::End => "end of input".into(),
        }
    }
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let bytes: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() || c == '.' {
            let start = i;
            while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == '.') {
                i += 1;
            }
            let s: String = bytes[start..i].iter().collect();
            out.push((start, Tok::Num(decimal(&s, start)?)));
        } else if c.is_alphabetic() || c == '_' {
            let start = i;
            while i < bytes.len() && (bytes[i].is_alphanumeric() || bytes[i] == '_') {
                i += 1;
            }
            out.push((start, Tok::Ident(bytes[start..i].iter().collect())));
        } else if "+-*/^(),".contains(c) {
            out.push((i, Tok::Sym(c)));
            i += 1;
        } else {
            return Err(ParseError::Syntax {
                pos: i,
                expected: "expression".into(),
                found: format!("`{c}`"),
            });
        }
    }
    out.push((bytes.len(), Tok::End));
    Ok(out)
}

/// Exact value of a decimal literal such as `12`, `0.25` or `3.`.
fn decimal(s: &str, pos: usize) -> Result<Rational, ParseError> {
    let bad = || ParseError::Syntax {
        pos,
        expected: "number".into(),
        found: format!("`{s}`"),
    };
    let (int, frac) = match s.split_once('.') {
        Some((a, b)) => (a, b),
        None => (s, ""),
    };
    if frac.contains('.') || (int.is_empty() && frac.is_empty()) {
        return Err(bad());
    }
    let digits = format!("{int}{frac}");
    let n = Integer::from_str_radix(&digits, 10).map_err(|_| bad())?;
    let d: Integer = Pow::pow(Integer::from(10u32), frac.len() as u32);
    Ok(Rational::from((n, d)))
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    at: usize,
    param: Option<String>,
    /// Identifiers bound to fixed variables instead of the curve parameter.
    fixed: Vec<(&'static str, Var)>,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].1
    }

    fn pos(&self) -> usize {
        self.toks[self.at].0
    }

    fn bump(&mut self) -> (usize, Tok) {
        let t = self.toks[self.at].clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn expect(&mut self, c: char) -> Result<(), ParseError> {
        if *self.peek() == Tok::Sym(c) {
            self.bump();
            Ok(())
        } else {
            Err(ParseError::Syntax {
                pos: self.pos(),
                expected: format!("`{c}`"),
                found: self.peek().describe(),
            })
        }
    }

    fn expr(&mut self) -> Result<RationalFunction, ParseError> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Tok::Sym('+') => {
                    self.bump();
                    acc = acc.add(&self.term()?);
                }
                Tok::Sym('-') => {
                    self.bump();
                    acc = acc.sub(&self.term()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<RationalFunction, ParseError> {
        let mut acc = self.factor()?;
        loop {
            match self.peek() {
                Tok::Sym('*') => {
                    self.bump();
                    acc = acc.mul(&self.factor()?);
                }
                Tok::Sym('/') => {
                    self.bump();
                    let pos = self.pos();
                    let d = self.factor()?;
                    acc = acc
                        .div(&d)
                        .map_err(|_| ParseError::DivisionByZero { pos })?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn factor(&mut self) -> Result<RationalFunction, ParseError> {
        if *self.peek() == Tok::Sym('-') {
            self.bump();
            return Ok(self.factor()?.neg());
        }
        let base = self.base()?;
        if *self.peek() != Tok::Sym('^') {
            return Ok(base);
        }
        self.bump();
        let pos = self.pos();
        let e = self.exponent()?;
        if base.is_zero() && e < 0 {
            return Err(ParseError::DivisionByZero { pos });
        }
        Ok(base.pow(e as i32).expect("nonzero base"))
    }

    fn exponent(&mut self) -> Result<i64, ParseError> {
        let pos = self.pos();
        let neg = if *self.peek() == Tok::Sym('-') {
            self.bump();
            true
        } else {
            false
        };
        match self.bump() {
            (_, Tok::Num(r)) => {
                if *r.denom() != 1 {
                    return Err(ParseError::NonRational {
                        pos,
                        what: format!("fractional exponent {r}"),
                    });
                }
                let v = r.numer().to_i64().filter(|v| *v <= MAX_EXPONENT);
                match v {
                    Some(v) => Ok(if neg { -v } else { v }),
                    None => Err(ParseError::ExponentTooLarge {
                        pos,
                        value: r.to_string(),
                    }),
                }
            }
            (p, Tok::Sym('(')) => Err(ParseError::NonRational {
                pos: p,
                what: "parenthesised exponent".into(),
            }),
            (p, t) => Err(ParseError::Syntax {
                pos: p,
                expected: "integer exponent".into(),
                found: t.describe(),
            }),
        }
    }

    fn base(&mut self) -> Result<RationalFunction, ParseError> {
        let (pos, tok) = self.bump();
        match tok {
            Tok::Num(r) => Ok(RationalFunction::from_rational(&r)),
            Tok::Ident(name) => {
                if *self.peek() == Tok::Sym('(') {
                    return Err(ParseError::NonRational {
                        pos,
                        what: format!("function `{name}`"),
                    });
                }
                if let Some((_, v)) = self.fixed.iter().find(|(n, _)| *n == name) {
                    return Ok(RationalFunction::var(*v));
                }
                match &self.param {
                    None => {
                        self.param = Some(name);
                        Ok(RationalFunction::t())
                    }
                    Some(p) if *p == name => Ok(RationalFunction::t()),
                    Some(p) => Err(ParseError::ExtraIdentifier {
                        pos,
                        name,
                        param: p.clone(),
                    }),
                }
            }
            Tok::Sym('(') => {
                let e = self.expr()?;
                self.expect(')')?;
                Ok(e)
            }
            t => Err(ParseError::Syntax {
                pos,
                expected: "number, identifier or `(`".into(),
                found: t.describe(),
            }),
        }
    }
}

/// Parses a parenthesised tuple of 2 or 3 rational expressions in one parameter.
/// Returns the components and the parameter name, if any appeared.
pub fn parse_components(text: &str) -> Result<(Vec<RationalFunction>, Option<String>), ParseError> {
    let mut p = Parser {
        toks: lex(text)?,
        at: 0,
        param: None,
        fixed: vec![],
    };
    p.expect('(')?;
    let mut comps = vec![p.expr()?];
    while *p.peek() == Tok::Sym(',') {
        p.bump();
        comps.push(p.expr()?);
    }
    p.expect(')')?;
    if *p.peek() != Tok::End {
        return Err(ParseError::Syntax {
            pos: p.pos(),
            expected: "end of input".into(),
            found: p.peek().describe(),
        });
    }
    Ok((comps, p.param))
}

/// Parses a single expression (no surrounding tuple).
pub fn parse_expr(text: &str) -> Result<RationalFunction, ParseError> {
    parse_expr_with(text, &[])
}

/// Like [`parse_expr`], with the listed identifiers bound to fixed variables, e.g.
/// `("b", Var::B)` for expressions over a family's parameter ring.
pub fn parse_expr_with(
    text: &str,
    fixed: &[(&'static str, Var)],
) -> Result<RationalFunction, ParseError> {
    let mut p = Parser {
        toks: lex(text)?,
        at: 0,
        param: None,
        fixed: fixed.to_vec(),
    };
    let e = p.expr()?;
    if *p.peek() != Tok::End {
        return Err(ParseError::Syntax {
            pos: p.pos(),
            expected: "end of input".into(),
            found: p.peek().describe(),
        });
    }
    Ok(e)
}

/// Parses a polynomial in the signature coordinates `J` and `K`, up to a constant factor.
pub fn parse_signature_poly(text: &str) -> Result<MultiPoly, ParseError> {
    let mut p = Parser {
        toks: lex(text)?,
        at: 0,
        param: None,
        fixed: vec![("J", Var::J), ("K", Var::K)],
    };
    let e = p.expr()?;
    if *p.peek() != Tok::End {
        return Err(ParseError::Syntax {
            pos: p.pos(),
            expected: "end of input".into(),
            found: p.peek().describe(),
        });
    }
    if let Some(name) = p.param {
        return Err(ParseError::ExtraIdentifier {
            pos: 0,
            name,
            param: "J, K".into(),
        });
    }
    let (num, den) = e.into_parts();
    if den.total_degree() > 0 {
        return Err(ParseError::NonRational {
            pos: 0,
            what: "denominator in a polynomial".into(),
        });
    }
    Ok(num)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twisted_cubic() {
        let (c, name) = parse_components("(s^3, s^2, s)").unwrap();
        assert_eq!(c.len(), 3);
        assert_eq!(name.as_deref(), Some("s"));
        assert_eq!(c[0], RationalFunction::t().pow(3).unwrap());
    }

    #[test]
    fn quotient_and_literals() {
        let (c, _) = parse_components("(t^3/(t+1), 0.5*t - 3/4)").unwrap();
        let t = RationalFunction::t();
        let one = RationalFunction::one();
        assert_eq!(c[0], t.pow(3).unwrap().div(&t.add(&one)).unwrap());
        assert_eq!(
            c[1].eval_rational(&Rational::from(2)),
            Some(Rational::from((1, 4)))
        );
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(
            parse_components("(t, sin(t))"),
            Err(ParseError::NonRational { .. })
        ));
        assert!(matches!(
            parse_components("(t, t^(1/2))"),
            Err(ParseError::NonRational { .. })
        ));
        assert!(matches!(
            parse_components("(t, t^0.5)"),
            Err(ParseError::NonRational { .. })
        ));
        // `^` binds tighter than `/`
        assert_eq!(parse_expr("t^2/3").unwrap(), parse_expr("(t*t)/3").unwrap());
        assert!(matches!(
            parse_components("(t, u)"),
            Err(ParseError::ExtraIdentifier { .. })
        ));
        assert!(matches!(
            parse_components("(t, 1/(t-t))"),
            Err(ParseError::DivisionByZero { .. })
        ));
        match parse_components("(t, t +)") {
            Err(ParseError::Syntax { pos, .. }) => assert_eq!(pos, 7),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn unary_minus_and_negative_powers() {
        let e = parse_expr("-t^-2 + 1").unwrap();
        assert_eq!(
            e.eval_rational(&Rational::from(2)),
            Some(Rational::from((3, 4)))
        );
    }
}
