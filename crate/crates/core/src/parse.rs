//! Expression mini-language for scalars and polynomials.
//!
//! ```text
//! expr   := term (('+'|'-') term)*
//! term   := factor (('*'|'/') factor)*
//! factor := '-' factor | atom ('^' rational)?
//! atom   := number | 'i' | 'rho' | 'z' | 'zbar' | name | '(' expr ')'
//! ```
//!
//! Rationals are written `p`, `p/q`, `(p/q)`, `(-p)` or as decimals.

use std::collections::BTreeMap;

use num_complex::Complex64;
use num_traits::Signed;
use thiserror::Error;

use crate::func::Poly;
use crate::scalar::{AsymptoticScalar, Rational, ScalarError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseError {
    #[error("syntax error at {pos}: {msg}")]
    SyntaxError { pos: usize, msg: String },
    #[error("not representable: {0}")]
    NonRepresentable(String),
    #[error("unknown name '{0}'")]
    UnknownName(String),
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(String),
    Ident(String),
    Sym(char),
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let b: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < b.len() {
        let c = b[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() || c == '.' {
            let start = i;
            while i < b.len() && (b[i].is_ascii_digit() || b[i] == '.') {
                i += 1;
            }
            if i < b.len() && (b[i] == 'e' || b[i] == 'E') {
                let mut j = i + 1;
                if j < b.len() && (b[j] == '+' || b[j] == '-') {
                    j += 1;
                }
                if j < b.len() && b[j].is_ascii_digit() {
                    i = j;
                    while i < b.len() && b[i].is_ascii_digit() {
                        i += 1;
                    }
                }
            }
            out.push((start, Tok::Num(b[start..i].iter().collect())));
        } else if c.is_alphabetic() || c == '_' {
            let start = i;
            while i < b.len() && (b[i].is_alphanumeric() || b[i] == '_') {
                i += 1;
            }
            out.push((start, Tok::Ident(b[start..i].iter().collect())));
        } else if "+-*/^()".contains(c) {
            out.push((i, Tok::Sym(c)));
            i += 1;
        } else {
            return Err(ParseError::SyntaxError {
                pos: i,
                msg: format!("unexpected character '{c}'"),
            });
        }
    }
    Ok(out)
}

#[derive(Debug, Clone)]
enum Ast {
    Num(f64),
    I,
    Rho,
    Z,
    Zbar,
    Name(String),
    Neg(Box<Ast>),
    Add(Box<Ast>, Box<Ast>),
    Sub(Box<Ast>, Box<Ast>),
    Mul(Box<Ast>, Box<Ast>),
    Div(Box<Ast>, Box<Ast>),
    Pow(Box<Ast>, Rational),
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    end: usize,
}

fn decimal_to_rational(s: &str) -> Option<Rational> {
    if s.contains(['e', 'E']) {
        return None;
    }
    let (int, frac) = s.split_once('.').unwrap_or((s, ""));
    let digits = format!("{int}{frac}");
    let n: i64 = digits.parse().ok()?;
    let d = 10i64.checked_pow(frac.len() as u32)?;
    Some(Rational::new(n, d))
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.1)
    }

    fn here(&self) -> usize {
        self.toks.get(self.pos).map(|t| t.0).unwrap_or(self.end)
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError::SyntaxError {
            pos: self.here(),
            msg: msg.into(),
        })
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Sym(c)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<Ast, ParseError> {
        let mut lhs = self.term()?;
        loop {
            if self.eat('+') {
                lhs = Ast::Add(Box::new(lhs), Box::new(self.term()?));
            } else if self.eat('-') {
                lhs = Ast::Sub(Box::new(lhs), Box::new(self.term()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<Ast, ParseError> {
        let mut lhs = self.factor()?;
        loop {
            if self.eat('*') {
                lhs = Ast::Mul(Box::new(lhs), Box::new(self.factor()?));
            } else if self.eat('/') {
                lhs = Ast::Div(Box::new(lhs), Box::new(self.factor()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn factor(&mut self) -> Result<Ast, ParseError> {
        if self.eat('-') {
            return Ok(Ast::Neg(Box::new(self.factor()?)));
        }
        let base = self.atom()?;
        if self.eat('^') {
            let e = self.rational()?;
            return Ok(Ast::Pow(Box::new(base), e));
        }
        Ok(base)
    }

    fn integer(&mut self) -> Result<i64, ParseError> {
        let neg = self.eat('-');
        match self.peek().cloned() {
            Some(Tok::Num(s)) => {
                self.pos += 1;
                let n: i64 = s.parse().or_else(|_| self.err(format!("'{s}' is not an integer")))?;
                Ok(if neg { -n } else { n })
            }
            _ => self.err("expected an integer"),
        }
    }

    fn rational(&mut self) -> Result<Rational, ParseError> {
        let neg = self.eat('-');
        let r = match self.peek().cloned() {
            Some(Tok::Sym('(')) => {
                self.pos += 1;
                let p = self.integer()?;
                let r = if self.eat('/') {
                    let q = self.integer()?;
                    if q == 0 {
                        return self.err("zero denominator");
                    }
                    Rational::new(p, q)
                } else {
                    Rational::from_integer(p)
                };
                if !self.eat(')') {
                    return self.err("expected ')'");
                }
                r
            }
            Some(Tok::Num(s)) => {
                self.pos += 1;
                let r = decimal_to_rational(&s).ok_or_else(|| ParseError::NonRepresentable(format!("exponent {s}")))?;
                if r.is_integer() && self.eat('/') {
                    let q = self.integer()?;
                    if q == 0 {
                        return self.err("zero denominator");
                    }
                    r / Rational::from_integer(q)
                } else {
                    r
                }
            }
            Some(Tok::Ident(s)) => return Err(ParseError::NonRepresentable(format!("non-rational exponent '{s}'"))),
            _ => return self.err("expected a rational exponent"),
        };
        Ok(if neg { -r } else { r })
    }

    fn atom(&mut self) -> Result<Ast, ParseError> {
        match self.peek().cloned() {
            Some(Tok::Num(s)) => {
                self.pos += 1;
                let v: f64 = s.parse().or_else(|_| self.err(format!("bad number '{s}'")))?;
                Ok(Ast::Num(v))
            }
            Some(Tok::Ident(s)) => {
                self.pos += 1;
                Ok(match s.as_str() {
                    "i" => Ast::I,
                    "rho" => Ast::Rho,
                    "z" => Ast::Z,
                    "zbar" => Ast::Zbar,
                    _ => Ast::Name(s),
                })
            }
            Some(Tok::Sym('(')) => {
                self.pos += 1;
                let e = self.expr()?;
                if !self.eat(')') {
                    return self.err("expected ')'");
                }
                Ok(e)
            }
            Some(t) => self.err(format!("unexpected {t:?}")),
            None => self.err("unexpected end of input"),
        }
    }
}

fn parse_ast(text: &str) -> Result<Ast, ParseError> {
    let toks = lex(text)?;
    let mut p = Parser {
        toks,
        pos: 0,
        end: text.len(),
    };
    let ast = p.expr()?;
    if p.pos != p.toks.len() {
        return p.err("trailing input");
    }
    Ok(ast)
}

/// Named scalars usable inside expressions.
pub type ScalarEnv = BTreeMap<String, AsymptoticScalar>;

fn scalar_error(e: ScalarError) -> ParseError {
    ParseError::NonRepresentable(e.to_string())
}

fn eval_scalar(a: &Ast, cap: Rational, env: &ScalarEnv) -> Result<AsymptoticScalar, ParseError> {
    let ev = |x: &Ast| eval_scalar(x, cap, env);
    Ok(match a {
        Ast::Num(v) => AsymptoticScalar::constant_with_cap(Complex64::new(*v, 0.0), cap),
        Ast::I => AsymptoticScalar::constant_with_cap(Complex64::i(), cap),
        Ast::Rho => AsymptoticScalar::rho().with_cap(cap),
        Ast::Z | Ast::Zbar => return Err(ParseError::NonRepresentable("z in a scalar expression".into())),
        Ast::Name(n) => env.get(n).cloned().ok_or_else(|| ParseError::UnknownName(n.clone()))?,
        Ast::Neg(x) => -ev(x)?,
        Ast::Add(x, y) => &ev(x)? + &ev(y)?,
        Ast::Sub(x, y) => &ev(x)? - &ev(y)?,
        Ast::Mul(x, y) => &ev(x)? * &ev(y)?,
        Ast::Div(x, y) => &ev(x)? * &ev(y)?.invert().map_err(scalar_error)?,
        Ast::Pow(x, e) => {
            let b = ev(x)?;
            if e.is_integer() && !e.is_negative() {
                b.powi(e.to_integer() as u32)
            } else {
                b.powr(*e).map_err(scalar_error)?
            }
        }
    })
}

fn has_var(a: &Ast) -> bool {
    match a {
        Ast::Z | Ast::Zbar => true,
        Ast::Neg(x) | Ast::Pow(x, _) => has_var(x),
        Ast::Add(x, y) | Ast::Sub(x, y) | Ast::Mul(x, y) | Ast::Div(x, y) => has_var(x) || has_var(y),
        _ => false,
    }
}

fn eval_poly(a: &Ast, cap: Rational, env: &ScalarEnv) -> Result<Poly, ParseError> {
    let ev = |x: &Ast| eval_poly(x, cap, env);
    if !has_var(a) {
        let c = eval_scalar(a, cap, env)?;
        return Ok(if c.is_empty() { Poly::zero() } else { Poly::constant(c) });
    }
    Ok(match a {
        Ast::Z => Poly::z(),
        Ast::Zbar => Poly::zbar(),
        Ast::Neg(x) => Poly::zero().sub(&ev(x)?),
        Ast::Add(x, y) => ev(x)?.add(&ev(y)?),
        Ast::Sub(x, y) => ev(x)?.sub(&ev(y)?),
        Ast::Mul(x, y) => ev(x)?.mul(&ev(y)?),
        Ast::Div(x, y) => {
            let d = eval_scalar(y, cap, env)?.invert().map_err(scalar_error)?;
            ev(x)?.scale(&d)
        }
        Ast::Pow(x, e) => {
            if !e.is_integer() || e.is_negative() {
                return Err(ParseError::NonRepresentable(format!("polynomial power {e}")));
            }
            ev(x)?.powi(e.to_integer() as u32)
        }
        _ => unreachable!("variable-free subtrees are scalars"),
    })
}

/// Default knowledge cap of parsed scalars.
pub fn default_cap() -> Rational {
    Rational::from_integer(24)
}

pub fn parse_scalar_expr(text: &str) -> Result<AsymptoticScalar, ParseError> {
    parse_scalar_with(text, default_cap(), &ScalarEnv::new())
}

pub fn parse_scalar_with(text: &str, cap: Rational, env: &ScalarEnv) -> Result<AsymptoticScalar, ParseError> {
    eval_scalar(&parse_ast(text)?, cap, env)
}

/// Parses a polynomial in `z` and `zbar`.
pub fn parse_poly_with(text: &str, cap: Rational, env: &ScalarEnv) -> Result<Poly, ParseError> {
    eval_poly(&parse_ast(text)?, cap, env)
}

/// Parses `p`, `p/q`, `(p/q)` or a decimal.
pub fn parse_rational(text: &str) -> Result<Rational, ParseError> {
    let toks = lex(text)?;
    let mut p = Parser {
        toks,
        pos: 0,
        end: text.len(),
    };
    let r = p.rational()?;
    if p.pos != p.toks.len() {
        return p.err("trailing input");
    }
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(p: i64, q: i64) -> Rational {
        Rational::new(p, q)
    }

    #[test]
    fn terms_and_expansion() {
        let x = parse_scalar_expr("3*rho^(1/2) - 2*rho^2").unwrap();
        let t: Vec<_> = x.terms().iter().map(|t| (t.exponent, t.coeff.re)).collect();
        assert_eq!(t, vec![(r(1, 2), 3.0), (r(2, 1), -2.0)]);
        let y = parse_scalar_expr("(1+rho)*(1-rho)").unwrap();
        let t: Vec<_> = y.terms().iter().map(|t| (t.exponent, t.coeff.re)).collect();
        assert_eq!(t, vec![(r(0, 1), 1.0), (r(2, 1), -1.0)]);
    }

    #[test]
    fn errors() {
        assert!(matches!(parse_scalar_expr("rho^rho"), Err(ParseError::NonRepresentable(_))));
        assert!(matches!(parse_scalar_expr("1 + * rho"), Err(ParseError::SyntaxError { pos: 4, .. })));
        assert!(matches!(parse_scalar_expr("(1"), Err(ParseError::SyntaxError { .. })));
        assert!(matches!(parse_scalar_expr("a + 1"), Err(ParseError::UnknownName(_))));
        assert!(matches!(parse_scalar_expr("1 / (rho - rho)"), Err(ParseError::NonRepresentable(_))));
    }

    #[test]
    fn display_reparses() {
        for s in ["3*rho^(1/2) - 2*rho^2", "(2+i)*rho^(-3) + 0.1", "i", "0", "rho^(-1/3)*(1-rho)"] {
            let x = parse_scalar_expr(s).unwrap();
            let y = parse_scalar_expr(&x.to_string()).unwrap();
            assert_eq!(x, y, "{s}");
        }
    }

    #[test]
    fn polynomials() {
        let p = parse_poly_with("z^2 + rho*zbar - 1", default_cap(), &ScalarEnv::new()).unwrap();
        assert_eq!(p.degree(), 2);
        assert!(!p.is_holomorphic());
        assert!(parse_poly_with("z^(1/2)", default_cap(), &ScalarEnv::new()).is_err());
    }

    #[test]
    fn rationals() {
        assert_eq!(parse_rational("1/2").unwrap(), r(1, 2));
        assert_eq!(parse_rational("(-3/4)").unwrap(), r(-3, 4));
        assert_eq!(parse_rational("0.25").unwrap(), r(1, 4));
        assert_eq!(parse_rational("-2").unwrap(), r(-2, 1));
    }
}
