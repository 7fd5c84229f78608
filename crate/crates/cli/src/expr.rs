//! Expression syntax and evaluation to reals.
//!
//! ```text
//! expr := term (('+' | '-') term)*
//! term := '-' term | natural '*' term | atom
//! atom := rational | '(' expr ')' | 'abs' '(' expr ')' | 'sqrt' '(' expr ')'
//! ```
//!
//! Rationals are written `a`, `a/b` or as finite decimals. `a - b` is
//! sugar for `a + -b`.

use std::fmt;

use domreal::newton;
use domreal::reals::positive_probe;
use domreal::{DomainError, ProbeResult, Rational, Real};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Expr {
    Lit(Rational),
    Add(Box<Expr>, Box<Expr>),
    Neg(Box<Expr>),
    Abs(Box<Expr>),
    Sqrt(Box<Expr>),
    NatScale(u64, Box<Expr>),
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Lit(q) => write!(f, "{q}"),
            Expr::Add(a, b) => write!(f, "({a} + {b})"),
            Expr::Neg(a) => write!(f, "-{a}"),
            Expr::Abs(a) => write!(f, "abs({a})"),
            Expr::Sqrt(a) => write!(f, "sqrt({a})"),
            Expr::NatScale(n, a) => write!(f, "{n} * {a}"),
        }
    }
}

/// A syntax error at a byte offset of the input.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("syntax error at column {}: {message}", .pos + 1)]
pub struct ParseError {
    pub pos: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    /// Digits with an optional fractional part, kept as written.
    Num(String),
    Ident(String),
    Sym(char),
    End,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Num(s) | Tok::Ident(s) => write!(f, "'{s}'"),
            Tok::Sym(c) => write!(f, "'{c}'"),
            Tok::End => write!(f, "end of input"),
        }
    }
}

fn lex(src: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        if c.is_ascii_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let start = i;
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            if i < bytes.len() && bytes[i] == b'.' {
                i += 1;
                let frac = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                if i == frac {
                    return Err(ParseError {
                        pos: i,
                        message: "expected digits after '.'".into(),
                    });
                }
            }
            out.push((start, Tok::Num(src[start..i].to_string())));
        } else if c.is_ascii_alphabetic() {
            let start = i;
            while i < bytes.len() && bytes[i].is_ascii_alphanumeric() {
                i += 1;
            }
            out.push((start, Tok::Ident(src[start..i].to_string())));
        } else if "+-*/()".contains(c) {
            out.push((i, Tok::Sym(c)));
            i += 1;
        } else {
            let ch = src[i..].chars().next().unwrap_or(c);
            return Err(ParseError {
                pos: i,
                message: format!("unexpected character '{ch}'"),
            });
        }
    }
    out.push((src.len(), Tok::End));
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    at: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].1
    }

    fn pos(&self) -> usize {
        self.toks[self.at].0
    }

    fn next(&mut self) -> Tok {
        let t = self.toks[self.at].1.clone();
        if t != Tok::End {
            self.at += 1;
        }
        t
    }

    fn error<T>(&self, message: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError {
            pos: self.pos(),
            message: message.into(),
        })
    }

    fn expect(&mut self, c: char) -> Result<(), ParseError> {
        if *self.peek() == Tok::Sym(c) {
            self.next();
            Ok(())
        } else {
            self.error(format!("expected '{c}', found {}", self.peek()))
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Tok::Sym('+') => {
                    self.next();
                    acc = Expr::Add(Box::new(acc), Box::new(self.term()?));
                }
                Tok::Sym('-') => {
                    self.next();
                    let rhs = Expr::Neg(Box::new(self.term()?));
                    acc = Expr::Add(Box::new(acc), Box::new(rhs));
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        if *self.peek() == Tok::Sym('-') {
            self.next();
            return Ok(Expr::Neg(Box::new(self.term()?)));
        }
        if let Tok::Num(n) = self.peek().clone() {
            if self.toks[self.at + 1].1 == Tok::Sym('*') {
                let pos = self.pos();
                let scale: u64 = n.parse().map_err(|_| ParseError {
                    pos,
                    message: format!("scale factor '{n}' is not a natural number"),
                })?;
                self.next();
                self.next();
                return Ok(Expr::NatScale(scale, Box::new(self.term()?)));
            }
        }
        self.atom()
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        let pos = self.pos();
        match self.next() {
            Tok::Num(n) => {
                let text = if *self.peek() == Tok::Sym('/') {
                    self.next();
                    let dpos = self.pos();
                    match self.next() {
                        Tok::Num(d) if !d.contains('.') && !n.contains('.') => format!("{n}/{d}"),
                        _ => {
                            return Err(ParseError {
                                pos: dpos,
                                message: "expected an integer denominator".into(),
                            })
                        }
                    }
                } else {
                    n
                };
                let q: Rational = text.parse().map_err(|e: DomainError| ParseError {
                    pos,
                    message: e.to_string(),
                })?;
                Ok(Expr::Lit(q))
            }
            Tok::Sym('(') => {
                let e = self.expr()?;
                self.expect(')')?;
                Ok(e)
            }
            Tok::Ident(name) => {
                let wrap: fn(Box<Expr>) -> Expr = match name.as_str() {
                    "abs" => Expr::Abs,
                    "sqrt" => Expr::Sqrt,
                    _ => {
                        return Err(ParseError {
                            pos,
                            message: format!("unknown function '{name}'"),
                        })
                    }
                };
                self.expect('(')?;
                let e = self.expr()?;
                self.expect(')')?;
                Ok(wrap(Box::new(e)))
            }
            t => Err(ParseError {
                pos,
                message: format!("expected a number, '(' or a function, found {t}"),
            }),
        }
    }
}

pub fn parse(src: &str) -> Result<Expr, ParseError> {
    let mut p = Parser { toks: lex(src)?, at: 0 };
    let e = p.expr()?;
    if *p.peek() != Tok::End {
        return p.error(format!("unexpected {}", p.peek()));
    }
    Ok(e)
}

#[derive(Debug, thiserror::Error)]
pub enum EvalError {
    #[error("sqrt argument {arg} is not positive")]
    NotPositive { arg: String },
    #[error("could not certify the sign of sqrt argument {arg} within {budget} levels")]
    SignUndecided { arg: String, budget: usize },
    #[error("sqrt is only defined here for rational arguments, got {arg}")]
    IrrationalSqrt { arg: String },
    #[error(transparent)]
    Domain(#[from] DomainError),
}

impl Expr {
    /// The exact value when the expression contains no square root.
    pub fn exact(&self) -> Option<Rational> {
        Some(match self {
            Expr::Lit(q) => q.clone(),
            Expr::Add(a, b) => &a.exact()? + &b.exact()?,
            Expr::Neg(a) => -a.exact()?,
            Expr::Abs(a) => a.exact()?.abs(),
            Expr::Sqrt(_) => return None,
            Expr::NatScale(n, a) => a.exact()?.mul_int(*n),
        })
    }

    /// The real denoted by the expression. Square-root arguments are
    /// certified positive within `budget` levels first.
    pub fn eval(&self, budget: usize) -> Result<Real, EvalError> {
        Ok(match self {
            Expr::Lit(q) => Real::rational(q.clone()),
            Expr::Add(a, b) => a.eval(budget)?.add(&b.eval(budget)?),
            Expr::Neg(a) => a.eval(budget)?.neg(),
            Expr::Abs(a) => a.eval(budget)?.abs(),
            Expr::NatScale(n, a) => a.eval(budget)?.scale(*n),
            Expr::Sqrt(a) => {
                let arg = a.to_string();
                let q = a
                    .exact()
                    .ok_or_else(|| EvalError::IrrationalSqrt { arg: arg.clone() })?;
                match positive_probe(&Real::rational(q.clone()), budget)? {
                    ProbeResult::ConfirmedUpTo(_) => newton::sqrt(&q)?,
                    ProbeResult::Refuted { .. } => return Err(EvalError::NotPositive { arg }),
                    ProbeResult::Inconclusive(_) => return Err(EvalError::SignUndecided { arg, budget }),
                }
            }
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lit(n: i64, d: i64) -> Box<Expr> {
        Box::new(Expr::Lit(Rational::frac(n, d)))
    }

    #[test]
    fn sqrt_plus_negative() {
        let e = parse("sqrt(2) + -1").unwrap();
        assert_eq!(
            e,
            Expr::Add(Box::new(Expr::Sqrt(lit(2, 1))), Box::new(Expr::Neg(lit(1, 1))))
        );
    }

    #[test]
    fn abs_of_sum() {
        let e = parse("abs(1/3 + -1/2)").unwrap();
        let inner = Expr::Add(lit(1, 3), Box::new(Expr::Neg(lit(1, 2))));
        assert_eq!(e, Expr::Abs(Box::new(inner)));
        assert_eq!(e.exact(), Some(Rational::frac(1, 6)));
    }

    #[test]
    fn binary_minus_and_scaling() {
        assert_eq!(
            parse("3 - 1").unwrap(),
            Expr::Add(lit(3, 1), Box::new(Expr::Neg(lit(1, 1))))
        );
        assert_eq!(parse("2 * 3 + 1").unwrap().exact(), Some(Rational::frac(7, 1)));
        assert_eq!(parse("2 * (3 + 1)").unwrap().exact(), Some(Rational::frac(8, 1)));
        assert_eq!(parse("0.25 + 1.5").unwrap().exact(), Some(Rational::frac(7, 4)));
        assert_eq!(parse("--2").unwrap().exact(), Some(Rational::frac(2, 1)));
    }

    #[test]
    fn errors_carry_positions() {
        let cases = [
            ("1 +", 3),
            ("sqrt 2", 5),
            ("foo(1)", 0),
            ("1/0", 0),
            ("(1", 2),
            ("1 2", 2),
            ("1.5 * 2", 0),
            ("1 $ 2", 2),
            ("1/2.5", 2),
        ];
        for (src, pos) in cases {
            let e = parse(src).unwrap_err();
            assert_eq!(e.pos, pos, "{src}: {e}");
        }
    }

    #[test]
    fn sqrt_of_negative_parses_but_fails() {
        let e = parse("sqrt(-1)").unwrap();
        assert!(matches!(e.eval(64), Err(EvalError::NotPositive { .. })));
        assert!(matches!(
            parse("sqrt(0)").unwrap().eval(64),
            Err(EvalError::NotPositive { .. })
        ));
        assert!(matches!(
            parse("sqrt(sqrt(2))").unwrap().eval(64),
            Err(EvalError::IrrationalSqrt { .. })
        ));
    }
}
