//! Recursive-descent parser for formula text.
//!
//! ```text
//! formula := "inf" var "." formula | "sup" var "." formula | sub
//! sub     := unary ("-." unary)*
//! unary   := "1-" unary | rational "*" unary | rational
//!          | "min(" formula "," formula ")" | "max(" formula "," formula ")"
//!          | "d(" term "," term ")" | "(" formula ")" | quantified formula
//! term    := factor ("*" factor)*
//! factor  := var | "e" | "inv(" term ")" | "comm(" term "," term ")" | "(" term ")"
//! ```
//!
//! Rationals are written `p`, `p/q` or as decimals with a leading digit.
//! `comm(a, b)` desugars to `a*b*inv(a)*inv(b)` and `min(φ, 1)` folds to `φ`
//! since every formula already lies in `[0, 1]`.

use std::fmt;

use num_traits::{One, Zero};
use thiserror::Error;

use super::ast::{Formula, Term};
use crate::rational::{parse_rational, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{kind} at byte {position}")]
pub struct ParseError {
    pub position: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseErrorKind {
    Syntax(String),
    UnboundVariable(String),
    ConstantOutOfRange(Rational),
}

impl fmt::Display for ParseErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParseErrorKind::Syntax(msg) => write!(f, "syntax error: {msg}"),
            ParseErrorKind::UnboundVariable(v) => write!(f, "unbound variable {v:?}"),
            ParseErrorKind::ConstantOutOfRange(c) => write!(f, "constant {c} outside [0, 1]"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Num(Rational),
    LParen,
    RParen,
    Comma,
    Dot,
    Star,
    Minus,
    DotMinus,
    End,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "{s:?}"),
            Tok::Num(q) => write!(f, "number {q}"),
            Tok::LParen => write!(f, "'('"),
            Tok::RParen => write!(f, "')'"),
            Tok::Comma => write!(f, "','"),
            Tok::Dot => write!(f, "'.'"),
            Tok::Star => write!(f, "'*'"),
            Tok::Minus => write!(f, "'-'"),
            Tok::DotMinus => write!(f, "'-.'"),
            Tok::End => write!(f, "end of input"),
        }
    }
}

const KEYWORDS: [&str; 8] = ["inf", "sup", "min", "max", "d", "e", "inv", "comm"];

fn tokenize(text: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        let tok = match c {
            b'(' => Tok::LParen,
            b')' => Tok::RParen,
            b',' => Tok::Comma,
            b'.' => Tok::Dot,
            b'*' => Tok::Star,
            b'-' => {
                if bytes.get(i + 1) == Some(&b'.') {
                    i += 1;
                    Tok::DotMinus
                } else {
                    Tok::Minus
                }
            }
            b'0'..=b'9' => {
                while i + 1 < bytes.len() && bytes[i + 1].is_ascii_digit() {
                    i += 1;
                }
                let follows_digit = |j: usize| bytes.get(j).is_some_and(u8::is_ascii_digit);
                if matches!(bytes.get(i + 1), Some(b'.') | Some(b'/')) && follows_digit(i + 2) {
                    i += 2;
                    while i + 1 < bytes.len() && bytes[i + 1].is_ascii_digit() {
                        i += 1;
                    }
                }
                let lexeme = &text[start..=i];
                let value = parse_rational(lexeme).ok_or_else(|| ParseError {
                    position: start,
                    kind: ParseErrorKind::Syntax(format!("bad number {lexeme:?}")),
                })?;
                Tok::Num(value)
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                while i + 1 < bytes.len()
                    && (bytes[i + 1].is_ascii_alphanumeric() || bytes[i + 1] == b'_')
                {
                    i += 1;
                }
                Tok::Ident(text[start..=i].to_string())
            }
            _ => {
                let ch = text[i..].chars().next().unwrap_or('?');
                return Err(ParseError {
                    position: start,
                    kind: ParseErrorKind::Syntax(format!("unexpected character {ch:?}")),
                });
            }
        };
        out.push((start, tok));
        i += 1;
    }
    out.push((text.len(), Tok::End));
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    declared: Option<&'a [&'a str]>,
    bound: Vec<String>,
}

impl Parser<'_> {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].1
    }

    fn peek_at(&self, offset: usize) -> &Tok {
        let idx = (self.pos + offset).min(self.toks.len() - 1);
        &self.toks[idx].1
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].0
    }

    fn bump(&mut self) -> Tok {
        let tok = self.toks[self.pos].1.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        tok
    }

    fn error<T>(&self, msg: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError {
            position: self.offset(),
            kind: ParseErrorKind::Syntax(msg.into()),
        })
    }

    fn expect(&mut self, want: Tok) -> Result<(), ParseError> {
        if *self.peek() == want {
            self.bump();
            Ok(())
        } else {
            self.error(format!("expected {want}, found {}", self.peek()))
        }
    }

    fn keyword_is(&self, word: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == word)
    }

    fn variable_name(&mut self) -> Result<String, ParseError> {
        match self.peek().clone() {
            Tok::Ident(s) if !KEYWORDS.contains(&s.as_str()) => {
                self.bump();
                Ok(s)
            }
            other => self.error(format!("expected a variable name, found {other}")),
        }
    }

    fn formula(&mut self) -> Result<Formula, ParseError> {
        if self.keyword_is("inf") || self.keyword_is("sup") {
            let is_inf = self.keyword_is("inf");
            self.bump();
            let var = self.variable_name()?;
            self.expect(Tok::Dot)?;
            self.bound.push(var.clone());
            let body = self.formula();
            self.bound.pop();
            let body = Box::new(body?);
            return Ok(if is_inf {
                Formula::Inf(var, body)
            } else {
                Formula::Sup(var, body)
            });
        }
        let mut lhs = self.unary()?;
        while *self.peek() == Tok::DotMinus {
            self.bump();
            let rhs = self.unary()?;
            lhs = Formula::TruncSub(Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        let start = self.offset();
        match self.peek().clone() {
            Tok::Num(q) => {
                self.bump();
                match self.peek() {
                    Tok::Minus => {
                        if !q.is_one() {
                            return self.error("only '1-' is a prefix operator");
                        }
                        self.bump();
                        Ok(Formula::OneMinus(Box::new(self.unary()?)))
                    }
                    Tok::Star => {
                        self.bump();
                        Ok(Formula::Scale(q, Box::new(self.unary()?)))
                    }
                    _ => {
                        if q < Rational::zero() || q > Rational::one() {
                            return Err(ParseError {
                                position: start,
                                kind: ParseErrorKind::ConstantOutOfRange(q),
                            });
                        }
                        Ok(Formula::Const(q))
                    }
                }
            }
            Tok::LParen => {
                self.bump();
                let inner = self.formula()?;
                self.expect(Tok::RParen)?;
                Ok(inner)
            }
            Tok::Ident(word) => match word.as_str() {
                "inf" | "sup" => self.formula(),
                "min" | "max" => {
                    self.bump();
                    self.expect(Tok::LParen)?;
                    let a = self.formula()?;
                    self.expect(Tok::Comma)?;
                    let b = self.formula()?;
                    self.expect(Tok::RParen)?;
                    Ok(if word == "max" {
                        Formula::Max(Box::new(a), Box::new(b))
                    } else {
                        fold_min(a, b)
                    })
                }
                "d" => {
                    self.bump();
                    self.expect(Tok::LParen)?;
                    let s = self.term()?;
                    self.expect(Tok::Comma)?;
                    let t = self.term()?;
                    self.expect(Tok::RParen)?;
                    Ok(Formula::Dist(s, t))
                }
                _ => self.error(format!("expected a formula, found {:?}", word)),
            },
            other => self.error(format!("expected a formula, found {other}")),
        }
    }

    fn term(&mut self) -> Result<Term, ParseError> {
        let mut lhs = self.factor()?;
        while *self.peek() == Tok::Star {
            self.bump();
            let rhs = self.factor()?;
            lhs = Term::Mul(Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn factor(&mut self) -> Result<Term, ParseError> {
        let start = self.offset();
        match self.peek().clone() {
            Tok::LParen => {
                self.bump();
                let t = self.term()?;
                self.expect(Tok::RParen)?;
                Ok(t)
            }
            Tok::Ident(word) => match word.as_str() {
                "e" => {
                    self.bump();
                    Ok(Term::Identity)
                }
                "inv" if *self.peek_at(1) == Tok::LParen => {
                    self.bump();
                    self.bump();
                    let t = self.term()?;
                    self.expect(Tok::RParen)?;
                    Ok(Term::inv(t))
                }
                "comm" if *self.peek_at(1) == Tok::LParen => {
                    self.bump();
                    self.bump();
                    let a = self.term()?;
                    self.expect(Tok::Comma)?;
                    let b = self.term()?;
                    self.expect(Tok::RParen)?;
                    Ok(Term::comm(a, b))
                }
                _ => {
                    let name = self.variable_name()?;
                    if let Some(declared) = self.declared {
                        if !declared.contains(&name.as_str()) && !self.bound.contains(&name) {
                            return Err(ParseError {
                                position: start,
                                kind: ParseErrorKind::UnboundVariable(name),
                            });
                        }
                    }
                    Ok(Term::Var(name))
                }
            },
            other => self.error(format!("expected a term, found {other}")),
        }
    }
}

fn fold_min(a: Formula, b: Formula) -> Formula {
    match (a, b) {
        (Formula::Const(c), other) | (other, Formula::Const(c)) if c.is_one() => other,
        (a, b) => Formula::Min(Box::new(a), Box::new(b)),
    }
}

fn parse_impl(text: &str, declared: Option<&[&str]>) -> Result<Formula, ParseError> {
    let toks = tokenize(text)?;
    let mut parser = Parser {
        toks,
        pos: 0,
        declared,
        bound: Vec::new(),
    };
    let f = parser.formula()?;
    if *parser.peek() != Tok::End {
        return parser.error(format!("unexpected trailing {}", parser.peek()));
    }
    Ok(f)
}

/// Parses a formula; free variables are allowed.
pub fn parse(text: &str) -> Result<Formula, ParseError> {
    parse_impl(text, None)
}

/// Parses a formula whose free variables must come from `declared`.
pub fn parse_with_vars(text: &str, declared: &[&str]) -> Result<Formula, ParseError> {
    parse_impl(text, Some(declared))
}

/// Parses a sentence: every variable must be bound by a quantifier.
pub fn parse_sentence(text: &str) -> Result<Formula, ParseError> {
    parse_impl(text, Some(&[]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rational};

    fn x() -> Term {
        Term::var("x")
    }
    fn y() -> Term {
        Term::var("y")
    }

    #[test]
    fn eta_body_folds_outer_min() {
        let f = parse("min(2*d(comm(x,y), e), 1)").unwrap();
        assert_eq!(
            f,
            Formula::scale(int(2), Formula::dist(Term::comm(x(), y()), Term::Identity))
        );
    }

    #[test]
    fn sigma2_sentence() {
        let f = parse_sentence("inf x. sup y. d(x*y, y*x)").unwrap();
        assert_eq!(
            f,
            Formula::inf(
                "x",
                Formula::sup("y", Formula::dist(Term::mul(x(), y()), Term::mul(y(), x())))
            )
        );
        assert!(f.is_sigma2());
    }

    #[test]
    fn trivial_distance() {
        assert_eq!(
            parse("d(e, e)").unwrap(),
            Formula::dist(Term::Identity, Term::Identity)
        );
    }

    #[test]
    fn connectives() {
        let f = parse("1-d(x,e) -. 1/2 -. 0.25").unwrap();
        let d = Formula::dist(x(), Term::Identity);
        assert_eq!(
            f,
            Formula::trunc_sub(
                Formula::trunc_sub(Formula::one_minus(d), Formula::Const(rational(1, 2))),
                Formula::Const(rational(1, 4))
            )
        );
        let g = parse("max(3/2*d(x, y), min(d(x,e), 1/3))").unwrap();
        assert!(matches!(g, Formula::Max(..)));
        let h = parse("1-sup y. d(x, y)").unwrap();
        assert!(matches!(h, Formula::OneMinus(_)));
    }

    #[test]
    fn term_products_are_left_associative() {
        let f = parse("d(x*y*x, (x*y)*x)").unwrap();
        let left = Term::mul(Term::mul(x(), y()), x());
        assert_eq!(f, Formula::dist(left.clone(), left));
        let g = parse("d(x*(y*x), e)").unwrap();
        assert_eq!(
            g,
            Formula::dist(Term::mul(x(), Term::mul(y(), x())), Term::Identity)
        );
    }

    #[test]
    fn errors_carry_positions() {
        let err = parse("d(x, ").unwrap_err();
        assert_eq!(err.position, 5);
        assert!(matches!(err.kind, ParseErrorKind::Syntax(_)));

        let err = parse_sentence("sup x. d(x, y)").unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::UnboundVariable("y".into()));
        assert_eq!(err.position, 12);

        let err = parse("3/2").unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::ConstantOutOfRange(rational(3, 2)));

        assert!(parse("2-d(x,e)").is_err());
        assert!(parse("d(x, e) extra").is_err());
        assert!(parse("d(x, e) $").is_err());
        assert!(parse("inf d. d(e, e)").is_err());
        assert!(parse_with_vars("d(x, y)", &["x", "y"]).is_ok());
        assert!(parse_with_vars("d(x, z)", &["x", "y"]).is_err());
    }

    #[test]
    fn printed_text_parses_back() {
        for text in [
            "inf x. sup y. d(x*y, y*x)",
            "1-(d(x, e) -. 1/2)",
            "2*d(x*y*inv(x)*inv(y), e)",
            "max(sup z. d(z, x), 1/3)",
        ] {
            let f = parse(text).unwrap();
            assert_eq!(f.to_string(), text);
            assert_eq!(parse(&f.to_string()).unwrap(), f);
        }
    }
}
