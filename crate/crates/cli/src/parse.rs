//! Expression language for polynomials in `x1, x2` (aliases `x, y`).
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary ('*' unary)*
//! unary  := ('+' | '-') unary | power
//! power  := atom ('^' exponent)?
//! atom   := number | variable | '(' expr ')'
//! exponent := integer | '(' integer ['/' integer] ')'
//! number := integer ['/' integer]
//! ```

use num_traits::{One, ToPrimitive, Zero};
use rheight::{Exponent, PuiseuxPoly, Rational};
use thiserror::Error;

/// Largest integer power of a non-monomial base.
pub const MAX_POWER: u32 = 256;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("at byte {offset}: {message}")]
pub struct ParseError {
    pub offset: usize,
    pub message: String,
}

impl ParseError {
    fn new(offset: usize, message: impl Into<String>) -> Self {
        ParseError { offset, message: message.into() }
    }

    /// The source line with a caret under the offending byte.
    pub fn render(&self, source: &str) -> String {
        let col = source[..self.offset.min(source.len())].chars().count();
        format!("{source}\n{}^ {}", " ".repeat(col), self.message)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InputExpr {
    pub source: String,
    pub poly: PuiseuxPoly,
    /// Variable spellings in order of first use.
    pub variables: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Num(Rational),
    Var(u8),
    Plus,
    Minus,
    Star,
    Caret,
    LParen,
    RParen,
    End,
}

fn describe(t: &Tok) -> &'static str {
    match t {
        Tok::Num(_) => "a number",
        Tok::Var(_) => "a variable",
        Tok::Plus => "'+'",
        Tok::Minus => "'-'",
        Tok::Star => "'*'",
        Tok::Caret => "'^'",
        Tok::LParen => "'('",
        Tok::RParen => "')'",
        Tok::End => "end of input",
    }
}

fn digits(bytes: &[u8], mut i: usize) -> usize {
    while i < bytes.len() && bytes[i].is_ascii_digit() {
        i += 1;
    }
    i
}

fn lex(src: &str, names: &mut Vec<String>) -> Result<Vec<(Tok, usize)>, ParseError> {
    let b = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < b.len() {
        let c = b[i];
        let start = i;
        let tok = match c {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
                continue;
            }
            b'+' => Tok::Plus,
            b'-' => Tok::Minus,
            b'*' => Tok::Star,
            b'^' => Tok::Caret,
            b'(' => Tok::LParen,
            b')' => Tok::RParen,
            b'0'..=b'9' => {
                i = digits(b, i);
                let num: Rational = src[start..i].parse().expect("digits");
                let mut den = Rational::one();
                if i < b.len() && b[i] == b'.' {
                    return Err(ParseError::new(i, "decimal literals are not supported; write p/q"));
                }
                if i + 1 < b.len() && b[i] == b'/' && b[i + 1].is_ascii_digit() {
                    let j = digits(b, i + 1);
                    den = src[i + 1..j].parse().expect("digits");
                    if den.is_zero() {
                        return Err(ParseError::new(i + 1, "zero denominator"));
                    }
                    i = j;
                } else if i < b.len() && b[i] == b'/' {
                    return Err(ParseError::new(i, "'/' is only allowed inside a rational literal such as 2/5"));
                }
                out.push((Tok::Num(num / den), start));
                continue;
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                while i < b.len() && (b[i].is_ascii_alphanumeric() || b[i] == b'_') {
                    i += 1;
                }
                let word = &src[start..i];
                let v = match word {
                    "x1" | "x" => 1,
                    "x2" | "y" => 2,
                    _ => return Err(ParseError::new(start, format!("unknown variable '{word}' (use x1, x2, x or y)"))),
                };
                if !names.iter().any(|n| n == word) {
                    names.push(word.to_string());
                }
                out.push((Tok::Var(v), start));
                continue;
            }
            b'/' => return Err(ParseError::new(i, "'/' is only allowed inside a rational literal such as 2/5")),
            b'.' => return Err(ParseError::new(i, "decimal literals are not supported; write p/q")),
            _ => {
                let ch = src[i..].chars().next().expect("in bounds");
                return Err(ParseError::new(i, format!("unexpected character '{ch}'")));
            }
        };
        out.push((tok, start));
        i += 1;
    }
    out.push((Tok::End, src.len()));
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> (Tok, usize) {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, want: Tok) -> Result<(), ParseError> {
        if *self.peek() == want {
            self.bump();
            Ok(())
        } else {
            Err(ParseError::new(
                self.offset(),
                format!("expected {}, found {}", describe(&want), describe(self.peek())),
            ))
        }
    }

    fn expr(&mut self) -> Result<PuiseuxPoly, ParseError> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Tok::Plus => {
                    self.bump();
                    acc = &acc + &self.term()?;
                }
                Tok::Minus => {
                    self.bump();
                    acc = &acc - &self.term()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<PuiseuxPoly, ParseError> {
        let mut acc = self.unary()?;
        loop {
            match self.peek() {
                Tok::Star => {
                    self.bump();
                    acc = &acc * &self.unary()?;
                }
                Tok::Num(_) | Tok::Var(_) | Tok::LParen => {
                    return Err(ParseError::new(self.offset(), "implicit multiplication is not allowed; insert '*'"));
                }
                _ => return Ok(acc),
            }
        }
    }

    fn unary(&mut self) -> Result<PuiseuxPoly, ParseError> {
        match self.peek() {
            Tok::Minus => {
                self.bump();
                Ok(-&self.unary()?)
            }
            Tok::Plus => {
                self.bump();
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<PuiseuxPoly, ParseError> {
        let base_at = self.offset();
        let base = self.atom()?;
        if *self.peek() != Tok::Caret {
            return Ok(base);
        }
        self.bump();
        let exp_at = self.offset();
        let e = self.exponent()?;
        if *self.peek() == Tok::Caret {
            return Err(ParseError::new(self.offset(), "chained powers are ambiguous; add parentheses"));
        }
        raise(&base, &e, base_at, exp_at)
    }

    fn exponent(&mut self) -> Result<Rational, ParseError> {
        let at = self.offset();
        match self.bump().0 {
            Tok::Num(q) if q.is_integer() => Ok(q),
            Tok::Num(_) => Err(ParseError::new(at, "fractional exponents must be parenthesized, as in x1^(3/2)")),
            Tok::Minus => Err(ParseError::new(at, "negative exponents are not allowed")),
            Tok::LParen => {
                let inner_at = self.offset();
                let q = match self.bump().0 {
                    Tok::Num(q) => q,
                    Tok::Minus => return Err(ParseError::new(inner_at, "negative exponents are not allowed")),
                    t => {
                        return Err(ParseError::new(
                            inner_at,
                            format!("exponent must be a rational number p/q, found {}", describe(&t)),
                        ))
                    }
                };
                if *self.peek() != Tok::RParen {
                    return Err(ParseError::new(self.offset(), "exponent must be a single rational number p/q"));
                }
                self.bump();
                Ok(q)
            }
            t => Err(ParseError::new(at, format!("expected an exponent, found {}", describe(&t)))),
        }
    }

    fn atom(&mut self) -> Result<PuiseuxPoly, ParseError> {
        let at = self.offset();
        match self.bump().0 {
            Tok::Num(q) => Ok(PuiseuxPoly::constant(q)),
            Tok::Var(1) => Ok(PuiseuxPoly::x1()),
            Tok::Var(_) => Ok(PuiseuxPoly::x2()),
            Tok::LParen => {
                let e = self.expr()?;
                self.expect(Tok::RParen)?;
                Ok(e)
            }
            t => Err(ParseError::new(at, format!("expected a number, variable or '(', found {}", describe(&t)))),
        }
    }
}

fn raise(base: &PuiseuxPoly, e: &Rational, base_at: usize, exp_at: usize) -> Result<PuiseuxPoly, ParseError> {
    if e.is_integer() {
        let n = e
            .to_integer()
            .to_u32()
            .ok_or_else(|| ParseError::new(exp_at, "exponent is too large"))?;
        if base.len() > 1 && n > MAX_POWER {
            return Err(ParseError::new(exp_at, format!("powers of sums are limited to {MAX_POWER}")));
        }
        if base.len() == 1 {
            let (ex, c) = base.terms().next().expect("one term");
            if !c.is_one() && n > MAX_POWER {
                return Err(ParseError::new(exp_at, format!("powers of coefficients are limited to {MAX_POWER}")));
            }
            let e1 = &ex.e1 * e;
            let e2 = (ex.e2 as u64) * n as u64;
            let e2 = u32::try_from(e2).map_err(|_| ParseError::new(exp_at, "exponent is too large"))?;
            return Ok(PuiseuxPoly::from_terms([(Exponent::new(e1, e2), c.pow(n as i32))]));
        }
        return Ok(base.pow(n));
    }
    // Fractional powers only of bare x1 powers.
    let mut terms = base.terms();
    match (terms.next(), terms.next()) {
        (Some((ex, c)), None) if ex.e2 == 0 && c.is_one() && !ex.e1.is_zero() => {
            Ok(PuiseuxPoly::monomial(Rational::one(), &ex.e1 * e, 0))
        }
        (Some((ex, _)), None) if ex.e2 > 0 => {
            Err(ParseError::new(base_at, "fractional powers of x2 are not allowed"))
        }
        _ => Err(ParseError::new(base_at, "fractional powers apply only to x1 or a power of x1")),
    }
}

/// Parses an expression; the zero polynomial is rejected.
pub fn parse_expression(text: &str) -> Result<InputExpr, ParseError> {
    let mut names = Vec::new();
    let toks = lex(text, &mut names)?;
    let mut p = Parser { toks, pos: 0 };
    if *p.peek() == Tok::End {
        return Err(ParseError::new(0, "empty expression"));
    }
    let poly = p.expr()?;
    if *p.peek() != Tok::End {
        return Err(ParseError::new(p.offset(), format!("unexpected {}", describe(p.peek()))));
    }
    if poly.is_zero() {
        return Err(ParseError::new(0, "expression is the zero polynomial"));
    }
    Ok(InputExpr { source: text.to_string(), poly, variables: names })
}

/// Canonical text in `x1, x2`; `parse_expression(&render(p))` gives back `p`.
pub fn render(poly: &PuiseuxPoly) -> String {
    poly.to_string()
}

/// Text of an input file: `#` comments and blank lines are dropped, the rest joined.
pub fn strip_comments(text: &str) -> String {
    text.lines()
        .map(|l| l.split('#').next().unwrap_or("").trim())
        .filter(|l| !l.is_empty())
        .collect::<Vec<_>>()
        .join(" ")
}
