//! Canonical textual form of polynomials and rational functions, plus the
//! expression parser used by the CLI, the cache, and the golden files.
//!
//! Output grammar: terms in descending graded-lex order, explicit `^`
//! exponents, `*` between factors, ` + `/` - ` between terms, and
//! `(num)/(den)` for proper quotients. The same text parses back to the same
//! value, and two equal values always print identically.

use num_bigint::BigInt;
use num_traits::{One, Signed};

use super::num::Rat;
use super::poly::{Monomial, MultiPoly};
use super::ratfunc::RatFunc;
use super::vars::{ParamTable, Var};

fn var_name(v: Var, params: Option<&ParamTable>) -> String {
    match v {
        Var::Par(i) => match params {
            Some(t) => t.name(i).to_string(),
            None => format!("p{i}"),
        },
        other => format!("{other}"),
    }
}

fn coeff_str(c: &Rat) -> String {
    if c.denom().is_one() {
        format!("{}", c.numer())
    } else {
        format!("{}/{}", c.numer(), c.denom())
    }
}

pub fn poly_to_string(p: &MultiPoly, params: Option<&ParamTable>) -> String {
    if p.is_zero() {
        return "0".into();
    }
    let mut out = String::new();
    // BTreeMap iterates ascending; canonical order is descending graded-lex.
    let terms: Vec<(&Monomial, &Rat)> = p.terms().collect();
    for (i, (m, c)) in terms.iter().rev().enumerate() {
        let neg = c.is_negative();
        let mag = c.abs();
        if i == 0 {
            if neg {
                out.push('-');
            }
        } else {
            out.push_str(if neg { " - " } else { " + " });
        }
        let mut factors: Vec<String> = Vec::new();
        if !mag.is_one() || m.is_unit() {
            factors.push(coeff_str(&mag));
        }
        for &(v, e) in m.pairs() {
            if e == 1 {
                factors.push(var_name(v, params));
            } else {
                factors.push(format!("{}^{}", var_name(v, params), e));
            }
        }
        out.push_str(&factors.join("*"));
    }
    out
}

pub fn ratfunc_to_string(f: &RatFunc, params: Option<&ParamTable>) -> String {
    if f.is_poly() {
        return poly_to_string(f.num(), params);
    }
    format!(
        "({})/({})",
        poly_to_string(f.num(), params),
        poly_to_string(f.den(), params)
    )
}

/// A position-annotated parse error.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub message: String,
}

impl std::fmt::Display for ParseError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}:{}: {}", self.line, self.col, self.message)
    }
}

impl std::error::Error for ParseError {}

/// Resolves bare names appearing in expressions to variables.
pub trait NameResolver {
    fn resolve(&self, name: &str) -> Option<Var>;
}

/// Name table for expressions over geometry variables `z0..`, `Q`, `x`, and
/// named parameters. The coordinate symbol of a curve file maps to `Z(0)`.
pub struct ExprNames<'a> {
    pub coord: Option<&'a str>,
    pub params: Option<&'a ParamTable>,
    pub allow_geometry: bool,
}

impl NameResolver for ExprNames<'_> {
    fn resolve(&self, name: &str) -> Option<Var> {
        if Some(name) == self.coord {
            return Some(Var::Z(0));
        }
        if let Some(t) = self.params {
            if let Some(v) = t.var(name) {
                return Some(v);
            }
        }
        if self.allow_geometry {
            if name == "Q" {
                return Some(Var::RefQ);
            }
            if name == "x" {
                return Some(Var::X);
            }
            if let Some(rest) = name.strip_prefix('z') {
                if let Ok(i) = rest.parse::<u16>() {
                    return Some(Var::Z(i));
                }
            }
        }
        None
    }
}

struct Lexer<'a> {
    src: &'a [u8],
    pos: usize,
    line: usize,
    col: usize,
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Int(BigInt),
    Name(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    End,
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str, line: usize) -> Lexer<'a> {
        Lexer { src: src.as_bytes(), pos: 0, line, col: 1 }
    }

    fn error(&self, message: impl Into<String>) -> ParseError {
        ParseError { line: self.line, col: self.col, message: message.into() }
    }

    fn bump(&mut self) -> u8 {
        let c = self.src[self.pos];
        self.pos += 1;
        self.col += 1;
        c
    }

    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn next_tok(&mut self) -> Result<(Tok, usize), ParseError> {
        while let Some(c) = self.peek() {
            if c == b' ' || c == b'\t' {
                self.bump();
            } else {
                break;
            }
        }
        let start_col = self.col;
        let Some(c) = self.peek() else {
            return Ok((Tok::End, start_col));
        };
        let t = match c {
            b'+' => {
                self.bump();
                Tok::Plus
            }
            b'-' => {
                self.bump();
                Tok::Minus
            }
            b'*' => {
                self.bump();
                Tok::Star
            }
            b'/' => {
                self.bump();
                Tok::Slash
            }
            b'^' => {
                self.bump();
                Tok::Caret
            }
            b'(' => {
                self.bump();
                Tok::LParen
            }
            b')' => {
                self.bump();
                Tok::RParen
            }
            b'0'..=b'9' => {
                let mut s = String::new();
                while let Some(c @ b'0'..=b'9') = self.peek() {
                    s.push(c as char);
                    self.bump();
                }
                Tok::Int(s.parse().expect("digits"))
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                let mut s = String::new();
                while let Some(c) = self.peek() {
                    if c.is_ascii_alphanumeric() || c == b'_' {
                        s.push(c as char);
                        self.bump();
                    } else {
                        break;
                    }
                }
                Tok::Name(s)
            }
            other => {
                return Err(self.error(format!("unexpected character '{}'", other as char)));
            }
        };
        Ok((t, start_col))
    }
}

struct Parser<'a, R: NameResolver> {
    lexer: Lexer<'a>,
    tok: Tok,
    tok_col: usize,
    names: &'a R,
}

impl<'a, R: NameResolver> Parser<'a, R> {
    fn new(src: &'a str, line: usize, names: &'a R) -> Result<Self, ParseError> {
        let mut lexer = Lexer::new(src, line);
        let (tok, tok_col) = lexer.next_tok()?;
        Ok(Parser { lexer, tok, tok_col, names })
    }

    fn error_here(&self, message: impl Into<String>) -> ParseError {
        ParseError { line: self.lexer.line, col: self.tok_col, message: message.into() }
    }

    fn advance(&mut self) -> Result<(), ParseError> {
        let (t, c) = self.lexer.next_tok()?;
        self.tok = t;
        self.tok_col = c;
        Ok(())
    }

    // expr := term (('+'|'-') term)*
    fn expr(&mut self) -> Result<RatFunc, ParseError> {
        let mut acc = self.term()?;
        loop {
            match self.tok {
                Tok::Plus => {
                    self.advance()?;
                    acc = &acc + &self.term()?;
                }
                Tok::Minus => {
                    self.advance()?;
                    acc = &acc - &self.term()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    // term := unary (('*'|'/') unary)*
    fn term(&mut self) -> Result<RatFunc, ParseError> {
        let mut acc = self.unary()?;
        loop {
            match self.tok {
                Tok::Star => {
                    self.advance()?;
                    acc = &acc * &self.unary()?;
                }
                Tok::Slash => {
                    self.advance()?;
                    let d = self.unary()?;
                    if d.is_zero() {
                        return Err(self.error_here("division by zero"));
                    }
                    acc = &acc / &d;
                }
                _ => return Ok(acc),
            }
        }
    }

    // unary := '-' unary | power
    fn unary(&mut self) -> Result<RatFunc, ParseError> {
        if self.tok == Tok::Minus {
            self.advance()?;
            return Ok(-&self.unary()?);
        }
        self.power()
    }

    // power := atom ('^' ['-'] int)?
    fn power(&mut self) -> Result<RatFunc, ParseError> {
        let base = self.atom()?;
        if self.tok != Tok::Caret {
            return Ok(base);
        }
        self.advance()?;
        let mut neg = false;
        if self.tok == Tok::Minus {
            neg = true;
            self.advance()?;
        }
        let Tok::Int(n) = self.tok.clone() else {
            return Err(self.error_here("exponent must be an integer"));
        };
        self.advance()?;
        let e: i64 = n
            .try_into()
            .map_err(|_| self.error_here("exponent out of range"))?;
        let e = if neg { -e } else { e };
        if e < 0 && base.is_zero() {
            return Err(self.error_here("zero to a negative power"));
        }
        base.pow(e).map_err(|e| self.error_here(e.to_string()))
    }

    // atom := int | name | '(' expr ')'
    fn atom(&mut self) -> Result<RatFunc, ParseError> {
        match self.tok.clone() {
            Tok::Int(n) => {
                self.advance()?;
                Ok(RatFunc::constant(Rat::from_integer(n)))
            }
            Tok::Name(name) => {
                let v = self
                    .names
                    .resolve(&name)
                    .ok_or_else(|| self.error_here(format!("unknown name '{name}'")))?;
                self.advance()?;
                Ok(RatFunc::var(v))
            }
            Tok::LParen => {
                self.advance()?;
                let inner = self.expr()?;
                if self.tok != Tok::RParen {
                    return Err(self.error_here("expected ')'"));
                }
                self.advance()?;
                Ok(inner)
            }
            Tok::End => Err(self.error_here("unexpected end of expression")),
            other => Err(self.error_here(format!("unexpected token {other:?}"))),
        }
    }
}

/// Parse an expression over integers, names, `+ - * / ^`, and parentheses.
/// `line` seeds error positions for multi-line documents.
pub fn parse_expr<R: NameResolver>(
    src: &str,
    line: usize,
    names: &R,
) -> Result<RatFunc, ParseError> {
    let mut p = Parser::new(src, line, names)?;
    let e = p.expr()?;
    if p.tok != Tok::End {
        return Err(p.error_here("trailing input after expression"));
    }
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::num::rat;

    fn names() -> ExprNames<'static> {
        ExprNames { coord: Some("z"), params: None, allow_geometry: true }
    }

    fn parse(s: &str) -> RatFunc {
        parse_expr(s, 1, &names()).unwrap()
    }

    #[test]
    fn parse_and_print_round_trip() {
        for src in [
            "z^2",
            "-z",
            "(z^2 - 1)/(z - 1)",
            "1/(z0 + z1)^2",
            "Q^2*z0 - 3/4",
            "2*z^3 + z*Q - 7",
        ] {
            let v = parse(src);
            let printed = ratfunc_to_string(&v, None);
            let back = parse(&printed);
            assert_eq!(v, back, "round trip through {printed}");
            assert_eq!(printed, ratfunc_to_string(&back, None));
        }
    }

    #[test]
    fn canonical_output_is_sorted_and_signed() {
        let v = parse("z1 - z0^2 + 1/2");
        assert_eq!(poly_to_string(v.num(), None), "-z0^2 + z1 + 1/2");
    }

    #[test]
    fn errors_carry_positions() {
        let e = parse_expr("z +* 2", 7, &names()).unwrap_err();
        assert_eq!(e.line, 7);
        assert_eq!(e.col, 4);
        let e = parse_expr("z0 + nope", 1, &names()).unwrap_err();
        assert!(e.message.contains("unknown name"));
    }

    #[test]
    fn rational_coefficients_survive() {
        let v = parse("3/4*z");
        assert_eq!(
            v,
            RatFunc::var(Var::Z(0)).scale(&rat(3, 4))
        );
    }
}
