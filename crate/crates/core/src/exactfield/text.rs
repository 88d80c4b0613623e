//! Canonical text rendering and parsing of field elements.
//!
//! Polynomials render in descending degree as `2*T^2+T+1`; compound
//! coefficients are parenthesised (`(w+1)*x`); quotients render as
//! `(num)/(den)`. The parser accepts that grammar plus `-`, so every rendered
//! string parses back to the same element.

use super::ring::Field;
use crate::error::{Error, Result};

fn needs_parens(s: &str) -> bool {
    s.contains('+') || s.contains('-') || s.contains('/')
}

/// Renders `sum coeffs[i] * var^i` from already-rendered coefficients
/// (`"0"` marks a zero coefficient).
pub fn render_dense(coeffs: &[String], var: &str) -> String {
    let mut terms = Vec::new();
    for (i, c) in coeffs.iter().enumerate().rev() {
        if c == "0" {
            continue;
        }
        let monomial = match i {
            0 => String::new(),
            1 => var.to_string(),
            _ => format!("{var}^{i}"),
        };
        let term = if monomial.is_empty() {
            c.clone()
        } else if c == "1" {
            monomial
        } else if needs_parens(c) {
            format!("({c})*{monomial}")
        } else {
            format!("{c}*{monomial}")
        };
        terms.push(term);
    }
    if terms.is_empty() {
        "0".to_string()
    } else {
        terms.join("+")
    }
}

/// `num` or `num/den` with minimal parentheses.
pub fn render_fraction(num: &str, den: &str) -> String {
    if den == "1" {
        return num.to_string();
    }
    let n = if needs_parens(num) { format!("({num})") } else { num.to_string() };
    let d = if needs_parens(den) || den.contains('*') {
        format!("({den})")
    } else {
        den.to_string()
    };
    format!("{n}/{d}")
}

#[derive(Clone, Debug, PartialEq)]
enum Token {
    Int(i64),
    Ident(String),
    Sym(char),
}

fn tokenize(text: &str) -> Result<Vec<Token>> {
    let mut out = Vec::new();
    let chars: Vec<char> = text.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let s: String = chars[start..i].iter().collect();
            out.push(Token::Int(s.parse().map_err(|_| Error::Parse(format!("bad integer {s}")))?));
        } else if c.is_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push(Token::Ident(chars[start..i].iter().collect()));
        } else if "+-*/^()".contains(c) {
            out.push(Token::Sym(c));
            i += 1;
        } else {
            return Err(Error::Parse(format!("unexpected character {c:?}")));
        }
    }
    Ok(out)
}

struct Parser<'a, F: Field> {
    field: &'a F,
    tokens: Vec<Token>,
    pos: usize,
    gens: &'a [(&'a str, F::Elem)],
}

impl<F: Field> Parser<'_, F> {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(&Token::Sym(c)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<F::Elem> {
        let mut acc = if self.eat('-') {
            let t = self.term()?;
            self.field.neg(&t)
        } else {
            self.term()?
        };
        loop {
            if self.eat('+') {
                let t = self.term()?;
                acc = self.field.add(&acc, &t);
            } else if self.eat('-') {
                let t = self.term()?;
                acc = self.field.sub(&acc, &t);
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<F::Elem> {
        let mut acc = self.power()?;
        loop {
            if self.eat('*') {
                let f = self.power()?;
                acc = self.field.mul(&acc, &f);
            } else if self.eat('/') {
                let f = self.power()?;
                acc = self.field.div(&acc, &f).ok_or(Error::DivisionByZero)?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn power(&mut self) -> Result<F::Elem> {
        let base = self.atom()?;
        if self.eat('^') {
            let negative = self.eat('-');
            match self.peek().cloned() {
                Some(Token::Int(e)) => {
                    self.pos += 1;
                    let e = if negative { -e } else { e };
                    self.field.pow_signed(&base, e).ok_or(Error::DivisionByZero)
                }
                other => Err(Error::Parse(format!("expected exponent, found {other:?}"))),
            }
        } else {
            Ok(base)
        }
    }

    fn atom(&mut self) -> Result<F::Elem> {
        match self.peek().cloned() {
            Some(Token::Int(n)) => {
                self.pos += 1;
                Ok(self.field.from_int(n))
            }
            Some(Token::Ident(name)) => {
                self.pos += 1;
                self.gens
                    .iter()
                    .find(|(g, _)| *g == name)
                    .map(|(_, e)| e.clone())
                    .ok_or_else(|| Error::Parse(format!("unknown symbol {name}")))
            }
            Some(Token::Sym('(')) => {
                self.pos += 1;
                let inner = self.expr()?;
                if !self.eat(')') {
                    return Err(Error::Parse("unbalanced parenthesis".into()));
                }
                Ok(inner)
            }
            Some(Token::Sym('-')) => {
                self.pos += 1;
                let inner = self.power()?;
                Ok(self.field.neg(&inner))
            }
            other => Err(Error::Parse(format!("unexpected token {other:?}"))),
        }
    }
}

/// Parses an arithmetic expression over `field` in the named generators.
pub fn parse_element<F: Field>(field: &F, text: &str, gens: &[(&str, F::Elem)]) -> Result<F::Elem> {
    let tokens = tokenize(text)?;
    if tokens.is_empty() {
        return Err(Error::Parse("empty expression".into()));
    }
    let mut parser = Parser { field, tokens, pos: 0, gens };
    let value = parser.expr()?;
    if parser.pos != parser.tokens.len() {
        return Err(Error::Parse(format!("trailing input in {text:?}")));
    }
    Ok(value)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dense_rendering() {
        let c = |v: &[&str]| v.iter().map(|s| s.to_string()).collect::<Vec<_>>();
        assert_eq!(render_dense(&c(&["1", "1", "2"]), "T"), "2*T^2+T+1");
        assert_eq!(render_dense(&c(&["0", "w+1"]), "x"), "(w+1)*x");
        assert_eq!(render_dense(&c(&["0", "0"]), "x"), "0");
        assert_eq!(render_fraction("T+1", "T^2+2"), "(T+1)/(T^2+2)");
        assert_eq!(render_fraction("1", "T"), "1/T");
    }
}
