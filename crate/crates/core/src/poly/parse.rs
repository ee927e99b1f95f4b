//! Recursive-descent parser for the polynomial grammar:
//!
//! ```text
//! poly   := sign? term (sign term)*
//! term   := factor ('*' factor)*
//! factor := integer | '(' ext ')' | 'x' index ('^' integer)?
//! ext    := sign? aterm (sign aterm)*       aterm := afac ('*' afac)*
//! afac   := integer | 'a' ('^' integer)?
//! ```
//!
//! Whitespace is ignored. Integers must already be reduced modulo `p`.

use thiserror::Error;

use crate::field::{Field, FieldElement};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("unexpected {found} at position {pos}")]
    Unexpected { pos: usize, found: String },
    #[error("coefficient {value} at position {pos} is not in GF({p})")]
    CoefficientOutOfField { pos: usize, value: String, p: u64 },
    #[error("variable index must be at least 1 (position {0})")]
    ZeroIndex(usize),
    #[error("generator `a` used over the prime field (position {0})")]
    NoGenerator(usize),
    #[error("number too large at position {0}")]
    Overflow(usize),
}

type RawTerm = (Vec<u64>, FieldElement);

struct Parser<'a> {
    field: &'a Field,
    chars: Vec<(usize, char)>,
    at: usize,
}

impl<'a> Parser<'a> {
    fn new(field: &'a Field, text: &str) -> Self {
        let chars = text
            .char_indices()
            .filter(|(_, c)| !c.is_whitespace())
            .collect();
        Parser {
            field,
            chars,
            at: 0,
        }
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.at).map(|&(_, c)| c)
    }

    fn pos(&self) -> usize {
        self.chars.get(self.at).map(|&(i, _)| i).unwrap_or_else(|| {
            self.chars
                .last()
                .map(|&(i, c)| i + c.len_utf8())
                .unwrap_or(0)
        })
    }

    fn unexpected(&self) -> ParseError {
        ParseError::Unexpected {
            pos: self.pos(),
            found: self
                .peek()
                .map(|c| format!("`{c}`"))
                .unwrap_or_else(|| "end of input".into()),
        }
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.at += 1;
            true
        } else {
            false
        }
    }

    fn sign(&mut self) -> Option<bool> {
        if self.eat('+') {
            Some(false)
        } else if self.eat('-') {
            Some(true)
        } else {
            None
        }
    }

    fn integer(&mut self) -> Result<(u64, usize), ParseError> {
        let start = self.pos();
        let mut value: u64 = 0;
        let mut any = false;
        while let Some(d) = self.peek().and_then(|c| c.to_digit(10)) {
            value = value
                .checked_mul(10)
                .and_then(|v| v.checked_add(d as u64))
                .ok_or(ParseError::Overflow(start))?;
            self.at += 1;
            any = true;
        }
        if any {
            Ok((value, start))
        } else {
            Err(self.unexpected())
        }
    }

    fn coefficient(&self, value: u64, pos: usize) -> Result<FieldElement, ParseError> {
        let p = self.field.characteristic();
        if value >= p {
            return Err(ParseError::CoefficientOutOfField {
                pos,
                value: value.to_string(),
                p,
            });
        }
        Ok(self.field.from_u64(value))
    }

    fn poly(&mut self) -> Result<Vec<RawTerm>, ParseError> {
        let mut terms = Vec::new();
        let mut negate = self.sign().unwrap_or(false);
        loop {
            let (e, mut c) = self.term()?;
            if negate {
                c = self.field.neg(c);
            }
            terms.push((e, c));
            match self.sign() {
                Some(n) => negate = n,
                None => break,
            }
        }
        if self.peek().is_some() {
            return Err(self.unexpected());
        }
        Ok(terms)
    }

    fn term(&mut self) -> Result<RawTerm, ParseError> {
        let f = self.field;
        let mut exps: Vec<u64> = Vec::new();
        let mut coeff = f.one();
        loop {
            match self.peek() {
                Some('x') => {
                    let vpos = self.pos();
                    self.at += 1;
                    let (idx, _) = self.integer()?;
                    if idx == 0 {
                        return Err(ParseError::ZeroIndex(vpos));
                    }
                    let e = if self.eat('^') { self.integer()?.0 } else { 1 };
                    let idx = idx as usize;
                    if exps.len() < idx {
                        exps.resize(idx, 0);
                    }
                    exps[idx - 1] = exps[idx - 1]
                        .checked_add(e)
                        .ok_or(ParseError::Overflow(vpos))?;
                }
                Some('(') => {
                    self.at += 1;
                    let c = self.ext()?;
                    if !self.eat(')') {
                        return Err(self.unexpected());
                    }
                    coeff = f.mul(coeff, c);
                }
                Some(c) if c.is_ascii_digit() => {
                    let (v, pos) = self.integer()?;
                    coeff = f.mul(coeff, self.coefficient(v, pos)?);
                }
                _ => return Err(self.unexpected()),
            }
            if !self.eat('*') {
                break;
            }
        }
        Ok((exps, coeff))
    }

    fn ext(&mut self) -> Result<FieldElement, ParseError> {
        let f = self.field;
        let mut acc = f.zero();
        let mut negate = self.sign().unwrap_or(false);
        loop {
            let mut t = f.one();
            loop {
                match self.peek() {
                    Some('a') => {
                        let pos = self.pos();
                        self.at += 1;
                        let gen = f.generator().ok_or(ParseError::NoGenerator(pos))?;
                        let e = if self.eat('^') { self.integer()?.0 } else { 1 };
                        t = f.mul(t, f.pow(gen, e));
                    }
                    Some(c) if c.is_ascii_digit() => {
                        let (v, pos) = self.integer()?;
                        t = f.mul(t, self.coefficient(v, pos)?);
                    }
                    _ => return Err(self.unexpected()),
                }
                if !self.eat('*') {
                    break;
                }
            }
            acc = if negate { f.sub(acc, t) } else { f.add(acc, t) };
            match self.sign() {
                Some(n) => negate = n,
                None => break,
            }
        }
        Ok(acc)
    }
}

/// Terms with exponent vectors as long as the largest index they mention.
pub(crate) fn parse_poly(field: &Field, text: &str) -> Result<Vec<RawTerm>, ParseError> {
    Parser::new(field, text).poly()
}

/// A single field element written as a polynomial-grammar constant, e.g. `3`,
/// `(2*a+1)` or `-1`.
pub fn parse_element(field: &Field, text: &str) -> Result<FieldElement, ParseError> {
    let terms = parse_poly(field, text)?;
    if terms.iter().any(|(e, _)| e.iter().any(|&x| x > 0)) {
        return Err(ParseError::Unexpected {
            pos: 0,
            found: "variable in a constant".into(),
        });
    }
    Ok(field.sum(terms.into_iter().map(|(_, c)| c)))
}
