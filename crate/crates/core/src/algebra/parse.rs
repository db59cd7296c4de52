//! Inline element grammar:
//!
//! ```text
//! expr   := ['+' | '-'] term (('+' | '-') term)*
//! term   := factor (['*'] factor)*          juxtaposition is the group-ring product
//! factor := number | word | '(' expr ')'
//! number := 3 | 1/4 | 0.25
//! ```
//!
//! A parenthesized token is read as a word first, so `(1)` in `Z` is the
//! generator while `(1/2)` is a scalar.

use num_rational::BigRational;

use super::{ExactElement, DEFAULT_SUPPORT_CAP};
use crate::error::{Error, Result};
use crate::group::text::parse_word_prefix;
use crate::group::GroupDescriptor;
use crate::numeric::parse_rational;

pub fn parse_element(group: &GroupDescriptor, s: &str) -> Result<ExactElement> {
    let mut p = Parser { group, s, pos: 0 };
    let e = p.expr()?;
    p.skip_ws();
    if p.pos != s.len() {
        return Err(Error::parse(p.pos, format!("unexpected `{}`", &s[p.pos..])));
    }
    Ok(e)
}

struct Parser<'a> {
    group: &'a GroupDescriptor,
    s: &'a str,
    pos: usize,
}

impl Parser<'_> {
    fn peek(&self) -> Option<u8> {
        self.s.as_bytes().get(self.pos).copied()
    }

    fn skip_ws(&mut self) {
        while self.peek().is_some_and(|c| c.is_ascii_whitespace()) {
            self.pos += 1;
        }
    }

    fn scalar(&self, q: BigRational) -> Result<ExactElement> {
        let e = ExactElement::delta(self.group, &self.group.identity())?;
        Ok(e.scale(&q))
    }

    fn expr(&mut self) -> Result<ExactElement> {
        self.skip_ws();
        let mut negate = false;
        match self.peek() {
            Some(b'-') => {
                negate = true;
                self.pos += 1;
            }
            Some(b'+') => self.pos += 1,
            _ => {}
        }
        let mut acc = self.term()?;
        if negate {
            acc = acc.scale(&BigRational::from_integer((-1).into()));
        }
        loop {
            self.skip_ws();
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    let t = self.term()?;
                    acc = acc.add(&t)?;
                }
                Some(b'-') => {
                    self.pos += 1;
                    let t = self.term()?;
                    acc = acc.sub(&t)?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<ExactElement> {
        let mut acc = self.factor()?;
        loop {
            self.skip_ws();
            match self.peek() {
                Some(b'*') => {
                    self.pos += 1;
                    let f = self.factor()?;
                    acc = acc.convolve(&f, DEFAULT_SUPPORT_CAP)?;
                }
                Some(c) if c == b'(' || c == b'.' || c.is_ascii_alphanumeric() => {
                    let f = self.factor()?;
                    acc = acc.convolve(&f, DEFAULT_SUPPORT_CAP)?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn factor(&mut self) -> Result<ExactElement> {
        self.skip_ws();
        let start = self.pos;
        if let Some((w, end)) = parse_word_prefix(self.group, self.s, self.pos)? {
            self.pos = end;
            return ExactElement::delta(self.group, &w);
        }
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                self.skip_ws();
                if self.peek() != Some(b')') {
                    return Err(Error::parse(self.pos, "expected `)`"));
                }
                self.pos += 1;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => {
                let b = self.s.as_bytes();
                let mut end = self.pos;
                while end < b.len() && (b[end].is_ascii_digit() || b[end] == b'.' || b[end] == b'/') {
                    end += 1;
                }
                let text = &self.s[self.pos..end];
                let q = parse_rational(text).ok_or_else(|| Error::parse(start, format!("bad number `{text}`")))?;
                self.pos = end;
                self.scalar(q)
            }
            Some(c) => Err(Error::parse(start, format!("unexpected `{}`", c as char))),
            None => Err(Error::parse(start, "unexpected end of input")),
        }
    }
}
