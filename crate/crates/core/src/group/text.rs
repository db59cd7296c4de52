//! Text formats for descriptors and words.
//!
//! Free generators are `a, b, c, d, f, g, ...` (the letter `e` is reserved for
//! the identity) with uppercase inverses. Free abelian words are exponent
//! vectors `(n1,n2,...)`; direct product words are `w | v`.

use std::fmt;

use super::free::{self, Letter};
use super::{GroupDescriptor, Word};
use crate::error::{Error, Result};

const ALPHABET: &[u8; 25] = b"abcdfghijklmnopqrstuvwxyz";

pub(crate) fn letter_char(l: Letter) -> char {
    let c = ALPHABET.get(l.generator()).copied().unwrap_or(b'?') as char;
    if l.is_inverse() {
        c.to_ascii_uppercase()
    } else {
        c
    }
}

fn char_letter(c: char) -> Option<Letter> {
    let lower = c.to_ascii_lowercase() as u8;
    let index = ALPHABET.iter().position(|&x| x == lower)?;
    Some(Letter::new(index, c.is_ascii_uppercase()))
}

pub(super) fn fmt_word(w: &Word, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    match w {
        Word::Free(fw) if fw.is_empty() => f.write_str("e"),
        Word::Free(fw) => fw.iter().try_for_each(|&l| write!(f, "{}", letter_char(l))),
        Word::Abelian(v) => {
            f.write_str("(")?;
            for (i, e) in v.iter().enumerate() {
                if i > 0 {
                    f.write_str(",")?;
                }
                write!(f, "{e}")?;
            }
            f.write_str(")")
        }
        Word::Product(p) => write!(f, "{} | {}", p.0, p.1),
    }
}

pub(super) fn fmt_descriptor(g: &GroupDescriptor, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    match g {
        GroupDescriptor::Free { rank } => write!(f, "F{rank}"),
        GroupDescriptor::FreeAbelian { rank: 1 } => f.write_str("Z"),
        GroupDescriptor::FreeAbelian { rank } => write!(f, "Z{rank}"),
        GroupDescriptor::Product(l, r) => {
            write!(f, "{l}x")?;
            if matches!(**r, GroupDescriptor::Product(..)) {
                write!(f, "({r})")
            } else {
                write!(f, "{r}")
            }
        }
    }
}

pub(super) fn parse_descriptor(s: &str) -> Result<GroupDescriptor> {
    let bytes: Vec<u8> = s.bytes().filter(|b| !b.is_ascii_whitespace()).collect();
    let mut pos = 0;
    let g = parse_desc_product(&bytes, &mut pos)?;
    if pos != bytes.len() {
        return Err(Error::parse(pos, format!("unexpected trailing input in group `{s}`")));
    }
    Ok(g)
}

fn parse_desc_product(b: &[u8], pos: &mut usize) -> Result<GroupDescriptor> {
    let mut acc = parse_desc_factor(b, pos)?;
    while *pos < b.len() && (b[*pos] == b'x' || b[*pos] == b'X') {
        *pos += 1;
        let rhs = parse_desc_factor(b, pos)?;
        acc = GroupDescriptor::product(acc, rhs)?;
    }
    Ok(acc)
}

fn parse_desc_factor(b: &[u8], pos: &mut usize) -> Result<GroupDescriptor> {
    let start = *pos;
    match b.get(*pos) {
        Some(b'(') => {
            *pos += 1;
            let g = parse_desc_product(b, pos)?;
            if b.get(*pos) != Some(&b')') {
                return Err(Error::parse(*pos, "expected `)` in group descriptor"));
            }
            *pos += 1;
            Ok(g)
        }
        Some(&kind @ (b'F' | b'Z')) => {
            *pos += 1;
            let digits_start = *pos;
            while *pos < b.len() && b[*pos].is_ascii_digit() {
                *pos += 1;
            }
            let rank = if digits_start == *pos {
                if kind == b'F' {
                    return Err(Error::parse(start, "free group needs a rank, e.g. F2"));
                }
                1
            } else {
                std::str::from_utf8(&b[digits_start..*pos])
                    .unwrap()
                    .parse::<usize>()
                    .map_err(|e| Error::parse(digits_start, e.to_string()))?
            };
            if kind == b'F' {
                if rank > ALPHABET.len() {
                    return Err(Error::InvalidConfig(format!(
                        "text format supports free rank <= {}",
                        ALPHABET.len()
                    )));
                }
                GroupDescriptor::free(rank)
            } else {
                GroupDescriptor::free_abelian(rank)
            }
        }
        _ => Err(Error::parse(start, "expected `F<k>`, `Z<d>` or `(`")),
    }
}

pub(super) fn parse_word(g: &GroupDescriptor, s: &str) -> Result<Word> {
    let trimmed = s.trim();
    let offset = s.len() - s.trim_start().len();
    match parse_word_prefix(g, trimmed, 0)? {
        Some((w, end)) if end == trimmed.len() => Ok(w),
        Some((_, end)) => Err(Error::parse(offset + end, format!("trailing input in word `{trimmed}`"))),
        None => Err(Error::parse(offset, format!("`{trimmed}` is not a word of {g}"))),
    }
}

/// Parses a word of `g` starting at byte `pos`; returns the word and the end position.
///
/// `Ok(None)` means the input at `pos` does not look like a word of `g`; an error
/// means it does but is invalid (e.g. a generator beyond the rank).
pub(crate) fn parse_word_prefix(g: &GroupDescriptor, s: &str, pos: usize) -> Result<Option<(Word, usize)>> {
    let b = s.as_bytes();
    match g {
        GroupDescriptor::Free { rank } => {
            let mut end = pos;
            while end < b.len() && b[end].is_ascii_alphabetic() {
                end += 1;
            }
            if end == pos {
                return Ok(None);
            }
            let run = &s[pos..end];
            if run == "e" {
                return Ok(Some((g.identity(), end)));
            }
            let mut letters = Vec::with_capacity(run.len());
            for (i, c) in run.char_indices() {
                let l = char_letter(c).ok_or_else(|| Error::parse(pos + i, format!("`{c}` is not a generator")))?;
                if l.generator() >= *rank {
                    return Err(Error::InvalidGenerator { index: l.generator(), rank: *rank });
                }
                letters.push(l);
            }
            Ok(Some((Word::Free(free::reduce(letters)), end)))
        }
        GroupDescriptor::FreeAbelian { rank } => {
            if b.get(pos) == Some(&b'e') && !b.get(pos + 1).is_some_and(|c| c.is_ascii_alphabetic()) {
                return Ok(Some((g.identity(), pos + 1)));
            }
            if b.get(pos) != Some(&b'(') {
                return Ok(None);
            }
            let Some(close) = s[pos..].find(')').map(|i| pos + i) else {
                return Ok(None);
            };
            let inner = &s[pos + 1..close];
            let mut v = smallvec::SmallVec::<[i64; 4]>::new();
            for part in inner.split(',') {
                match part.trim().parse::<i64>() {
                    Ok(x) => v.push(x),
                    Err(_) => return Ok(None),
                }
            }
            if v.len() != *rank {
                return Ok(None);
            }
            Ok(Some((Word::Abelian(v), close + 1)))
        }
        GroupDescriptor::Product(l, r) => {
            let Some((left, mut p)) = parse_word_prefix(l, s, pos)? else {
                return Ok(None);
            };
            while p < b.len() && b[p].is_ascii_whitespace() {
                p += 1;
            }
            if b.get(p) != Some(&b'|') {
                return Ok(None);
            }
            p += 1;
            while p < b.len() && b[p].is_ascii_whitespace() {
                p += 1;
            }
            let Some((right, end)) = parse_word_prefix(r, s, p)? else {
                return Ok(None);
            };
            Ok(Some((Word::Product(Box::new((left, right))), end)))
        }
    }
}
