//! Group backends: free groups, free abelian groups and direct products.
//!
//! Group elements are [`Word`]s in normal form. A [`GroupDescriptor`] owns the
//! group law; words are plain values and carry no reference to their group, so
//! every operation taking words validates them against the descriptor first.

mod ball;
pub mod free;
mod subgroup;
pub(crate) mod text;

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use smallvec::SmallVec;

use crate::error::{Error, Result};

pub use ball::{ball_size, Ball};
pub use free::{FreeWord, Letter};
pub use subgroup::FreeBasis;

/// Maximum nesting depth of direct products accepted by default.
pub const DEFAULT_MAX_PRODUCT_DEPTH: usize = 2;

/// Largest free rank whose letters fit in a byte code.
pub const MAX_FREE_RANK: usize = 127;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum GroupDescriptor {
    Free { rank: usize },
    FreeAbelian { rank: usize },
    Product(Box<GroupDescriptor>, Box<GroupDescriptor>),
}

/// A group element in normal form.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Word {
    Free(FreeWord),
    Abelian(SmallVec<[i64; 4]>),
    Product(Box<(Word, Word)>),
}

impl GroupDescriptor {
    pub fn free(rank: usize) -> Result<Self> {
        if rank == 0 || rank > MAX_FREE_RANK {
            return Err(Error::InvalidConfig(format!("free rank must be in 1..={MAX_FREE_RANK}")));
        }
        Ok(GroupDescriptor::Free { rank })
    }

    pub fn free_abelian(rank: usize) -> Result<Self> {
        if rank == 0 {
            return Err(Error::InvalidConfig("free abelian rank must be positive".into()));
        }
        Ok(GroupDescriptor::FreeAbelian { rank })
    }

    pub fn product(left: GroupDescriptor, right: GroupDescriptor) -> Result<Self> {
        let g = GroupDescriptor::Product(Box::new(left), Box::new(right));
        if g.depth() > DEFAULT_MAX_PRODUCT_DEPTH {
            return Err(Error::InvalidConfig(format!(
                "direct product nesting depth {} exceeds {}",
                g.depth(),
                DEFAULT_MAX_PRODUCT_DEPTH
            )));
        }
        Ok(g)
    }

    /// Nesting depth of direct products (0 for a single factor).
    pub fn depth(&self) -> usize {
        match self {
            GroupDescriptor::Product(l, r) => 1 + l.depth().max(r.depth()),
            _ => 0,
        }
    }

    pub fn is_free(&self) -> bool {
        matches!(self, GroupDescriptor::Free { .. })
    }

    pub fn is_abelian(&self) -> bool {
        match self {
            GroupDescriptor::Free { rank } => *rank == 1,
            GroupDescriptor::FreeAbelian { .. } => true,
            GroupDescriptor::Product(l, r) => l.is_abelian() && r.is_abelian(),
        }
    }

    /// Number of generators in the union generating set.
    pub fn num_generators(&self) -> usize {
        match self {
            GroupDescriptor::Free { rank } | GroupDescriptor::FreeAbelian { rank } => *rank,
            GroupDescriptor::Product(l, r) => l.num_generators() + r.num_generators(),
        }
    }

    pub fn identity(&self) -> Word {
        match self {
            GroupDescriptor::Free { .. } => Word::Free(FreeWord::new()),
            GroupDescriptor::FreeAbelian { rank } => Word::Abelian(SmallVec::from_elem(0, *rank)),
            GroupDescriptor::Product(l, r) => Word::Product(Box::new((l.identity(), r.identity()))),
        }
    }

    /// The word for a single generator letter of the union generating set.
    pub fn letter(&self, letter: Letter) -> Result<Word> {
        let index = letter.generator();
        match self {
            GroupDescriptor::Free { rank } => {
                if index >= *rank {
                    return Err(Error::InvalidGenerator { index, rank: *rank });
                }
                Ok(Word::Free(std::iter::once(letter).collect()))
            }
            GroupDescriptor::FreeAbelian { rank } => {
                if index >= *rank {
                    return Err(Error::InvalidGenerator { index, rank: *rank });
                }
                let mut v: SmallVec<[i64; 4]> = SmallVec::from_elem(0, *rank);
                v[index] = if letter.is_inverse() { -1 } else { 1 };
                Ok(Word::Abelian(v))
            }
            GroupDescriptor::Product(l, r) => {
                let nl = l.num_generators();
                if index < nl {
                    Ok(Word::Product(Box::new((l.letter(letter)?, r.identity()))))
                } else if index < nl + r.num_generators() {
                    let shifted = Letter::new(index - nl, letter.is_inverse());
                    Ok(Word::Product(Box::new((l.identity(), r.letter(shifted)?))))
                } else {
                    Err(Error::InvalidGenerator { index, rank: self.num_generators() })
                }
            }
        }
    }

    /// Generator letters and their inverses, in the order a < A < b < B < ...
    pub fn letters(&self) -> Vec<Word> {
        (0..2 * self.num_generators())
            .map(|code| self.letter(Letter::from_code(code as u8)).expect("in range"))
            .collect()
    }

    /// Returns the normal form of the product of `letters`.
    pub fn reduce(&self, letters: &[Letter]) -> Result<Word> {
        if let GroupDescriptor::Free { rank } = self {
            for l in letters {
                if l.generator() >= *rank {
                    return Err(Error::InvalidGenerator { index: l.generator(), rank: *rank });
                }
            }
            return Ok(Word::Free(free::reduce(letters.iter().copied())));
        }
        let mut acc = self.identity();
        for &l in letters {
            let w = self.letter(l)?;
            acc = self.mul_unchecked(&acc, &w);
        }
        Ok(acc)
    }

    /// Whether `w` has the shape of an element of this group.
    pub fn contains(&self, w: &Word) -> bool {
        match (self, w) {
            (GroupDescriptor::Free { rank }, Word::Free(fw)) => {
                fw.iter().all(|l| l.generator() < *rank) && free::is_reduced(fw)
            }
            (GroupDescriptor::FreeAbelian { rank }, Word::Abelian(v)) => v.len() == *rank,
            (GroupDescriptor::Product(l, r), Word::Product(p)) => l.contains(&p.0) && r.contains(&p.1),
            _ => false,
        }
    }

    pub fn check(&self, w: &Word) -> Result<()> {
        if self.contains(w) {
            Ok(())
        } else {
            Err(Error::GroupMismatch { expected: self.to_string() })
        }
    }

    pub fn mul(&self, x: &Word, y: &Word) -> Result<Word> {
        self.check(x)?;
        self.check(y)?;
        Ok(self.mul_unchecked(x, y))
    }

    pub fn inv(&self, x: &Word) -> Result<Word> {
        self.check(x)?;
        Ok(x.inverse())
    }

    /// `s t s⁻¹`.
    pub fn conjugate(&self, s: &Word, t: &Word) -> Result<Word> {
        self.check(s)?;
        self.check(t)?;
        Ok(self.conjugate_unchecked(s, t))
    }

    pub(crate) fn conjugate_unchecked(&self, s: &Word, t: &Word) -> Word {
        let st = self.mul_unchecked(s, t);
        self.mul_unchecked(&st, &s.inverse())
    }

    /// Product of two words already known to belong to this group.
    pub(crate) fn mul_unchecked(&self, x: &Word, y: &Word) -> Word {
        match (self, x, y) {
            (GroupDescriptor::Free { .. }, Word::Free(a), Word::Free(b)) => Word::Free(free::mul(a, b)),
            (GroupDescriptor::FreeAbelian { .. }, Word::Abelian(a), Word::Abelian(b)) => {
                Word::Abelian(a.iter().zip(b.iter()).map(|(p, q)| p + q).collect())
            }
            (GroupDescriptor::Product(l, r), Word::Product(a), Word::Product(b)) => Word::Product(Box::new((
                l.mul_unchecked(&a.0, &b.0),
                r.mul_unchecked(&a.1, &b.1),
            ))),
            _ => panic!("mul_unchecked called with words outside {self}"),
        }
    }

    pub fn parse_word(&self, s: &str) -> Result<Word> {
        text::parse_word(self, s)
    }

    /// All words of length `<= radius` in length-lexicographic order.
    pub fn ball(&self, radius: usize, max_size: usize) -> Result<Ball> {
        Ball::new(self, radius, max_size)
    }
}

impl Word {
    /// Word length with respect to the union generating set.
    pub fn len(&self) -> usize {
        match self {
            Word::Free(w) => w.len(),
            Word::Abelian(v) => v.iter().map(|e| e.unsigned_abs() as usize).sum(),
            Word::Product(p) => p.0.len() + p.1.len(),
        }
    }

    pub fn is_identity(&self) -> bool {
        self.is_empty()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn inverse(&self) -> Word {
        match self {
            Word::Free(w) => Word::Free(free::inverse(w)),
            Word::Abelian(v) => Word::Abelian(v.iter().map(|e| -e).collect()),
            Word::Product(p) => Word::Product(Box::new((p.0.inverse(), p.1.inverse()))),
        }
    }

    pub fn as_free(&self) -> Option<&FreeWord> {
        match self {
            Word::Free(w) => Some(w),
            _ => None,
        }
    }

    /// Letters of the normal form for abelian words: a^{e1} b^{e2} ...
    fn abelian_letters(v: &[i64]) -> impl Iterator<Item = u8> + '_ {
        v.iter().enumerate().flat_map(|(i, &e)| {
            let code = (2 * i + usize::from(e < 0)) as u8;
            std::iter::repeat_n(code, e.unsigned_abs() as usize)
        })
    }
}

impl Ord for Word {
    /// Length first, then lexicographic with a < A < b < B < ...
    fn cmp(&self, other: &Self) -> Ordering {
        self.len().cmp(&other.len()).then_with(|| match (self, other) {
            (Word::Free(a), Word::Free(b)) => a.iter().map(|l| l.code()).cmp(b.iter().map(|l| l.code())),
            (Word::Abelian(a), Word::Abelian(b)) => Word::abelian_letters(a).cmp(Word::abelian_letters(b)),
            (Word::Product(a), Word::Product(b)) => a.0.cmp(&b.0).then_with(|| a.1.cmp(&b.1)),
            (a, b) => variant_rank(a).cmp(&variant_rank(b)),
        })
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

fn variant_rank(w: &Word) -> u8 {
    match w {
        Word::Free(_) => 0,
        Word::Abelian(_) => 1,
        Word::Product(_) => 2,
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        text::fmt_word(self, f)
    }
}

impl fmt::Display for GroupDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        text::fmt_descriptor(self, f)
    }
}

impl FromStr for GroupDescriptor {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        text::parse_descriptor(s)
    }
}

impl Serialize for GroupDescriptor {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for GroupDescriptor {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f2() -> GroupDescriptor {
        GroupDescriptor::free(2).unwrap()
    }

    fn w(g: &GroupDescriptor, s: &str) -> Word {
        g.parse_word(s).unwrap()
    }

    #[test]
    fn reduce_examples() {
        let g = f2();
        let a = Letter::new(0, false);
        let ai = Letter::new(0, true);
        let b = Letter::new(1, false);
        let bi = Letter::new(1, true);
        assert_eq!(g.reduce(&[a, ai]).unwrap(), g.identity());
        assert_eq!(g.reduce(&[a, b, bi, a]).unwrap(), w(&g, "aa"));
        assert_eq!(g.reduce(&[bi, a, ai, b, a]).unwrap(), w(&g, "a"));
        assert!(matches!(
            g.reduce(&[Letter::new(2, false)]),
            Err(Error::InvalidGenerator { index: 2, rank: 2 })
        ));
    }

    #[test]
    fn reduce_is_idempotent() {
        let g = f2();
        let once = g.reduce(&[Letter::new(1, true), Letter::new(0, false), Letter::new(0, false)]).unwrap();
        let letters: Vec<Letter> = once.as_free().unwrap().iter().copied().collect();
        assert_eq!(g.reduce(&letters).unwrap(), once);
    }

    #[test]
    fn mul_inv_conjugate_examples() {
        let g = f2();
        assert_eq!(g.mul(&w(&g, "a"), &w(&g, "A")).unwrap(), g.identity());
        assert_eq!(g.inv(&w(&g, "ab")).unwrap(), w(&g, "BA"));
        assert_eq!(g.conjugate(&w(&g, "a"), &w(&g, "b")).unwrap(), w(&g, "abA"));
        assert_eq!(g.conjugate(&g.identity(), &w(&g, "ab")).unwrap(), w(&g, "ab"));

        let z2 = GroupDescriptor::free_abelian(2).unwrap();
        assert_eq!(z2.mul(&w(&z2, "(1,0)"), &w(&z2, "(0,1)")).unwrap(), w(&z2, "(1,1)"));
        assert_eq!(z2.conjugate(&w(&z2, "(3,-2)"), &w(&z2, "(1,5)")).unwrap(), w(&z2, "(1,5)"));
    }

    #[test]
    fn mismatched_words_are_rejected() {
        let g = f2();
        let z = GroupDescriptor::free_abelian(1).unwrap();
        assert!(matches!(g.mul(&w(&g, "a"), &w(&z, "(1)")), Err(Error::GroupMismatch { .. })));
        let f3 = GroupDescriptor::free(3).unwrap();
        assert!(matches!(g.inv(&w(&f3, "c")), Err(Error::GroupMismatch { .. })));
    }

    #[test]
    fn product_depth_is_bounded() {
        let z = GroupDescriptor::free_abelian(1).unwrap();
        let p1 = GroupDescriptor::product(f2(), z.clone()).unwrap();
        let p2 = GroupDescriptor::product(p1.clone(), z.clone()).unwrap();
        assert_eq!(p2.depth(), 2);
        assert!(GroupDescriptor::product(p2, z).is_err());
    }

    #[test]
    fn ordering_is_length_lex() {
        let g = f2();
        let mut words: Vec<Word> = ["B", "a", "e", "ab", "A", "b", "aa"].iter().map(|s| w(&g, s)).collect();
        words.sort();
        let shown: Vec<String> = words.iter().map(|x| x.to_string()).collect();
        assert_eq!(shown, ["e", "a", "A", "b", "B", "aa", "ab"]);
    }

    #[test]
    fn lengths() {
        let g = GroupDescriptor::product(f2(), GroupDescriptor::free_abelian(2).unwrap()).unwrap();
        assert_eq!(w(&g, "abA | (2,-3)").len(), 8);
        assert!(w(&g, "e | (0,0)").is_identity());
    }
}
