//! Reduced words in free groups, packed one byte per letter.

use smallvec::SmallVec;

/// A signed generator letter. Code `2i` is generator `i`, code `2i + 1` its inverse.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Letter(u8);

impl Letter {
    pub fn new(generator: usize, inverse: bool) -> Self {
        debug_assert!(generator < 128);
        Letter((2 * generator + usize::from(inverse)) as u8)
    }

    pub fn from_code(code: u8) -> Self {
        Letter(code)
    }

    pub fn code(self) -> u8 {
        self.0
    }

    pub fn generator(self) -> usize {
        (self.0 >> 1) as usize
    }

    pub fn is_inverse(self) -> bool {
        self.0 & 1 == 1
    }

    pub fn inv(self) -> Self {
        Letter(self.0 ^ 1)
    }
}

pub type FreeWord = SmallVec<[Letter; 16]>;

pub fn is_reduced(w: &[Letter]) -> bool {
    w.windows(2).all(|p| p[0] != p[1].inv())
}

pub fn reduce(letters: impl IntoIterator<Item = Letter>) -> FreeWord {
    let mut out = FreeWord::new();
    for l in letters {
        if out.last() == Some(&l.inv()) {
            out.pop();
        } else {
            out.push(l);
        }
    }
    out
}

/// Number of letters cancelled when forming `a · b` for reduced `a`, `b`.
pub fn cancellation(a: &[Letter], b: &[Letter]) -> usize {
    a.iter().rev().zip(b.iter()).take_while(|(x, y)| **x == y.inv()).count()
}

pub fn mul(a: &[Letter], b: &[Letter]) -> FreeWord {
    let c = cancellation(a, b);
    let mut out = FreeWord::with_capacity(a.len() + b.len() - 2 * c);
    out.extend_from_slice(&a[..a.len() - c]);
    out.extend_from_slice(&b[c..]);
    out
}

pub fn inverse(w: &[Letter]) -> FreeWord {
    w.iter().rev().map(|l| l.inv()).collect()
}

/// Number of reduced words of length exactly `n` in the free group of rank `rank`.
pub fn sphere_size(rank: usize, n: usize) -> u128 {
    if n == 0 {
        return 1;
    }
    let q = (2 * rank - 1) as u128;
    (2 * rank as u128).saturating_mul(q.saturating_pow((n - 1) as u32))
}

/// Position of a reduced word among the words of its length, in lexicographic order.
///
/// Letter codes after the first are re-indexed to skip the inverse of the
/// previous letter, which makes the map a bijection onto `0..sphere_size`.
pub fn rank_in_sphere(rank: usize, w: &[Letter]) -> u64 {
    let q = (2 * rank - 1) as u64;
    let mut idx = 0u64;
    let mut prev: Option<Letter> = None;
    for &l in w {
        let digit = match prev {
            None => l.code() as u64,
            Some(p) => {
                let forbidden = p.inv().code();
                let c = l.code();
                (if c < forbidden { c } else { c - 1 }) as u64
            }
        };
        idx = if prev.is_none() { digit } else { idx * q + digit };
        prev = Some(l);
    }
    idx
}
