use std::collections::{HashMap, HashSet};

use super::free::{self, sphere_size};
use super::{GroupDescriptor, Word};
use crate::error::{Error, Result};

/// All words of length at most `radius`, indexed in length-lexicographic order.
/// Index 0 is the identity.
#[derive(Debug, Clone)]
pub struct Ball {
    radius: usize,
    words: Vec<Word>,
    index: BallIndex,
}

#[derive(Debug, Clone)]
enum BallIndex {
    /// Free groups rank words arithmetically; `offsets[n]` is the index of the first word of length n.
    Free { rank: usize, offsets: Vec<u64> },
    Map(HashMap<Word, u32>),
}

/// Size of the ball of radius `radius`, or `None` if it does not fit in `u128`
/// (free groups have a closed form, other backends are enumerated).
pub fn ball_size(g: &GroupDescriptor, radius: usize) -> Option<u128> {
    match g {
        GroupDescriptor::Free { rank } => {
            (0..=radius).try_fold(0u128, |acc, n| acc.checked_add(sphere_size(*rank, n)))
        }
        GroupDescriptor::FreeAbelian { rank } => {
            // lattice points of l1 norm <= radius in Z^d
            let mut count = vec![vec![0u128; radius + 1]; *rank + 1];
            count[0] = vec![1; radius + 1];
            for d in 1..=*rank {
                for r in 0..=radius {
                    let mut c = count[d - 1][r];
                    for k in 1..=r {
                        c = c.checked_add(2u128.checked_mul(count[d - 1][r - k])?)?;
                    }
                    count[d][r] = c;
                }
            }
            Some(count[*rank][radius])
        }
        GroupDescriptor::Product(l, r) => {
            let mut total = 0u128;
            for i in 0..=radius {
                let sl = sphere(l, i)?;
                total = total.checked_add(sl.checked_mul(ball_size(r, radius - i)?)?)?;
            }
            Some(total)
        }
    }
}

fn sphere(g: &GroupDescriptor, n: usize) -> Option<u128> {
    let inner = ball_size(g, n)?;
    let below = if n == 0 { 0 } else { ball_size(g, n - 1)? };
    Some(inner - below)
}

impl Ball {
    pub(super) fn new(g: &GroupDescriptor, radius: usize, max_size: usize) -> Result<Self> {
        let size = ball_size(g, radius).unwrap_or(u128::MAX);
        if size > max_size as u128 {
            return Err(Error::budget("ball", size.min(usize::MAX as u128) as usize, max_size));
        }
        match g {
            GroupDescriptor::Free { rank } => Ok(Self::free(*rank, radius, size as usize)),
            _ => Ok(Self::generic(g, radius, size as usize)),
        }
    }

    fn free(rank: usize, radius: usize, size: usize) -> Self {
        let mut words = Vec::with_capacity(size);
        let mut offsets = Vec::with_capacity(radius + 2);
        words.push(Word::Free(free::FreeWord::new()));
        offsets.push(0);
        let mut layer_start = 0;
        for _ in 0..radius {
            offsets.push(words.len() as u64);
            let layer_end = words.len();
            for i in layer_start..layer_end {
                let base = words[i].as_free().unwrap().clone();
                for code in 0..(2 * rank) as u8 {
                    let l = free::Letter::from_code(code);
                    if base.last() == Some(&l.inv()) {
                        continue;
                    }
                    let mut w = base.clone();
                    w.push(l);
                    words.push(Word::Free(w));
                }
            }
            layer_start = layer_end;
        }
        offsets.push(words.len() as u64);
        Ball { radius, words, index: BallIndex::Free { rank, offsets } }
    }

    fn generic(g: &GroupDescriptor, radius: usize, size: usize) -> Self {
        let letters = g.letters();
        let mut words = Vec::with_capacity(size);
        words.push(g.identity());
        let mut seen: HashSet<Word> = HashSet::from([g.identity()]);
        let mut layer = vec![g.identity()];
        for n in 1..=radius {
            let mut next = Vec::new();
            for w in &layer {
                for x in &letters {
                    let y = g.mul_unchecked(x, w);
                    if y.len() == n && seen.insert(y.clone()) {
                        next.push(y);
                    }
                }
            }
            next.sort();
            words.extend(next.iter().cloned());
            layer = next;
        }
        let map = words.iter().enumerate().map(|(i, w)| (w.clone(), i as u32)).collect();
        Ball { radius, words, index: BallIndex::Map(map) }
    }

    pub fn radius(&self) -> usize {
        self.radius
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn words(&self) -> &[Word] {
        &self.words
    }

    pub fn word(&self, i: usize) -> &Word {
        &self.words[i]
    }

    pub fn index_of(&self, w: &Word) -> Option<usize> {
        if w.len() > self.radius {
            return None;
        }
        match &self.index {
            BallIndex::Free { rank, offsets } => {
                let fw = w.as_free()?;
                Some((offsets[fw.len()] + free::rank_in_sphere(*rank, fw)) as usize)
            }
            BallIndex::Map(m) => m.get(w).map(|&i| i as usize),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn free_ball_sizes() {
        let f2 = GroupDescriptor::free(2).unwrap();
        assert_eq!(f2.ball(0, 10).unwrap().len(), 1);
        assert_eq!(f2.ball(1, 10).unwrap().len(), 5);
        // 2·3^R − 1
        assert_eq!(f2.ball(3, 1000).unwrap().len(), 53);
        for k in 2..=4usize {
            let g = GroupDescriptor::free(k).unwrap();
            for r in 0..=6usize {
                let q = 2 * k as u128 - 1;
                let closed = 1 + 2 * k as u128 * (q.pow(r as u32) - 1) / (2 * k as u128 - 2);
                if closed > 200_000 {
                    continue;
                }
                let ball = g.ball(r, 200_000).unwrap();
                assert_eq!(ball.len() as u128, closed, "F{k} radius {r}");
            }
        }
    }

    #[test]
    fn ball_is_sorted_and_indexed() {
        for g in ["F2", "Z2", "F2xZ"] {
            let g: GroupDescriptor = g.parse().unwrap();
            let ball = g.ball(3, 100_000).unwrap();
            assert!(ball.word(0).is_identity());
            assert!(ball.words().windows(2).all(|p| p[0] < p[1]));
            for (i, w) in ball.words().iter().enumerate() {
                assert_eq!(ball.index_of(w), Some(i));
            }
            assert_eq!(ball.len() as u128, ball_size(&g, 3).unwrap());
        }
    }

    #[test]
    fn budget_is_enforced() {
        let f2 = GroupDescriptor::free(2).unwrap();
        assert!(matches!(f2.ball(3, 52), Err(Error::BudgetExceeded { size: 53, cap: 52, .. })));
    }

    #[test]
    fn abelian_sizes() {
        let z = GroupDescriptor::free_abelian(1).unwrap();
        assert_eq!(ball_size(&z, 100), Some(201));
        let z2 = GroupDescriptor::free_abelian(2).unwrap();
        // 2R^2 + 2R + 1
        assert_eq!(ball_size(&z2, 4), Some(41));
    }
}
