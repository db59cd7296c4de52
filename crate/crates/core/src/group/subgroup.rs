//! Free bases of finitely generated subgroups of free groups via Stallings folding.
//!
//! For `x` supported in a subgroup `H`, the left regular representation of the
//! ambient group restricted to `H` is a multiple of the regular representation
//! of `H`, so norms can be computed after rewriting `x` in a free basis of `H`.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use super::free::{self, FreeWord, Letter};
use super::{GroupDescriptor, Word, MAX_FREE_RANK};

/// A free basis of the subgroup generated by a finite set of words.
#[derive(Debug, Clone)]
pub struct FreeBasis {
    ambient_rank: usize,
    basis: Vec<FreeWord>,
    /// Folded graph: (vertex, letter code) -> vertex, both orientations stored.
    edges: BTreeMap<(usize, u8), usize>,
    /// (vertex, letter code) -> basis letter, for non-tree edges only.
    labels: BTreeMap<(usize, u8), Letter>,
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn find(&mut self, mut x: usize) -> usize {
        while self.0[x] != x {
            self.0[x] = self.0[self.0[x]];
            x = self.0[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (a, b) = (self.find(a), self.find(b));
        if a != b {
            // keep the smaller id as root so the base vertex 0 stays 0
            let (lo, hi) = if a < b { (a, b) } else { (b, a) };
            self.0[hi] = lo;
        }
    }
}

impl FreeBasis {
    /// Folds the bouquet of `generators` (identity words are ignored).
    /// Returns `None` when the ambient group is not free or the basis would
    /// exceed the largest rank encodable in a letter byte.
    pub fn new(group: &GroupDescriptor, generators: &[Word]) -> Option<Self> {
        let GroupDescriptor::Free { rank } = group else {
            return None;
        };
        let mut vertices = 1usize;
        // directed edges (from, letter, to) with positive letter codes
        let mut raw: Vec<(usize, u8, usize)> = Vec::new();
        for w in generators {
            let fw = w.as_free()?;
            if fw.is_empty() {
                continue;
            }
            let mut at = 0;
            for (i, l) in fw.iter().enumerate() {
                let to = if i + 1 == fw.len() {
                    0
                } else {
                    vertices += 1;
                    vertices - 1
                };
                if l.is_inverse() {
                    raw.push((to, l.inv().code(), at));
                } else {
                    raw.push((at, l.code(), to));
                }
                at = to;
            }
        }

        let mut uf = UnionFind((0..vertices).collect());
        loop {
            let mut seen: BTreeMap<(usize, u8), usize> = BTreeMap::new();
            let mut merged = false;
            for &(a, x, b) in &raw {
                let (a, b) = (uf.find(a), uf.find(b));
                for (from, code, to) in [(a, x, b), (b, x ^ 1, a)] {
                    match seen.get(&(from, code)) {
                        Some(&t) => {
                            let (t, to) = (uf.find(t), uf.find(to));
                            if t != to {
                                uf.union(t, to);
                                merged = true;
                            }
                        }
                        None => {
                            seen.insert((from, code), to);
                        }
                    }
                }
            }
            if !merged {
                break;
            }
        }

        let undirected: BTreeSet<(usize, u8, usize)> =
            raw.iter().map(|&(a, x, b)| (uf.find(a), x, uf.find(b))).collect();
        let mut edges = BTreeMap::new();
        for &(a, x, b) in &undirected {
            edges.insert((a, x), b);
            edges.insert((b, x ^ 1), a);
        }

        // BFS spanning tree from the base vertex, letters in order a < A < b < ...
        let mut path: BTreeMap<usize, FreeWord> = BTreeMap::from([(0, FreeWord::new())]);
        let mut tree: BTreeSet<(usize, u8)> = BTreeSet::new();
        let mut queue = VecDeque::from([0usize]);
        while let Some(v) = queue.pop_front() {
            for code in 0..(2 * rank) as u8 {
                if let Some(&w) = edges.get(&(v, code)) {
                    if !path.contains_key(&w) {
                        let mut p = path[&v].clone();
                        p.push(Letter::from_code(code));
                        path.insert(w, p);
                        tree.insert((v, code));
                        tree.insert((w, code ^ 1));
                        queue.push_back(w);
                    }
                }
            }
        }

        let mut basis = Vec::new();
        let mut labels = BTreeMap::new();
        for &(a, x, b) in &undirected {
            if tree.contains(&(a, x)) {
                continue;
            }
            let index = basis.len();
            if index >= MAX_FREE_RANK {
                return None;
            }
            let letters = path[&a]
                .iter()
                .copied()
                .chain(std::iter::once(Letter::from_code(x)))
                .chain(free::inverse(&path[&b]));
            basis.push(free::reduce(letters));
            labels.insert((a, x), Letter::new(index, false));
            labels.insert((b, x ^ 1), Letter::new(index, true));
        }
        Some(FreeBasis { ambient_rank: *rank, basis, edges, labels })
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[FreeWord] {
        &self.basis
    }

    /// The free group of rank `self.rank()` (rank 1 for the trivial subgroup).
    pub fn group(&self) -> GroupDescriptor {
        GroupDescriptor::Free { rank: self.rank().max(1) }
    }

    /// True when the basis is the standard generating set of the ambient group.
    pub fn is_standard(&self) -> bool {
        self.rank() == self.ambient_rank
            && self.basis.iter().enumerate().all(|(i, w)| w.len() == 1 && w[0] == Letter::new(i, false))
    }

    /// Expresses `w` in the basis, or `None` if `w` is not in the subgroup.
    pub fn rewrite(&self, w: &Word) -> Option<Word> {
        let fw = w.as_free()?;
        let mut at = 0usize;
        let mut out = Vec::new();
        for l in fw {
            let key = (at, l.code());
            at = *self.edges.get(&key)?;
            if let Some(&b) = self.labels.get(&key) {
                out.push(b);
            }
        }
        (at == 0).then(|| Word::Free(free::reduce(out)))
    }

    /// Maps a word in the basis letters back to the ambient group.
    pub fn expand(&self, w: &Word) -> Option<Word> {
        let fw = w.as_free()?;
        let mut acc = FreeWord::new();
        for l in fw {
            let b = self.basis.get(l.generator())?;
            let piece = if l.is_inverse() { free::inverse(b) } else { b.clone() };
            acc = free::mul(&acc, &piece);
        }
        Some(Word::Free(acc))
    }
}
