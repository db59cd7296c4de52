//! Weighted Schur test on free groups.
//!
//! With a multiplicative weight `h(w) = Π r_ℓ` over the letters of `w`, the row
//! sums `Σ_u |x(u)| h(u⁻¹w)/h(w)` depend on `w` only through its deepest prefix
//! in the trie of support words, so the supremum over the whole group is a
//! maximum over finitely many trie nodes. Column sums are row sums of `x*`.
//! The test gives `‖λ(x)‖ ≤ (sup rows · sup cols)^{1/2}` for any positive weights.
//!
//! Weights are optimized in floating point (the objective is convex in
//! `log r`), snapped to rationals, and the final bound is evaluated exactly.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::algebra::ExactElement;
use crate::error::{Error, Result};
use crate::group::{FreeWord, GroupDescriptor};
use crate::numeric::{root_ceil, snap};

/// Refuse inputs whose trie-node/term table would exceed this many pairs.
pub const PAIR_CAP: usize = 2_000_000;
/// Per-letter weights are refined only up to this many letters (2·rank).
const REFINE_LETTERS: usize = 16;
const WEIGHT_DEN: u64 = 1 << 16;

/// Exponent vector of `h(u⁻¹w)/h(w)` for one (node, term) pair, keyed by letter code.
type Exponents = Vec<(u8, i32)>;

struct Table {
    coeffs: Vec<BigRational>,
    log_coeffs: Vec<f64>,
    /// per trie node: (term, exponents)
    rows: Vec<Vec<(usize, Exponents)>>,
}

impl Table {
    fn new(terms: &[(FreeWord, BigRational)]) -> Result<Self> {
        let mut nodes: BTreeSet<Vec<u8>> = BTreeSet::new();
        for (u, _) in terms {
            let codes: Vec<u8> = u.iter().map(|l| l.code()).collect();
            for i in 0..=codes.len() {
                nodes.insert(codes[..i].to_vec());
            }
        }
        let pairs = nodes.len().saturating_mul(terms.len());
        if pairs > PAIR_CAP {
            return Err(Error::budget("schur table", pairs, PAIR_CAP));
        }
        let rows = nodes
            .iter()
            .map(|p| {
                terms
                    .iter()
                    .enumerate()
                    .map(|(i, (u, _))| {
                        let c = u.iter().zip(p).take_while(|(l, &q)| l.code() == q).count();
                        let mut e: BTreeMap<u8, i32> = BTreeMap::new();
                        for l in &u[c..] {
                            *e.entry(l.inv().code()).or_default() += 1;
                        }
                        for l in &u[..c] {
                            *e.entry(l.code()).or_default() -= 1;
                        }
                        (i, e.into_iter().filter(|&(_, v)| v != 0).collect())
                    })
                    .collect()
            })
            .collect();
        Ok(Table {
            log_coeffs: terms.iter().map(|(_, c)| c.to_f64().unwrap_or(0.0).ln()).collect(),
            coeffs: terms.iter().map(|(_, c)| c.clone()).collect(),
            rows,
        })
    }

    /// `log max_nodes Σ |x_u| exp(e·s)`.
    fn log_sup(&self, s: &[f64]) -> f64 {
        self.rows
            .iter()
            .map(|row| {
                let vals: Vec<f64> = row
                    .iter()
                    .map(|(i, e)| self.log_coeffs[*i] + e.iter().map(|&(l, k)| s[l as usize] * k as f64).sum::<f64>())
                    .collect();
                let m = vals.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                m + vals.iter().map(|v| (v - m).exp()).sum::<f64>().ln()
            })
            .fold(f64::NEG_INFINITY, f64::max)
    }

    fn exact_sup(&self, r: &[BigRational], cache: &mut HashMap<(u8, i32), BigRational>) -> BigRational {
        let mut best = BigRational::zero();
        for row in &self.rows {
            let mut sum = BigRational::zero();
            for (i, e) in row {
                let mut t = self.coeffs[*i].clone();
                for &(l, k) in e {
                    let f = cache.entry((l, k)).or_insert_with(|| pow(&r[l as usize], k));
                    t *= &*f;
                }
                sum += t;
            }
            if sum > best {
                best = sum;
            }
        }
        best
    }

    fn letters(&self) -> BTreeSet<u8> {
        self.rows.iter().flatten().flat_map(|(_, e)| e.iter().map(|&(l, _)| l)).collect()
    }
}

fn pow(r: &BigRational, k: i32) -> BigRational {
    let p = num_traits::pow(r.clone(), k.unsigned_abs() as usize);
    if k < 0 {
        p.recip()
    } else {
        p
    }
}

/// Minimizes a convex function of one variable on `[lo, hi]`.
fn golden(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, iters: usize) -> f64 {
    let phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - phi * (hi - lo);
    let mut x2 = lo + phi * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..iters {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - phi * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + phi * (hi - lo);
            f2 = f(x2);
        }
    }
    if f1 <= f2 {
        x1
    } else {
        x2
    }
}

/// Schur-test upper bound on `‖λ(a)‖`; free groups only.
pub fn upper_bound_schur(a: &ExactElement) -> Result<BigRational> {
    let GroupDescriptor::Free { rank } = a.group() else {
        return Err(Error::WrongBackend { op: "upper_bound_schur", group: a.group().to_string() });
    };
    if a.is_zero() {
        return Ok(BigRational::zero());
    }
    let terms: Vec<(FreeWord, BigRational)> =
        a.terms().iter().map(|(w, c)| (w.as_free().expect("free word").clone(), c.abs())).collect();
    let adj: Vec<(FreeWord, BigRational)> =
        a.adjoint().terms().iter().map(|(w, c)| (w.as_free().expect("free word").clone(), c.abs())).collect();
    let rows = Table::new(&terms)?;
    let cols = Table::new(&adj)?;
    let n = 2 * rank;
    let objective = |s: &[f64]| rows.log_sup(s) + cols.log_sup(s);

    let sigma = golden(|t| objective(&vec![t; n]), -12.0, 12.0, 80);
    let mut s = vec![sigma; n];
    let letters: Vec<u8> = rows.letters().union(&cols.letters()).copied().collect();
    if letters.len() <= REFINE_LETTERS {
        for _ in 0..3 {
            for &l in &letters {
                let i = l as usize;
                let centre = s[i];
                let best = golden(
                    |t| {
                        let mut trial = s.clone();
                        trial[i] = t;
                        objective(&trial)
                    },
                    centre - 3.0,
                    centre + 3.0,
                    40,
                );
                let mut trial = s.clone();
                trial[i] = best;
                if objective(&trial) <= objective(&s) {
                    s = trial;
                }
            }
        }
    }

    let floor = BigRational::new(BigInt::one(), BigInt::from(WEIGHT_DEN));
    let r: Vec<BigRational> = s.iter().map(|&v| snap(v.exp(), WEIGHT_DEN).max(floor.clone())).collect();
    let mut cache = HashMap::new();
    let c1 = rows.exact_sup(&r, &mut cache);
    let c2 = cols.exact_sup(&r, &mut cache);
    Ok(root_ceil(&(c1 * c2), 2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::parse_element;
    use crate::numeric::int;

    fn f(rank: usize) -> GroupDescriptor {
        GroupDescriptor::free(rank).unwrap()
    }

    fn ub(g: &GroupDescriptor, s: &str) -> f64 {
        upper_bound_schur(&parse_element(g, s).unwrap()).unwrap().to_f64().unwrap()
    }

    #[test]
    fn deltas_are_one() {
        let g = f(2);
        assert_eq!(upper_bound_schur(&parse_element(&g, "e").unwrap()).unwrap(), int(1));
        let v = ub(&g, "abA");
        assert!((1.0..1.0 + 1e-6).contains(&v), "{v}");
    }

    #[test]
    fn kesten_is_nearly_exact() {
        let v = ub(&f(2), "(1/4)(a+A+b+B)");
        let truth = 3f64.sqrt() / 2.0;
        assert!(v >= truth && v - truth < 1e-6, "{v}");
    }

    #[test]
    fn free_generator_averages() {
        // ‖(1/n) Σ λ(g_i)‖ = 2√(n-1)/n for free generators, n ≥ 2
        for n in 2..=6usize {
            let g = f(n);
            let letters = "abcdfg";
            let text: Vec<String> = letters.chars().take(n).map(|c| c.to_string()).collect();
            let v = ub(&g, &format!("(1/{n})({})", text.join("+")));
            let truth = 2.0 * ((n - 1) as f64).sqrt() / n as f64;
            assert!(v >= truth - 1e-12 && v - truth < 1e-5, "n={n}: {v} vs {truth}");
        }
    }

    #[test]
    fn never_below_l2() {
        let g = f(2);
        for s in ["a - 2bA + (1/3)bb", "3 + a", "ab - ba + aab"] {
            let x = parse_element(&g, s).unwrap();
            let v = upper_bound_schur(&x).unwrap();
            assert!(&v * &v >= x.l2_squared(), "{s}");
        }
    }

    #[test]
    fn wrong_backend() {
        let z: GroupDescriptor = "Z".parse().unwrap();
        let x = parse_element(&z, "(1)").unwrap();
        assert!(matches!(upper_bound_schur(&x), Err(Error::WrongBackend { .. })));
    }
}
