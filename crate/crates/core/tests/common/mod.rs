#![allow(dead_code)]

use num_rational::BigRational;
use num_traits::ToPrimitive;
use powers_core::numeric::rat;
use powers_core::{BoundConfig, ExactElement, GroupDescriptor, Word};
use proptest::prelude::*;
use rand::Rng;

pub const GROUPS: [&str; 5] = ["F1", "F2", "F3", "Z2", "F2xZ"];

pub fn group(s: &str) -> GroupDescriptor {
    s.parse().unwrap()
}

/// Budgets small enough for thousands of estimates.
pub fn small_config() -> BoundConfig {
    BoundConfig {
        radius: 5,
        max_iterations: 30,
        moment_depth: 4,
        power_depth: 2,
        cone_length: 24,
        ball_cap: 20_000,
        support_cap: 20_000,
        ..BoundConfig::default()
    }
}

pub fn word_from_codes(g: &GroupDescriptor, codes: &[usize]) -> Word {
    let letters = g.letters();
    codes.iter().fold(g.identity(), |w, &c| g.mul(&w, &letters[c % letters.len()]).unwrap())
}

pub fn word_strategy(g: GroupDescriptor, max_len: usize) -> impl Strategy<Value = Word> + Clone {
    prop::collection::vec(0usize..64, 0..=max_len).prop_map(move |codes| word_from_codes(&g, &codes))
}

/// Elements with up to `max_terms` terms and small rational coefficients.
pub fn element_strategy(g: GroupDescriptor, max_terms: usize, max_len: usize) -> impl Strategy<Value = ExactElement> + Clone {
    prop::collection::vec((prop::collection::vec(0usize..64, 0..=max_len), -6i64..=6, 1i64..=4), 0..=max_terms)
        .prop_map(move |terms| {
            ExactElement::from_terms(
                g.clone(),
                terms.into_iter().map(|(codes, p, q)| (word_from_codes(&g, &codes), rat(p, q))),
            )
            .unwrap()
        })
}

/// Convex combinations `Σ c_k δ_{u_k}` with positive rational weights summing to 1.
pub fn positive_strategy(g: GroupDescriptor, max_terms: usize, max_len: usize) -> impl Strategy<Value = ExactElement> + Clone {
    prop::collection::vec((prop::collection::vec(0usize..64, 0..=max_len), 1i64..=5), 1..=max_terms)
        .prop_map(move |terms| positive_from(&g, terms))
}

fn positive_from(g: &GroupDescriptor, terms: Vec<(Vec<usize>, i64)>) -> ExactElement {
    let total: i64 = terms.iter().map(|t| t.1).sum();
    ExactElement::from_terms(g.clone(), terms.into_iter().map(|(codes, c)| (word_from_codes(g, &codes), rat(c, total))))
        .unwrap()
}

pub fn random_word(rng: &mut impl Rng, g: &GroupDescriptor, max_len: usize) -> Word {
    let codes: Vec<usize> = (0..rng.gen_range(0..=max_len)).map(|_| rng.gen_range(0..64)).collect();
    word_from_codes(g, &codes)
}

pub fn random_element(rng: &mut impl Rng, g: &GroupDescriptor, max_terms: usize, max_len: usize) -> ExactElement {
    let n = rng.gen_range(0..=max_terms);
    let terms: Vec<(Word, BigRational)> =
        (0..n).map(|_| (random_word(rng, g, max_len), rat(rng.gen_range(-6..=6), rng.gen_range(1..=4)))).collect();
    ExactElement::from_terms(g.clone(), terms).unwrap()
}

pub fn random_positive(rng: &mut impl Rng, g: &GroupDescriptor, max_terms: usize, max_len: usize) -> ExactElement {
    let n = rng.gen_range(1..=max_terms);
    let terms: Vec<(Vec<usize>, i64)> = (0..n)
        .map(|_| ((0..rng.gen_range(0..=max_len)).map(|_| rng.gen_range(0..64)).collect(), rng.gen_range(1..=5)))
        .collect();
    positive_from(g, terms)
}

pub fn f(q: &BigRational) -> f64 {
    q.to_f64().unwrap()
}
