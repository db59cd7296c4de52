//! Rayleigh-quotient lower bounds by power iteration on a truncated ball.
//!
//! For `b = a*·a` and `ξ` supported in `ball(R)`, `⟨bξ, ξ⟩ = Σ_g b(g) ⟨λ(g)ξ, ξ⟩`
//! only pairs points of the ball with points of the ball, so the quotient
//! computed on the truncated product is exactly the quotient of the untruncated
//! one. Truncation between steps therefore only slows convergence.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::ops::{dot, normalize, TranslationMaps};
use super::{float_slack, BoundConfig};
use crate::algebra::{Coefficient, ExactElement};
use crate::error::{Error, Result};
use crate::group::{ball_size, GroupDescriptor, Word};

/// Upper limit on `|supp(a*a)| · |ball|`, the number of stored map entries.
pub const MAP_ENTRY_CAP: usize = 40_000_000;

pub(crate) struct PowerRun {
    pub value: f64,
    pub radius: usize,
    pub iterations: usize,
}

/// Largest radius `≤ want` whose ball fits in `cap` words.
pub(crate) fn fit_radius(g: &GroupDescriptor, want: usize, cap: usize) -> usize {
    let mut r = 0;
    while r < want && ball_size(g, r + 1).is_some_and(|s| s <= cap as u128) {
        r += 1;
    }
    r
}

/// Rayleigh-quotient lower bound on `‖λ(a)‖` with vectors supported in
/// `ball(cfg.radius)`. Fails if that ball does not fit in the configured budget.
pub fn lower_bound_power(a: &ExactElement, cfg: &BoundConfig) -> Result<f64> {
    cfg.validate()?;
    if a.is_zero() {
        return Err(Error::InvalidConfig("power iteration needs a nonzero element".into()));
    }
    let b = a.adjoint().convolve(a, cfg.support_cap)?;
    let cap = word_cap(cfg, b.support_len());
    let size = ball_size(a.group(), cfg.radius).unwrap_or(u128::MAX);
    if size > cap as u128 {
        return Err(Error::budget("power iteration ball", size.min(usize::MAX as u128) as usize, cap));
    }
    Ok(run(a, &b, cfg.radius, cfg)?.value)
}

pub(crate) fn word_cap(cfg: &BoundConfig, terms: usize) -> usize {
    cfg.ball_cap.min(MAP_ENTRY_CAP / terms.max(1))
}

pub(crate) fn run(a: &ExactElement, b: &ExactElement, radius: usize, cfg: &BoundConfig) -> Result<PowerRun> {
    let g = a.group();
    let ball = g.ball(radius, usize::MAX)?;
    let words: Vec<Word> = b.terms().keys().cloned().collect();
    let coeffs: Vec<f64> = b.terms().values().map(Coefficient::to_f64).collect();
    let maps = TranslationMaps::new(g, ball, &words);
    let which: Vec<usize> = (0..words.len()).collect();

    let mut xi = start_vector(&maps, cfg.seed);
    normalize(&mut xi);
    let mut y = vec![0.0; xi.len()];
    let mut best = 0.0f64;
    let mut prev = f64::NAN;
    let mut iterations = 0;
    for _ in 0..cfg.max_iterations {
        iterations += 1;
        maps.apply(&which, &coeffs, &xi, &mut y);
        let q = dot(&y, &xi);
        best = best.max(q);
        if (q - prev).abs() <= cfg.tolerance * q.abs() {
            break;
        }
        prev = q;
        std::mem::swap(&mut xi, &mut y);
        if normalize(&mut xi) == 0.0 {
            break;
        }
    }
    let slack = float_slack(a);
    Ok(PowerRun { value: (best.max(0.0).sqrt() - slack).max(0.0), radius, iterations })
}

/// `δ_e` plus seeded nonnegative noise on the ball of radius 2.
pub(crate) fn start_vector(maps: &TranslationMaps, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ball = maps.ball();
    let mut xi = vec![0.0; ball.len()];
    for (i, w) in ball.words().iter().enumerate() {
        if w.len() > 2 {
            break;
        }
        xi[i] = if w.is_identity() { 1.0 } else { 0.5 * rng.gen::<f64>() };
    }
    xi
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::parse_element;

    fn cfg(radius: usize) -> BoundConfig {
        BoundConfig { radius, ..BoundConfig::default() }
    }

    #[test]
    fn unitary_is_one() {
        let g: GroupDescriptor = "F2".parse().unwrap();
        let v = lower_bound_power(&parse_element(&g, "abA").unwrap(), &cfg(4)).unwrap();
        assert!((1.0 - 1e-9..=1.0).contains(&v), "{v}");
    }

    #[test]
    fn kesten_below_sqrt3_over_2() {
        let g: GroupDescriptor = "F2".parse().unwrap();
        let k = parse_element(&g, "(1/4)(a+A+b+B)").unwrap();
        let v = lower_bound_power(&k, &cfg(6)).unwrap();
        assert!(v <= 0.8661 && v > 0.81, "{v}");
    }

    #[test]
    fn z_character_oracle() {
        let z: GroupDescriptor = "Z".parse().unwrap();
        let x = parse_element(&z, "(1/2)((1)+(-1))").unwrap();
        let v = lower_bound_power(&x, &cfg(100)).unwrap();
        assert!((0.99..=1.0).contains(&v), "{v}");
    }

    #[test]
    fn ball_budget_is_enforced() {
        let g: GroupDescriptor = "F3".parse().unwrap();
        let x = parse_element(&g, "a + b").unwrap();
        let c = BoundConfig { radius: 30, ..BoundConfig::default() };
        assert!(matches!(lower_bound_power(&x, &c), Err(Error::BudgetExceeded { .. })));
    }

    #[test]
    fn deterministic_for_fixed_seed() {
        let g: GroupDescriptor = "F2".parse().unwrap();
        let x = parse_element(&g, "a - 2bA + (1/3)bb").unwrap();
        let c = cfg(5);
        assert_eq!(lower_bound_power(&x, &c).unwrap(), lower_bound_power(&x, &c).unwrap());
    }
}
