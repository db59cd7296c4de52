//! Frank-Wolfe over the simplex of conjugator weights.
//!
//! The objective `max_j ‖Σ_k c_k λ(s_k t_j s_k⁻¹)‖` is convex in `c`. Gradients
//! come from an approximate top singular pair computed on a truncated ball, so
//! iterates are only heuristics; every returned weight vector is exact and its
//! bounds are certified from scratch.

use num_rational::BigRational;
use num_traits::Zero;
use rayon::prelude::*;

use super::{conjugate_average, uniform, SearchConfig};
use crate::error::{Error, Result};
use crate::group::{FreeBasis, GroupDescriptor, Word};
use crate::norm::ops::normalize;
use crate::norm::{certified_upper, estimate, fit_radius, start_vector, BoundConfig, NormEstimate, TranslationMaps, MAP_ENTRY_CAP};
use crate::numeric::snap;

/// Ball size used for gradient computations.
const GRADIENT_BALL: usize = 50_000;
const SINGULAR_STEPS: usize = 30;
const WEIGHT_DEN: u64 = 1_000_000;

#[derive(Clone, Debug, PartialEq)]
pub struct SimplexResult {
    pub weights: Vec<BigRational>,
    /// Certified upper bound for each target.
    pub uppers: Vec<BigRational>,
}

impl SimplexResult {
    pub fn worst(&self) -> &BigRational {
        self.uppers.iter().max().expect("at least one target")
    }
}

/// Minimizes the norm of one averaged conjugate over the simplex; returns the
/// best weights found and a certified estimate of the resulting element.
/// The value is the best found for these conjugators, not an infimum over the group.
pub fn minimize_simplex(
    group: &GroupDescriptor,
    t: &Word,
    conjugators: &[Word],
    cfg: &SearchConfig,
) -> Result<(Vec<BigRational>, NormEstimate)> {
    let r = minimize_simplex_joint(group, std::slice::from_ref(t), conjugators, cfg, None)?;
    let avg = conjugate_average(group, std::slice::from_ref(t), conjugators, &r.weights)?;
    let est = estimate(&avg.per_target[0], &cfg.bounds)?;
    Ok((r.weights, est))
}

/// Shared weights for several targets, minimizing the largest certified upper
/// bound. With `good_enough`, uniform weights are returned as soon as they
/// beat that threshold.
pub fn minimize_simplex_joint(
    group: &GroupDescriptor,
    targets: &[Word],
    conjugators: &[Word],
    cfg: &SearchConfig,
    good_enough: Option<&BigRational>,
) -> Result<SimplexResult> {
    cfg.validate()?;
    if targets.iter().any(Word::is_identity) {
        return Err(Error::IdentityTarget);
    }
    if conjugators.is_empty() || targets.is_empty() {
        return Err(Error::InvalidConfig("need at least one target and one conjugator".into()));
    }
    let n = conjugators.len();
    let base = SimplexResult { weights: uniform(n), uppers: uppers(group, targets, conjugators, &uniform(n), cfg)? };
    if n == 1 || cfg.fw_iterations == 0 || good_enough.is_some_and(|e| base.worst() < e) {
        return Ok(base);
    }
    // conjugate words per target; targets whose conjugates all coincide give δ_t for any weights
    let words: Vec<Vec<Word>> =
        targets.iter().map(|t| conjugators.iter().map(|s| group.conjugate_unchecked(s, t)).collect()).collect();
    if words.iter().all(|ws| ws.iter().all(|w| *w == ws[0])) {
        return Ok(base);
    }

    let ops: Vec<Operator> = words.iter().map(|ws| Operator::new(group, ws, &cfg.bounds)).collect::<Result<_>>()?;
    let mut c = vec![1.0 / n as f64; n];
    let mut best = (f64::INFINITY, c.clone());
    for it in 0..=cfg.fw_iterations {
        let pairs: Vec<(f64, Vec<f64>, Vec<f64>)> = ops.iter().map(|op| op.top_pair(&c, cfg.bounds.seed)).collect();
        let (jstar, value) = pairs
            .iter()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |acc, (j, p)| if p.0 > acc.1 { (j, p.0) } else { acc });
        if value < best.0 {
            best = (value, c.clone());
        }
        if it == cfg.fw_iterations {
            break;
        }
        let (_, xi, eta) = &pairs[jstar];
        let grad: Vec<f64> = (0..n).map(|k| ops[jstar].maps.pairing(k, xi, eta)).collect();
        let vertex = grad.iter().enumerate().fold(0, |b, (k, g)| if *g < grad[b] { k } else { b });
        let gamma = 2.0 / (it as f64 + 2.0);
        for (k, ck) in c.iter_mut().enumerate() {
            *ck = (1.0 - gamma) * *ck + if k == vertex { gamma } else { 0.0 };
        }
    }

    let weights = snap_weights(&best.1);
    let fw = SimplexResult { uppers: uppers(group, targets, conjugators, &weights, cfg)?, weights };
    Ok(if fw.worst() < base.worst() { fw } else { base })
}

fn uppers(
    group: &GroupDescriptor,
    targets: &[Word],
    conjugators: &[Word],
    weights: &[BigRational],
    cfg: &SearchConfig,
) -> Result<Vec<BigRational>> {
    let avg = conjugate_average(group, targets, conjugators, weights)?;
    avg.per_target.par_iter().map(|a| Ok(certified_upper(a, &cfg.bounds)?.value)).collect()
}

/// Rational weights with denominators at most 10⁶, renormalized to sum to 1 exactly.
pub(crate) fn snap_weights(c: &[f64]) -> Vec<BigRational> {
    let snapped: Vec<BigRational> = c.iter().map(|&x| snap(x.max(0.0), WEIGHT_DEN)).collect();
    let sum: BigRational = snapped.iter().sum();
    if sum.is_zero() {
        return uniform(c.len());
    }
    snapped.into_iter().map(|x| x / &sum).collect()
}

/// `X(c) = Σ_k c_k λ(g_k)` on a ball, with gathers for `g_k` and `g_k⁻¹`.
struct Operator {
    maps: TranslationMaps,
    n: usize,
}

impl Operator {
    fn new(group: &GroupDescriptor, words: &[Word], bounds: &BoundConfig) -> Result<Self> {
        // work in a free basis of the generated subgroup when possible
        let (g, ws) = match FreeBasis::new(group, words) {
            Some(basis) if basis.rank() > 0 => {
                let ws: Option<Vec<Word>> = words.iter().map(|w| basis.rewrite(w)).collect();
                (basis.group(), ws.expect("generators lie in their subgroup"))
            }
            _ => (group.clone(), words.to_vec()),
        };
        let n = ws.len();
        let all: Vec<Word> = ws.iter().cloned().chain(ws.iter().map(Word::inverse)).collect();
        let cap = GRADIENT_BALL.min(bounds.ball_cap).min(MAP_ENTRY_CAP / (2 * n));
        let r = fit_radius(&g, bounds.radius, cap);
        let ball = g.ball(r, usize::MAX)?;
        Ok(Operator { maps: TranslationMaps::new(&g, ball, &all), n })
    }

    /// Approximate `(σ, ξ, η)` with `X ξ ≈ σ η` on the ball.
    fn top_pair(&self, c: &[f64], seed: u64) -> (f64, Vec<f64>, Vec<f64>) {
        let fwd: Vec<usize> = (0..self.n).collect();
        let back: Vec<usize> = (self.n..2 * self.n).collect();
        let mut xi = start_vector(&self.maps, seed);
        normalize(&mut xi);
        let mut y = vec![0.0; xi.len()];
        let mut z = vec![0.0; xi.len()];
        for _ in 0..SINGULAR_STEPS {
            self.maps.apply(&fwd, c, &xi, &mut y);
            self.maps.apply(&back, c, &y, &mut z);
            if normalize(&mut z) == 0.0 {
                break;
            }
            std::mem::swap(&mut xi, &mut z);
        }
        self.maps.apply(&fwd, c, &xi, &mut y);
        let sigma = normalize(&mut y);
        (sigma, xi, y)
    }
}
