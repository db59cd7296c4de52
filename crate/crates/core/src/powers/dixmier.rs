//! Greedy averaging over group unitaries toward the trace:
//! `a_{i+1} = (a_i + δ_s a_i δ_{s⁻¹}) / 2`, choosing `s` from a fixed pool to
//! minimize the certified upper bound of `‖a_{i+1} − τ₀(a)·δ_e‖`.

use num_rational::BigRational;
use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde::Serialize;

use super::{centered, SearchConfig};
use crate::algebra::ExactElement;
use crate::error::{Error, Result};
use crate::group::Word;
use crate::norm::{certified_upper, estimate, quick_upper, NormEstimate};
use crate::numeric::{fmt_rational, rat};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DixmierStep {
    pub conjugator: String,
    /// Certified upper bound of the distance after this step, as `p/q`.
    pub distance: String,
    pub distance_f64: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DixmierReport {
    /// `τ₀(a)` as `p/q`; preserved exactly by every step.
    pub trace: String,
    pub initial_distance: String,
    pub initial_distance_f64: f64,
    pub steps: Vec<DixmierStep>,
    pub success: bool,
    /// Why the loop ended: `converged`, `stalled` or `budget`.
    pub stop_reason: String,
    /// Two-sided estimate of the final distance `‖a_n − τ₀(a)·δ_e‖`.
    pub final_estimate: NormEstimate,
    pub final_support: usize,
}

impl DixmierReport {
    /// Certified distances, starting with the initial one.
    pub fn distances(&self) -> Vec<f64> {
        std::iter::once(self.initial_distance_f64).chain(self.steps.iter().map(|s| s.distance_f64)).collect()
    }
}

/// Pool: each seed word `g` raised to the powers `1, 2, 4, …` up to
/// `cfg.dixmier_max_power`, without duplicates, in seed order.
fn pool(a: &ExactElement, cfg: &SearchConfig) -> Result<Vec<Word>> {
    let g = a.group();
    let mut out: Vec<Word> = Vec::new();
    for s in cfg.seed_words(g)? {
        let mut p = s;
        let mut e = 1u32;
        while e <= cfg.dixmier_max_power {
            if !out.contains(&p) {
                out.push(p.clone());
            }
            p = g.mul_unchecked(&p, &p);
            e = e.saturating_mul(2);
        }
    }
    Ok(out)
}

/// Candidates per step that get the full (slow) certified bound.
const CERTIFIED_CANDIDATES: usize = 3;

fn as_f64(q: &BigRational) -> f64 {
    crate::numeric::to_f64_up(q)
}

/// Runs at most `cfg.dixmier_steps` greedy steps, accepting a step only if it
/// does not raise the certified distance (ties are needed: for `δ_t` the first
/// average of two free conjugates still has norm 1). Stalls when every
/// candidate is worse or leaves the element unchanged; succeeds once the
/// distance is below `cfg.epsilon`.
pub fn dixmier_average(a: &ExactElement, cfg: &SearchConfig) -> Result<DixmierReport> {
    cfg.validate()?;
    let tau = a.trace();
    let half = rat(1, 2);
    let candidates = pool(a, cfg)?;

    let mut x = centered(a)?;
    let mut dist = certified_upper(&x, &cfg.bounds)?.value;
    let initial = dist.clone();
    let mut steps = Vec::new();
    let mut stop = "budget";
    for _ in 0..cfg.dixmier_steps {
        if dist < cfg.epsilon {
            break;
        }
        // rank by a fast bound, then certify the most promising candidates fully
        let mut screened: Vec<(usize, BigRational, ExactElement)> = candidates
            .par_iter()
            .enumerate()
            .map(|(i, s)| -> Result<Option<(usize, BigRational, ExactElement)>> {
                let c = x.conjugate_by(s)?;
                if c == x {
                    return Ok(None);
                }
                let next = x.add(&c)?.scale(&half);
                if next.support_len() > cfg.bounds.support_cap {
                    return Err(Error::budget("averaged support", next.support_len(), cfg.bounds.support_cap));
                }
                Ok(Some((i, quick_upper(&next), next)))
            })
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .flatten()
            .collect();
        screened.sort_by(|p, q| p.1.cmp(&q.1).then(p.0.cmp(&q.0)));
        screened.truncate(CERTIFIED_CANDIDATES);
        let certified: Vec<(usize, BigRational, ExactElement)> = screened
            .into_par_iter()
            .map(|(i, quick, next)| Ok((i, certified_upper(&next, &cfg.bounds)?.value.min(quick), next)))
            .collect::<Result<_>>()?;
        let best = certified.into_iter().reduce(|acc, cur| if (&cur.1, cur.0) < (&acc.1, acc.0) { cur } else { acc });
        match best {
            Some((i, d, next)) if d <= dist => {
                steps.push(DixmierStep {
                    conjugator: candidates[i].to_string(),
                    distance: fmt_rational(&d),
                    distance_f64: as_f64(&d),
                });
                dist = d;
                x = next;
            }
            _ => {
                stop = "stalled";
                break;
            }
        }
    }
    let success = dist < cfg.epsilon;
    if success {
        stop = "converged";
    }
    debug_assert_eq!(tau.to_f64(), a.trace().to_f64());
    Ok(DixmierReport {
        trace: fmt_rational(&tau),
        initial_distance_f64: as_f64(&initial),
        initial_distance: fmt_rational(&initial),
        steps,
        success,
        stop_reason: stop.into(),
        final_estimate: estimate(&x, &cfg.bounds)?,
        final_support: x.support_len(),
    })
}
