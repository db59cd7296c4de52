//! Averaged conjugates: explicit convex combinations `Σ c_k δ_{s_k t s_k⁻¹}`,
//! the search for conjugator families that make them small in norm, exactly
//! checkable certificates, and Dixmier-type averaging toward the trace.

mod certificate;
mod dixmier;
mod simplex;

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::algebra::ExactElement;
use crate::error::{Error, Result};
use crate::group::{GroupDescriptor, Word};
use crate::norm::BoundConfig;
use crate::numeric::rat;

pub use certificate::{
    search_certificate, verify_certificate, verify_certificate_detailed, Certificate, SearchOutcome, Verification,
    CERT_SCHEMA,
};
pub use dixmier::{dixmier_average, DixmierReport, DixmierStep};
pub use simplex::{minimize_simplex, minimize_simplex_joint, SimplexResult};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PoolStrategy {
    /// `(g, g², …, gⁿ)` for each seed word `g`.
    Geometric,
    /// Seeded random words of length `1..=max_length`.
    RandomWords,
    /// The first `n` words of the ball of radius `max_length`.
    Exhaustive,
}

impl std::str::FromStr for PoolStrategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "geometric" => Ok(PoolStrategy::Geometric),
            "random-words" => Ok(PoolStrategy::RandomWords),
            "exhaustive" => Ok(PoolStrategy::Exhaustive),
            other => Err(Error::InvalidConfig(format!("unknown pool strategy `{other}`"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SearchConfig {
    pub strategy: PoolStrategy,
    /// Seed words for the geometric strategy; empty means every word of length 1 or 2.
    pub seeds: Vec<String>,
    /// Largest number of conjugators.
    pub max_n: usize,
    /// Word length bound for random and exhaustive pools.
    pub max_length: usize,
    /// Random pools tried per pool size.
    pub random_pools: usize,
    pub fw_iterations: usize,
    #[serde(with = "crate::numeric::rational_string")]
    pub epsilon: BigRational,
    pub seed: u64,
    /// Greedy steps for Dixmier averaging.
    pub dixmier_steps: usize,
    /// Largest exponent `2^j` of each seed in the Dixmier pool.
    pub dixmier_max_power: u32,
    pub bounds: BoundConfig,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            strategy: PoolStrategy::Geometric,
            seeds: Vec::new(),
            max_n: 12,
            max_length: 3,
            random_pools: 4,
            fw_iterations: 20,
            epsilon: rat(1, 2),
            seed: 0,
            dixmier_steps: 12,
            dixmier_max_power: 32,
            bounds: BoundConfig::default(),
        }
    }
}

impl SearchConfig {
    pub fn validate(&self) -> Result<()> {
        self.bounds.validate()?;
        if self.max_n == 0 || self.max_length == 0 || self.random_pools == 0 || self.dixmier_max_power == 0 {
            return Err(Error::InvalidConfig("search budgets must be positive".into()));
        }
        if !self.epsilon.is_positive() {
            return Err(Error::InvalidConfig("epsilon must be positive".into()));
        }
        Ok(())
    }

    fn seed_words(&self, g: &GroupDescriptor) -> Result<Vec<Word>> {
        if self.seeds.is_empty() {
            let ball = g.ball(2, 1 << 20)?;
            return Ok(ball.words().iter().filter(|w| !w.is_identity()).cloned().collect());
        }
        self.seeds
            .iter()
            .map(|s| {
                let w = g.parse_word(s)?;
                if w.is_identity() {
                    Err(Error::IdentityGenerator)
                } else {
                    Ok(w)
                }
            })
            .collect()
    }
}

/// Per-target averages and their sum.
#[derive(Clone, Debug, PartialEq)]
pub struct Averages {
    pub per_target: Vec<ExactElement>,
    pub combined: ExactElement,
}

pub(crate) fn check_weights(weights: &[BigRational], n: usize) -> Result<()> {
    if weights.len() != n {
        return Err(Error::WeightError(format!("{} weights for {} conjugators", weights.len(), n)));
    }
    if weights.iter().any(Signed::is_negative) {
        return Err(Error::WeightError("negative weight".into()));
    }
    let sum: BigRational = weights.iter().sum();
    if !sum.is_one() {
        return Err(Error::WeightError(format!("weights sum to {sum}, not 1")));
    }
    Ok(())
}

/// `A_j = Σ_k c_k δ_{s_k t_j s_k⁻¹}` for each target and `Σ_j A_j`.
pub fn conjugate_average(
    group: &GroupDescriptor,
    targets: &[Word],
    conjugators: &[Word],
    weights: &[BigRational],
) -> Result<Averages> {
    check_weights(weights, conjugators.len())?;
    for w in targets.iter().chain(conjugators) {
        group.check(w)?;
    }
    let per_target: Vec<ExactElement> = targets
        .iter()
        .map(|t| {
            let terms = conjugators.iter().zip(weights).map(|(s, c)| (group.conjugate_unchecked(s, t), c.clone()));
            ExactElement::from_terms(group.clone(), terms)
        })
        .collect::<Result<_>>()?;
    let mut combined = ExactElement::zero(group.clone());
    for a in &per_target {
        combined = combined.add(a)?;
    }
    Ok(Averages { per_target, combined })
}

/// `(g, g², …, gⁿ)`.
pub fn geometric_conjugators(group: &GroupDescriptor, g: &Word, n: usize) -> Result<Vec<Word>> {
    group.check(g)?;
    if g.is_identity() {
        return Err(Error::IdentityGenerator);
    }
    if n == 0 {
        return Err(Error::InvalidConfig("need at least one conjugator".into()));
    }
    let mut out = Vec::with_capacity(n);
    let mut acc = g.clone();
    for _ in 0..n {
        out.push(acc.clone());
        acc = group.mul_unchecked(&acc, g);
    }
    Ok(out)
}

/// Candidate conjugator families of size `n` for the configured strategy, in search order.
pub(crate) fn pools(group: &GroupDescriptor, n: usize, cfg: &SearchConfig) -> Result<Vec<Vec<Word>>> {
    match cfg.strategy {
        PoolStrategy::Geometric => {
            cfg.seed_words(group)?.iter().map(|g| geometric_conjugators(group, g, n)).collect()
        }
        PoolStrategy::RandomWords => {
            let letters = group.letters();
            Ok((0..cfg.random_pools)
                .map(|trial| {
                    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ ((n as u64) << 32) ^ trial as u64);
                    (0..n)
                        .map(|_| {
                            let len = rng.gen_range(1..=cfg.max_length);
                            let mut w = group.identity();
                            while w.len() < len {
                                let l = &letters[rng.gen_range(0..letters.len())];
                                w = group.mul_unchecked(&w, l);
                            }
                            w
                        })
                        .collect()
                })
                .collect())
        }
        PoolStrategy::Exhaustive => {
            let ball = group.ball(cfg.max_length, cfg.bounds.ball_cap)?;
            if ball.len() < n {
                return Ok(Vec::new());
            }
            Ok(vec![ball.words()[..n].to_vec()])
        }
    }
}

/// Uniform weights `1/n`.
pub(crate) fn uniform(n: usize) -> Vec<BigRational> {
    vec![rat(1, n as i64); n]
}

/// `a - τ₀(a)·δ_e`.
pub(crate) fn centered(a: &ExactElement) -> Result<ExactElement> {
    let tau = a.trace();
    if tau.is_zero() {
        return Ok(a.clone());
    }
    let e = ExactElement::delta(a.group(), &a.group().identity())?;
    a.sub(&e.scale(&tau))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::int;

    fn w(g: &GroupDescriptor, s: &str) -> Word {
        g.parse_word(s).unwrap()
    }

    #[test]
    fn central_target_average_is_delta() {
        let g: GroupDescriptor = "F2xZ".parse().unwrap();
        let t = w(&g, "e|(1)");
        let conj = vec![w(&g, "a|(0)"), w(&g, "ab|(3)"), w(&g, "B|(-1)")];
        let avg = conjugate_average(&g, std::slice::from_ref(&t), &conj, &[rat(1, 2), rat(1, 3), rat(1, 6)]).unwrap();
        assert_eq!(avg.per_target[0], ExactElement::delta(&g, &t).unwrap());
    }

    #[test]
    fn identity_conjugator() {
        let g: GroupDescriptor = "F2".parse().unwrap();
        let targets = vec![w(&g, "a"), w(&g, "bA")];
        let avg = conjugate_average(&g, &targets, &[g.identity()], &[int(1)]).unwrap();
        assert_eq!(avg.per_target[1], ExactElement::delta(&g, &targets[1]).unwrap());
        assert_eq!(avg.combined.support_len(), 2);
    }

    #[test]
    fn two_conjugates() {
        let g: GroupDescriptor = "F2".parse().unwrap();
        let avg = conjugate_average(&g, &[w(&g, "a")], &[g.identity(), w(&g, "b")], &[rat(1, 2), rat(1, 2)]).unwrap();
        let x = &avg.per_target[0];
        assert_eq!(x.coeff(&w(&g, "baB")), rat(1, 2));
        assert_eq!(x.l2_squared(), rat(1, 2));
    }

    #[test]
    fn weight_errors() {
        let g: GroupDescriptor = "F2".parse().unwrap();
        let c = [g.identity(), w(&g, "b")];
        let t = [w(&g, "a")];
        for bad in [vec![rat(1, 2), rat(1, 3)], vec![rat(3, 2), rat(-1, 2)], vec![int(1)]] {
            assert!(matches!(conjugate_average(&g, &t, &c, &bad), Err(Error::WeightError(_))));
        }
    }

    #[test]
    fn geometric_examples() {
        let g: GroupDescriptor = "F2".parse().unwrap();
        assert_eq!(geometric_conjugators(&g, &w(&g, "a"), 3).unwrap(), vec![w(&g, "a"), w(&g, "aa"), w(&g, "aaa")]);
        assert_eq!(geometric_conjugators(&g, &w(&g, "ab"), 2).unwrap(), vec![w(&g, "ab"), w(&g, "abab")]);
        assert!(matches!(geometric_conjugators(&g, &g.identity(), 2), Err(Error::IdentityGenerator)));
        let z: GroupDescriptor = "Z".parse().unwrap();
        assert_eq!(geometric_conjugators(&z, &w(&z, "(1)"), 2).unwrap(), vec![w(&z, "(1)"), w(&z, "(2)")]);
    }

    #[test]
    fn pools_are_deterministic() {
        let g: GroupDescriptor = "F2".parse().unwrap();
        let cfg = SearchConfig { strategy: PoolStrategy::RandomWords, ..SearchConfig::default() };
        let p = pools(&g, 5, &cfg).unwrap();
        assert_eq!(p, pools(&g, 5, &cfg).unwrap());
        assert!(p.iter().flatten().all(|x| (1..=3).contains(&x.len())));
        let geo = pools(&g, 2, &SearchConfig::default()).unwrap();
        assert_eq!(geo.len(), 16);
        let ex = SearchConfig { strategy: PoolStrategy::Exhaustive, ..SearchConfig::default() };
        assert_eq!(pools(&g, 5, &ex).unwrap()[0][4], w(&g, "B"));
    }
}
