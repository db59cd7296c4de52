//! Exactly checkable certificates that `‖Σ_k c_k λ(s_k t_j s_k⁻¹)‖ < ε` for
//! every target `t_j`, and the search that produces them.

use num_rational::BigRational;
use num_traits::Signed;
use serde::{Deserialize, Serialize};

use super::{check_weights, conjugate_average, minimize_simplex_joint, pools, SearchConfig};
use crate::error::{Error, Result};
use crate::group::{GroupDescriptor, Word};
use crate::norm::{certified_upper, BoundConfig};
use crate::numeric::{fmt_rational, parse_rational};

pub const CERT_SCHEMA: &str = "powers-cert/1";

/// Words are stored in their text form and rationals as `p/q` strings, so
/// the JSON form round-trips exactly.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Certificate {
    pub schema: String,
    pub group: String,
    pub targets: Vec<String>,
    pub conjugators: Vec<String>,
    pub weights: Vec<String>,
    /// Certified upper bound of the average for each target.
    pub upper_bounds: Vec<String>,
    pub epsilon: String,
    pub bound_config: BoundConfig,
}

/// Parsed, well-formed certificate contents.
#[derive(Clone, Debug)]
struct Parts {
    group: GroupDescriptor,
    targets: Vec<Word>,
    conjugators: Vec<Word>,
    weights: Vec<BigRational>,
    upper_bounds: Vec<BigRational>,
    epsilon: BigRational,
}

fn malformed(msg: impl std::fmt::Display) -> Error {
    Error::MalformedCertificate(msg.to_string())
}

fn rational(s: &str) -> Result<BigRational> {
    parse_rational(s).ok_or_else(|| malformed(format!("bad rational `{s}`")))
}

impl Certificate {
    fn build(
        group: &GroupDescriptor,
        targets: &[Word],
        conjugators: &[Word],
        weights: &[BigRational],
        uppers: &[BigRational],
        epsilon: &BigRational,
        bounds: &BoundConfig,
    ) -> Self {
        Certificate {
            schema: CERT_SCHEMA.into(),
            group: group.to_string(),
            targets: targets.iter().map(Word::to_string).collect(),
            conjugators: conjugators.iter().map(Word::to_string).collect(),
            weights: weights.iter().map(fmt_rational).collect(),
            upper_bounds: uppers.iter().map(fmt_rational).collect(),
            epsilon: fmt_rational(epsilon),
            bound_config: bounds.clone(),
        }
    }

    fn parts(&self) -> Result<Parts> {
        if self.schema != CERT_SCHEMA {
            return Err(malformed(format!("unknown schema `{}`", self.schema)));
        }
        let group: GroupDescriptor = self.group.parse().map_err(malformed)?;
        let words = |v: &[String]| -> Result<Vec<Word>> { v.iter().map(|s| group.parse_word(s).map_err(malformed)).collect() };
        let targets = words(&self.targets)?;
        let conjugators = words(&self.conjugators)?;
        if targets.is_empty() || conjugators.is_empty() {
            return Err(malformed("empty targets or conjugators"));
        }
        if targets.iter().any(Word::is_identity) {
            return Err(malformed("identity target"));
        }
        let weights = self.weights.iter().map(|s| rational(s)).collect::<Result<Vec<_>>>()?;
        check_weights(&weights, conjugators.len()).map_err(malformed)?;
        let upper_bounds = self.upper_bounds.iter().map(|s| rational(s)).collect::<Result<Vec<_>>>()?;
        if upper_bounds.len() != targets.len() {
            return Err(malformed("one upper bound per target expected"));
        }
        let epsilon = rational(&self.epsilon)?;
        if !epsilon.is_positive() {
            return Err(malformed("epsilon must be positive"));
        }
        self.bound_config.validate().map_err(malformed)?;
        Ok(Parts { group, targets, conjugators, weights, upper_bounds, epsilon })
    }

    pub fn to_json_string(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(malformed)
    }
}

/// Result of re-deriving a certificate's bounds.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Verification {
    pub valid: bool,
    /// Recomputed certified upper bounds, one per target, as `p/q`.
    pub recomputed: Vec<String>,
    /// Whether the stored bounds equal the recomputed ones.
    pub matches_stored: bool,
}

/// True iff every recomputed upper bound is strictly below epsilon.
pub fn verify_certificate(cert: &Certificate) -> Result<bool> {
    Ok(verify_certificate_detailed(cert)?.valid)
}

pub fn verify_certificate_detailed(cert: &Certificate) -> Result<Verification> {
    let p = cert.parts()?;
    let avg = conjugate_average(&p.group, &p.targets, &p.conjugators, &p.weights).map_err(malformed)?;
    let recomputed: Vec<BigRational> = avg
        .per_target
        .iter()
        .map(|a| Ok(certified_upper(a, &cert.bound_config)?.value))
        .collect::<Result<_>>()?;
    Ok(Verification {
        valid: recomputed.iter().all(|u| *u < p.epsilon),
        matches_stored: recomputed == p.upper_bounds,
        recomputed: recomputed.iter().map(fmt_rational).collect(),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum SearchOutcome {
    Found {
        certificate: Certificate,
    },
    /// Only one-sided evidence: other conjugators may still succeed.
    NotFound {
        #[serde(with = "crate::numeric::rational_string")]
        best_value: BigRational,
        /// The best family tried, with its bounds, as an (invalid) certificate.
        best: Certificate,
        pools_tried: usize,
    },
}

/// Tries conjugator pools of increasing size `n = 1..=max_n` and returns the
/// first family whose certified bounds are all below `cfg.epsilon`.
pub fn search_certificate(group: &GroupDescriptor, targets: &[Word], cfg: &SearchConfig) -> Result<SearchOutcome> {
    cfg.validate()?;
    for t in targets {
        group.check(t)?;
    }
    if targets.iter().any(Word::is_identity) {
        return Err(Error::IdentityTarget);
    }
    if targets.is_empty() {
        return Err(Error::InvalidConfig("no targets".into()));
    }
    let mut best: Option<(BigRational, Certificate)> = None;
    let mut tried = 0;
    for n in 1..=cfg.max_n {
        for pool in pools(group, n, cfg)? {
            tried += 1;
            let r = minimize_simplex_joint(group, targets, &pool, cfg, Some(&cfg.epsilon))?;
            let cert = Certificate::build(group, targets, &pool, &r.weights, &r.uppers, &cfg.epsilon, &cfg.bounds);
            let worst = r.worst().clone();
            if worst < cfg.epsilon {
                return Ok(SearchOutcome::Found { certificate: cert });
            }
            if best.as_ref().is_none_or(|(b, _)| worst < *b) {
                best = Some((worst, cert));
            }
        }
    }
    let (best_value, best) = best.ok_or_else(|| Error::InvalidConfig("no candidate pools".into()))?;
    Ok(SearchOutcome::NotFound { best_value, best, pools_tried: tried })
}
