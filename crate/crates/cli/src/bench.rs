//! Built-in benchmark suites with pass/fail thresholds.

use std::time::Instant;

use anyhow::{bail, Result};
use powers_core::numeric::{parse_rational, rat, to_f64_up};
use powers_core::powers::{dixmier_average, search_certificate, verify_certificate, SearchConfig, SearchOutcome};
use powers_core::{estimate, parse_element, BoundConfig, ExactElement, GroupDescriptor, Word};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

pub const SUITES: [&str; 8] =
    ["kesten", "two-generators", "certificate", "multi-target", "radical", "cone", "dixmier", "soundness"];

/// Default wall-time limit per suite, in milliseconds.
fn default_limit_ms(suite: &str) -> u128 {
    match suite {
        "kesten" => 30_000,
        "two-generators" => 60_000,
        "radical" => 10_000,
        _ => 300_000,
    }
}

const SLACK: f64 = 1e-9;
const RANDOM_GROUPS: [&str; 5] = ["F1", "F2", "F3", "Z2", "F2xZ"];

#[derive(Debug, Serialize)]
pub struct Row {
    pub suite: String,
    pub pass: bool,
    pub detail: String,
    pub wall_time_ms: u128,
    pub limit_ms: u128,
}

pub fn select(name: &str) -> Result<Vec<&'static str>> {
    if name == "all" {
        return Ok(SUITES.to_vec());
    }
    match SUITES.iter().find(|s| **s == name) {
        Some(s) => Ok(vec![*s]),
        None => bail!("unknown suite `{name}`; expected all or one of {}", SUITES.join(", ")),
    }
}

/// Runs each suite; a suite passes if its checks hold within its time limit
/// (`max_ms` overrides the defaults).
pub fn run(suites: &[&str], cases: usize, max_ms: Option<u128>) -> Vec<Row> {
    suites
        .iter()
        .map(|&suite| {
            let start = Instant::now();
            let (ok, detail) = match run_one(suite, cases) {
                Ok(r) => r,
                Err(e) => (false, format!("error: {e:#}")),
            };
            let wall_time_ms = start.elapsed().as_millis();
            let limit_ms = max_ms.unwrap_or_else(|| default_limit_ms(suite));
            Row { suite: suite.into(), pass: ok && wall_time_ms <= limit_ms, detail, wall_time_ms, limit_ms }
        })
        .collect()
}

fn run_one(suite: &str, cases: usize) -> Result<(bool, String)> {
    let f2: GroupDescriptor = "F2".parse()?;
    match suite {
        "kesten" => {
            let e = estimate(&parse_element(&f2, "(1/4)(a + A + b + B)")?, &BoundConfig::default())?;
            let truth = 3f64.sqrt() / 2.0;
            Ok((e.contains(truth) && e.width() <= 0.05, format!("[{:.6}, {:.6}]", e.lower, e.upper)))
        }
        "two-generators" => {
            let e = estimate(&parse_element(&f2, "a + b")?, &BoundConfig::default())?;
            Ok((e.contains(2.0) && e.width() <= 0.1, format!("[{:.6}, {:.6}]", e.lower, e.upper)))
        }
        "certificate" => {
            let t = [f2.parse_word("a")?];
            let mut ok = true;
            let mut parts = Vec::new();
            for (eps, max_conj) in [("19/20", 4), ("3/5", 12)] {
                let cfg = SearchConfig { epsilon: parse_rational(eps).expect("literal"), ..SearchConfig::default() };
                match search_certificate(&f2, &t, &cfg)? {
                    SearchOutcome::Found { certificate } => {
                        let n = certificate.conjugators.len();
                        ok &= n <= max_conj && verify_certificate(&certificate)?;
                        parts.push(format!("eps {eps}: n = {n}"));
                    }
                    SearchOutcome::NotFound { .. } => {
                        ok = false;
                        parts.push(format!("eps {eps}: not found"));
                    }
                }
            }
            Ok((ok, parts.join(", ")))
        }
        "multi-target" => {
            let t: Vec<Word> = ["a", "b", "ab"].iter().map(|s| f2.parse_word(s)).collect::<Result<_, _>>()?;
            let cfg = SearchConfig { epsilon: rat(19, 20), ..SearchConfig::default() };
            Ok(match search_certificate(&f2, &t, &cfg)? {
                SearchOutcome::Found { certificate } => {
                    (verify_certificate(&certificate)?, format!("conjugators {}", certificate.conjugators.join(" ")))
                }
                SearchOutcome::NotFound { best_value, .. } => (false, format!("not found, best {best_value}")),
            })
        }
        "radical" => {
            let g: GroupDescriptor = "F2xZ".parse()?;
            let t = g.parse_word("e|(1)")?;
            let e = estimate(&ExactElement::delta(&g, &t)?, &BoundConfig::default())?;
            let cfg = SearchConfig { epsilon: rat(99, 100), ..SearchConfig::default() };
            let best = match search_certificate(&g, &[t], &cfg)? {
                SearchOutcome::NotFound { best_value, .. } => Some(best_value),
                SearchOutcome::Found { .. } => None,
            };
            let ok = e.upper_exact == "1/1" && best == Some(rat(1, 1));
            Ok((ok, format!("upper {}, best {:?}", e.upper_exact, best.map(|b| b.to_string()))))
        }
        "cone" => {
            let cfg = small_config();
            let mut rng = ChaCha8Rng::seed_from_u64(6);
            let mut bad = 0;
            for i in 0..cases {
                let g: GroupDescriptor = RANDOM_GROUPS[i % RANDOM_GROUPS.len()].parse()?;
                let x = random_positive(&mut rng, &g)?;
                let y = random_positive(&mut rng, &g)?;
                let ex = estimate(&x, &cfg)?;
                let exy = estimate(&x.add(&y)?, &cfg)?;
                let es = estimate(&x.add(&x.adjoint())?, &cfg)?;
                if !(ex.lower <= exy.upper + SLACK && ex.lower <= es.upper + SLACK && es.lower <= 2.0 * ex.upper + SLACK)
                {
                    bad += 1;
                }
            }
            Ok((bad == 0, format!("{cases} cases, {bad} violations")))
        }
        "dixmier" => {
            let cfg = SearchConfig::default();
            let r = dixmier_average(&parse_element(&f2, "a + A")?, &cfg)?;
            let g: GroupDescriptor = "F2xZ".parse()?;
            let c = dixmier_average(&parse_element(&g, "e|(1)")?, &cfg)?;
            let last = r.distances().last().copied().unwrap_or(f64::NAN);
            let ok = r.success && last < 0.5 && !c.success && c.initial_distance == "1/1";
            Ok((ok, format!("a + A: {} steps to {last:.6}; central: distance {}", r.steps.len(), c.initial_distance)))
        }
        "soundness" => {
            let cfg = small_config();
            let mut rng = ChaCha8Rng::seed_from_u64(8);
            let (mut inverted, mut identities) = (0, 0);
            let cap = 1 << 20;
            for i in 0..cases {
                let g: GroupDescriptor = RANDOM_GROUPS[i % RANDOM_GROUPS.len()].parse()?;
                let a = random_element(&mut rng, &g)?;
                let b = random_element(&mut rng, &g)?;
                let e = estimate(&a, &cfg)?;
                if e.lower > e.upper + SLACK || to_f64_up(&a.l1()) + SLACK < e.lower {
                    inverted += 1;
                }
                let ab = a.convolve(&b, cap)?;
                let ok = ab.trace() == b.convolve(&a, cap)?.trace()
                    && a.adjoint().convolve(&a, cap)?.trace() == a.l2_squared()
                    && ab.adjoint() == b.adjoint().convolve(&a.adjoint(), cap)?;
                if !ok {
                    identities += 1;
                }
            }
            Ok((inverted == 0 && identities == 0, format!("{cases} cases, {inverted} bad brackets, {identities} identity failures")))
        }
        other => bail!("unknown suite `{other}`"),
    }
}

fn small_config() -> BoundConfig {
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

fn random_word(rng: &mut ChaCha8Rng, g: &GroupDescriptor) -> Result<Word> {
    let letters = g.letters();
    let mut w = g.identity();
    for _ in 0..rng.gen_range(0..=3) {
        w = g.mul(&w, &letters[rng.gen_range(0..letters.len())])?;
    }
    Ok(w)
}

/// Convex combination of up to four deltas.
fn random_positive(rng: &mut ChaCha8Rng, g: &GroupDescriptor) -> Result<ExactElement> {
    let n = rng.gen_range(1..=4);
    let raw: Vec<(Word, i64)> = (0..n).map(|_| Ok((random_word(rng, g)?, rng.gen_range(1..=5)))).collect::<Result<_>>()?;
    let total: i64 = raw.iter().map(|t| t.1).sum();
    Ok(ExactElement::from_terms(g.clone(), raw.into_iter().map(|(w, c)| (w, rat(c, total))))?)
}

fn random_element(rng: &mut ChaCha8Rng, g: &GroupDescriptor) -> Result<ExactElement> {
    let n = rng.gen_range(0..=5);
    let terms: Vec<_> = (0..n)
        .map(|_| Ok((random_word(rng, g)?, rat(rng.gen_range(-6..=6), rng.gen_range(1..=4)))))
        .collect::<Result<_>>()?;
    Ok(ExactElement::from_terms(g.clone(), terms)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_selection() {
        assert_eq!(select("all").unwrap().len(), SUITES.len());
        assert_eq!(select("kesten").unwrap(), vec!["kesten"]);
        assert!(select("nope").is_err());
    }

    #[test]
    fn quick_suites_pass() {
        for row in run(&["two-generators", "radical"], 0, None) {
            assert!(row.pass, "{row:?}");
        }
        let rows = run(&["soundness", "cone"], 25, None);
        assert!(rows.iter().all(|r| r.pass), "{rows:?}");
        assert!(!run(&["radical"], 0, Some(0))[0].pass);
    }
}
