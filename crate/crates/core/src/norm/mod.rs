//! Certified two-sided estimates of the reduced norm `‖λ(a)‖`.
//!
//! Lower bounds: ball power iteration, exact trace moments, cone compression.
//! Upper bounds: `l1`, `l1` of powers, Haagerup, weighted Schur test.
//!
//! On free groups an element is first rewritten in a free basis of the
//! subgroup generated by its support. The regular representation of the
//! ambient group restricted to that subgroup is a multiple of the subgroup's
//! own regular representation, so the norm is unchanged while words get shorter.

mod cone;
mod exact;
pub(crate) mod ops;
mod power;
mod schur;

use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::algebra::ExactElement;
use crate::error::{Error, Result};
use crate::group::{FreeBasis, Word};
use crate::numeric::{fmt_rational, to_f64_down, to_f64_up};

pub use cone::lower_bound_cone;
pub use exact::{lower_bound_moments, upper_bound_haagerup, upper_bound_l1_power};
pub use ops::TranslationMaps;
pub use power::{lower_bound_power, MAP_ENTRY_CAP};
pub use schur::upper_bound_schur;

pub(crate) use power::{fit_radius, start_vector, word_cap};

/// Budgets and knobs for [`estimate`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BoundConfig {
    /// Ball radius for power iteration.
    pub radius: usize,
    pub max_iterations: usize,
    /// Deepest trace moment `m`.
    pub moment_depth: usize,
    /// Deepest squaring `k` in the `l1`-of-powers bound.
    pub power_depth: usize,
    pub seed: u64,
    /// Relative change in the Rayleigh quotient that stops power iteration.
    pub tolerance: f64,
    /// Prefix length of the cone classes.
    pub cone_depth: usize,
    /// Longest word length covered by cone test vectors.
    pub cone_length: usize,
    /// Largest ball (in words) built for power iteration.
    pub ball_cap: usize,
    /// Largest support produced by exact convolution.
    pub support_cap: usize,
    /// Fail with `BudgetExceeded` instead of shrinking budgets to fit.
    pub strict: bool,
}

impl Default for BoundConfig {
    fn default() -> Self {
        BoundConfig {
            radius: 12,
            max_iterations: 200,
            moment_depth: 10,
            power_depth: 3,
            seed: 0,
            tolerance: 1e-9,
            cone_depth: 1,
            cone_length: 160,
            ball_cap: 2_000_000,
            support_cap: 1_000_000,
            strict: false,
        }
    }
}

impl BoundConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("radius", self.radius),
            ("max_iterations", self.max_iterations),
            ("moment_depth", self.moment_depth),
            ("power_depth", self.power_depth),
            ("cone_depth", self.cone_depth),
            ("cone_length", self.cone_length),
            ("ball_cap", self.ball_cap),
            ("support_cap", self.support_cap),
        ];
        if let Some((name, _)) = positive.iter().find(|(_, v)| *v == 0) {
            return Err(Error::InvalidConfig(format!("{name} must be positive")));
        }
        if !(self.tolerance > 0.0 && self.tolerance.is_finite()) {
            return Err(Error::InvalidConfig("tolerance must be positive".into()));
        }
        Ok(())
    }
}

/// Which bound produced a bracket end.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Zero,
    Power,
    Moments,
    Cone,
    L1,
    L1Power,
    Haagerup,
    Schur,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormEstimate {
    pub lower: f64,
    pub upper: f64,
    pub lower_method: Method,
    pub upper_method: Method,
    /// Exact certified upper bound as `p/q`.
    pub upper_exact: String,
    /// Budgets actually used.
    pub radius: usize,
    pub iterations: usize,
    pub moment_depth: usize,
    pub power_depth: usize,
    pub cone_length: usize,
    /// Rank of the free basis the element was rewritten in, if any.
    pub rewritten_rank: Option<usize>,
}

impl NormEstimate {
    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }

    pub fn contains(&self, v: f64) -> bool {
        self.lower <= v && v <= self.upper
    }

    fn zero() -> Self {
        NormEstimate {
            lower: 0.0,
            upper: 0.0,
            lower_method: Method::Zero,
            upper_method: Method::Zero,
            upper_exact: "0/1".into(),
            radius: 0,
            iterations: 0,
            moment_depth: 0,
            power_depth: 0,
            cone_length: 0,
            rewritten_rank: None,
        }
    }
}

/// Amount shaved from float lower bounds to absorb rounding.
pub(crate) fn float_slack(a: &ExactElement) -> f64 {
    1e-9 * a.l1().to_f64().unwrap_or(f64::MAX).max(1.0)
}

/// `a` rewritten in a free basis of the subgroup generated by its support,
/// when that basis differs from the standard one.
pub fn rewrite_in_subgroup(a: &ExactElement) -> Option<(ExactElement, usize)> {
    if !a.group().is_free() {
        return None;
    }
    let gens: Vec<Word> = a.terms().keys().filter(|w| !w.is_identity()).cloned().collect();
    if gens.is_empty() {
        return None;
    }
    let basis = FreeBasis::new(a.group(), &gens)?;
    if basis.is_standard() {
        return None;
    }
    if basis.rank() == gens.len() {
        // n words generating a free group of rank n form a basis (free groups are Hopfian)
        let target = basis.group();
        let letters = target.letters();
        let x = a.map_words(target.clone(), |w| {
            if w.is_identity() {
                Some(target.identity())
            } else {
                gens.iter().position(|u| u == w).map(|i| letters[2 * i].clone())
            }
        })?;
        return Some((x, basis.rank()));
    }
    let x = a.map_words(basis.group(), |w| basis.rewrite(w))?;
    Some((x, basis.rank()))
}

/// How many support words are tried as left translations in [`equivalent_forms`].
const TRANSLATE_CANDIDATES: usize = 8;

/// An element with the same reduced norm as the input.
#[derive(Clone, Debug)]
pub struct Form {
    pub element: ExactElement,
    /// Rank of the free basis it was rewritten in, if it was rewritten.
    pub rank: Option<usize>,
}

/// Norm-preserving variants of `a`: its subgroup rewriting and, on free groups,
/// the rewriting of `λ(u⁻¹)·a` for the support word `u` that generates the
/// smallest-rank subgroup, when that rank is smaller. The first form is `a`
/// or its rewriting; the last form has the smallest rank.
pub fn equivalent_forms(a: &ExactElement) -> Vec<Form> {
    let mut forms = vec![match rewrite_in_subgroup(a) {
        Some((x, r)) => Form { element: x, rank: Some(r) },
        None => Form { element: a.clone(), rank: None },
    }];
    let g = a.group();
    if !g.is_free() || a.support_len() < 2 {
        return forms;
    }
    let mut best_rank = forms[0].rank.unwrap_or_else(|| g.num_generators());
    let mut best = None;
    for u in a.terms().keys().take(TRANSLATE_CANDIDATES) {
        let uinv = u.inverse();
        let Some(y) = a.map_words(g.clone(), |w| Some(g.mul_unchecked(&uinv, w))) else {
            continue;
        };
        if let Some((x, r)) = rewrite_in_subgroup(&y) {
            if r < best_rank {
                best_rank = r;
                best = Some(Form { element: x, rank: Some(r) });
            }
        }
    }
    forms.extend(best);
    forms
}

/// A certified upper bound and the method that produced it.
#[derive(Clone, Debug, PartialEq)]
pub struct CertifiedUpper {
    pub value: BigRational,
    pub method: Method,
    /// Deepest `l1`-of-powers depth completed.
    pub power_depth: usize,
}

fn take_min(best: &mut (BigRational, Method), v: BigRational, m: Method) {
    if v < best.0 {
        *best = (v, m);
    }
}

/// The smallest exact upper bound among `l1`, `l1` of powers and, on free
/// groups, Haagerup and the Schur test over all [`equivalent_forms`]. Budget
/// shortfalls only weaken the bound; they never fail the call.
pub fn certified_upper(a: &ExactElement, cfg: &BoundConfig) -> Result<CertifiedUpper> {
    cfg.validate()?;
    Ok(upper_parts(a, &equivalent_forms(a), cfg)?.0)
}

/// A fast exact upper bound: `l1` and, on free groups, Haagerup over all
/// [`equivalent_forms`]. Used to rank candidates before full certification.
pub(crate) fn quick_upper(a: &ExactElement) -> BigRational {
    let mut best = a.l1();
    if a.group().is_free() && !a.is_zero() {
        for f in equivalent_forms(a) {
            if let Ok(v) = upper_bound_haagerup(&f.element) {
                best = best.min(v);
            }
        }
    }
    best
}

fn upper_parts(a: &ExactElement, forms: &[Form], cfg: &BoundConfig) -> Result<(CertifiedUpper, Option<Error>)> {
    if a.is_zero() {
        return Ok((CertifiedUpper { value: BigRational::zero(), method: Method::Zero, power_depth: 0 }, None));
    }
    let mut best = (a.l1(), Method::L1);
    let work = &forms.last().expect("at least one form").element;
    let (powers, shortfall) = match exact::l1_power_sequence(work, cfg.power_depth, cfg.support_cap) {
        Ok(r) => r,
        Err(e @ Error::BudgetExceeded { .. }) => (Vec::new(), Some(e)),
        Err(e) => return Err(e),
    };
    let power_depth = powers.len().saturating_sub(1);
    if let Some(v) = powers.into_iter().min() {
        take_min(&mut best, v, Method::L1Power);
    }
    if a.group().is_free() {
        for x in std::iter::once(a).chain(forms.iter().map(|f| &f.element)) {
            if let Ok(v) = upper_bound_haagerup(x) {
                take_min(&mut best, v, Method::Haagerup);
            }
            if let Ok(v) = upper_bound_schur(x) {
                take_min(&mut best, v, Method::Schur);
            }
        }
    }
    Ok((CertifiedUpper { value: best.0, method: best.1, power_depth }, shortfall))
}

/// Certified bracket `lower ≤ ‖λ(a)‖ ≤ upper`.
///
/// Each method runs at the largest budget that fits; the budgets used are
/// recorded in the result. With `cfg.strict`, any shortfall against the
/// configured budgets fails with `BudgetExceeded` carrying the bracket
/// obtained so far.
pub fn estimate(a: &ExactElement, cfg: &BoundConfig) -> Result<NormEstimate> {
    cfg.validate()?;
    if a.is_zero() {
        return Ok(NormEstimate::zero());
    }
    let forms = equivalent_forms(a);
    let last = forms.last().expect("at least one form");
    let work = &last.element;
    let mut shortfalls: Vec<Error> = Vec::new();

    let (upper, shortfall) = upper_parts(a, &forms, cfg)?;
    shortfalls.extend(shortfall);

    // trace moments are the same for every form
    let (moments, shortfall) = exact::moment_sequence(work, cfg.moment_depth, cfg.support_cap);
    shortfalls.extend(shortfall);
    let mut lower = (0.0f64, Method::Moments);
    if let Some(m) = moments.iter().max() {
        lower.0 = to_f64_down(m);
    }

    let mut radius = 0;
    let mut iterations = 0;
    match work.adjoint().convolve(work, cfg.support_cap) {
        Ok(b) => {
            let cap = word_cap(cfg, b.support_len());
            let r = fit_radius(work.group(), cfg.radius, cap);
            if r < cfg.radius {
                let size = crate::group::ball_size(work.group(), cfg.radius).unwrap_or(u128::MAX);
                shortfalls.push(Error::budget("power iteration ball", size.min(usize::MAX as u128) as usize, cap));
            }
            let run = power::run(work, &b, r, cfg)?;
            radius = run.radius;
            iterations = run.iterations;
            if run.value > lower.0 {
                lower = (run.value, Method::Power);
            }
        }
        Err(e) => shortfalls.push(e),
    }

    let mut cone_length = 0;
    for form in &forms {
        let x = &form.element;
        if !x.group().is_free() || x.degree() == 0 {
            continue;
        }
        match cone::run(x, cfg.cone_depth, cfg.cone_length, cfg, false) {
            Ok(run) => {
                if run.length < cfg.cone_length {
                    shortfalls.push(Error::budget("cone length", cfg.cone_length, run.length));
                }
                cone_length = cone_length.max(run.length);
                if run.value > lower.0 {
                    lower = (run.value, Method::Cone);
                }
            }
            Err(e @ Error::BudgetExceeded { .. }) => shortfalls.push(e),
            Err(e) => return Err(e),
        }
    }

    let est = NormEstimate {
        lower: lower.0,
        upper: to_f64_up(&upper.value),
        lower_method: lower.1,
        upper_method: upper.method,
        upper_exact: fmt_rational(&upper.value),
        radius,
        iterations,
        moment_depth: moments.len(),
        power_depth: upper.power_depth,
        cone_length,
        rewritten_rank: last.rank,
    };
    debug_assert!(est.lower <= est.upper + 1e-9, "{est:?}");
    if cfg.strict {
        if let Some(Error::BudgetExceeded { what, size, cap, .. }) = shortfalls.into_iter().next() {
            return Err(Error::BudgetExceeded { what, size, cap, partial: Some(Box::new(est)) });
        }
    }
    Ok(est)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::parse_element;
    use crate::group::GroupDescriptor;

    fn f2() -> GroupDescriptor {
        "F2".parse().unwrap()
    }

    #[test]
    fn defaults_are_valid() {
        BoundConfig::default().validate().unwrap();
        let bad = BoundConfig { tolerance: 0.0, ..BoundConfig::default() };
        assert!(bad.validate().is_err());
        let bad = BoundConfig { radius: 0, ..BoundConfig::default() };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn zero_element() {
        let e = estimate(&ExactElement::zero(f2()), &BoundConfig::default()).unwrap();
        assert_eq!((e.lower, e.upper), (0.0, 0.0));
    }

    #[test]
    fn delta_bracket() {
        let g = f2();
        let e = estimate(&parse_element(&g, "baB").unwrap(), &BoundConfig::default()).unwrap();
        assert!(e.lower >= 1.0 - 1e-9 && e.upper == 1.0, "{e:?}");
        let z: GroupDescriptor = "F2xZ".parse().unwrap();
        let e = estimate(&parse_element(&z, "e|(1)").unwrap(), &BoundConfig::default()).unwrap();
        assert!(e.lower >= 1.0 - 1e-9 && e.upper == 1.0, "{e:?}");
    }

    #[test]
    fn rewriting_conjugates() {
        let g = f2();
        let x = parse_element(&g, "(1/3)(a + baB + bbaBB)").unwrap();
        let (y, rank) = rewrite_in_subgroup(&x).unwrap();
        assert_eq!(rank, 3);
        assert_eq!(y.degree(), 1);
        assert_eq!(y.l2_squared(), x.l2_squared());
        let u = certified_upper(&x, &BoundConfig::default()).unwrap();
        let truth = 2.0 * 2f64.sqrt() / 3.0;
        let v = u.value.to_f64().unwrap();
        assert!(v >= truth && v < truth + 1e-5, "{v}");
    }

    #[test]
    fn translation_shrinks_rank() {
        let g = f2();
        let x = parse_element(&g, "a + b").unwrap();
        let forms = equivalent_forms(&x);
        assert_eq!(forms.last().unwrap().rank, Some(1));
        let e = estimate(&x, &BoundConfig::default()).unwrap();
        assert!(e.contains(2.0) && e.width() <= 0.01, "{e:?}");
    }

    #[test]
    fn strict_mode_reports_partial() {
        let g = f2();
        let x = parse_element(&g, "(1/4)(a+A+b+B)").unwrap();
        let cfg = BoundConfig { ball_cap: 100, strict: true, ..BoundConfig::default() };
        match estimate(&x, &cfg) {
            Err(Error::BudgetExceeded { partial: Some(p), .. }) => assert!(p.lower <= p.upper),
            other => panic!("{other:?}"),
        }
        let relaxed = BoundConfig { strict: false, ..cfg };
        let e = estimate(&x, &relaxed).unwrap();
        assert!(e.radius < 12);
    }
}
