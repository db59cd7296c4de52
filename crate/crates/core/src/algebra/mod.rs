//! The group ring: finitely supported functions on a group with convolution,
//! involution and the canonical trace.

mod json;
mod parse;

use std::collections::{BTreeMap, HashMap};
use std::fmt::Debug;

use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{GroupDescriptor, Word};

pub use json::{ElementJson, TermJson};
pub use parse::parse_element;

/// Convolution never produces more than this many support words by default.
pub const DEFAULT_SUPPORT_CAP: usize = 5_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Exact,
    Float,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Exact => "exact",
            Mode::Float => "float",
        }
    }
}

/// Scalar coefficients. Only real scalars are implemented, so `conj` is the identity.
pub trait Coefficient: Clone + Debug + PartialEq + Send + Sync + 'static {
    const MODE: Mode;
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn add_assign(&mut self, other: &Self);
    fn mul(&self, other: &Self) -> Self;
    fn neg(&self) -> Self;
    fn abs(&self) -> Self;
    fn is_nonnegative(&self) -> bool;
    fn to_f64(&self) -> f64;
    fn conj(&self) -> Self {
        self.clone()
    }
}

impl Coefficient for BigRational {
    const MODE: Mode = Mode::Exact;
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn add_assign(&mut self, other: &Self) {
        *self += other;
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn neg(&self) -> Self {
        -self
    }
    fn abs(&self) -> Self {
        Signed::abs(self)
    }
    fn is_nonnegative(&self) -> bool {
        !self.is_negative()
    }
    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
}

impl Coefficient for f64 {
    const MODE: Mode = Mode::Float;
    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn is_zero(&self) -> bool {
        *self == 0.0
    }
    fn add_assign(&mut self, other: &Self) {
        *self += other;
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn neg(&self) -> Self {
        -self
    }
    fn abs(&self) -> Self {
        f64::abs(*self)
    }
    fn is_nonnegative(&self) -> bool {
        *self >= 0.0
    }
    fn to_f64(&self) -> f64 {
        *self
    }
}

/// A finitely supported element of the group ring. The support never holds
/// explicit zeros and every word belongs to `group`.
#[derive(Clone, Debug, PartialEq)]
pub struct Element<K> {
    group: GroupDescriptor,
    terms: BTreeMap<Word, K>,
}

pub type ExactElement = Element<BigRational>;
pub type FloatElement = Element<f64>;

impl<K: Coefficient> Element<K> {
    pub fn zero(group: GroupDescriptor) -> Self {
        Element { group, terms: BTreeMap::new() }
    }

    pub fn delta(group: &GroupDescriptor, w: &Word) -> Result<Self> {
        Self::from_terms(group.clone(), [(w.clone(), K::one())])
    }

    /// Sums the given terms; repeated words accumulate and zeros are dropped.
    pub fn from_terms(group: GroupDescriptor, terms: impl IntoIterator<Item = (Word, K)>) -> Result<Self> {
        let mut map: BTreeMap<Word, K> = BTreeMap::new();
        for (w, c) in terms {
            group.check(&w)?;
            map.entry(w).or_insert_with(K::zero).add_assign(&c);
        }
        map.retain(|_, c| !c.is_zero());
        Ok(Element { group, terms: map })
    }

    pub(crate) fn from_map_unchecked(group: GroupDescriptor, mut terms: BTreeMap<Word, K>) -> Self {
        terms.retain(|_, c| !c.is_zero());
        Element { group, terms }
    }

    pub fn group(&self) -> &GroupDescriptor {
        &self.group
    }

    pub fn mode(&self) -> Mode {
        K::MODE
    }

    pub fn terms(&self) -> &BTreeMap<Word, K> {
        &self.terms
    }

    pub fn support_len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, w: &Word) -> K {
        self.terms.get(w).cloned().unwrap_or_else(K::zero)
    }

    /// Maximal word length in the support (0 for the zero element).
    pub fn degree(&self) -> usize {
        self.terms.keys().map(Word::len).max().unwrap_or(0)
    }

    fn same_group(&self, other: &Self) -> Result<()> {
        if self.group == other.group {
            Ok(())
        } else {
            Err(Error::GroupMismatch { expected: self.group.to_string() })
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.same_group(other)?;
        let mut terms = self.terms.clone();
        for (w, c) in &other.terms {
            terms.entry(w.clone()).or_insert_with(K::zero).add_assign(c);
        }
        Ok(Self::from_map_unchecked(self.group.clone(), terms))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(&K::one().neg()))
    }

    pub fn scale(&self, c: &K) -> Self {
        let terms = self.terms.iter().map(|(w, x)| (w.clone(), c.mul(x))).collect();
        Self::from_map_unchecked(self.group.clone(), terms)
    }

    /// Group-ring product: `(a·b)(w) = Σ_{uv = w} a(u) b(v)`.
    ///
    /// Fails with `BudgetExceeded` as soon as the product support exceeds `cap`;
    /// the result is never truncated.
    pub fn convolve(&self, other: &Self, cap: usize) -> Result<Self> {
        self.same_group(other)?;
        let mut acc: HashMap<Word, K> = HashMap::new();
        for (u, x) in &self.terms {
            for (v, y) in &other.terms {
                let w = self.group.mul_unchecked(u, v);
                let p = x.mul(y);
                match acc.get_mut(&w) {
                    Some(c) => c.add_assign(&p),
                    None => {
                        acc.insert(w, p);
                        if acc.len() > cap {
                            return Err(Error::budget("convolution support", acc.len(), cap));
                        }
                    }
                }
            }
        }
        Ok(Self::from_map_unchecked(self.group.clone(), acc.into_iter().collect()))
    }

    /// `a*(w) = conj(a(w⁻¹))`.
    pub fn adjoint(&self) -> Self {
        let terms = self.terms.iter().map(|(w, c)| (w.inverse(), c.conj())).collect();
        Element { group: self.group.clone(), terms }
    }

    pub fn is_self_adjoint(&self) -> bool {
        self.terms.iter().all(|(w, c)| self.terms.get(&w.inverse()) == Some(&c.conj()))
    }

    /// Canonical trace: the coefficient of the identity.
    pub fn trace(&self) -> K {
        self.coeff(&self.group.identity())
    }

    pub fn l1(&self) -> K {
        let mut s = K::zero();
        for c in self.terms.values() {
            s.add_assign(&c.abs());
        }
        s
    }

    pub fn l2_squared(&self) -> K {
        let mut s = K::zero();
        for c in self.terms.values() {
            s.add_assign(&c.mul(&c.conj()));
        }
        s
    }

    pub fn l2(&self) -> f64 {
        self.l2_squared().to_f64().sqrt()
    }

    pub fn is_nonnegative(&self) -> bool {
        self.terms.values().all(K::is_nonnegative)
    }

    /// `δ_s · a · δ_{s⁻¹}`.
    pub fn conjugate_by(&self, s: &Word) -> Result<Self> {
        self.group.check(s)?;
        let terms = self
            .terms
            .iter()
            .map(|(w, c)| (self.group.conjugate_unchecked(s, w), c.clone()))
            .collect();
        Ok(Element { group: self.group.clone(), terms })
    }

    /// Restriction to words of length exactly `n`.
    pub fn stratum(&self, n: usize) -> Self {
        let terms = self.terms.iter().filter(|(w, _)| w.len() == n).map(|(w, c)| (w.clone(), c.clone())).collect();
        Element { group: self.group.clone(), terms }
    }

    /// Transports the element along an injective map of words into `group`.
    pub(crate) fn map_words(&self, group: GroupDescriptor, f: impl Fn(&Word) -> Option<Word>) -> Option<Self> {
        let mut terms = BTreeMap::new();
        for (w, c) in &self.terms {
            if terms.insert(f(w)?, c.clone()).is_some() {
                return None;
            }
        }
        Some(Element { group, terms })
    }
}

impl ExactElement {
    /// Explicit conversion to floating-point coefficients.
    pub fn to_float(&self) -> FloatElement {
        let terms = self.terms.iter().map(|(w, c)| (w.clone(), Coefficient::to_f64(c))).collect();
        FloatElement::from_map_unchecked(self.group.clone(), terms)
    }
}

impl FloatElement {
    /// Exact conversion: every finite `f64` is a dyadic rational.
    pub fn to_exact(&self) -> Result<ExactElement> {
        let terms = self
            .terms
            .iter()
            .map(|(w, c)| {
                BigRational::from_float(*c)
                    .map(|q| (w.clone(), q))
                    .ok_or_else(|| Error::InvalidConfig(format!("non-finite coefficient {c}")))
            })
            .collect::<Result<BTreeMap<_, _>>>()?;
        Ok(ExactElement::from_map_unchecked(self.group.clone(), terms))
    }
}

/// An element of either scalar mode, as read from external input.
#[derive(Clone, Debug, PartialEq)]
pub enum AnyElement {
    Exact(ExactElement),
    Float(FloatElement),
}

impl AnyElement {
    pub fn mode(&self) -> Mode {
        match self {
            AnyElement::Exact(_) => Mode::Exact,
            AnyElement::Float(_) => Mode::Float,
        }
    }

    pub fn group(&self) -> &GroupDescriptor {
        match self {
            AnyElement::Exact(a) => a.group(),
            AnyElement::Float(a) => a.group(),
        }
    }

    pub fn add(&self, other: &AnyElement) -> Result<AnyElement> {
        match (self, other) {
            (AnyElement::Exact(a), AnyElement::Exact(b)) => Ok(AnyElement::Exact(a.add(b)?)),
            (AnyElement::Float(a), AnyElement::Float(b)) => Ok(AnyElement::Float(a.add(b)?)),
            (a, b) => Err(Error::ModeMismatch { left: a.mode().as_str(), right: b.mode().as_str() }),
        }
    }

    pub fn into_exact(self) -> Result<ExactElement> {
        match self {
            AnyElement::Exact(a) => Ok(a),
            AnyElement::Float(_) => Err(Error::ModeMismatch { left: "exact", right: "float" }),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::{int, rat};

    fn f2() -> GroupDescriptor {
        GroupDescriptor::free(2).unwrap()
    }

    fn el(g: &GroupDescriptor, s: &str) -> ExactElement {
        parse_element(g, s).unwrap()
    }

    #[test]
    fn float_to_exact_is_lossless() {
        let g = f2();
        let x = el(&g, "(1/2)a - 3b + (5/8)e").to_float();
        assert_eq!(x.to_exact().unwrap(), el(&g, "(1/2)a - 3b + (5/8)e"));
        let tenth = FloatElement::from_terms(g.clone(), [(g.identity(), 0.1)]).unwrap().to_exact().unwrap();
        assert_eq!(tenth.trace(), BigRational::from_float(0.1).unwrap());
        assert_ne!(tenth.trace(), rat(1, 10));
        assert!(FloatElement::from_terms(g.clone(), [(g.identity(), f64::NAN)]).unwrap().to_exact().is_err());
    }

    #[test]
    fn linear_examples() {
        let g = f2();
        let a = el(&g, "a");
        assert!(a.add(&a.scale(&int(-1))).unwrap().is_zero());
        assert!(a.scale(&int(0)).is_zero());
        assert_eq!(el(&g, "a + b").support_len(), 2);
    }

    #[test]
    fn convolution_examples() {
        let g = f2();
        let lhs = el(&g, "a + A").convolve(&el(&g, "a"), 100).unwrap();
        assert_eq!(lhs, el(&g, "aa + e"));
        let x = el(&g, "2a - (1/3)bA");
        assert_eq!(el(&g, "e").convolve(&x, 100).unwrap(), x);
        let z: GroupDescriptor = "Z".parse().unwrap();
        assert_eq!(el(&z, "(1)").convolve(&el(&z, "(-1)"), 100).unwrap(), el(&z, "(0)"));
    }

    #[test]
    fn convolution_respects_cap() {
        let g = f2();
        let x = el(&g, "a + A + b + B");
        assert!(matches!(x.convolve(&x, 5), Err(Error::BudgetExceeded { .. })));
        assert_eq!(x.convolve(&x, 13).unwrap().support_len(), 13);
    }

    #[test]
    fn adjoint_examples() {
        let g = f2();
        assert_eq!(el(&g, "(2/3)ab").adjoint(), el(&g, "(2/3)BA"));
        let s = el(&g, "ab + BA");
        assert_eq!(s.adjoint(), s);
        assert!(s.is_self_adjoint());
    }

    #[test]
    fn trace_and_norms() {
        let g = f2();
        assert_eq!(el(&g, "e").trace(), int(1));
        assert_eq!(el(&g, "ab").trace(), int(0));
        let x = el(&g, "(1/2)a - (3/4)bb + 2");
        let xx = x.adjoint().convolve(&x, 100).unwrap();
        assert_eq!(xx.trace(), x.l2_squared());
        assert_eq!(x.l1(), rat(13, 4));

        // uniform average of n distinct conjugates
        let avg = el(&g, "(1/3)(a + baB + bbaBB)");
        assert_eq!(avg.l1(), int(1));
        assert_eq!(avg.l2_squared(), rat(1, 3));
        let d = el(&g, "ab");
        assert_eq!(d.l1(), int(1));
        assert_eq!(d.l2_squared(), int(1));
    }

    #[test]
    fn mode_mismatch() {
        let g = f2();
        let a = AnyElement::Exact(el(&g, "a"));
        let b = AnyElement::Float(el(&g, "a").to_float());
        assert!(matches!(a.add(&b), Err(Error::ModeMismatch { .. })));
        assert!(a.add(&a).is_ok());
    }

    #[test]
    fn group_mismatch() {
        let g = f2();
        let z: GroupDescriptor = "Z".parse().unwrap();
        assert!(matches!(el(&g, "a").add(&el(&z, "(1)")), Err(Error::GroupMismatch { .. })));
    }

    #[test]
    fn conjugation_preserves_trace() {
        let g = f2();
        let x = el(&g, "3 + a - (1/2)Ba");
        let y = x.conjugate_by(&g.parse_word("bab").unwrap()).unwrap();
        assert_eq!(y.trace(), x.trace());
        assert_eq!(y.l1(), x.l1());
    }
}
