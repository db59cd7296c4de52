//! Exact rational helpers: outward-rounded roots, directed float conversion,
//! and rational snapping of floats.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Roots are rounded to this many binary digits (2^-40 < 10^-12).
pub const ROOT_BITS: u32 = 40;

pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// `k`-th root of `v` rounded down to the grid `2^-ROOT_BITS`.
pub fn root_floor(v: &BigRational, k: u32) -> BigRational {
    assert!(k >= 1 && !v.is_negative());
    let scaled = (v.numer() << (ROOT_BITS * k) as usize) / v.denom();
    BigRational::new(scaled.nth_root(k), BigInt::one() << ROOT_BITS as usize)
}

/// `k`-th root of `v` rounded up to the grid `2^-ROOT_BITS`.
pub fn root_ceil(v: &BigRational, k: u32) -> BigRational {
    assert!(k >= 1 && !v.is_negative());
    let num = v.numer() << (ROOT_BITS * k) as usize;
    let mut target = &num / v.denom();
    if &target * v.denom() != num {
        target += 1;
    }
    let mut r = target.nth_root(k);
    if num_traits::pow(r.clone(), k as usize) < target {
        r += 1;
    }
    BigRational::new(r, BigInt::one() << ROOT_BITS as usize)
}

/// Largest `f64` not exceeding `q`.
pub fn to_f64_down(q: &BigRational) -> f64 {
    let mut x = q.to_f64().unwrap_or(if q.is_negative() { f64::MIN } else { f64::MAX });
    while exact(x).is_some_and(|e| &e > q) {
        x = x.next_down();
    }
    while exact(x.next_up()).is_some_and(|e| &e <= q) {
        x = x.next_up();
    }
    x
}

/// Smallest `f64` not below `q`.
pub fn to_f64_up(q: &BigRational) -> f64 {
    let mut x = q.to_f64().unwrap_or(if q.is_negative() { f64::MIN } else { f64::MAX });
    while exact(x).is_some_and(|e| &e < q) {
        x = x.next_up();
    }
    while exact(x.next_down()).is_some_and(|e| &e >= q) {
        x = x.next_down();
    }
    x
}

fn exact(x: f64) -> Option<BigRational> {
    BigRational::from_float(x)
}

/// Best rational approximation of `x` with denominator at most `max_den`
/// (continued-fraction convergents and semiconvergents).
pub fn snap(x: f64, max_den: u64) -> BigRational {
    assert!(x.is_finite() && max_den >= 1);
    let exact = BigRational::from_float(x).expect("finite");
    if exact.denom() <= &BigInt::from(max_den) {
        return exact;
    }
    let max_den = BigInt::from(max_den);
    // convergents h/k
    let (mut h0, mut h1) = (BigInt::zero(), BigInt::one());
    let (mut k0, mut k1) = (BigInt::one(), BigInt::zero());
    let mut rest = exact.clone();
    loop {
        let a = rest.floor().to_integer();
        let h2 = &a * &h1 + &h0;
        let k2 = &a * &k1 + &k0;
        if k2 > max_den {
            // largest admissible semiconvergent
            let t = (&max_den - &k0) / &k1;
            let hs = &t * &h1 + &h0;
            let ks = &t * &k1 + &k0;
            let semi = BigRational::new(hs, ks);
            let conv = BigRational::new(h1, k1);
            return if (&semi - &exact).abs() < (&conv - &exact).abs() { semi } else { conv };
        }
        h0 = std::mem::replace(&mut h1, h2);
        k0 = std::mem::replace(&mut k1, k2);
        let frac = &rest - BigRational::from_integer(a);
        if frac.is_zero() {
            return BigRational::new(h1, k1);
        }
        rest = frac.recip();
    }
}

/// Parses `p/q`, an integer, or a decimal like `-0.25` into an exact rational.
pub fn parse_rational(s: &str) -> Option<BigRational> {
    let s = s.trim();
    if let Some((p, q)) = s.split_once('/') {
        let p: BigInt = p.trim().parse().ok()?;
        let q: BigInt = q.trim().parse().ok()?;
        if q.is_zero() {
            return None;
        }
        return Some(BigRational::new(p, q));
    }
    if let Some((whole, frac)) = s.split_once('.') {
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return None;
        }
        let negative = whole.trim_start().starts_with('-');
        let w: BigInt = match whole.trim() {
            "" | "-" | "+" => BigInt::zero(),
            t => t.parse().ok()?,
        };
        let f: BigInt = frac.parse().ok()?;
        let scale = num_traits::pow(BigInt::from(10), frac.len());
        let mag = BigRational::new(w.abs() * &scale + f, scale);
        return Some(if negative { -mag } else { mag });
    }
    s.parse::<BigInt>().ok().map(BigRational::from_integer)
}

/// Always `p/q`, also for integers.
pub fn fmt_rational(q: &BigRational) -> String {
    format!("{}/{}", q.numer(), q.denom())
}

/// Serde adapter writing rationals as `p/q` strings.
pub mod rational_string {
    use num_rational::BigRational;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(q: &BigRational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&super::fmt_rational(q))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigRational, D::Error> {
        let text = String::deserialize(d)?;
        super::parse_rational(&text).ok_or_else(|| serde::de::Error::custom(format!("bad rational `{text}`")))
    }
}
