//! Bounds computed entirely in exact arithmetic: trace moments, ℓ¹ norms of
//! powers, and the Haagerup inequality on free groups.

use num_rational::BigRational;
use num_traits::Zero;

use crate::algebra::ExactElement;
use crate::error::{Error, Result};
use crate::numeric::{root_ceil, root_floor};

/// Convolutions whose naive work `|supp x|·|supp y|` exceeds this multiple of
/// the support cap are refused up front instead of being attempted.
const WORK_FACTOR: usize = 8;

fn checked_convolve(x: &ExactElement, y: &ExactElement, cap: usize) -> Result<ExactElement> {
    let work = x.support_len().saturating_mul(y.support_len());
    if work > cap.saturating_mul(WORK_FACTOR) {
        return Err(Error::budget("convolution work", work, cap.saturating_mul(WORK_FACTOR)));
    }
    x.convolve(y, cap)
}

/// `trace((a*a)^m)^{1/(2m)}`, rounded down.
pub fn lower_bound_moments(a: &ExactElement, m: usize, cap: usize) -> Result<BigRational> {
    if m == 0 {
        return Err(Error::InvalidConfig("moment depth must be positive".into()));
    }
    let (values, err) = moment_sequence(a, m, cap);
    match err {
        Some(e) => Err(e),
        None => Ok(values.last().cloned().unwrap_or_else(BigRational::zero)),
    }
}

/// Moment bounds for depths `1..=m` until the budget runs out. Uses
/// `trace((a*a)^m) = ‖w_m‖²` with `w_m` obtained from `δ_e` by applying
/// `a, a*, a, …` alternately, which keeps supports at radius `m·deg(a)`.
pub(crate) fn moment_sequence(a: &ExactElement, m: usize, cap: usize) -> (Vec<BigRational>, Option<Error>) {
    let adj = a.adjoint();
    let mut values = Vec::with_capacity(m);
    let mut w = a.clone();
    for j in 1..=m {
        if j > 1 {
            let left = if j % 2 == 1 { a } else { &adj };
            match checked_convolve(left, &w, cap) {
                Ok(next) => w = next,
                Err(e) => return (values, Some(e)),
            }
        }
        values.push(root_floor(&w.l2_squared(), 2 * j as u32));
    }
    (values, None)
}

/// `l1(b^{2^k})^{1/2^{k+1}}` with `b = a*a`, rounded up.
pub fn upper_bound_l1_power(a: &ExactElement, k: usize, cap: usize) -> Result<BigRational> {
    let (values, err) = l1_power_sequence(a, k, cap)?;
    match err {
        Some(e) => Err(e),
        None => Ok(values.last().cloned().expect("k = 0 always succeeds")),
    }
}

/// Bounds for `k = 0..=k_max` until the budget runs out. For elements with
/// nonnegative coefficients `l1` is multiplicative on powers, so every depth
/// gives the same value and no powering is done.
pub(crate) fn l1_power_sequence(
    a: &ExactElement,
    k_max: usize,
    cap: usize,
) -> Result<(Vec<BigRational>, Option<Error>)> {
    let mut b = a.adjoint().convolve(a, cap)?;
    let first = root_ceil(&b.l1(), 2);
    if a.is_nonnegative() {
        return Ok((vec![first; k_max + 1], None));
    }
    let mut values = vec![first];
    for k in 1..=k_max {
        b = match checked_convolve(&b, &b, cap) {
            Ok(next) => next,
            Err(e) => return Ok((values, Some(e))),
        };
        values.push(root_ceil(&b.l1(), 1 << (k + 1)));
    }
    Ok((values, None))
}

/// `Σ_d (d + 1)·l2(a_d)` over the length strata `a_d` of `a`; free groups only.
pub fn upper_bound_haagerup(a: &ExactElement) -> Result<BigRational> {
    if !a.group().is_free() {
        return Err(Error::WrongBackend { op: "upper_bound_haagerup", group: a.group().to_string() });
    }
    let mut total = BigRational::zero();
    for d in 0..=a.degree() {
        let s = a.stratum(d);
        if s.is_zero() {
            continue;
        }
        let l2 = root_ceil(&s.l2_squared(), 2);
        total += l2 * BigRational::from_integer((d as i64 + 1).into());
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::parse_element;
    use crate::group::GroupDescriptor;
    use crate::numeric::{int, rat};
    use num_traits::ToPrimitive;

    const CAP: usize = 1_000_000;

    fn f2() -> GroupDescriptor {
        "F2".parse().unwrap()
    }

    #[test]
    fn moments_of_unitaries_are_one() {
        let g = f2();
        let x = parse_element(&g, "abA").unwrap();
        for m in 1..6 {
            assert_eq!(lower_bound_moments(&x, m, CAP).unwrap(), int(1));
        }
    }

    #[test]
    fn kesten_first_moment() {
        let g = f2();
        let k = parse_element(&g, "(1/4)(a+A+b+B)").unwrap();
        assert_eq!(lower_bound_moments(&k, 1, CAP).unwrap(), rat(1, 2));
    }

    #[test]
    fn z_first_moment() {
        let z: GroupDescriptor = "Z".parse().unwrap();
        let x = parse_element(&z, "(1/2)((1)+(-1))").unwrap();
        let v = lower_bound_moments(&x, 1, CAP).unwrap().to_f64().unwrap();
        assert!((v - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);
    }

    /// Closed-walk counts on the 4-regular tree: returns to the root after
    /// 2j steps, by the first-passage recursion.
    fn tree_returns(steps: usize) -> Vec<f64> {
        // f[n]: first-return walks of length 2n for a 3-branching subtree
        let n = steps / 2;
        let mut sub = vec![0f64; n + 1]; // returns within a subtree rooted below
        sub[0] = 1.0;
        for len in 1..=n {
            let mut s = 0.0;
            for i in 1..=len {
                // first excursion into one of 3 children, duration 2i
                s += 3.0 * sub[i - 1] * sub[len - i];
            }
            sub[len] = s;
        }
        let mut root = vec![0f64; n + 1];
        root[0] = 1.0;
        for len in 1..=n {
            let mut s = 0.0;
            for i in 1..=len {
                s += 4.0 * sub[i - 1] * root[len - i];
            }
            root[len] = s;
        }
        root
    }

    #[test]
    fn kesten_moments_match_walk_counts() {
        let g = f2();
        let k = parse_element(&g, "(1/4)(a+A+b+B)").unwrap();
        let returns = tree_returns(16);
        let (values, err) = moment_sequence(&k, 8, CAP);
        assert!(err.is_none());
        for (i, v) in values.iter().enumerate() {
            let m = i + 1;
            let oracle = (returns[m] / 4f64.powi(2 * m as i32)).powf(1.0 / (2 * m) as f64);
            let got = v.to_f64().unwrap();
            assert!(got <= oracle + 1e-12 && oracle - got < 1e-11, "m={m}: {got} vs {oracle}");
        }
        for w in values.windows(2) {
            assert!(w[0] <= w[1]);
        }
        assert!(values.last().unwrap().to_f64().unwrap() < 3f64.sqrt() / 2.0);
    }

    #[test]
    fn l1_power_examples() {
        let g = f2();
        let d = parse_element(&g, "ab").unwrap();
        for k in 0..4 {
            assert_eq!(upper_bound_l1_power(&d, k, CAP).unwrap(), int(1));
        }
        let k = parse_element(&g, "(1/4)(a+A+b+B)").unwrap();
        assert_eq!(upper_bound_l1_power(&k, 0, CAP).unwrap(), int(1));
        // positive coefficients: l1 is multiplicative, powering cannot help
        assert_eq!(upper_bound_l1_power(&k, 2, CAP).unwrap(), int(1));
    }

    #[test]
    fn l1_power_helps_with_signs() {
        let g = f2();
        // a sign pattern that is not a character twist of a positive element
        let x = parse_element(&g, "1 + a + b - ab").unwrap();
        let (values, err) = l1_power_sequence(&x, 2, CAP).unwrap();
        assert!(err.is_none());
        for w in values.windows(2) {
            assert!(w[1] <= w[0]);
        }
        assert!(values[2] < values[0]);
        assert!(values[2].to_f64().unwrap() >= x.l2_squared().to_f64().unwrap().sqrt());
    }

    #[test]
    fn l1_power_budget() {
        let g = f2();
        let x = parse_element(&g, "a - A + b - B + ab - ba").unwrap();
        assert!(matches!(upper_bound_l1_power(&x, 6, 1000), Err(Error::BudgetExceeded { .. })));
    }

    #[test]
    fn haagerup_examples() {
        let g = f2();
        assert_eq!(upper_bound_haagerup(&parse_element(&g, "e").unwrap()).unwrap(), int(1));
        assert_eq!(upper_bound_haagerup(&parse_element(&g, "abA").unwrap()).unwrap(), int(4));
        let k = parse_element(&g, "(1/4)(a+A+b+B)").unwrap();
        assert_eq!(upper_bound_haagerup(&k).unwrap(), int(1));
        let z: GroupDescriptor = "Z2".parse().unwrap();
        let x = parse_element(&z, "(1,0)").unwrap();
        assert!(matches!(upper_bound_haagerup(&x), Err(Error::WrongBackend { .. })));
    }
}
