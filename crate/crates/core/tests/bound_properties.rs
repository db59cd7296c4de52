mod common;

use common::{element_strategy, f, group, positive_strategy, small_config, word_strategy, GROUPS};
use powers_core::norm::{lower_bound_moments, upper_bound_l1_power};
use powers_core::{estimate, ExactElement, GroupDescriptor, NormEstimate};
use proptest::prelude::*;

const SLACK: f64 = 1e-9;
const CAP: usize = 20_000;

fn any_group() -> impl Strategy<Value = GroupDescriptor> {
    prop::sample::select(GROUPS.to_vec()).prop_map(group)
}

fn est(a: &ExactElement) -> NormEstimate {
    estimate(a, &small_config()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn brackets_are_sound_and_sandwiched(a in any_group().prop_flat_map(|g| element_strategy(g, 5, 4))) {
        let e = est(&a);
        prop_assert!(e.lower <= e.upper + SLACK, "{:?}", e);
        prop_assert!(a.l2() <= e.upper + SLACK, "{:?}", e);
        prop_assert!(e.lower <= f(&a.l1()) + SLACK, "{:?}", e);
    }

    #[test]
    fn unitary_invariance(
        (a, s) in any_group().prop_flat_map(|g| (element_strategy(g.clone(), 4, 3), word_strategy(g, 4)))
    ) {
        let x = est(&a);
        let y = est(&a.conjugate_by(&s)?);
        // both brackets contain the same norm
        prop_assert!(x.lower <= y.upper + SLACK && y.lower <= x.upper + SLACK, "{:?} {:?}", x, y);
    }

    #[test]
    fn moments_increase_and_l1_powers_decrease(a in any_group().prop_flat_map(|g| element_strategy(g, 4, 3))) {
        let mut prev = None;
        for m in 1..=4 {
            let v = lower_bound_moments(&a, m, CAP)?;
            if let Some(p) = &prev {
                prop_assert!(&v >= p);
            }
            prev = Some(v);
        }
        let mut prev = None;
        for k in 0..=2 {
            let v = upper_bound_l1_power(&a, k, CAP)?;
            if let Some(p) = &prev {
                prop_assert!(&v <= p);
            }
            prev = Some(v);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1_000))]

    /// Positive combinations: `‖x‖ ≤ ‖x + y‖`.
    #[test]
    fn positive_cone_is_monotone(
        (x, y) in any_group().prop_flat_map(|g| (positive_strategy(g.clone(), 4, 3), positive_strategy(g, 4, 3)))
    ) {
        let lx = est(&x).lower;
        let uxy = est(&x.add(&y)?).upper;
        prop_assert!(lx <= uxy + SLACK, "{} > {}", lx, uxy);
    }

    /// `‖x‖ ≤ ‖x + x*‖ ≤ 2‖x‖` for positive `x`.
    #[test]
    fn symmetrization_chain(x in any_group().prop_flat_map(|g| positive_strategy(g, 4, 3))) {
        let ex = est(&x);
        let es = est(&x.add(&x.adjoint())?);
        prop_assert!(ex.lower <= es.upper + SLACK, "{:?} {:?}", ex, es);
        prop_assert!(es.lower <= 2.0 * ex.upper + SLACK, "{:?} {:?}", ex, es);
    }
}
