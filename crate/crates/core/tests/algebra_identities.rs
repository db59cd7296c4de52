mod common;

use common::{element_strategy, group, word_strategy, GROUPS};
use powers_core::{AnyElement, ExactElement, GroupDescriptor};
use proptest::prelude::*;

const CAP: usize = 1 << 20;

fn pair() -> impl Strategy<Value = (GroupDescriptor, ExactElement, ExactElement)> {
    prop::sample::select(GROUPS.to_vec()).prop_map(group).prop_flat_map(|g| {
        let e = element_strategy(g.clone(), 6, 4);
        (Just(g), e.clone(), e)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1_000))]

    #[test]
    fn trace_is_tracial((_, a, b) in pair()) {
        prop_assert_eq!(a.convolve(&b, CAP)?.trace(), b.convolve(&a, CAP)?.trace());
    }

    #[test]
    fn parseval((_, a, _b) in pair()) {
        let t = a.adjoint().convolve(&a, CAP)?.trace();
        prop_assert_eq!(&t, &a.l2_squared());
        prop_assert!(t >= num_traits::Zero::zero());
        prop_assert!(a.l2() <= common::f(&a.l1()) * (1.0 + 1e-15));
    }

    #[test]
    fn involution_is_antimultiplicative((_, a, b) in pair()) {
        let lhs = a.convolve(&b, CAP)?.adjoint();
        let rhs = b.adjoint().convolve(&a.adjoint(), CAP)?;
        prop_assert_eq!(lhs, rhs);
        prop_assert_eq!(a.adjoint().adjoint(), a);
    }

    #[test]
    fn ring_axioms(
        (g, a, b, c) in prop::sample::select(GROUPS.to_vec()).prop_map(group).prop_flat_map(|g| {
            let e = element_strategy(g.clone(), 5, 3);
            (Just(g), e.clone(), e.clone(), e)
        })
    ) {
        let left = a.convolve(&b.add(&c)?, CAP)?;
        prop_assert_eq!(left, a.convolve(&b, CAP)?.add(&a.convolve(&c, CAP)?)?);
        let right = a.add(&b)?.convolve(&c, CAP)?;
        prop_assert_eq!(right, a.convolve(&c, CAP)?.add(&b.convolve(&c, CAP)?)?);
        prop_assert_eq!(a.convolve(&b, CAP)?.convolve(&c, CAP)?, a.convolve(&b.convolve(&c, CAP)?, CAP)?);
        let one = ExactElement::delta(&g, &g.identity())?;
        prop_assert_eq!(one.convolve(&a, CAP)?, a.clone());
        prop_assert_eq!(a.convolve(&one, CAP)?, a);
    }

    #[test]
    fn conjugation_preserves_trace_and_norms(
        (a, s) in prop::sample::select(GROUPS.to_vec()).prop_map(group).prop_flat_map(|g| {
            (element_strategy(g.clone(), 6, 4), word_strategy(g, 5))
        })
    ) {
        let c = a.conjugate_by(&s)?;
        prop_assert_eq!(c.trace(), a.trace());
        prop_assert_eq!(c.l1(), a.l1());
        prop_assert_eq!(c.l2_squared(), a.l2_squared());
    }

    #[test]
    fn json_round_trip((_, a, _b) in pair()) {
        let any = AnyElement::Exact(a);
        let back = AnyElement::from_json_str(&any.to_json_string())?;
        prop_assert_eq!(back, any);
    }
}
