use octobench_core::generator::{generate, GeneratorParams};
use octobench_core::{Constraint, ConstraintKind, Octagon};
use proptest::prelude::*;

fn constraint(n: usize) -> impl Strategy<Value = Constraint> {
    (0..6usize, 0..n, 1..n.max(2), -40i64..=40).prop_map(move |(ki, i, d, c)| {
        let kind = if n == 1 {
            ConstraintKind::ALL[4 + ki % 2]
        } else {
            ConstraintKind::ALL[ki]
        };
        Constraint::new(kind, i, (i + d) % n, c)
    })
}

fn closed_state(n: usize) -> impl Strategy<Value = Octagon> {
    prop::collection::vec(constraint(n), 0..12).prop_map(move |ks| Octagon::from_constraints(n, &ks).unwrap().close_full())
}

fn three_states() -> impl Strategy<Value = (Octagon, Octagon, Octagon)> {
    (1usize..6).prop_flat_map(|n| (closed_state(n), closed_state(n), closed_state(n)))
}

fn generated() -> impl Strategy<Value = Octagon> {
    (1usize..10, 0usize..10, any::<u64>()).prop_map(|(n, d, seed)| {
        generate::<Octagon>(&GeneratorParams::new(n, d as f64 / 10.0, seed)).unwrap().state
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn closure_is_idempotent_tightening_and_coherent(o in generated()) {
        let c = o.close_full();
        prop_assert!(!c.is_bottom());
        prop_assert!(c.dbm().le(o.dbm()));
        let again = c.close_full();
        prop_assert_eq!(again.dbm(), c.dbm());
        prop_assert_eq!(c.coherence_violation(), None);
        prop_assert_eq!(c.canonical_violation(), None);
        for i in 0..2 * c.n() {
            prop_assert_eq!(c.entry(i, i), octobench_core::Bound::Finite(0));
        }
    }

    #[test]
    fn join_is_an_upper_bound_and_commutes((a, b, _) in three_states()) {
        let j = a.join(&b).unwrap();
        prop_assert!(j.includes(&a).unwrap());
        prop_assert!(j.includes(&b).unwrap());
        prop_assert_eq!(&j, &b.join(&a).unwrap());
        prop_assert_eq!(&a.join(&a).unwrap(), &a);
        if !j.is_bottom() {
            prop_assert_eq!(j.coherence_violation(), None);
        }
    }

    #[test]
    fn join_is_associative((a, b, c) in three_states()) {
        let l = a.join(&b).unwrap().join(&c).unwrap();
        let r = a.join(&b.join(&c).unwrap()).unwrap();
        prop_assert_eq!(l, r);
    }

    #[test]
    fn meet_is_a_lower_bound_and_commutes((a, b, _) in three_states()) {
        let m = a.meet(&b).unwrap().close_full();
        prop_assert!(a.includes(&m).unwrap());
        prop_assert!(b.includes(&m).unwrap());
        prop_assert_eq!(&m, &b.meet(&a).unwrap().close_full());
        prop_assert_eq!(&a.meet(&a).unwrap().close_full(), &a);
    }

    #[test]
    fn includes_is_a_partial_order((a, b, c) in three_states()) {
        prop_assert!(a.includes(&a).unwrap());
        if a.includes(&b).unwrap() && b.includes(&a).unwrap() {
            prop_assert_eq!(&a, &b);
        }
        if a.includes(&b).unwrap() && b.includes(&c).unwrap() {
            prop_assert!(a.includes(&c).unwrap());
        }
        let ab = a.join(&b).unwrap();
        prop_assert_eq!(ab.includes(&a).unwrap(), true);
    }

    #[test]
    fn widening_chains_stabilize_within_bound(
        (n, start, steps) in (1usize..5).prop_flat_map(|n| (Just(n), closed_state(n), prop::collection::vec(closed_state(n), 1..40)))
    ) {
        let d = 2 * n;
        let limit = d * d + 1;
        let mut w = start;
        let mut changes = 0;
        for s in steps.iter().cycle().take(limit + 5) {
            let closed_w = if w.is_bottom() { w.clone() } else { w.close_full() };
            let next = w.widen(&closed_w.join(s).unwrap()).unwrap();
            if next != w {
                changes += 1;
            }
            w = next;
        }
        prop_assert!(changes <= limit, "{} changes", changes);
        let _ = n;
    }

    #[test]
    fn forget_over_approximates_and_clears((o, v) in (1usize..6).prop_flat_map(|n| (closed_state(n), 0..n))) {
        prop_assume!(!o.is_bottom());
        let f = o.forget(v).unwrap();
        prop_assert!(f.includes(&o).unwrap());
        if !f.is_bottom() {
            for t in 0..2 * o.n() {
                for idx in [2 * v, 2 * v + 1] {
                    if t != idx {
                        prop_assert!(f.entry(idx, t).is_infinite());
                        prop_assert!(f.entry(t, idx).is_infinite());
                    }
                }
            }
        }
    }
}
