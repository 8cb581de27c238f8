use ekverify_core::exactpoly::{rat, Rational, UniPoly};
use proptest::prelude::*;

fn small_rational() -> impl Strategy<Value = Rational> {
    (-9i64..=9, 1i64..=5).prop_map(|(n, d)| rat(n, d))
}

fn small_poly() -> impl Strategy<Value = UniPoly> {
    proptest::collection::vec(small_rational(), 0..=9).prop_map(UniPoly::new)
}

/// Distinct roots `r/10` spaced at least 1/10 apart; some fall outside
/// the scanned interval and at its upper endpoint.
fn spaced_roots() -> impl Strategy<Value = Vec<i64>> {
    proptest::collection::btree_set(-30i64..=30, 1..=6).prop_map(|s| s.into_iter().collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn derivative_is_linear(p in small_poly(), q in small_poly()) {
        prop_assert_eq!((&p + &q).derivative(), &p.derivative() + &q.derivative());
    }

    #[test]
    fn derivative_product_rule(p in small_poly(), q in small_poly()) {
        let lhs = (&p * &q).derivative();
        let rhs = &(&p.derivative() * &q) + &(&p * &q.derivative());
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn difference_is_zero_iff_equal(p in small_poly(), q in small_poly()) {
        prop_assert_eq!((&p - &q).is_zero(), p == q);
        prop_assert!((&p - &p).is_zero());
    }

    #[test]
    fn sturm_matches_sign_scan(roots in spaced_roots(), lead in 1i64..=4, neg in any::<bool>()) {
        let mut p = UniPoly::constant(rat(if neg { -lead } else { lead }, 1));
        for r in &roots {
            p = &p * &UniPoly::new(vec![rat(-r, 10), rat(1, 1)]);
        }
        // Sample grid avoids the roots: roots sit on multiples of 1/10,
        // samples on odd multiples of 1/20000 offset from them.
        let (lo, hi) = (rat(-2, 1), rat(2, 1));
        // Roots on the included upper endpoint are invisible to the scan.
        let at_hi = usize::from(roots.contains(&20));
        let steps = 10_000i64;
        let mut count = 0usize;
        let mut prev = p.eval(&(&lo + rat(1, 2 * steps)));
        for s in 1..steps {
            let t = &lo + rat(4 * s, steps) + rat(1, 2 * steps);
            let v = p.eval(&t);
            if (v.clone() * prev.clone()) < rat(0, 1) {
                count += 1;
            }
            prev = v;
        }
        let sturm = p.sturm_root_count(&lo, &hi, true).unwrap();
        prop_assert_eq!(sturm, count + at_hi);
    }
}
