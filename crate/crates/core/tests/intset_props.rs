use num_bigint::BigInt;
use proptest::prelude::*;
use urbasis::intset::IntSet;
use urbasis::oracle::brute_count;

fn small_set(max_len: usize) -> impl Strategy<Value = IntSet> {
    prop::collection::vec(-60i64..60, 0..max_len).prop_map(|v| IntSet::from_i64s(&v))
}

proptest! {
    #[test]
    fn sumset_commutes(a in small_set(12), b in small_set(12)) {
        prop_assert_eq!(a.sumset(&b), b.sumset(&a));
    }

    #[test]
    fn sumset_is_translation_equivariant(a in small_set(12), b in small_set(12), c in -1000i64..1000) {
        let c = BigInt::from(c);
        prop_assert_eq!(a.translate(&c).sumset(&b), a.sumset(&b).translate(&c));
    }

    #[test]
    fn sumset_size_is_bounded(a in small_set(12), b in small_set(12)) {
        prop_assert!(a.sumset(&b).len() <= a.len() * b.len());
    }

    #[test]
    fn translate_keeps_size(a in small_set(20), c in -1000i64..1000) {
        prop_assert_eq!(a.translate(&BigInt::from(c)).len(), a.len());
    }

    #[test]
    fn rep_counts_sum_to_pair_count(a in small_set(20)) {
        let n = a.len();
        let total: u64 = a.sumset(&a).iter().map(|s| a.rep_count(s)).sum();
        prop_assert_eq!(total as usize, n * (n + 1) / 2);
    }

    #[test]
    fn rep_count_positive_iff_in_sumset(a in small_set(15), n in -130i64..130) {
        let n = BigInt::from(n);
        prop_assert_eq!(a.rep_count(&n) > 0, a.sumset(&a).contains(&n));
        prop_assert_eq!(a.rep_count(&n), brute_count(&a, &n));
    }

    #[test]
    fn symmetric_count_is_monotone(a in small_set(20), x in 0i64..70) {
        let lo = a.counting_symmetric(&BigInt::from(x)).unwrap();
        let hi = a.counting_symmetric(&BigInt::from(x + 1)).unwrap();
        prop_assert!(lo <= hi);
    }

    #[test]
    fn counting_matches_filter(a in small_set(20), y in -70i64..70, w in 0i64..80) {
        let (y, x) = (BigInt::from(y), BigInt::from(y + w));
        let direct = a.iter().filter(|v| **v >= y && **v <= x).count();
        prop_assert_eq!(a.counting(&y, &x).unwrap(), direct);
    }

    #[test]
    fn unique_sums_flag_matches_counts(a in small_set(10)) {
        let max = a.sumset(&a).iter().map(|s| a.rep_count(s)).max().unwrap_or(0);
        prop_assert_eq!(a.has_unique_sums(), max <= 1);
    }
}

#[test]
fn min_abs_missing_stays_within_radius_on_constructed_states() {
    let trace = urbasis::run_greedy(12).unwrap();
    for step in &trace.steps {
        let s = step.set.sumset(&step.set);
        let m = s.min_abs_missing();
        assert!(m.value >= BigInt::from(1));
        assert!(m.value < 2 * &step.d, "step {}", step.k);
    }
}
