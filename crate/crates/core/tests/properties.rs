use num_bigint::BigInt;
use num_traits::Signed;
use proptest::prelude::*;

use seqent_core::rational::{self, ratio};
use seqent_core::seqentropy::{h_j, join_over_times, Budgets, HjOptions, IndexFamily, Partition};
use seqent_core::weaklimits::{correlation, Correlation, DistanceEngine, TestFamily, TestSet, WeakOptions};
use seqent_core::{BernoulliSystem, ExactRational, IntervalExchange, IntervalPartition, System};

fn iet_strategy() -> impl Strategy<Value = IntervalExchange> {
    (1usize..=5)
        .prop_flat_map(|n| (prop::collection::vec(1i64..=30, n), Just((0..n).collect::<Vec<_>>()).prop_shuffle()))
        .prop_map(|(raw, perm)| {
            let total: i64 = raw.iter().sum();
            IntervalExchange::new(raw.iter().map(|&r| ratio(r, total)).collect(), perm).unwrap()
        })
}

fn unit_rational() -> impl Strategy<Value = ExactRational> {
    (1i64..=10_000).prop_flat_map(|d| (0..d).prop_map(move |n| ratio(n, d)))
}

fn members() -> impl Strategy<Value = Vec<u64>> {
    prop::collection::btree_set(1u64..=40, 1..=8).prop_map(|s| s.into_iter().collect())
}

fn exact(c: Correlation) -> ExactRational {
    c.exact().cloned().expect("exact correlation")
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn powers_add(t in iet_strategy(), a in -6i64..=6, b in -6i64..=6, x in unit_rational()) {
        let lhs = t.power(a + b).unwrap();
        let rhs = t.power(a).unwrap().compose(&t.power(b).unwrap());
        prop_assert_eq!(lhs.apply(&x).unwrap(), rhs.apply(&x).unwrap());
        prop_assert!(t.compose(&t.inverse()).apply(&x).unwrap() == x);
    }

    #[test]
    fn identity_law(depth in 1u32..=4, labels in prop::collection::vec(0u32..4, 16), fam in members()) {
        let xi = IntervalPartition::dyadic_labeled(depth, labels[..1 << depth].to_vec()).unwrap();
        let f = IndexFamily::explicit(fam, &Budgets::default()).unwrap();
        let id = System::Interval(IntervalExchange::identity());
        let r = h_j(&id, &Partition::Interval(xi.clone()), &f, &HjOptions::default()).unwrap();
        prop_assert_eq!(r.h(), xi.entropy() / f.len() as f64);
    }

    #[test]
    fn entropy_at_most_log_labels(t in iet_strategy(), depth in 1u32..=3, fam in members()) {
        let xi = IntervalPartition::dyadic(depth);
        let times: Vec<i64> = fam.iter().map(|&p| p as i64).collect();
        let j = join_over_times(&t, &xi, &times, &Budgets::default()).unwrap();
        prop_assert!(j.entropy_bits / times.len() as f64 <= depth as f64 + 1e-12);
    }

    #[test]
    fn correlations_preserve_measure(t in iet_strategy(), m in -8i64..=8, k in 0u64..8) {
        let sys = System::Interval(t);
        let opts = WeakOptions::default();
        let b = TestSet::interval(rational::dyadic(k, 3), rational::dyadic(k + 1, 3));
        let mut sum = rational::zero();
        for i in 0..4 {
            let a = TestSet::interval(rational::dyadic(i, 2), rational::dyadic(i + 1, 2));
            sum += exact(correlation(&sys, &a, &b, m, &opts).unwrap());
        }
        prop_assert_eq!(sum, b.lebesgue());
    }

    #[test]
    fn bernoulli_independence(fam in members()) {
        let f = IndexFamily::explicit(fam, &Budgets::default()).unwrap();
        let sys = System::Bernoulli(BernoulliSystem::fair());
        let r = h_j(&sys, &Partition::Cylinder { window: 1 }, &f, &HjOptions::default()).unwrap();
        prop_assert_eq!(r.h(), 1.0);
    }

    #[test]
    fn distances_match_pairwise_sum(t in iet_strategy(), m in 0i64..=12) {
        let sys = System::Interval(t);
        let fam = TestFamily::dyadic_1d(2).unwrap();
        let opts = WeakOptions::default();
        let e = DistanceEngine::new(&sys, &fam, &opts).unwrap();
        let full = TestSet::interval(rational::zero(), rational::one());
        let mut to_theta = rational::zero();
        let mut to_id = rational::zero();
        for (i, a) in fam.sets().iter().enumerate() {
            let mu_a = exact(correlation(&sys, a, &full, 0, &opts).unwrap());
            for (j, b) in fam.sets().iter().enumerate() {
                let c = exact(correlation(&sys, a, b, m, &opts).unwrap());
                let c0 = exact(correlation(&sys, a, b, 0, &opts).unwrap());
                let w = fam.weight(i, j);
                to_theta += &w * (&c - &mu_a * b.lebesgue()).abs();
                to_id += &w * (&c - &c0).abs();
            }
        }
        prop_assert_eq!(e.dist_to_theta(m).unwrap().exact, Some(to_theta));
        prop_assert_eq!(e.dist_to_identity(m).unwrap().exact, Some(to_id));
    }
}

#[test]
fn identity_theta_distance_is_constant() {
    let sys = System::Interval(IntervalExchange::identity());
    let fam = TestFamily::dyadic_1d(4).unwrap();
    let e = DistanceEngine::new(&sys, &fam, &WeakOptions::default()).unwrap();
    let d0 = e.dist_to_theta(0).unwrap();
    for m in [1, 7, 100] {
        assert_eq!(e.dist_to_theta(m).unwrap(), d0);
    }
    assert!(d0.value > 0.0);
}

#[test]
fn rotation_rigidity_within_horizon() {
    let r = seqent_core::RotationSpec::golden(40).unwrap();
    let sys = System::Interval(r.to_iet());
    let fam = TestFamily::dyadic_1d(6).unwrap();
    let e = DistanceEngine::new(&sys, &fam, &WeakOptions::default()).unwrap();
    // F39 lies past the alias horizon of F40/F41
    assert!(e.dist_to_identity(63_245_986).unwrap_err().is_budget());
    let d = e.dist_to_identity(46_368).unwrap();
    assert!(d.value < 0.01);
}

#[test]
fn baker_identity_distance_stays_large() {
    let sys = System::Bernoulli(BernoulliSystem::fair());
    let fam = TestFamily::dyadic_2d(4).unwrap();
    let e = DistanceEngine::new(&sys, &fam, &WeakOptions::default()).unwrap();
    assert!(e.dist_to_identity(10).unwrap().value > 0.05);
}

#[test]
fn exact_weights_have_expected_denominator() {
    let fam = TestFamily::dyadic_1d(1).unwrap();
    assert_eq!(fam.weight_denominator(), BigInt::from(49));
}
