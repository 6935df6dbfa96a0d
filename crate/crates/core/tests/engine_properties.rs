use mmm_core::engine::{next_by_medians, next_by_sum, run_orbit, MmmState};
use mmm_core::{Rational, Scalar};
use proptest::prelude::*;
use proptest::test_runner::RngSeed;

/// Reference simulator: sorts a plain vector every step.
fn naive_orbit(initial: &[Rational], steps: usize) -> Vec<Rational> {
    let mut xs = initial.to_vec();
    let mut out = Vec::new();
    for _ in 0..steps {
        let mut sorted = xs.clone();
        sorted.sort();
        let n = sorted.len();
        let median = if n % 2 == 1 {
            sorted[n / 2].clone()
        } else {
            (&sorted[n / 2 - 1] + &sorted[n / 2]) / Rational::from_int(2)
        };
        let sum: Rational = xs.iter().sum();
        let x = Rational::from_count(n + 1) * median - sum;
        xs.push(x.clone());
        out.push(x);
    }
    out
}

fn rational() -> impl Strategy<Value = Rational> {
    (-30i64..=30, 1i64..=12).prop_map(|(p, q)| Rational::from_fraction(p, q).unwrap())
}

fn initial_set() -> impl Strategy<Value = Vec<Rational>> {
    prop::collection::vec(rational(), 3..=15)
}

fn nonzero() -> impl Strategy<Value = Rational> {
    rational().prop_filter("a must be non-zero", |a| a != &Rational::from_int(0))
}

proptest! {
    #![proptest_config(ProptestConfig {
        cases: 256,
        rng_seed: RngSeed::Fixed(0x6d6d6d),
        ..ProptestConfig::default()
    })]

    #[test]
    fn engine_matches_naive_simulation(set in initial_set()) {
        // The sorting oracle is quadratic; a short prefix suffices.
        let rec = run_orbit(&set, 400).unwrap();
        let naive = naive_orbit(&set, rec.iterates.len());
        prop_assert_eq!(&rec.iterates, &naive);
    }

    #[test]
    fn sum_and_median_forms_agree(set in initial_set()) {
        let mut st = MmmState::new(&set).unwrap();
        st.step();
        for _ in 0..1_000 {
            let by_sum = next_by_sum(st.set()).unwrap();
            let by_medians = next_by_medians(st.n(), st.median(), st.prev_median().unwrap());
            prop_assert_eq!(&by_sum, &by_medians);
            prop_assert_eq!(st.step(), by_sum);
        }
    }

    #[test]
    fn medians_are_monotone(set in initial_set()) {
        let rec = run_orbit(&set, 10_000).unwrap();
        prop_assert!(rec.is_monotone());
        prop_assert!(rec.mu.windows(2).all(|w| w[1] <= w[0]));
    }

    #[test]
    fn affine_images_have_affine_orbits(set in initial_set(), a in nonzero(), b in rational()) {
        let rec = run_orbit(&set, 10_000).unwrap();
        let image: Vec<Rational> = set.iter().map(|x| &a * x + &b).collect();
        let moved = run_orbit(&image, 10_000).unwrap();
        prop_assert_eq!(moved.tau, rec.tau);
        let mapped: Vec<Rational> = rec.iterates.iter().map(|x| &a * x + &b).collect();
        prop_assert_eq!(moved.iterates, mapped);
    }

    #[test]
    fn stall_is_permanent(set in initial_set()) {
        let rec = run_orbit(&set, 10_000).unwrap();
        if let (Some(tau), Some(limit)) = (rec.tau, rec.limit.clone()) {
            prop_assert!(tau > set.len());
            let mut st = MmmState::new(&set).unwrap();
            while !st.is_stalled() {
                st.step();
            }
            for _ in 0..100 {
                prop_assert_eq!(st.step(), limit.clone());
            }
            for n in tau..=rec.last_index() {
                prop_assert_eq!(rec.x(n), Some(&limit));
            }
        }
    }
}

#[test]
fn duplicate_median_set_is_pinned() {
    let set = [Rational::from_int(0), Rational::from_int(0), Rational::from_int(1)];
    let rec = run_orbit(&set, 100).unwrap();
    assert_eq!(rec.tau, Some(5));
    assert_eq!(rec.limit, Some(Rational::from_int(0)));
    assert_eq!(naive_orbit(&set, 2), rec.iterates);
}
