use mmm_core::height::{height_upper, representation_height, singleton_height};
use mmm_core::{Rational, Scalar};
use num_bigint::BigInt;
use num_integer::Integer;
use proptest::prelude::*;

fn r(p: i64, q: i64) -> Rational {
    Rational::from_fraction(p, q).unwrap()
}

fn reduced_fraction() -> impl Strategy<Value = (i64, i64)> {
    (2i64..=50)
        .prop_flat_map(|q| (1..q, Just(q)))
        .prop_filter("reduced", |(p, q)| p.gcd(q) == 1)
}

fn rational_set() -> impl Strategy<Value = Vec<Rational>> {
    prop::collection::vec((-40i64..=40, 1i64..=9).prop_map(|(p, q)| r(p, q)), 2..=7)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn three_point_sets_have_height_q((p, q) in reduced_fraction()) {
        let report = height_upper(&[r(0, 1), r(p, q), r(1, 1)]).unwrap();
        prop_assert_eq!(report.value, BigInt::from(q));
        prop_assert!(!report.is_exact_claim);
    }

    #[test]
    fn scaled_three_point_sets_never_exceed_q((p, q) in reduced_fraction(), a in 1i64..=6, d in 1i64..=6, b in -5i64..=5) {
        let scale = r(a, d);
        let shift = r(b, 1);
        let set: Vec<Rational> = [r(0, 1), r(p, q), r(1, 1)].iter().map(|x| &scale * x + &shift).collect();
        prop_assert!(height_upper(&set).unwrap().value <= BigInt::from(q));
    }

    #[test]
    fn integer_shifts_keep_height_q((p, q) in reduced_fraction(), b in -20i64..=20, flip in any::<bool>()) {
        let sign = if flip { -1 } else { 1 };
        let set: Vec<Rational> = [r(0, 1), r(p, q), r(1, 1)].iter().map(|x| x * r(sign, 1) + r(b, 1)).collect();
        prop_assert_eq!(height_upper(&set).unwrap().value, BigInt::from(q));
    }

    #[test]
    fn report_is_consistent_and_bounded(set in rational_set()) {
        let report = height_upper(&set).unwrap();
        prop_assert!(report.value <= representation_height(&set));
        let (a, b) = &report.witness;
        let image: Vec<Rational> = set.iter().map(|x| a * x + b).collect();
        let per: Vec<BigInt> = image.iter().map(singleton_height).collect();
        prop_assert_eq!(&report.per_element, &per);
        prop_assert_eq!(report.value.clone(), per.iter().sum::<BigInt>());
    }

    #[test]
    fn appending_an_integer_costs_at_most_its_image_height(set in rational_set(), extra in -20i64..=20) {
        let before = height_upper(&set).unwrap();
        let mut bigger = set.clone();
        let x = r(extra, 1);
        bigger.push(x.clone());
        let after = height_upper(&bigger).unwrap();
        let (a, b) = &before.witness;
        prop_assert!(after.value <= before.value + singleton_height(&(a * &x + b)));
    }
}

#[test]
fn singleton_examples() {
    assert_eq!(singleton_height(&r(0, 1)), BigInt::from(0));
    assert_eq!(singleton_height(&r(3, 7)), BigInt::from(10));
    assert_eq!(singleton_height(&r(-19703, 1)), BigInt::from(19703));
    assert_eq!(representation_height(&[r(-3, 1), r(0, 1), r(4, 1)]), BigInt::from(7));
}

#[test]
fn fractional_images_beat_the_denominator() {
    // [0, 9/10, 1] under x -> -10x/3 + 3 is [3, 0, -1/3].
    let image = [r(3, 1), r(0, 1), r(-1, 3)];
    assert_eq!(representation_height(&image), BigInt::from(7));
    let scaled = [r(0, 1), r(3, 10), r(1, 3)];
    assert!(height_upper(&scaled).unwrap().value <= BigInt::from(7));
}

#[test]
fn degenerate_input_is_translated_to_zero() {
    let report = height_upper(&[r(5, 3), r(5, 3)]).unwrap();
    assert_eq!(report.value, BigInt::from(0));
    assert!(report.note.is_some());
}
