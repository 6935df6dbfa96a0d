use mmm_core::algorithms::{algorithm_a, algorithm_b, trace_seeded, Kind, Seed, Termination};
use mmm_core::constructions::build_pair_family;
use mmm_core::engine::LiveOrbit;
use mmm_core::normal_form::normal_form_initial;
use mmm_core::{parse_set, Rational};

#[test]
fn obstacle_free_pairs_are_ready_every_four_steps() {
    for n in 3..=8 {
        let plan = build_pair_family::<Rational>(0, n).unwrap();
        let mut orbit = LiveOrbit::new(&plan.initial_set, plan.predicted_tau + 20).unwrap();
        let (t1, p1) = plan.checkpoints[1].clone();
        let trace = trace_seeded(&mut orbit, Kind::B, Seed::Values(p1), t1).unwrap();
        let expected: Vec<usize> = plan.checkpoints[1..n - 1].iter().map(|c| c.0).collect();
        assert_eq!(trace.ready_times, expected, "N={n}");
        assert!(trace.ready_times.windows(2).all(|w| w[1] == w[0] + 4));
        // The last pair lands on the limit and cannot become ready.
        assert_eq!(trace.termination, Termination::NeverReady);
        let last = trace.structures.last().unwrap();
        assert_eq!(last.values, plan.checkpoints[n - 1].1);
        assert_eq!(last.values.last(), Some(&plan.predicted_limit));
    }
}

#[test]
fn unseeded_tracers_start_from_the_central_block() {
    let set = normal_form_initial::<Rational>(21, 400).unwrap();
    let b = algorithm_b(&set, 400).unwrap();
    assert_eq!(b.ready_times[0], set.len());
    assert_eq!(b.structures[0].values.len(), 2);
    let a = algorithm_a(&parse_set::<Rational>("-3,-3,0,1,2").unwrap(), 400).unwrap();
    assert!(a.lengths().windows(2).all(|w| w[1] == 2 * w[0] - 2));
}

#[test]
fn seeds_with_duplicates_are_rejected() {
    let plan = build_pair_family::<Rational>(0, 4).unwrap();
    let err = algorithm_b(&plan.initial_set, 200).unwrap_err();
    assert!(err.to_string().contains("not ready"), "{err}");
}
