use mmm_core::constructions::{build_ap_family, build_height_family, build_pair_family, verify_plan};
use mmm_core::engine::run_orbit;
use mmm_core::{Rational, Scalar};

#[test]
fn pair_plans_match_simulation() {
    for k in 0..=3 {
        for n in 2..=6 {
            let plan = build_pair_family::<Rational>(k, n).unwrap();
            assert_eq!(plan.n0 % 2, 1);
            let report = verify_plan(&plan, plan.predicted_tau + 50).unwrap();
            assert!(report.all_match(), "k={k} N={n}: {report:?}");
        }
    }
}

#[test]
fn ap_plans_match_simulation() {
    for n in 2..=8 {
        let plan = build_ap_family::<Rational>(n).unwrap();
        let report = verify_plan(&plan, plan.predicted_tau + 50).unwrap();
        assert!(report.all_match(), "N={n}: {report:?}");
    }
}

#[test]
fn pair_plan_non_pair_iterates_lie_above_the_limit() {
    for k in 0..=3 {
        for n in 2..=6 {
            let plan = build_pair_family::<Rational>(k, n).unwrap();
            let rec = run_orbit(&plan.initial_set, plan.predicted_tau + 10).unwrap();
            let pair_values: Vec<&Rational> = plan.checkpoints.iter().flat_map(|(_, p)| p.iter()).collect();
            for i in plan.n0 + 1..plan.predicted_tau {
                let x = rec.x(i).unwrap();
                if !pair_values.contains(&x) {
                    assert!(x >= &plan.predicted_limit, "k={k} N={n}: x_{i} = {x}");
                }
            }
        }
    }
}

#[test]
fn sentinels_avoid_the_open_range() {
    let zero = Rational::from_int(0);
    let mut plans = Vec::new();
    for k in 0..=3 {
        for n in 2..=6 {
            plans.push(build_pair_family::<Rational>(k, n).unwrap());
        }
    }
    for n in 2..=10 {
        plans.push(build_ap_family(n).unwrap());
    }
    for plan in plans {
        let interior: Vec<&Rational> = plan.obstacles.iter().collect();
        let core = [Rational::from_int(0), Rational::from_int(1), Rational::from_int(2)];
        for x in &plan.initial_set {
            if interior.contains(&x) || core.contains(x) {
                continue;
            }
            assert!(!(x > &zero && x < &plan.predicted_limit), "{:?}: {x}", plan.family);
        }
    }
}

#[test]
fn transit_ratios_follow_the_asymptotics() {
    // k = 0: tau / n0 decreases towards sqrt 5 from above.
    let ratios: Vec<f64> = [10, 40, 160]
        .iter()
        .map(|&n| {
            let p = build_pair_family::<Rational>(0, n).unwrap();
            p.predicted_tau as f64 / p.n0 as f64
        })
        .collect();
    assert!((ratios[2] - 5f64.sqrt()).abs() < (ratios[0] - 5f64.sqrt()).abs());
    assert!((ratios[2] - 5f64.sqrt()).abs() < 0.05);
    // Large k: the coefficient approaches sqrt 3.
    let p = build_pair_family::<Rational>(200, 400).unwrap();
    assert!((p.predicted_tau as f64 / p.n0 as f64 - 3f64.sqrt()).abs() < 0.05);
    // Progressions: tau ~ n0^2 / 2.
    let p = build_ap_family::<Rational>(30).unwrap();
    let ratio = p.predicted_tau as f64 / (p.n0 as f64 * p.n0 as f64 / 2.0);
    assert!((ratio - 1.0).abs() < 0.1, "{ratio}");
}

#[test]
fn height_family_tau_tracks_twice_h_minus() {
    for n in [5, 7, 9] {
        let plan = build_height_family::<Rational>(n).unwrap();
        let (h_minus, _) = plan.height_bounds.clone().unwrap();
        let ratio = Rational::from_count(plan.predicted_tau) / h_minus;
        let r = ratio.to_integer();
        assert!(r >= 1.into() && r <= 2.into(), "N={n}");
    }
}
