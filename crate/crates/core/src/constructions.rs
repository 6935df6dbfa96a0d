//! Initial sets with prescribed transit times.
//!
//! The pair family strings `N` reproducing pairs with `k` evenly spaced
//! obstacles in every gap, giving a transit time linear in `n0`. The
//! progression family chains doubling arithmetic progressions and gives a
//! transit time quadratic in `n0`.

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::engine::run_orbit;
use crate::error::{MmmError, Result};
use crate::scalar::{format_scalar, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase")]
pub enum Family {
    Pair { k: usize, n: usize },
    Ap { n: usize },
    Height { n: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConstructionPlan<S> {
    pub family: Family,
    pub n0: usize,
    pub initial_set: Vec<S>,
    /// Interior obstacle points (pair family only).
    pub obstacles: Vec<S>,
    pub sentinel_low: S,
    pub predicted_tau: usize,
    pub predicted_limit: S,
    /// Predicted `(n_i, structure)` checkpoints: pairs `P_i` ready at `n_i`
    /// for the pair family, `(n_i, x_{n_i})` for the progression families.
    pub checkpoints: Vec<(usize, Vec<S>)>,
    /// `(H⁻, H⁺)` for the height family.
    pub height_bounds: Option<(S, S)>,
}

fn ceil_sqrt(r: &BigInt) -> BigInt {
    if !r.is_positive() {
        return BigInt::zero();
    }
    let s = r.sqrt();
    if &s * &s < *r {
        s + 1
    } else {
        s
    }
}

fn least_odd_at_least(bound: &BigInt) -> Result<usize> {
    let b = bound
        .to_usize()
        .ok_or_else(|| MmmError::Domain(format!("bound {bound} out of range")))?;
    Ok(if b % 2 == 1 { b } else { b + 1 })
}

/// Smallest admissible odd `n0` for the pair family with `k` obstacles per
/// gap and `N` pairs.
pub fn n0_pair(k: usize, n: usize) -> Result<usize> {
    if n < 2 {
        return Err(MmmError::Domain(format!("N = {n} must be at least 2")));
    }
    let (kb, nb) = (BigInt::from(k), BigInt::from(n));
    let a = (&kb + 1) * &nb - &kb - 3;
    let r = (3 * &kb * &kb + 8 * &kb + 5) * &nb * &nb - (8 * &kb * &kb + 22 * &kb + 14) * &nb
        + (5 * &kb * &kb + 14 * &kb + 13);
    let root_bound: BigInt = a + ceil_sqrt(&r);
    let spacing = BigInt::from(2 * k * (n - 1) + 3);
    let bound = root_bound.max(spacing).max(BigInt::from(3));
    least_odd_at_least(&bound)
}

/// Smallest admissible odd `n0` for the progression family with `N`
/// progressions.
pub fn n0_ap(n: usize) -> Result<usize> {
    if n < 2 {
        return Err(MmmError::Domain(format!("N = {n} must be at least 2")));
    }
    let nb = BigInt::from(n);
    let r = (BigInt::from(1) << (n + 2)) + 5 * &nb * &nb - 18 * &nb + 21;
    let bound: BigInt = &nb - 3 + ceil_sqrt(&r);
    let bound = bound.max(BigInt::from(5));
    least_odd_at_least(&bound)
}

fn pow2<S: Scalar>(e: usize) -> S {
    (0..e).fold(S::one(), |acc, _| acc * S::from_int(2))
}

/// The generated pairs `P_0 = [0,1], P_1, …, P_{N−1}`.
fn pairs<S: Scalar>(k: usize, n: usize, n0: usize) -> Vec<[S; 2]> {
    let mut out = vec![[S::zero(), S::one()]];
    let nn = S::from_count(n0);
    for i in 0..n - 1 {
        let ii = S::from_count(i);
        let base = S::from_count(i + 1) * nn.half()
            + S::from_count(k + 2).half() * ii.clone() * ii.clone()
            + S::from_count(k + 4).half() * ii;
        out.push([base.clone() + S::one(), base + S::from_int(2)]);
    }
    out
}

fn finish_low<S: Scalar>(mut rest: Vec<S>, limit: &S) -> (S, Vec<S>) {
    let sum = rest.iter().fold(S::zero(), |a, b| a + b.clone());
    let low = -limit.clone() - sum;
    rest.insert(0, low.clone());
    (low, rest)
}

/// Pair family with `k` obstacles per gap and `N` pairs.
pub fn build_pair_family<S: Scalar>(k: usize, n: usize) -> Result<ConstructionPlan<S>> {
    let n0 = n0_pair(k, n)?;
    let ps = pairs::<S>(k, n, n0);
    let limit = ps[n - 1][1].clone();
    let mut obstacles = Vec::with_capacity(k * (n - 1));
    for w in ps.windows(2) {
        let (a, b) = (&w[0][1], &w[1][0]);
        let step = (b.clone() - a.clone()) / S::from_count(k + 1);
        obstacles.extend((1..=k).map(|j| a.clone() + step.clone() * S::from_count(j)));
    }
    let mut rest = vec![S::zero(); (n0 - 3) / 2 + 1];
    rest.push(S::one());
    rest.extend(obstacles.iter().cloned());
    rest.extend(std::iter::repeat_n(limit.clone(), (n0 - 2 * k * (n - 1) - 3) / 2));
    let (low, set) = finish_low(rest, &limit);
    let step = 2 * k + 4;
    Ok(ConstructionPlan {
        family: Family::Pair { k, n },
        n0,
        initial_set: set,
        obstacles,
        sentinel_low: low,
        predicted_tau: n0 + step * (n - 1) + 4,
        predicted_limit: limit,
        checkpoints: ps
            .into_iter()
            .enumerate()
            .map(|(i, p)| (n0 + step * i, p.to_vec()))
            .collect(),
        height_bounds: None,
    })
}

/// `x_{n_i}` at the progression family's checkpoints `n_i`, `1 ≤ i < N`.
fn ap_checkpoints<S: Scalar>(n: usize, n0: usize) -> Vec<(usize, Vec<S>)> {
    let nn = S::from_count(n0);
    (1..n)
        .map(|i| {
            let at = n0 + (1 << (i + 1)) + 4 * i - 2;
            let ii = S::from_count(i);
            let coeff = S::from_count(5 * i).half() - S::from_int(5).half() + pow2::<S>(i - 1);
            let x = nn.clone() * nn.clone() / S::from_int(4)
                + coeff * nn.clone()
                + S::from_count(i - 1) * pow2::<S>(i + 1)
                + S::from_int(5) * ii.clone() * ii.clone()
                - S::from_int(11) * ii
                + S::from_int(5);
            (at, vec![x])
        })
        .collect()
}

/// Progression family with `N` progressions.
pub fn build_ap_family<S: Scalar>(n: usize) -> Result<ConstructionPlan<S>> {
    let n0 = n0_ap(n)?;
    let m = S::from_count(n - 1).half() * S::from_count(n0) + pow2::<S>(n) + S::from_count(n * n)
        - S::from_count(3 * n)
        + S::from_int(2);
    let mut rest = vec![S::zero(); (n0 - 3) / 2 + 1];
    rest.push(S::one());
    rest.push(S::from_int(2));
    rest.extend(std::iter::repeat_n(m.clone(), (n0 - 5) / 2));
    let (low, set) = finish_low(rest, &m);
    Ok(ConstructionPlan {
        family: Family::Ap { n },
        n0,
        initial_set: set,
        obstacles: Vec::new(),
        sentinel_low: low,
        predicted_tau: n0 + (1 << (n + 1)) + 4 * n - 2,
        predicted_limit: m,
        checkpoints: ap_checkpoints(n, n0),
        height_bounds: None,
    })
}

/// The progression family for odd `N`, with its height bounds
/// `H⁻ = m` and `H⁺ = (n0 − 4)·m + 6`.
pub fn build_height_family<S: Scalar>(n: usize) -> Result<ConstructionPlan<S>> {
    if n.is_multiple_of(2) || n < 3 {
        return Err(MmmError::Domain(format!("N = {n} must be odd and at least 3")));
    }
    let mut plan = build_ap_family::<S>(n)?;
    let m = plan.predicted_limit.clone();
    let expected_low = -m.clone() - S::from_int(3) - S::from_count((plan.n0 - 5) / 2) * m.clone();
    debug_assert_eq!(expected_low, plan.sentinel_low);
    plan.family = Family::Height { n };
    plan.height_bounds = Some((m.abs(), S::from_count(plan.n0 - 4) * m + S::from_int(6)));
    Ok(plan)
}

impl<S: Scalar> ConstructionPlan<S> {
    /// The same layout with a different lowest element.
    pub fn with_sentinel_low(&self, low: S) -> Vec<S> {
        let mut set = self.initial_set.clone();
        set[0] = low;
        set
    }

    pub fn to_dump(&self) -> PlanDump {
        let text = |xs: &[S]| xs.iter().map(format_scalar).collect::<Vec<_>>();
        PlanDump {
            family: self.family,
            n0: self.n0,
            set: text(&self.initial_set),
            obstacles: text(&self.obstacles),
            sentinel_low: format_scalar(&self.sentinel_low),
            predicted_tau: self.predicted_tau,
            predicted_limit: format_scalar(&self.predicted_limit),
            h_minus: self.height_bounds.as_ref().map(|h| format_scalar(&h.0)),
            h_plus: self.height_bounds.as_ref().map(|h| format_scalar(&h.1)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct PlanDump {
    #[serde(flatten)]
    pub family: Family,
    pub n0: usize,
    pub set: Vec<String>,
    pub obstacles: Vec<String>,
    pub sentinel_low: String,
    pub predicted_tau: usize,
    pub predicted_limit: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub h_minus: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub h_plus: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyReport<S> {
    pub simulated_tau: Option<usize>,
    pub simulated_limit: Option<S>,
    pub tau_matches: bool,
    pub limit_matches: bool,
    /// Every checkpoint agreed with the simulation: for pair plans the
    /// median sits on `min(P_i)` at `n_i`; for progression plans `x_{n_i}`
    /// has its closed-form value.
    pub checkpoints_match: bool,
}

impl<S> VerifyReport<S> {
    pub fn all_match(&self) -> bool {
        self.tau_matches && self.limit_matches && self.checkpoints_match
    }
}

/// Simulates the plan and compares against its predictions.
pub fn verify_plan<S: Scalar>(plan: &ConstructionPlan<S>, cap: usize) -> Result<VerifyReport<S>> {
    if cap < plan.predicted_tau + 10 {
        return Err(MmmError::Domain(format!(
            "cap {cap} is below the predicted transit time {} plus 10",
            plan.predicted_tau
        )));
    }
    let rec = run_orbit(&plan.initial_set, cap)?;
    let checkpoints_match = plan.checkpoints.iter().all(|(at, expect)| match plan.family {
        Family::Pair { .. } => rec.median(*at) == Some(&expect[0]),
        _ => rec.x(*at) == Some(&expect[0]),
    });
    Ok(VerifyReport {
        tau_matches: rec.tau == Some(plan.predicted_tau),
        limit_matches: rec.limit.as_ref() == Some(&plan.predicted_limit),
        simulated_tau: rec.tau,
        simulated_limit: rec.limit,
        checkpoints_match,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::parse_set;
    use crate::Rational;

    fn r(p: i64, q: i64) -> Rational {
        Rational::from_fraction(p, q).unwrap()
    }

    /// Least odd integer above a float bound, for small arguments only.
    fn float_oracle(bound: f64, floor: usize) -> usize {
        let mut n = floor.max(1) | 1;
        while (n as f64) < bound - 1e-9 {
            n += 2;
        }
        n
    }

    #[test]
    fn n0_values() {
        assert_eq!(n0_pair(1, 5).unwrap(), 21);
        assert_eq!(n0_pair(0, 2).unwrap(), 3);
        assert_eq!(n0_ap(4).unwrap(), 11);
        assert_eq!(n0_ap(9).unwrap(), 55);
        assert_eq!(n0_ap(2).unwrap(), 5);
        assert!(n0_pair(1, 1).is_err());
        assert!(n0_ap(1).is_err());
    }

    #[test]
    fn n0_agrees_with_float_oracle_on_small_inputs() {
        for k in 0..6usize {
            for n in 2..12usize {
                let (kf, nf) = (k as f64, n as f64);
                let r = (3.0 * kf * kf + 8.0 * kf + 5.0) * nf * nf - (8.0 * kf * kf + 22.0 * kf + 14.0) * nf
                    + (5.0 * kf * kf + 14.0 * kf + 13.0);
                let bound = (kf + 1.0) * nf - kf - 3.0 + r.sqrt();
                let expect = float_oracle(bound, 2 * k * (n - 1) + 3);
                assert_eq!(n0_pair(k, n).unwrap(), expect, "k={k} N={n}");
            }
        }
        for n in 2..20usize {
            let nf = n as f64;
            let bound = nf - 3.0 + (2f64.powi(n as i32 + 2) + 5.0 * nf * nf - 18.0 * nf + 21.0).sqrt();
            assert_eq!(n0_ap(n).unwrap(), float_oracle(bound, 5), "N={n}");
        }
    }

    #[test]
    fn pair_example() {
        let plan = build_pair_family::<Rational>(1, 5).unwrap();
        assert_eq!(plan.n0, 21);
        assert_eq!(plan.obstacles, parse_set::<Rational>("25/4,77/4,141/4,217/4").unwrap());
        assert_eq!(plan.sentinel_low, r(-506, 1));
        assert_eq!(plan.predicted_tau, 49);
        assert_eq!(plan.predicted_limit, r(65, 1));
        assert_eq!(
            plan.initial_set,
            parse_set::<Rational>("-506,0,0,0,0,0,0,0,0,0,0,1,25/4,77/4,141/4,217/4,65,65,65,65,65").unwrap()
        );
        let report = verify_plan(&plan, 100).unwrap();
        assert!(report.all_match(), "{report:?}");
        assert!(verify_plan(&plan, 50).is_err());
    }

    #[test]
    fn ap_example() {
        let plan = build_ap_family::<Rational>(4).unwrap();
        assert_eq!(
            plan.initial_set,
            parse_set::<Rational>("-157,0,0,0,0,0,1,2,77/2,77/2,77/2").unwrap()
        );
        assert_eq!(plan.predicted_tau, 57);
        assert_eq!(plan.predicted_limit, r(77, 2));
        assert_eq!(plan.checkpoints[0], (17, vec![r(161, 4)]));
        assert_eq!(plan.checkpoints[1], (25, vec![r(363, 4)]));
        assert!(verify_plan(&plan, 100).unwrap().all_match());
    }

    #[test]
    fn height_family_parameters() {
        let plan = build_height_family::<Rational>(9).unwrap();
        assert_eq!(plan.n0, 55);
        assert_eq!(plan.predicted_limit, r(788, 1));
        assert_eq!(plan.sentinel_low, r(-20491, 1));
        assert_eq!(plan.predicted_tau, 1113);
        assert_eq!(plan.height_bounds, Some((r(788, 1), r(40194, 1))));
        assert!(build_height_family::<Rational>(4).is_err());
    }

    #[test]
    fn sum_condition_holds() {
        for plan in [
            build_pair_family::<Rational>(2, 4).unwrap(),
            build_ap_family(6).unwrap(),
        ] {
            let sum = plan.initial_set.iter().fold(r(0, 1), |a, b| a + b);
            assert_eq!(sum, -plan.predicted_limit.clone());
            assert_eq!(plan.initial_set.len(), plan.n0);
            assert!(plan.predicted_tau > plan.n0);
        }
    }

    #[test]
    fn plan_dump_shape() {
        let json = serde_json::to_value(build_height_family::<Rational>(3).unwrap().to_dump()).unwrap();
        assert_eq!(json["family"], "height");
        assert_eq!(json["n"], 3);
        assert!(json["hMinus"].is_string() && json["hPlus"].is_string());
        let json = serde_json::to_value(build_pair_family::<Rational>(1, 5).unwrap().to_dump()).unwrap();
        assert_eq!(json["k"], 1);
        assert_eq!(json["sentinelLow"], "-506");
        assert!(json.get("hMinus").is_none());
    }
}
