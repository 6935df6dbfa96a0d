//! Normal-form orbits: central pair `[0, 1]`, every other element pushed far
//! away with a sentinel magnitude `L`.

use std::ops::ControlFlow;

use crate::engine::{record_orbit, OrbitRecord};
use crate::error::{MmmError, Result};
use crate::scalar::Scalar;

/// Enlargements of `L` tried before giving up.
pub const SENTINEL_RETRIES: usize = 5;

/// A sentinel-clean normal-form run.
#[derive(Debug, Clone)]
pub struct NormalForm<S> {
    pub order: usize,
    pub record: OrbitRecord<S>,
    /// The sentinel magnitude that produced a clean run.
    pub sentinel: S,
    pub retries: usize,
    /// True when the horizon ended the run before `N_t` was located.
    pub partial: bool,
}

fn check_order(t: usize) -> Result<()> {
    if t < 5 || t.is_multiple_of(2) {
        return Err(MmmError::Domain(format!("order {t} must be odd and at least 5")));
    }
    Ok(())
}

/// Starting sentinel `2^40 · t²`.
pub fn initial_sentinel<S: Scalar>(t: usize) -> S {
    S::from_int(1 << 40) * S::from_count(t.max(1) * t.max(1))
}

/// The initial set of size `n0 = t − 2` with sentinel `L`:
/// `[−L−1, −L, …, −L, 0, 1, L, …, L]`, arranged so that `x_{n0+1} = L`.
pub fn normal_form_set<S: Scalar>(t: usize, sentinel: &S) -> Result<Vec<S>> {
    check_order(t)?;
    let n0 = t - 2;
    let side = (n0 - 3) / 2;
    let mut set = Vec::with_capacity(n0);
    set.push(-sentinel.clone() - S::one());
    set.extend(std::iter::repeat_n(-sentinel.clone(), side));
    set.push(S::zero());
    set.push(S::one());
    set.extend(std::iter::repeat_n(sentinel.clone(), side));
    Ok(set)
}

/// Runs the normal-form orbit of order `t` until the set has `horizon`
/// elements (or it stabilizes first). If an iterate other than `x_{n0+1}`,
/// or any median, reaches magnitude `L`, the run restarts with `L·L`.
pub fn normal_form_orbit<S: Scalar>(t: usize, horizon: usize) -> Result<NormalForm<S>> {
    check_order(t)?;
    if horizon < t {
        return Err(MmmError::Domain(format!("horizon {horizon} is below the order {t}")));
    }
    let n0 = t - 2;
    let peak = S::from_count(t * t) / S::from_int(4);
    let mut sentinel = initial_sentinel::<S>(t);
    for retries in 0..=SENTINEL_RETRIES {
        let set = normal_form_set(t, &sentinel)?;
        let mut nt = None;
        let (mut record, outcome) = record_orbit(&set, horizon - n0, |n, x, st| {
            if (n != n0 + 1 && x.abs() >= sentinel) || st.median().abs() >= sentinel {
                return ControlFlow::Break(());
            }
            if nt.is_none() && n % 2 == 0 && n > t + 2 {
                let (lo, hi) = st.set().central_pair().expect("non-empty");
                if *hi == peak && *lo < *hi {
                    nt = Some(n - 2);
                }
            }
            ControlFlow::Continue(())
        })?;
        if outcome.aborted {
            sentinel = sentinel.clone() * sentinel;
            continue;
        }
        record.nt = nt;
        return Ok(NormalForm {
            order: t,
            partial: nt.is_none(),
            record,
            sentinel,
            retries,
        });
    }
    Err(MmmError::SentinelRetries(SENTINEL_RETRIES))
}

/// The sentinel-clean initial set for order `t` up to `horizon`.
pub fn normal_form_initial<S: Scalar>(t: usize, horizon: usize) -> Result<Vec<S>> {
    let nf = normal_form_orbit::<S>(t, horizon)?;
    normal_form_set(t, &nf.sentinel)
}

/// Closed forms of `x_{t+j}` for `j = 0..=7` in the regular phase.
pub fn regular_phase_reference<S: Scalar>(t: usize, j: usize) -> Result<S> {
    check_order(t)?;
    let tt = S::from_count(t);
    let half = tt.half();
    let sq = tt.clone() * tt.clone() / S::from_int(4);
    let int = S::from_int;
    Ok(match j {
        0 => half,
        1 => half + int(1),
        2 => sq,
        3 => sq + half - int(1),
        4 => tt + int(2),
        5 => tt + int(3),
        6 => sq + half * int(5) + int(4),
        7 => sq + tt * int(3) + int(5),
        _ => return Err(MmmError::Domain(format!("regular-phase index {j} outside 0..=7"))),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Rational;

    fn r(p: i64, q: i64) -> Rational {
        Rational::from_fraction(p, q).unwrap()
    }

    #[test]
    fn set_layout() {
        let l = r(1000, 1);
        let s = normal_form_set(11, &l).unwrap();
        assert_eq!(s.len(), 9);
        let sum = s.iter().fold(r(0, 1), |a, b| a + b);
        assert_eq!(sum, -l.clone());
        assert!(normal_form_set(6, &l).is_err());
        assert!(normal_form_set(3, &l).is_err());
    }

    #[test]
    fn first_iterate_is_the_sentinel() {
        let nf = normal_form_orbit::<Rational>(11, 40).unwrap();
        assert_eq!(nf.record.x(10), Some(&nf.sentinel));
        assert_eq!(nf.record.x(11), Some(&r(11, 2)));
    }

    #[test]
    fn regular_phase_matches_simulation() {
        for t in [11, 205, 261] {
            let nf = normal_form_orbit::<Rational>(t, t + 20).unwrap();
            for j in 0..=7 {
                assert_eq!(
                    nf.record.x(t + j).unwrap(),
                    &regular_phase_reference::<Rational>(t, j).unwrap(),
                    "t = {t}, j = {j}"
                );
            }
        }
        assert!(regular_phase_reference::<Rational>(205, 8).is_err());
        assert_eq!(regular_phase_reference::<Rational>(205, 2).unwrap(), r(42025, 4));
    }

    #[test]
    fn horizon_must_reach_the_order() {
        assert!(normal_form_orbit::<Rational>(11, 10).is_err());
    }

    #[test]
    fn short_horizon_is_flagged_partial() {
        let nf = normal_form_orbit::<Rational>(205, 300).unwrap();
        assert!(nf.partial);
        assert_eq!(nf.record.nt, None);
    }
}
