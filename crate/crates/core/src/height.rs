//! Height of rational sets up to affine equivalence.
//!
//! The height of `p/q` is `|p|` for integers and `|p| + q` otherwise; a set's
//! height is the minimum of its summed heights over all affine images
//! `a·x + b`. Only an upper bound is computed, by searching a finite family
//! of maps.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{MmmError, Result};
use crate::scalar::format_scalar;
use crate::Rational;

pub fn singleton_height(x: &Rational) -> BigInt {
    if x.denom().is_one() {
        x.numer().abs()
    } else {
        x.numer().abs() + x.denom()
    }
}

/// Summed heights of the elements as given.
pub fn representation_height(xs: &[Rational]) -> BigInt {
    xs.iter().map(singleton_height).sum()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HeightReport {
    pub value: BigInt,
    /// The map `x ↦ a·x + b` realizing `value`.
    pub witness: (Rational, Rational),
    pub per_element: Vec<BigInt>,
    /// True only where the minimum is known. `[0, p/q, 1]` does not qualify:
    /// `[0, 9/10, 1]` maps to `[3, 0, -1/3]` of height 7.
    pub is_exact_claim: bool,
    pub note: Option<String>,
}

impl HeightReport {
    pub fn to_dump(&self) -> HeightDump {
        HeightDump {
            value: self.value.to_string(),
            witness: HeightWitness {
                a: format_scalar(&self.witness.0),
                b: format_scalar(&self.witness.1),
            },
            per_element: self.per_element.iter().map(ToString::to_string).collect(),
            is_exact_claim: self.is_exact_claim,
            note: self.note.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct HeightDump {
    pub value: String,
    pub witness: HeightWitness,
    pub per_element: Vec<String>,
    pub is_exact_claim: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HeightWitness {
    pub a: String,
    pub b: String,
}

fn image(xs: &[Rational], a: &Rational, b: &Rational) -> Vec<Rational> {
    xs.iter().map(|x| a * x + b).collect()
}

fn fractional_part(x: &Rational) -> Rational {
    x - x.floor()
}

/// Maps `x ↦ a·x + b` with `a` a denominator or its reciprocal, and `b`
/// moving one element to 0 or making it integral.
fn scaling_maps(xs: &[Rational]) -> Vec<(Rational, Rational)> {
    let dens: BTreeSet<BigInt> = xs.iter().map(|x| x.denom().clone()).collect();
    let lcm = dens.iter().fold(BigInt::one(), |acc, d| acc.lcm(d));
    let mut scales: BTreeSet<Rational> = BTreeSet::new();
    for d in dens.iter().chain(std::iter::once(&lcm)) {
        scales.insert(Rational::from_integer(d.clone()));
        scales.insert(Rational::new(BigInt::one(), d.clone()));
    }
    let mut maps = Vec::new();
    for a in &scales {
        let mut shifts: BTreeSet<Rational> = BTreeSet::new();
        for x in xs {
            let ax = a * x;
            shifts.insert(-fractional_part(&ax));
            shifts.insert(-ax);
        }
        maps.extend(shifts.into_iter().map(|b| (a.clone(), b)));
    }
    maps
}

/// Upper bound on the height of `xs`.
pub fn height_upper(xs: &[Rational]) -> Result<HeightReport> {
    if xs.is_empty() {
        return Err(MmmError::EmptySet);
    }
    let distinct: Vec<Rational> = xs.iter().cloned().collect::<BTreeSet<_>>().into_iter().collect();
    if distinct.len() == 1 {
        let b = -distinct[0].clone();
        return Ok(HeightReport {
            value: BigInt::zero(),
            per_element: vec![BigInt::zero(); xs.len()],
            witness: (Rational::one(), b),
            is_exact_claim: true,
            note: Some("all elements equal; translated to 0".into()),
        });
    }

    let mut candidates: Vec<(Rational, Rational)> = vec![(Rational::one(), Rational::zero())];
    for u in &distinct {
        for v in &distinct {
            if u == v {
                continue;
            }
            let a = (v - u).recip();
            let b = -(u * &a);
            candidates.push((-a.clone(), -b.clone()));
            candidates.push((a, b));
        }
    }
    candidates.extend(scaling_maps(xs));
    let (lo, hi) = (&distinct[0], &distinct[distinct.len() - 1]);
    for (a0, b0) in [
        ((hi - lo).recip(), -(lo / (hi - lo))),
        (-(hi - lo).recip(), hi / (hi - lo)),
    ] {
        let normalized = image(xs, &a0, &b0);
        for (a1, b1) in scaling_maps(&normalized) {
            candidates.push((&a1 * &a0, &a1 * &b0 + b1));
        }
    }

    let mut best: Option<(BigInt, usize)> = None;
    for (i, (a, b)) in candidates.iter().enumerate() {
        let h = representation_height(&image(xs, a, b));
        if best.as_ref().is_none_or(|(v, _)| h < *v) {
            best = Some((h, i));
        }
    }
    let (value, i) = best.expect("identity is always a candidate");
    let (a, b) = candidates.swap_remove(i);
    let per_element = image(xs, &a, &b).iter().map(singleton_height).collect();
    Ok(HeightReport {
        value,
        per_element,
        witness: (a, b),
        is_exact_claim: false,
        note: is_unit_triple(xs).then(|| "not certified: images with fractional entries can be cheaper".into()),
    })
}

/// `[0, x, 1]` with `0 < x < 1`, in any order.
fn is_unit_triple(xs: &[Rational]) -> bool {
    let mut s = xs.to_vec();
    s.sort();
    s.len() == 3 && s[0].is_zero() && s[2].is_one() && s[1].is_positive() && s[1] < s[2]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{parse_set, Scalar};

    fn r(p: i64, q: i64) -> Rational {
        Rational::from_fraction(p, q).unwrap()
    }

    #[test]
    fn singletons() {
        assert_eq!(singleton_height(&r(0, 1)), BigInt::from(0));
        assert_eq!(singleton_height(&r(3, 7)), BigInt::from(10));
        assert_eq!(singleton_height(&r(-19703, 1)), BigInt::from(19703));
        assert_eq!(singleton_height(&r(-3, 7)), BigInt::from(10));
    }

    #[test]
    fn representation() {
        assert_eq!(representation_height(&parse_set("0,3/7,1").unwrap()), BigInt::from(11));
        assert_eq!(representation_height(&parse_set("-3,0,4").unwrap()), BigInt::from(7));
    }

    #[test]
    fn unit_triples_reach_their_denominator() {
        for (p, q) in [(1, 2), (3, 5), (2, 3), (17, 29), (1, 50)] {
            let rep = height_upper(&[r(0, 1), r(p, q), r(1, 1)]).unwrap();
            assert_eq!(rep.value, BigInt::from(q), "{p}/{q}");
            assert!(!rep.is_exact_claim);
            let sum: BigInt = rep.per_element.iter().sum();
            assert_eq!(sum, rep.value);
        }
    }

    #[test]
    fn scaled_triples_keep_their_value() {
        let xs = [r(0, 1), r(3, 5), r(1, 1)];
        for (c, d) in [(2, 3), (-7, 2), (1, 9)] {
            let scaled: Vec<Rational> = xs.iter().map(|x| x * r(c, d) + r(1, 4)).collect();
            let rep = height_upper(&scaled).unwrap();
            assert_eq!(rep.value, BigInt::from(5));
            assert!(!rep.is_exact_claim);
        }
    }

    #[test]
    fn unit_triple_bound_is_not_a_minimum() {
        let scaled = [r(0, 1), r(3, 10), r(1, 3)];
        let rep = height_upper(&scaled).unwrap();
        assert_eq!(rep.value, BigInt::from(7));
        let (a, b) = &rep.witness;
        let xs: Vec<Rational> = scaled.iter().map(|x| a * x + b).collect();
        assert_eq!(representation_height(&xs), BigInt::from(7));
    }

    #[test]
    fn degenerate_and_empty() {
        let rep = height_upper(&[r(5, 3), r(5, 3)]).unwrap();
        assert_eq!(rep.value, BigInt::from(0));
        assert!(rep.note.is_some());
        assert!(height_upper(&[]).is_err());
    }

    #[test]
    fn never_worse_than_identity() {
        let xs = parse_set::<Rational>("-506,0,0,1,25/4,77/4,65").unwrap();
        let rep = height_upper(&xs).unwrap();
        assert!(rep.value <= representation_height(&xs));
        let (a, b) = &rep.witness;
        assert_eq!(representation_height(&image(&xs, a, b)), rep.value);
    }
}
