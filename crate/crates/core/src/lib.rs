//! Exact-arithmetic laboratory for the mean-median map.
//!
//! Everything is generic over [`Scalar`], an exact rational type. The crate
//! root fixes the usual instantiation: arbitrary-precision [`Rational`].

pub mod algorithms;
pub mod constructions;
pub mod engine;
pub mod error;
pub mod fit;
pub mod height;
pub mod multiset;
pub mod normal_form;
pub mod scalar;
pub mod structure;
pub mod sweep;

pub use error::{MmmError, Result};
pub use scalar::{format_scalar, format_set, normalize, parse_scalar, parse_set, Scalar};

/// Arbitrary-precision rational; the default scalar everywhere.
pub type Rational = num_rational::BigRational;
/// Machine-word rational, for quick experiments that are known not to overflow.
pub type Rational64 = num_rational::Ratio<i64>;

pub type Multiset = multiset::OrderedMultiset<Rational>;
pub type Orbit = engine::OrbitRecord<Rational>;
pub type Window = structure::ReadyWindow<Rational>;
pub type Trace = algorithms::AlgoTrace<Rational>;
pub type Plan = constructions::ConstructionPlan<Rational>;
