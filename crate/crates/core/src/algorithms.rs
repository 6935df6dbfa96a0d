//! Recursive reproductions of arithmetic progressions (kind A) and of pairs
//! (kind B), traced over a live orbit.
//!
//! The orbit is always simulated; the closed-form predictions are checked
//! against it, never substituted for it.

use serde::{Deserialize, Serialize};

use crate::engine::LiveOrbit;
use crate::error::{MmmError, Result};
use crate::scalar::{format_scalar, format_set, Scalar};
use crate::structure::{predict_ap, predict_pair, ReadyWindow};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Kind {
    A,
    B,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum Termination {
    /// Two equal consecutive medians during the scan.
    MedianStall,
    /// A median gap fell below half the structure's modulus.
    MuDrop,
    /// The median passed the new structure's minimum before it became ready.
    NeverReady,
    HorizonExhausted,
}

impl Termination {
    pub fn as_str(self) -> &'static str {
        match self {
            Termination::MedianStall => "medianStall",
            Termination::MuDrop => "muDrop",
            Termination::NeverReady => "neverReady",
            Termination::HorizonExhausted => "horizonExhausted",
        }
    }
}

/// One generated structure, `[x_start, …, x_{start+len−1}]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Structure<S> {
    pub start: usize,
    pub values: Vec<S>,
    /// The window, if the structure later became ready.
    pub ready: Option<ReadyWindow<S>>,
}

impl<S: Scalar> Structure<S> {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn end(&self) -> usize {
        self.start + self.values.len() - 1
    }

    pub fn modulus(&self) -> S {
        self.values[1].clone() - self.values[0].clone()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlgoTrace<S> {
    pub kind: Kind,
    /// `n_0, …, n_{N−1}`: the set sizes at which each structure was ready.
    pub ready_times: Vec<usize>,
    /// The seed structure, ready at `ready_times[0]`.
    pub seed: Vec<S>,
    /// `AP_1 … AP_N` or `P_1 … P_N`.
    pub structures: Vec<Structure<S>>,
    pub termination: Termination,
    /// The value of `k` at which the final scan stopped.
    pub exit_index: usize,
}

impl<S: Scalar> AlgoTrace<S> {
    pub fn lengths(&self) -> Vec<usize> {
        self.structures.iter().map(Structure::len).collect()
    }

    pub fn to_dump(&self) -> TraceDump {
        TraceDump {
            kind: match self.kind {
                Kind::A => "A".into(),
                Kind::B => "B".into(),
            },
            ready_times: self.ready_times.clone(),
            structures: self
                .structures
                .iter()
                .map(|s| StructureDump {
                    start: s.start,
                    len: s.len(),
                    first: format_scalar(&s.values[0]),
                    modulus: format_scalar(&s.modulus()),
                })
                .collect(),
            termination: self.termination.as_str().into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct TraceDump {
    pub kind: String,
    pub ready_times: Vec<usize>,
    pub structures: Vec<StructureDump>,
    pub termination: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StructureDump {
    pub start: usize,
    pub len: usize,
    pub first: String,
    pub modulus: String,
}

/// Where a traced run starts.
#[derive(Debug, Clone)]
pub enum Seed<S> {
    /// The seed given by value.
    Values(Vec<S>),
    /// The seed given as orbit indices, e.g. `x630, x637, x638`.
    Indices(Vec<usize>),
}

fn mismatch<S: Scalar>(index: usize, predicted: &S, simulated: &S) -> MmmError {
    MmmError::PredictionMismatch {
        index,
        predicted: format_scalar(predicted),
        simulated: format_scalar(simulated),
    }
}

/// Readiness of `values` inside the past set `ξ_k`.
fn ready_at<S: Scalar>(orbit: &LiveOrbit<S>, values: &[S], k: usize) -> Result<Option<ReadyWindow<S>>> {
    if k.is_multiple_of(2) {
        return Err(MmmError::EvenHost(k));
    }
    let lo = &values[0];
    let hi = values.last().expect("non-empty");
    if orbit.window_at(k, lo, hi)? != values {
        return Ok(None);
    }
    if orbit.median(k) != Some(lo) {
        return Ok(None);
    }
    Ok(match ReadyWindow::from_values(values.to_vec(), k) {
        Ok(mut w) => {
            w.anchor_index = (k - 1) / 2;
            Some(w)
        }
        Err(_) => None,
    })
}

struct Tracer<'a, S> {
    orbit: &'a mut LiveOrbit<S>,
    kind: Kind,
    /// Present in unseeded mode, where the literal normalized formulas are
    /// also checked.
    normalized: bool,
    threshold: S,
}

enum Scan {
    Next(usize),
    Stop(Termination, usize),
}

impl<S: Scalar> Tracer<'_, S> {
    fn predict(&self, current: &[S], n: usize) -> Result<Vec<S>> {
        match self.kind {
            Kind::A => predict_ap(&ReadyWindow::from_values(current.to_vec(), n)?, n),
            Kind::B => {
                let (a, b) = predict_pair(&current[0], &current[1], n)?;
                Ok(vec![a, b])
            }
        }
    }

    /// `x_{n_i+j}` by the normalized pseudocode formulas.
    fn literal(&self, i: usize, j: usize, half_sum: &S) -> S {
        match self.kind {
            Kind::A => S::from_count(j + i) - S::one() + half_sum.clone(),
            Kind::B => S::from_count(i + j - 1) + half_sum.clone(),
        }
    }

    fn stalled(&self, prev: &S, cur: &S) -> Option<Termination> {
        match self.kind {
            Kind::A => (prev == cur).then_some(Termination::MedianStall),
            Kind::B => (cur.clone() - prev.clone() < self.threshold).then_some(Termination::MuDrop),
        }
    }

    /// The inner scan: looks for the first odd `k ≥ n_i + 2` at which `next`
    /// is ready with `x_{k+1} ≥ max(next)`.
    fn scan(&mut self, n_i: usize, next: &[S], found: &mut Option<ReadyWindow<S>>) -> Result<Scan> {
        let bound = next[0].clone();
        let top = next.last().expect("non-empty").clone();
        let mut k = n_i + 2;
        let mut ready_time = None;
        loop {
            let (prev, cur) = match (self.orbit.median_at(k - 1), self.orbit.median_at(k)) {
                (Ok(p), Ok(c)) => (p, c),
                _ => return Ok(Scan::Stop(Termination::HorizonExhausted, k)),
            };
            let reason = self
                .stalled(&prev, &cur)
                .or_else(|| (cur > bound).then_some(Termination::NeverReady));
            if let Some(reason) = reason {
                return Ok(match ready_time {
                    Some(t) => Scan::Next(t),
                    None => Scan::Stop(reason, k),
                });
            }
            if let Some(w) = ready_at(self.orbit, next, k)? {
                let after = match self.orbit.x_at(k + 1) {
                    Ok(x) => x,
                    Err(_) => return Ok(Scan::Stop(Termination::HorizonExhausted, k)),
                };
                if after >= top {
                    ready_time = Some(k);
                    *found = Some(w);
                }
            }
            k += 2;
        }
    }

    fn run(mut self, seed: Vec<S>, n0: usize) -> Result<AlgoTrace<S>> {
        let mut ready_times = vec![n0];
        let mut structures: Vec<Structure<S>> = Vec::new();
        let mut current = seed.clone();
        let mut half_sum = S::from_count(n0).half();
        let mut i = 0usize;
        loop {
            let n_i = ready_times[i];
            let predicted = self.predict(&current, n_i)?;
            let mut simulated = Vec::with_capacity(predicted.len());
            for (offset, p) in predicted.iter().enumerate() {
                let j = offset + 2;
                let x = match self.orbit.x_at(n_i + j) {
                    Ok(x) => x,
                    Err(_) => {
                        return Ok(self.finish(seed, ready_times, structures, Termination::HorizonExhausted, n_i + j))
                    }
                };
                if &x != p {
                    return Err(mismatch(n_i + j, p, &x));
                }
                if self.normalized {
                    let lit = self.literal(i, j, &half_sum);
                    if lit != x {
                        return Err(mismatch(n_i + j, &lit, &x));
                    }
                }
                simulated.push(x);
            }
            structures.push(Structure {
                start: n_i + 2,
                values: simulated.clone(),
                ready: None,
            });
            let mut found = None;
            match self.scan(n_i, &simulated, &mut found)? {
                Scan::Next(k) => {
                    structures.last_mut().expect("pushed").ready = found;
                    ready_times.push(k);
                    half_sum = half_sum + S::from_count(k).half();
                    current = simulated;
                    i += 1;
                }
                Scan::Stop(reason, k) => return Ok(self.finish(seed, ready_times, structures, reason, k)),
            }
        }
    }

    fn finish(
        &self,
        seed: Vec<S>,
        ready_times: Vec<usize>,
        structures: Vec<Structure<S>>,
        termination: Termination,
        exit_index: usize,
    ) -> AlgoTrace<S> {
        AlgoTrace {
            kind: self.kind,
            ready_times,
            seed,
            structures,
            termination,
            exit_index,
        }
    }
}

fn check_seed<S: Scalar>(orbit: &mut LiveOrbit<S>, kind: Kind, values: &[S], time: usize) -> Result<()> {
    let what = match kind {
        Kind::A => "seed progression",
        Kind::B => "seed pair",
    };
    match kind {
        Kind::A if values.len() < 2 => return Err(MmmError::Precondition(format!("{what} needs at least two terms"))),
        Kind::B if values.len() != 2 => return Err(MmmError::Precondition(format!("{what} must have two terms"))),
        _ => {}
    }
    if values
        .windows(2)
        .any(|w| w[1].clone() - w[0].clone() != values[1].clone() - values[0].clone())
    {
        return Err(MmmError::Precondition(format!(
            "{what} [{}] is not an arithmetic progression",
            format_set(values)
        )));
    }
    if time.is_multiple_of(2) {
        return Err(MmmError::Precondition(format!("seed time {time} must be odd")));
    }
    orbit.advance_to(time + 1)?;
    if ready_at(orbit, values, time)?.is_none() {
        return Err(MmmError::Precondition(format!(
            "{what} [{}] is not ready at size {time}",
            format_set(values)
        )));
    }
    let next = orbit.x(time + 1).expect("advanced");
    if next < values.last().expect("non-empty") {
        return Err(MmmError::Precondition(format!(
            "first iterate after the seed, x_{} = {next}, lies below the {what}",
            time + 1
        )));
    }
    Ok(())
}

/// Runs a tracer from an explicit seed structure ready at size `time`.
pub fn trace_seeded<S: Scalar>(
    orbit: &mut LiveOrbit<S>,
    kind: Kind,
    seed: Seed<S>,
    time: usize,
) -> Result<AlgoTrace<S>> {
    let values = match seed {
        Seed::Values(v) => v,
        Seed::Indices(ix) => {
            let top = ix.iter().copied().max().unwrap_or(0);
            orbit.advance_to(top.max(time))?;
            ix.iter()
                .map(|&n| {
                    orbit
                        .x(n)
                        .cloned()
                        .ok_or_else(|| MmmError::Precondition(format!("index {n} is not an orbit index")))
                })
                .collect::<Result<Vec<_>>>()?
        }
    };
    check_seed(orbit, kind, &values, time)?;
    let threshold = (values[1].clone() - values[0].clone()).half();
    Tracer {
        orbit,
        kind,
        normalized: false,
        threshold,
    }
    .run(values, time)
}

fn unseeded<S: Scalar>(initial: &[S], horizon: usize, kind: Kind) -> Result<AlgoTrace<S>> {
    let n0 = initial.len();
    let (min_size, seed_len) = match kind {
        Kind::A => (5, 3),
        Kind::B => (3, 2),
    };
    if n0.is_multiple_of(2) || n0 < min_size {
        return Err(MmmError::Precondition(format!(
            "input size {n0} must be odd and at least {min_size}"
        )));
    }
    let seed: Vec<S> = (0..seed_len).map(|v| S::from_int(v as i64)).collect();
    let mut orbit = LiveOrbit::new(initial, horizon)?;
    check_seed(&mut orbit, kind, &seed, n0)?;
    Tracer {
        orbit: &mut orbit,
        kind,
        normalized: true,
        threshold: S::one().half(),
    }
    .run(seed, n0)
}

/// Recursive reproductions of arithmetic progressions starting from the
/// ready block `[0, 1, 2]` at the median of `initial`.
pub fn algorithm_a<S: Scalar>(initial: &[S], horizon: usize) -> Result<AlgoTrace<S>> {
    unseeded(initial, horizon, Kind::A)
}

/// Recursive reproductions of pairs starting from the ready pair `[0, 1]`.
pub fn algorithm_b<S: Scalar>(initial: &[S], horizon: usize) -> Result<AlgoTrace<S>> {
    unseeded(initial, horizon, Kind::B)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::parse_set;
    use crate::Rational;

    fn set(text: &str) -> Vec<Rational> {
        parse_set(text).unwrap()
    }

    #[test]
    fn witness_set_generates_first_progression() {
        let trace = algorithm_a(&set("-3,-3,0,1,2"), 200).unwrap();
        assert_eq!(trace.ready_times[0], 5);
        assert_eq!(trace.structures[0].values, set("7/2,9/2,11/2,13/2"));
        assert_eq!(trace.structures[0].start, 7);
    }

    #[test]
    fn preconditions_are_named() {
        let err = algorithm_a(&set("-3,0,1,2"), 100).unwrap_err();
        assert!(matches!(err, MmmError::Precondition(ref m) if m.contains("odd")));
        let err = algorithm_a(&set("-3,-3,0,1,3"), 100).unwrap_err();
        assert!(matches!(err, MmmError::Precondition(ref m) if m.contains("not ready")));
        // x_6 = 6·0 − 3 = −3 < 2
        let err = algorithm_a(&set("-1,-1,0,1,2"), 100).unwrap_err();
        assert!(matches!(err, MmmError::Precondition(ref m) if m.contains("below")));
        let err = algorithm_b(&set("-5,0,1,7"), 100).unwrap_err();
        assert!(matches!(err, MmmError::Precondition(_)));
    }

    #[test]
    fn sizes_double_minus_two() {
        let trace = algorithm_a(&set("-3,-3,0,1,2"), 5_000).unwrap();
        for (i, s) in trace.structures.iter().enumerate() {
            assert_eq!(s.len(), (1 << (i + 1)) + 2);
        }
        assert!(trace.ready_times.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn short_horizon_is_reported_not_raised() {
        let trace = algorithm_a(&set("-3,-3,0,1,2"), 8).unwrap();
        assert_eq!(trace.termination, Termination::HorizonExhausted);
    }

    #[test]
    fn trace_dump_shape() {
        let trace = algorithm_a(&set("-3,-3,0,1,2"), 200).unwrap();
        let json = serde_json::to_value(trace.to_dump()).unwrap();
        assert_eq!(json["kind"], "A");
        assert_eq!(json["readyTimes"][0], 5);
        assert_eq!(json["structures"][0]["first"], "7/2");
        assert_eq!(json["structures"][0]["modulus"], "1");
        assert!(json["termination"].is_string());
    }
}
