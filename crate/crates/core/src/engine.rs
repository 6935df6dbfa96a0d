//! Iteration of the mean-median map.
//!
//! A set `ξ_n` of size `n` is enlarged by `x_{n+1} = (n+1)·M(ξ_n) − S(ξ_n)`,
//! the unique number that makes the mean of `ξ_{n+1}` equal the median of
//! `ξ_n`. Two equal consecutive medians `M_{k-1} = M_k` force every later
//! iterate to equal `M_k`; that is the stabilization test used throughout.

use std::ops::ControlFlow;

use serde::{Deserialize, Serialize};

use crate::error::{MmmError, Result};
use crate::multiset::OrderedMultiset;
use crate::scalar::{format_scalar, parse_scalar, Scalar};

/// Default iteration cap for single-orbit runs.
pub const DEFAULT_CAP: usize = 1_000_000;

/// `x_{n+1}` from the sum form, given the current set.
pub fn next_by_sum<S: Scalar>(set: &OrderedMultiset<S>) -> Result<S> {
    let n = set.len();
    Ok(S::from_count(n + 1) * set.median()? - set.sum().clone())
}

/// `x_{n+1} = (n+1)·M_n − n·M_{n-1}`; valid for `n ≥ n0 + 1`.
pub fn next_by_medians<S: Scalar>(n: usize, median: &S, prev_median: &S) -> S {
    S::from_count(n + 1) * median.clone() - S::from_count(n) * prev_median.clone()
}

/// The evolving set together with its last two medians.
#[derive(Debug, Clone)]
pub struct MmmState<S> {
    set: OrderedMultiset<S>,
    last_median: S,
    prev_median: Option<S>,
}

impl<S: Scalar> MmmState<S> {
    pub fn new(initial: &[S]) -> Result<Self> {
        if initial.is_empty() {
            return Err(MmmError::EmptySet);
        }
        let set = OrderedMultiset::from_values(initial.iter().cloned());
        let last_median = set.median()?;
        Ok(MmmState {
            set,
            last_median,
            prev_median: None,
        })
    }

    /// Current size `n`.
    pub fn n(&self) -> usize {
        self.set.len()
    }

    pub fn set(&self) -> &OrderedMultiset<S> {
        &self.set
    }

    pub fn median(&self) -> &S {
        &self.last_median
    }

    pub fn prev_median(&self) -> Option<&S> {
        self.prev_median.as_ref()
    }

    /// True once `M_{n-1} = M_n` has been observed.
    pub fn is_stalled(&self) -> bool {
        self.prev_median.as_ref() == Some(&self.last_median)
    }

    /// Adjoins `x_{n+1}` and returns it.
    pub fn step(&mut self) -> S {
        let x = S::from_count(self.n() + 1) * self.last_median.clone() - self.set.sum().clone();
        self.set.insert(x.clone());
        let m = self.set.median().expect("set is non-empty");
        self.prev_median = Some(std::mem::replace(&mut self.last_median, m));
        x
    }
}

/// How an orbit run ended.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome<S> {
    pub tau: Option<usize>,
    pub limit: Option<S>,
    pub cap_hit: bool,
    /// Iterates produced, including the confirming one after stabilization.
    pub steps: usize,
    pub aborted: bool,
}

impl<S> Outcome<S> {
    pub fn resolved(&self) -> bool {
        self.tau.is_some()
    }
}

/// Runs the map for at most `cap` iterations, calling `visit(n, x_n, state)`
/// after each new iterate. The visitor may stop the run early with
/// `ControlFlow::Break`, in which case `aborted` is set.
///
/// On stabilization one extra iterate `x_{k+1} = M_k` is produced so that the
/// constant tail is visible, and `tau` is the first index of the maximal run
/// of iterates equal to the limit that ends there.
pub fn simulate<S, F>(initial: &[S], cap: usize, mut visit: F) -> Result<Outcome<S>>
where
    S: Scalar,
    F: FnMut(usize, &S, &MmmState<S>) -> ControlFlow<()>,
{
    let mut state = MmmState::new(initial)?;
    let mut run_start = 0usize;
    let mut run_value: Option<S> = None;
    let mut steps = 0usize;

    let mut track = |n: usize, x: &S, run_value: &mut Option<S>| {
        if run_value.as_ref() != Some(x) {
            *run_value = Some(x.clone());
            run_start = n;
        }
        run_start
    };

    while steps < cap {
        let x = state.step();
        steps += 1;
        let n = state.n();
        track(n, &x, &mut run_value);
        if visit(n, &x, &state).is_break() {
            return Ok(Outcome {
                tau: None,
                limit: None,
                cap_hit: false,
                steps,
                aborted: true,
            });
        }
        if state.is_stalled() {
            let limit = state.median().clone();
            let confirm = state.step();
            steps += 1;
            debug_assert_eq!(confirm, limit);
            let n = state.n();
            let tau = track(n, &confirm, &mut run_value);
            let aborted = visit(n, &confirm, &state).is_break();
            return Ok(Outcome {
                tau: Some(tau),
                limit: Some(limit),
                cap_hit: false,
                steps,
                aborted,
            });
        }
    }
    Ok(Outcome {
        tau: None,
        limit: None,
        cap_hit: true,
        steps,
        aborted: false,
    })
}

/// Full trajectory of one orbit.
///
/// Indexing: `iterates[j] = x_{n0+1+j}`, `medians[j] = M_{n0+j}`,
/// `mu[j] = μ_{n0+1+j}`.
#[derive(Debug, Clone, PartialEq)]
pub struct OrbitRecord<S> {
    pub n0: usize,
    pub initial: Vec<S>,
    pub iterates: Vec<S>,
    pub medians: Vec<S>,
    /// Running minimum of `2·|ΔM_n|` from `n0 + 1` on. The absolute value
    /// makes this the orientation-normalized quantity.
    pub mu: Vec<S>,
    pub tau: Option<usize>,
    pub limit: Option<S>,
    pub resolved: bool,
    pub cap_hit: bool,
    /// End of the regular phase; only set for normal-form orbits.
    pub nt: Option<usize>,
}

impl<S: Scalar> OrbitRecord<S> {
    /// Index of the last recorded iterate (the final set size).
    pub fn last_index(&self) -> usize {
        self.n0 + self.iterates.len()
    }

    /// `x_n`. Indices up to `n0` address the initial set as given.
    pub fn x(&self, n: usize) -> Option<&S> {
        if n == 0 {
            None
        } else if n <= self.n0 {
            self.initial.get(n - 1)
        } else {
            self.iterates.get(n - self.n0 - 1)
        }
    }

    pub fn median(&self, n: usize) -> Option<&S> {
        n.checked_sub(self.n0).and_then(|j| self.medians.get(j))
    }

    pub fn mu_at(&self, n: usize) -> Option<&S> {
        n.checked_sub(self.n0 + 1).and_then(|j| self.mu.get(j))
    }

    /// `+1` for non-decreasing medians, `-1` for non-increasing, `0` when
    /// the record is constant or not monotone.
    pub fn orientation(&self) -> i8 {
        let mut up = false;
        let mut down = false;
        for w in self.medians.windows(2) {
            match w[1].cmp(&w[0]) {
                std::cmp::Ordering::Greater => up = true,
                std::cmp::Ordering::Less => down = true,
                std::cmp::Ordering::Equal => {}
            }
        }
        match (up, down) {
            (true, false) => 1,
            (false, true) => -1,
            _ => 0,
        }
    }

    pub fn is_monotone(&self) -> bool {
        !(self.medians.windows(2).any(|w| w[1] > w[0]) && self.medians.windows(2).any(|w| w[1] < w[0]))
    }

    pub fn to_dump(&self) -> OrbitDump {
        let text = |xs: &[S]| xs.iter().map(format_scalar).collect::<Vec<_>>();
        OrbitDump {
            n0: self.n0,
            initial: text(&self.initial),
            iterates: text(&self.iterates),
            medians: text(&self.medians),
            mu: text(&self.mu),
            tau: self.tau,
            limit: self.limit.as_ref().map(format_scalar),
            resolved: self.resolved,
            cap_hit: self.cap_hit,
            nt: self.nt,
        }
    }

    pub fn from_dump(dump: &OrbitDump) -> Result<Self> {
        let parse = |xs: &[String]| xs.iter().map(|s| parse_scalar(s)).collect::<Result<Vec<S>>>();
        Ok(OrbitRecord {
            n0: dump.n0,
            initial: parse(&dump.initial)?,
            iterates: parse(&dump.iterates)?,
            medians: parse(&dump.medians)?,
            mu: parse(&dump.mu)?,
            tau: dump.tau,
            limit: dump.limit.as_deref().map(parse_scalar).transpose()?,
            resolved: dump.resolved,
            cap_hit: dump.cap_hit,
            nt: dump.nt,
        })
    }
}

/// Serialized form of an [`OrbitRecord`]; rationals in canonical text.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrbitDump {
    pub n0: usize,
    pub initial: Vec<String>,
    pub iterates: Vec<String>,
    pub medians: Vec<String>,
    pub mu: Vec<String>,
    pub tau: Option<usize>,
    pub limit: Option<String>,
    pub resolved: bool,
    #[serde(rename = "capHit")]
    pub cap_hit: bool,
    #[serde(rename = "Nt")]
    pub nt: Option<usize>,
}

/// Running minimum of `2·|M_i − M_{i-1}|` over consecutive medians.
pub(crate) fn running_mu<S: Scalar>(medians: &[S]) -> Vec<S> {
    let two = S::from_int(2);
    let mut out = Vec::with_capacity(medians.len().saturating_sub(1));
    let mut best: Option<S> = None;
    for w in medians.windows(2) {
        let d = two.clone() * (w[1].clone() - w[0].clone()).abs();
        let m = match best {
            Some(b) if b <= d => b,
            _ => d,
        };
        out.push(m.clone());
        best = Some(m);
    }
    out
}

pub(crate) fn record_orbit<S, F>(initial: &[S], cap: usize, mut extra: F) -> Result<(OrbitRecord<S>, Outcome<S>)>
where
    S: Scalar,
    F: FnMut(usize, &S, &MmmState<S>) -> ControlFlow<()>,
{
    if initial.is_empty() {
        return Err(MmmError::EmptySet);
    }
    let first_median = OrderedMultiset::from_values(initial.iter().cloned()).median()?;
    let mut iterates = Vec::new();
    let mut medians = vec![first_median];
    let outcome = simulate(initial, cap, |n, x, st| {
        iterates.push(x.clone());
        medians.push(st.median().clone());
        extra(n, x, st)
    })?;
    let mu = running_mu(&medians);
    let record = OrbitRecord {
        n0: initial.len(),
        initial: initial.to_vec(),
        iterates,
        medians,
        mu,
        tau: outcome.tau,
        limit: outcome.limit.clone(),
        resolved: outcome.resolved(),
        cap_hit: outcome.cap_hit,
        nt: None,
    };
    Ok((record, outcome))
}

/// Iterates until stabilization or `cap` iterations.
pub fn run_orbit<S: Scalar>(initial: &[S], cap: usize) -> Result<OrbitRecord<S>> {
    if cap == 0 {
        return Err(MmmError::Precondition("cap must be at least 1".into()));
    }
    record_orbit(initial, cap, |_, _, _| ControlFlow::Continue(())).map(|(r, _)| r)
}

/// Result of a transit-time query.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Transit<S> {
    Resolved { tau: usize, limit: S },
    Unresolved { cap_hit: bool },
}

impl<S> Transit<S> {
    pub fn tau(&self) -> Option<usize> {
        match self {
            Transit::Resolved { tau, .. } => Some(*tau),
            Transit::Unresolved { .. } => None,
        }
    }
}

/// Streaming transit time: keeps no trajectory, only the evolving set.
pub fn transit_time<S: Scalar>(initial: &[S], cap: usize) -> Result<Transit<S>> {
    if cap == 0 {
        return Err(MmmError::Precondition("cap must be at least 1".into()));
    }
    let out = simulate(initial, cap, |_, _, _| ControlFlow::Continue(()))?;
    Ok(match (out.tau, out.limit) {
        (Some(tau), Some(limit)) => Transit::Resolved { tau, limit },
        _ => Transit::Unresolved { cap_hit: out.cap_hit },
    })
}

/// Returns the set, negated if its median sequence decreases at the first
/// step, together with a flag telling whether negation happened.
pub fn orient<S: Scalar>(initial: &[S]) -> Result<(Vec<S>, bool)> {
    let mut state = MmmState::new(initial)?;
    let m0 = state.median().clone();
    state.step();
    if state.median() < &m0 {
        Ok((initial.iter().map(|x| -x.clone()).collect(), true))
    } else {
        Ok((initial.to_vec(), false))
    }
}

/// An orbit that is extended on demand and remembers its whole history.
/// Used by the reproduction tracers, which look both at the current set
/// and at recent past sets.
#[derive(Debug, Clone)]
pub struct LiveOrbit<S> {
    state: MmmState<S>,
    initial: Vec<S>,
    iterates: Vec<S>,
    medians: Vec<S>,
    horizon: usize,
}

impl<S: Scalar> LiveOrbit<S> {
    /// `horizon` is the largest set size the orbit may grow to.
    pub fn new(initial: &[S], horizon: usize) -> Result<Self> {
        let state = MmmState::new(initial)?;
        let medians = vec![state.median().clone()];
        Ok(LiveOrbit {
            state,
            initial: initial.to_vec(),
            iterates: Vec::new(),
            medians,
            horizon,
        })
    }

    pub fn n0(&self) -> usize {
        self.initial.len()
    }

    pub fn size(&self) -> usize {
        self.state.n()
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn set(&self) -> &OrderedMultiset<S> {
        self.state.set()
    }

    /// Grows the set to `size` elements.
    pub fn advance_to(&mut self, size: usize) -> Result<()> {
        if size > self.horizon {
            return Err(MmmError::HorizonExhausted(self.horizon));
        }
        while self.state.n() < size {
            let x = self.state.step();
            self.iterates.push(x);
            self.medians.push(self.state.median().clone());
        }
        Ok(())
    }

    pub fn x(&self, n: usize) -> Option<&S> {
        let n0 = self.n0();
        if n == 0 {
            None
        } else if n <= n0 {
            self.initial.get(n - 1)
        } else {
            self.iterates.get(n - n0 - 1)
        }
    }

    /// `x_n`, growing the orbit if needed.
    pub fn x_at(&mut self, n: usize) -> Result<S> {
        self.advance_to(n)?;
        Ok(self.x(n).expect("advanced").clone())
    }

    /// `M_n` if already computed.
    pub fn median(&self, n: usize) -> Option<&S> {
        n.checked_sub(self.n0()).and_then(|j| self.medians.get(j))
    }

    /// `M_n`, growing the orbit if needed.
    pub fn median_at(&mut self, n: usize) -> Result<S> {
        if n < self.n0() {
            return Err(MmmError::Precondition(format!(
                "median index {n} precedes the initial set"
            )));
        }
        self.advance_to(n)?;
        Ok(self.medians[n - self.n0()].clone())
    }

    /// Elements of `ξ_k` in `[lo, hi]`, for any `k` between `n0` and the
    /// current size.
    pub fn window_at(&self, k: usize, lo: &S, hi: &S) -> Result<Vec<S>> {
        if k < self.n0() || k > self.size() {
            return Err(MmmError::Precondition(format!(
                "set ξ_{k} is outside the recorded range {}..={}",
                self.n0(),
                self.size()
            )));
        }
        let mut now = self.set().window(lo, hi)?;
        for later in &self.iterates[k - self.n0()..] {
            if later >= lo && later <= hi {
                let pos = now
                    .iter()
                    .position(|v| v == later)
                    .expect("later iterate present in window");
                now.remove(pos);
            }
        }
        Ok(now)
    }

    pub fn into_record(self) -> OrbitRecord<S> {
        let mu = running_mu(&self.medians);
        let stalled = self
            .medians
            .windows(2)
            .position(|w| w[0] == w[1])
            .map(|j| j + 1 + self.initial.len());
        let n0 = self.initial.len();
        let (tau, limit) = match stalled {
            Some(k) if k < n0 + self.iterates.len() => {
                let limit = self.medians[k - n0].clone();
                let mut t = k + 1;
                while t > n0 + 1 && self.iterates[t - 2 - n0] == limit {
                    t -= 1;
                }
                (Some(t), Some(limit))
            }
            _ => (None, None),
        };
        OrbitRecord {
            n0,
            resolved: tau.is_some(),
            cap_hit: tau.is_none(),
            initial: self.initial,
            iterates: self.iterates,
            medians: self.medians,
            mu,
            tau,
            limit,
            nt: None,
        }
    }
}
