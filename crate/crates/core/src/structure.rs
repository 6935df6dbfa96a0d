//! Ready subsets and their reproductions.
//!
//! A block `[u_0, …, u_k]` of a sorted odd-sized set is *ready* when it is a
//! contiguous run of the set, starts at the median, and has positive,
//! non-decreasing first differences. While the median walks across a ready
//! block, the map emits `2k` new iterates in closed form.

use crate::engine::OrbitRecord;
use crate::error::{MmmError, Result};
use crate::multiset::OrderedMultiset;
use crate::scalar::{format_set, Scalar};

/// A ready block together with where it sits in its host set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReadyWindow<S> {
    pub values: Vec<S>,
    pub first_differences: Vec<S>,
    /// Rank of `u_0` in the host (zero-based).
    pub anchor_index: usize,
    pub host_size: usize,
}

/// Outcome of a readiness test.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Readiness<S> {
    Ready(ReadyWindow<S>),
    TooShort,
    NotContiguous,
    MinNotMedian,
    IrregularDifferences,
}

impl<S> Readiness<S> {
    pub fn window(self) -> Option<ReadyWindow<S>> {
        match self {
            Readiness::Ready(w) => Some(w),
            _ => None,
        }
    }

    pub fn is_ready(&self) -> bool {
        matches!(self, Readiness::Ready(_))
    }
}

fn differences<S: Scalar>(values: &[S]) -> Vec<S> {
    values.windows(2).map(|w| w[1].clone() - w[0].clone()).collect()
}

fn regular_differences<S: Scalar>(d: &[S]) -> bool {
    d.iter().all(|x| x.is_positive()) && d.windows(2).all(|w| w[0] <= w[1])
}

impl<S: Scalar> ReadyWindow<S> {
    /// Builds a window from its values alone, for a host of odd size `n`
    /// whose median is `values[0]`. Only the difference condition can be
    /// checked here.
    pub fn from_values(values: Vec<S>, host_size: usize) -> Result<Self> {
        if host_size.is_multiple_of(2) {
            return Err(MmmError::EvenHost(host_size));
        }
        if values.len() < 2 {
            return Err(MmmError::NotReady("a window needs at least two values".into()));
        }
        let first_differences = differences(&values);
        if !regular_differences(&first_differences) {
            return Err(MmmError::NotReady(format!(
                "first differences of [{}] are not positive and non-decreasing",
                format_set(&values)
            )));
        }
        if values.len() > host_size.div_ceil(2) {
            return Err(MmmError::NotReady("window larger than half the host".into()));
        }
        Ok(ReadyWindow {
            values,
            first_differences,
            anchor_index: (host_size - 1) / 2,
            host_size,
        })
    }

    /// `k`, the number of first differences.
    pub fn k(&self) -> usize {
        self.first_differences.len()
    }

    pub fn first(&self) -> &S {
        &self.values[0]
    }

    pub fn last(&self) -> &S {
        self.values.last().expect("non-empty")
    }

    /// The common difference, if the window is an arithmetic progression.
    pub fn modulus(&self) -> Option<&S> {
        let b = &self.first_differences[0];
        self.first_differences.iter().all(|d| d == b).then_some(b)
    }
}

/// Tests the three readiness conditions of `candidate` inside `host`.
pub fn readiness<S: Scalar>(candidate: &[S], host: &OrderedMultiset<S>) -> Result<Readiness<S>> {
    let n = host.len();
    if n.is_multiple_of(2) {
        return Err(MmmError::EvenHost(n));
    }
    if candidate.len() < 2 {
        return Ok(Readiness::TooShort);
    }
    let mut values = candidate.to_vec();
    values.sort();
    let (lo, hi) = (&values[0], &values[values.len() - 1]);
    if host.window(lo, hi)? != values {
        return Ok(Readiness::NotContiguous);
    }
    if *lo != host.median()? {
        return Ok(Readiness::MinNotMedian);
    }
    let first_differences = differences(&values);
    if !regular_differences(&first_differences) {
        return Ok(Readiness::IrregularDifferences);
    }
    Ok(Readiness::Ready(ReadyWindow {
        anchor_index: host.count_below(lo),
        values,
        first_differences,
        host_size: n,
    }))
}

/// `Some(window)` when `candidate` is ready in `host`.
pub fn is_ready<S: Scalar>(candidate: &[S], host: &OrderedMultiset<S>) -> Result<Option<ReadyWindow<S>>> {
    readiness(candidate, host).map(Readiness::window)
}

fn revalidate<S: Scalar>(w: &ReadyWindow<S>) -> Result<()> {
    if w.values.len() < 2 || w.first_differences != differences(&w.values) || !regular_differences(&w.first_differences)
    {
        return Err(MmmError::NotReady(format!("[{}]", format_set(&w.values))));
    }
    Ok(())
}

/// `x_{n+2}, …, x_{n+2k+1}` for a window ready at size `n`, assuming
/// `x_{n+1}, x_{n+2} ≥ u_k`.
pub fn predict_reproduction<S: Scalar>(w: &ReadyWindow<S>, n: usize) -> Result<Vec<S>> {
    revalidate(w)?;
    let nn = S::from_count(n);
    let u = &w.values;
    let mut out = Vec::with_capacity(2 * w.k());
    for j in 2..=2 * w.k() + 1 {
        let l = j / 2;
        let du = &w.first_differences[l - 1];
        let base = du.half() * nn.clone() + S::from_count(l) * du.clone();
        out.push(if j % 2 == 0 {
            base + u[l - 1].clone()
        } else {
            base + u[l].clone()
        });
    }
    Ok(out)
}

/// First differences `x_{n+j} − x_{n+j−1}` for `j = 3..=2k+1` of the
/// reproduction.
pub fn predict_first_differences<S: Scalar>(w: &ReadyWindow<S>, n: usize) -> Result<Vec<S>> {
    revalidate(w)?;
    let nn = S::from_count(n);
    let d = &w.first_differences;
    let mut out = Vec::with_capacity(2 * w.k() - 1);
    for j in 3..=2 * w.k() + 1 {
        let l = j / 2;
        if j % 2 == 1 {
            out.push(d[l - 1].clone());
        } else {
            let jump = d[l - 1].clone() - d[l - 2].clone();
            out.push(jump.half() * nn.clone() + S::from_count(l) * jump + d[l - 2].clone());
        }
    }
    Ok(out)
}

/// Reproduction of a ready arithmetic progression of modulus `b`:
/// `x_{n+j} = b(n/2 + j − 1) + u_0` for `j = 2..=2k+1`.
pub fn predict_ap<S: Scalar>(w: &ReadyWindow<S>, n: usize) -> Result<Vec<S>> {
    revalidate(w)?;
    let b = w
        .modulus()
        .ok_or_else(|| MmmError::Domain(format!("[{}] is not an arithmetic progression", format_set(&w.values))))?
        .clone();
    let half_n = S::from_count(n).half();
    Ok((2..=2 * w.k() + 1)
        .map(|j| b.clone() * (half_n.clone() + S::from_count(j - 1)) + w.values[0].clone())
        .collect())
}

/// Reproduction of a ready pair `[u_0, u_1]` at size `n`.
pub fn predict_pair<S: Scalar>(u0: &S, u1: &S, n: usize) -> Result<(S, S)> {
    if u0 >= u1 {
        return Err(MmmError::Domain(format!("pair [{u0}, {u1}] is not increasing")));
    }
    let gap = u1.clone() - u0.clone();
    let lead = gap.half() * S::from_count(n);
    Ok((lead.clone() + u1.clone(), lead + u1.clone() + gap))
}

/// `μ_n = min{2·ΔM_i : start ≤ i ≤ n}` for `n = start..=last`. Median gaps
/// are taken in absolute value so either orientation works.
pub fn mu_sequence<S: Scalar>(rec: &OrbitRecord<S>, start: usize) -> Result<Vec<S>> {
    if start <= rec.n0 || start > rec.last_index() {
        return Err(MmmError::Domain(format!(
            "start index {start} outside {}..={}",
            rec.n0 + 1,
            rec.last_index()
        )));
    }
    let two = S::from_int(2);
    let mut best: Option<S> = None;
    let mut out = Vec::new();
    for i in start..=rec.last_index() {
        let d = two.clone() * (rec.median(i).unwrap().clone() - rec.median(i - 1).unwrap().clone()).abs();
        let m = match best {
            Some(b) if b <= d => b,
            _ => d,
        };
        out.push(m.clone());
        best = Some(m);
    }
    Ok(out)
}

/// A host of odd size `n` holding `values` from its median upwards, with
/// the slots above at `far`, the slots below at `u_0 − 1`, and the lowest
/// element chosen so that `x_{n+1} = far`. With `far` large this satisfies the hypotheses of
/// [`predict_reproduction`].
pub fn embedding_host<S: Scalar>(values: &[S], n: usize, far: &S) -> Result<Vec<S>> {
    if n.is_multiple_of(2) {
        return Err(MmmError::EvenHost(n));
    }
    let half = (n - 1) / 2;
    if values.is_empty() || values.len() > half + 1 {
        return Err(MmmError::Domain(format!(
            "{} values do not fit a host of size {n}",
            values.len()
        )));
    }
    let mut host: Vec<S> = values.to_vec();
    host.extend(std::iter::repeat_n(far.clone(), half + 1 - values.len()));
    let below = values[0].clone() - S::one();
    host.extend(std::iter::repeat_n(below.clone(), half.saturating_sub(1)));
    let rest = host.iter().fold(S::zero(), |a, b| a + b.clone());
    let target = S::from_count(n + 1) * values[0].clone() - far.clone();
    let low = target - rest;
    if half > 0 {
        if low > below {
            return Err(MmmError::Domain("embedding needs a larger far value".into()));
        }
        host.push(low);
    }
    host.sort();
    Ok(host)
}
