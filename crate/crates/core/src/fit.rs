//! Scaling series over sweep records and power-law fits.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{MmmError, Result};
use crate::sweep::SweepRecord;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FitMode {
    Cesaro,
    Max,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct FitResult {
    pub slope: f64,
    pub intercept: f64,
    pub point_count: usize,
    pub mode: Option<FitMode>,
}

/// A `(q, value)` series plus what had to be left out of it.
#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub points: Vec<(u64, f64)>,
    /// Unresolved records skipped.
    pub unresolved: usize,
    /// Denominators with no resolved record.
    pub omitted: Vec<u64>,
}

fn by_denominator(records: &[SweepRecord]) -> (BTreeMap<u64, Vec<usize>>, usize, Vec<u64>) {
    let mut groups: BTreeMap<u64, Vec<usize>> = BTreeMap::new();
    let mut unresolved = 0;
    for r in records {
        let entry = groups.entry(r.q).or_default();
        match r.tau {
            Some(t) if r.resolved => entry.push(t),
            _ => unresolved += 1,
        }
    }
    let omitted = groups.iter().filter(|(_, v)| v.is_empty()).map(|(q, _)| *q).collect();
    groups.retain(|_, v| !v.is_empty());
    (groups, unresolved, omitted)
}

/// `τ̂_q`: the running mean of the per-denominator averages `τ_q`.
pub fn cesaro_series(records: &[SweepRecord]) -> Series {
    let (groups, unresolved, omitted) = by_denominator(records);
    let mut total = 0.0;
    let mut points = Vec::with_capacity(groups.len());
    for (i, (q, taus)) in groups.iter().enumerate() {
        total += taus.iter().sum::<usize>() as f64 / taus.len() as f64;
        points.push((*q, total / (i + 1) as f64));
    }
    Series {
        points,
        unresolved,
        omitted,
    }
}

/// `T_q`: the largest transit time over all denominators up to `q`.
pub fn max_transit_series(records: &[SweepRecord]) -> Series {
    let (groups, unresolved, omitted) = by_denominator(records);
    let mut best = 0usize;
    let points = groups
        .iter()
        .map(|(q, taus)| {
            best = best.max(*taus.iter().max().expect("non-empty"));
            (*q, best as f64)
        })
        .collect();
    Series {
        points,
        unresolved,
        omitted,
    }
}

/// Least squares line through `(ln x, ln y)`.
pub fn loglog_fit(points: &[(f64, f64)]) -> Result<FitResult> {
    if points.len() < 2 {
        return Err(MmmError::Domain(format!(
            "a fit needs at least 2 points, got {}",
            points.len()
        )));
    }
    if let Some(&(x, y)) = points.iter().find(|(x, y)| !(*x > 0.0 && *y > 0.0)) {
        return Err(MmmError::Domain(format!(
            "non-positive point ({x}, {y}) in log-log fit"
        )));
    }
    let n = points.len() as f64;
    let logs: Vec<(f64, f64)> = points.iter().map(|(x, y)| (x.ln(), y.ln())).collect();
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / n;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = logs.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = logs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        return Err(MmmError::Domain("all abscissae are equal".into()));
    }
    let slope = sxy / sxx;
    Ok(FitResult {
        slope,
        intercept: my - slope * mx,
        point_count: points.len(),
        mode: None,
    })
}

/// Builds the requested series from sweep records and fits it.
pub fn fit_records(records: &[SweepRecord], mode: FitMode) -> Result<(FitResult, Series)> {
    let series = match mode {
        FitMode::Cesaro => cesaro_series(records),
        FitMode::Max => max_transit_series(records),
    };
    let pts: Vec<(f64, f64)> = series.points.iter().map(|&(q, v)| (q as f64, v)).collect();
    let mut fit = loglog_fit(&pts)?;
    fit.mode = Some(mode);
    Ok((fit, series))
}
