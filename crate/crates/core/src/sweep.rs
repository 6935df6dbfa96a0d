//! Transit times of `[0, p/q, 1]` over a range of denominators.
//!
//! Cells are reduced fractions `p/q` with `q ≤ qmax` and
//! `1/2 ≤ p/q ≤ 2/3`, both endpoints included, in `(q, p)` order. A sweep
//! runs in batches on a worker pool and checkpoints after every batch, so an
//! interrupted run can resume where it stopped.

use std::fs;
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use num_integer::Integer;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::engine::{transit_time, Transit};
use crate::error::{MmmError, Result};
use crate::scalar::{format_scalar, parse_scalar, Scalar};
use crate::Rational;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
pub const CONVENTION: &str = "reduced p/q, 1/2 <= p/q <= 2/3 inclusive, ordered by (q, p)";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SweepRecord {
    pub p: u64,
    pub q: u64,
    pub tau: Option<usize>,
    pub limit: Option<Rational>,
    pub resolved: bool,
    pub cap_hit: bool,
}

#[derive(Debug, Serialize, Deserialize)]
struct Row {
    p: u64,
    q: u64,
    tau: Option<usize>,
    limit: Option<String>,
    resolved: bool,
}

/// The sweep's cells in canonical order.
pub fn fractions(qmax: u64) -> Vec<(u64, u64)> {
    let mut out = Vec::new();
    for q in 2..=qmax {
        for p in q.div_ceil(2)..=2 * q / 3 {
            if p.gcd(&q) == 1 && 2 * p >= q && 3 * p <= 2 * q {
                out.push((p, q));
            }
        }
    }
    out
}

/// One cell: the streaming transit time of `[0, p/q, 1]`.
pub fn sweep_cell(p: u64, q: u64, cap: usize) -> Result<SweepRecord> {
    let x = Rational::new((p as i64).into(), (q as i64).into());
    let set = [Rational::from_int(0), x, Rational::from_int(1)];
    Ok(match transit_time(&set, cap)? {
        Transit::Resolved { tau, limit } => SweepRecord {
            p,
            q,
            tau: Some(tau),
            limit: Some(limit),
            resolved: true,
            cap_hit: false,
        },
        Transit::Unresolved { cap_hit } => SweepRecord {
            p,
            q,
            tau: None,
            limit: None,
            resolved: false,
            cap_hit,
        },
    })
}

/// Every cell up to `qmax`, computed in parallel, in canonical order.
pub fn sweep_fractions(qmax: u64, cap: usize) -> Result<Vec<SweepRecord>> {
    if qmax < 2 {
        return Err(MmmError::Domain(format!("qmax = {qmax} must be at least 2")));
    }
    fractions(qmax)
        .into_par_iter()
        .map(|(p, q)| sweep_cell(p, q, cap))
        .collect()
}

fn metadata(qmax: u64, cap: usize) -> String {
    format!("# mmm sweep\n# qmax={qmax}\n# cap={cap}\n# convention={CONVENTION}\n# version={VERSION}\n")
}

/// Writes records as CSV preceded by `#` metadata lines.
pub fn write_csv<W: Write>(mut out: W, records: &[SweepRecord], qmax: u64, cap: usize) -> Result<()> {
    out.write_all(metadata(qmax, cap).as_bytes())?;
    let mut w = csv::Writer::from_writer(out);
    for r in records {
        w.serialize(Row {
            p: r.p,
            q: r.q,
            tau: r.tau,
            limit: r.limit.as_ref().map(format_scalar),
            resolved: r.resolved,
        })?;
    }
    if records.is_empty() {
        w.write_record(["p", "q", "tau", "limit", "resolved"])?;
    }
    w.flush()?;
    Ok(())
}

/// Sweep parameters recorded in a file's metadata.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SweepMeta {
    pub qmax: Option<u64>,
    pub cap: Option<usize>,
}

/// Reads a sweep CSV, returning its metadata and rows.
pub fn read_csv<R: std::io::Read>(input: R) -> Result<(SweepMeta, Vec<SweepRecord>)> {
    let mut reader = BufReader::new(input);
    let mut meta = SweepMeta { qmax: None, cap: None };
    let mut body = String::new();
    let mut line = String::new();
    while reader.read_line(&mut line)? > 0 {
        if let Some(rest) = line.trim_end().strip_prefix('#') {
            let rest = rest.trim();
            if let Some(v) = rest.strip_prefix("qmax=") {
                meta.qmax = v.parse().ok();
            } else if let Some(v) = rest.strip_prefix("cap=") {
                meta.cap = v.parse().ok();
            }
        } else {
            body.push_str(&line);
        }
        line.clear();
    }
    let mut rdr = csv::Reader::from_reader(body.as_bytes());
    let mut records = Vec::new();
    for row in rdr.deserialize::<Row>() {
        let row = row?;
        let limit = row.limit.as_deref().map(parse_scalar::<Rational>).transpose()?;
        if row.resolved != (row.tau.is_some() && limit.is_some()) {
            return Err(MmmError::Domain(format!("inconsistent row for {}/{}", row.p, row.q)));
        }
        records.push(SweepRecord {
            p: row.p,
            q: row.q,
            tau: row.tau,
            limit,
            resolved: row.resolved,
            cap_hit: !row.resolved,
        });
    }
    Ok((meta, records))
}

#[derive(Debug, Clone)]
pub struct SweepConfig {
    pub qmax: u64,
    pub cap: usize,
    pub workers: usize,
    /// Cells per checkpoint flush.
    pub batch: usize,
    /// Stop after this many new cells, leaving the checkpoint in place.
    pub max_cells: Option<usize>,
}

impl SweepConfig {
    pub fn new(qmax: u64, cap: usize) -> Self {
        SweepConfig {
            qmax,
            cap,
            workers: 1,
            batch: 64,
            max_cells: None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SweepRun {
    pub records: Vec<SweepRecord>,
    pub complete: bool,
    /// Cells taken from an existing checkpoint.
    pub resumed: usize,
}

pub fn checkpoint_path(out: &Path) -> PathBuf {
    let mut name = out.file_name().map(|s| s.to_os_string()).unwrap_or_default();
    name.push(".ckpt");
    out.with_file_name(name)
}

fn write_atomic(path: &Path, records: &[SweepRecord], qmax: u64, cap: usize) -> Result<()> {
    let dir = path
        .parent()
        .filter(|d| !d.as_os_str().is_empty())
        .unwrap_or(Path::new("."));
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    write_csv(&mut tmp, records, qmax, cap)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| MmmError::Io(e.to_string()))?;
    Ok(())
}

/// Runs (or resumes) a checkpointed sweep writing its CSV to `out`.
pub fn run_sweep(cfg: &SweepConfig, out: &Path, resume: bool) -> Result<SweepRun> {
    if cfg.qmax < 2 {
        return Err(MmmError::Domain(format!("qmax = {} must be at least 2", cfg.qmax)));
    }
    let cells = fractions(cfg.qmax);
    let ckpt = checkpoint_path(out);
    let mut records = Vec::new();
    if resume && ckpt.exists() {
        let (meta, done) = read_csv(fs::File::open(&ckpt)?)?;
        if meta.qmax != Some(cfg.qmax) || meta.cap != Some(cfg.cap) {
            return Err(MmmError::Domain(format!(
                "checkpoint {} was written with different parameters",
                ckpt.display()
            )));
        }
        if done.len() > cells.len() || done.iter().zip(&cells).any(|(r, &(p, q))| (r.p, r.q) != (p, q)) {
            return Err(MmmError::Domain(format!(
                "checkpoint {} does not match the cell order",
                ckpt.display()
            )));
        }
        records = done;
    }
    let resumed = records.len();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers.max(1))
        .build()
        .map_err(|e| MmmError::Domain(e.to_string()))?;
    let budget = cfg.max_cells.unwrap_or(usize::MAX);
    let mut processed = 0usize;
    while records.len() < cells.len() && processed < budget {
        let take = cfg
            .batch
            .max(1)
            .min(budget - processed)
            .min(cells.len() - records.len());
        let batch = &cells[records.len()..records.len() + take];
        let done: Vec<SweepRecord> = pool.install(|| {
            batch
                .par_iter()
                .map(|&(p, q)| sweep_cell(p, q, cfg.cap))
                .collect::<Result<Vec<_>>>()
        })?;
        records.extend(done);
        processed += take;
        write_atomic(&ckpt, &records, cfg.qmax, cfg.cap)?;
    }
    let complete = records.len() == cells.len();
    if complete {
        write_atomic(out, &records, cfg.qmax, cfg.cap)?;
        if ckpt.exists() {
            fs::remove_file(&ckpt)?;
        }
    }
    Ok(SweepRun {
        records,
        complete,
        resumed,
    })
}
