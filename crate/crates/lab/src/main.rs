use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use mmm_core::algorithms::{algorithm_a, algorithm_b, trace_seeded, AlgoTrace, Kind, Seed, Termination};
use mmm_core::constructions::{build_ap_family, build_height_family, build_pair_family, verify_plan, ConstructionPlan};
use mmm_core::engine::{run_orbit, LiveOrbit, DEFAULT_CAP};
use mmm_core::fit::{fit_records, FitMode};
use mmm_core::height::height_upper;
use mmm_core::normal_form::{normal_form_initial, normal_form_orbit};
use mmm_core::sweep::{read_csv, run_sweep, SweepConfig};
use mmm_core::{format_scalar, parse_scalar, parse_set, MmmError, Rational};
use serde_json::{json, Value};

#[derive(Parser)]
#[command(name = "mmm", version, about = "Exact mean-median map laboratory")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate an orbit until it stabilizes or the cap is reached.
    Orbit {
        #[arg(long, allow_hyphen_values = true)]
        set: String,
        #[arg(long, default_value_t = DEFAULT_CAP)]
        cap: usize,
        /// Write the full orbit record as JSON.
        #[arg(long)]
        dump: Option<PathBuf>,
    },
    /// Print the transit time and limit only.
    Transit {
        #[arg(long, allow_hyphen_values = true)]
        set: String,
        #[arg(long, default_value_t = DEFAULT_CAP)]
        cap: usize,
    },
    /// Orbit of the normal form of order T.
    NormalForm {
        #[arg(long)]
        order: usize,
        #[arg(long)]
        horizon: usize,
        #[arg(long)]
        dump: Option<PathBuf>,
    },
    /// Trace recursive reproductions of arithmetic progressions.
    AlgoA(AlgoArgs),
    /// Trace recursive reproductions of pairs.
    AlgoB(AlgoArgs),
    /// Build a set with a prescribed transit time.
    Construct {
        #[command(subcommand)]
        family: FamilyArg,
    },
    /// Upper bound on the height of a set.
    Height {
        #[arg(long, allow_hyphen_values = true)]
        set: String,
    },
    /// Transit times of [0, p/q, 1] for 1/2 <= p/q <= 2/3, q <= qmax.
    Sweep {
        #[arg(long)]
        qmax: u64,
        #[arg(long, default_value_t = DEFAULT_CAP)]
        cap: usize,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        resume: bool,
        #[arg(long, default_value_t = 1)]
        workers: usize,
        /// Stop after this many new cells, keeping the checkpoint.
        #[arg(long)]
        max_cells: Option<usize>,
    },
    /// Log-log fit of a sweep's Cesàro or maximum series.
    Fit {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, value_enum)]
        mode: ModeArg,
    },
}

#[derive(clap::Args)]
struct AlgoArgs {
    /// Initial set; either this or --order is required.
    #[arg(
        long,
        allow_hyphen_values = true,
        conflicts_with = "order",
        required_unless_present = "order"
    )]
    set: Option<String>,
    /// Use the normal form of this order as the initial set.
    #[arg(long)]
    order: Option<usize>,
    #[arg(long)]
    horizon: usize,
    /// Seed structure as values (`0,1`) or orbit indices (`x457,x458`).
    #[arg(long, allow_hyphen_values = true, requires = "seed_time")]
    seed_window: Option<String>,
    /// Size of the set at which the seed is ready.
    #[arg(long, requires = "seed_window")]
    seed_time: Option<usize>,
}

#[derive(Subcommand)]
enum FamilyArg {
    /// Evenly spaced pairs with k obstacles per gap.
    Pair {
        #[arg(long)]
        k: usize,
        #[arg(long = "N")]
        n: usize,
        /// Simulate the plan and report the comparison.
        #[arg(long)]
        verify: bool,
    },
    /// Recursively doubling arithmetic progressions.
    Ap {
        #[arg(long = "N")]
        n: usize,
        #[arg(long)]
        verify: bool,
    },
    /// Progression family with height bounds.
    Height {
        #[arg(long = "N")]
        n: usize,
        #[arg(long)]
        verify: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Cesaro,
    Max,
}

/// Failure carrying its exit status.
#[derive(Debug)]
struct Failure {
    code: u8,
    message: String,
}

impl From<MmmError> for Failure {
    fn from(e: MmmError) -> Self {
        let code = if matches!(e, MmmError::HorizonExhausted(_)) {
            3
        } else {
            2
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn exhausted(message: String) -> Failure {
    Failure { code: 3, message }
}

fn emit(value: &Value) {
    println!(
        "{}",
        serde_json::to_string_pretty(value).expect("json values serialize")
    );
}

fn write_json(path: &PathBuf, value: Value) -> Result<(), Failure> {
    let text = serde_json::to_string_pretty(&value).expect("json values serialize");
    fs::write(path, text + "\n").map_err(MmmError::from)?;
    Ok(())
}

fn orbit(set: &str, cap: usize, dump: Option<PathBuf>) -> Result<(), Failure> {
    let initial = parse_set::<Rational>(set)?;
    let rec = run_orbit(&initial, cap)?;
    if let Some(path) = dump {
        write_json(&path, serde_json::to_value(rec.to_dump()).expect("dump serializes"))?;
    }
    emit(&json!({
        "n0": rec.n0,
        "tau": rec.tau,
        "limit": rec.limit.as_ref().map(format_scalar),
        "resolved": rec.resolved,
        "capHit": rec.cap_hit,
        "lastIndex": rec.last_index(),
        "orientation": rec.orientation(),
    }));
    if rec.cap_hit {
        return Err(exhausted(format!("cap {cap} reached before stabilization")));
    }
    Ok(())
}

fn transit(set: &str, cap: usize) -> Result<(), Failure> {
    let initial = parse_set::<Rational>(set)?;
    match mmm_core::engine::transit_time(&initial, cap)? {
        mmm_core::engine::Transit::Resolved { tau, limit } => {
            emit(&json!({ "tau": tau, "limit": format_scalar(&limit) }));
            Ok(())
        }
        mmm_core::engine::Transit::Unresolved { cap_hit } => {
            emit(&json!({ "tau": null, "limit": null, "capHit": cap_hit }));
            Err(exhausted(format!("cap {cap} reached before stabilization")))
        }
    }
}

fn normal_form(order: usize, horizon: usize, dump: Option<PathBuf>) -> Result<(), Failure> {
    let nf = normal_form_orbit::<Rational>(order, horizon)?;
    if let Some(path) = dump {
        write_json(
            &path,
            serde_json::to_value(nf.record.to_dump()).expect("dump serializes"),
        )?;
    }
    let rec = &nf.record;
    emit(&json!({
        "order": nf.order,
        "n0": rec.n0,
        "Nt": rec.nt,
        "sentinel": format_scalar(&nf.sentinel),
        "retries": nf.retries,
        "partial": nf.partial,
        "tau": rec.tau,
        "limit": rec.limit.as_ref().map(format_scalar),
    }));
    if nf.partial {
        return Err(exhausted(format!("horizon {horizon} reached before N_t was located")));
    }
    Ok(())
}

fn parse_seed(text: &str) -> Result<Seed<Rational>, MmmError> {
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    if parts.iter().all(|p| p.starts_with('x')) {
        let ix = parts
            .iter()
            .map(|p| p[1..].parse::<usize>().map_err(|_| MmmError::Parse((*p).into())))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Seed::Indices(ix))
    } else {
        Ok(Seed::Values(
            parts.iter().map(|p| parse_scalar(p)).collect::<Result<Vec<_>, _>>()?,
        ))
    }
}

fn algo(kind: Kind, args: AlgoArgs) -> Result<(), Failure> {
    let initial = match (&args.set, args.order) {
        (Some(s), _) => parse_set::<Rational>(s)?,
        (None, Some(t)) => normal_form_initial::<Rational>(t, args.horizon)?,
        (None, None) => return Err(MmmError::Domain("either --set or --order is required".into()).into()),
    };
    let trace: AlgoTrace<Rational> = match (args.seed_window, args.seed_time) {
        (Some(w), Some(time)) => {
            let mut orbit = LiveOrbit::new(&initial, args.horizon)?;
            trace_seeded(&mut orbit, kind, parse_seed(&w)?, time)?
        }
        _ => match kind {
            Kind::A => algorithm_a(&initial, args.horizon)?,
            Kind::B => algorithm_b(&initial, args.horizon)?,
        },
    };
    emit(&serde_json::to_value(trace.to_dump()).expect("dump serializes"));
    if trace.termination == Termination::HorizonExhausted {
        return Err(exhausted(format!("horizon {} exhausted", args.horizon)));
    }
    Ok(())
}

fn construct(family: FamilyArg) -> Result<(), Failure> {
    let (plan, verify): (ConstructionPlan<Rational>, bool) = match family {
        FamilyArg::Pair { k, n, verify } => (build_pair_family(k, n)?, verify),
        FamilyArg::Ap { n, verify } => (build_ap_family(n)?, verify),
        FamilyArg::Height { n, verify } => (build_height_family(n)?, verify),
    };
    let mut out = serde_json::to_value(plan.to_dump()).expect("dump serializes");
    if verify {
        let report = verify_plan(&plan, plan.predicted_tau + 10)?;
        out["simulatedTau"] = json!(report.simulated_tau);
        out["simulatedLimit"] = json!(report.simulated_limit.as_ref().map(format_scalar));
        out["verified"] = json!(report.all_match());
    }
    emit(&out);
    Ok(())
}

fn height(set: &str) -> Result<(), Failure> {
    let xs = parse_set::<Rational>(set)?;
    let report = height_upper(&xs)?;
    emit(&serde_json::to_value(report.to_dump()).expect("dump serializes"));
    Ok(())
}

fn sweep(cfg: SweepConfig, out: PathBuf, resume: bool) -> Result<(), Failure> {
    let run = run_sweep(&cfg, &out, resume)?;
    let unresolved = run.records.iter().filter(|r| !r.resolved).count();
    emit(&json!({
        "out": out.display().to_string(),
        "cells": run.records.len(),
        "unresolved": unresolved,
        "resumed": run.resumed,
        "complete": run.complete,
    }));
    Ok(())
}

fn fit(input: PathBuf, mode: ModeArg) -> Result<(), Failure> {
    let (_, records) = read_csv(fs::File::open(&input).map_err(MmmError::from)?)?;
    let mode = match mode {
        ModeArg::Cesaro => FitMode::Cesaro,
        ModeArg::Max => FitMode::Max,
    };
    let (fit, series) = fit_records(&records, mode)?;
    let mut out = serde_json::to_value(&fit).expect("fit serializes");
    out["unresolved"] = json!(series.unresolved);
    out["omittedDenominators"] = json!(series.omitted);
    emit(&out);
    Ok(())
}

fn dispatch(command: Command) -> Result<(), Failure> {
    match command {
        Command::Orbit { set, cap, dump } => orbit(&set, cap, dump),
        Command::Transit { set, cap } => transit(&set, cap),
        Command::NormalForm { order, horizon, dump } => normal_form(order, horizon, dump),
        Command::AlgoA(args) => algo(Kind::A, args),
        Command::AlgoB(args) => algo(Kind::B, args),
        Command::Construct { family } => construct(family),
        Command::Height { set } => height(&set),
        Command::Sweep {
            qmax,
            cap,
            out,
            resume,
            workers,
            max_cells,
        } => {
            let mut cfg = SweepConfig::new(qmax, cap);
            cfg.workers = workers.max(1);
            cfg.max_cells = max_cells;
            sweep(cfg, out, resume)
        }
        Command::Fit { input, mode } => fit(input, mode),
    }
}

fn main() -> ExitCode {
    match dispatch(Cli::parse().command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("mmm: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
