//! `conic-walks`: exact values, Monte Carlo estimates and the verification
//! suite from the command line.
//!
//! Exit codes: 0 success, 1 an exact identity failed in `verify`, 2 usage or
//! index error, 3 numeric or sampling failure, 4 Monte Carlo pass rate below
//! threshold in `verify`.

mod output;

use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use conic_walks::combinatorics::StirlingTables;
use conic_walks::identities::SuiteLimits;
use conic_walks::simulation::{self, DistFamily, GateStatus, RunConfig, VerifyConfig};
use conic_walks::{Error, Formulas, Functional, FunctionalQuery, Indices, Model, ModelKind, StirlingKind};

use output::{Emitter, EstimateFields, ExactValue, Format, OutputRecord, Status};

#[derive(Parser)]
#[command(name = "conic-walks", version, about = "Positive hulls of random walks and bridges")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate closed forms exactly.
    Exact(QueryArgs),
    /// Estimate a functional by sampling and compare with the exact value.
    Simulate(SimulateArgs),
    /// Run the identity suite and the Monte Carlo gate matrix.
    Verify(VerifyArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
enum ModelArg {
    A,
    B,
}

#[derive(Args, Clone)]
struct QueryArgs {
    /// A = bridge, B = walk.
    #[arg(long, value_enum, default_value = "B", ignore_case = true)]
    model: ModelArg,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    d: usize,
    /// wendel, absorption, nonabsorption, fk, Uk, vk, Lambda, Y, Z, Y_dual,
    /// face_intrinsic_sum, tangent_intrinsic_sum, face_prob, subspace_prob,
    /// joint_absorption; `f1`, `v0`, `U2` embed k.
    #[arg(long)]
    functional: String,
    /// Single value, list `0,2` or inclusive range `0..2` (`d` allowed).
    #[arg(long)]
    k: Option<String>,
    #[arg(long)]
    m: Option<String>,
    #[arg(long)]
    l: Option<String>,
    #[arg(long)]
    j: Option<String>,
    /// Face index tuple, 1-based, e.g. `1,3`.
    #[arg(long)]
    indices: Option<String>,
    /// Walk lengths for joint absorption, e.g. `1,3`.
    #[arg(long)]
    walks: Option<String>,
    /// Bridge lengths for joint absorption.
    #[arg(long)]
    bridges: Option<String>,
    #[arg(long)]
    conditioned: bool,
    #[arg(long)]
    dual: bool,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

#[derive(Args)]
struct SimulateArgs {
    #[command(flatten)]
    query: QueryArgs,
    #[arg(long, default_value_t = 100_000)]
    samples: u64,
    #[arg(long, env = "CONIC_WALKS_SEED", default_value_t = 1)]
    seed: u64,
    /// gaussian, heavy or scaled.
    #[arg(long, default_value = "gaussian")]
    dist: DistFamily,
    #[arg(long, default_value_t = 1)]
    workers: usize,
}

#[derive(Args)]
struct VerifyArgs {
    /// Samples per Monte Carlo gate; below 10000 the gates are skipped.
    #[arg(long, default_value_t = 20_000)]
    budget: u64,
    #[arg(long, env = "CONIC_WALKS_SEED", default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value = "report.json")]
    out: PathBuf,
    #[arg(long, default_value_t = 1)]
    workers: usize,
    /// Required Monte Carlo pass rate.
    #[arg(long, default_value_t = 0.95)]
    threshold: f64,
    /// Only the small core gates, without the per-model matrix.
    #[arg(long)]
    core_only: bool,
    /// Test hook: perturb one Stirling entry before running.
    #[arg(long, hide = true)]
    inject_corrupt_table: bool,
}

enum Failure {
    Usage(String),
    Numeric(String),
    Io(io::Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Domain(_) => Failure::Usage(e.to_string()),
            _ => Failure::Numeric(e.to_string()),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Io(e)
    }
}

fn parse_list(s: &str, d: usize, what: &str) -> Result<Vec<usize>, Failure> {
    let num = |t: &str| -> Result<usize, Failure> {
        let t = t.trim();
        if t == "d" {
            return Ok(d);
        }
        t.parse().map_err(|_| Failure::Usage(format!("--{what}: cannot parse {t:?}")))
    };
    let s = s.trim();
    if let Some((a, b)) = s.split_once("..") {
        let b = b.strip_prefix('=').unwrap_or(b);
        let (a, b) = (num(a)?, num(b)?);
        if a > b {
            return Err(Failure::Usage(format!("--{what}: empty range {s}")));
        }
        return Ok((a..=b).collect());
    }
    s.split([',', ' ']).filter(|t| !t.is_empty()).map(num).collect()
}

fn opt_values(v: &Option<String>, d: usize, what: &str) -> Result<Vec<Option<usize>>, Failure> {
    match v {
        None => Ok(vec![None]),
        Some(s) => Ok(parse_list(s, d, what)?.into_iter().map(Some).collect()),
    }
}

fn build_queries(a: &QueryArgs) -> Result<Vec<FunctionalQuery>, Failure> {
    let (functional, embedded_k) = Functional::parse(&a.functional)
        .ok_or_else(|| Failure::Usage(format!("unknown functional {:?}", a.functional)))?;
    let kind = match a.model {
        ModelArg::A => ModelKind::ABridge,
        ModelArg::B => ModelKind::BWalk,
    };
    let model = Model::new(kind, a.n, a.d)?;
    let ks = match (&a.k, embedded_k) {
        (Some(_), Some(_)) => return Err(Failure::Usage("k given twice".into())),
        (None, Some(k)) => vec![Some(k)],
        _ => opt_values(&a.k, a.d, "k")?,
    };
    let list = |v: &Option<String>, what| -> Result<Option<Vec<usize>>, Failure> {
        v.as_ref().map(|s| parse_list(s, a.d, what)).transpose()
    };
    let tuple = list(&a.indices, "indices")?;
    let walks = list(&a.walks, "walks")?;
    let bridges = list(&a.bridges, "bridges")?;
    let mut out = Vec::new();
    for &k in &ks {
        for m in opt_values(&a.m, a.d, "m")? {
            for l in opt_values(&a.l, a.d, "l")? {
                for j in opt_values(&a.j, a.d, "j")? {
                    let indices = Indices {
                        k,
                        m,
                        l,
                        j,
                        tuple: tuple.clone(),
                        walks: walks.clone(),
                        bridges: bridges.clone(),
                    };
                    out.push(FunctionalQuery {
                        model,
                        functional,
                        indices,
                        conditioned: a.conditioned,
                        dual: a.dual,
                    });
                }
            }
        }
    }
    Ok(out)
}

fn cmd_exact(a: &QueryArgs) -> Result<(), Failure> {
    let queries = build_queries(a)?;
    let formulas = Formulas::for_model(&queries[0].model);
    let mut emit = Emitter::new(a.format, io::stdout().lock());
    for q in queries {
        let r = formulas.evaluate(&q)?;
        emit.emit(&OutputRecord {
            query: q,
            exact: Some(ExactValue::from(&r.exact)),
            citation: Some(r.citation),
            estimate: None,
            status: Status::Ok,
        })?;
    }
    emit.finish()?;
    Ok(())
}

fn cmd_simulate(a: &SimulateArgs) -> Result<(), Failure> {
    let queries = build_queries(&a.query)?;
    let formulas = Formulas::for_model(&queries[0].model);
    let mut emit = Emitter::new(a.query.format, io::stdout().lock());
    for q in queries {
        let run = RunConfig::new(q.clone(), a.dist, a.samples, a.seed).with_workers(a.workers);
        let est = simulation::estimate(&run)?;
        let exact = est.exact_ref.as_ref().map(ExactValue::from);
        let citation = formulas.evaluate(&q).ok().map(|r| r.citation);
        emit.emit(&OutputRecord {
            query: q,
            exact,
            citation,
            estimate: Some(EstimateFields::new(&est, a.dist.name(), a.seed)),
            status: Status::Ok,
        })?;
    }
    emit.finish()?;
    Ok(())
}

fn cmd_verify(a: &VerifyArgs) -> Result<ExitCode, Failure> {
    let limits = SuiteLimits::default();
    let size = limits.table_size().max(12);
    let tables = if a.inject_corrupt_table {
        StirlingTables::tampered(size, StirlingKind::First, 7, 3)
    } else {
        StirlingTables::new(size)
    };
    let formulas = Formulas::with_tables(Arc::new(tables));
    let config = VerifyConfig {
        budget: a.budget,
        seed: a.seed,
        workers: a.workers,
        threshold: a.threshold,
        limits,
        models: if a.core_only { Vec::new() } else { simulation::default_models() },
        ..Default::default()
    };
    let report = simulation::verify_suite(&config, &formulas);
    let mut body = serde_json::to_string_pretty(&report).map_err(io::Error::other)?;
    body.push('\n');
    fs::write(&a.out, body)?;

    let mut err = io::stderr().lock();
    let failed_ids: Vec<&str> =
        report.identities.iter().filter(|c| !c.passed).map(|c| c.name.as_str()).collect();
    writeln!(
        err,
        "identities: {}/{} families pass",
        report.identities.len() - failed_ids.len(),
        report.identities.len()
    )?;
    for name in &failed_ids {
        writeln!(err, "  FAIL {name}")?;
    }
    if report.mc_skipped {
        writeln!(err, "monte carlo: skipped (budget {} < {})", a.budget, simulation::MIN_GATE_BUDGET)?;
    } else {
        writeln!(
            err,
            "monte carlo: {}/{} gates pass ({:.1}%, threshold {:.1}%)",
            report.mc_passed,
            report.mc_gates,
            100.0 * report.mc_pass_rate,
            100.0 * report.threshold
        )?;
        for g in report.gates.iter().filter(|g| g.status == GateStatus::Fail) {
            let z = g.estimate.as_ref().and_then(|e| e.z);
            writeln!(
                err,
                "  FAIL {} {} {:?} [{}] z={:?} {}",
                g.query.model,
                g.query.functional,
                g.query.indices,
                g.distribution,
                z,
                g.error.as_deref().unwrap_or("")
            )?;
        }
    }
    writeln!(err, "report written to {}", a.out.display())?;
    Ok(if !report.identities_passed {
        ExitCode::from(1)
    } else if !report.mc_ok {
        ExitCode::from(4)
    } else {
        ExitCode::SUCCESS
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Exact(a) => cmd_exact(a).map(|_| ExitCode::SUCCESS),
        Command::Simulate(a) => cmd_simulate(a).map(|_| ExitCode::SUCCESS),
        Command::Verify(a) => cmd_verify(a),
    };
    match result {
        Ok(code) => code,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Numeric(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
        Err(Failure::Io(e)) if e.kind() == io::ErrorKind::BrokenPipe => ExitCode::SUCCESS,
        Err(Failure::Io(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(3)
        }
    }
}
