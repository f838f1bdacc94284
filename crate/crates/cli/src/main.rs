mod grid;
mod manifest;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use turan_core::bounds::chain_check_from;
use turan_core::constructions::{
    blowup_with_budget, frankl_rodl_color, lll_condition, paper_parameters, prefix_supplier,
    recursive_system, trivial_prefix_system, RecursionParams, DEFAULT_ENUMERATION_BUDGET,
};
use turan_core::exact_solver::{exact_supplier, solve_min_turan, ValueCache, DEFAULT_NODE_BUDGET};
use turan_core::hypergraph::{
    is_turan_system_with_budget, sample_verify, DEFAULT_EXHAUSTIVE_BUDGET,
};
use turan_core::{BigCount, Error, Magnitude, UniformHypergraph};

use grid::Grid;
use manifest::{FileDigest, RunManifest};

const EXIT_FALSE: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_CONSTRUCTION: u8 = 3;
const EXIT_BUDGET: u8 = 4;

/// Turán systems: constructions, verification, bounds and exact values.
#[derive(Parser)]
#[command(name = "turan", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a system and write it as canonical JSON with a manifest beside it.
    Construct {
        #[command(subcommand)]
        kind: Construct,
    },
    /// Check that every s-set of a system contains an edge.
    Verify(VerifyArgs),
    /// Every bound formula at one (r, R) cell.
    Bounds(BoundsArgs),
    /// Exact T(n,s,r) by branch and bound, cached in TURAN_CACHE.
    Solve(SolveArgs),
    /// Local Lemma arithmetic for the colouring step.
    CertifyLll(CertifyArgs),
    /// Bounds over a grid such as "r=1e3..1e6:10;R=1..5".
    Table(TableArgs),
}

#[derive(Subcommand)]
enum Construct {
    /// All r-subsets of the first n-s+r vertices.
    Prefix(PrefixArgs),
    /// Least colour class of a Moser–Tardos colouring of the r-sets of [n].
    FranklRodl(ColorArgs),
    /// Blowup of a system with m clones per vertex.
    Blowup(BlowupArgs),
    /// Initial-segment recursion G = S* ∪ T*.
    Recursive(RecursiveArgs),
}

#[derive(Args, Serialize)]
struct PrefixArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    s: usize,
    #[arg(long)]
    r: usize,
    #[arg(long)]
    #[serde(skip)]
    out: PathBuf,
}

#[derive(Args, Serialize)]
struct ColorArgs {
    /// Number of vertices N.
    #[arg(long)]
    n: usize,
    #[arg(long)]
    s: usize,
    #[arg(long)]
    r: usize,
    #[arg(long)]
    ell: usize,
    #[arg(long)]
    seed: u64,
    #[arg(long, default_value_t = 100_000)]
    max_rounds: u64,
    #[arg(long)]
    #[serde(skip)]
    out: PathBuf,
}

#[derive(Args, Serialize)]
struct BlowupArgs {
    /// System to blow up (JSON or text).
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    m: usize,
    /// s to verify against; defaults to the least s for which the input is Turán.
    #[arg(long)]
    s: Option<usize>,
    #[arg(long)]
    #[serde(skip)]
    out: PathBuf,
}

#[derive(Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum BaseKind {
    /// Prefix systems on the tails.
    Prefix,
    /// Optimal systems from the exact solver.
    Exact,
}

#[derive(Args, Serialize)]
struct RecursiveArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    r: usize,
    #[arg(long = "big-r")]
    big_r: usize,
    #[arg(long)]
    k: usize,
    #[arg(long)]
    c: f64,
    #[arg(long)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = BaseKind::Prefix)]
    base: BaseKind,
    #[arg(long)]
    #[serde(skip)]
    out: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum VerifyModeArg {
    Exhaustive,
    Sample,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    s: usize,
    #[arg(long, value_enum, default_value_t = VerifyModeArg::Exhaustive)]
    mode: VerifyModeArg,
    #[arg(long, default_value_t = 10_000)]
    trials: u64,
    /// Required in sample mode.
    #[arg(long)]
    seed: Option<u64>,
    /// Largest C(n,s) checked exhaustively.
    #[arg(long, default_value_t = DEFAULT_EXHAUSTIVE_BUDGET)]
    budget: u128,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Args)]
struct BoundsArgs {
    #[arg(long, default_value_t = 1_000_000)]
    r: u64,
    #[arg(long = "big-r")]
    big_r: u64,
    /// Enables the recursive certificate.
    #[arg(long)]
    eps1: Option<f64>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Args)]
struct SolveArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    s: usize,
    #[arg(long)]
    r: usize,
    #[arg(long, default_value_t = DEFAULT_NODE_BUDGET)]
    max_nodes: u64,
    /// Skip reading and writing the value cache.
    #[arg(long)]
    no_cache: bool,
}

#[derive(Args)]
struct CertifyArgs {
    /// With --big-r: use the colouring parameters N and ell derived from (r, R).
    #[arg(long)]
    r: Option<u64>,
    #[arg(long = "big-r")]
    big_r: Option<u64>,
    /// Explicit vertex count; needs --s, --r and --ell.
    #[arg(long)]
    n: Option<u64>,
    #[arg(long)]
    s: Option<u64>,
    #[arg(long)]
    ell: Option<u64>,
}

#[derive(Args)]
struct TableArgs {
    #[arg(long)]
    grid: Grid,
    #[arg(long)]
    eps1: Option<f64>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

/// A failure with its exit code.
struct Failure {
    code: u8,
    error: anyhow::Error,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::Budget { .. } => EXIT_BUDGET,
            Error::RoundCap { .. } | Error::RetryCap { .. } | Error::UnresolvedFloor(_) => {
                EXIT_CONSTRUCTION
            }
            Error::Domain(_) | Error::Parse(_) | Error::Json(_) | Error::Io(_) => EXIT_USAGE,
        };
        Failure {
            code,
            error: e.into(),
        }
    }
}

impl From<anyhow::Error> for Failure {
    fn from(error: anyhow::Error) -> Self {
        Failure {
            code: EXIT_USAGE,
            error,
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure {
            code: EXIT_CONSTRUCTION,
            error: e.into(),
        }
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure {
            code: EXIT_CONSTRUCTION,
            error: e.into(),
        }
    }
}

fn usage(msg: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_USAGE,
        error: anyhow::anyhow!(msg.into()),
    }
}

type Outcome = Result<u8, Failure>;

fn print_json(value: &impl Serialize) -> Result<(), Failure> {
    let mut out = std::io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, value)?;
    writeln!(out)?;
    Ok(())
}

fn read_system(path: &Path) -> Result<UniformHypergraph, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| usage(format!("reading {}: {e}", path.display())))?;
    let parsed = if text.trim_start().starts_with('{') {
        UniformHypergraph::from_json(&text)
    } else {
        UniformHypergraph::from_text(&text)
    };
    Ok(parsed?)
}

/// Writes the system, verifies it when affordable, and writes the manifest.
#[allow(clippy::too_many_arguments)]
fn finish_construct(
    kind: &str,
    params: impl Serialize,
    seed: Option<u64>,
    s: usize,
    system: &UniformHypergraph,
    out: &Path,
    inputs: &[&Path],
    details: serde_json::Value,
) -> Outcome {
    std::fs::write(out, system.to_json())?;
    let verified = match is_turan_system_with_budget(system, s, DEFAULT_EXHAUSTIVE_BUDGET) {
        Ok(report) => Some(report.is_turan),
        Err(Error::Budget { .. }) => None,
        Err(e) => return Err(e.into()),
    };
    let mut manifest = RunManifest::new(&format!("construct {kind}"), params, seed)?;
    manifest.inputs = inputs
        .iter()
        .map(|p| FileDigest::of(p))
        .collect::<anyhow::Result<_>>()?;
    manifest.outputs = vec![FileDigest::of(out)?];
    let manifest_path = manifest.write_beside(out)?;
    print_json(&json!({
        "kind": kind,
        "n": system.n(),
        "s": s,
        "r": system.r(),
        "edges": system.len(),
        "verified": verified,
        "out": out.display().to_string(),
        "manifest": manifest_path.display().to_string(),
        "details": details,
    }))?;
    Ok(match verified {
        Some(false) => EXIT_CONSTRUCTION,
        _ => 0,
    })
}

fn construct(kind: Construct) -> Outcome {
    match kind {
        Construct::Prefix(a) => {
            let h = trivial_prefix_system(a.n, a.s, a.r)?;
            finish_construct("prefix", &a, None, a.s, &h, &a.out, &[], json!({}))
        }
        Construct::FranklRodl(a) => {
            let outcome = frankl_rodl_color(a.n, a.s, a.r, a.ell, a.seed, a.max_rounds)?;
            let details = json!({
                "rounds_used": outcome.rounds_used,
                "least_color": outcome.least_color,
                "class_sizes": outcome.class_sizes,
            });
            finish_construct(
                "frankl-rodl",
                &a,
                Some(a.seed),
                a.s,
                &outcome.least_class,
                &a.out,
                &[],
                details,
            )
        }
        Construct::Blowup(a) => {
            let base = read_system(&a.input)?;
            let (b, report) = blowup_with_budget(&base, a.m, DEFAULT_ENUMERATION_BUDGET)?;
            let s = a.s.unwrap_or_else(|| infer_s(&base));
            let details = serde_json::to_value(&report)?;
            finish_construct("blowup", &a, None, s, &b, &a.out, &[&a.input], details)
        }
        Construct::Recursive(a) => {
            let params = RecursionParams {
                n: a.n,
                r: a.r,
                big_r: a.big_r,
                k: a.k,
                c: a.c,
            };
            let (g, sample) = match a.base {
                BaseKind::Prefix => recursive_system(&params, a.seed, &prefix_supplier)?,
                BaseKind::Exact => {
                    recursive_system(&params, a.seed, &exact_supplier(DEFAULT_NODE_BUDGET))?
                }
            };
            let details = json!({
                "expected_size": sample.expected_size,
                "retries": sample.retries,
                "p": sample.p,
                "sampled_segments": sample.s_sets.len(),
                "s_star": sample.s_star.len(),
                "t_star": sample.t_star.len(),
            });
            finish_construct(
                "recursive",
                &a,
                Some(a.seed),
                params.s(),
                &g,
                &a.out,
                &[],
                details,
            )
        }
    }
}

/// Least s for which the system is Turán; its blowups are Turán for the same s.
fn infer_s(h: &UniformHypergraph) -> usize {
    (h.r() + 1..=h.n())
        .find(|&s| {
            is_turan_system_with_budget(h, s, DEFAULT_EXHAUSTIVE_BUDGET)
                .map(|rep| rep.is_turan)
                .unwrap_or(false)
        })
        .unwrap_or(h.r() + 1)
}

fn verify(a: VerifyArgs) -> Outcome {
    let h = read_system(&a.input)?;
    let report = match a.mode {
        VerifyModeArg::Exhaustive => is_turan_system_with_budget(&h, a.s, a.budget)?,
        VerifyModeArg::Sample => {
            let seed = a.seed.ok_or_else(|| usage("sample mode needs --seed"))?;
            sample_verify(&h, a.s, a.trials, seed)?
        }
    };
    print_json(&report)?;
    Ok(if report.is_turan { 0 } else { EXIT_FALSE })
}

fn emit_cells(cells: &[grid::Cell], format: Format) -> Result<(), Failure> {
    match format {
        Format::Json => {
            let mut out = std::io::stdout().lock();
            for c in cells {
                serde_json::to_writer(&mut out, c)?;
                writeln!(out)?;
            }
        }
        Format::Csv => grid::write_csv(cells, std::io::stdout().lock())?,
    }
    Ok(())
}

fn bounds(a: BoundsArgs) -> Outcome {
    emit_cells(&[grid::cell(a.r, a.big_r, a.eps1)?], a.format)?;
    Ok(0)
}

fn table(a: TableArgs) -> Outcome {
    let cells = a
        .grid
        .cells()
        .into_par_iter()
        .map(|(r, big_r)| grid::cell(r, big_r, a.eps1))
        .collect::<turan_core::Result<Vec<_>>>()?;
    emit_cells(&cells, a.format)?;
    Ok(0)
}

fn solve(a: SolveArgs) -> Outcome {
    let result = if a.no_cache {
        solve_min_turan(a.n, a.s, a.r, a.max_nodes)?
    } else {
        let mut cache = ValueCache::load(ValueCache::default_path());
        let result = cache.solve(a.n, a.s, a.r, a.max_nodes)?;
        if let Err(e) = cache.save() {
            log::warn!("could not write the value cache: {e}");
        }
        result
    };
    if !result.proven_optimal {
        log::warn!("node budget exhausted; optimum is an upper bound only");
    }
    print_json(&result)?;
    Ok(0)
}

fn certify(a: CertifyArgs) -> Outcome {
    match (a.r, a.big_r, a.n, a.s, a.ell) {
        (Some(r), Some(big_r), None, None, None) => {
            let params = paper_parameters(r, big_r)?;
            let cert = lll_condition(&params.n_vertices, params.s, r, &params.effective_ell())?;
            let holds = cert.condition_holds;
            let chain = chain_check_from(params.clone());
            print_json(&json!({ "parameters": params, "certificate": cert, "chain": chain }))?;
            Ok(if holds { 0 } else { EXIT_FALSE })
        }
        (Some(r), None, Some(n), Some(s), Some(ell)) => {
            let cert = lll_condition(
                &Magnitude::Exact(BigCount::from_u64(n)),
                s,
                r,
                &Magnitude::Exact(BigCount::from_u64(ell)),
            )?;
            let holds = cert.condition_holds;
            let params = json!({ "n": n, "s": s, "r": r, "ell": ell });
            print_json(&json!({ "parameters": params, "certificate": cert }))?;
            Ok(if holds { 0 } else { EXIT_FALSE })
        }
        _ => Err(usage(
            "certify-lll takes either --r --big-r, or --n --s --r --ell",
        )),
    }
}

fn run(cli: Cli) -> Outcome {
    match cli.command {
        Command::Construct { kind } => construct(kind),
        Command::Verify(a) => verify(a),
        Command::Bounds(a) => bounds(a),
        Command::Solve(a) => solve(a),
        Command::CertifyLll(a) => certify(a),
        Command::Table(a) => table(a),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {:#}", f.error);
            ExitCode::from(f.code)
        }
    }
}
