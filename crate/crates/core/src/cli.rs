//! Command-line front end. [`run`] maps every outcome to an exit code:
//! 0 pass, 1 verification failure, 2 usage error, 3 resource cap,
//! 4 not found.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graphgen::{BuildCaps, Family, SubspaceGraph};
use crate::hull::{find_hull_pair, hull_of_ids, PairStrategy, SearchBudget, TraceExport};
use crate::qcomb::{count_a, dij_breakdown, gaussian_binomial, CountParams};
use crate::subspace::Subspace;
use crate::verify::{self, CheckReport, Sampling};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_CAP: i32 = 3;
pub const EXIT_NOT_FOUND: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "p3hull", version, about = "P3-hull numbers of q-Kneser and Grassmann graphs")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalOpts,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalOpts {
    /// Worker threads (default: available cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[arg(long, global = true, default_value_t = 2_000_000)]
    pub max_vertices: u64,
    #[arg(long, global = true, default_value_t = 500_000_000)]
    pub max_edge_checks: u64,
    /// Hull computations allowed during pair search.
    #[arg(long, global = true, default_value_t = 5_000_000)]
    pub max_pairs: u64,
    /// Wall-clock budget for pair search, in seconds.
    #[arg(long, global = true)]
    pub time_budget: Option<f64>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Table)]
    pub format: Format,
}

impl GlobalOpts {
    fn caps(&self) -> BuildCaps {
        BuildCaps { max_vertices: self.max_vertices, max_edge_checks: self.max_edge_checks }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Table,
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FamilyArg {
    Qkneser,
    Grassmann,
}

impl From<FamilyArg> for Family {
    fn from(f: FamilyArg) -> Family {
        match f {
            FamilyArg::Qkneser => Family::QKneser,
            FamilyArg::Grassmann => Family::Grassmann,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Target {
    Lemma21,
    Lemma22,
    Lemma23,
    Lemma24,
    /// The `γ >= 2` pairing on random bases, no graph needed.
    Lemma24Construction,
    Lemma25,
    Case2count,
    Thm11,
    Thm12,
    Chain,
    All,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum StrategyArg {
    Paper,
    FixFirst,
    Full,
}

impl From<StrategyArg> for PairStrategy {
    fn from(s: StrategyArg) -> PairStrategy {
        match s {
            StrategyArg::Paper => PairStrategy::PaperConstruction,
            StrategyArg::FixFirst => PairStrategy::FixFirstExhaustive,
            StrategyArg::Full => PairStrategy::FullExhaustive,
        }
    }
}

#[derive(Debug, Args)]
pub struct GraphParams {
    #[arg(long, value_enum)]
    pub family: FamilyArg,
    #[arg(long)]
    pub q: u64,
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub k: usize,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print the Gaussian binomial [n, k]_q.
    Gauss { n: u32, k: u32, q: u64 },
    /// Evaluate a(i) and d_ij for u = <e1..em>, with the d_ij summands.
    Count {
        #[arg(long)]
        q: u64,
        #[arg(long)]
        n: u32,
        #[arg(long)]
        k: u32,
        #[arg(long)]
        m: u32,
        #[arg(long)]
        i: u32,
        #[arg(long)]
        j: Option<u32>,
    },
    /// Build a graph, print its degree report and optionally export it.
    Graph {
        #[command(flatten)]
        params: GraphParams,
        /// Output prefix: writes PREFIX.edges and PREFIX.vertices.json.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run threshold-2 infection from a seed set.
    Hull {
        #[command(flatten)]
        params: GraphParams,
        /// `paper`, vertex ids `a,b,...`, or canonical forms separated by `|`.
        #[arg(long)]
        seed: String,
        /// Also print the round-by-round trace as JSON.
        #[arg(long)]
        trace: bool,
    },
    /// Check a counting formula or construction against brute force.
    Verify {
        #[arg(long, value_enum)]
        target: Target,
        #[arg(long)]
        q: Option<u64>,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        m: Option<usize>,
        /// Sample this many pairs or triples instead of sweeping all.
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Desk-scale preset for `--target all` (the only preset).
        #[arg(long)]
        small: bool,
    },
    /// Search for a pair whose hull is the whole vertex set.
    Search {
        #[command(flatten)]
        params: GraphParams,
        #[arg(long, value_enum, default_value_t = StrategyArg::Paper)]
        strategy: StrategyArg,
    },
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::LimitExceeded(_) => EXIT_CAP,
        Error::IdOutOfRange { .. } => EXIT_NOT_FOUND,
        _ => EXIT_USAGE,
    }
}

/// Runs a parsed command, writing reports to `out` and diagnostics to stderr.
pub fn run(cli: &Cli, out: &mut dyn Write) -> i32 {
    if let Some(threads) = cli.global.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global() {
            log::warn!("thread pool already initialized: {e}");
        }
    }
    match dispatch(cli, out) {
        Ok(code) => code,
        Err(CliError::Lib(e)) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
        Err(CliError::NotFound(msg)) => {
            eprintln!("not found: {msg}");
            EXIT_NOT_FOUND
        }
        Err(CliError::Io(e)) => {
            eprintln!("i/o error: {e}");
            EXIT_USAGE
        }
    }
}

enum CliError {
    Lib(Error),
    NotFound(String),
    Io(std::io::Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Lib(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Io(e.into())
    }
}

type CliResult = std::result::Result<i32, CliError>;

fn dispatch(cli: &Cli, out: &mut dyn Write) -> CliResult {
    let g = &cli.global;
    match &cli.command {
        Command::Gauss { n, k, q } => {
            if *q < 2 {
                return Err(Error::InvalidParams(format!("q must be at least 2, got {q}")).into());
            }
            writeln!(out, "{}", gaussian_binomial(*n, *k, *q))?;
            Ok(EXIT_PASS)
        }
        Command::Count { q, n, k, m, i, j } => {
            cmd_count(g, out, CountParams::new(*n, *m, *k, *i, j.unwrap_or(0), *q), j.is_some())
        }
        Command::Graph { params, out: prefix } => cmd_graph(g, out, params, prefix.as_ref()),
        Command::Hull { params, seed, trace } => cmd_hull(g, out, params, seed, *trace),
        Command::Verify { target, q, n, k, m, samples, seed, small: _ } => {
            let reports = run_verify(g, *target, *q, *n, *k, *m, *samples, *seed)?;
            print_reports(out, g.format, &reports)?;
            Ok(if reports.iter().all(|r| r.passed) { EXIT_PASS } else { EXIT_FAIL })
        }
        Command::Search { params, strategy } => cmd_search(g, out, params, *strategy),
    }
}

fn build(g: &GlobalOpts, p: &GraphParams) -> Result<SubspaceGraph> {
    verify::graph(p.family.into(), p.q, p.n, p.k, g.caps())
}

#[derive(Serialize)]
struct CountOutput {
    a: String,
    d: Option<String>,
    terms: Vec<(u32, String)>,
}

fn cmd_count(g: &GlobalOpts, out: &mut dyn Write, p: CountParams, with_j: bool) -> CliResult {
    if p.q < 2 || p.k > p.n || p.m > p.n || p.i > p.k {
        return Err(Error::InvalidParams(format!("invalid counting parameters {p:?}")).into());
    }
    let a = count_a(&p);
    let mut result = CountOutput { a: a.to_string(), d: None, terms: Vec::new() };
    if with_j {
        let b = dij_breakdown(&p)?;
        result.d = Some(b.total().to_string());
        result.terms = b.terms.iter().map(|t| (t.r, t.term.to_string())).collect();
    }
    match g.format {
        Format::Json => writeln!(out, "{}", serde_json::to_string_pretty(&result)?)?,
        _ => {
            writeln!(out, "a({}) = {}", p.i, result.a)?;
            if let Some(d) = &result.d {
                writeln!(out, "d_{}{} = {}", p.i, p.j, d)?;
                for (r, t) in &result.terms {
                    writeln!(out, "  r = {r}: {t}")?;
                }
            }
        }
    }
    Ok(EXIT_PASS)
}

fn cmd_graph(g: &GlobalOpts, out: &mut dyn Write, p: &GraphParams, prefix: Option<&PathBuf>) -> CliResult {
    let graph = build(g, p)?;
    let report = graph.degree_report();
    if let Some(prefix) = prefix {
        let mut edges = prefix.clone().into_os_string();
        edges.push(".edges");
        let mut sidecar = prefix.clone().into_os_string();
        sidecar.push(".vertices.json");
        let mut w = BufWriter::new(File::create(&edges)?);
        graph.write_edge_list(&mut w)?;
        w.flush()?;
        let mut w = BufWriter::new(File::create(&sidecar)?);
        graph.write_vertex_json(&mut w)?;
        w.flush()?;
    }
    match g.format {
        Format::Json => writeln!(out, "{}", serde_json::to_string_pretty(&report)?)?,
        _ => {
            writeln!(out, "family: {}  q = {}  n = {}  k = {}", graph.family(), graph.q(), graph.n(), graph.k())?;
            writeln!(out, "vertices: {}", report.vertex_count)?;
            writeln!(out, "edges: {}", report.edge_count)?;
            match report.degree {
                Some(d) => writeln!(out, "degree: {d} (regular)")?,
                None => writeln!(out, "degree: min {} max {}", report.min, report.max)?,
            }
        }
    }
    Ok(EXIT_PASS)
}

fn parse_seed(graph: &SubspaceGraph, seed: &str) -> std::result::Result<Vec<u32>, CliError> {
    let seed = seed.trim();
    if seed == "paper" {
        let (w1, w2) = crate::constructions::explicit_hull_pair(graph)?;
        return Ok(vec![graph.id_of(&w1).expect("vertex"), graph.id_of(&w2).expect("vertex")]);
    }
    let id_list = seed.chars().all(|c| c.is_ascii_digit() || c == ',' || c.is_whitespace())
        && (seed.contains(',') || !seed.contains(char::is_whitespace));
    if id_list {
        let ids = seed
            .split(',')
            .map(|t| t.trim().parse::<u32>().map_err(|_| Error::Parse(format!("bad vertex id {t:?}"))))
            .collect::<Result<Vec<u32>>>()?;
        if let Some(&bad) = ids.iter().find(|&&id| id as usize >= graph.vertex_count()) {
            return Err(CliError::NotFound(format!("vertex id {bad} (graph has {} vertices)", graph.vertex_count())));
        }
        return Ok(ids);
    }
    seed.split('|')
        .map(|form| {
            let s = Subspace::parse(graph.field(), graph.n(), form.trim())?;
            graph.id_of(&s).ok_or_else(|| CliError::NotFound(format!("{form:?} is not a vertex")))
        })
        .collect()
}

fn cmd_hull(g: &GlobalOpts, out: &mut dyn Write, p: &GraphParams, seed: &str, trace: bool) -> CliResult {
    let graph = build(g, p)?;
    let ids = parse_seed(&graph, seed)?;
    let (h, tr) = hull_of_ids(&graph, &ids)?;
    let export = TraceExport::new(&graph, &ids, &h, &tr)?;
    match g.format {
        Format::Json => writeln!(out, "{}", serde_json::to_string_pretty(&export)?)?,
        _ => {
            writeln!(out, "seed: {}", export.seed.iter().map(|s| format!("[{s}]")).collect::<Vec<_>>().join(" "))?;
            writeln!(out, "hull = {}/{}", h.len(), graph.vertex_count())?;
            writeln!(out, "is_hull_set = {}", export.is_hull_set)?;
            writeln!(out, "rounds = {}", tr.converged_at)?;
            if trace {
                writeln!(out, "{}", serde_json::to_string_pretty(&export)?)?;
            }
        }
    }
    Ok(EXIT_PASS)
}

fn cmd_search(g: &GlobalOpts, out: &mut dyn Write, p: &GraphParams, strategy: StrategyArg) -> CliResult {
    let graph = build(g, p)?;
    let budget =
        SearchBudget { max_hull_computations: g.max_pairs, time_limit: g.time_budget.map(Duration::from_secs_f64) };
    let report = find_hull_pair(&graph, strategy.into(), budget)?;
    match g.format {
        Format::Json => writeln!(out, "{}", serde_json::to_string_pretty(&report)?)?,
        _ => {
            writeln!(out, "pairs tested: {}", report.pairs_tested)?;
            writeln!(out, "working pairs: {}", report.working_pairs.len())?;
            if let Some(w) = &report.witness {
                writeln!(out, "witness: {} {}", w.v1, w.v2)?;
                writeln!(out, "  v1 = {}", graph.vertex(w.v1)?)?;
                writeln!(out, "  v2 = {}", graph.vertex(w.v2)?)?;
                writeln!(out, "hull = {}/{} after {} rounds", w.hull_size, graph.vertex_count(), w.trace.converged_at)?;
            }
        }
    }
    if report.witness.is_none() {
        return Err(CliError::NotFound("no pair spreads to the whole graph".into()));
    }
    Ok(EXIT_PASS)
}

fn need<T>(v: Option<T>, name: &str) -> Result<T> {
    v.ok_or_else(|| Error::InvalidParams(format!("--{name} is required for this target")))
}

#[allow(clippy::too_many_arguments)]
fn run_verify(
    g: &GlobalOpts,
    target: Target,
    q: Option<u64>,
    n: Option<usize>,
    k: Option<usize>,
    m: Option<usize>,
    samples: Option<usize>,
    seed: u64,
) -> Result<Vec<CheckReport>> {
    let caps = g.caps();
    if target == Target::All {
        return verify::desk_preset(caps, seed);
    }
    let q = need(q, "q")?;
    let k = need(k, "k")?;
    let sampling = match samples {
        Some(samples) => Sampling::Seeded { samples, seed },
        None => Sampling::Exhaustive,
    };
    let case2 = || -> Result<SubspaceGraph> {
        if let Some(n) = n.filter(|&n| n != 2 * k) {
            return Err(Error::InvalidParams(format!("this target lives on K_q(2k, k); got n = {n}")));
        }
        verify::graph(Family::QKneser, q, 2 * k, k, caps)
    };
    let report = match target {
        Target::Lemma21 => verify::verify_lemma21(q, need(n, "n")?, k, m, caps.max_vertices)?,
        Target::Lemma22 => verify::verify_lemma22(q, need(n, "n")?, k)?,
        Target::Lemma23 => verify::verify_lemma23(&verify::graph(Family::QKneser, q, need(n, "n")?, k, caps)?, m)?,
        Target::Lemma24 => verify::verify_lemma24(&case2()?, sampling)?,
        Target::Lemma24Construction => verify::verify_lemma24_construction(q, k, samples.unwrap_or(100), seed)?,
        Target::Lemma25 => verify::verify_lemma25(&case2()?, sampling)?,
        Target::Case2count => verify::verify_case2count(&case2()?, sampling)?,
        Target::Thm11 => {
            let graph = verify::graph(Family::QKneser, q, need(n, "n")?, k, caps)?;
            verify::verify_thm11(&graph, samples.is_none())?
        }
        Target::Thm12 => verify::verify_thm12(&verify::graph(Family::Grassmann, q, need(n, "n")?, k, caps)?)?,
        Target::Chain => verify::verify_chain(&verify::graph(Family::Grassmann, q, need(n, "n")?, k, caps)?)?,
        Target::All => unreachable!(),
    };
    Ok(vec![report])
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn print_reports(out: &mut dyn Write, format: Format, reports: &[CheckReport]) -> std::result::Result<(), CliError> {
    match format {
        Format::Json => writeln!(out, "{}", serde_json::to_string_pretty(reports)?)?,
        Format::Csv => {
            writeln!(out, "target,params,passed,checked,detail,counterexample")?;
            for r in reports {
                let cx = r.counterexample.as_ref().map(|c| c.join(" | ")).unwrap_or_default();
                writeln!(
                    out,
                    "{},{},{},{},{},{}",
                    r.target,
                    csv_field(&r.params),
                    r.passed,
                    r.checked,
                    csv_field(&r.detail),
                    csv_field(&cx)
                )?;
            }
        }
        Format::Table => {
            for r in reports {
                let status = if r.passed { "PASS" } else { "FAIL" };
                writeln!(out, "{status}  {:<20} {:<16} checked {:<8} {}", r.target, r.params, r.checked, r.detail)?;
                if let Some(cx) = &r.counterexample {
                    for s in cx {
                        writeln!(out, "      counterexample: [{s}]")?;
                    }
                }
            }
            let failed = reports.iter().filter(|r| !r.passed).count();
            writeln!(out, "{} checks, {} failed", reports.len(), failed)?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> (i32, String) {
        let cli = Cli::try_parse_from(std::iter::once("p3hull").chain(args.iter().copied())).expect("valid args");
        let mut out = Vec::new();
        let code = run(&cli, &mut out);
        (code, String::from_utf8(out).unwrap())
    }

    #[test]
    fn gauss_outputs() {
        assert_eq!(run_args(&["gauss", "4", "2", "2"]), (0, "35\n".into()));
        assert_eq!(run_args(&["gauss", "5", "0", "3"]), (0, "1\n".into()));
        assert_eq!(run_args(&["gauss", "2", "3", "2"]), (0, "0\n".into()));
        assert_eq!(run_args(&["gauss", "2", "1", "1"]).0, EXIT_USAGE);
    }

    #[test]
    fn count_command() {
        let (code, out) = run_args(&["count", "--q", "2", "--n", "4", "--k", "2", "--m", "2", "--i", "2", "--j", "0"]);
        assert_eq!(code, 0);
        assert!(out.contains("a(2) = 1"), "{out}");
        assert!(out.contains("d_20 = 16"), "{out}");
    }

    #[test]
    fn unknown_flag_is_rejected() {
        assert!(Cli::try_parse_from(["p3hull", "gauss", "4", "2", "2", "--bogus"]).is_err());
    }

    #[test]
    fn hull_seed_forms() {
        let (code, out) = run_args(&[
            "hull",
            "--family",
            "qkneser",
            "--q",
            "2",
            "--n",
            "4",
            "--k",
            "2",
            "--seed",
            "1 0 0 0;0 1 0 0|0 0 1 0;0 0 0 1",
        ]);
        assert_eq!(code, 0);
        assert!(out.contains("hull = 35/35"), "{out}");
        let (code, _) =
            run_args(&["hull", "--family", "qkneser", "--q", "2", "--n", "4", "--k", "2", "--seed", "0,99"]);
        assert_eq!(code, EXIT_NOT_FOUND);
        let (code, _) =
            run_args(&["hull", "--family", "qkneser", "--q", "2", "--n", "4", "--k", "2", "--seed", "1 1;0"]);
        assert_eq!(code, EXIT_USAGE);
    }
}
