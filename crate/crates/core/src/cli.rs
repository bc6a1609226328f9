//! The `mgw` command line: chain verification, rounding experiments,
//! convergence scans and embedding defects, all emitting CSV.
//!
//! Exit codes: 0 on success, 1 when a verification fails, 2 on usage errors.

use std::fs::File;
use std::io::{self, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::formula::{
    convergence_scan, embedding_defect, parse_sentence, EmbeddingDefect, EvalMode, Family,
    MetricStructure, RankAlgebra, ScanOptions, SymmetricGroup, UnitaryGroup, Value, DEFAULT_BUDGET,
};
use crate::matrix::UnitaryElement;
use crate::order::{
    as_tuples, chain_check, rank_chain, sym_chain, unitary_chain, ChainCheck, RelationFormula,
};
use crate::perm::Permutation;
use crate::rational::{format_pq, parse_rational, to_f64, Rational};
use crate::rounding::{block_average_unitary, round_to_subgroup, unitary_round};

/// Environment variable overriding the evaluation budget.
pub const BUDGET_VAR: &str = "MGW_BUDGET";

#[derive(Debug, Parser)]
#[command(name = "mgw", about = "Metric group experiments", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Verify the commuting-pair chains and print pairwise relation values.
    Chains(ChainsArgs),
    /// Round random permutations of degree km into a diagonal copy of S_m.
    Round(RoundArgs),
    /// Round random unitaries into embedded smaller unitary groups.
    Uround(UroundArgs),
    /// Evaluate a sentence across a range of sizes.
    Converge(ConvergeArgs),
    /// Measure how far a map between symmetric groups is from an embedding.
    Defect(DefectArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FamilyArg {
    Sym,
    Unitary,
    Rank,
}

impl From<FamilyArg> for Family {
    fn from(f: FamilyArg) -> Self {
        match f {
            FamilyArg::Sym => Family::Sym,
            FamilyArg::Unitary => Family::Unitary,
            FamilyArg::Rank => Family::Rank,
        }
    }
}

#[derive(Debug, Args)]
struct Common {
    /// Write CSV here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Debug, Args)]
struct ChainsArgs {
    #[arg(long, value_enum, default_value = "sym")]
    family: FamilyArg,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    l: usize,
    #[arg(long, default_value = "0", value_parser = rational_arg)]
    epsilon: Rational,
    /// Relation formula over x1, x2, y1, y2; defaults to the commutator
    /// relation (or its rank form for the rank family).
    #[arg(long)]
    formula: Option<String>,
    /// Also write the verified chain as JSON to this file.
    #[arg(long)]
    witness: Option<PathBuf>,
    #[command(flatten)]
    common: Common,
}

#[derive(Debug, Args)]
struct RoundArgs {
    #[arg(long)]
    m: usize,
    #[arg(long)]
    k: usize,
    #[arg(long, default_value_t = 100)]
    samples: usize,
    #[command(flatten)]
    common: Common,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum UroundMethod {
    /// Nearest unitary of the top-left block, padded with the identity.
    Pad,
    /// Eigenvalue block averaging into I_k ⊗ B.
    Average,
}

#[derive(Debug, Args)]
struct UroundArgs {
    #[arg(long)]
    k: usize,
    #[arg(long)]
    m: usize,
    #[arg(long, default_value_t = 0)]
    r: usize,
    #[arg(long, default_value_t = 50)]
    samples: usize,
    #[arg(long, value_enum, default_value = "pad")]
    method: UroundMethod,
    #[command(flatten)]
    common: Common,
}

#[derive(Debug, Args)]
struct ConvergeArgs {
    #[arg(long, value_enum, default_value = "sym")]
    family: FamilyArg,
    #[arg(long)]
    formula: String,
    /// Sizes as `a..b` (inclusive) or a comma-separated list.
    #[arg(long, value_parser = range_arg)]
    n: Vec<Vec<usize>>,
    /// Sample count for sampled evaluation.
    #[arg(long, default_value_t = 64)]
    samples: usize,
    /// Sample permutation and rank structures instead of enumerating them.
    #[arg(long)]
    sampled: bool,
    #[command(flatten)]
    common: Common,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MapKind {
    /// S_m → S_{km+r}, k stacked copies.
    Diagonal,
    /// S_m → S_{m+r}, extension by fixed points.
    Pad,
    /// S_{km} → S_{km}, the rounding map.
    Round,
}

#[derive(Debug, Args)]
struct DefectArgs {
    #[arg(long, value_enum)]
    map: MapKind,
    #[arg(long)]
    m: usize,
    #[arg(long, default_value_t = 1)]
    k: usize,
    #[arg(long, default_value_t = 0)]
    r: usize,
    /// Number of sampled elements; the whole group is used when it has at
    /// most 720 elements.
    #[arg(long, default_value_t = 30)]
    samples: usize,
    #[command(flatten)]
    common: Common,
}

fn rational_arg(s: &str) -> Result<Rational, String> {
    parse_rational(s).ok_or_else(|| format!("not a rational number: {s:?}"))
}

fn range_arg(s: &str) -> Result<Vec<usize>, String> {
    let bad = || format!("expected a..b or a,b,c: {s:?}");
    if let Some((a, b)) = s.split_once("..") {
        let a: usize = a.trim().parse().map_err(|_| bad())?;
        let b: usize = b.trim().parse().map_err(|_| bad())?;
        if a > b {
            return Err(bad());
        }
        return Ok((a..=b).collect());
    }
    s.split(',')
        .map(|x| x.trim().parse().map_err(|_| bad()))
        .collect()
}

/// A table of CSV rows plus whether every verified property held.
struct Report {
    header: Vec<&'static str>,
    rows: Vec<Vec<String>>,
    ok: bool,
}

enum Failure {
    Usage(String),
    Io(io::Error),
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Io(e)
    }
}

impl From<csv::Error> for Failure {
    fn from(e: csv::Error) -> Self {
        Failure::Io(e.into())
    }
}

fn usage<E: std::fmt::Display>(e: E) -> Failure {
    Failure::Usage(e.to_string())
}

/// Runs the command line `argv` (program name first), writing CSV to `out`
/// unless `--out` is given and diagnostics to `err`. Returns the exit code.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 {
                write!(out, "{text}")
            } else {
                write!(err, "{text}")
            };
            return code;
        }
    };
    match execute(cli.command, out) {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(err, "error: {msg}\n\nRun `mgw --help` for usage.");
            2
        }
        Err(Failure::Io(e)) => {
            let _ = writeln!(err, "error: {e}");
            2
        }
    }
}

fn execute(command: Command, out: &mut dyn Write) -> Result<bool, Failure> {
    let (report, common) = match command {
        Command::Chains(a) => (chains(&a)?, a.common),
        Command::Round(a) => (round(&a)?, a.common),
        Command::Uround(a) => (uround(&a)?, a.common),
        Command::Converge(a) => (converge(&a)?, a.common),
        Command::Defect(a) => (defect(&a)?, a.common),
    };
    match &common.out {
        Some(path) => write_csv(&report, File::create(path)?)?,
        None => write_csv(&report, &mut *out)?,
    }
    Ok(report.ok)
}

fn write_csv<W: Write>(report: &Report, sink: W) -> Result<(), Failure> {
    let mut w = csv::Writer::from_writer(sink);
    w.write_record(&report.header)?;
    for row in &report.rows {
        w.write_record(row)?;
    }
    w.flush()?;
    Ok(())
}

fn value_cells(v: &Value) -> [String; 2] {
    [v.to_string(), v.to_f64().to_string()]
}

fn chains(a: &ChainsArgs) -> Result<Report, Failure> {
    let relation = match (&a.formula, a.family) {
        (Some(text), _) => {
            RelationFormula::parse(text, &["x1", "x2"], &["y1", "y2"]).map_err(usage)?
        }
        (None, FamilyArg::Rank) => RelationFormula::rank_order(),
        (None, _) => RelationFormula::eta(),
    };
    // The relation is quantifier-free, so the mode is never consulted.
    let mode = EvalMode::Exhaustive;
    let family = format!("{:?}", Family::from(a.family)).to_lowercase();
    let (values, valid, json) = match a.family {
        FamilyArg::Sym => {
            let s = SymmetricGroup::new(a.n, mode).map_err(usage)?;
            let tuples = as_tuples(&sym_chain(a.n, a.l).map_err(usage)?);
            chain_values(&s, &relation, &a.epsilon, tuples)?
        }
        FamilyArg::Unitary => {
            let s = UnitaryGroup::new(a.n, mode).map_err(usage)?;
            let tuples = as_tuples(&unitary_chain(a.n, a.l).map_err(usage)?);
            chain_values(&s, &relation, &a.epsilon, tuples)?
        }
        FamilyArg::Rank => {
            let s = RankAlgebra::new(a.n, mode).map_err(usage)?;
            let tuples = as_tuples(&rank_chain(a.n, a.l).map_err(usage)?);
            chain_values(&s, &relation, &a.epsilon, tuples)?
        }
    };
    if let (Some(path), Some(json)) = (&a.witness, json) {
        let text = serde_json::to_string_pretty(&json).map_err(|e| Failure::Io(e.into()))?;
        std::fs::write(path, text + "\n")?;
    }
    let mut rows = Vec::new();
    for (i, row) in values.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            let [exact, float] = value_cells(v);
            rows.push(vec![
                family.clone(),
                a.n.to_string(),
                a.l.to_string(),
                (i + 1).to_string(),
                (j + 1).to_string(),
                exact,
                float,
            ]);
        }
    }
    Ok(Report {
        header: vec!["family", "n", "l", "i", "j", "value", "value_f64"],
        rows,
        ok: valid,
    })
}

type ChainValues = (Vec<Vec<Value>>, bool, Option<serde_json::Value>);

fn chain_values<S>(
    s: &S,
    relation: &RelationFormula,
    epsilon: &Rational,
    tuples: Vec<Vec<S::Elem>>,
) -> Result<ChainValues, Failure>
where
    S: MetricStructure,
    S::Elem: serde::Serialize,
{
    use crate::formula::MetricValue;
    match chain_check(s, relation, epsilon, tuples.clone()).map_err(usage)? {
        ChainCheck::Valid(w) => Ok((w.values.clone(), true, Some(w.to_json()))),
        ChainCheck::Violated(_) => {
            let values = tuples
                .iter()
                .map(|a| {
                    tuples
                        .iter()
                        .map(|b| relation.value(s, a, b).map(MetricValue::into_value))
                        .collect::<Result<Vec<_>, _>>()
                })
                .collect::<Result<Vec<_>, _>>()
                .map_err(usage)?;
            Ok((values, false, None))
        }
    }
}

/// A generator for sample `index`, independent of how samples are scheduled.
fn sample_rng(seed: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    rng
}

const ROUND_HEADER: [&str; 12] = [
    "kind",
    "m",
    "k",
    "r",
    "seed",
    "sample",
    "achieved",
    "achieved_f64",
    "bound",
    "bound_f64",
    "guaranteed",
    "within",
];

fn round(a: &RoundArgs) -> Result<Report, Failure> {
    if a.m == 0 || a.k == 0 {
        return Err(usage("--m and --k must be positive"));
    }
    let n =
        a.m.checked_mul(a.k)
            .ok_or_else(|| usage("degree too large"))?;
    let results: Vec<_> = (0..a.samples)
        .into_par_iter()
        .map(|i| {
            let sigma = Permutation::random(n, &mut sample_rng(a.common.seed, i));
            round_to_subgroup(&sigma, a.m, a.k)
        })
        .collect::<Result<_, _>>()
        .map_err(usage)?;
    let mut ok = true;
    let rows = results
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let within = r.within_bound();
            ok &= within || !r.guaranteed;
            vec![
                "perm".to_string(),
                a.m.to_string(),
                a.k.to_string(),
                "0".to_string(),
                a.common.seed.to_string(),
                i.to_string(),
                format_pq(&r.achieved),
                to_f64(&r.achieved).to_string(),
                r.bound.to_string(),
                r.bound.to_f64().to_string(),
                r.guaranteed.to_string(),
                within.to_string(),
            ]
        })
        .collect();
    Ok(Report {
        header: ROUND_HEADER.to_vec(),
        rows,
        ok,
    })
}

fn uround(a: &UroundArgs) -> Result<Report, Failure> {
    if a.m == 0 || a.k == 0 {
        return Err(usage("--m and --k must be positive"));
    }
    let (kind, n) = match a.method {
        UroundMethod::Pad => {
            if a.r >= a.m {
                return Err(usage("--r must be smaller than --m"));
            }
            ("unitary_pad", a.k * a.m + a.r)
        }
        UroundMethod::Average => {
            if a.r != 0 {
                return Err(usage("--r is not used by block averaging"));
            }
            ("unitary_average", a.k * a.m)
        }
    };
    let results: Vec<_> = (0..a.samples)
        .into_par_iter()
        .map(|i| {
            let c = UnitaryElement::haar(n, &mut sample_rng(a.common.seed, i));
            match a.method {
                UroundMethod::Pad => unitary_round(&c, a.k, a.m, a.r),
                UroundMethod::Average => block_average_unitary(&c, a.k),
            }
        })
        .collect();
    let mut ok = true;
    let mut rows = Vec::new();
    for (i, r) in results.iter().enumerate() {
        let (achieved, bound, within) = match r {
            Ok(r) => (
                r.achieved.to_string(),
                r.bound,
                r.achieved <= r.bound + 1e-9,
            ),
            Err(e) => (format!("error: {e}"), f64::NAN, false),
        };
        ok &= within;
        let bound = if bound.is_nan() {
            String::new()
        } else {
            bound.to_string()
        };
        rows.push(vec![
            kind.to_string(),
            a.m.to_string(),
            a.k.to_string(),
            a.r.to_string(),
            a.common.seed.to_string(),
            i.to_string(),
            achieved.clone(),
            achieved,
            bound.clone(),
            bound,
            "true".to_string(),
            within.to_string(),
        ]);
    }
    Ok(Report {
        header: ROUND_HEADER.to_vec(),
        rows,
        ok,
    })
}

/// The evaluation budget, from [`BUDGET_VAR`] when set.
pub fn budget_from_env() -> Result<u128, String> {
    match std::env::var(BUDGET_VAR) {
        Ok(text) => {
            let value: f64 = text
                .trim()
                .parse()
                .map_err(|_| format!("{BUDGET_VAR} is not a number: {text:?}"))?;
            if value.is_nan() || value < 1.0 {
                return Err(format!("{BUDGET_VAR} must be at least 1"));
            }
            Ok(value as u128)
        }
        Err(_) => Ok(DEFAULT_BUDGET),
    }
}

fn converge(a: &ConvergeArgs) -> Result<Report, Failure> {
    let formula = parse_sentence(&a.formula).map_err(usage)?;
    let ns: Vec<usize> = a.n.iter().flatten().copied().collect();
    if ns.is_empty() {
        return Err(usage("--n is required"));
    }
    let options = ScanOptions {
        budget: budget_from_env().map_err(usage)?,
        samples: a.samples,
        seed: a.common.seed,
        force_sampled: a.sampled,
    };
    let family = Family::from(a.family);
    let points = convergence_scan(&formula, family, &ns, &options).map_err(usage)?;
    let rows = points
        .iter()
        .map(|p| {
            let [exact, float] = value_cells(&p.value);
            vec![
                format!("{family:?}").to_lowercase(),
                p.n.to_string(),
                exact,
                float,
                p.mode.to_string(),
                p.evaluations.to_string(),
            ]
        })
        .collect();
    Ok(Report {
        header: vec!["family", "n", "value", "value_f64", "mode", "evaluations"],
        rows,
        ok: true,
    })
}

fn defect(a: &DefectArgs) -> Result<Report, Failure> {
    if a.m == 0 || a.k == 0 {
        return Err(usage("--m and --k must be positive"));
    }
    let source_degree = match a.map {
        MapKind::Round => a.k * a.m,
        MapKind::Diagonal | MapKind::Pad => a.m,
    };
    let target_degree = match a.map {
        MapKind::Diagonal => a.k * a.m + a.r,
        MapKind::Pad => a.m + a.r,
        MapKind::Round => a.k * a.m,
    };
    let mode = if source_degree <= 6 {
        EvalMode::Exhaustive
    } else {
        EvalMode::Sampled {
            samples: a.samples,
            seed: a.common.seed,
        }
    };
    let label = mode.label();
    let source = SymmetricGroup::new(source_degree, mode).map_err(usage)?;
    let target = SymmetricGroup::new(target_degree, EvalMode::Exhaustive).map_err(usage)?;
    let (k, m) = (a.k, a.m);
    let d: EmbeddingDefect = match a.map {
        MapKind::Diagonal => embedding_defect(
            |p: &Permutation| p.diagonal_embed(k, target_degree).expect("fits"),
            &source,
            &target,
            None,
        ),
        MapKind::Pad => embedding_defect(
            |p: &Permutation| p.pad_embed(target_degree).expect("fits"),
            &source,
            &target,
            None,
        ),
        MapKind::Round => embedding_defect(
            |p: &Permutation| round_to_subgroup(p, m, k).expect("degree km").rounded,
            &source,
            &target,
            None,
        ),
    }
    .map_err(usage)?;
    let map = format!("{:?}", a.map).to_lowercase();
    let max = d.max();
    let row = vec![
        map,
        a.m.to_string(),
        a.k.to_string(),
        a.r.to_string(),
        label.to_string(),
        d.product.to_string(),
        d.inverse.to_string(),
        d.identity.to_string(),
        d.metric.to_string(),
        max.to_string(),
        max.to_f64().to_string(),
    ];
    Ok(Report {
        header: vec![
            "map",
            "m",
            "k",
            "r",
            "mode",
            "product",
            "inverse",
            "identity",
            "metric",
            "defect",
            "defect_f64",
        ],
        rows: vec![row],
        ok: true,
    })
}
