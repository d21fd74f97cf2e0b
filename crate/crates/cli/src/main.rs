//! `goodpair` command-line driver.
//!
//! JSON reports go to stdout, human-readable tables to stderr.
//!
//! Exit codes: 0 success or definite, 1 verified negative (indefinite,
//! identically zero, no candidate), 2 unknown or budget exhausted, 3 usage
//! error, 4 input, validation or I/O error.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use goodpair::definiteness::{Budget, Kind, Verdict};
use goodpair::gbsp::{
    classify_series, covering_count, critical_exponent, probe_phi, series_oracle, CoverProbe, PowerLawData,
    DEFAULT_MAX_SHELLS,
};
use goodpair::manifolds::{
    build_quadratic_system, canonical_basis, catalog_entry, check_condition_ii, example_catalog, ManifoldSpec,
};
use goodpair::matrices::search::{search, SearchConfig, SearchMode};
use goodpair::matrices::{obstruction_check, GoodPairCandidate, SymbolicMatrix};
use goodpair::rational::{format_rational, parse_rational};
use goodpair::{LinearForm, Rational};

const EXIT_NEGATIVE: u8 = 1;
const EXIT_UNKNOWN: u8 = 2;
const EXIT_USAGE: u8 = 3;
const EXIT_INPUT: u8 = 4;

#[derive(Parser)]
#[command(name = "goodpair", version, about = "Definite determinants, quadratic manifolds and power-law series checks")]
struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true, env = "GOODPAIR_WORKERS")]
    workers: Option<usize>,
    #[command(flatten)]
    budget: BudgetArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct BudgetArgs {
    /// Boxes per face for branch-and-bound.
    #[arg(long, global = true)]
    max_boxes: Option<u64>,
    /// Maximum bisection depth.
    #[arg(long, global = true)]
    max_depth: Option<u32>,
    /// Random points tried before certification.
    #[arg(long, global = true)]
    sample_count: Option<u32>,
}

impl BudgetArgs {
    fn budget(&self) -> Budget {
        let d = Budget::default();
        Budget {
            max_boxes: self.max_boxes.unwrap_or(d.max_boxes),
            max_depth: self.max_depth.unwrap_or(d.max_depth),
            sample_count: self.sample_count.unwrap_or(d.sample_count),
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Determinant and definiteness of a matrix of linear forms.
    Verify {
        /// Matrix JSON: {"l": 3, "entries": [["z1", ...], ...]}.
        matrix: PathBuf,
    },
    /// Search for matrices over {0, ±z_v} with a definite determinant.
    Search(SearchArgs),
    /// Quadratic system induced by a matrix and independent forms L_v.
    Construct {
        #[arg(long)]
        matrix: PathBuf,
        /// L_v as linear forms in s, separated by ';' (default: L_v = s_v).
        #[arg(long)]
        forms: Option<String>,
        #[arg(long)]
        label: Option<String>,
        /// Write the manifold here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Condition (II) for a manifold: definiteness of det Λ(s).
    Check2 {
        manifold: PathBuf,
    },
    /// Series classification and shell sums for power-law data.
    Analyze {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        l: usize,
        #[arg(long)]
        tau: String,
        #[arg(long)]
        s: String,
        /// Number of shells to sum.
        #[arg(long, default_value_t = 100)]
        q_max: u64,
    },
    /// Covering counts of S(φ, δ) over a dyadic δ-ladder.
    Cover(CoverArgs),
    /// Built-in examples with their condition (I) range and (II) verdict.
    Catalog,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Exhaustive,
    Randomized,
}

#[derive(Args)]
struct SearchArgs {
    l: usize,
    n: usize,
    #[arg(long, value_enum, default_value_t = Mode::Exhaustive)]
    mode: Mode,
    /// Matrices to draw in randomized mode.
    #[arg(long, default_value_t = 100_000)]
    samples: u64,
    /// Search even when an obstruction rules the pair out.
    #[arg(long)]
    force: bool,
    /// Scan every matrix instead of canonical representatives only.
    #[arg(long)]
    no_prune: bool,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Stop after this many prefixes.
    #[arg(long)]
    max_prefixes: Option<u64>,
    #[arg(long)]
    checkpoint: Option<PathBuf>,
    /// Continue from --checkpoint.
    #[arg(long, requires = "checkpoint")]
    resume: bool,
    /// Directory for candidates.json and summary.json.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CoverArgs {
    #[arg(long)]
    manifold: PathBuf,
    /// Radius α of the ball around the center.
    #[arg(long, default_value = "1")]
    alpha: String,
    /// Exponents a:b for δ = 2^-a, ..., 2^-b.
    #[arg(long, default_value = "3:9")]
    delta_ladder: String,
    /// Coefficients r of φ = r·x + s·g(x) - a, comma separated (default e_1).
    #[arg(long)]
    r: Option<String>,
    /// Coefficients s (default e_1).
    #[arg(long)]
    s: Option<String>,
    #[arg(long, default_value = "0")]
    a: String,
    /// Center x (default 0).
    #[arg(long)]
    center: Option<String>,
    /// Constant C of the gradient precondition.
    #[arg(long, default_value = "4")]
    c: String,
    /// Fail when the precondition does not hold.
    #[arg(long)]
    strict: bool,
}

/// Failure with the exit code it maps to.
struct Failure {
    code: u8,
    error: anyhow::Error,
}

impl From<anyhow::Error> for Failure {
    fn from(error: anyhow::Error) -> Self {
        Failure { code: EXIT_INPUT, error }
    }
}

impl From<goodpair::Error> for Failure {
    fn from(e: goodpair::Error) -> Self {
        Failure { code: EXIT_INPUT, error: e.into() }
    }
}

type Outcome = Result<u8, Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { 0 });
        }
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    if let Some(w) = cli.workers {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(w).build_global() {
            eprintln!("error: cannot start {w} workers: {e}");
            return ExitCode::from(EXIT_USAGE);
        }
    }
    let budget = cli.budget.budget();
    let result = match cli.command {
        Command::Verify { matrix } => cmd_verify(&matrix, &budget),
        Command::Search(args) => cmd_search(args, cli.workers, &budget),
        Command::Construct { matrix, forms, label, out } => {
            cmd_construct(&matrix, forms.as_deref(), label, out.as_deref())
        }
        Command::Check2 { manifold } => cmd_check2(&manifold, &budget),
        Command::Analyze { n, l, tau, s, q_max } => cmd_analyze(n, l, &tau, &s, q_max),
        Command::Cover(args) => cmd_cover(args),
        Command::Catalog => cmd_catalog(&budget),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {:#}", f.error);
            ExitCode::from(f.code)
        }
    }
}

fn read(path: &Path) -> anyhow::Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn write(path: &Path, text: &str) -> anyhow::Result<()> {
    fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))
}

fn json<T: Serialize>(value: &T) -> anyhow::Result<String> {
    Ok(serde_json::to_string_pretty(value)?)
}

fn emit<T: Serialize>(value: &T) -> anyhow::Result<()> {
    println!("{}", json(value)?);
    Ok(())
}

fn verdict_code(kind: Kind) -> u8 {
    match kind {
        Kind::PositiveDefinite | Kind::NegativeDefinite => 0,
        Kind::Indefinite | Kind::IdenticallyZero => EXIT_NEGATIVE,
        Kind::Unknown => EXIT_UNKNOWN,
    }
}

fn rationals(text: &str) -> goodpair::Result<Vec<Rational>> {
    text.split(',').map(|t| parse_rational(t.trim())).collect()
}

fn unit(dim: usize) -> Vec<Rational> {
    let mut v = vec![Rational::from_integer(0.into()); dim];
    if let Some(x) = v.first_mut() {
        *x = Rational::from_integer(1.into());
    }
    v
}

#[derive(Serialize)]
struct VerifyReport<'a> {
    l: usize,
    n: usize,
    det: String,
    degree: Option<u32>,
    obstruction: goodpair::matrices::ObstructionStatus,
    kind: Kind,
    verdict: &'a Verdict,
    canonical_id: &'a str,
}

fn cmd_verify(path: &Path, budget: &Budget) -> Outcome {
    let m = SymbolicMatrix::from_json_str(&read(path)?).with_context(|| format!("invalid matrix in {}", path.display()))?;
    let c = GoodPairCandidate::evaluate(m, budget)?;
    let obstruction = obstruction_check(c.l, c.n)?.status;
    emit(&VerifyReport {
        l: c.l,
        n: c.n,
        det: c.det_text.clone(),
        degree: c.det.homogeneity_degree(),
        obstruction,
        kind: c.verdict.kind,
        verdict: &c.verdict,
        canonical_id: &c.canonical_id,
    })?;
    eprintln!("det      {}", c.det_text);
    eprintln!("(l, n)   ({}, {}), {:?}", c.l, c.n, obstruction);
    eprintln!("verdict  {:?}", c.verdict.kind);
    Ok(verdict_code(c.verdict.kind))
}

fn cmd_search(args: SearchArgs, workers: Option<usize>, budget: &Budget) -> Outcome {
    let mut cfg = SearchConfig::new(args.l, args.n);
    cfg.mode = match args.mode {
        Mode::Exhaustive => SearchMode::Exhaustive,
        Mode::Randomized => SearchMode::Randomized { samples: args.samples },
    };
    cfg.budget = *budget;
    cfg.force = args.force;
    cfg.prune_symmetry = !args.no_prune;
    cfg.seed = args.seed;
    cfg.workers = workers;
    cfg.max_prefixes = args.max_prefixes;
    cfg.checkpoint = args.checkpoint;
    cfg.resume = args.resume;
    let outcome = match search(&cfg) {
        Ok(o) => o,
        Err(e @ goodpair::Error::Precondition(_)) => {
            return Err(Failure { code: EXIT_USAGE, error: e.into() });
        }
        Err(e) => return Err(e.into()),
    };
    if let Some(dir) = &args.out {
        fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
        write(&dir.join("candidates.json"), &json(&outcome.candidates)?)?;
        write(&dir.join("summary.json"), &json(&outcome.summary)?)?;
        if !outcome.unknowns.is_empty() {
            write(&dir.join("unknowns.json"), &json(&outcome.unknowns)?)?;
        }
    }
    emit(&outcome.summary)?;
    let s = &outcome.summary;
    eprintln!("scanned       {}", s.stats.scanned);
    eprintln!("refuted       {}", s.stats.refuted());
    eprintln!("pruned        {} matrices, {} prefixes", s.stats.symmetry_pruned, s.stats.prefixes_pruned);
    eprintln!("unknown       {}", s.stats.unknown);
    eprintln!("accepted      {}", s.accepted);
    eprintln!("exhaustive    {}", s.exhaustive);
    for c in &outcome.candidates {
        eprintln!("  {}  {}", c.canonical_id, c.det_text);
    }
    Ok(if s.accepted > 0 {
        0
    } else if s.exhaustive && s.stats.unknown == 0 {
        EXIT_NEGATIVE
    } else {
        EXIT_UNKNOWN
    })
}

fn cmd_construct(path: &Path, forms: Option<&str>, label: Option<String>, out: Option<&Path>) -> Outcome {
    let m = SymbolicMatrix::from_json_str(&read(path)?).with_context(|| format!("invalid matrix in {}", path.display()))?;
    let forms = match forms {
        Some(text) => text
            .split(';')
            .map(|f| LinearForm::parse(f.trim(), m.l()))
            .collect::<goodpair::Result<Vec<_>>>()?,
        None => canonical_basis(m.l()),
    };
    let sys = build_quadratic_system(&m, &forms)?;
    let label = label.unwrap_or_else(|| {
        path.file_stem().map_or_else(|| "manifold".into(), |s| s.to_string_lossy().into_owned())
    });
    let spec = ManifoldSpec::new(sys, label);
    let text = json(&spec.to_json())?;
    match out {
        Some(p) => write(p, &text)?,
        None => println!("{text}"),
    }
    eprint!("{}", spec.system);
    Ok(0)
}

#[derive(Serialize)]
struct Check2Report<'a> {
    label: &'a str,
    l: usize,
    n: usize,
    det: String,
    kind: Kind,
    verdict: &'a Verdict,
}

fn cmd_check2(path: &Path, budget: &Budget) -> Outcome {
    let spec = ManifoldSpec::from_json_str(&read(path)?).with_context(|| format!("invalid manifold in {}", path.display()))?;
    let verdict = check_condition_ii(&spec.system, budget)?;
    let det = goodpair::manifolds::lambda_det(&spec.system).display_with("s").to_string();
    emit(&Check2Report { label: &spec.label, l: spec.l, n: spec.n, det: det.clone(), kind: verdict.kind, verdict: &verdict })?;
    eprintln!("det Λ(s)  {det}");
    eprintln!("(II)      {:?}", verdict.kind);
    Ok(verdict_code(verdict.kind))
}

#[derive(Serialize)]
struct Shell {
    q: u64,
    term: f64,
    partial_sum: f64,
}

#[derive(Serialize)]
struct AnalyzeReport {
    n: usize,
    l: usize,
    tau: String,
    s: String,
    s_star: String,
    shell_exponent: String,
    classification: goodpair::gbsp::SeriesClass,
    exact: bool,
    shells: Vec<Shell>,
}

fn cmd_analyze(n: usize, l: usize, tau: &str, s: &str, q_max: u64) -> Outcome {
    let tau = parse_rational(tau)?;
    let s = parse_rational(s)?;
    let data = PowerLawData::new(n, l, tau.clone(), s.clone())?;
    let oracle = series_oracle(&data, q_max, DEFAULT_MAX_SHELLS)?;
    let classification = classify_series(&data);
    let report = AnalyzeReport {
        n,
        l,
        tau: format_rational(&tau),
        s: format_rational(&s),
        s_star: format_rational(&critical_exponent(n, l, &tau)?),
        shell_exponent: format_rational(&data.shell_exponent()),
        classification,
        exact: oracle.exact,
        shells: oracle
            .shell_terms
            .iter()
            .zip(&oracle.partial_sums)
            .enumerate()
            .map(|(i, (&term, &partial_sum))| Shell { q: i as u64 + 1, term, partial_sum })
            .collect(),
    };
    emit(&report)?;
    eprintln!("s*             {}", report.s_star);
    eprintln!("classification {:?}", classification);
    eprintln!("T({q_max})        {:e}", oracle.partial_sums.last().copied().unwrap_or(0.0));
    Ok(0)
}

fn ladder(text: &str) -> anyhow::Result<Vec<Rational>> {
    let Some((a, b)) = text.split_once(':') else {
        bail!("--delta-ladder expects a:b, got {text:?}");
    };
    let (a, b): (u32, u32) = (a.trim().parse()?, b.trim().parse()?);
    if a > b || b > 24 {
        bail!("--delta-ladder needs a <= b <= 24, got {a}:{b}");
    }
    Ok((a..=b).map(|k| Rational::new(1.into(), (1u64 << k).into())).collect())
}

fn cmd_cover(args: CoverArgs) -> Outcome {
    let spec = ManifoldSpec::from_json_str(&read(&args.manifold)?)
        .with_context(|| format!("invalid manifold in {}", args.manifold.display()))?;
    let dim = spec.n - spec.l;
    let r = args.r.as_deref().map_or_else(|| Ok(unit(dim)), rationals)?;
    let s = args.s.as_deref().map_or_else(|| Ok(unit(spec.l)), rationals)?;
    let center = args.center.as_deref().map_or_else(|| Ok(vec![Rational::from_integer(0.into()); dim]), rationals)?;
    let phi = probe_phi(&spec, &r, &s, &parse_rational(&args.a)?)?;
    let mut probe = CoverProbe::new(phi, center, parse_rational(&args.alpha)?);
    probe.c = parse_rational(&args.c)?;
    probe.strict = args.strict;
    let report = match covering_count(&probe, &ladder(&args.delta_ladder)?) {
        Ok(r) => r,
        Err(e @ goodpair::Error::Precondition(_)) => return Err(Failure { code: EXIT_USAGE, error: e.into() }),
        Err(e) => return Err(e.into()),
    };
    emit(&report)?;
    eprintln!("{:>12}  {:>10}  {:>12}", "delta", "alpha/delta", "count");
    for l in &report.levels {
        eprintln!("{:>12}  {:>10}  {:>12}", format_rational(&l.delta), l.ratio, l.count);
    }
    eprintln!("slope {:.4} (expected {})", report.slope, report.expected_slope);
    if !report.precondition.holds {
        eprintln!("warning: {} does not hold", report.precondition.statement);
    }
    Ok(0)
}

fn cmd_catalog(budget: &Budget) -> Outcome {
    let entries = example_catalog()
        .iter()
        .map(|spec| catalog_entry(spec, budget))
        .collect::<goodpair::Result<Vec<_>>>()?;
    emit(&entries)?;
    eprintln!("{:<20} {:>3} {:>3}  {:<18} condition (II)", "label", "l", "n", "condition (I)");
    for e in &entries {
        eprintln!("{:<20} {:>3} {:>3}  {:<18} {:?}", e.label, e.l, e.n, e.condition_i, e.condition_ii.kind);
    }
    Ok(0)
}
