//! `psdrank` command-line front end.

use std::fs;
use std::io::{self, BufWriter, Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand};
use psdrank::cutpoly::{
    appendix_reduction_check, cliques, cuts, graph_h, slack_rows, DEFAULT_APPENDIX_CAP, DEFAULT_SUBSET_CAP,
};
use psdrank::embed::{
    embedding_from_psd, embedding_from_rank_factorization, embrkl_bounds, psd_from_embedding, verify_embedding,
};
use psdrank::exact::QMatrix;
use psdrank::io::{self as pio, SCHEMA};
use psdrank::pattern::{
    boolean_rank, feasible_biclique_cover, support, triangular_rank, BicliqueCover, CoverResult,
};
use psdrank::psd::{
    generate_sn, min_sqrt_rank, order3_exclusion, realize_support, reduce_factor_ranks, verify_psd_factorization,
    ReduceOptions, SqrtOptions,
};
use psdrank::Error;
use serde_json::{json, Value};

const DEFAULT_BUDGET: u64 = 1_000_000;

/// Exact bounds on psd rank and related combinatorial ranks.
#[derive(Parser)]
#[command(name = "psdrank", version, about)]
struct Cli {
    /// Machine-readable JSON output
    #[arg(long, global = true)]
    json: bool,
    /// Worker threads for parallel enumerations (default: all cores)
    #[arg(long, global = true, env = "PSDRANK_THREADS")]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

/// Input file; `-` or nothing reads standard input.
#[derive(Args)]
struct Input {
    input: Option<PathBuf>,
}

impl Input {
    fn name(&self) -> String {
        match &self.input {
            Some(p) if p.as_os_str() != "-" => p.display().to_string(),
            _ => "stdin".into(),
        }
    }

    fn read(&self) -> anyhow::Result<String> {
        match &self.input {
            Some(p) if p.as_os_str() != "-" => {
                fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))
            }
            _ => {
                let mut s = String::new();
                io::stdin().read_to_string(&mut s).context("reading standard input")?;
                Ok(s)
            }
        }
    }

    fn matrix(&self) -> anyhow::Result<QMatrix> {
        Ok(pio::parse_matrix(&self.read()?)?)
    }

    fn document(&self) -> anyhow::Result<Value> {
        serde_json::from_str(&self.read()?).map_err(|e| Error::from(e).into())
    }
}

#[derive(Subcommand)]
enum Command {
    /// Exact rank of a rational matrix
    Rank(Input),
    /// Triangular rank of the support
    Trirank(Input),
    /// Boolean rank (biclique cover number) of the support
    Boolrank {
        #[command(flatten)]
        input: Input,
        /// Node budget for the branch and bound
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u64,
    },
    /// Every available bound on one matrix, with provenance
    Bounds {
        #[command(flatten)]
        input: Input,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u64,
    },
    /// Build a subspace embedding
    #[command(subcommand)]
    Embed(EmbedCommand),
    /// Build a psd factorization
    #[command(subcommand)]
    Psd(PsdCommand),
    /// Check a factorization or embedding
    #[command(subcommand)]
    Verify(VerifyCommand),
    /// Matrix of rank at most the factorization order with the same support
    RealizeSupport {
        #[command(flatten)]
        input: Input,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 10)]
        tries: usize,
    },
    /// Minimum rank of an entrywise square root of a submatrix
    SqrtBound {
        #[command(flatten)]
        input: Input,
        /// 1-based row indices, comma separated
        #[arg(long, value_delimiter = ',', required = true)]
        rows: Vec<usize>,
        /// 1-based column indices, comma separated
        #[arg(long, value_delimiter = ',', required = true)]
        cols: Vec<usize>,
        #[command(flatten)]
        signs: SignArgs,
    },
    /// Certificate that no psd factorization of order 3 exists
    Order3Exclude {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        signs: SignArgs,
    },
    /// Lower the ranks of the factors of a psd factorization
    ReduceRank {
        #[command(flatten)]
        input: Input,
        /// Relative eigenvalue threshold for numerical rank
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        /// Largest accepted constraint residual
        #[arg(long, default_value_t = 1e-6)]
        residual_tol: f64,
    },
    /// Generate test matrices and graphs
    #[command(subcommand)]
    Gen(GenCommand),
    /// Exhaustive check of the reduction from cut/clique pairs to disjointness
    AppendixCheck {
        n: usize,
        #[arg(long, default_value_t = DEFAULT_APPENDIX_CAP)]
        cap: usize,
    },
    /// Fewest bicliques covering one graph while avoiding another
    FeasibleCover {
        ones: PathBuf,
        forbidden: PathBuf,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u64,
    },
}

#[derive(Args)]
struct SignArgs {
    /// Enumerate both global signs instead of fixing the first entry positive
    #[arg(long)]
    no_sign_fix: bool,
    /// Largest number of free signs
    #[arg(long, default_value_t = SqrtOptions::default().cap)]
    cap: usize,
}

impl SignArgs {
    fn options(&self) -> SqrtOptions {
        SqrtOptions {
            fix_global_sign: !self.no_sign_fix,
            cap: self.cap,
        }
    }
}

#[derive(Subcommand)]
enum EmbedCommand {
    /// Embedding of dimension rank(S) from a matrix
    FromRank(Input),
    /// Embedding from a psd factorization document
    FromPsd(Input),
}

#[derive(Subcommand)]
enum PsdCommand {
    /// Projection factorization from an embedding document
    FromEmbedding(Input),
}

#[derive(Subcommand)]
enum VerifyCommand {
    /// Psd factors and `tr(A_k B_l) = S(k, l)`
    Psd {
        #[command(flatten)]
        input: Input,
        /// Target matrix (defaults to the document's `target`)
        #[arg(long)]
        target: Option<PathBuf>,
    },
    /// `U_k ⊆ V_l` exactly at the zeros of a pattern
    Embedding {
        #[command(flatten)]
        input: Input,
        /// Pattern or matrix whose support is checked
        #[arg(long)]
        pattern: PathBuf,
    },
}

#[derive(Subcommand)]
enum GenCommand {
    /// The matrix with entries (i-j-1)(i-j-2)/2
    Sn { n: usize },
    /// Clique-inequality slack matrix of the cut polytope, streamed by rows
    Cutpoly { n: usize },
    /// Disjointness graph on l-subsets of {1..N}
    Disjointness {
        n: usize,
        l: usize,
        /// Emit the unique-intersection graph instead
        #[arg(long)]
        complement: bool,
        #[arg(long, default_value_t = DEFAULT_SUBSET_CAP)]
        cap: u64,
    },
}

/// Exit statuses.
const VERIFY_FAILED: u8 = 1;
const USAGE: u8 = 2;
const EXHAUSTED: u8 = 3;

fn status_of(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<Error>() {
        Some(Error::CapExceeded { .. } | Error::TriesExhausted(_)) => EXHAUSTED,
        Some(Error::NotPsd(_) | Error::Numerical(_)) => VERIFY_FAILED,
        _ => USAGE,
    }
}

struct Out {
    json: bool,
    w: BufWriter<io::StdoutLock<'static>>,
}

impl Out {
    fn line(&mut self, s: impl AsRef<str>) -> anyhow::Result<()> {
        writeln!(self.w, "{}", s.as_ref())?;
        Ok(())
    }

    fn doc(&mut self, v: &Value) -> anyhow::Result<()> {
        self.line(serde_json::to_string_pretty(v)?)
    }

    /// JSON document in JSON mode, plain text otherwise.
    fn either(&mut self, v: &Value, text: impl FnOnce() -> String) -> anyhow::Result<()> {
        if self.json {
            self.doc(v)
        } else {
            self.line(text())
        }
    }

    fn matrix(&mut self, m: &QMatrix) -> anyhow::Result<()> {
        if self.json {
            self.doc(&pio::matrix_to_json(m))
        } else {
            write!(self.w, "{}", pio::write_matrix(m))?;
            Ok(())
        }
    }
}

fn one_based(it: impl IntoIterator<Item = usize>) -> Vec<usize> {
    it.into_iter().map(|i| i + 1).collect()
}

fn zero_based(v: &[usize], what: &str) -> anyhow::Result<Vec<usize>> {
    v.iter()
        .map(|&i| i.checked_sub(1).ok_or_else(|| anyhow!(Error::Precondition(format!("{what} indices are 1-based")))))
        .collect()
}

fn cover_json(c: &BicliqueCover) -> Value {
    json!(c
        .bicliques
        .iter()
        .map(|b| json!({"rows": one_based(b.left_set.iter()), "cols": one_based(b.right_set.iter())}))
        .collect::<Vec<_>>())
}

fn cover_result_json(kind: &str, r: &CoverResult) -> Value {
    let mut v = json!({"schema": SCHEMA, "kind": kind});
    let obj = v.as_object_mut().expect("object literal");
    match r {
        CoverResult::Exact { value, nodes, .. } => {
            obj.insert("status".into(), json!("exact"));
            obj.insert("value".into(), json!(value));
            obj.insert("nodes".into(), json!(nodes));
        }
        CoverResult::Unknown { lower, upper, nodes, .. } => {
            obj.insert("status".into(), json!("budget_exhausted"));
            obj.insert("lower".into(), json!(lower));
            obj.insert("upper".into(), json!(upper));
            obj.insert("nodes".into(), json!(nodes));
        }
    }
    obj.insert("cover".into(), cover_json(r.cover()));
    v
}

fn cover_text(r: &CoverResult) -> String {
    match r.exact() {
        Some(v) => v.to_string(),
        None => {
            let (lo, hi) = r.bounds();
            format!("budget exhausted: between {lo} and {hi}")
        }
    }
}

fn cover_status(r: &CoverResult) -> u8 {
    if r.exact().is_some() {
        0
    } else {
        EXHAUSTED
    }
}

/// Every bound the library can produce for one matrix, each tagged with the
/// operation that produced it.
struct BoundReport {
    source: String,
    rank: usize,
    triangular_rank: usize,
    boolean_rank: CoverResult,
    certificate: Option<psdrank::psd::Order3Certificate>,
}

impl BoundReport {
    fn compute(source: String, s: &QMatrix, budget: u64) -> anyhow::Result<Self> {
        let p = support(s);
        let bounds = embrkl_bounds(s);
        let nonnegative = s.entries().iter().all(|x| *x >= psdrank::exact::Rational::from_integer(0.into()));
        let certificate = if nonnegative && bounds.upper >= 3 {
            Some(order3_exclusion(s, SqrtOptions::default())?)
        } else {
            None
        };
        Ok(Self {
            source,
            rank: bounds.upper,
            triangular_rank: bounds.lower,
            boolean_rank: boolean_rank(&p, budget),
            certificate,
        })
    }

    fn psd_lower(&self) -> (usize, &'static str) {
        match &self.certificate {
            Some(c) if c.proves_bound() && self.triangular_rank < 4 => (4, "order3_exclusion"),
            _ => (self.triangular_rank, "triangular_rank"),
        }
    }

    fn to_json(&self) -> Value {
        let (psd, psd_from) = self.psd_lower();
        let (blo, bhi) = self.boolean_rank.bounds();
        json!({
            "schema": SCHEMA,
            "kind": "bound_report",
            "matrix": self.source,
            "rank": {"value": self.rank, "from": "rank"},
            "triangular_rank": {"value": self.triangular_rank, "from": "triangular_rank"},
            "boolean_rank": {
                "exact": self.boolean_rank.exact(),
                "lower": blo,
                "upper": bhi,
                "from": "boolean_rank",
            },
            "embedding_dimension": {
                "lower": self.triangular_rank,
                "upper": self.rank,
                "from": "embrkl_bounds",
            },
            "psd_rank_lower": {"value": psd, "from": psd_from},
            "nonnegative_rank_lower": {"value": blo, "from": "boolean_rank"},
            "order3_certificate": self.certificate.as_ref().map(pio::certificate_to_json),
        })
    }

    fn to_text(&self) -> String {
        let (psd, psd_from) = self.psd_lower();
        let cert = match &self.certificate {
            Some(c) if c.proves_bound() => format!("proves psd rank >= 4 on window {}x{}", c.window.0, c.window.1),
            Some(_) => "inconclusive".into(),
            None => "not applicable".into(),
        };
        [
            format!("matrix:                 {}", self.source),
            format!("rank:                   {}  (rank)", self.rank),
            format!("triangular rank:        {}  (triangular_rank)", self.triangular_rank),
            format!("boolean rank:           {}  (boolean_rank)", cover_text(&self.boolean_rank)),
            format!("embedding dimension:    {} ..= {}  (embrkl_bounds)", self.triangular_rank, self.rank),
            format!("psd rank >=             {psd}  ({psd_from})"),
            format!("nonnegative rank >=     {}  (boolean_rank)", self.boolean_rank.bounds().0),
            format!("order-3 certificate:    {cert}"),
        ]
        .join("\n")
    }
}

fn run(cli: Cli, out: &mut Out) -> anyhow::Result<u8> {
    match cli.command {
        Command::Rank(input) => {
            let r = input.matrix()?.rank();
            out.either(&json!({"schema": SCHEMA, "kind": "rank", "rank": r}), || r.to_string())?;
        }
        Command::Trirank(input) => {
            let (t, w) = triangular_rank(&support(&input.matrix()?));
            let doc = json!({
                "schema": SCHEMA,
                "kind": "triangular_rank",
                "triangular_rank": t,
                "rows": one_based(w.rows.iter().copied()),
                "cols": one_based(w.cols.iter().copied()),
            });
            out.either(&doc, || t.to_string())?;
        }
        Command::Boolrank { input, budget } => {
            let r = boolean_rank(&support(&input.matrix()?), budget);
            out.either(&cover_result_json("boolean_rank", &r), || cover_text(&r))?;
            return Ok(cover_status(&r));
        }
        Command::Bounds { input, budget } => {
            let report = BoundReport::compute(input.name(), &input.matrix()?, budget)?;
            out.either(&report.to_json(), || report.to_text())?;
            return Ok(cover_status(&report.boolean_rank));
        }
        Command::Embed(EmbedCommand::FromRank(input)) => {
            out.doc(&pio::embedding_to_json(&embedding_from_rank_factorization(&input.matrix()?)))?;
        }
        Command::Embed(EmbedCommand::FromPsd(input)) => {
            let (f, _) = pio::factorization_from_json(&input.document()?)?;
            out.doc(&pio::embedding_to_json(&embedding_from_psd(&f)?))?;
        }
        Command::Psd(PsdCommand::FromEmbedding(input)) => {
            let e = pio::embedding_from_json(&input.document()?)?;
            let (f, t) = psd_from_embedding(&e);
            out.doc(&pio::factorization_to_json(&f, Some(&t)))?;
        }
        Command::Verify(VerifyCommand::Psd { input, target }) => {
            let (f, embedded) = pio::factorization_from_json(&input.document()?)?;
            let s = match target {
                Some(p) => Input { input: Some(p) }.matrix()?,
                None => embedded.ok_or_else(|| anyhow!(Error::Precondition("no target matrix given".into())))?,
            };
            let r = verify_psd_factorization(&f, &s)?;
            let doc = json!({
                "schema": SCHEMA,
                "kind": "psd_verification",
                "pass": r.pass,
                "not_psd": r.factors_psd.iter().filter(|(_, ok)| !ok).map(|(l, _)| l.clone()).collect::<Vec<_>>(),
                "mismatches": r.mismatches.iter().map(|&(k, l)| [k + 1, l + 1]).collect::<Vec<_>>(),
            });
            out.either(&doc, || {
                if r.pass {
                    "pass".into()
                } else {
                    format!("fail: {} non-psd factors, {} mismatched entries", doc["not_psd"].as_array().map_or(0, Vec::len), r.mismatches.len())
                }
            })?;
            return Ok(if r.pass { 0 } else { VERIFY_FAILED });
        }
        Command::Verify(VerifyCommand::Embedding { input, pattern }) => {
            let e = pio::embedding_from_json(&input.document()?)?;
            let p = support(&Input { input: Some(pattern) }.matrix()?);
            let pass = verify_embedding(&e, &p)?;
            let doc = json!({"schema": SCHEMA, "kind": "embedding_verification", "pass": pass});
            out.either(&doc, || if pass { "pass".into() } else { "fail".into() })?;
            return Ok(if pass { 0 } else { VERIFY_FAILED });
        }
        Command::RealizeSupport { input, seed, tries } => {
            let (f, _) = pio::factorization_from_json(&input.document()?)?;
            let r = realize_support(&f, seed, tries)?;
            if out.json {
                let mut doc = pio::matrix_to_json(&r.matrix);
                doc["tries"] = json!(r.tries);
                doc["seed"] = json!(seed);
                out.doc(&doc)?;
            } else {
                out.matrix(&r.matrix)?;
            }
        }
        Command::SqrtBound { input, rows, cols, signs } => {
            let s = input.matrix()?;
            let r = min_sqrt_rank(&s, &zero_based(&rows, "row")?, &zero_based(&cols, "column")?, signs.options())?;
            let mut doc = pio::sqrt_rank_to_json(&r);
            doc["schema"] = json!(SCHEMA);
            doc["kind"] = json!("sqrt_rank");
            out.either(&doc, || {
                format!(
                    "minimum square-root rank {} over {} sign assignments (witness signs {})",
                    r.min_rank,
                    r.assignments_checked,
                    r.witness.signs_string()
                )
            })?;
        }
        Command::Order3Exclude { input, signs } => {
            let c = order3_exclusion(&input.matrix()?, signs.options())?;
            out.either(&pio::certificate_to_json(&c), || match &c.enumeration {
                Some(e) if c.proves_bound() => format!(
                    "psd rank >= 4: rows {:?}, cols {:?}, every one of {} square roots has rank >= {}",
                    one_based(c.rows.iter().copied()),
                    one_based(c.cols.iter().copied()),
                    e.assignments_checked,
                    e.min_rank
                ),
                _ => "inconclusive".into(),
            })?;
        }
        Command::ReduceRank { input, tol, residual_tol } => {
            let f = pio::float_factorization_from_json(&input.document()?)?;
            let opts = ReduceOptions {
                eig_tol: tol,
                residual_tol,
                ..ReduceOptions::default()
            };
            let r = reduce_factor_ranks(&f.row_factors, &f.col_factors, &f.target, opts)?;
            let a: Vec<_> = r.row_factors.iter().map(|x| x.matrix()).collect();
            let b: Vec<_> = r.col_factors.iter().map(|x| x.matrix()).collect();
            let doc = json!({
                "schema": SCHEMA,
                "kind": "rank_reduction",
                "row_ranks_before": r.row_ranks_before,
                "row_ranks": r.row_ranks,
                "col_ranks_before": r.col_ranks_before,
                "col_ranks": r.col_ranks,
                "max_residual": r.max_residual,
                "min_eigenvalue": r.min_eigenvalue,
                "factorization": pio::float_factorization_to_json(&a, &b),
            });
            out.either(&doc, || {
                format!(
                    "row factor ranks {:?} -> {:?}\ncolumn factor ranks {:?} -> {:?}\nmax residual {:e}, min eigenvalue {:e}",
                    r.row_ranks_before, r.row_ranks, r.col_ranks_before, r.col_ranks, r.max_residual, r.min_eigenvalue
                )
            })?;
        }
        Command::Gen(GenCommand::Sn { n }) => out.matrix(&generate_sn(n)?)?,
        Command::Gen(GenCommand::Cutpoly { n }) => {
            let rows = slack_rows(n)?;
            if out.json {
                let entries: Vec<Vec<String>> = rows.map(|(_, r)| r.iter().map(i64::to_string).collect()).collect();
                out.doc(&json!({
                    "schema": SCHEMA,
                    "kind": "matrix",
                    "rows": entries.len(),
                    "cols": cuts(n).len(),
                    "entries": entries,
                }))?;
            } else {
                out.line(format!("{} {}", cliques(n).len(), cuts(n).len()))?;
                for (_, r) in rows {
                    out.line(r.iter().map(i64::to_string).collect::<Vec<_>>().join(" "))?;
                }
            }
        }
        Command::Gen(GenCommand::Disjointness { n, l, complement, cap }) => {
            let d = graph_h(n, l, cap)?;
            let g = if complement { &d.hbar } else { &d.h };
            if out.json {
                out.doc(&json!({
                    "schema": SCHEMA,
                    "kind": "graph",
                    "left": g.left_count(),
                    "right": g.right_count(),
                    "vertices": d.vertices.iter().map(|&m| psdrank::cutpoly::mask_vertices(m)).collect::<Vec<_>>(),
                    "edges": g.edges().map(|(u, v)| [u + 1, v + 1]).collect::<Vec<_>>(),
                }))?;
            } else {
                write!(out.w, "{}", pio::write_graph(g))?;
            }
        }
        Command::AppendixCheck { n, cap } => {
            let r = appendix_reduction_check(n, cap)?;
            let mut doc = serde_json::to_value(&r)?;
            doc["schema"] = json!(SCHEMA);
            doc["kind"] = json!("appendix_check");
            out.either(&doc, || {
                format!(
                    "n = {}, N = {}, l = {}: {} pairs checked, {}",
                    r.n,
                    r.big_n,
                    r.l,
                    r.pairs_checked,
                    if r.pass { "pass".to_string() } else { format!("{} failures", r.failures.len()) }
                )
            })?;
            return Ok(if r.pass { 0 } else { VERIFY_FAILED });
        }
        Command::FeasibleCover { ones, forbidden, budget } => {
            let g = pio::parse_graph(&Input { input: Some(ones) }.read()?)?;
            let h = pio::parse_graph(&Input { input: Some(forbidden) }.read()?)?;
            let r = feasible_biclique_cover(&g, &h, budget)?;
            out.either(&cover_result_json("feasible_cover", &r), || cover_text(&r))?;
            return Ok(cover_status(&r));
        }
    }
    Ok(0)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { USAGE } else { 0 });
        }
    };
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("psdrank: {e}");
            return ExitCode::from(USAGE);
        }
    }
    let mut out = Out {
        json: cli.json,
        w: BufWriter::new(io::stdout().lock()),
    };
    let result = run(cli, &mut out);
    let flushed = out.w.flush();
    match result {
        Ok(code) => {
            if let Err(e) = flushed {
                // a closed pipe downstream is not an error of ours
                if e.kind() != io::ErrorKind::BrokenPipe {
                    eprintln!("psdrank: {e}");
                    return ExitCode::from(USAGE);
                }
            }
            ExitCode::from(code)
        }
        Err(e) if e.downcast_ref::<io::Error>().is_some_and(|e| e.kind() == io::ErrorKind::BrokenPipe) => {
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("psdrank: {e:#}");
            ExitCode::from(status_of(&e))
        }
    }
}
