use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use orif_core::access_paths::IndexKind;
use orif_core::bench::{
    bench_build, bench_expand, bench_query, df_band, gen_corpus, random_queries, write_csv,
    GenSpec, QueryBenchConfig,
};
use orif_core::engine::{
    bulk_build, compute_postings, evaluate, expand_query, BuildConfig, Corpus, QueryOptions,
    DEFAULT_CHUNK_SIZE,
};
use orif_core::par::Execution;
use orif_core::persist;
use orif_core::representations::{IndexPlan, RepKind};
use orif_core::size_model::{
    compare, estimate_cor, estimate_hor, estimate_orif, estimate_pr, ratio_ceiling, CorpusStats,
};
use orif_core::storage::{CostModel, PostingEncoding};
use serde::Serialize;

#[derive(Parser)]
#[command(
    name = "orif",
    version,
    about = "Relational and object-relational inverted files"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic corpus (one `url<TAB>text` line per document).
    Gen(GenArgs),
    /// Build indexes from a corpus and save each under `<out>/<rep>`.
    Build(BuildArgs),
    /// Rank documents of a saved index against a query.
    Query(QueryArgs),
    /// Suggest expansion terms for a query.
    Expand(ExpandArgs),
    /// Report table and access-path sizes and build times as CSV.
    BenchBuild(BenchBuildArgs),
    /// Report elementary-query times for high-df queries as CSV.
    BenchQuery(BenchQueryArgs),
    /// Report query-expansion times as CSV.
    BenchExpand(BenchExpandArgs),
    /// Evaluate the analytic size model.
    Estimate(EstimateArgs),
}

#[derive(Args, Clone)]
struct CostArgs {
    #[arg(long, default_value_t = 8192)]
    page_size: u32,
    #[arg(long, default_value_t = 40)]
    tuple_overhead: u32,
    #[arg(long, default_value_t = 4)]
    field_bytes: u32,
    #[arg(long, default_value = "pair8", value_parser = ["pair8", "point16"])]
    posting_elem: String,
}

impl CostArgs {
    fn model(&self) -> Result<CostModel> {
        let cost = CostModel {
            tuple_overhead_bytes: self.tuple_overhead,
            field_bytes: self.field_bytes,
            page_bytes: self.page_size,
            ..CostModel::default()
        }
        .with_encoding(self.posting_elem.parse::<PostingEncoding>()?);
        cost.validate()?;
        Ok(cost)
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum IndexArg {
    Btree,
    Hash,
    None,
}

impl IndexArg {
    fn kind(self) -> Option<IndexKind> {
        match self {
            IndexArg::Btree => Some(IndexKind::Btree),
            IndexArg::Hash => Some(IndexKind::Hash),
            IndexArg::None => None,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OnOff {
    On,
    Off,
}

#[derive(Args, Clone)]
struct PlanArgs {
    /// Representation; repeat for several. Defaults to all four.
    #[arg(long = "rep", value_parser = parse_rep)]
    reps: Vec<RepKind>,
    /// Primary access path on the key attributes; repeat to compare several.
    #[arg(long = "index", value_enum)]
    indexes: Vec<IndexArg>,
    /// Key-inverted index over the HOR posting maps.
    #[arg(long, value_enum, default_value = "off")]
    hor_key_index: OnOff,
    /// Extra index on the PR occurrence doc_id.
    #[arg(long)]
    pr_doc_index: bool,
    /// Run the per-document build phases sequentially.
    #[arg(long)]
    sequential: bool,
    #[command(flatten)]
    cost: CostArgs,
}

impl PlanArgs {
    fn reps(&self) -> Vec<RepKind> {
        if self.reps.is_empty() {
            RepKind::ALL.to_vec()
        } else {
            self.reps.clone()
        }
    }

    fn configs(&self) -> Result<Vec<BuildConfig>> {
        let cost = self.cost.model()?;
        let exec = if self.sequential {
            Execution::Sequential
        } else {
            Execution::default()
        };
        let indexes = if self.indexes.is_empty() {
            vec![IndexArg::Btree]
        } else {
            self.indexes.clone()
        };
        Ok(indexes
            .into_iter()
            .map(|i| BuildConfig {
                cost,
                plan: IndexPlan {
                    primary: i.kind(),
                    pr_doc_id: self.pr_doc_index,
                    hor_key_index: self.hor_key_index == OnOff::On,
                },
                exec,
            })
            .collect())
    }

    fn config(&self) -> Result<BuildConfig> {
        let configs = self.configs()?;
        if configs.len() > 1 {
            bail!("--index may be given only once for this command");
        }
        Ok(configs[0])
    }
}

fn parse_rep(s: &str) -> std::result::Result<RepKind, String> {
    s.parse().map_err(|e: orif_core::Error| e.to_string())
}

#[derive(Args)]
struct GenArgs {
    #[arg(long, default_value_t = 1000)]
    docs: usize,
    #[arg(long, default_value_t = 10_000)]
    vocab: usize,
    /// Target mean tokens per document.
    #[arg(long, default_value_t = 100)]
    avg_words: usize,
    #[arg(long, default_value_t = 1.0)]
    zipf_s: f64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Corpus file; standard output if omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BuildArgs {
    #[arg(long)]
    corpus: PathBuf,
    #[command(flatten)]
    plan: PlanArgs,
    /// Output directory; each representation goes into a subdirectory.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct QueryArgs {
    /// Saved index directory.
    #[arg(long)]
    dir: PathBuf,
    query: String,
    #[arg(short, long, default_value_t = 10)]
    k: usize,
    #[arg(long, default_value_t = DEFAULT_CHUNK_SIZE)]
    chunk_size: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ExpandArgs {
    #[arg(long)]
    dir: PathBuf,
    query: String,
    #[arg(long, default_value_t = 5)]
    n_docs: usize,
    #[arg(long, default_value_t = 5)]
    n_terms: usize,
}

#[derive(Args)]
struct BenchBuildArgs {
    #[arg(long)]
    corpus: PathBuf,
    #[command(flatten)]
    plan: PlanArgs,
    /// Table rows; standard output if omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Access-path rows.
    #[arg(long)]
    index_out: Option<PathBuf>,
}

#[derive(Args)]
struct BenchQueryArgs {
    #[arg(long)]
    corpus: PathBuf,
    #[command(flatten)]
    plan: PlanArgs,
    /// Query lengths to measure.
    #[arg(long, value_delimiter = ',', default_value = "1,2,3,4")]
    terms: Vec<usize>,
    #[arg(long, default_value_t = 10)]
    repetitions: usize,
    #[arg(long, default_value_t = 0.3)]
    df_fraction: f64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value_t = DEFAULT_CHUNK_SIZE)]
    chunk_size: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BenchExpandArgs {
    #[arg(long)]
    corpus: PathBuf,
    #[command(flatten)]
    plan: PlanArgs,
    /// Query text; repeat for several. Without any, random queries are drawn.
    #[arg(long = "query")]
    queries: Vec<String>,
    /// Number of random queries when none are given.
    #[arg(long, default_value_t = 5)]
    count: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value_t = 5)]
    n_docs: usize,
    #[arg(long, default_value_t = 5)]
    n_terms: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct EstimateArgs {
    /// Measure N, D, N_d, W and the average text lengths from a corpus.
    #[arg(long, conflicts_with_all = ["n", "d", "n_d", "w"])]
    corpus: Option<PathBuf>,
    #[arg(long, requires_all = ["d", "n_d", "w"])]
    n: Option<u64>,
    #[arg(long)]
    d: Option<u64>,
    #[arg(long)]
    n_d: Option<u64>,
    #[arg(long)]
    w: Option<u64>,
    #[arg(long)]
    avg_name_len: Option<f64>,
    #[arg(long)]
    avg_docid_len: Option<f64>,
    #[arg(long)]
    avg_tf_len: Option<f64>,
    #[command(flatten)]
    cost: CostArgs,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).with_context(|| format!("cannot create {}", p.display()))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn load_corpus(path: &Path) -> Result<Corpus> {
    Corpus::load(path).with_context(|| format!("cannot read corpus {}", path.display()))
}

fn build_all(
    corpus: &Corpus,
    plan: &PlanArgs,
) -> Result<Vec<orif_core::representations::SearchIndex>> {
    let mut out = Vec::new();
    for config in plan.configs()? {
        for kind in plan.reps() {
            out.push(bulk_build(corpus, kind, &config)?);
        }
    }
    Ok(out)
}

fn gen(args: GenArgs) -> Result<()> {
    let corpus = gen_corpus(&GenSpec {
        docs: args.docs,
        vocab: args.vocab,
        avg_words: args.avg_words,
        zipf_s: args.zipf_s,
        seed: args.seed,
    })?;
    let mut out = output(args.out.as_deref())?;
    corpus.write(&mut out)?;
    out.flush()?;
    Ok(())
}

fn build(args: BuildArgs) -> Result<()> {
    let corpus = load_corpus(&args.corpus)?;
    let config = args.plan.config()?;
    for kind in args.plan.reps() {
        let index = bulk_build(&corpus, kind, &config)?;
        let dir = args.out.join(kind.as_str());
        persist::save(&index, &dir).with_context(|| format!("cannot save {}", dir.display()))?;
        let t = index.timings();
        eprintln!(
            "{kind}: {} documents, copy {:.1} ms, norms {:.1} ms, indexes {:.1} ms -> {}",
            index.stats().d,
            t.copy_millis(),
            t.norms_millis,
            t.index_millis,
            dir.display()
        );
    }
    Ok(())
}

fn load_index(dir: &Path) -> Result<orif_core::representations::SearchIndex> {
    persist::load(dir).with_context(|| format!("cannot load index {}", dir.display()))
}

#[derive(Serialize)]
struct ResultRow<'a> {
    position: usize,
    doc_id: u32,
    url: &'a str,
    score: String,
    rank: f64,
}

fn query(args: QueryArgs) -> Result<()> {
    let index = load_index(&args.dir)?;
    let outcome = evaluate(
        &index,
        &args.query,
        QueryOptions {
            k: args.k,
            chunk_size: args.chunk_size,
        },
    )?;
    let urls = index.documents()?;
    let rows: Vec<ResultRow> = outcome
        .results
        .iter()
        .enumerate()
        .map(|(i, r)| ResultRow {
            position: i + 1,
            doc_id: r.doc_id,
            url: &urls[r.doc_id as usize - 1].1,
            score: format!("{:.6}", r.score),
            rank: r.rank,
        })
        .collect();
    write_csv(output(args.out.as_deref())?, &rows)?;
    Ok(())
}

fn expand(args: ExpandArgs) -> Result<()> {
    let index = load_index(&args.dir)?;
    let mut out = io::stdout().lock();
    for term in expand_query(&index, &args.query, args.n_docs, args.n_terms)? {
        writeln!(out, "{term}")?;
    }
    Ok(())
}

fn bench_build_cmd(args: BenchBuildArgs) -> Result<()> {
    let corpus = load_corpus(&args.corpus)?;
    let report = bench_build(&corpus, &args.plan.reps(), &args.plan.configs()?)?;
    write_csv(output(args.out.as_deref())?, &report.tables)?;
    if let Some(p) = &args.index_out {
        write_csv(output(Some(p))?, &report.indexes)?;
    }
    Ok(())
}

fn bench_query_cmd(args: BenchQueryArgs) -> Result<()> {
    let corpus = load_corpus(&args.corpus)?;
    let indexes = build_all(&corpus, &args.plan)?;
    let report = bench_query(
        &indexes,
        &QueryBenchConfig {
            term_counts: args.terms,
            df_fraction: args.df_fraction,
            repetitions: args.repetitions,
            seed: args.seed,
            chunk_size: args.chunk_size,
        },
    )?;
    eprintln!(
        "terms drawn from df {}..={}{}",
        report.df_band.0,
        report.df_band.1,
        if report.widened {
            " (band widened)"
        } else {
            ""
        }
    );
    write_csv(output(args.out.as_deref())?, &report.rows)?;
    Ok(())
}

fn bench_expand_cmd(args: BenchExpandArgs) -> Result<()> {
    let corpus = load_corpus(&args.corpus)?;
    let indexes = build_all(&corpus, &args.plan)?;
    let queries = if args.queries.is_empty() {
        let Some(first) = indexes.first() else {
            return Ok(());
        };
        let lists = first.scan_relation()?;
        let dfs: Vec<(String, u32)> = lists.terms.into_iter().zip(lists.dfs).collect();
        let (_, _, pool) = df_band(&dfs, first.stats().d, 0.3, 1)?;
        random_queries(&pool, args.count, 2, args.seed)
    } else {
        args.queries
    };
    let rows = bench_expand(&indexes, &queries, args.n_docs, args.n_terms)?;
    write_csv(output(args.out.as_deref())?, &rows)?;
    Ok(())
}

#[derive(Serialize)]
struct EstimateRow {
    model: &'static str,
    bytes: String,
}

fn estimate(args: EstimateArgs) -> Result<()> {
    let cost = args.cost.model()?;
    let (stats, measured) = match &args.corpus {
        Some(path) => {
            let corpus = load_corpus(path)?;
            let (lists, stats) = compute_postings(&corpus, Execution::default());
            let w = stats.w.max(1) as f64;
            let n_d = stats.n_d.max(1) as f64;
            let name: usize = lists.terms.iter().map(String::len).sum();
            let (mut docid, mut tf) = (0usize, 0usize);
            for e in lists.postings.iter().flatten() {
                docid += e.doc_id.to_string().len();
                tf += e.tf.to_string().len();
            }
            (
                stats,
                Some((name as f64 / w, docid as f64 / n_d, tf as f64 / n_d)),
            )
        }
        None => match (args.n, args.d, args.n_d, args.w) {
            (Some(n), Some(d), Some(n_d), Some(w)) => (CorpusStats::new(n, d, n_d, w), None),
            _ => bail!("give either --corpus or all of --n, --d, --n-d, --w"),
        },
    };
    stats.validate()?;
    let name_len = args.avg_name_len.or(measured.map(|m| m.0));
    let docid_len = args.avg_docid_len.or(measured.map(|m| m.1));
    let tf_len = args.avg_tf_len.or(measured.map(|m| m.2));

    let cmp = compare(&stats, &cost);
    let mut rows = vec![
        EstimateRow {
            model: "pr",
            bytes: estimate_pr(&stats, &cost, false).to_string(),
        },
        EstimateRow {
            model: "pr_with_positions",
            bytes: estimate_pr(&stats, &cost, true).to_string(),
        },
        EstimateRow {
            model: "orif",
            bytes: estimate_orif(&stats, &cost, false).to_string(),
        },
        EstimateRow {
            model: "orif_with_positions",
            bytes: estimate_orif(&stats, &cost, true).to_string(),
        },
    ];
    if let Some(name) = name_len {
        rows.push(EstimateRow {
            model: "cor",
            bytes: format!("{:.0}", estimate_cor(&stats, &cost, name)?),
        });
        if let (Some(docid), Some(tf)) = (docid_len, tf_len) {
            rows.push(EstimateRow {
                model: "hor",
                bytes: format!("{:.0}", estimate_hor(&stats, &cost, name, docid, tf)?),
            });
        }
    }
    write_csv(output(args.out.as_deref())?, &rows)?;
    eprintln!(
        "N={} D={} N_d={} W={}; smaller: {:?}; PR/ORIF ratio {:.3} (ceiling {:.3})",
        stats.n,
        stats.d,
        stats.n_d,
        stats.w,
        cmp.smaller,
        cmp.pr_bytes as f64 / cmp.orif_bytes.max(1) as f64,
        ratio_ceiling(&cost)
    );
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Gen(a) => gen(a),
        Command::Build(a) => build(a),
        Command::Query(a) => query(a),
        Command::Expand(a) => expand(a),
        Command::BenchBuild(a) => bench_build_cmd(a),
        Command::BenchQuery(a) => bench_query_cmd(a),
        Command::BenchExpand(a) => bench_expand_cmd(a),
        Command::Estimate(a) => estimate(a),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
