//! Synthetic corpora and the build, query and expansion benchmarks.
//!
//! Every report serializes to CSV. Non-time columns depend only on the
//! inputs and the seed; times are wall-clock milliseconds with three decimals.

use std::io::Write;
use std::time::Instant;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson, Zipf};
use serde::{Serialize, Serializer};

use crate::engine::{
    bulk_build, evaluate, expand_query, BuildConfig, Corpus, Document, QueryOptions, RankedResult,
};
use crate::error::{Error, Result};
use crate::representations::{RepKind, SearchIndex};

/// Parameters of a synthetic corpus.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GenSpec {
    pub docs: usize,
    /// Vocabulary size; term ranks follow Zipf(`zipf_s`) over it.
    pub vocab: usize,
    /// Target mean tokens per document.
    pub avg_words: usize,
    pub zipf_s: f64,
    pub seed: u64,
}

impl Default for GenSpec {
    fn default() -> Self {
        GenSpec {
            docs: 1000,
            vocab: 10_000,
            avg_words: 100,
            zipf_s: 1.0,
            seed: 1,
        }
    }
}

impl GenSpec {
    pub fn validate(&self) -> Result<()> {
        if self.vocab == 0 || self.avg_words == 0 {
            return Err(Error::InvalidArgument(
                "vocab and avg_words must be at least 1".into(),
            ));
        }
        if !(self.zipf_s > 0.0 && self.zipf_s.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "zipf exponent must be positive, got {}",
                self.zipf_s
            )));
        }
        Ok(())
    }
}

const ONSETS: [&str; 20] = [
    "b", "c", "d", "f", "g", "h", "j", "k", "l", "m", "n", "p", "r", "s", "t", "v", "w", "x", "z",
    "q",
];
const VOWELS: [&str; 5] = ["a", "e", "i", "o", "u"];

/// Distinct pronounceable name for vocabulary rank `rank` (0-based):
/// bijective base-100 over consonant-vowel syllables.
pub fn synthetic_word(rank: usize) -> String {
    let base = ONSETS.len() * VOWELS.len();
    let mut n = rank + 1;
    let mut syllables = Vec::new();
    while n > 0 {
        let digit = (n - 1) % base;
        syllables.push((ONSETS[digit / VOWELS.len()], VOWELS[digit % VOWELS.len()]));
        n = (n - 1) / base;
    }
    syllables
        .iter()
        .rev()
        .map(|(c, v)| format!("{c}{v}"))
        .collect()
}

/// Document `i` has `1 + Poisson(avg_words - 1)` tokens, each a Zipf-ranked
/// vocabulary word. Deterministic in `spec`.
pub fn gen_corpus(spec: &GenSpec) -> Result<Corpus> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let zipf = Zipf::new(spec.vocab as f64, spec.zipf_s)
        .map_err(|e| Error::InvalidArgument(format!("zipf: {e}")))?;
    let extra = if spec.avg_words > 1 {
        Some(
            Poisson::new((spec.avg_words - 1) as f64)
                .map_err(|e| Error::InvalidArgument(format!("poisson: {e}")))?,
        )
    } else {
        None
    };
    let words: Vec<String> = (0..spec.vocab).map(synthetic_word).collect();
    let mut docs = Vec::with_capacity(spec.docs);
    for i in 0..spec.docs {
        let len = 1 + extra.map_or(0, |p| p.sample(&mut rng) as usize);
        let mut text = String::with_capacity(len * 6);
        for j in 0..len {
            if j > 0 {
                text.push(' ');
            }
            let rank = zipf.sample(&mut rng) as usize;
            text.push_str(&words[rank.clamp(1, spec.vocab) - 1]);
        }
        docs.push(Document::new(
            format!("http://synthetic.example/doc/{}", i + 1),
            text,
        ));
    }
    Ok(Corpus::new(docs))
}

fn ms3<S: Serializer>(v: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&format!("{v:.3}"))
}

fn opt_ms3<S: Serializer>(v: &Option<f64>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match v {
        Some(v) => ms3(v, s),
        None => s.serialize_str(""),
    }
}

fn millis(start: Instant) -> f64 {
    start.elapsed().as_secs_f64() * 1e3
}

/// Size and load time of one table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TableRow {
    pub representation: String,
    pub index: String,
    pub table: String,
    pub tuples: u64,
    pub bytes: u64,
    pub pages: u64,
    #[serde(serialize_with = "ms3")]
    pub copy_millis: f64,
    /// Pages of every access path over this table.
    pub index_pages: u64,
    #[serde(serialize_with = "ms3")]
    pub index_build_millis: f64,
}

/// Size and build time of one access path.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IndexRow {
    pub representation: String,
    pub index: String,
    pub table: String,
    pub attribute: String,
    pub kind: String,
    pub pages: u64,
    #[serde(serialize_with = "ms3")]
    pub build_millis: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct BuildReport {
    pub tables: Vec<TableRow>,
    pub indexes: Vec<IndexRow>,
}

/// Table and access-path rows of one built index.
pub fn build_rows(index: &SearchIndex) -> BuildReport {
    let rep = index.kind().as_str().to_owned();
    let label = index.plan().label().to_owned();
    let t = index.timings();
    let mut report = BuildReport::default();
    for table in index.tables() {
        let st = table.stats();
        let (copy_millis, table_paths): (f64, Vec<_>) = (
            match table.name() {
                "document" => t.copy_document_millis,
                "word" => t.copy_word_millis,
                _ => t.copy_occurrence_millis,
            },
            index
                .access_paths()
                .filter(|p| p.spec().table == table.name())
                .collect(),
        );
        report.tables.push(TableRow {
            representation: rep.clone(),
            index: label.clone(),
            table: table.name().to_owned(),
            tuples: st.tuples,
            bytes: st.bytes,
            pages: st.pages,
            copy_millis,
            index_pages: table_paths.iter().map(|p| p.pages()).sum(),
            index_build_millis: table_paths.iter().map(|p| p.stats().build_millis).sum(),
        });
    }
    for p in index.access_paths() {
        let s = p.stats();
        report.indexes.push(IndexRow {
            representation: rep.clone(),
            index: label.clone(),
            table: s.table.clone(),
            attribute: s.attribute.clone(),
            kind: s.kind.as_str().to_owned(),
            pages: s.pages,
            build_millis: s.build_millis,
        });
    }
    report
}

/// Builds `corpus` once per (representation, config) pair and reports sizes
/// and times.
pub fn bench_build(
    corpus: &Corpus,
    kinds: &[RepKind],
    configs: &[BuildConfig],
) -> Result<BuildReport> {
    let mut report = BuildReport::default();
    for &config in configs {
        for &kind in kinds {
            let index = bulk_build(corpus, kind, &config)?;
            let rows = build_rows(&index);
            report.tables.extend(rows.tables);
            report.indexes.extend(rows.indexes);
        }
    }
    Ok(report)
}

#[derive(Debug, Clone, PartialEq)]
pub struct QueryBenchConfig {
    pub term_counts: Vec<usize>,
    /// Terms are drawn from those with `df ≈ df_fraction · D`.
    pub df_fraction: f64,
    pub repetitions: usize,
    pub seed: u64,
    pub chunk_size: usize,
}

impl Default for QueryBenchConfig {
    fn default() -> Self {
        QueryBenchConfig {
            term_counts: vec![1, 2, 3, 4],
            df_fraction: 0.3,
            repetitions: 10,
            seed: 1,
            chunk_size: crate::engine::DEFAULT_CHUNK_SIZE,
        }
    }
}

/// Mean elementary-query times for one (representation, term count) cell.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QueryRow {
    pub representation: String,
    pub index: String,
    pub terms: usize,
    #[serde(serialize_with = "opt_ms3")]
    pub q_word_ms: Option<f64>,
    #[serde(serialize_with = "ms3")]
    pub q_occ_ms: f64,
    #[serde(serialize_with = "ms3")]
    pub q_doc_ms: f64,
    #[serde(serialize_with = "ms3")]
    pub total_ms: f64,
    /// Mean number of ranked documents per query.
    pub mean_results: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct QueryReport {
    /// Inclusive df range the terms were drawn from.
    pub df_band: (u32, u32),
    /// Whether the ±20% band had to be widened.
    pub widened: bool,
    /// Query texts per term count, repetition-major.
    pub queries: Vec<(usize, Vec<String>)>,
    pub rows: Vec<QueryRow>,
}

/// Terms whose df lies within ±20% of `fraction · D`, widened in 20% steps
/// until at least `need` terms qualify.
pub fn df_band(
    dfs: &[(String, u32)],
    d: u64,
    fraction: f64,
    need: usize,
) -> Result<((u32, u32), bool, Vec<String>)> {
    if dfs.len() < need {
        return Err(Error::InvalidArgument(format!(
            "vocabulary has {} terms, queries need {need}",
            dfs.len()
        )));
    }
    let target = fraction * d as f64;
    let mut width = 0.2;
    loop {
        let lo = ((target * (1.0 - width)).ceil().max(1.0)) as u32;
        let hi = (target * (1.0 + width)).floor() as u32;
        let picked: Vec<String> = dfs
            .iter()
            .filter(|(_, df)| (lo..=hi).contains(df))
            .map(|(t, _)| t.clone())
            .collect();
        if picked.len() >= need || (lo <= 1 && hi as u64 >= d) {
            return Ok(((lo, hi), width > 0.2, picked));
        }
        width += 0.2;
    }
}

fn agree(
    kind: RepKind,
    reference: &[RankedResult],
    got: &[RankedResult],
    query: &str,
) -> Result<()> {
    if reference != got {
        return Err(Error::Disagreement(format!(
            "{kind} returned different results for query `{query}`"
        )));
    }
    Ok(())
}

/// Times the query pipeline on every index. All indexes must hold the same
/// corpus; their full result lists are cross-checked.
pub fn bench_query(indexes: &[SearchIndex], config: &QueryBenchConfig) -> Result<QueryReport> {
    let Some(first) = indexes.first() else {
        return Ok(QueryReport {
            df_band: (0, 0),
            widened: false,
            queries: Vec::new(),
            rows: Vec::new(),
        });
    };
    if config.repetitions == 0 || config.term_counts.contains(&0) {
        return Err(Error::InvalidArgument(
            "repetitions and term counts must be at least 1".into(),
        ));
    }
    let lists = first.scan_relation()?;
    let dfs: Vec<(String, u32)> = lists.terms.into_iter().zip(lists.dfs).collect();
    let d = first.stats().d;
    let need = config.term_counts.iter().copied().max().unwrap_or(1);
    let (band, widened, pool) = df_band(&dfs, d, config.df_fraction, need)?;
    if pool.len() < need {
        return Err(Error::InvalidArgument(format!(
            "only {} terms available, queries need {need}",
            pool.len()
        )));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let queries: Vec<(usize, Vec<String>)> = config
        .term_counts
        .iter()
        .map(|&c| {
            let qs = (0..config.repetitions)
                .map(|_| {
                    sample(&mut rng, pool.len(), c)
                        .into_iter()
                        .map(|i| pool[i].as_str())
                        .collect::<Vec<_>>()
                        .join(" ")
                })
                .collect();
            (c, qs)
        })
        .collect();

    let opts = QueryOptions {
        k: d.max(1) as usize,
        chunk_size: config.chunk_size,
    };
    let mut reference: Vec<Vec<Vec<RankedResult>>> = Vec::new();
    let mut rows = Vec::new();
    for (n, index) in indexes.iter().enumerate() {
        for (qi, (c, qs)) in queries.iter().enumerate() {
            let (mut q_word, mut q_occ, mut q_doc, mut total, mut results) =
                (0.0, 0.0, 0.0, 0.0, 0usize);
            let mut outs = Vec::with_capacity(qs.len());
            for q in qs {
                let out = evaluate(index, q, opts)?;
                q_word += out.timings.q_word.unwrap_or_default();
                q_occ += out.timings.q_occ;
                q_doc += out.timings.q_doc;
                total += out.timings.total;
                results += out.results.len();
                outs.push(out.results);
            }
            if n == 0 {
                reference.push(outs);
            } else {
                for ((q, want), got) in qs.iter().zip(&reference[qi]).zip(&outs) {
                    agree(index.kind(), want, got, q)?;
                }
            }
            let reps = qs.len() as f64;
            rows.push(QueryRow {
                representation: index.kind().as_str().to_owned(),
                index: index.plan().label().to_owned(),
                terms: *c,
                q_word_ms: index.kind().has_word_table().then_some(q_word / reps),
                q_occ_ms: q_occ / reps,
                q_doc_ms: q_doc / reps,
                total_ms: total / reps,
                mean_results: results as f64 / reps,
            });
        }
    }
    Ok(QueryReport {
        df_band: band,
        widened,
        queries,
        rows,
    })
}

/// Expansion wall time and output of one index.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExpandRow {
    pub representation: String,
    pub index: String,
    pub queries: usize,
    #[serde(serialize_with = "ms3")]
    pub total_millis: f64,
    /// Suggested terms, space-separated within a query, `;` between queries.
    pub expansions: String,
}

/// Runs `expand_query` for every query on every index and checks that all
/// indexes suggest the same terms.
pub fn bench_expand(
    indexes: &[SearchIndex],
    queries: &[String],
    n_docs: usize,
    n_terms: usize,
) -> Result<Vec<ExpandRow>> {
    if queries.is_empty() {
        return Ok(Vec::new());
    }
    let mut rows = Vec::new();
    let mut reference: Option<Vec<Vec<String>>> = None;
    for index in indexes {
        let start = Instant::now();
        let expansions = queries
            .iter()
            .map(|q| expand_query(index, q, n_docs, n_terms))
            .collect::<Result<Vec<_>>>()?;
        let total_millis = millis(start);
        match &reference {
            None => reference = Some(expansions.clone()),
            Some(want) if *want != expansions => {
                return Err(Error::Disagreement(format!(
                    "{} expanded queries differently",
                    index.kind()
                )));
            }
            Some(_) => {}
        }
        rows.push(ExpandRow {
            representation: index.kind().as_str().to_owned(),
            index: index_label(index),
            queries: queries.len(),
            total_millis,
            expansions: expansions
                .iter()
                .map(|e| e.join(" "))
                .collect::<Vec<_>>()
                .join(";"),
        });
    }
    Ok(rows)
}

/// Plan label including the document-access extras.
pub fn index_label(index: &SearchIndex) -> String {
    let plan = index.plan();
    let mut label = plan.label().to_owned();
    if plan.pr_doc_id && index.kind() == RepKind::Pr {
        label.push_str("+doc_id");
    }
    if plan.hor_key_index && index.kind() == RepKind::Hor {
        label.push_str("+key_inverted");
    }
    label
}

/// Draws `count` queries of `terms` words each, uniformly from `pool`.
pub fn random_queries(pool: &[String], count: usize, terms: usize, seed: u64) -> Vec<String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let n = terms.min(pool.len());
            let n = if n > 1 { rng.random_range(1..=n) } else { n };
            sample(&mut rng, pool.len(), n)
                .into_iter()
                .map(|i| pool[i].as_str())
                .collect::<Vec<_>>()
                .join(" ")
        })
        .collect()
}

/// Writes `rows` as CSV with a header line.
pub fn write_csv<W: Write, T: Serialize>(out: W, rows: &[T]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}
