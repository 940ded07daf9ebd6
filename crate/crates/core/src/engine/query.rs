use std::collections::{BTreeMap, HashMap, HashSet};
use std::time::Instant;

use super::{idf, tokenize};
use crate::error::{Error, Result};
use crate::par::{self, Execution};
use crate::representations::{OccRow, SearchIndex, TermKey};

/// Default IN-list block size for `q_doc`.
pub const DEFAULT_CHUNK_SIZE: usize = 250_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RankedResult {
    pub doc_id: u32,
    /// Cosine similarity between document and query.
    pub score: f64,
    /// Stored rank, passed through untouched.
    pub rank: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QueryOptions {
    pub k: usize,
    pub chunk_size: usize,
}

impl Default for QueryOptions {
    fn default() -> Self {
        QueryOptions {
            k: 10,
            chunk_size: DEFAULT_CHUNK_SIZE,
        }
    }
}

/// Wall time of each elementary query, in milliseconds. `q_word` is `None`
/// for layouts that return df with the postings.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct QueryTimings {
    pub q_word: Option<f64>,
    pub q_occ: f64,
    pub q_doc: f64,
    /// Sum of the elementary queries; accumulation and ranking are excluded.
    pub total: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct QueryOutcome {
    pub results: Vec<RankedResult>,
    pub timings: QueryTimings,
    /// Documents that matched at least one weighted term, before top-k.
    pub matched: usize,
}

fn millis(start: Instant) -> f64 {
    start.elapsed().as_secs_f64() * 1e3
}

/// Query term counts, by term.
fn query_counts(text: &str) -> BTreeMap<String, u32> {
    let mut counts = BTreeMap::new();
    for t in tokenize(text) {
        *counts.entry(t).or_insert(0) += 1;
    }
    counts
}

/// Ranks documents against `text` with tf-idf cosine similarity.
///
/// Terms are accumulated in word-id order and postings in doc-id order, so
/// every representation produces bit-identical scores.
pub fn evaluate(index: &SearchIndex, text: &str, opts: QueryOptions) -> Result<QueryOutcome> {
    if opts.k == 0 {
        return Err(Error::InvalidArgument("k must be at least 1".into()));
    }
    if opts.chunk_size == 0 {
        return Err(Error::InvalidArgument(
            "chunk_size must be at least 1".into(),
        ));
    }
    let counts = query_counts(text);
    let mut timings = QueryTimings::default();
    let empty = |timings| QueryOutcome {
        results: Vec::new(),
        timings,
        matched: 0,
    };
    if counts.is_empty() {
        return Ok(empty(timings));
    }

    // (query tf, df, postings) per known term, in word order.
    let terms: Vec<&str> = counts.keys().map(String::as_str).collect();
    let rows: Vec<(u32, u32, OccRow)> = if index.kind().has_word_table() {
        let start = Instant::now();
        let words = index.q_word(&terms)?;
        timings.q_word = Some(millis(start));
        if words.is_empty() {
            timings.total = timings.q_word.unwrap_or_default();
            return Ok(empty(timings));
        }
        let keys: Vec<TermKey> = words.iter().map(|w| TermKey::Id(w.id)).collect();
        let start = Instant::now();
        let occ = index.q_occ(&keys)?;
        timings.q_occ = millis(start);
        let by_id: HashMap<u32, (u32, u32)> = words
            .iter()
            .map(|w| (w.id, (counts[&w.name], w.df)))
            .collect();
        occ.into_iter()
            .map(|row| {
                let TermKey::Id(id) = row.key else {
                    return Err(Error::Corrupt("occurrence row keyed by name".into()));
                };
                let (qtf, df) = by_id[&id];
                Ok((qtf, df, row))
            })
            .collect::<Result<_>>()?
    } else {
        let keys: Vec<TermKey> = terms
            .iter()
            .map(|t| TermKey::Name((*t).to_owned()))
            .collect();
        let start = Instant::now();
        let occ = index.q_occ(&keys)?;
        timings.q_occ = millis(start);
        occ.into_iter()
            .map(|row| {
                let TermKey::Name(name) = &row.key else {
                    return Err(Error::Corrupt("occurrence row keyed by id".into()));
                };
                let qtf = counts[name];
                let df = row.df.ok_or_else(|| Error::Corrupt("missing df".into()))?;
                Ok((qtf, df, row))
            })
            .collect::<Result<_>>()?
    };

    let d = index.stats().d;
    let mut acc = vec![0f64; d as usize + 1];
    let mut touched = Vec::new();
    let mut q_norm_sq = 0f64;
    for (qtf, df, row) in &rows {
        let w = idf(d, *df);
        if w == 0.0 {
            continue;
        }
        let qw = *qtf as f64 * w;
        q_norm_sq += qw * qw;
        for e in &row.postings {
            let slot = acc.get_mut(e.doc_id as usize).ok_or_else(|| {
                Error::Corrupt(format!("posting for unknown document {}", e.doc_id))
            })?;
            if *slot == 0.0 {
                touched.push(e.doc_id);
            }
            *slot += e.tf as f64 * w * qw;
        }
    }
    let q_norm = q_norm_sq.sqrt();

    let start = Instant::now();
    let lookup = if touched.is_empty() {
        None
    } else {
        Some(index.q_doc(&touched, opts.chunk_size)?)
    };
    timings.q_doc = millis(start);
    timings.total = timings.q_word.unwrap_or_default() + timings.q_occ + timings.q_doc;

    let mut results: Vec<RankedResult> = lookup
        .map(|l| l.rows)
        .unwrap_or_default()
        .into_iter()
        .filter(|r| r.norm > 0.0)
        .map(|r| RankedResult {
            doc_id: r.id,
            score: acc[r.id as usize] / (r.norm as f64 * q_norm),
            rank: r.rank as f64,
        })
        .collect();
    let matched = results.len();
    results.sort_by(|a, b| b.score.total_cmp(&a.score).then(a.doc_id.cmp(&b.doc_id)));
    results.truncate(opts.k);
    Ok(QueryOutcome {
        results,
        timings,
        matched,
    })
}

/// Top-`k` documents for `text`.
pub fn evaluate_query(index: &SearchIndex, text: &str, k: usize) -> Result<Vec<RankedResult>> {
    Ok(evaluate(
        index,
        text,
        QueryOptions {
            k,
            ..QueryOptions::default()
        },
    )?
    .results)
}

/// Evaluates many queries against one index, results in query order.
pub fn evaluate_batch<S>(
    index: &SearchIndex,
    queries: &[S],
    opts: QueryOptions,
    exec: Execution,
) -> Result<Vec<Vec<RankedResult>>>
where
    S: AsRef<str> + Sync,
{
    par::map(exec, queries, |q| {
        evaluate(index, q.as_ref(), opts).map(|o| o.results)
    })
    .into_iter()
    .collect()
}

/// Suggests the `n_terms` terms with the highest tf sum over the top
/// `n_docs` results, excluding the query's own terms. Ties go to the
/// lexicographically smaller term.
pub fn expand_query(
    index: &SearchIndex,
    text: &str,
    n_docs: usize,
    n_terms: usize,
) -> Result<Vec<String>> {
    if n_terms == 0 {
        return Err(Error::InvalidArgument("n_terms must be at least 1".into()));
    }
    let top = evaluate_query(index, text, n_docs)?;
    let own: HashSet<String> = tokenize(text).into_iter().collect();
    let mut sums: HashMap<String, u64> = HashMap::new();
    for r in &top {
        for (term, tf) in index.doc_terms(r.doc_id)? {
            if !own.contains(&term) {
                *sums.entry(term).or_insert(0) += tf as u64;
            }
        }
    }
    let mut ranked: Vec<(String, u64)> = sums.into_iter().collect();
    ranked.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    Ok(ranked.into_iter().take(n_terms).map(|(t, _)| t).collect())
}
