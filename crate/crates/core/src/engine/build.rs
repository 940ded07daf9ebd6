use std::collections::{HashMap, HashSet};
use std::time::Instant;

use super::{idf, tokenize, Corpus};
use crate::error::{Error, Result};
use crate::par::{self, Execution};
use crate::representations::{
    build_tables, document_row, pr_rows, set_valued_rows, word_row, IndexPlan, InvertedLists,
    RepKind, SearchIndex,
};
use crate::size_model::CorpusStats;
use crate::storage::{CostModel, FieldValue, PostingEntry};

#[derive(Debug, Clone, Copy, Default)]
pub struct BuildConfig {
    pub cost: CostModel,
    pub plan: IndexPlan,
    pub exec: Execution,
}

/// Distinct terms of one document with their counts, in first-occurrence order.
fn count_terms(text: &str) -> Vec<(String, u32)> {
    let mut seen: HashMap<String, usize> = HashMap::new();
    let mut counts: Vec<(String, u32)> = Vec::new();
    for token in tokenize(text) {
        match seen.get(&token) {
            Some(&i) => counts[i].1 += 1,
            None => {
                seen.insert(token.clone(), counts.len());
                counts.push((token, 1));
            }
        }
    }
    counts
}

/// Appends the postings of `corpus` to `lists`, numbering its documents from
/// `first_doc`. New terms get the next word ids in first-occurrence order.
fn extend_lists(lists: &mut InvertedLists, corpus: &Corpus, first_doc: u32, exec: Execution) {
    let per_doc = par::map(exec, &corpus.docs, |d| count_terms(&d.text));
    let mut ids: HashMap<String, usize> = lists
        .terms
        .iter()
        .enumerate()
        .map(|(i, t)| (t.clone(), i))
        .collect();
    for (i, counts) in per_doc.into_iter().enumerate() {
        let doc = first_doc + i as u32;
        for (term, tf) in counts {
            let w = match ids.get(&term) {
                Some(&w) => w,
                None => {
                    let w = lists.terms.len();
                    ids.insert(term.clone(), w);
                    lists.terms.push(term);
                    lists.postings.push(Vec::new());
                    lists.dfs.push(0);
                    w
                }
            };
            lists.postings[w].push(PostingEntry::new(doc, tf));
            lists.dfs[w] += 1;
        }
    }
}

/// Posting lists (word ids in first-occurrence order) and corpus statistics.
pub fn compute_postings(corpus: &Corpus, exec: Execution) -> (InvertedLists, CorpusStats) {
    let mut lists = InvertedLists::default();
    extend_lists(&mut lists, corpus, 1, exec);
    let stats = lists.stats(corpus.len() as u64);
    (lists, stats)
}

/// `‖d‖ = sqrt(Σ_t (tf·idf)²)` for documents `1..=d`, summed in word order.
pub fn document_norms(lists: &InvertedLists, d: u64, exec: Execution) -> Vec<(u32, f32)> {
    let idfs: Vec<f64> = lists.dfs.iter().map(|&df| idf(d, df)).collect();
    let by_doc = lists.transpose(d as usize, 1);
    let norms = par::map(exec, &by_doc, |terms| {
        terms
            .iter()
            .map(|&(w, tf)| {
                let x = tf as f64 * idfs[w as usize];
                x * x
            })
            .sum::<f64>()
            .sqrt() as f32
    });
    norms
        .into_iter()
        .enumerate()
        .map(|(i, n)| (i as u32 + 1, n))
        .collect()
}

fn store_all_norms(index: &mut SearchIndex, exec: Execution) -> Result<()> {
    let start = Instant::now();
    let lists = index.scan_relation()?;
    let norms = document_norms(&lists, index.stats.d, exec);
    index.store_norms(&norms)?;
    index.timings.norms_millis = start.elapsed().as_secs_f64() * 1e3;
    Ok(())
}

/// Copies the corpus into the tables of `kind`, computes and stores the
/// norms, then builds the access paths of `config.plan`.
pub fn bulk_build(corpus: &Corpus, kind: RepKind, config: &BuildConfig) -> Result<SearchIndex> {
    let (lists, _) = compute_postings(corpus, config.exec);
    let documents: Vec<(u32, String)> = corpus
        .docs
        .iter()
        .enumerate()
        .map(|(i, d)| (i as u32 + 1, d.url.clone()))
        .collect();
    let mut index = build_tables(kind, &documents, &lists, config.cost)?;
    store_all_norms(&mut index, config.exec)?;
    index.build_paths(config.plan)?;
    Ok(index)
}

/// Adds `delta` to a built index: drops the access paths, appends the new
/// tuples, refreshes dfs and every norm, and rebuilds the paths. The result
/// equals a bulk build over the concatenated corpus.
pub fn add_documents(index: &mut SearchIndex, delta: &Corpus, exec: Execution) -> Result<()> {
    let existing = index.documents()?;
    let mut urls: HashSet<&str> = existing.iter().map(|(_, u)| u.as_str()).collect();
    for d in &delta.docs {
        if !urls.insert(d.url.as_str()) {
            return Err(Error::DuplicateUrl(d.url.clone()));
        }
    }
    if delta.is_empty() {
        return Ok(());
    }

    let plan = index.plan();
    index.drop_paths();
    let mut lists = index.scan_relation()?;
    let old_words = lists.len();
    let old_dfs = lists.dfs.clone();
    let first_doc = existing.len() as u32 + 1;
    extend_lists(&mut lists, delta, first_doc, exec);

    let start = Instant::now();
    index.document.copy_into(
        delta
            .docs
            .iter()
            .enumerate()
            .map(|(i, d)| document_row(first_doc + i as u32, &d.url)),
    )?;
    index.timings.copy_document_millis = start.elapsed().as_secs_f64() * 1e3;

    if let Some(word) = index.word.as_mut() {
        let start = Instant::now();
        for (w, (&old, &new)) in old_dfs.iter().zip(&lists.dfs).enumerate() {
            if old != new {
                word.update_field(w as u32, 2, FieldValue::Int(new as i32))?;
            }
        }
        word.copy_into(
            (old_words..lists.len()).map(|w| word_row(w as u32 + 1, &lists.terms[w], lists.dfs[w])),
        )?;
        index.timings.copy_word_millis = start.elapsed().as_secs_f64() * 1e3;
    }

    let start = Instant::now();
    if index.kind == RepKind::Pr {
        let by_doc = lists.transpose(delta.len(), first_doc);
        index.occurrence.copy_into(pr_rows(&by_doc, first_doc))?;
    } else {
        index.occurrence.truncate();
        index
            .occurrence
            .copy_into(set_valued_rows(index.kind, &lists))?;
    }
    index.timings.copy_occurrence_millis = start.elapsed().as_secs_f64() * 1e3;

    index.stats = lists.stats(existing.len() as u64 + delta.len() as u64);
    store_all_norms(index, exec)?;
    index.build_paths(plan)
}
