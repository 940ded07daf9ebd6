//! The four database layouts of the index and their elementary queries.
//!
//! | kind | document                 | word              | occurrence                                  |
//! |------|--------------------------|-------------------|---------------------------------------------|
//! | PR   | id, url, norm, rank      | id, name, df      | word_id, doc_id, tf                         |
//! | OR   | id, url, norm, rank      | id, name, df      | word_id, occur: posting array               |
//! | COR  | id, url, norm, rank      | –                 | word_name, occur: posting array, df         |
//! | HOR  | id, url, norm, rank      | –                 | word_name, occur: posting map (text, text), df |
//!
//! Word ids are dense, starting at 1, in first-occurrence order, and equal
//! the word table row position plus one. The occurrence rows of the
//! set-valued layouts follow the same order.

mod queries;

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use serde::Serialize;

pub use queries::{DocLookup, DocRow, OccRow, TermKey, WordRow};

use crate::access_paths::{build_index, AccessPath, IndexKind, IndexStats};
use crate::error::{Error, Result};
use crate::size_model::CorpusStats;
use crate::storage::{
    CostModel, FieldKind, FieldValue, HeapTable, PostingEntry, Schema, TableStats, Tuple,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum RepKind {
    Pr,
    Or,
    Cor,
    Hor,
}

impl RepKind {
    pub const ALL: [RepKind; 4] = [RepKind::Pr, RepKind::Or, RepKind::Cor, RepKind::Hor];

    pub fn as_str(self) -> &'static str {
        match self {
            RepKind::Pr => "pr",
            RepKind::Or => "or",
            RepKind::Cor => "cor",
            RepKind::Hor => "hor",
        }
    }

    /// PR and OR keep a separate word table; COR and HOR fold it into occurrence.
    pub fn has_word_table(self) -> bool {
        matches!(self, RepKind::Pr | RepKind::Or)
    }
}

impl fmt::Display for RepKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for RepKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "pr" => Ok(RepKind::Pr),
            "or" => Ok(RepKind::Or),
            "cor" => Ok(RepKind::Cor),
            "hor" => Ok(RepKind::Hor),
            other => Err(Error::InvalidArgument(format!(
                "unknown representation `{other}` (expected pr, or, cor or hor)"
            ))),
        }
    }
}

/// Posting lists in word-id order: `terms[i]` has word id `i + 1`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct InvertedLists {
    pub terms: Vec<String>,
    pub postings: Vec<Vec<PostingEntry>>,
    pub dfs: Vec<u32>,
}

impl InvertedLists {
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Corpus statistics for `d` documents.
    pub fn stats(&self, d: u64) -> CorpusStats {
        let n_d = self.postings.iter().map(|p| p.len() as u64).sum();
        let n = self.postings.iter().flatten().map(|e| e.tf as u64).sum();
        CorpusStats {
            n,
            d,
            n_d,
            w: self.terms.len() as u64,
        }
    }

    pub fn check_dfs(&self) -> Result<()> {
        if self.terms.len() != self.postings.len() || self.terms.len() != self.dfs.len() {
            return Err(Error::InvalidArgument(
                "terms, postings and dfs must have equal length".into(),
            ));
        }
        for ((term, postings), &df) in self.terms.iter().zip(&self.postings).zip(&self.dfs) {
            if df as usize != postings.len() {
                return Err(Error::DfMismatch {
                    word: term.clone(),
                    df,
                    postings: postings.len(),
                });
            }
        }
        Ok(())
    }

    /// Per document in `first_doc..first_doc + docs`, its `(word index, tf)`
    /// pairs in word order. Postings outside the range are skipped.
    pub fn transpose(&self, docs: usize, first_doc: u32) -> Vec<Vec<(u32, u32)>> {
        let mut out = vec![Vec::new(); docs];
        for (w, postings) in self.postings.iter().enumerate() {
            let start = postings.partition_point(|e| e.doc_id < first_doc);
            for e in &postings[start..] {
                match out.get_mut((e.doc_id - first_doc) as usize) {
                    Some(terms) => terms.push((w as u32, e.tf)),
                    None => break,
                }
            }
        }
        out
    }
}

/// Which access paths to build.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IndexPlan {
    /// B+Tree or hash on document.id, word.name and the occurrence term key.
    /// `None` leaves every query to sequential scans.
    pub primary: Option<IndexKind>,
    /// PR only: an extra index on occurrence.doc_id for document-based access.
    pub pr_doc_id: bool,
    /// HOR only: key-inverted index over occurrence.occur.
    pub hor_key_index: bool,
}

impl Default for IndexPlan {
    fn default() -> Self {
        IndexPlan {
            primary: Some(IndexKind::Btree),
            pr_doc_id: false,
            hor_key_index: false,
        }
    }
}

impl IndexPlan {
    pub fn none() -> Self {
        IndexPlan {
            primary: None,
            pr_doc_id: false,
            hor_key_index: false,
        }
    }

    pub fn with_primary(primary: Option<IndexKind>) -> Self {
        IndexPlan {
            primary,
            ..IndexPlan::none()
        }
    }

    /// Short label for reports: `btree`, `hash` or `none`.
    pub fn label(&self) -> &'static str {
        self.primary.map_or("none", IndexKind::as_str)
    }
}

#[derive(Debug, Clone, Default)]
pub(crate) struct Paths {
    pub document_id: Option<AccessPath>,
    pub word_name: Option<AccessPath>,
    /// occurrence.word_id (PR, OR) or occurrence.word_name (COR, HOR).
    pub occurrence_key: Option<AccessPath>,
    pub occurrence_doc: Option<AccessPath>,
    pub occurrence_map: Option<AccessPath>,
}

impl Paths {
    fn all(&self) -> impl Iterator<Item = &AccessPath> {
        [
            &self.document_id,
            &self.word_name,
            &self.occurrence_key,
            &self.occurrence_doc,
            &self.occurrence_map,
        ]
        .into_iter()
        .flatten()
    }
}

/// Wall-clock durations of the build phases, in milliseconds.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct BuildTimings {
    pub copy_document_millis: f64,
    pub copy_word_millis: f64,
    pub copy_occurrence_millis: f64,
    pub norms_millis: f64,
    pub index_millis: f64,
}

impl BuildTimings {
    pub fn copy_millis(&self) -> f64 {
        self.copy_document_millis + self.copy_word_millis + self.copy_occurrence_millis
    }
}

/// A built index: the tables of one representation plus its access paths.
#[derive(Debug, Clone)]
pub struct SearchIndex {
    pub(crate) kind: RepKind,
    pub(crate) cost: CostModel,
    pub(crate) stats: CorpusStats,
    pub(crate) plan: IndexPlan,
    pub(crate) document: HeapTable,
    pub(crate) word: Option<HeapTable>,
    pub(crate) occurrence: HeapTable,
    pub(crate) paths: Paths,
    pub(crate) timings: BuildTimings,
}

pub(crate) fn document_schema() -> Schema {
    Schema::new([
        ("id", FieldKind::Int),
        ("url", FieldKind::Str),
        ("norm", FieldKind::Float),
        ("rank", FieldKind::Float),
    ])
    .expect("static schema")
}

pub(crate) fn word_schema() -> Schema {
    Schema::new([
        ("id", FieldKind::Int),
        ("name", FieldKind::Str),
        ("df", FieldKind::Int),
    ])
    .expect("static schema")
}

pub(crate) fn occurrence_schema(kind: RepKind) -> Schema {
    let attrs: Vec<(&str, FieldKind)> = match kind {
        RepKind::Pr => vec![
            ("word_id", FieldKind::Int),
            ("doc_id", FieldKind::Int),
            ("tf", FieldKind::Float),
        ],
        RepKind::Or => vec![
            ("word_id", FieldKind::Int),
            ("occur", FieldKind::PostingArray),
        ],
        RepKind::Cor => vec![
            ("word_name", FieldKind::Str),
            ("occur", FieldKind::PostingArray),
            ("df", FieldKind::Int),
        ],
        RepKind::Hor => vec![
            ("word_name", FieldKind::Str),
            ("occur", FieldKind::PostingMap),
            ("df", FieldKind::Int),
        ],
    };
    Schema::new(attrs).expect("static schema")
}

pub(crate) fn document_row(id: u32, url: &str) -> Tuple {
    vec![
        FieldValue::Int(id as i32),
        FieldValue::Str(url.to_owned()),
        FieldValue::Float(0.0),
        FieldValue::Float(0.0),
    ]
}

pub(crate) fn word_row(id: u32, name: &str, df: u32) -> Tuple {
    vec![
        FieldValue::Int(id as i32),
        FieldValue::Str(name.to_owned()),
        FieldValue::Int(df as i32),
    ]
}

pub(crate) fn posting_map(postings: &[PostingEntry]) -> Vec<(String, String)> {
    postings
        .iter()
        .map(|e| (e.doc_id.to_string(), e.tf.to_string()))
        .collect()
}

/// Occurrence rows of a set-valued layout, one per word in word-id order.
pub(crate) fn set_valued_rows(
    kind: RepKind,
    lists: &InvertedLists,
) -> impl Iterator<Item = Tuple> + '_ {
    (0..lists.len()).map(move |i| {
        let postings = &lists.postings[i];
        let df = FieldValue::Int(lists.dfs[i] as i32);
        match kind {
            RepKind::Or => vec![
                FieldValue::Int(i as i32 + 1),
                FieldValue::PostingArray(postings.clone()),
            ],
            RepKind::Cor => vec![
                FieldValue::Str(lists.terms[i].clone()),
                FieldValue::PostingArray(postings.clone()),
                df,
            ],
            RepKind::Hor => vec![
                FieldValue::Str(lists.terms[i].clone()),
                FieldValue::PostingMap(posting_map(postings)),
                df,
            ],
            RepKind::Pr => unreachable!("PR has one row per posting"),
        }
    })
}

/// PR occurrence rows, document-major: each document's postings in word order.
pub(crate) fn pr_rows(
    by_doc: &[Vec<(u32, u32)>],
    first_doc: u32,
) -> impl Iterator<Item = Tuple> + '_ {
    by_doc.iter().enumerate().flat_map(move |(i, terms)| {
        let doc = first_doc + i as u32;
        terms.iter().map(move |&(w, tf)| {
            vec![
                FieldValue::Int(w as i32 + 1),
                FieldValue::Int(doc as i32),
                FieldValue::Float(tf as f32),
            ]
        })
    })
}

fn timed<T>(f: impl FnOnce() -> Result<T>) -> Result<(T, f64)> {
    let start = Instant::now();
    let out = f()?;
    Ok((out, start.elapsed().as_secs_f64() * 1e3))
}

/// Loads the tables of `kind` with `copy_into`. Norms are left at zero and no
/// access path is built.
///
/// `documents` must carry ids `first..first + len` in order, and every
/// posting must reference one of them.
pub fn build_tables(
    kind: RepKind,
    documents: &[(u32, String)],
    lists: &InvertedLists,
    cost: CostModel,
) -> Result<SearchIndex> {
    lists.check_dfs()?;
    let first_doc = documents.first().map_or(1, |d| d.0);
    if documents
        .iter()
        .enumerate()
        .any(|(i, d)| d.0 != first_doc + i as u32)
    {
        return Err(Error::InvalidArgument(
            "document ids must be consecutive".into(),
        ));
    }
    let last_doc = first_doc + documents.len() as u32;
    for (term, postings) in lists.terms.iter().zip(&lists.postings) {
        if postings
            .iter()
            .any(|e| e.doc_id < first_doc || e.doc_id >= last_doc || e.tf == 0)
        {
            return Err(Error::InvalidArgument(format!(
                "posting list of `{term}` references an unknown document or has tf 0"
            )));
        }
    }

    let mut timings = BuildTimings::default();
    let mut document = HeapTable::new("document", document_schema(), cost)?;
    (_, timings.copy_document_millis) =
        timed(|| document.copy_into(documents.iter().map(|(id, url)| document_row(*id, url))))?;

    let word = if kind.has_word_table() {
        let mut word = HeapTable::new("word", word_schema(), cost)?;
        (_, timings.copy_word_millis) = timed(|| {
            word.copy_into(
                lists
                    .terms
                    .iter()
                    .zip(&lists.dfs)
                    .enumerate()
                    .map(|(i, (t, &df))| word_row(i as u32 + 1, t, df)),
            )
        })?;
        Some(word)
    } else {
        None
    };

    let mut occurrence = HeapTable::new("occurrence", occurrence_schema(kind), cost)?;
    (_, timings.copy_occurrence_millis) = timed(|| match kind {
        RepKind::Pr => {
            let by_doc = lists.transpose(documents.len(), first_doc);
            occurrence.copy_into(pr_rows(&by_doc, first_doc))
        }
        _ => occurrence.copy_into(set_valued_rows(kind, lists)),
    })?;

    Ok(SearchIndex {
        kind,
        cost,
        stats: lists.stats(documents.len() as u64),
        plan: IndexPlan::none(),
        document,
        word,
        occurrence,
        paths: Paths::default(),
        timings,
    })
}

impl SearchIndex {
    pub fn kind(&self) -> RepKind {
        self.kind
    }

    pub fn cost(&self) -> &CostModel {
        &self.cost
    }

    pub fn stats(&self) -> CorpusStats {
        self.stats
    }

    pub fn plan(&self) -> IndexPlan {
        self.plan
    }

    pub fn timings(&self) -> BuildTimings {
        self.timings
    }

    pub fn document(&self) -> &HeapTable {
        &self.document
    }

    pub fn word(&self) -> Option<&HeapTable> {
        self.word.as_ref()
    }

    pub fn occurrence(&self) -> &HeapTable {
        &self.occurrence
    }

    pub fn tables(&self) -> impl Iterator<Item = &HeapTable> {
        std::iter::once(&self.document)
            .chain(self.word.as_ref())
            .chain(std::iter::once(&self.occurrence))
    }

    pub fn table_stats(&self) -> Vec<(String, TableStats)> {
        self.tables()
            .map(|t| (t.name().to_owned(), t.stats()))
            .collect()
    }

    pub fn access_paths(&self) -> impl Iterator<Item = &AccessPath> {
        self.paths.all()
    }

    pub fn index_stats(&self) -> Vec<IndexStats> {
        self.paths.all().map(|p| p.stats().clone()).collect()
    }

    /// Drops every access path.
    pub fn drop_paths(&mut self) {
        self.paths = Paths::default();
    }

    /// Builds the access paths of `plan`, replacing any existing ones.
    pub fn build_paths(&mut self, plan: IndexPlan) -> Result<()> {
        let start = Instant::now();
        let mut paths = Paths::default();
        if let Some(kind) = plan.primary {
            paths.document_id = Some(build_index(&self.document, "id", kind)?);
            if let Some(word) = &self.word {
                paths.word_name = Some(build_index(word, "name", kind)?);
            }
            let key = if self.kind.has_word_table() {
                "word_id"
            } else {
                "word_name"
            };
            paths.occurrence_key = Some(build_index(&self.occurrence, key, kind)?);
        }
        if plan.pr_doc_id && self.kind == RepKind::Pr {
            let kind = plan.primary.unwrap_or(IndexKind::Btree);
            paths.occurrence_doc = Some(build_index(&self.occurrence, "doc_id", kind)?);
        }
        if plan.hor_key_index && self.kind == RepKind::Hor {
            paths.occurrence_map = Some(build_index(
                &self.occurrence,
                "occur",
                IndexKind::KeyInverted,
            )?);
        }
        self.paths = paths;
        self.plan = plan;
        self.timings.index_millis = start.elapsed().as_secs_f64() * 1e3;
        Ok(())
    }

    /// `(id, url)` of every document, in row order.
    pub fn documents(&self) -> Result<Vec<(u32, String)>> {
        let mut out = Vec::with_capacity(self.document.len());
        for row in 0..self.document.len() as u32 {
            let t = self.document.project(row, &[0, 1])?;
            out.push((
                t[0].as_int().unwrap_or_default() as u32,
                t[1].as_str().unwrap_or_default().to_owned(),
            ));
        }
        Ok(out)
    }

    /// Stores precomputed norms, keyed by document id.
    pub fn store_norms(&mut self, norms: &[(u32, f32)]) -> Result<()> {
        let mut rows = HashMap::with_capacity(self.document.len());
        for row in 0..self.document.len() as u32 {
            if let FieldValue::Int(id) = self.document.field(row, 0)? {
                rows.insert(id as u32, row);
            }
        }
        for &(doc, norm) in norms {
            let row = *rows
                .get(&doc)
                .ok_or_else(|| Error::InvalidArgument(format!("no document with id {doc}")))?;
            self.document
                .update_field(row, 2, FieldValue::Float(norm))?;
        }
        Ok(())
    }

    /// True if both indexes hold identical tables and index mappings.
    pub fn same_contents(&self, other: &SearchIndex) -> bool {
        let paths_equal = {
            let a: Vec<_> = self
                .paths
                .all()
                .map(|p| (p.spec().clone(), p.mapping(), p.pages()))
                .collect();
            let b: Vec<_> = other
                .paths
                .all()
                .map(|p| (p.spec().clone(), p.mapping(), p.pages()))
                .collect();
            a == b
        };
        self.kind == other.kind
            && self.cost == other.cost
            && self.stats == other.stats
            && self.plan == other.plan
            && self.document == other.document
            && self.word == other.word
            && self.occurrence == other.occurrence
            && paths_equal
    }
}
