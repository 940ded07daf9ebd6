use std::collections::{HashMap, HashSet};

use super::{RepKind, SearchIndex};
use crate::access_paths::IndexKey;
use crate::error::{Error, Result};
use crate::storage::{parse_decimal, FieldValue, PostingEntry, RowId};

/// How the occurrence table is keyed: by word id (PR, OR) or by name (COR, HOR).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TermKey {
    Id(u32),
    Name(String),
}

/// One term's result from `q_occ`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OccRow {
    pub key: TermKey,
    /// Present for COR and HOR, which keep df next to the postings.
    pub df: Option<u32>,
    pub postings: Vec<PostingEntry>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WordRow {
    pub id: u32,
    pub name: String,
    pub df: u32,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DocRow {
    pub id: u32,
    pub norm: f32,
    pub rank: f32,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DocLookup {
    pub rows: Vec<DocRow>,
    /// Number of IN-list blocks issued.
    pub subqueries: usize,
}

fn int(v: &FieldValue) -> Result<i32> {
    v.as_int()
        .ok_or_else(|| Error::Corrupt(format!("expected int, found {}", v.kind())))
}

fn float(v: &FieldValue) -> Result<f32> {
    v.as_float()
        .ok_or_else(|| Error::Corrupt(format!("expected float, found {}", v.kind())))
}

fn text(v: FieldValue) -> Result<String> {
    match v {
        FieldValue::Str(s) => Ok(s),
        other => Err(Error::Corrupt(format!(
            "expected string, found {}",
            other.kind()
        ))),
    }
}

fn postings(v: FieldValue) -> Result<Vec<PostingEntry>> {
    match v {
        FieldValue::PostingArray(p) => Ok(p),
        FieldValue::PostingMap(m) => m
            .into_iter()
            .map(|(k, v)| match (parse_decimal(&k), parse_decimal(&v)) {
                (Some(doc_id), Some(tf)) => Ok(PostingEntry::new(doc_id, tf)),
                _ => Err(Error::Corrupt(format!(
                    "bad posting map entry `{k}` => `{v}`"
                ))),
            })
            .collect(),
        other => Err(Error::Corrupt(format!(
            "expected postings, found {}",
            other.kind()
        ))),
    }
}

impl SearchIndex {
    fn word_table(&self, operation: &'static str) -> Result<&crate::storage::HeapTable> {
        self.word.as_ref().ok_or(Error::UnsupportedOperation {
            operation,
            kind: self.kind.as_str(),
        })
    }

    /// Rows of `table` whose `column` equals one of `keys`, ascending, using
    /// `path` when present and a sequential scan otherwise.
    fn matching_rows(
        &self,
        table: &crate::storage::HeapTable,
        path: Option<&crate::access_paths::AccessPath>,
        column: usize,
        keys: &[IndexKey],
    ) -> Result<Vec<RowId>> {
        let mut rows = Vec::new();
        match path {
            Some(p) => {
                for k in keys {
                    rows.extend_from_slice(p.lookup(k));
                }
                rows.sort_unstable();
                rows.dedup();
            }
            None => {
                let wanted: HashSet<&IndexKey> = keys.iter().collect();
                for row in 0..table.len() as RowId {
                    let key = match table.field(row, column)? {
                        FieldValue::Int(v) => IndexKey::Int(v as i64),
                        FieldValue::Str(s) => IndexKey::Str(s),
                        other => {
                            return Err(Error::Corrupt(format!("unindexable {}", other.kind())))
                        }
                    };
                    if wanted.contains(&key) {
                        rows.push(row);
                    }
                }
            }
        }
        Ok(rows)
    }

    /// `(word_id, df)` of each known term, ascending by word id. The name is
    /// returned too so callers can match rows back to query terms.
    ///
    /// Only PR and OR have a word table; COR and HOR return df from `q_occ`.
    pub fn q_word(&self, terms: &[&str]) -> Result<Vec<WordRow>> {
        let word = self.word_table("q_word")?;
        let mut keys: Vec<IndexKey> = terms.iter().map(|&t| IndexKey::from(t)).collect();
        keys.sort();
        keys.dedup();
        let rows = self.matching_rows(word, self.paths.word_name.as_ref(), 1, &keys)?;
        let mut out = Vec::with_capacity(rows.len());
        for row in rows {
            let mut t = word.get(row)?.into_iter();
            let id = int(&t.next().expect("three fields"))? as u32;
            let name = text(t.next().expect("three fields"))?;
            let df = int(&t.next().expect("three fields"))? as u32;
            out.push(WordRow { id, name, df });
        }
        out.sort_unstable_by_key(|w| w.id);
        Ok(out)
    }

    /// Full posting lists of the requested terms, in word order. Keys are
    /// word ids for PR and OR, names for COR and HOR; unknown keys are omitted.
    pub fn q_occ(&self, keys: &[TermKey]) -> Result<Vec<OccRow>> {
        if keys.is_empty() {
            return Err(Error::InvalidArgument(
                "q_occ needs at least one key".into(),
            ));
        }
        let by_id = self.kind.has_word_table();
        let mut index_keys = Vec::with_capacity(keys.len());
        for k in keys {
            match (k, by_id) {
                (TermKey::Id(id), true) => index_keys.push(IndexKey::Int(*id as i64)),
                (TermKey::Name(n), false) => index_keys.push(IndexKey::Str(n.clone())),
                _ => {
                    return Err(Error::InvalidArgument(format!(
                        "{} occurrence is keyed by {}",
                        self.kind,
                        if by_id { "word id" } else { "word name" }
                    )))
                }
            }
        }
        index_keys.sort();
        index_keys.dedup();
        let occ = &self.occurrence;
        let rows = self.matching_rows(occ, self.paths.occurrence_key.as_ref(), 0, &index_keys)?;

        match self.kind {
            RepKind::Pr => {
                // One tuple per posting; group by word id.
                let mut grouped: HashMap<u32, Vec<PostingEntry>> = HashMap::new();
                for row in rows {
                    let t = occ.get(row)?;
                    let word = int(&t[0])? as u32;
                    let doc = int(&t[1])? as u32;
                    let tf = float(&t[2])? as u32;
                    grouped
                        .entry(word)
                        .or_default()
                        .push(PostingEntry::new(doc, tf));
                }
                let mut out: Vec<OccRow> = grouped
                    .into_iter()
                    .map(|(w, mut postings)| {
                        postings.sort_unstable();
                        OccRow {
                            key: TermKey::Id(w),
                            df: None,
                            postings,
                        }
                    })
                    .collect();
                out.sort_unstable_by(|a, b| a.key.cmp(&b.key));
                Ok(out)
            }
            RepKind::Or => {
                let mut out = Vec::with_capacity(rows.len());
                for row in rows {
                    let mut t = occ.get(row)?;
                    out.push(OccRow {
                        key: TermKey::Id(int(&t[0])? as u32),
                        df: None,
                        postings: postings(t.pop().expect("two fields"))?,
                    });
                }
                out.sort_unstable_by(|a, b| a.key.cmp(&b.key));
                Ok(out)
            }
            RepKind::Cor | RepKind::Hor => {
                // Row order is word-id order.
                let mut out = Vec::with_capacity(rows.len());
                for row in rows {
                    let mut t = occ.get(row)?.into_iter();
                    let name = text(t.next().expect("three fields"))?;
                    let list = postings(t.next().expect("three fields"))?;
                    let df = int(&t.next().expect("three fields"))? as u32;
                    out.push(OccRow {
                        key: TermKey::Name(name),
                        df: Some(df),
                        postings: list,
                    });
                }
                Ok(out)
            }
        }
    }

    /// `(id, norm, rank)` of the requested documents, ascending by id.
    ///
    /// The deduplicated id list is split into blocks of `chunk_size`, one
    /// lookup per block, and the results are concatenated.
    pub fn q_doc(&self, doc_ids: &[u32], chunk_size: usize) -> Result<DocLookup> {
        if chunk_size == 0 {
            return Err(Error::InvalidArgument(
                "chunk_size must be at least 1".into(),
            ));
        }
        let mut ids = doc_ids.to_vec();
        ids.sort_unstable();
        ids.dedup();
        let doc = &self.document;
        let mut rows = Vec::with_capacity(ids.len());
        let mut subqueries = 0;
        for block in ids.chunks(chunk_size) {
            subqueries += 1;
            match &self.paths.document_id {
                Some(path) => {
                    for &id in block {
                        for &row in path.lookup(&IndexKey::Int(id as i64)) {
                            let t = doc.project(row, &[0, 2, 3])?;
                            rows.push(DocRow {
                                id: int(&t[0])? as u32,
                                norm: float(&t[1])?,
                                rank: float(&t[2])?,
                            });
                        }
                    }
                }
                None => {
                    let wanted: HashSet<u32> = block.iter().copied().collect();
                    for row in 0..doc.len() as RowId {
                        let id = int(&doc.field(row, 0)?)? as u32;
                        if wanted.contains(&id) {
                            let t = doc.project(row, &[2, 3])?;
                            rows.push(DocRow {
                                id,
                                norm: float(&t[0])?,
                                rank: float(&t[1])?,
                            });
                        }
                    }
                }
            }
        }
        rows.sort_by_key(|r| r.id);
        Ok(DocLookup { rows, subqueries })
    }

    fn word_names(&self, ids: impl Iterator<Item = u32>) -> Result<Vec<String>> {
        let word = self.word_table("word lookup")?;
        ids.map(|id| {
            // Word ids are row positions plus one.
            let t = word.project(id - 1, &[0, 1])?;
            if int(&t[0])? as u32 != id {
                return Err(Error::Corrupt(format!(
                    "word row {} does not hold id {id}",
                    id - 1
                )));
            }
            text(t.into_iter().nth(1).expect("two fields"))
        })
        .collect()
    }

    /// All `(term, tf)` pairs of one document, in word order.
    pub fn doc_terms(&self, doc_id: u32) -> Result<Vec<(String, u32)>> {
        let occ = &self.occurrence;
        match self.kind {
            RepKind::Pr => {
                let rows = self.matching_rows(
                    occ,
                    self.paths.occurrence_doc.as_ref(),
                    1,
                    &[IndexKey::Int(doc_id as i64)],
                )?;
                let mut pairs = Vec::with_capacity(rows.len());
                for row in rows {
                    let t = occ.get(row)?;
                    pairs.push((int(&t[0])? as u32, float(&t[2])? as u32));
                }
                pairs.sort_unstable();
                let names = self.word_names(pairs.iter().map(|p| p.0))?;
                Ok(names
                    .into_iter()
                    .zip(pairs)
                    .map(|(n, (_, tf))| (n, tf))
                    .collect())
            }
            RepKind::Or => {
                let mut pairs = Vec::new();
                for row in 0..occ.len() as RowId {
                    if let Some(tf) = occ.posting_get(row, 1, doc_id)? {
                        pairs.push((int(&occ.field(row, 0)?)? as u32, tf));
                    }
                }
                let names = self.word_names(pairs.iter().map(|p| p.0))?;
                Ok(names
                    .into_iter()
                    .zip(pairs)
                    .map(|(n, (_, tf))| (n, tf))
                    .collect())
            }
            RepKind::Cor => {
                let mut out = Vec::new();
                for row in 0..occ.len() as RowId {
                    if let Some(tf) = occ.posting_get(row, 1, doc_id)? {
                        out.push((text(occ.field(row, 0)?)?, tf));
                    }
                }
                Ok(out)
            }
            RepKind::Hor => {
                let key = doc_id.to_string();
                let candidates: Vec<RowId> = match &self.paths.occurrence_map {
                    Some(gin) => gin.lookup(&IndexKey::Str(key.clone())).to_vec(),
                    None => (0..occ.len() as RowId).collect(),
                };
                let mut out = Vec::new();
                for row in candidates {
                    if let Some(tf) = occ.map_get(row, 1, &key)? {
                        let tf = parse_decimal(&tf)
                            .ok_or_else(|| Error::Corrupt(format!("bad tf text `{tf}`")))?;
                        out.push((text(occ.field(row, 0)?)?, tf));
                    }
                }
                Ok(out)
            }
        }
    }

    /// Reconstructs every posting list by exhaustive scan.
    pub fn scan_relation(&self) -> Result<super::InvertedLists> {
        let mut lists = super::InvertedLists::default();
        match self.kind {
            RepKind::Pr | RepKind::Or => {
                let word = self.word_table("scan")?;
                for (row, t) in word.scan() {
                    if int(&t[0])? as u32 != row + 1 {
                        return Err(Error::Corrupt(format!("word row {row} out of id order")));
                    }
                    let mut t = t.into_iter().skip(1);
                    lists.terms.push(text(t.next().expect("three fields"))?);
                    lists
                        .dfs
                        .push(int(&t.next().expect("three fields"))? as u32);
                }
                lists.postings = vec![Vec::new(); lists.terms.len()];
                for (_, t) in self.occurrence.scan() {
                    let w = int(&t[0])? as usize;
                    let slot = lists
                        .postings
                        .get_mut(w - 1)
                        .ok_or_else(|| Error::Corrupt(format!("occurrence of unknown word {w}")))?;
                    if self.kind == RepKind::Pr {
                        slot.push(PostingEntry::new(int(&t[1])? as u32, float(&t[2])? as u32));
                    } else {
                        *slot = postings(t.into_iter().nth(1).expect("two fields"))?;
                    }
                }
                for p in &mut lists.postings {
                    p.sort_unstable();
                }
            }
            RepKind::Cor | RepKind::Hor => {
                for (_, t) in self.occurrence.scan() {
                    let mut t = t.into_iter();
                    lists.terms.push(text(t.next().expect("three fields"))?);
                    lists
                        .postings
                        .push(postings(t.next().expect("three fields"))?);
                    lists
                        .dfs
                        .push(int(&t.next().expect("three fields"))? as u32);
                }
            }
        }
        Ok(lists)
    }
}
