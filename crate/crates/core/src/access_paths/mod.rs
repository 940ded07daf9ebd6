//! Equality access paths over heap table attributes.

mod btree;
mod hash;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use serde::Serialize;

pub use btree::BPlusTree;
pub use hash::{HashIndex, TARGET_LOAD_FACTOR};

use crate::error::{Error, Result};
use crate::storage::{CostModel, FieldKind, FieldValue, HeapTable, RowId};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum IndexKey {
    Int(i64),
    Str(String),
}

impl From<i64> for IndexKey {
    fn from(v: i64) -> Self {
        IndexKey::Int(v)
    }
}

impl From<&str> for IndexKey {
    fn from(v: &str) -> Self {
        IndexKey::Str(v.to_owned())
    }
}

pub(crate) fn key_bytes(key: &IndexKey, cost: &CostModel) -> u64 {
    match key {
        IndexKey::Int(_) => cost.field_bytes as u64,
        IndexKey::Str(s) => cost.string_cost(s.len()),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum IndexKind {
    Btree,
    Hash,
    /// Map key → rows index over a posting-map attribute.
    KeyInverted,
}

impl IndexKind {
    pub fn as_str(self) -> &'static str {
        match self {
            IndexKind::Btree => "btree",
            IndexKind::Hash => "hash",
            IndexKind::KeyInverted => "key_inverted",
        }
    }
}

impl fmt::Display for IndexKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for IndexKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "btree" => Ok(IndexKind::Btree),
            "hash" => Ok(IndexKind::Hash),
            "key_inverted" | "gin" => Ok(IndexKind::KeyInverted),
            other => Err(Error::InvalidArgument(format!(
                "unknown index kind `{other}`"
            ))),
        }
    }
}

/// What an index covers; enough to rebuild it after a drop.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct IndexSpec {
    pub table: String,
    pub attribute: String,
    pub kind: IndexKind,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IndexStats {
    pub kind: IndexKind,
    pub table: String,
    pub attribute: String,
    pub pages: u64,
    pub build_millis: f64,
}

#[derive(Debug, Clone)]
enum PathImpl {
    Btree(BPlusTree),
    Hash(HashIndex),
    KeyInverted(BPlusTree),
}

/// A built, immutable access path.
#[derive(Debug, Clone)]
pub struct AccessPath {
    spec: IndexSpec,
    stats: IndexStats,
    imp: PathImpl,
}

impl AccessPath {
    pub fn spec(&self) -> &IndexSpec {
        &self.spec
    }

    pub fn stats(&self) -> &IndexStats {
        &self.stats
    }

    pub fn pages(&self) -> u64 {
        self.stats.pages
    }

    /// Rows whose attribute equals `key`, ascending. Missing keys yield `[]`.
    pub fn lookup(&self, key: &IndexKey) -> &[RowId] {
        match &self.imp {
            PathImpl::Btree(t) | PathImpl::KeyInverted(t) => t.lookup(key),
            PathImpl::Hash(h) => h.lookup(key),
        }
    }

    pub fn btree(&self) -> Option<&BPlusTree> {
        match &self.imp {
            PathImpl::Btree(t) | PathImpl::KeyInverted(t) => Some(t),
            PathImpl::Hash(_) => None,
        }
    }

    pub fn hash(&self) -> Option<&HashIndex> {
        match &self.imp {
            PathImpl::Hash(h) => Some(h),
            _ => None,
        }
    }

    /// The full key → rows mapping, independent of the physical structure.
    pub fn mapping(&self) -> BTreeMap<IndexKey, Vec<RowId>> {
        match &self.imp {
            PathImpl::Btree(t) | PathImpl::KeyInverted(t) => {
                t.iter().map(|(k, r)| (k.clone(), r.to_vec())).collect()
            }
            PathImpl::Hash(h) => h.iter().map(|(k, r)| (k.clone(), r.to_vec())).collect(),
        }
    }
}

fn unsupported(table: &HeapTable, attribute: &str, kind: IndexKind, field: FieldKind) -> Error {
    Error::UnsupportedIndex {
        kind: kind.to_string(),
        table: table.name().to_owned(),
        attribute: attribute.to_owned(),
        field_kind: field.to_string(),
    }
}

/// Sorted `(key, rows)` groups for every row of `table`.
fn collect_groups(
    table: &HeapTable,
    column: usize,
    kind: IndexKind,
) -> Result<Vec<(IndexKey, Vec<RowId>)>> {
    let mut pairs: Vec<(IndexKey, RowId)> = Vec::with_capacity(table.len());
    for row in 0..table.len() as RowId {
        match table.field(row, column)? {
            FieldValue::Int(v) => pairs.push((IndexKey::Int(v as i64), row)),
            FieldValue::Str(s) => pairs.push((IndexKey::Str(s), row)),
            FieldValue::PostingMap(m) if kind == IndexKind::KeyInverted => {
                pairs.extend(m.into_iter().map(|(k, _)| (IndexKey::Str(k), row)))
            }
            other => unreachable!("pairing checked before scan: {:?}", other.kind()),
        }
    }
    // Stable: rows stay ascending within a key.
    pairs.sort_by(|a, b| a.0.cmp(&b.0));
    let mut groups: Vec<(IndexKey, Vec<RowId>)> = Vec::new();
    for (key, row) in pairs {
        match groups.last_mut() {
            Some((k, rows)) if *k == key => rows.push(row),
            _ => groups.push((key, vec![row])),
        }
    }
    Ok(groups)
}

/// Builds an access path over `table.attribute`.
///
/// B+Tree and hash paths index int or string attributes; the key-inverted
/// path indexes the keys of a posting-map attribute.
pub fn build_index(table: &HeapTable, attribute: &str, kind: IndexKind) -> Result<AccessPath> {
    let column = table.column(attribute)?;
    let field = table.schema().kind(column);
    let supported = match kind {
        IndexKind::Btree | IndexKind::Hash => matches!(field, FieldKind::Int | FieldKind::Str),
        IndexKind::KeyInverted => field == FieldKind::PostingMap,
    };
    if !supported {
        return Err(unsupported(table, attribute, kind, field));
    }
    let start = Instant::now();
    let groups = collect_groups(table, column, kind)?;
    let cost = table.cost();
    let imp = match kind {
        IndexKind::Btree => PathImpl::Btree(BPlusTree::bulk_load(groups, cost)),
        IndexKind::Hash => PathImpl::Hash(HashIndex::bulk_load(groups, cost)),
        IndexKind::KeyInverted => PathImpl::KeyInverted(BPlusTree::bulk_load(groups, cost)),
    };
    let pages = match &imp {
        PathImpl::Btree(t) | PathImpl::KeyInverted(t) => t.pages(),
        PathImpl::Hash(h) => h.pages(),
    };
    let build_millis = start.elapsed().as_secs_f64() * 1e3;
    Ok(AccessPath {
        spec: IndexSpec {
            table: table.name().to_owned(),
            attribute: attribute.to_owned(),
            kind,
        },
        stats: IndexStats {
            kind,
            table: table.name().to_owned(),
            attribute: attribute.to_owned(),
            pages,
            build_millis,
        },
        imp,
    })
}

/// Drops an index, keeping only what is needed to recreate it.
pub fn drop_index(index: AccessPath) -> IndexSpec {
    index.spec
}

pub fn rebuild_index(spec: &IndexSpec, table: &HeapTable) -> Result<AccessPath> {
    if spec.table != table.name() {
        return Err(Error::InvalidArgument(format!(
            "index on `{}` cannot be rebuilt over table `{}`",
            spec.table,
            table.name()
        )));
    }
    build_index(table, &spec.attribute, spec.kind)
}
