use std::fmt;

use super::cost::{CostModel, PostingEncoding};

/// One `(doc_id, tf)` occurrence of a term; tf is a raw count.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PostingEntry {
    pub doc_id: u32,
    pub tf: u32,
}

impl PostingEntry {
    pub fn new(doc_id: u32, tf: u32) -> Self {
        PostingEntry { doc_id, tf }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FieldKind {
    Int,
    Float,
    Str,
    PostingArray,
    PostingMap,
}

impl FieldKind {
    pub fn is_collection(self) -> bool {
        matches!(self, FieldKind::PostingArray | FieldKind::PostingMap)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            FieldKind::Int => "int",
            FieldKind::Float => "float",
            FieldKind::Str => "string",
            FieldKind::PostingArray => "posting_array",
            FieldKind::PostingMap => "posting_map",
        }
    }

    pub(crate) fn from_tag(tag: u8) -> Option<FieldKind> {
        Some(match tag {
            0 => FieldKind::Int,
            1 => FieldKind::Float,
            2 => FieldKind::Str,
            3 => FieldKind::PostingArray,
            4 => FieldKind::PostingMap,
            _ => return None,
        })
    }

    pub(crate) fn tag(self) -> u8 {
        match self {
            FieldKind::Int => 0,
            FieldKind::Float => 1,
            FieldKind::Str => 2,
            FieldKind::PostingArray => 3,
            FieldKind::PostingMap => 4,
        }
    }
}

impl fmt::Display for FieldKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum FieldValue {
    Int(i32),
    Float(f32),
    Str(String),
    /// Sorted by ascending doc id.
    PostingArray(Vec<PostingEntry>),
    /// `(doc_id, tf)` as decimal text, sorted by ascending numeric doc id.
    PostingMap(Vec<(String, String)>),
}

impl FieldValue {
    pub fn kind(&self) -> FieldKind {
        match self {
            FieldValue::Int(_) => FieldKind::Int,
            FieldValue::Float(_) => FieldKind::Float,
            FieldValue::Str(_) => FieldKind::Str,
            FieldValue::PostingArray(_) => FieldKind::PostingArray,
            FieldValue::PostingMap(_) => FieldKind::PostingMap,
        }
    }

    /// Bytes this value occupies inside a tuple.
    pub fn cost(&self, cost: &CostModel) -> u64 {
        match self {
            FieldValue::Int(_) | FieldValue::Float(_) => cost.field_bytes as u64,
            FieldValue::Str(s) => cost.string_cost(s.len()),
            FieldValue::PostingArray(entries) => {
                entries.len() as u64 * cost.posting_element_bytes as u64
            }
            FieldValue::PostingMap(pairs) => pairs
                .iter()
                .map(|(k, v)| cost.string_cost(k.len()) + cost.string_cost(v.len()))
                .sum(),
        }
    }

    /// Element count stored alongside the tuple for collection fields.
    pub(crate) fn collection_len(&self) -> Option<u32> {
        match self {
            FieldValue::PostingArray(e) => Some(e.len() as u32),
            FieldValue::PostingMap(p) => Some(p.len() as u32),
            _ => None,
        }
    }

    pub fn as_int(&self) -> Option<i32> {
        match self {
            FieldValue::Int(v) => Some(*v),
            _ => None,
        }
    }

    pub fn as_float(&self) -> Option<f32> {
        match self {
            FieldValue::Float(v) => Some(*v),
            _ => None,
        }
    }

    pub fn as_str(&self) -> Option<&str> {
        match self {
            FieldValue::Str(v) => Some(v),
            _ => None,
        }
    }

    /// Checks the ordering and text-format invariants of collection values.
    pub(crate) fn check_invariants(&self) -> Result<(), String> {
        match self {
            FieldValue::PostingArray(entries) => {
                if entries.windows(2).any(|w| w[0].doc_id >= w[1].doc_id) {
                    return Err("posting array not strictly ascending by doc_id".into());
                }
                Ok(())
            }
            FieldValue::PostingMap(pairs) => {
                let mut prev: Option<u32> = None;
                for (k, v) in pairs {
                    let doc = parse_decimal(k).ok_or_else(|| {
                        format!("posting map key `{k}` is not decimal integer text")
                    })?;
                    parse_decimal(v).ok_or_else(|| {
                        format!("posting map value `{v}` is not decimal integer text")
                    })?;
                    if prev.is_some_and(|p| p >= doc) {
                        return Err("posting map not strictly ascending by doc_id".into());
                    }
                    prev = Some(doc);
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }
}

/// Parses canonical decimal text (no sign, no leading zeros).
pub fn parse_decimal(s: &str) -> Option<u32> {
    if s.is_empty() || (s.len() > 1 && s.starts_with('0')) || !s.bytes().all(|b| b.is_ascii_digit())
    {
        return None;
    }
    s.parse().ok()
}

pub type Tuple = Vec<FieldValue>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Attribute {
    pub name: String,
    pub kind: FieldKind,
}

/// Ordered attribute list of a table. At most one collection-valued attribute.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Schema {
    attributes: Vec<Attribute>,
}

impl Schema {
    pub fn new<S: Into<String>>(
        attrs: impl IntoIterator<Item = (S, FieldKind)>,
    ) -> Result<Self, String> {
        let attributes: Vec<Attribute> = attrs
            .into_iter()
            .map(|(name, kind)| Attribute {
                name: name.into(),
                kind,
            })
            .collect();
        if attributes.is_empty() {
            return Err("schema has no attributes".into());
        }
        if attributes.iter().filter(|a| a.kind.is_collection()).count() > 1 {
            return Err("at most one collection-valued attribute per schema".into());
        }
        for (i, a) in attributes.iter().enumerate() {
            if attributes[..i].iter().any(|b| b.name == a.name) {
                return Err(format!("duplicate attribute `{}`", a.name));
            }
        }
        Ok(Schema { attributes })
    }

    pub fn attributes(&self) -> &[Attribute] {
        &self.attributes
    }

    pub fn len(&self) -> usize {
        self.attributes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.attributes.is_empty()
    }

    pub fn position(&self, name: &str) -> Option<usize> {
        self.attributes.iter().position(|a| a.name == name)
    }

    pub fn kind(&self, column: usize) -> FieldKind {
        self.attributes[column].kind
    }

    pub fn check(&self, row: &[FieldValue]) -> Result<(), String> {
        if row.len() != self.attributes.len() {
            return Err(format!(
                "expected {} fields, got {}",
                self.attributes.len(),
                row.len()
            ));
        }
        for (attr, value) in self.attributes.iter().zip(row) {
            if attr.kind != value.kind() {
                return Err(format!(
                    "attribute `{}` expects {}, got {}",
                    attr.name,
                    attr.kind,
                    value.kind()
                ));
            }
            value.check_invariants()?;
        }
        Ok(())
    }
}

/// Stored size of a tuple: the fixed overhead plus the cost of each field.
///
/// # Panics
///
/// Panics if `row` is empty.
pub fn tuple_size(cost: &CostModel, row: &[FieldValue]) -> u64 {
    assert!(!row.is_empty(), "tuple_size of an empty row");
    cost.tuple_overhead_bytes as u64 + row.iter().map(|v| v.cost(cost)).sum::<u64>()
}

// Encoding: every value is written at exactly its accounted width,
// little-endian and zero-padded.

fn put_padded(out: &mut Vec<u8>, bytes: &[u8], width: usize) {
    out.extend_from_slice(bytes);
    out.resize(out.len() + width - bytes.len(), 0);
}

fn put_str(out: &mut Vec<u8>, s: &str, cost: &CostModel) {
    put_padded(
        out,
        &(s.len() as u32).to_le_bytes(),
        cost.string_header_bytes as usize,
    );
    out.extend_from_slice(s.as_bytes());
}

pub(crate) fn encode_tuple(out: &mut Vec<u8>, cost: &CostModel, row_id: u64, row: &[FieldValue]) {
    let t = cost.tuple_overhead_bytes as usize;
    let id = row_id.to_le_bytes();
    let n = id.len().min(t);
    put_padded(out, &id[..n], t);
    let f = cost.field_bytes as usize;
    for value in row {
        match value {
            FieldValue::Int(v) => put_padded(out, &v.to_le_bytes(), f),
            FieldValue::Float(v) => put_padded(out, &v.to_le_bytes(), f),
            FieldValue::Str(s) => put_str(out, s, cost),
            FieldValue::PostingArray(entries) => match cost.encoding() {
                PostingEncoding::Pair8 => {
                    for e in entries {
                        put_padded(out, &e.doc_id.to_le_bytes(), f);
                        put_padded(out, &(e.tf as f32).to_le_bytes(), f);
                    }
                }
                PostingEncoding::Point16 => {
                    for e in entries {
                        out.extend_from_slice(&(e.doc_id as f64).to_le_bytes());
                        out.extend_from_slice(&(e.tf as f64).to_le_bytes());
                    }
                }
            },
            FieldValue::PostingMap(pairs) => {
                for (k, v) in pairs {
                    put_str(out, k, cost);
                    put_str(out, v, cost);
                }
            }
        }
    }
}

/// Cursor over one encoded tuple.
pub(crate) struct TupleReader<'a> {
    buf: &'a [u8],
    pos: usize,
    cost: &'a CostModel,
    collection_len: u32,
}

impl<'a> TupleReader<'a> {
    pub(crate) fn new(buf: &'a [u8], cost: &'a CostModel, collection_len: u32) -> Self {
        TupleReader {
            buf,
            pos: cost.tuple_overhead_bytes as usize,
            cost,
            collection_len,
        }
    }

    pub(crate) fn position(&self) -> usize {
        self.pos
    }

    fn take(&mut self, n: usize) -> &'a [u8] {
        let s = &self.buf[self.pos..self.pos + n];
        self.pos += n;
        s
    }

    fn u32_at(bytes: &[u8]) -> u32 {
        u32::from_le_bytes(bytes[..4].try_into().unwrap())
    }

    fn read_str(&mut self) -> &'a str {
        let len = Self::u32_at(self.take(self.cost.string_header_bytes as usize)) as usize;
        // Only valid UTF-8 is ever written.
        std::str::from_utf8(self.take(len)).expect("stored string is valid UTF-8")
    }

    pub(crate) fn skip(&mut self, kind: FieldKind) {
        let f = self.cost.field_bytes as usize;
        match kind {
            FieldKind::Int | FieldKind::Float => self.pos += f,
            FieldKind::Str => {
                self.read_str();
            }
            FieldKind::PostingArray => {
                self.pos += self.collection_len as usize * self.cost.posting_element_bytes as usize
            }
            FieldKind::PostingMap => {
                for _ in 0..self.collection_len * 2 {
                    self.read_str();
                }
            }
        }
    }

    pub(crate) fn read_int(&mut self) -> i32 {
        let f = self.cost.field_bytes as usize;
        i32::from_le_bytes(self.take(f)[..4].try_into().unwrap())
    }

    pub(crate) fn read_float(&mut self) -> f32 {
        let f = self.cost.field_bytes as usize;
        f32::from_le_bytes(self.take(f)[..4].try_into().unwrap())
    }

    pub(crate) fn read_postings(&mut self) -> Vec<PostingEntry> {
        let n = self.collection_len as usize;
        let mut out = Vec::with_capacity(n);
        let f = self.cost.field_bytes as usize;
        match self.cost.encoding() {
            PostingEncoding::Pair8 => {
                for chunk in self.take(n * 2 * f).chunks_exact(2 * f) {
                    let doc_id = Self::u32_at(chunk);
                    let tf = f32::from_le_bytes(chunk[f..f + 4].try_into().unwrap());
                    out.push(PostingEntry::new(doc_id, tf as u32));
                }
            }
            PostingEncoding::Point16 => {
                for chunk in self.take(n * 16).chunks_exact(16) {
                    let doc = f64::from_le_bytes(chunk[..8].try_into().unwrap());
                    let tf = f64::from_le_bytes(chunk[8..].try_into().unwrap());
                    out.push(PostingEntry::new(doc as u32, tf as u32));
                }
            }
        }
        out
    }

    /// Binary-searches the posting array for `doc_id` without decoding it.
    pub(crate) fn find_posting(&mut self, doc_id: u32) -> Option<u32> {
        let n = self.collection_len as usize;
        let width = self.cost.posting_element_bytes as usize;
        let f = self.cost.field_bytes as usize;
        let encoding = self.cost.encoding();
        let elems = self.take(n * width);
        let decode = |i: usize| {
            let e = &elems[i * width..(i + 1) * width];
            match encoding {
                PostingEncoding::Pair8 => (
                    Self::u32_at(e),
                    f32::from_le_bytes(e[f..f + 4].try_into().unwrap()) as u32,
                ),
                PostingEncoding::Point16 => (
                    f64::from_le_bytes(e[..8].try_into().unwrap()) as u32,
                    f64::from_le_bytes(e[8..].try_into().unwrap()) as u32,
                ),
            }
        };
        let (mut lo, mut hi) = (0, n);
        while lo < hi {
            let mid = (lo + hi) / 2;
            let (doc, tf) = decode(mid);
            match doc.cmp(&doc_id) {
                std::cmp::Ordering::Equal => return Some(tf),
                std::cmp::Ordering::Less => lo = mid + 1,
                std::cmp::Ordering::Greater => hi = mid,
            }
        }
        None
    }

    pub(crate) fn read_map(&mut self) -> Vec<(String, String)> {
        (0..self.collection_len)
            .map(|_| {
                let k = self.read_str().to_owned();
                let v = self.read_str().to_owned();
                (k, v)
            })
            .collect()
    }

    /// Finds the value stored under `key` without materializing the map.
    pub(crate) fn find_in_map(&mut self, key: &str) -> Option<&'a str> {
        for _ in 0..self.collection_len {
            let k = self.read_str();
            let v = self.read_str();
            if k == key {
                return Some(v);
            }
        }
        None
    }

    pub(crate) fn read(&mut self, kind: FieldKind) -> FieldValue {
        match kind {
            FieldKind::Int => FieldValue::Int(self.read_int()),
            FieldKind::Float => FieldValue::Float(self.read_float()),
            FieldKind::Str => FieldValue::Str(self.read_str().to_owned()),
            FieldKind::PostingArray => FieldValue::PostingArray(self.read_postings()),
            FieldKind::PostingMap => FieldValue::PostingMap(self.read_map()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pr_row() -> Tuple {
        vec![
            FieldValue::Int(1),
            FieldValue::Int(2),
            FieldValue::Float(3.0),
        ]
    }

    #[test]
    fn pr_occurrence_row_is_3f_plus_t() {
        assert_eq!(tuple_size(&CostModel::default(), &pr_row()), 52);
    }

    #[test]
    fn or_occurrence_row_with_two_postings() {
        let row = vec![
            FieldValue::Int(7),
            FieldValue::PostingArray(vec![PostingEntry::new(1, 1), PostingEntry::new(2, 1)]),
        ];
        assert_eq!(tuple_size(&CostModel::default(), &row), 60);
        let point = CostModel::default().with_encoding(PostingEncoding::Point16);
        assert_eq!(tuple_size(&point, &row), 40 + 4 + 32);
    }

    #[test]
    fn document_row() {
        let row = vec![
            FieldValue::Int(1),
            FieldValue::Str("u1".into()),
            FieldValue::Float(0.0),
            FieldValue::Float(0.0),
        ];
        assert_eq!(tuple_size(&CostModel::default(), &row), 58);
    }

    #[test]
    fn posting_map_cost_counts_both_strings() {
        let row = vec![
            FieldValue::Str("b".into()),
            FieldValue::PostingMap(vec![("1".into(), "1".into()), ("2".into(), "1".into())]),
            FieldValue::Int(2),
        ];
        assert_eq!(tuple_size(&CostModel::default(), &row), 40 + 5 + 2 * 10 + 4);
    }

    #[test]
    fn encoded_width_equals_cost() {
        for cost in [
            CostModel::default(),
            CostModel::default().with_encoding(PostingEncoding::Point16),
            CostModel {
                tuple_overhead_bytes: 3,
                field_bytes: 8,
                string_header_bytes: 6,
                posting_element_bytes: 16,
                ..CostModel::default()
            },
        ] {
            let row = vec![
                FieldValue::Str("word".into()),
                FieldValue::PostingArray(vec![PostingEntry::new(3, 9), PostingEntry::new(10, 1)]),
                FieldValue::Int(-5),
                FieldValue::Float(1.5),
            ];
            let mut buf = Vec::new();
            encode_tuple(&mut buf, &cost, 12, &row);
            assert_eq!(buf.len() as u64, tuple_size(&cost, &row));
            let mut r = TupleReader::new(&buf, &cost, 2);
            let decoded: Tuple = [
                FieldKind::Str,
                FieldKind::PostingArray,
                FieldKind::Int,
                FieldKind::Float,
            ]
            .into_iter()
            .map(|k| r.read(k))
            .collect();
            assert_eq!(decoded, row);
        }
    }

    #[test]
    fn schema_rejects_two_collections_and_duplicates() {
        assert!(
            Schema::new([("a", FieldKind::PostingArray), ("b", FieldKind::PostingMap)]).is_err()
        );
        assert!(Schema::new([("a", FieldKind::Int), ("a", FieldKind::Int)]).is_err());
        assert!(Schema::new(Vec::<(String, FieldKind)>::new()).is_err());
    }

    #[test]
    fn map_invariants() {
        let ok = FieldValue::PostingMap(vec![("2".into(), "1".into()), ("10".into(), "3".into())]);
        assert!(ok.check_invariants().is_ok());
        let unsorted =
            FieldValue::PostingMap(vec![("10".into(), "1".into()), ("2".into(), "3".into())]);
        assert!(unsorted.check_invariants().is_err());
        let padded = FieldValue::PostingMap(vec![("02".into(), "1".into())]);
        assert!(padded.check_invariants().is_err());
        let arr = FieldValue::PostingArray(vec![PostingEntry::new(2, 1), PostingEntry::new(2, 1)]);
        assert!(arr.check_invariants().is_err());
    }
}
