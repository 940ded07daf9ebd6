use std::io::{Read, Write};

use serde::Serialize;

use super::cost::CostModel;
use super::value::{encode_tuple, tuple_size, FieldKind, FieldValue, Schema, Tuple, TupleReader};
use crate::error::{Error, Result};

/// Position of a tuple in its table, in insertion order.
pub type RowId = u32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct TableStats {
    pub tuples: u64,
    pub bytes: u64,
    pub pages: u64,
}

/// Line pointer kept outside the page payload.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Slot {
    offset: u64,
    len: u32,
    /// Element count of the collection attribute, if any.
    aux: u32,
}

/// Append-only heap of tuples packed onto fixed-size pages.
///
/// Pages carry no header, so the whole `page_bytes` is payload. A tuple is
/// placed on the current page if it fits, otherwise a new page is started;
/// tuples larger than a page get `ceil(size / page_bytes)` pages of their own.
#[derive(Debug, Clone, PartialEq)]
pub struct HeapTable {
    name: String,
    schema: Schema,
    cost: CostModel,
    data: Vec<u8>,
    slots: Vec<Slot>,
    /// Bytes used on the last page; `page_bytes` when no page is open.
    fill: u32,
    stats: TableStats,
}

impl HeapTable {
    pub fn new(name: impl Into<String>, schema: Schema, cost: CostModel) -> Result<Self> {
        cost.validate()?;
        Ok(HeapTable {
            name: name.into(),
            schema,
            cost,
            data: Vec::new(),
            slots: Vec::new(),
            fill: cost.page_bytes,
            stats: TableStats::default(),
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn schema(&self) -> &Schema {
        &self.schema
    }

    pub fn cost(&self) -> &CostModel {
        &self.cost
    }

    pub fn len(&self) -> usize {
        self.slots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.slots.is_empty()
    }

    pub fn stats(&self) -> TableStats {
        self.stats
    }

    pub fn column(&self, name: &str) -> Result<usize> {
        self.schema
            .position(name)
            .ok_or_else(|| Error::UnknownAttribute {
                table: self.name.clone(),
                attribute: name.to_owned(),
            })
    }

    fn pad_to_page(&mut self) {
        let pb = self.cost.page_bytes as usize;
        let padded = self.data.len().div_ceil(pb) * pb;
        self.data.resize(padded, 0);
    }

    fn append(&mut self, row: &[FieldValue]) -> u64 {
        let size = tuple_size(&self.cost, row);
        let pb = self.cost.page_bytes;
        let oversized = size > pb as u64;
        if oversized || self.fill as u64 + size > pb as u64 {
            self.pad_to_page();
            self.fill = 0;
        }
        let offset = self.data.len() as u64;
        let row_id = self.slots.len() as u64;
        encode_tuple(&mut self.data, &self.cost, row_id, row);
        debug_assert_eq!(self.data.len() as u64 - offset, size);
        if oversized {
            self.pad_to_page();
            self.fill = pb;
        } else {
            self.fill += size as u32;
        }
        self.slots.push(Slot {
            offset,
            len: size as u32,
            aux: row.iter().find_map(FieldValue::collection_len).unwrap_or(0),
        });
        size
    }

    /// Bulk-appends `rows` in stream order without touching any access path.
    ///
    /// The whole batch is rejected, leaving the table unchanged, if any row
    /// does not conform to the schema.
    pub fn copy_into<I>(&mut self, rows: I) -> Result<usize>
    where
        I: IntoIterator<Item = Tuple>,
    {
        let (data_len, slot_len, fill) = (self.data.len(), self.slots.len(), self.fill);
        let mut added = 0u64;
        for (i, row) in rows.into_iter().enumerate() {
            if let Err(reason) = self.schema.check(&row) {
                self.data.truncate(data_len);
                self.slots.truncate(slot_len);
                self.fill = fill;
                return Err(Error::SchemaMismatch {
                    table: self.name.clone(),
                    row: i,
                    reason,
                });
            }
            added += self.append(&row);
        }
        let inserted = self.slots.len() - slot_len;
        self.stats = TableStats {
            tuples: self.slots.len() as u64,
            bytes: self.stats.bytes + added,
            pages: (self.data.len() as u64).div_ceil(self.cost.page_bytes as u64),
        };
        Ok(inserted)
    }

    /// Removes every tuple.
    pub fn truncate(&mut self) {
        self.data.clear();
        self.slots.clear();
        self.fill = self.cost.page_bytes;
        self.stats = TableStats::default();
    }

    fn slot(&self, row: RowId) -> Result<Slot> {
        self.slots
            .get(row as usize)
            .copied()
            .ok_or(Error::RowOutOfRange(row as usize))
    }

    fn reader(&self, row: RowId) -> Result<TupleReader<'_>> {
        let slot = self.slot(row)?;
        let start = slot.offset as usize;
        Ok(TupleReader::new(
            &self.data[start..start + slot.len as usize],
            &self.cost,
            slot.aux,
        ))
    }

    pub fn get(&self, row: RowId) -> Result<Tuple> {
        let mut r = self.reader(row)?;
        Ok(self
            .schema
            .attributes()
            .iter()
            .map(|a| r.read(a.kind))
            .collect())
    }

    /// Decodes only the listed columns, which must be in ascending order.
    pub fn project(&self, row: RowId, columns: &[usize]) -> Result<Tuple> {
        debug_assert!(columns.windows(2).all(|w| w[0] < w[1]));
        let mut r = self.reader(row)?;
        let mut out = Vec::with_capacity(columns.len());
        let mut next = 0;
        for &col in columns {
            while next < col {
                r.skip(self.schema.kind(next));
                next += 1;
            }
            out.push(r.read(self.schema.kind(col)));
            next += 1;
        }
        Ok(out)
    }

    pub fn field(&self, row: RowId, column: usize) -> Result<FieldValue> {
        Ok(self
            .project(row, &[column])?
            .pop()
            .expect("one column projected"))
    }

    /// Looks up `key` inside the posting-map attribute `column` of `row`.
    pub fn map_get(&self, row: RowId, column: usize, key: &str) -> Result<Option<String>> {
        let mut r = self.reader(row)?;
        for c in 0..column {
            r.skip(self.schema.kind(c));
        }
        Ok(r.find_in_map(key).map(str::to_owned))
    }

    /// tf of `doc_id` in the posting array at `column`, by binary search.
    pub fn posting_get(&self, row: RowId, column: usize, doc_id: u32) -> Result<Option<u32>> {
        if self.schema.kind(column) != FieldKind::PostingArray {
            return Err(Error::InvalidArgument(format!(
                "{}.{} is not a posting array",
                self.name,
                self.schema.attributes()[column].name
            )));
        }
        let mut r = self.reader(row)?;
        for c in 0..column {
            r.skip(self.schema.kind(c));
        }
        Ok(r.find_posting(doc_id))
    }

    pub fn scan(&self) -> impl Iterator<Item = (RowId, Tuple)> + '_ {
        (0..self.slots.len() as RowId).map(move |row| (row, self.get(row).expect("row in range")))
    }

    /// Overwrites a fixed-width field in place.
    pub fn update_field(&mut self, row: RowId, column: usize, value: FieldValue) -> Result<()> {
        let slot = self.slot(row)?;
        let kind = self.schema.kind(column);
        if !matches!(kind, FieldKind::Int | FieldKind::Float) || value.kind() != kind {
            return Err(Error::SchemaMismatch {
                table: self.name.clone(),
                row: row as usize,
                reason: format!(
                    "in-place update needs a fixed-width {} value, got {}",
                    kind,
                    value.kind()
                ),
            });
        }
        let start = slot.offset as usize;
        let offset = {
            let mut r = TupleReader::new(
                &self.data[start..start + slot.len as usize],
                &self.cost,
                slot.aux,
            );
            for c in 0..column {
                r.skip(self.schema.kind(c));
            }
            r.position()
        };
        let bytes = match value {
            FieldValue::Int(v) => v.to_le_bytes(),
            FieldValue::Float(v) => v.to_le_bytes(),
            _ => unreachable!(),
        };
        self.data[start + offset..start + offset + 4].copy_from_slice(&bytes);
        Ok(())
    }

    /// Serializes the table: header, line pointers, then whole page images.
    pub fn write_to<W: Write>(&self, w: &mut W) -> Result<()> {
        w.write_all(MAGIC)?;
        write_str(w, &self.name)?;
        for v in [
            self.cost.tuple_overhead_bytes,
            self.cost.field_bytes,
            self.cost.page_bytes,
            self.cost.string_header_bytes,
            self.cost.posting_element_bytes,
        ] {
            w.write_all(&v.to_le_bytes())?;
        }
        w.write_all(&(self.schema.len() as u32).to_le_bytes())?;
        for a in self.schema.attributes() {
            w.write_all(&[a.kind.tag()])?;
            write_str(w, &a.name)?;
        }
        for v in [self.stats.tuples, self.stats.bytes, self.stats.pages] {
            w.write_all(&v.to_le_bytes())?;
        }
        w.write_all(&self.fill.to_le_bytes())?;
        w.write_all(&(self.slots.len() as u64).to_le_bytes())?;
        for s in &self.slots {
            w.write_all(&s.offset.to_le_bytes())?;
            w.write_all(&s.len.to_le_bytes())?;
            w.write_all(&s.aux.to_le_bytes())?;
        }
        w.write_all(&self.data)?;
        let full = self.stats.pages as usize * self.cost.page_bytes as usize;
        w.write_all(&vec![0u8; full - self.data.len()])?;
        Ok(())
    }

    pub fn read_from<R: Read>(r: &mut R) -> Result<Self> {
        let mut magic = [0u8; 8];
        r.read_exact(&mut magic)?;
        if &magic != MAGIC {
            return Err(Error::Corrupt("bad table magic".into()));
        }
        let name = read_str(r)?;
        let cost = CostModel {
            tuple_overhead_bytes: read_u32(r)?,
            field_bytes: read_u32(r)?,
            page_bytes: read_u32(r)?,
            string_header_bytes: read_u32(r)?,
            posting_element_bytes: read_u32(r)?,
        };
        cost.validate()?;
        let n_attrs = read_u32(r)?;
        let mut attrs = Vec::with_capacity(n_attrs as usize);
        for _ in 0..n_attrs {
            let mut tag = [0u8];
            r.read_exact(&mut tag)?;
            let kind = FieldKind::from_tag(tag[0])
                .ok_or_else(|| Error::Corrupt(format!("unknown field tag {}", tag[0])))?;
            attrs.push((read_str(r)?, kind));
        }
        let schema = Schema::new(attrs).map_err(Error::Corrupt)?;
        let stats = TableStats {
            tuples: read_u64(r)?,
            bytes: read_u64(r)?,
            pages: read_u64(r)?,
        };
        let fill = read_u32(r)?;
        let n_slots = read_u64(r)?;
        if n_slots != stats.tuples {
            return Err(Error::Corrupt(
                "slot count does not match tuple count".into(),
            ));
        }
        let mut slots = Vec::with_capacity(n_slots as usize);
        for _ in 0..n_slots {
            slots.push(Slot {
                offset: read_u64(r)?,
                len: read_u32(r)?,
                aux: read_u32(r)?,
            });
        }
        let pb = cost.page_bytes as u64;
        let mut data = vec![0u8; (stats.pages * pb) as usize];
        r.read_exact(&mut data)?;
        if fill < cost.page_bytes && stats.pages > 0 {
            data.truncate(((stats.pages - 1) * pb + fill as u64) as usize);
        }
        if slots
            .iter()
            .any(|s| s.offset + s.len as u64 > data.len() as u64)
        {
            return Err(Error::Corrupt("line pointer past end of data".into()));
        }
        Ok(HeapTable {
            name,
            schema,
            cost,
            data,
            slots,
            fill,
            stats,
        })
    }
}

const MAGIC: &[u8; 8] = b"ORIFTBL1";

fn write_str<W: Write>(w: &mut W, s: &str) -> Result<()> {
    w.write_all(&(s.len() as u32).to_le_bytes())?;
    w.write_all(s.as_bytes())?;
    Ok(())
}

fn read_u32<R: Read>(r: &mut R) -> Result<u32> {
    let mut b = [0u8; 4];
    r.read_exact(&mut b)?;
    Ok(u32::from_le_bytes(b))
}

fn read_u64<R: Read>(r: &mut R) -> Result<u64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(u64::from_le_bytes(b))
}

fn read_str<R: Read>(r: &mut R) -> Result<String> {
    let len = read_u32(r)? as usize;
    let mut buf = vec![0u8; len];
    r.read_exact(&mut buf)?;
    String::from_utf8(buf).map_err(|_| Error::Corrupt("non UTF-8 name".into()))
}
