use std::hash::{DefaultHasher, Hash, Hasher};

use super::IndexKey;
use crate::storage::{CostModel, RowId};

pub const TARGET_LOAD_FACTOR: f64 = 0.75;

fn hash_key(key: &IndexKey) -> u64 {
    let mut h = DefaultHasher::new();
    key.hash(&mut h);
    h.finish()
}

/// Static hash index, bulk-built with its bucket count fixed at build time.
///
/// Each indexed row costs one entry of a hash code plus a row reference.
/// The directory is sized so that `entries / (buckets * entries_per_page)`
/// stays at or below [`TARGET_LOAD_FACTOR`]; skewed buckets chain overflow
/// pages. One extra page holds the directory.
#[derive(Debug, Clone)]
pub struct HashIndex {
    /// Per bucket: `(hash, key, rows)` sorted by `(hash, key)`.
    buckets: Vec<Vec<(u64, IndexKey, Vec<RowId>)>>,
    entries: u64,
    slots_per_page: u64,
    pages: u64,
}

impl HashIndex {
    pub(crate) fn bulk_load(groups: Vec<(IndexKey, Vec<RowId>)>, cost: &CostModel) -> Self {
        let entry_bytes = 2 * cost.field_bytes as u64;
        let slots_per_page = (cost.page_bytes as u64 / entry_bytes).max(1);
        let entries: u64 = groups.iter().map(|(_, rows)| rows.len() as u64).sum();
        let bucket_count = ((entries as f64 / (TARGET_LOAD_FACTOR * slots_per_page as f64)).ceil()
            as usize)
            .max(1);
        let mut buckets: Vec<Vec<(u64, IndexKey, Vec<RowId>)>> = vec![Vec::new(); bucket_count];
        for (key, rows) in groups {
            let h = hash_key(&key);
            buckets[(h % bucket_count as u64) as usize].push((h, key, rows));
        }
        let mut pages = 1;
        for bucket in &mut buckets {
            bucket.sort_by(|a, b| (a.0, &a.1).cmp(&(b.0, &b.1)));
            let n: u64 = bucket.iter().map(|(_, _, r)| r.len() as u64).sum();
            pages += n.div_ceil(slots_per_page).max(1);
        }
        HashIndex {
            buckets,
            entries,
            slots_per_page,
            pages,
        }
    }

    pub fn lookup(&self, key: &IndexKey) -> &[RowId] {
        let h = hash_key(key);
        let bucket = &self.buckets[(h % self.buckets.len() as u64) as usize];
        match bucket.binary_search_by(|(eh, ek, _)| (*eh, ek).cmp(&(h, key))) {
            Ok(i) => &bucket[i].2,
            Err(_) => &[],
        }
    }

    pub fn pages(&self) -> u64 {
        self.pages
    }

    pub fn bucket_count(&self) -> usize {
        self.buckets.len()
    }

    pub fn load_factor(&self) -> f64 {
        self.entries as f64 / (self.buckets.len() as u64 * self.slots_per_page) as f64
    }

    pub fn iter(&self) -> impl Iterator<Item = (&IndexKey, &[RowId])> + '_ {
        self.buckets
            .iter()
            .flatten()
            .map(|(_, k, rows)| (k, rows.as_slice()))
    }
}
