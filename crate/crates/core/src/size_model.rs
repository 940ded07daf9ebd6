//! Closed-form occurrence-table size estimates over corpus statistics.
//!
//! Only the occurrence table is modeled; document and word tables are
//! measured by the engine.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::storage::CostModel;

/// Corpus size statistics.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct CorpusStats {
    /// Total word occurrences in the collection.
    pub n: u64,
    /// Number of documents.
    pub d: u64,
    /// Sum over documents of their distinct word count.
    pub n_d: u64,
    /// Number of distinct words.
    pub w: u64,
}

impl CorpusStats {
    pub fn new(n: u64, d: u64, n_d: u64, w: u64) -> Self {
        CorpusStats { n, d, n_d, w }
    }

    /// Average distinct words per document.
    pub fn w_avg(&self) -> f64 {
        if self.d == 0 {
            0.0
        } else {
            self.n_d as f64 / self.d as f64
        }
    }

    /// `D ≤ N_d ≤ D·W`, `W ≤ N_d ≤ N`. The all-zero empty corpus is valid.
    pub fn validate(&self) -> Result<()> {
        let CorpusStats { n, d, n_d, w } = *self;
        let bad = |msg: String| Err(Error::InvalidStats(msg));
        if *self == CorpusStats::default() {
            return Ok(());
        }
        if n_d < d {
            return bad(format!("N_d={n_d} < D={d}"));
        }
        if n_d as u128 > d as u128 * w as u128 {
            return bad(format!("N_d={n_d} > D*W={}", d as u128 * w as u128));
        }
        if w > n_d {
            return bad(format!("W={w} > N_d={n_d}"));
        }
        if n_d > n {
            return bad(format!("N_d={n_d} > N={n}"));
        }
        Ok(())
    }
}

/// PR occurrence bytes: `N_d(3f + t)`, plus `N(3f + t)` with positions.
pub fn estimate_pr(stats: &CorpusStats, cost: &CostModel, with_positions: bool) -> u64 {
    let row = 3 * cost.field_bytes as u64 + cost.tuple_overhead_bytes as u64;
    let mut bytes = stats.n_d * row;
    if with_positions {
        bytes += stats.n * row;
    }
    bytes
}

/// OR occurrence bytes: `W(f + t) + N_d·2f`, plus `N·f` with positions.
///
/// Uses `2f` per posting, i.e. the pair encoding, regardless of
/// `cost.posting_element_bytes`.
pub fn estimate_orif(stats: &CorpusStats, cost: &CostModel, with_positions: bool) -> u64 {
    let f = cost.field_bytes as u64;
    let t = cost.tuple_overhead_bytes as u64;
    let mut bytes = stats.w * (f + t) + stats.n_d * 2 * f;
    if with_positions {
        bytes += stats.n * f;
    }
    bytes
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Smaller {
    Orif,
    Pr,
    Equal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Comparison {
    pub smaller: Smaller,
    pub pr_bytes: u64,
    pub orif_bytes: u64,
}

/// Which occurrence layout is smaller, without positions.
pub fn compare(stats: &CorpusStats, cost: &CostModel) -> Comparison {
    let pr_bytes = estimate_pr(stats, cost, false);
    let orif_bytes = estimate_orif(stats, cost, false);
    let smaller = match orif_bytes.cmp(&pr_bytes) {
        std::cmp::Ordering::Less => Smaller::Orif,
        std::cmp::Ordering::Equal => Smaller::Equal,
        std::cmp::Ordering::Greater => Smaller::Pr,
    };
    Comparison {
        smaller,
        pr_bytes,
        orif_bytes,
    }
}

fn check_len(name: &str, v: f64) -> Result<()> {
    if v.is_nan() || v < 1.0 {
        return Err(Error::InvalidArgument(format!(
            "{name} must be at least 1, got {v}"
        )));
    }
    Ok(())
}

/// COR occurrence bytes: `W(t + h + name + f) + N_d·e`, where `h` is the
/// string header and `e` the posting element width.
pub fn estimate_cor(stats: &CorpusStats, cost: &CostModel, avg_name_len: f64) -> Result<f64> {
    check_len("avg_name_len", avg_name_len)?;
    let per_word = cost.tuple_overhead_bytes as f64
        + cost.string_header_bytes as f64
        + avg_name_len
        + cost.field_bytes as f64;
    Ok(stats.w as f64 * per_word + stats.n_d as f64 * cost.posting_element_bytes as f64)
}

/// HOR occurrence bytes: `W(t + h + name + f) + N_d(2h + docid + tf)`, where
/// the lengths are of the decimal texts.
pub fn estimate_hor(
    stats: &CorpusStats,
    cost: &CostModel,
    avg_name_len: f64,
    avg_docid_len: f64,
    avg_tf_len: f64,
) -> Result<f64> {
    check_len("avg_name_len", avg_name_len)?;
    check_len("avg_docid_len", avg_docid_len)?;
    check_len("avg_tf_len", avg_tf_len)?;
    let h = cost.string_header_bytes as f64;
    let per_word = cost.tuple_overhead_bytes as f64 + h + avg_name_len + cost.field_bytes as f64;
    Ok(stats.w as f64 * per_word + stats.n_d as f64 * (2.0 * h + avg_docid_len + avg_tf_len))
}

/// Upper bound on `estimate_pr / estimate_orif` without positions.
pub fn ratio_ceiling(cost: &CostModel) -> f64 {
    (3 * cost.field_bytes + cost.tuple_overhead_bytes) as f64 / (2 * cost.field_bytes) as f64
}
