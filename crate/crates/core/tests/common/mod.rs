//! Brute-force reference implementations shared by the integration tests.
//!
//! Nothing here calls into the engine: tokenization, counting, weights and
//! cosine similarity are recomputed directly from the raw corpus text.

#![allow(dead_code)]

use std::collections::{BTreeMap, HashMap, HashSet};

use orif_core::engine::{Corpus, RankedResult};

pub fn tokens(text: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut cur = String::new();
    for c in text.chars() {
        if c.is_alphanumeric() {
            cur.extend(c.to_lowercase());
        } else if !cur.is_empty() {
            out.push(std::mem::take(&mut cur));
        }
    }
    if !cur.is_empty() {
        out.push(cur);
    }
    out
}

/// Full tf-idf vectors of a corpus.
pub struct Oracle {
    pub d: usize,
    /// Term counts per document; index 0 is document id 1.
    pub counts: Vec<BTreeMap<String, u32>>,
    pub df: BTreeMap<String, u32>,
}

impl Oracle {
    pub fn new(corpus: &Corpus) -> Self {
        let counts: Vec<BTreeMap<String, u32>> = corpus
            .docs
            .iter()
            .map(|doc| {
                let mut m = BTreeMap::new();
                for t in tokens(&doc.text) {
                    *m.entry(t).or_insert(0) += 1;
                }
                m
            })
            .collect();
        let mut df = BTreeMap::new();
        for m in &counts {
            for t in m.keys() {
                *df.entry(t.clone()).or_insert(0) += 1;
            }
        }
        Oracle {
            d: counts.len(),
            counts,
            df,
        }
    }

    pub fn idf(&self, term: &str) -> f64 {
        match self.df.get(term) {
            Some(&df) => (self.d as f64 / df as f64).ln(),
            None => 0.0,
        }
    }

    fn vector(&self, counts: &BTreeMap<String, u32>) -> HashMap<String, f64> {
        counts
            .iter()
            .map(|(t, &tf)| (t.clone(), tf as f64 * self.idf(t)))
            .collect()
    }

    fn length(v: &HashMap<String, f64>) -> f64 {
        v.values().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn norm(&self, doc_id: u32) -> f64 {
        Self::length(&self.vector(&self.counts[doc_id as usize - 1]))
    }

    /// Every document with positive cosine, by (score desc, id asc).
    pub fn rank(&self, query: &str) -> Vec<(u32, f64)> {
        let mut q = BTreeMap::new();
        for t in tokens(query) {
            *q.entry(t).or_insert(0) += 1;
        }
        let qv = self.vector(&q);
        let qn = Self::length(&qv);
        let mut out = Vec::new();
        if qn == 0.0 {
            return out;
        }
        for (i, counts) in self.counts.iter().enumerate() {
            let dv = self.vector(counts);
            let dot: f64 = qv
                .iter()
                .map(|(t, w)| w * dv.get(t).copied().unwrap_or(0.0))
                .sum();
            let dn = Self::length(&dv);
            if dot > 0.0 && dn > 0.0 {
                out.push((i as u32 + 1, dot / (dn * qn)));
            }
        }
        out.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
        out
    }

    /// Terms of `docs` by summed tf, excluding the query's terms.
    pub fn expand(&self, docs: &[u32], query: &str, n_terms: usize) -> Vec<String> {
        let own: HashSet<String> = tokens(query).into_iter().collect();
        let mut sums: BTreeMap<String, u64> = BTreeMap::new();
        for &d in docs {
            for (t, &tf) in &self.counts[d as usize - 1] {
                if !own.contains(t) {
                    *sums.entry(t.clone()).or_insert(0) += tf as u64;
                }
            }
        }
        let mut v: Vec<(String, u64)> = sums.into_iter().collect();
        v.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
        v.into_iter().take(n_terms).map(|(t, _)| t).collect()
    }

    /// `(N, D, N_d, W)`.
    pub fn stats(&self) -> (u64, u64, u64, u64) {
        let n = self
            .counts
            .iter()
            .flat_map(|m| m.values())
            .map(|&c| c as u64)
            .sum();
        let n_d = self.counts.iter().map(|m| m.len() as u64).sum();
        (n, self.d as u64, n_d, self.df.len() as u64)
    }
}

/// Checks an engine ranking against the oracle ranking: same documents,
/// scores within `tol`, and engine order non-increasing in oracle score up to
/// `tol` (near-equal scores may swap because norms are stored as f32).
pub fn check_against_oracle(
    got: &[RankedResult],
    want: &[(u32, f64)],
    tol: f64,
) -> Result<(), String> {
    if got.len() != want.len() {
        return Err(format!("{} results, oracle has {}", got.len(), want.len()));
    }
    let oracle: HashMap<u32, f64> = want.iter().copied().collect();
    let mut prev = f64::INFINITY;
    for r in got {
        let Some(&s) = oracle.get(&r.doc_id) else {
            return Err(format!("document {} not in oracle result", r.doc_id));
        };
        if (s - r.score).abs() > tol {
            return Err(format!(
                "document {}: score {} vs oracle {}",
                r.doc_id, r.score, s
            ));
        }
        if s > prev + tol {
            return Err(format!(
                "document {} ranked after a lower-scoring document",
                r.doc_id
            ));
        }
        prev = prev.min(s);
        if !(-1e-9..=1.0 + 1e-9).contains(&r.score) {
            return Err(format!("score {} outside [0, 1]", r.score));
        }
    }
    Ok(())
}
