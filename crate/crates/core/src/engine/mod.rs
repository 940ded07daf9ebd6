//! End-to-end pipeline: tokenization, posting extraction, bulk and
//! incremental builds, ranked retrieval and query expansion.

mod build;
mod corpus;
mod query;

pub use build::{add_documents, bulk_build, compute_postings, document_norms, BuildConfig};
pub use corpus::{Corpus, Document};
pub use query::{
    evaluate, evaluate_batch, evaluate_query, expand_query, QueryOptions, QueryOutcome,
    QueryTimings, RankedResult, DEFAULT_CHUNK_SIZE,
};

/// Lowercases `text` and splits it on every non-alphanumeric character.
pub fn tokenize(text: &str) -> Vec<String> {
    text.split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty())
        .map(str::to_lowercase)
        .collect()
}

/// `ln(D / df)`; zero for unseen terms.
pub fn idf(d: u64, df: u32) -> f64 {
    if df == 0 {
        0.0
    } else {
        (d as f64 / df as f64).ln()
    }
}
