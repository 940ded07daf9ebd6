//! Four database representations of a text index (PR, OR, COR, HOR) over a
//! page-based storage cost model, with tf-idf vector-space query evaluation,
//! an analytic size model and a benchmark harness.

pub mod access_paths;
pub mod bench;
pub mod engine;
pub mod error;
pub mod par;
pub mod persist;
pub mod representations;
pub mod size_model;
pub mod storage;

pub use error::{Error, Result};
