//! Typed tuple storage on fixed-size pages.
//!
//! Every value is written at exactly the width the [`CostModel`] charges for
//! it, so table byte and page counts are the physical sizes of the page
//! images, not estimates.

mod cost;
mod heap;
mod value;

pub use cost::{CostModel, PostingEncoding};
pub use heap::{HeapTable, RowId, TableStats};
pub use value::{
    parse_decimal, tuple_size, Attribute, FieldKind, FieldValue, PostingEntry, Schema, Tuple,
};
