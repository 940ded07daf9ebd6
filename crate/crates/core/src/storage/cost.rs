use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Physical encoding of a single `(doc_id, tf)` element inside a posting array.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PostingEncoding {
    /// Composite of an int4 doc id and a float4 tf, two `field_bytes` wide.
    Pair8,
    /// Two float8 coordinates, 16 bytes regardless of `field_bytes`.
    Point16,
}

impl PostingEncoding {
    pub fn as_str(self) -> &'static str {
        match self {
            PostingEncoding::Pair8 => "pair8",
            PostingEncoding::Point16 => "point16",
        }
    }
}

impl fmt::Display for PostingEncoding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for PostingEncoding {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "pair8" => Ok(PostingEncoding::Pair8),
            "point16" => Ok(PostingEncoding::Point16),
            other => Err(Error::InvalidArgument(format!(
                "unknown posting encoding `{other}` (expected pair8 or point16)"
            ))),
        }
    }
}

/// Byte costs every stored tuple, table and index page count derives from.
///
/// Tuples are written to page images using exactly these widths, so the
/// accounted size of a table is also its physical size.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CostModel {
    /// Per-tuple overhead `t`.
    pub tuple_overhead_bytes: u32,
    /// Width `f` of an int or float field.
    pub field_bytes: u32,
    pub page_bytes: u32,
    /// Length prefix of a string; a string costs header + length.
    pub string_header_bytes: u32,
    /// Width of one posting array element: `2 * field_bytes` or 16.
    pub posting_element_bytes: u32,
}

impl Default for CostModel {
    fn default() -> Self {
        CostModel {
            tuple_overhead_bytes: 40,
            field_bytes: 4,
            page_bytes: 8192,
            string_header_bytes: 4,
            posting_element_bytes: 8,
        }
    }
}

impl CostModel {
    pub fn with_encoding(mut self, encoding: PostingEncoding) -> Self {
        self.posting_element_bytes = match encoding {
            PostingEncoding::Pair8 => 2 * self.field_bytes,
            PostingEncoding::Point16 => 16,
        };
        self
    }

    /// The element encoding implied by `posting_element_bytes`. When
    /// `field_bytes` is 8 both encodings are 16 bytes wide; the pair layout wins.
    pub fn encoding(&self) -> PostingEncoding {
        if self.posting_element_bytes == 2 * self.field_bytes {
            PostingEncoding::Pair8
        } else {
            PostingEncoding::Point16
        }
    }

    pub fn validate(&self) -> Result<()> {
        let named = [
            ("tuple_overhead_bytes", self.tuple_overhead_bytes),
            ("field_bytes", self.field_bytes),
            ("page_bytes", self.page_bytes),
            ("string_header_bytes", self.string_header_bytes),
            ("posting_element_bytes", self.posting_element_bytes),
        ];
        for (name, value) in named {
            if value == 0 {
                return Err(Error::InvalidCostModel(format!("{name} must be positive")));
            }
        }
        // Values are written little-endian into the accounted widths; narrower
        // widths could not hold a 32-bit id or length.
        if self.field_bytes < 4 {
            return Err(Error::InvalidCostModel(
                "field_bytes must be at least 4".into(),
            ));
        }
        if self.string_header_bytes < 4 {
            return Err(Error::InvalidCostModel(
                "string_header_bytes must be at least 4".into(),
            ));
        }
        if self.posting_element_bytes != 2 * self.field_bytes && self.posting_element_bytes != 16 {
            return Err(Error::InvalidCostModel(format!(
                "posting_element_bytes must be 2*field_bytes ({}) or 16, got {}",
                2 * self.field_bytes,
                self.posting_element_bytes
            )));
        }
        Ok(())
    }

    pub fn string_cost(&self, len: usize) -> u64 {
        self.string_header_bytes as u64 + len as u64
    }

    pub fn pages_for(&self, bytes: u64) -> u64 {
        bytes.div_ceil(self.page_bytes as u64)
    }
}
