use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Document {
    pub url: String,
    pub text: String,
}

impl Document {
    pub fn new(url: impl Into<String>, text: impl Into<String>) -> Self {
        Document {
            url: url.into(),
            text: text.into(),
        }
    }
}

/// Ordered documents; the i-th document (0-based) gets id `i + 1`.
///
/// On disk: one document per line, `url<TAB>text`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Corpus {
    pub docs: Vec<Document>,
}

impl Corpus {
    pub fn new(docs: Vec<Document>) -> Self {
        Corpus { docs }
    }

    /// Builds a corpus from bare texts with urls `doc:1`, `doc:2`, ...
    pub fn from_texts<S: AsRef<str>>(texts: &[S]) -> Self {
        Corpus {
            docs: texts
                .iter()
                .enumerate()
                .map(|(i, t)| Document::new(format!("doc:{}", i + 1), t.as_ref()))
                .collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.docs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.docs.is_empty()
    }

    pub fn read<R: Read>(reader: R) -> Result<Self> {
        let mut docs = Vec::new();
        for (i, line) in BufReader::new(reader).lines().enumerate() {
            let line = line?;
            let line = line.strip_suffix('\r').unwrap_or(&line);
            let (url, text) = line.split_once('\t').ok_or_else(|| Error::CorpusFormat {
                line: i + 1,
                reason: "expected `url<TAB>text`".into(),
            })?;
            if url.is_empty() {
                return Err(Error::CorpusFormat {
                    line: i + 1,
                    reason: "empty url".into(),
                });
            }
            docs.push(Document::new(url, text));
        }
        Ok(Corpus { docs })
    }

    pub fn write<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = BufWriter::new(writer);
        for d in &self.docs {
            if d.url.contains(['\t', '\n', '\r']) || d.text.contains(['\n', '\r']) {
                return Err(Error::InvalidArgument(format!(
                    "document `{}` cannot be written as a single line",
                    d.url
                )));
            }
            writeln!(w, "{}\t{}", d.url, d.text)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Corpus::read(File::open(path)?)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        self.write(File::create(path)?)
    }
}
