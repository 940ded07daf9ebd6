//! Saving and loading a built index as a directory.
//!
//! Layout: `manifest.txt` (one `key=value` per line) plus one `<table>.tbl`
//! page file per table. Access paths are not stored; loading rebuilds them.

use std::collections::BTreeMap;
use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Write};
use std::path::Path;
use std::str::FromStr;

use crate::access_paths::IndexKind;
use crate::error::{Error, Result};
use crate::representations::{
    document_schema, occurrence_schema, word_schema, BuildTimings, IndexPlan, Paths, RepKind,
    SearchIndex,
};
use crate::size_model::CorpusStats;
use crate::storage::{CostModel, HeapTable, Schema};

const FORMAT: &str = "orif-index-1";
const MANIFEST: &str = "manifest.txt";

fn manifest(index: &SearchIndex) -> String {
    let c = index.cost();
    let s = index.stats();
    let p = index.plan();
    let mut lines = vec![
        format!("format={FORMAT}"),
        format!("kind={}", index.kind()),
        format!("cost.tuple_overhead_bytes={}", c.tuple_overhead_bytes),
        format!("cost.field_bytes={}", c.field_bytes),
        format!("cost.page_bytes={}", c.page_bytes),
        format!("cost.string_header_bytes={}", c.string_header_bytes),
        format!("cost.posting_element_bytes={}", c.posting_element_bytes),
        format!("stats.n={}", s.n),
        format!("stats.d={}", s.d),
        format!("stats.n_d={}", s.n_d),
        format!("stats.w={}", s.w),
        format!("plan.primary={}", p.label()),
        format!("plan.pr_doc_id={}", p.pr_doc_id),
        format!("plan.hor_key_index={}", p.hor_key_index),
    ];
    for t in index.tables() {
        let st = t.stats();
        lines.push(format!(
            "table.{}={},{},{}",
            t.name(),
            st.tuples,
            st.bytes,
            st.pages
        ));
    }
    lines.join("\n") + "\n"
}

/// Writes `index` into `dir`, creating it if needed. The output depends only
/// on the index contents.
pub fn save(index: &SearchIndex, dir: impl AsRef<Path>) -> Result<()> {
    let dir = dir.as_ref();
    fs::create_dir_all(dir)?;
    for t in index.tables() {
        let mut w = BufWriter::new(File::create(dir.join(format!("{}.tbl", t.name())))?);
        t.write_to(&mut w)?;
        w.flush()?;
    }
    fs::write(dir.join(MANIFEST), manifest(index))?;
    Ok(())
}

struct Manifest(BTreeMap<String, String>);

impl Manifest {
    fn parse(text: &str) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (i, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| {
                Error::Corrupt(format!("manifest line {}: expected key=value", i + 1))
            })?;
            map.insert(k.to_owned(), v.to_owned());
        }
        Ok(Manifest(map))
    }

    fn get(&self, key: &str) -> Result<&str> {
        self.0
            .get(key)
            .map(String::as_str)
            .ok_or_else(|| Error::Corrupt(format!("manifest is missing `{key}`")))
    }

    fn parse_value<T: FromStr>(&self, key: &str) -> Result<T> {
        let v = self.get(key)?;
        v.parse()
            .map_err(|_| Error::Corrupt(format!("manifest `{key}` has invalid value `{v}`")))
    }
}

fn load_table(
    dir: &Path,
    name: &str,
    schema: Schema,
    cost: &CostModel,
    m: &Manifest,
) -> Result<HeapTable> {
    let table = HeapTable::read_from(&mut BufReader::new(File::open(
        dir.join(format!("{name}.tbl")),
    )?))?;
    if table.name() != name || *table.schema() != schema || table.cost() != cost {
        return Err(Error::Corrupt(format!(
            "{name}.tbl does not match the manifest"
        )));
    }
    let st = table.stats();
    if m.get(&format!("table.{name}"))? != format!("{},{},{}", st.tuples, st.bytes, st.pages) {
        return Err(Error::Corrupt(format!(
            "{name}.tbl size differs from the manifest"
        )));
    }
    Ok(table)
}

/// Reads an index written by [`save`] and rebuilds its access paths.
pub fn load(dir: impl AsRef<Path>) -> Result<SearchIndex> {
    let dir = dir.as_ref();
    let m = Manifest::parse(&fs::read_to_string(dir.join(MANIFEST))?)?;
    if m.get("format")? != FORMAT {
        return Err(Error::Corrupt(format!(
            "unsupported index format `{}`",
            m.get("format")?
        )));
    }
    let kind: RepKind = m.parse_value("kind")?;
    let cost = CostModel {
        tuple_overhead_bytes: m.parse_value("cost.tuple_overhead_bytes")?,
        field_bytes: m.parse_value("cost.field_bytes")?,
        page_bytes: m.parse_value("cost.page_bytes")?,
        string_header_bytes: m.parse_value("cost.string_header_bytes")?,
        posting_element_bytes: m.parse_value("cost.posting_element_bytes")?,
    };
    cost.validate()?;
    let stats = CorpusStats {
        n: m.parse_value("stats.n")?,
        d: m.parse_value("stats.d")?,
        n_d: m.parse_value("stats.n_d")?,
        w: m.parse_value("stats.w")?,
    };
    let primary = match m.get("plan.primary")? {
        "none" => None,
        other => Some(
            IndexKind::from_str(other)
                .map_err(|_| Error::Corrupt(format!("unknown index kind `{other}`")))?,
        ),
    };
    let plan = IndexPlan {
        primary,
        pr_doc_id: m.parse_value("plan.pr_doc_id")?,
        hor_key_index: m.parse_value("plan.hor_key_index")?,
    };

    let document = load_table(dir, "document", document_schema(), &cost, &m)?;
    let word = if kind.has_word_table() {
        Some(load_table(dir, "word", word_schema(), &cost, &m)?)
    } else {
        None
    };
    let occurrence = load_table(dir, "occurrence", occurrence_schema(kind), &cost, &m)?;
    let mut index = SearchIndex {
        kind,
        cost,
        stats,
        plan: IndexPlan::none(),
        document,
        word,
        occurrence,
        paths: Paths::default(),
        timings: BuildTimings::default(),
    };
    index.build_paths(plan)?;
    Ok(index)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::{bulk_build, evaluate_query, BuildConfig, Corpus};

    fn read_dir(dir: &Path) -> BTreeMap<String, Vec<u8>> {
        fs::read_dir(dir)
            .unwrap()
            .map(|e| {
                let e = e.unwrap();
                (
                    e.file_name().to_string_lossy().into_owned(),
                    fs::read(e.path()).unwrap(),
                )
            })
            .collect()
    }

    #[test]
    fn round_trip_and_determinism() {
        let corpus = Corpus::from_texts(&["a b a", "b c", "c"]);
        let config = BuildConfig {
            plan: IndexPlan {
                primary: Some(IndexKind::Hash),
                pr_doc_id: true,
                hor_key_index: true,
            },
            ..Default::default()
        };
        for kind in RepKind::ALL {
            let idx = bulk_build(&corpus, kind, &config).unwrap();
            let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
            save(&idx, a.path()).unwrap();
            save(&bulk_build(&corpus, kind, &config).unwrap(), b.path()).unwrap();
            assert_eq!(read_dir(a.path()), read_dir(b.path()), "{kind}");

            let loaded = load(a.path()).unwrap();
            assert!(loaded.same_contents(&idx), "{kind}");
            assert_eq!(
                evaluate_query(&loaded, "b", 10).unwrap(),
                evaluate_query(&idx, "b", 10).unwrap()
            );
        }
    }

    #[test]
    fn tampered_manifest_rejected() {
        let idx = bulk_build(
            &Corpus::from_texts(&["x y", "y"]),
            RepKind::Or,
            &BuildConfig::default(),
        )
        .unwrap();
        let dir = tempfile::tempdir().unwrap();
        save(&idx, dir.path()).unwrap();
        let path = dir.path().join(MANIFEST);
        let text = fs::read_to_string(&path).unwrap();
        fs::write(&path, text.replace("kind=or", "kind=cor")).unwrap();
        assert!(load(dir.path()).is_err());
        fs::write(&path, text.replace("format=", "format=x")).unwrap();
        assert!(load(dir.path()).is_err());
        fs::remove_file(dir.path().join("word.tbl")).unwrap();
        fs::write(&path, text).unwrap();
        assert!(matches!(load(dir.path()), Err(Error::Io(_))));
    }
}
