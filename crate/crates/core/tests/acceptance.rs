//! End-to-end acceptance checks. Each test prints one PASS/FAIL line.

mod common;

use std::collections::{BTreeMap, HashSet};
use std::io::Write;
use std::sync::{Mutex, OnceLock};
use std::time::Instant;

use orif_core::access_paths::{build_index, drop_index, rebuild_index, IndexKey, IndexKind};
use orif_core::bench::{
    bench_expand, bench_query, gen_corpus, random_queries, GenSpec, QueryBenchConfig,
};
use orif_core::engine::{
    add_documents, bulk_build, compute_postings, evaluate, evaluate_query, expand_query,
    BuildConfig, Corpus, QueryOptions,
};
use orif_core::par::Execution;
use orif_core::persist;
use orif_core::representations::{build_tables, IndexPlan, RepKind, SearchIndex};
use orif_core::size_model::{
    compare, estimate_cor, estimate_hor, estimate_orif, estimate_pr, ratio_ceiling, CorpusStats,
    Smaller,
};
use orif_core::storage::{CostModel, FieldValue, HeapTable};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::{check_against_oracle, Oracle};

type Outcome = Result<String, String>;

/// Keeps timing-sensitive criteria from overlapping with each other.
static SERIAL: Mutex<()> = Mutex::new(());

fn run(number: u32, name: &str, f: impl FnOnce() -> Outcome) {
    let _guard = SERIAL.lock().unwrap_or_else(|e| e.into_inner());
    let start = Instant::now();
    let outcome = f();
    let secs = start.elapsed().as_secs_f64();
    let line = match &outcome {
        Ok(detail) => format!("criterion {number:>2} {name}: PASS ({detail}; {secs:.1}s)\n"),
        Err(why) => format!("criterion {number:>2} {name}: FAIL ({why}; {secs:.1}s)\n"),
    };
    // Written past the test harness capture so the line is always shown.
    let mut out = std::io::stdout().lock();
    let _ = out.write_all(line.as_bytes());
    let _ = out.flush();
    if let Err(why) = outcome {
        panic!("criterion {number} failed: {why}");
    }
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn build(corpus: &Corpus, kind: RepKind, plan: IndexPlan) -> Result<SearchIndex, String> {
    bulk_build(
        corpus,
        kind,
        &BuildConfig {
            plan,
            ..Default::default()
        },
    )
    .map_err(err)
}

fn full_plan(primary: IndexKind) -> IndexPlan {
    IndexPlan {
        primary: Some(primary),
        pr_doc_id: true,
        hor_key_index: true,
    }
}

/// D = 20,000 documents of about 290 tokens (about 200 distinct), built once for the scale criteria.
struct Large {
    corpus: Corpus,
    /// PR and OR with a B+Tree on the term key and no document-side index.
    pr: SearchIndex,
    or: SearchIndex,
    cor: SearchIndex,
    /// HOR with the key-inverted index over its posting maps.
    hor: SearchIndex,
}

fn large() -> &'static Large {
    static LARGE: OnceLock<Large> = OnceLock::new();
    LARGE.get_or_init(|| {
        let corpus = gen_corpus(&GenSpec {
            docs: 20_000,
            vocab: 30_000,
            avg_words: 290,
            zipf_s: 1.0,
            seed: 20_000,
        })
        .expect("valid spec");
        let plan = IndexPlan::default();
        let key_inverted = IndexPlan {
            hor_key_index: true,
            ..plan
        };
        Large {
            pr: build(&corpus, RepKind::Pr, plan).expect("PR build"),
            or: build(&corpus, RepKind::Or, plan).expect("OR build"),
            cor: build(&corpus, RepKind::Cor, plan).expect("COR build"),
            hor: build(&corpus, RepKind::Hor, key_inverted).expect("HOR build"),
            corpus,
        }
    })
}

#[test]
fn c01_size_model_exactness() {
    run(1, "size-model exactness", || {
        let cost = CostModel::default();
        let mut rng = ChaCha8Rng::seed_from_u64(101);
        let mut max_docs = 0;
        for i in 0..50 {
            let spec = GenSpec {
                docs: if i == 0 {
                    5000
                } else {
                    rng.random_range(1..=5000)
                },
                vocab: rng.random_range(20..=3000),
                avg_words: rng.random_range(1..=40),
                zipf_s: rng.random_range(0.8..1.4),
                seed: rng.random(),
            };
            max_docs = max_docs.max(spec.docs);
            let corpus = gen_corpus(&spec).map_err(err)?;
            let oracle = Oracle::new(&corpus);
            let (n, d, n_d, w) = oracle.stats();
            let stats = CorpusStats::new(n, d, n_d, w);

            let name_len: u64 = oracle.df.keys().map(|t| t.len() as u64).sum();
            let (mut docid_len, mut tf_len) = (0u64, 0u64);
            for (i, counts) in oracle.counts.iter().enumerate() {
                let id_len = (i + 1).to_string().len() as u64;
                for &tf in counts.values() {
                    docid_len += id_len;
                    tf_len += tf.to_string().len() as u64;
                }
            }
            let want_cor = estimate_cor(&stats, &cost, name_len as f64 / w as f64).map_err(err)?;
            let want_hor = estimate_hor(
                &stats,
                &cost,
                name_len as f64 / w as f64,
                docid_len as f64 / n_d as f64,
                tf_len as f64 / n_d as f64,
            )
            .map_err(err)?;

            let (lists, _) = compute_postings(&corpus, Execution::default());
            let docs: Vec<(u32, String)> = (1..=corpus.len() as u32)
                .map(|i| (i, format!("u{i}")))
                .collect();
            for kind in RepKind::ALL {
                let idx = build_tables(kind, &docs, &lists, cost).map_err(err)?;
                let got = idx.occurrence().stats().bytes;
                let want = match kind {
                    RepKind::Pr => estimate_pr(&stats, &cost, false),
                    RepKind::Or => estimate_orif(&stats, &cost, false),
                    RepKind::Cor => want_cor.round() as u64,
                    RepKind::Hor => want_hor.round() as u64,
                };
                ensure(got == want, || {
                    format!("corpus {i} {kind}: measured {got} bytes, estimate {want}")
                })?;
                ensure(idx.stats() == stats, || {
                    format!("corpus {i}: statistics differ from the oracle count")
                })?;
            }
        }
        Ok(format!(
            "50 corpora up to D={max_docs}, PR/OR/COR/HOR occurrence bytes exact"
        ))
    });
}

fn random_stats(rng: &mut ChaCha8Rng, i: usize) -> CorpusStats {
    let d = rng.random_range(1..=1_000_000u64);
    let w = rng.random_range(1..=1_000_000u64);
    let lo = d.max(w);
    let n_d = if i.is_multiple_of(10) && w >= d {
        w
    } else {
        rng.random_range(lo..=(d * w).max(lo).min(lo * 1000))
    };
    CorpusStats::new(n_d + rng.random_range(0..=n_d), d, n_d, w)
}

#[test]
fn c02_dominance() {
    run(2, "dominance of the set-valued layout", || {
        let cost = CostModel::default();
        let mut rng = ChaCha8Rng::seed_from_u64(202);
        let mut equal = 0;
        for i in 0..1000 {
            let stats = random_stats(&mut rng, i);
            stats.validate().map_err(err)?;
            let c = compare(&stats, &cost);
            ensure(c.smaller != Smaller::Pr, || {
                format!("PR smaller for {stats:?}")
            })?;
            ensure(
                (c.smaller == Smaller::Equal) == (stats.w == stats.n_d),
                || format!("EQUAL mismatch for {stats:?}: {:?}", c.smaller),
            )?;
            equal += (c.smaller == Smaller::Equal) as usize;
        }
        Ok(format!(
            "1000 stats, never PR, {equal} EQUAL exactly where W = N_d"
        ))
    });
}

#[test]
fn c03_ratio_ceiling() {
    run(3, "ratio ceiling and measured ratio", || {
        let cost = CostModel::default();
        let ceiling = ratio_ceiling(&cost);
        ensure((ceiling - 6.5).abs() < 1e-12, || {
            format!("ceiling {ceiling}")
        })?;
        let mut rng = ChaCha8Rng::seed_from_u64(303);
        let mut worst: f64 = 0.0;
        let mut all: Vec<CorpusStats> = (0..1000).map(|i| random_stats(&mut rng, i)).collect();
        all.push(CorpusStats::new(
            240_806_511,
            1_004_721,
            240_806_511,
            216_449,
        ));
        for s in &all {
            let r = estimate_pr(s, &cost, false) as f64 / estimate_orif(s, &cost, false) as f64;
            ensure(r <= ceiling, || {
                format!("ratio {r} above ceiling for {s:?}")
            })?;
            worst = worst.max(r);
        }
        let l = large();
        let pr = l.pr.occurrence().stats().bytes as f64;
        let or = l.or.occurrence().stats().bytes as f64;
        let measured = pr / or;
        let s = l.pr.stats();
        ensure(measured >= 5.0, || {
            format!("measured PR/OR occurrence ratio {measured:.3} < 5.0")
        })?;
        Ok(format!(
            "max analytic ratio {worst:.3} <= {ceiling}; measured {measured:.3} at D={}, w_avg={:.1}",
            s.d,
            s.w_avg()
        ))
    });
}

#[test]
fn c04_cross_representation_agreement() {
    run(4, "cross-representation and oracle agreement", || {
        let plans = [
            (RepKind::Pr, IndexPlan::default()),
            (RepKind::Or, IndexPlan::with_primary(Some(IndexKind::Hash))),
            (RepKind::Cor, IndexPlan::none()),
            (RepKind::Hor, full_plan(IndexKind::Btree)),
        ];
        let check = |spec: GenSpec, queries: usize, with_oracle: bool| -> Result<usize, String> {
            let corpus = gen_corpus(&spec).map_err(err)?;
            let oracle = Oracle::new(&corpus);
            let indexes = plans
                .iter()
                .map(|&(k, p)| build(&corpus, k, p))
                .collect::<Result<Vec<_>, _>>()?;
            let pool: Vec<String> = oracle.df.keys().cloned().collect();
            let qs = random_queries(&pool, queries, 4, spec.seed);
            for q in &qs {
                let reference = evaluate_query(&indexes[0], q, corpus.len()).map_err(err)?;
                for idx in &indexes[1..] {
                    let got = evaluate_query(idx, q, corpus.len()).map_err(err)?;
                    ensure(got == reference, || {
                        format!("{} disagrees with pr on `{q}`", idx.kind())
                    })?;
                }
                if with_oracle {
                    check_against_oracle(&reference, &oracle.rank(q), 1e-6)
                        .map_err(|e| format!("`{q}`: {e}"))?;
                }
            }
            Ok(qs.len())
        };
        let small = GenSpec {
            docs: 200,
            vocab: 400,
            avg_words: 30,
            zipf_s: 1.0,
            seed: 404,
        };
        let big = GenSpec {
            docs: 2000,
            vocab: 3000,
            avg_words: 40,
            zipf_s: 1.0,
            seed: 405,
        };
        let a = check(small, 100, true)?;
        let b = check(big, 100, false)?;
        Ok(format!(
            "{a} queries on D=200 match the cosine oracle within 1e-6; {b} queries on D=2000 identical across PR/OR/COR/HOR"
        ))
    });
}

#[test]
fn c05_chunking_invariance() {
    run(5, "IN-list chunking invariance", || {
        let corpus = gen_corpus(&GenSpec {
            docs: 2000,
            vocab: 400,
            avg_words: 50,
            zipf_s: 1.0,
            seed: 505,
        })
        .map_err(err)?;
        let oracle = Oracle::new(&corpus);
        let pool: Vec<String> = oracle
            .df
            .iter()
            .filter(|(_, &df)| df > 300 && (df as usize) < corpus.len())
            .map(|(t, _)| t.clone())
            .collect();
        ensure(!pool.is_empty(), || "no term with df > 300".into())?;
        let queries = random_queries(&pool, 20, 3, 505);
        let mut smallest = usize::MAX;
        for kind in RepKind::ALL {
            let idx = build(&corpus, kind, IndexPlan::default())?;
            for q in &queries {
                let at = |chunk_size| {
                    evaluate(
                        &idx,
                        q,
                        QueryOptions {
                            k: corpus.len(),
                            chunk_size,
                        },
                    )
                    .map(|o| o.results)
                };
                let reference = at(250_000).map_err(err)?;
                ensure(reference.len() > 300, || {
                    format!("`{q}` has only {} results", reference.len())
                })?;
                smallest = smallest.min(reference.len());
                for chunk in [1, 100] {
                    ensure(at(chunk).map_err(err)? == reference, || {
                        format!("{kind} `{q}` differs at chunk {chunk}")
                    })?;
                }
            }
        }
        Ok(format!(
            "{} queries x 4 representations identical for chunk sizes 1, 100, 250000; smallest result set {smallest}",
            queries.len()
        ))
    });
}

fn scan_filter(rows: &[FieldValue], key: &IndexKey, kind: IndexKind) -> Vec<u32> {
    (0..rows.len() as u32)
        .filter(|&row| match (&rows[row as usize], key) {
            (FieldValue::Int(v), IndexKey::Int(k)) => *v as i64 == *k,
            (FieldValue::Str(v), IndexKey::Str(k)) => v == k,
            (FieldValue::PostingMap(m), IndexKey::Str(k)) if kind == IndexKind::KeyInverted => {
                m.iter().any(|(mk, _)| mk == k)
            }
            _ => false,
        })
        .collect()
}

#[test]
fn c06_access_path_oracle() {
    run(6, "access-path oracle", || {
        let corpus = gen_corpus(&GenSpec {
            docs: 1500,
            vocab: 2000,
            avg_words: 30,
            zipf_s: 1.0,
            seed: 606,
        })
        .map_err(err)?;
        let pr = build(&corpus, RepKind::Pr, IndexPlan::none())?;
        let hor = build(&corpus, RepKind::Hor, IndexPlan::none())?;
        let word = pr.word().ok_or("PR has no word table")?;
        let names: Vec<String> = word
            .scan()
            .map(|(_, t)| t[1].as_str().unwrap_or_default().to_owned())
            .collect();
        let d = corpus.len() as i64;
        let w = names.len() as i64;

        let mut rng = ChaCha8Rng::seed_from_u64(606);
        let mut lookups = BTreeMap::new();
        let targets: Vec<(&HeapTable, &str, Vec<IndexKind>)> = vec![
            (pr.document(), "id", vec![IndexKind::Btree, IndexKind::Hash]),
            (word, "name", vec![IndexKind::Btree, IndexKind::Hash]),
            (
                pr.occurrence(),
                "word_id",
                vec![IndexKind::Btree, IndexKind::Hash],
            ),
            (
                pr.occurrence(),
                "doc_id",
                vec![IndexKind::Btree, IndexKind::Hash],
            ),
            (
                hor.occurrence(),
                "word_name",
                vec![IndexKind::Btree, IndexKind::Hash],
            ),
            (hor.occurrence(), "occur", vec![IndexKind::KeyInverted]),
        ];
        for (table, attr, kinds) in &targets {
            let column = table.column(attr).map_err(err)?;
            // One sequential scan, filtered per lookup.
            let scanned: Vec<FieldValue> = table
                .scan()
                .map(|(_, mut t)| t.swap_remove(column))
                .collect();
            for &kind in kinds {
                let path = build_index(table, attr, kind).map_err(err)?;
                let per = 10_000 / targets.iter().filter(|t| t.2.contains(&kind)).count() + 1;
                for _ in 0..per {
                    let key = match (*attr, rng.random_range(0..10)) {
                        ("name" | "word_name", 0) => {
                            IndexKey::Str(format!("absent{}", rng.random::<u16>()))
                        }
                        ("name" | "word_name", _) => {
                            IndexKey::Str(names[rng.random_range(0..names.len())].clone())
                        }
                        ("occur", 0) => IndexKey::Str(format!("x{}", rng.random::<u16>())),
                        ("occur", _) => IndexKey::Str(rng.random_range(0..=d + 5).to_string()),
                        ("word_id", _) => IndexKey::Int(rng.random_range(-2..=w + 5)),
                        _ => IndexKey::Int(rng.random_range(-2..=d + 5)),
                    };
                    let want = scan_filter(&scanned, &key, kind);
                    ensure(path.lookup(&key) == want.as_slice(), || {
                        format!(
                            "{kind} on {}.{attr}: lookup {key:?} differs from scan",
                            table.name()
                        )
                    })?;
                    *lookups.entry(kind.as_str()).or_insert(0) += 1;
                }

                // Drop, reload the table by copy, rebuild: equals a fresh build.
                let fresh = build_index(table, attr, kind).map_err(err)?;
                let spec = drop_index(path);
                let mut reloaded =
                    HeapTable::new(table.name(), table.schema().clone(), *table.cost())
                        .map_err(err)?;
                reloaded
                    .copy_into(table.scan().map(|(_, t)| t))
                    .map_err(err)?;
                ensure(&reloaded == *table, || {
                    format!("{} reload differs", table.name())
                })?;
                let rebuilt = rebuild_index(&spec, &reloaded).map_err(err)?;
                ensure(
                    rebuilt.mapping() == fresh.mapping() && rebuilt.pages() == fresh.pages(),
                    || {
                        format!(
                            "{kind} on {}.{attr}: rebuild differs from fresh build",
                            table.name()
                        )
                    },
                )?;
            }
        }

        // Whole-index drop and reload through the on-disk format.
        let dir = tempfile::tempdir().map_err(err)?;
        for kind in RepKind::ALL {
            let idx = build(&corpus, kind, full_plan(IndexKind::Hash))?;
            let sub = dir.path().join(kind.as_str());
            persist::save(&idx, &sub).map_err(err)?;
            let loaded = persist::load(&sub).map_err(err)?;
            ensure(loaded.same_contents(&idx), || {
                format!("{kind} reload differs")
            })?;
        }
        let summary: Vec<String> = lookups.iter().map(|(k, n)| format!("{k} {n}")).collect();
        Ok(format!(
            "lookups equal scan-filter ({}); rebuilds equal fresh builds",
            summary.join(", ")
        ))
    });
}

#[test]
fn c07_incremental_equivalence() {
    run(7, "incremental equivalence", || {
        let corpus = gen_corpus(&GenSpec {
            docs: 1000,
            vocab: 1500,
            avg_words: 25,
            zipf_s: 1.0,
            seed: 707,
        })
        .map_err(err)?;
        let mut rng = ChaCha8Rng::seed_from_u64(707);
        let plans = [
            IndexPlan::default(),
            full_plan(IndexKind::Hash),
            IndexPlan::none(),
        ];
        let mut cases = 0;
        for kind in RepKind::ALL {
            for plan in plans {
                let want = build(&corpus, kind, plan)?;
                let a = rng.random_range(0..=corpus.len());
                let b = rng.random_range(a..=corpus.len());
                let part = |r: std::ops::Range<usize>| Corpus::new(corpus.docs[r].to_vec());
                let mut idx = build(&part(0..a), kind, plan)?;
                add_documents(&mut idx, &part(a..b), Execution::default()).map_err(err)?;
                add_documents(&mut idx, &part(b..corpus.len()), Execution::Sequential)
                    .map_err(err)?;
                ensure(idx.same_contents(&want), || {
                    format!("{kind}/{} split at {a},{b}", plan.label())
                })?;
                ensure(
                    idx.scan_relation().map_err(err)? == want.scan_relation().map_err(err)?,
                    || format!("{kind}: dfs differ"),
                )?;
                let ids: Vec<u32> = (1..=corpus.len() as u32).collect();
                ensure(
                    idx.q_doc(&ids, 250_000).map_err(err)?
                        == want.q_doc(&ids, 250_000).map_err(err)?,
                    || format!("{kind}: norms differ"),
                )?;
                cases += 1;
            }
        }
        Ok(format!(
            "{cases} split builds equal bulk builds in tables, dfs, norms and index mappings"
        ))
    });
}

#[test]
fn c08_query_speed_direction() {
    run(8, "query speed OR vs PR", || {
        let l = large();
        let config = QueryBenchConfig {
            term_counts: vec![2],
            repetitions: 10,
            seed: 808,
            ..Default::default()
        };
        let report = bench_query(&[l.pr.clone(), l.or.clone()], &config).map_err(err)?;
        let (pr, or) = (&report.rows[0], &report.rows[1]);
        let speedup = pr.total_ms / or.total_ms;
        let detail = format!(
            "PR {:.3} ms vs OR {:.3} ms mean total, {speedup:.2}x; df band {:?}{}, {:.0} results per query",
            pr.total_ms,
            or.total_ms,
            report.df_band,
            if report.widened { " (widened)" } else { "" },
            or.mean_results
        );
        ensure(speedup >= 2.0, || detail.clone())?;
        Ok(detail)
    });
}

#[test]
fn c09_expansion() {
    run(9, "query expansion", || {
        let c0 = Corpus::from_texts(&["a b a", "b c", "c"]);
        for kind in RepKind::ALL {
            let idx = build(&c0, kind, full_plan(IndexKind::Btree))?;
            let got = expand_query(&idx, "c", 2, 1).map_err(err)?;
            ensure(got == ["b"], || format!("{kind} expands C0 `c` to {got:?}"))?;
        }

        let corpus = gen_corpus(&GenSpec {
            docs: 500,
            vocab: 600,
            avg_words: 30,
            zipf_s: 1.0,
            seed: 909,
        })
        .map_err(err)?;
        let oracle = Oracle::new(&corpus);
        let indexes = [
            build(&corpus, RepKind::Pr, IndexPlan::none())?,
            build(&corpus, RepKind::Pr, full_plan(IndexKind::Btree))?,
            build(&corpus, RepKind::Or, IndexPlan::default())?,
            build(&corpus, RepKind::Cor, IndexPlan::none())?,
            build(&corpus, RepKind::Hor, full_plan(IndexKind::Hash))?,
        ];
        let pool: Vec<String> = oracle.df.keys().cloned().collect();
        let queries = random_queries(&pool, 50, 3, 909);
        for q in &queries {
            let top = evaluate_query(&indexes[0], q, 5).map_err(err)?;
            let ranked = oracle.rank(q);
            check_against_oracle(&top, &ranked[..top.len()], 1e-6)
                .map_err(|e| format!("`{q}`: {e}"))?;
            let ids: Vec<u32> = top.iter().map(|r| r.doc_id).collect();
            let want = oracle.expand(&ids, q, 5);
            for idx in &indexes {
                let got = expand_query(idx, q, 5, 5).map_err(err)?;
                ensure(got == want, || {
                    format!("{} expands `{q}` to {got:?}, oracle {want:?}", idx.kind())
                })?;
            }
        }

        let l = large();
        let oracle_pool: Vec<String> = {
            let lists = l.or.scan_relation().map_err(err)?;
            let d = l.or.stats().d as u32;
            lists
                .terms
                .into_iter()
                .zip(lists.dfs)
                .filter(|(_, df)| *df > 20 && *df < d / 10)
                .map(|(t, _)| t)
                .collect()
        };
        let big_queries = random_queries(&oracle_pool, 3, 2, 910);
        let rows = bench_expand(
            &[l.pr.clone(), l.or.clone(), l.cor.clone(), l.hor.clone()],
            &big_queries,
            5,
            5,
        )
        .map_err(err)?;
        let ms: Vec<f64> = rows.iter().map(|r| r.total_millis).collect();
        let detail = format!(
            "C0 -> [b]; {} random queries match brute force; D={}: PR scan {:.1} ms, OR scan {:.1} ms, COR scan {:.1} ms, HOR key-inverted {:.1} ms",
            queries.len(),
            l.corpus.len(),
            ms[0],
            ms[1],
            ms[2],
            ms[3]
        );
        ensure(ms[1] < ms[0] && ms[2] < ms[0] && ms[3] < ms[0], || {
            detail.clone()
        })?;
        Ok(detail)
    });
}

#[test]
#[allow(clippy::approx_constant)]
fn c10_toy_golden_values() {
    run(10, "toy-corpus golden values", || {
        let c0 = Corpus::from_texts(&["a b a", "b c", "c"]);
        let norms = [2.234323, 0.573414, 0.405465];
        let scores = [(2u32, 0.707107), (1, 0.181471)];
        let oracle = Oracle::new(&c0);
        for (i, &n) in norms.iter().enumerate() {
            let got = oracle.norm(i as u32 + 1);
            ensure((got - n).abs() < 1e-5, || {
                format!("oracle norm d{} = {got}", i + 1)
            })?;
        }
        ensure(
            oracle
                .rank("b")
                .iter()
                .zip(scores)
                .all(|(a, b)| a.0 == b.0 && (a.1 - b.1).abs() < 1e-5),
            || "oracle scores for `b` differ".into(),
        )?;
        let mut seen = HashSet::new();
        for kind in RepKind::ALL {
            for plan in [
                IndexPlan::none(),
                IndexPlan::default(),
                full_plan(IndexKind::Hash),
            ] {
                let idx = build(&c0, kind, plan)?;
                let rows = idx.q_doc(&[3, 1, 2], 1).map_err(err)?.rows;
                for (row, &n) in rows.iter().zip(&norms) {
                    ensure((row.norm as f64 - n).abs() < 1e-5, || {
                        format!("{kind}: norm d{} = {}", row.id, row.norm)
                    })?;
                }
                let got = evaluate_query(&idx, "b", 10).map_err(err)?;
                ensure(got.len() == 2, || format!("{kind}: {} results", got.len()))?;
                for (r, (id, s)) in got.iter().zip(scores) {
                    ensure(r.doc_id == id && (r.score - s).abs() < 1e-5, || {
                        format!("{kind}: d{} scored {}", r.doc_id, r.score)
                    })?;
                }
                seen.insert(kind);
            }
        }
        Ok(format!(
            "norms and `b` scores within 1e-5 on {} representations x 3 plans",
            seen.len()
        ))
    });
}
