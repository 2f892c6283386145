//! Independent oracles and helpers shared by the integration tests.
#![allow(dead_code)]

use std::path::{Path, PathBuf};

use gos_core::{RelationType, RetrievalConfig, SkillGraph, SkillRecord, TypedEdge};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn fixture(rel: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join(rel)
}

pub fn sample_library() -> PathBuf {
    fixture("fixtures/library")
}

pub fn chain_library() -> PathBuf {
    fixture("tests/fixtures/chain")
}

/// Query whose words hash to stub buckets untouched by the chain fixture and
/// share no token with it.
pub const CHAIN_MISS_QUERY: &str = "penguin telescope sonnet";

/// Same for the sample library.
pub const SAMPLE_MISS_QUERY: &str = "volcano puffin igloo wombat";

fn row_normalize(m: &mut [Vec<f64>]) {
    for row in m.iter_mut() {
        let s: f64 = row.iter().sum();
        if s > 0.0 {
            row.iter_mut().for_each(|x| *x /= s);
        }
    }
}

/// Dense transition matrix built straight from the definition: per relation,
/// row-normalized adjacency and row-normalized transpose, blended by
/// lambda and lambda * gamma, summed, row-normalized.
pub fn dense_transition(graph: &SkillGraph, config: &RetrievalConfig) -> Vec<Vec<f64>> {
    let n = graph.len();
    let ids = graph.ids();
    let pos = |id: &str| ids.iter().position(|x| x == id).unwrap();
    let mut total = vec![vec![0.0; n]; n];
    for rel in RelationType::ALL {
        let mut a = vec![vec![0.0; n]; n];
        for e in graph.edges().iter().filter(|e| e.relation == rel) {
            a[pos(&e.source)][pos(&e.target)] += e.weight;
        }
        let mut at: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| a[j][i]).collect()).collect();
        row_normalize(&mut a);
        row_normalize(&mut at);
        let (l, g) = (config.lambda.get(rel), config.gamma.get(rel));
        for i in 0..n {
            for j in 0..n {
                total[i][j] += l * a[i][j] + l * g * at[i][j];
            }
        }
    }
    row_normalize(&mut total);
    total
}

/// Solve `A x = b` by Gaussian elimination with partial pivoting.
pub fn solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Vec<f64> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs())).unwrap();
        a.swap(col, piv);
        b.swap(col, piv);
        let d = a[col][col];
        assert!(d.abs() > 1e-14, "singular system");
        for r in (col + 1)..n {
            let f = a[r][col] / d;
            if f != 0.0 {
                for c in col..n {
                    a[r][c] -= f * a[col][c];
                }
                b[r] -= f * b[col];
            }
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let s: f64 = ((r + 1)..n).map(|c| a[r][c] * x[c]).sum();
        x[r] = (b[r] - s) / a[r][r];
    }
    x
}

/// Stationary solution of `s = alpha p + (1 - alpha) T^T s`, where rows of
/// `T` without mass restart at `p`.
pub fn ppr_linear_solve(t: &[Vec<f64>], p: &[f64], alpha: f64) -> Vec<f64> {
    let n = p.len();
    let patched: Vec<Vec<f64>> = t
        .iter()
        .map(|row| if row.iter().sum::<f64>() > 0.0 { row.clone() } else { p.to_vec() })
        .collect();
    let a: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| f64::from(u8::from(i == j)) - (1.0 - alpha) * patched[j][i])
                .collect()
        })
        .collect();
    solve(a, p.iter().map(|x| alpha * x).collect())
}

pub fn l1(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum()
}

pub fn bare_record(id: &str) -> SkillRecord {
    SkillRecord {
        id: id.into(),
        name: id.into(),
        ..Default::default()
    }
}

/// Random typed graph: up to `max_nodes` nodes and `max_edges` distinct
/// non-loop edges.
pub fn arb_graph(max_nodes: usize, max_edges: usize) -> impl Strategy<Value = SkillGraph> {
    (1..=max_nodes).prop_flat_map(move |n| {
        let edge = (0..n, 0..n, 0..4usize, prop_oneof![Just(1.0), 0.1f64..3.0]);
        proptest::collection::vec(edge, 0..=max_edges).prop_map(move |raw| {
            let mut seen = std::collections::BTreeSet::new();
            let edges: Vec<TypedEdge> = raw
                .into_iter()
                .filter(|(s, t, _, _)| s != t)
                .filter(|(s, t, r, _)| seen.insert((*s, *t, *r)))
                .map(|(s, t, r, w)| TypedEdge {
                    source: format!("n{s}"),
                    target: format!("n{t}"),
                    relation: RelationType::ALL[r],
                    weight: w,
                })
                .collect();
            let records = (0..n).map(|i| bare_record(&format!("n{i}"))).collect();
            SkillGraph::new(records, edges, String::new()).unwrap()
        })
    })
}

/// Random seed distribution over `n` nodes with at least one positive entry.
pub fn arb_seed(n: usize) -> impl Strategy<Value = Vec<f64>> {
    proptest::collection::vec(prop_oneof![Just(0.0), 0.01f64..1.0], n).prop_map(|mut v| {
        if v.iter().all(|x| *x == 0.0) {
            v[0] = 1.0;
        }
        let s: f64 = v.iter().sum();
        v.iter_mut().for_each(|x| *x /= s);
        v
    })
}

/// Body text after the frontmatter, located without the parser.
pub fn body_after_frontmatter(doc: &str) -> String {
    let doc = doc.trim_start_matches('\u{feff}');
    let mut seen = 0;
    let mut offset = 0;
    for line in doc.split_inclusive('\n') {
        offset += line.len();
        if line.trim_end() == "---" {
            seen += 1;
            if seen == 2 {
                return doc[offset..].to_string();
            }
        }
    }
    panic!("fixture has no closing frontmatter line");
}

/// Vocabulary of the sample library plus one word it never uses.
pub const WORDS: [&str; 24] = [
    "flood", "river", "gauge", "report", "pdf", "scanned", "text", "summary", "slides", "chart", "csv", "clean", "audio",
    "meeting", "minutes", "speaker", "transcribe", "markdown", "risk", "county", "plot", "deck", "ocr", "zebra",
];

/// Deterministic queries of one to five `WORDS`.
pub fn fixed_queries(n: usize) -> Vec<String> {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    (0..n)
        .map(|_| {
            let len = rng.random_range(1..=5);
            let mut words = WORDS;
            words.shuffle(&mut rng);
            words[..len].join(" ")
        })
        .collect()
}

/// Parse every golden package and compare it with its committed record.
/// Returns the number checked, or the first mismatch.
pub fn check_golden_fixtures() -> Result<usize, String> {
    let root = fixture("tests/fixtures/golden");
    let packages = gos_core::parser::discover_packages(&root);
    for pkg in &packages {
        let dir = pkg.root_dir.file_name().unwrap().to_string_lossy().into_owned();
        let record = gos_core::parser::parse_skill_package(pkg).map_err(|e| format!("{dir}: {e}"))?;
        let expected_path = fixture(&format!("tests/fixtures/golden-expected/{dir}.json"));
        let text = std::fs::read_to_string(&expected_path).map_err(|e| format!("{dir}: {e}"))?;
        let mut expected: serde_json::Value = serde_json::from_str(&text).map_err(|e| format!("{dir}: {e}"))?;
        let doc = std::fs::read_to_string(&pkg.primary_doc).map_err(|e| format!("{dir}: {e}"))?;
        expected["raw_body"] = serde_json::Value::String(body_after_frontmatter(&doc));
        expected["source_path"] = serde_json::to_value(&pkg.primary_doc).unwrap();
        let expected: SkillRecord = serde_json::from_value(expected).map_err(|e| format!("{dir}: {e}"))?;
        if record != expected {
            return Err(format!("{dir}: parsed {record:?}\nexpected {expected:?}"));
        }
    }
    Ok(packages.len())
}

pub fn error_kind(e: &gos_core::error::ParseError) -> &'static str {
    use gos_core::error::ParseError;
    match e {
        ParseError::MissingFrontmatterName { .. } => "MissingFrontmatterName",
        ParseError::MalformedFrontmatter { .. } => "MalformedFrontmatter",
        ParseError::UnreadableDocument { .. } => "UnreadableDocument",
        ParseError::BudgetTooSmall(_) => "BudgetTooSmall",
    }
}

/// Check every malformed package against `expected.tsv`.
pub fn check_malformed_fixtures() -> Result<usize, String> {
    let root = fixture("tests/fixtures/malformed");
    let expected = std::fs::read_to_string(root.join("expected.tsv")).map_err(|e| e.to_string())?;
    let mut checked = 0;
    for line in expected.lines() {
        let (dir, kind) = line.split_once('\t').ok_or_else(|| format!("bad line `{line}`"))?;
        let pkg = gos_core::parser::SkillPackage::open(root.join(dir)).ok_or_else(|| format!("{dir}: not a package"))?;
        match gos_core::parser::parse_skill_package(&pkg) {
            Ok(_) => return Err(format!("{dir}: parsed without error")),
            Err(e) if error_kind(&e) != kind => return Err(format!("{dir}: got {e}, expected {kind}")),
            Err(_) => checked += 1,
        }
    }
    let found = gos_core::parser::discover_packages(&root).len();
    if checked != found {
        return Err(format!("{checked} listed, {found} packages on disk"));
    }
    Ok(checked)
}
