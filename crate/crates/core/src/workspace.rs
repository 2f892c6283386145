//! On-disk workspace: graph, vector index, lexical postings, configuration.
//!
//! ```text
//! <root>/manifest      key = value; format version, fingerprint, embedder
//! <root>/config        retrieval configuration
//! <root>/nodes.jsonl   one skill record per line, id order
//! <root>/graph.tsv     source \t relation \t target \t weight
//! <root>/vectors.bin   length-prefixed little-endian vectors
//! <root>/lexical.tsv   token \t field \t id
//! ```

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::config::{parse_kv, RetrievalConfig};
use crate::enrich::{complete_semantics, Providers};
use crate::error::{GraphError, ParseError, WorkspaceError};
use crate::graph_builder::build_graph_with_vectors;
use crate::index::{embed_records, EmbedderKind, EmbeddingVector, LexField, LexicalIndex, VectorIndex};
use crate::model::{SkillGraph, SkillRecord, TypedEdge};
use crate::parser::{discover_packages, parse_skill_package};

pub const FORMAT_VERSION: &str = "gos-ws-1";

const MANIFEST: &str = "manifest";
const CONFIG: &str = "config";
const NODES: &str = "nodes.jsonl";
const GRAPH: &str = "graph.tsv";
const VECTORS: &str = "vectors.bin";
const LEXICAL: &str = "lexical.tsv";
const VECTORS_MAGIC: &[u8; 4] = b"GOSV";

#[derive(Debug, Clone, PartialEq)]
pub struct Workspace {
    pub graph: SkillGraph,
    pub vectors: VectorIndex,
    pub lexical: LexicalIndex,
    pub config: RetrievalConfig,
    pub embedder: EmbedderKind,
}

/// A package that was skipped while indexing a library.
#[derive(Debug)]
pub struct SkippedPackage {
    pub path: PathBuf,
    pub reason: String,
}

impl Workspace {
    /// Index already-normalized records.
    pub fn build(records: Vec<SkillRecord>, config: RetrievalConfig, providers: &Providers) -> Result<Self, GraphError> {
        let (vectors, embedder) = embed_records(&records, &providers.embedding);
        let lexical = LexicalIndex::build(&records);
        let graph = build_graph_with_vectors(records, &config, providers, &vectors)?;
        Ok(Self {
            graph,
            vectors,
            lexical,
            config,
            embedder,
        })
    }

    /// Parse, complete and index every package under `library_dir`.
    /// Unparseable packages and repeated ids are skipped and reported.
    pub fn index_library(
        library_dir: &Path,
        config: RetrievalConfig,
        providers: &Providers,
    ) -> Result<(Self, Vec<SkippedPackage>), GraphError> {
        let (records, skipped) = load_library(library_dir, providers);
        Ok((Self::build(records, config, providers)?, skipped))
    }

    pub fn save(&self, root: &Path) -> Result<(), WorkspaceError> {
        fs::create_dir_all(root)?;
        fs::write(root.join(CONFIG), self.config.to_kv())?;

        let mut nodes = String::new();
        for r in self.graph.nodes() {
            nodes.push_str(&serde_json::to_string(r).map_err(|e| WorkspaceError::CorruptManifest(e.to_string()))?);
            nodes.push('\n');
        }
        fs::write(root.join(NODES), nodes)?;

        let mut graph = String::new();
        for e in self.graph.edges() {
            let _ = writeln!(graph, "{}\t{}\t{}\t{}", e.source, e.relation, e.target, e.weight);
        }
        fs::write(root.join(GRAPH), graph)?;

        fs::write(root.join(VECTORS), encode_vectors(&self.vectors))?;

        let mut lexical = String::new();
        for (token, field, id) in self.lexical.rows() {
            let _ = writeln!(lexical, "{token}\t{}\t{id}", field.as_str());
        }
        fs::write(root.join(LEXICAL), lexical)?;

        // Manifest last: a workspace without one is never mistaken for complete.
        let manifest = format!(
            "format_version = {FORMAT_VERSION}\nfingerprint = {}\nembedder = {}\nembedding_dim = {}\nnodes = {}\nedges = {}\n",
            self.graph.fingerprint(),
            self.embedder.as_str(),
            self.vectors.dim(),
            self.graph.len(),
            self.graph.edges().len(),
        );
        fs::write(root.join(MANIFEST), manifest)?;
        Ok(())
    }

    pub fn load(root: &Path) -> Result<Self, WorkspaceError> {
        let corrupt = |msg: String| WorkspaceError::CorruptManifest(msg);
        let manifest_text = fs::read_to_string(root.join(MANIFEST))
            .map_err(|e| corrupt(format!("cannot read {}: {e}", root.join(MANIFEST).display())))?;
        let entries = parse_kv(&manifest_text).map_err(|e| corrupt(format!("manifest: {e}")))?;
        let get = |key: &str| -> Result<&str, WorkspaceError> {
            entries
                .iter()
                .find(|e| e.key == key)
                .map(|e| e.value.as_str())
                .ok_or_else(|| corrupt(format!("manifest lacks `{key}`")))
        };
        let version = get("format_version")?;
        if version != FORMAT_VERSION {
            return Err(WorkspaceError::VersionMismatch {
                found: version.to_string(),
                expected: FORMAT_VERSION.to_string(),
            });
        }
        let fingerprint = get("fingerprint")?.to_string();
        let embedder = EmbedderKind::parse(get("embedder")?).ok_or_else(|| corrupt("unknown embedder".into()))?;
        let dim: usize = get("embedding_dim")?.parse().map_err(|_| corrupt("bad embedding_dim".into()))?;
        let node_count: usize = get("nodes")?.parse().map_err(|_| corrupt("bad node count".into()))?;
        let edge_count: usize = get("edges")?.parse().map_err(|_| corrupt("bad edge count".into()))?;

        let config = RetrievalConfig::from_kv(&fs::read_to_string(root.join(CONFIG))?)?;

        let records: Vec<SkillRecord> = fs::read_to_string(root.join(NODES))?
            .lines()
            .filter(|l| !l.is_empty())
            .map(|l| serde_json::from_str(l).map_err(|e| corrupt(format!("{NODES}: {e}"))))
            .collect::<Result<_, _>>()?;

        let mut edges = Vec::new();
        for (i, line) in fs::read_to_string(root.join(GRAPH))?.lines().enumerate() {
            if line.is_empty() {
                continue;
            }
            let cols: Vec<&str> = line.split('\t').collect();
            let bad = || corrupt(format!("{GRAPH} line {}: `{line}`", i + 1));
            let [source, relation, target, weight] = cols[..] else {
                return Err(bad());
            };
            edges.push(TypedEdge {
                source: source.to_string(),
                target: target.to_string(),
                relation: relation.parse().map_err(|_| bad())?,
                weight: weight.parse().map_err(|_| bad())?,
            });
        }
        let graph = SkillGraph::new(records, edges, fingerprint)?;
        if graph.len() != node_count || graph.edges().len() != edge_count {
            return Err(corrupt("node or edge count disagrees with manifest".into()));
        }

        let vectors = decode_vectors(&fs::read(root.join(VECTORS))?).map_err(corrupt)?;
        if vectors.dim() != dim {
            return Err(corrupt(format!("vector dimension {} != manifest {dim}", vectors.dim())));
        }
        if vectors.len() != graph.len() || graph.ids().iter().any(|id| vectors.get(id).is_none()) {
            return Err(corrupt("vector index does not cover the graph".into()));
        }

        let mut rows = Vec::new();
        for (i, line) in fs::read_to_string(root.join(LEXICAL))?.lines().enumerate() {
            if line.is_empty() {
                continue;
            }
            let bad = || corrupt(format!("{LEXICAL} line {}", i + 1));
            let mut cols = line.split('\t');
            let (Some(token), Some(field), Some(id), None) = (cols.next(), cols.next(), cols.next(), cols.next()) else {
                return Err(bad());
            };
            let field = LexField::parse(field).ok_or_else(bad)?;
            if graph.node(id).is_none() {
                return Err(bad());
            }
            rows.push((token.to_string(), field, id.to_string()));
        }
        let lexical = LexicalIndex::from_rows(rows, graph.ids());

        Ok(Self {
            graph,
            vectors,
            lexical,
            config,
            embedder,
        })
    }
}

/// Parse and complete every package below `library_dir`, keeping the first
/// record for each id.
pub fn load_library(library_dir: &Path, providers: &Providers) -> (Vec<SkillRecord>, Vec<SkippedPackage>) {
    let mut records: Vec<SkillRecord> = Vec::new();
    let mut skipped = Vec::new();
    for pkg in discover_packages(library_dir) {
        match parse_skill_package(&pkg) {
            Ok(raw) => {
                if records.iter().any(|r| r.id == raw.id) {
                    skipped.push(SkippedPackage {
                        path: pkg.primary_doc,
                        reason: format!("duplicate skill id `{}`", raw.id),
                    });
                    continue;
                }
                let mut record = complete_semantics(&raw, &providers.completion);
                if record != raw {
                    record.rendered_snippet = crate::parser::render_snippet(&record, crate::parser::DEFAULT_SNIPPET_BUDGET)
                        .unwrap_or_else(|_: ParseError| record.rendered_snippet.clone());
                }
                records.push(record);
            }
            Err(e) => skipped.push(SkippedPackage {
                path: pkg.primary_doc,
                reason: e.to_string(),
            }),
        }
    }
    (records, skipped)
}

fn encode_vectors(index: &VectorIndex) -> Vec<u8> {
    let mut out = Vec::new();
    out.extend_from_slice(VECTORS_MAGIC);
    out.extend_from_slice(&(index.dim() as u32).to_le_bytes());
    out.extend_from_slice(&(index.len() as u32).to_le_bytes());
    for (id, v) in index.iter() {
        out.extend_from_slice(&(id.len() as u32).to_le_bytes());
        out.extend_from_slice(id.as_bytes());
        for x in v.values() {
            out.extend_from_slice(&x.to_le_bytes());
        }
    }
    out
}

fn decode_vectors(bytes: &[u8]) -> Result<VectorIndex, String> {
    struct Cursor<'a>(&'a [u8]);
    impl<'a> Cursor<'a> {
        fn take(&mut self, n: usize) -> Result<&'a [u8], String> {
            if self.0.len() < n {
                return Err(format!("{VECTORS} is truncated"));
            }
            let (head, rest) = self.0.split_at(n);
            self.0 = rest;
            Ok(head)
        }
        fn u32(&mut self) -> Result<usize, String> {
            Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()) as usize)
        }
    }
    let mut c = Cursor(bytes);
    if c.take(4)? != VECTORS_MAGIC {
        return Err(format!("{VECTORS} has a bad magic number"));
    }
    let dim = c.u32()?;
    let count = c.u32()?;
    let mut index = VectorIndex::new(dim);
    for _ in 0..count {
        let len = c.u32()?;
        let id = std::str::from_utf8(c.take(len)?).map_err(|e| e.to_string())?.to_string();
        let mut values = Vec::with_capacity(dim);
        for _ in 0..dim {
            values.push(f64::from_le_bytes(c.take(8)?.try_into().unwrap()));
        }
        index.insert(id, EmbeddingVector::new(values)).map_err(|e| e.to_string())?;
    }
    if !c.0.is_empty() {
        return Err(format!("{VECTORS} has trailing bytes"));
    }
    Ok(index)
}
