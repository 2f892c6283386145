//! Offline construction of the typed skill graph.
//!
//! Dependency edges come from thresholded producer/consumer I/O overlap and
//! are fully deterministic. Workflow, semantic and alternative edges are
//! proposed by relation validation, which only ever sees a bounded candidate
//! pool per node.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use sha2::{Digest, Sha256};

use crate::config::RetrievalConfig;
use crate::enrich::{validate_relations, Providers};
use crate::error::GraphError;
use crate::index::{embed_records, sort_scored, VectorIndex};
use crate::model::{RelationType, SkillGraph, SkillRecord, TypedEdge};
use crate::text;

/// Best token-Jaccard between any producer output and any consumer input.
pub fn io_compatibility(producer: &SkillRecord, consumer: &SkillRecord) -> f64 {
    max_pair_jaccard(&producer.output_token_sets(), &consumer.input_token_sets())
}

fn max_pair_jaccard(outputs: &[BTreeSet<String>], inputs: &[BTreeSet<String>]) -> f64 {
    let mut best = 0.0f64;
    for o in outputs {
        for i in inputs {
            best = best.max(text::jaccard(o, i));
        }
    }
    best
}

/// Precomputed descriptor tokens with inverted indexes over input and output
/// tokens, so only pairs sharing at least one token are compared.
struct IoTable {
    outputs: Vec<Vec<BTreeSet<String>>>,
    inputs: Vec<Vec<BTreeSet<String>>>,
    consumers_by_token: HashMap<String, Vec<usize>>,
    producers_by_token: HashMap<String, Vec<usize>>,
}

impl IoTable {
    fn new(records: &[SkillRecord]) -> Self {
        let outputs: Vec<_> = records.iter().map(SkillRecord::output_token_sets).collect();
        let inputs: Vec<_> = records.iter().map(SkillRecord::input_token_sets).collect();
        let postings = |sets: &[Vec<BTreeSet<String>>]| {
            let mut map: HashMap<String, Vec<usize>> = HashMap::new();
            for (idx, descriptors) in sets.iter().enumerate() {
                let all: BTreeSet<&String> = descriptors.iter().flatten().collect();
                for t in all {
                    map.entry(t.clone()).or_default().push(idx);
                }
            }
            map
        };
        Self {
            consumers_by_token: postings(&inputs),
            producers_by_token: postings(&outputs),
            outputs,
            inputs,
        }
    }

    /// Consumers whose inputs share a token with `producer`'s outputs.
    fn consumers_of(&self, producer: usize) -> BTreeSet<usize> {
        Self::lookup(&self.outputs[producer], &self.consumers_by_token, producer)
    }

    /// Producers whose outputs share a token with `consumer`'s inputs.
    fn producers_of(&self, consumer: usize) -> BTreeSet<usize> {
        Self::lookup(&self.inputs[consumer], &self.producers_by_token, consumer)
    }

    fn lookup(sets: &[BTreeSet<String>], postings: &HashMap<String, Vec<usize>>, skip: usize) -> BTreeSet<usize> {
        sets.iter()
            .flatten()
            .filter_map(|t| postings.get(t))
            .flatten()
            .copied()
            .filter(|c| *c != skip)
            .collect()
    }

    fn compat(&self, producer: usize, consumer: usize) -> f64 {
        max_pair_jaccard(&self.outputs[producer], &self.inputs[consumer])
    }
}

/// Every ordered pair `(u, v)`, `u != v`, gets a `dep` edge `u -> v` when
/// `io_compatibility(u, v) >= theta_dep`.
pub fn induce_dependency_edges(records: &[SkillRecord], theta_dep: f64) -> Vec<TypedEdge> {
    let table = IoTable::new(records);
    let mut edges = Vec::new();
    for u in 0..records.len() {
        for v in table.consumers_of(u) {
            if records[u].id != records[v].id && table.compat(u, v) >= theta_dep {
                edges.push(TypedEdge::new(&records[u].id, &records[v].id, RelationType::Dep));
            }
        }
    }
    edges.sort_by(|a, b| (&a.source, &a.target).cmp(&(&b.source, &b.target)));
    edges
}

fn pool_profile(r: &SkillRecord) -> BTreeSet<String> {
    let mut t = text::tokens(&r.name);
    t.extend(text::tokens(&r.capability_text()));
    t.extend(text::tokens_of_all(&r.domain_tags));
    t
}

/// Candidate pools for relation validation over one library.
pub struct PoolBuilder<'a> {
    records: &'a [SkillRecord],
    position: HashMap<&'a str, usize>,
    profiles: Vec<BTreeSet<String>>,
    by_token: HashMap<String, Vec<usize>>,
    io: IoTable,
    theta_dep: f64,
}

impl<'a> PoolBuilder<'a> {
    pub fn new(records: &'a [SkillRecord], theta_dep: f64) -> Self {
        let profiles: Vec<_> = records.iter().map(pool_profile).collect();
        let mut by_token: HashMap<String, Vec<usize>> = HashMap::new();
        for (i, p) in profiles.iter().enumerate() {
            for t in p {
                by_token.entry(t.clone()).or_default().push(i);
            }
        }
        Self {
            records,
            position: records.iter().enumerate().map(|(i, r)| (r.id.as_str(), i)).collect(),
            profiles,
            by_token,
            io: IoTable::new(records),
            theta_dep,
        }
    }

    /// Union of the top lexical matches, the top semantic neighbors, and every
    /// I/O-compatible node in either direction, truncated to `k_pool` by
    /// summed evidence (ties by id). The node itself is never included.
    pub fn pool(&self, node: usize, semantic_neighbors: &[(String, f64)], k_pool: usize) -> Vec<&'a SkillRecord> {
        let me = &self.records[node];
        let mut evidence: BTreeMap<usize, f64> = BTreeMap::new();

        let mut lexical: Vec<(String, f64)> = self.profiles[node]
            .iter()
            .filter_map(|t| self.by_token.get(t))
            .flatten()
            .copied()
            .filter(|&j| j != node)
            .collect::<BTreeSet<_>>()
            .into_iter()
            .map(|j| (self.records[j].id.clone(), text::jaccard(&self.profiles[node], &self.profiles[j])))
            .filter(|(_, s)| *s > 0.0)
            .collect();
        sort_scored(&mut lexical);
        for (id, s) in lexical.into_iter().take(k_pool) {
            *evidence.entry(self.position[id.as_str()]).or_default() += s;
        }

        let mut semantic: Vec<(String, f64)> = semantic_neighbors
            .iter()
            .filter(|(id, s)| *s > 0.0 && *id != me.id && self.position.contains_key(id.as_str()))
            .cloned()
            .collect();
        sort_scored(&mut semantic);
        for (id, s) in semantic.into_iter().take(k_pool) {
            *evidence.entry(self.position[id.as_str()]).or_default() += s;
        }

        let mut io_linked = self.io.consumers_of(node);
        io_linked.extend(self.io.producers_of(node));
        for j in io_linked {
            let s = self.io.compat(node, j).max(self.io.compat(j, node));
            if s >= self.theta_dep {
                *evidence.entry(j).or_default() += s;
            }
        }

        let mut ranked: Vec<(String, f64)> = evidence
            .into_iter()
            .filter(|(j, _)| *j != node)
            .map(|(j, s)| (self.records[j].id.clone(), s))
            .collect();
        sort_scored(&mut ranked);
        ranked
            .into_iter()
            .take(k_pool)
            .map(|(id, _)| &self.records[self.position[id.as_str()]])
            .collect()
    }
}

/// Candidate pool for `node` drawn from `all`.
pub fn build_candidate_pool(
    node: &SkillRecord,
    all: &[SkillRecord],
    semantic_neighbors: &[(String, f64)],
    k_pool: usize,
    theta_dep: f64,
) -> Vec<SkillRecord> {
    let builder = PoolBuilder::new(all, theta_dep);
    match builder.position.get(node.id.as_str()) {
        Some(&i) => builder.pool(i, semantic_neighbors, k_pool).into_iter().cloned().collect(),
        None => {
            let mut extended = all.to_vec();
            extended.push(node.clone());
            let builder = PoolBuilder::new(&extended, theta_dep);
            let i = extended.len() - 1;
            builder.pool(i, semantic_neighbors, k_pool).into_iter().cloned().collect()
        }
    }
}

/// SHA-256 over the configuration text and every record, in id order.
pub fn build_fingerprint(config: &RetrievalConfig, records: &[SkillRecord]) -> String {
    let mut sorted: Vec<&SkillRecord> = records.iter().collect();
    sorted.sort_by(|a, b| a.id.cmp(&b.id));
    let mut hasher = Sha256::new();
    hasher.update(config.to_kv().as_bytes());
    for r in sorted {
        hasher.update(serde_json::to_vec(r).expect("records serialize"));
        hasher.update(b"\n");
    }
    hasher.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

pub fn build_graph(records: Vec<SkillRecord>, config: &RetrievalConfig, providers: &Providers) -> Result<SkillGraph, GraphError> {
    check_unique(&records)?;
    let (vectors, _) = embed_records(&records, &providers.embedding);
    build_graph_with_vectors(records, config, providers, &vectors)
}

fn check_unique(records: &[SkillRecord]) -> Result<(), GraphError> {
    let mut seen = BTreeSet::new();
    for r in records {
        if !seen.insert(r.id.as_str()) {
            return Err(GraphError::DuplicateSkillId(r.id.clone()));
        }
    }
    Ok(())
}

/// Graph assembly with precomputed embeddings.
pub fn build_graph_with_vectors(
    records: Vec<SkillRecord>,
    config: &RetrievalConfig,
    providers: &Providers,
    vectors: &VectorIndex,
) -> Result<SkillGraph, GraphError> {
    check_unique(&records)?;
    let mut edges = induce_dependency_edges(&records, config.theta_dep);

    let builder = PoolBuilder::new(&records, config.theta_dep);
    let mut typed: BTreeSet<(String, String, RelationType)> = BTreeSet::new();
    for (i, r) in records.iter().enumerate() {
        let neighbors = match vectors.get(&r.id) {
            Some(v) => vectors.semantic_neighbors(v, config.k_pool + 1).unwrap_or_default(),
            None => Vec::new(),
        };
        let pool: Vec<SkillRecord> = builder.pool(i, &neighbors, config.k_pool).into_iter().cloned().collect();
        for p in validate_relations(r, &pool, &providers.relations) {
            typed.insert((p.source, p.target, p.relation));
        }
    }
    edges.extend(typed.into_iter().map(|(s, t, rel)| TypedEdge::new(s, t, rel)));

    let fingerprint = build_fingerprint(config, &records);
    SkillGraph::new(records, edges, fingerprint)
}
