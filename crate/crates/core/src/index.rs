//! Dense and lexical indexes over skill records.

use std::collections::{BTreeMap, BTreeSet};

use serde::Deserialize;
use serde_json::json;

use crate::enrich::{ProviderEndpoint, ProviderKind};
use crate::error::{EnrichError, IndexError};
use crate::model::{QuerySchema, SkillRecord};
use crate::text;

/// Dimension of the offline hashing embedder.
pub const STUB_DIM: usize = 64;

#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingVector(Vec<f64>);

impl EmbeddingVector {
    pub fn new(values: Vec<f64>) -> Self {
        Self(values)
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn norm(&self) -> f64 {
        self.0.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    fn normalized(mut self) -> Self {
        let n = self.norm();
        if n > 0.0 {
            self.0.iter_mut().for_each(|x| *x /= n);
        }
        self
    }
}

/// Cosine similarities are snapped to this grid so that equal angles
/// computed along different summation orders compare equal.
const COSINE_GRID: f64 = 1e12;

pub fn cosine(a: &EmbeddingVector, b: &EmbeddingVector) -> f64 {
    let (na, nb) = (a.norm(), b.norm());
    if na == 0.0 || nb == 0.0 {
        return 0.0;
    }
    let dot: f64 = a.0.iter().zip(&b.0).map(|(x, y)| x * y).sum();
    ((dot / (na * nb)) * COSINE_GRID).round().clamp(-COSINE_GRID, COSINE_GRID) / COSINE_GRID
}

/// FNV-1a; stable across platforms and toolchains, unlike `DefaultHasher`.
fn fnv1a(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in bytes {
        h ^= u64::from(*b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

/// Bucket a token lands in under the hashing embedder.
pub fn stub_bucket(token: &str) -> usize {
    (fnv1a(token.as_bytes()) % STUB_DIM as u64) as usize
}

/// Feature-hashed token counts, L2-normalized. Text without tokens maps to
/// the zero vector.
pub fn stub_embed(text: &str) -> EmbeddingVector {
    let mut v = vec![0.0; STUB_DIM];
    for token in text::token_stream(text) {
        v[stub_bucket(&token)] += 1.0;
    }
    EmbeddingVector(v).normalized()
}

#[derive(Debug, Deserialize)]
struct EmbeddingResponse {
    vector: Vec<f64>,
}

/// Embed through an external provider; no fallback.
pub fn try_embed_external(text: &str, provider: &ProviderEndpoint) -> Result<EmbeddingVector, EnrichError> {
    let resp = provider.call(ProviderKind::Embedding, json!({"kind": "embedding", "text": text}))?;
    let resp: EmbeddingResponse =
        serde_json::from_value(resp).map_err(|e| EnrichError::SchemaViolation(e.to_string()))?;
    if resp.vector.is_empty() || resp.vector.iter().any(|x| !x.is_finite()) {
        return Err(EnrichError::SchemaViolation("embedding must be a non-empty finite vector".into()));
    }
    Ok(EmbeddingVector(resp.vector))
}

pub fn embed_text(text: &str, provider: &ProviderEndpoint) -> EmbeddingVector {
    if provider.is_local() {
        return stub_embed(text);
    }
    try_embed_external(text, provider).unwrap_or_else(|e| {
        log::warn!("embedding provider failed, using hashing stub: {e}");
        stub_embed(text)
    })
}

pub fn embed_skill(record: &SkillRecord, provider: &ProviderEndpoint) -> EmbeddingVector {
    embed_text(&record.embedding_text(), provider)
}

/// Which embedder produced an index; query vectors must come from the same one.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EmbedderKind {
    StubHash,
    External,
}

impl EmbedderKind {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::StubHash => "stub-hash",
            Self::External => "external",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "stub-hash" => Some(Self::StubHash),
            "external" => Some(Self::External),
            _ => None,
        }
    }
}

/// Embed every record. An external provider is used only if it answers for
/// every record with one consistent dimension; otherwise the whole index
/// falls back to the hashing stub.
pub fn embed_records(records: &[SkillRecord], provider: &ProviderEndpoint) -> (VectorIndex, EmbedderKind) {
    if !provider.is_local() {
        let external: Result<Vec<EmbeddingVector>, EnrichError> = records
            .iter()
            .map(|r| try_embed_external(&r.embedding_text(), provider))
            .collect();
        match external {
            Ok(vectors) => {
                let dim = vectors.first().map_or(STUB_DIM, EmbeddingVector::dim);
                let mut index = VectorIndex::new(dim);
                let consistent = records
                    .iter()
                    .zip(vectors)
                    .all(|(r, v)| index.insert(r.id.clone(), v).is_ok());
                if consistent {
                    return (index, EmbedderKind::External);
                }
                log::warn!("embedding provider returned inconsistent dimensions, using hashing stub");
            }
            Err(e) => log::warn!("embedding provider failed, using hashing stub: {e}"),
        }
    }
    let mut index = VectorIndex::new(STUB_DIM);
    for r in records {
        index
            .insert(r.id.clone(), stub_embed(&r.embedding_text()))
            .expect("stub vectors share one dimension");
    }
    (index, EmbedderKind::StubHash)
}

/// Exhaustive cosine search; ids are kept in ascending order.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorIndex {
    dim: usize,
    entries: BTreeMap<String, EmbeddingVector>,
}

impl VectorIndex {
    pub fn new(dim: usize) -> Self {
        Self {
            dim,
            entries: BTreeMap::new(),
        }
    }

    pub fn insert(&mut self, id: impl Into<String>, vector: EmbeddingVector) -> Result<(), IndexError> {
        if vector.dim() != self.dim {
            return Err(IndexError::DimensionMismatch {
                expected: self.dim,
                got: vector.dim(),
            });
        }
        self.entries.insert(id.into(), vector);
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, id: &str) -> Option<&EmbeddingVector> {
        self.entries.get(id)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, &EmbeddingVector)> {
        self.entries.iter()
    }

    pub fn similarity(&self, id: &str, query: &EmbeddingVector) -> f64 {
        self.entries.get(id).map_or(0.0, |v| cosine(v, query))
    }

    /// Top `k` by cosine similarity, descending, ties by ascending id.
    pub fn semantic_neighbors(&self, query: &EmbeddingVector, k: usize) -> Result<Vec<(String, f64)>, IndexError> {
        if self.entries.is_empty() {
            return Err(IndexError::EmptyIndex);
        }
        if query.dim() != self.dim {
            return Err(IndexError::DimensionMismatch {
                expected: self.dim,
                got: query.dim(),
            });
        }
        let mut scored: Vec<(String, f64)> = self
            .entries
            .iter()
            .map(|(id, v)| (id.clone(), cosine(v, query)))
            .collect();
        sort_scored(&mut scored);
        scored.truncate(k);
        Ok(scored)
    }
}

/// Descending score, ascending id.
pub(crate) fn sort_scored(scored: &mut [(String, f64)]) {
    scored.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
}

/// Record fields that carry lexical evidence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum LexField {
    Name,
    Capability,
    Inputs,
    Outputs,
    Tooling,
    ExampleTasks,
    Entrypoints,
    Snippet,
}

impl LexField {
    pub const ALL: [LexField; 8] = [
        Self::Name,
        Self::Capability,
        Self::Inputs,
        Self::Outputs,
        Self::Tooling,
        Self::ExampleTasks,
        Self::Entrypoints,
        Self::Snippet,
    ];

    /// Fields used by the post-diffusion field match.
    pub const MATCH: [LexField; 5] = [Self::Name, Self::Capability, Self::Inputs, Self::Outputs, Self::Entrypoints];

    pub fn weight(self) -> f64 {
        match self {
            Self::Name => 3.0,
            Self::Capability => 2.0,
            _ => 1.0,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Name => "name",
            Self::Capability => "capability",
            Self::Inputs => "inputs",
            Self::Outputs => "outputs",
            Self::Tooling => "tooling",
            Self::ExampleTasks => "example_tasks",
            Self::Entrypoints => "entrypoints",
            Self::Snippet => "snippet",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|f| f.as_str() == s)
    }

    fn slot(self) -> usize {
        self as usize
    }
}

/// Token sets per lexical field of one record.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FieldTokens([BTreeSet<String>; 8]);

impl FieldTokens {
    pub fn of(record: &SkillRecord) -> Self {
        let mut ft = Self::default();
        ft.0[LexField::Name.slot()] = text::tokens(&record.name);
        ft.0[LexField::Capability.slot()] = text::tokens(&record.capability_text());
        ft.0[LexField::Inputs.slot()] = text::tokens_of_all(&record.inputs);
        ft.0[LexField::Outputs.slot()] = text::tokens_of_all(&record.outputs);
        ft.0[LexField::Tooling.slot()] = text::tokens_of_all(&record.tooling);
        ft.0[LexField::ExampleTasks.slot()] = text::tokens_of_all(&record.example_tasks);
        ft.0[LexField::Entrypoints.slot()] = text::tokens_of_all(&record.script_entrypoints);
        ft.0[LexField::Snippet.slot()] = text::tokens(&record.rendered_snippet);
        ft
    }

    pub fn get(&self, field: LexField) -> &BTreeSet<String> {
        &self.0[field.slot()]
    }

    fn get_mut(&mut self, field: LexField) -> &mut BTreeSet<String> {
        &mut self.0[field.slot()]
    }

    /// Σ weight(f) · |K ∩ tokens(f)| / max(1, |K|) over `fields`.
    pub fn weighted_overlap(&self, keywords: &BTreeSet<&str>, fields: &[LexField]) -> f64 {
        let denom = keywords.len().max(1) as f64;
        fields
            .iter()
            .map(|f| {
                let hits = keywords.iter().filter(|k| self.get(*f).contains(**k)).count();
                f.weight() * hits as f64 / denom
            })
            .sum()
    }
}

/// Weighted keyword overlap between a query and all lexical fields of a
/// record.
pub fn lexical_score(q: &QuerySchema, record: &SkillRecord) -> f64 {
    FieldTokens::of(record).weighted_overlap(&q.keyword_set(), &LexField::ALL)
}

/// Inverted index from token to the (field, id) pairs containing it.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct LexicalIndex {
    fields: BTreeMap<String, FieldTokens>,
    postings: BTreeMap<String, BTreeSet<String>>,
}

impl LexicalIndex {
    pub fn build<'a>(records: impl IntoIterator<Item = &'a SkillRecord>) -> Self {
        let mut index = Self::default();
        for r in records {
            index.insert_tokens(&r.id, FieldTokens::of(r));
        }
        index
    }

    fn insert_tokens(&mut self, id: &str, ft: FieldTokens) {
        for f in LexField::ALL {
            for t in ft.get(f) {
                self.postings.entry(t.clone()).or_default().insert(id.to_string());
            }
        }
        self.fields.insert(id.to_string(), ft);
    }

    pub fn field_tokens(&self, id: &str) -> Option<&FieldTokens> {
        self.fields.get(id)
    }

    pub fn score(&self, q: &QuerySchema, id: &str) -> f64 {
        self.fields
            .get(id)
            .map_or(0.0, |ft| ft.weighted_overlap(&q.keyword_set(), &LexField::ALL))
    }

    /// Top `k` ids with a positive lexical score.
    pub fn top_k(&self, q: &QuerySchema, k: usize) -> Vec<(String, f64)> {
        let keywords = q.keyword_set();
        let candidates: BTreeSet<&String> = keywords
            .iter()
            .filter_map(|kw| self.postings.get(*kw))
            .flatten()
            .collect();
        let mut scored: Vec<(String, f64)> = candidates
            .into_iter()
            .map(|id| (id.clone(), self.fields[id].weighted_overlap(&keywords, &LexField::ALL)))
            .filter(|(_, s)| *s > 0.0)
            .collect();
        sort_scored(&mut scored);
        scored.truncate(k);
        scored
    }

    /// `(token, field, id)` rows in sorted order.
    pub fn rows(&self) -> Vec<(&str, LexField, &str)> {
        let mut rows = Vec::new();
        for (id, ft) in &self.fields {
            for f in LexField::ALL {
                for t in ft.get(f) {
                    rows.push((t.as_str(), f, id.as_str()));
                }
            }
        }
        rows.sort();
        rows
    }

    /// Rebuild from rows; `ids` registers records with no tokens at all.
    pub fn from_rows<'a>(
        rows: impl IntoIterator<Item = (String, LexField, String)>,
        ids: impl IntoIterator<Item = &'a String>,
    ) -> Self {
        let mut per_id: BTreeMap<String, FieldTokens> = ids.into_iter().map(|id| (id.clone(), FieldTokens::default())).collect();
        for (token, field, id) in rows {
            per_id.entry(id).or_default().get_mut(field).insert(token);
        }
        let mut index = Self::default();
        for (id, ft) in per_id {
            index.insert_tokens(&id, ft);
        }
        index
    }
}
