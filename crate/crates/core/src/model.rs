//! Domain types shared across indexing and retrieval.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::GraphError;
use crate::text;

/// Edge label. The set is closed: nothing outside these four is accepted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RelationType {
    Dep,
    Wf,
    Sem,
    Alt,
}

impl RelationType {
    pub const ALL: [RelationType; 4] = [Self::Dep, Self::Wf, Self::Sem, Self::Alt];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Dep => "dep",
            Self::Wf => "wf",
            Self::Sem => "sem",
            Self::Alt => "alt",
        }
    }

    pub(crate) fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for RelationType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnknownRelation(pub String);

impl fmt::Display for UnknownRelation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "unknown relation type `{}`", self.0)
    }
}

impl std::error::Error for UnknownRelation {}

impl FromStr for RelationType {
    type Err = UnknownRelation;

    /// Accepts the short labels and the long names providers tend to emit.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "dep" | "dependency" => Ok(Self::Dep),
            "wf" | "workflow" => Ok(Self::Wf),
            "sem" | "semantic" => Ok(Self::Sem),
            "alt" | "alternative" => Ok(Self::Alt),
            _ => Err(UnknownRelation(s.to_string())),
        }
    }
}

/// Fixed-size table keyed by relation type.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RelationWeights([f64; 4]);

impl RelationWeights {
    pub fn new(dep: f64, wf: f64, sem: f64, alt: f64) -> Self {
        Self([dep, wf, sem, alt])
    }

    pub fn uniform(value: f64) -> Self {
        Self([value; 4])
    }

    pub fn get(&self, relation: RelationType) -> f64 {
        self.0[relation.index()]
    }

    pub fn set(&mut self, relation: RelationType, value: f64) {
        self.0[relation.index()] = value;
    }

    pub fn sum(&self) -> f64 {
        self.0.iter().sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = (RelationType, f64)> + '_ {
        RelationType::ALL.into_iter().map(|r| (r, self.get(r)))
    }
}

/// Normalized, retrieval-ready skill node.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, Default)]
pub struct SkillRecord {
    pub id: String,
    pub name: String,
    pub description: String,
    pub one_line_capability: String,
    pub inputs: Vec<String>,
    pub outputs: Vec<String>,
    pub domain_tags: Vec<String>,
    pub tooling: Vec<String>,
    pub example_tasks: Vec<String>,
    pub script_entrypoints: Vec<String>,
    pub compatibility: Vec<String>,
    pub allowed_tools: Vec<String>,
    pub source_path: PathBuf,
    pub rendered_snippet: String,
    pub raw_body: String,
}

impl SkillRecord {
    /// Canonical id derived from a skill name.
    pub fn id_for(name: &str) -> String {
        text::slug(name)
    }

    /// Capability summary, falling back to the first description sentence.
    pub fn capability_text(&self) -> String {
        if self.one_line_capability.trim().is_empty() {
            text::first_sentence(&self.description)
        } else {
            self.one_line_capability.clone()
        }
    }

    /// Per-descriptor token sets for the inputs.
    pub fn input_token_sets(&self) -> Vec<BTreeSet<String>> {
        self.inputs.iter().map(|d| text::tokens(d)).collect()
    }

    pub fn output_token_sets(&self) -> Vec<BTreeSet<String>> {
        self.outputs.iter().map(|d| text::tokens(d)).collect()
    }

    /// Text handed to the embedder: name, capability, I/O descriptors, tags.
    pub fn embedding_text(&self) -> String {
        let mut parts = vec![self.name.clone(), self.capability_text()];
        parts.extend(self.inputs.iter().cloned());
        parts.extend(self.outputs.iter().cloned());
        parts.extend(self.domain_tags.iter().cloned());
        parts.join(" \n")
    }

    /// Execution notes shown at hydration: compatibility and allowed tools.
    pub fn execution_notes(&self) -> String {
        let mut notes = Vec::new();
        if !self.compatibility.is_empty() {
            notes.push(format!("compatibility: {}", self.compatibility.join("; ")));
        }
        if !self.allowed_tools.is_empty() {
            notes.push(format!("allowed tools: {}", self.allowed_tools.join(", ")));
        }
        notes.join(" | ")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TypedEdge {
    pub source: String,
    pub target: String,
    pub relation: RelationType,
    pub weight: f64,
}

impl TypedEdge {
    pub fn new(source: impl Into<String>, target: impl Into<String>, relation: RelationType) -> Self {
        Self {
            source: source.into(),
            target: target.into(),
            relation,
            weight: 1.0,
        }
    }

    fn sort_key(&self) -> (&str, RelationType, &str) {
        (&self.source, self.relation, &self.target)
    }

    /// One-line form used in evidence blocks.
    pub fn evidence_line(&self) -> String {
        format!("{} -[{}]-> {}", self.source, self.relation, self.target)
    }
}

/// Immutable typed directed graph over skill records.
///
/// Nodes are kept in ascending id order; the position of a node in
/// [`SkillGraph::ids`] is its dense index used by the retrieval operators.
#[derive(Debug, Clone, PartialEq)]
pub struct SkillGraph {
    nodes: BTreeMap<String, SkillRecord>,
    ids: Vec<String>,
    index: HashMap<String, usize>,
    edges: Vec<TypedEdge>,
    fingerprint: String,
}

impl SkillGraph {
    pub fn new(
        records: Vec<SkillRecord>,
        mut edges: Vec<TypedEdge>,
        fingerprint: String,
    ) -> Result<Self, GraphError> {
        let mut nodes = BTreeMap::new();
        for record in records {
            if nodes.contains_key(&record.id) {
                return Err(GraphError::DuplicateSkillId(record.id));
            }
            nodes.insert(record.id.clone(), record);
        }
        for e in &edges {
            if !nodes.contains_key(&e.source) || !nodes.contains_key(&e.target) {
                return Err(GraphError::DanglingEdge {
                    from: e.source.clone(),
                    to: e.target.clone(),
                });
            }
            if e.source == e.target {
                return Err(GraphError::SelfLoop(e.source.clone()));
            }
            if !(e.weight > 0.0) || !e.weight.is_finite() {
                return Err(GraphError::NonPositiveWeight {
                    from: e.source.clone(),
                    to: e.target.clone(),
                    weight: e.weight,
                });
            }
        }
        edges.sort_by(|a, b| a.sort_key().cmp(&b.sort_key()));
        if let Some(w) = edges.windows(2).find(|w| w[0].sort_key() == w[1].sort_key()) {
            return Err(GraphError::DuplicateEdge {
                from: w[1].source.clone(),
                to: w[1].target.clone(),
                relation: w[1].relation.to_string(),
            });
        }
        let ids: Vec<String> = nodes.keys().cloned().collect();
        let index = ids.iter().enumerate().map(|(i, id)| (id.clone(), i)).collect();
        Ok(Self {
            nodes,
            ids,
            index,
            edges,
            fingerprint,
        })
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }

    pub fn node(&self, id: &str) -> Option<&SkillRecord> {
        self.nodes.get(id)
    }

    pub fn nodes(&self) -> impl Iterator<Item = &SkillRecord> {
        self.nodes.values()
    }

    /// Edges sorted by (source, relation, target).
    pub fn edges(&self) -> &[TypedEdge] {
        &self.edges
    }

    pub fn fingerprint(&self) -> &str {
        &self.fingerprint
    }

    pub fn edge_count(&self, relation: RelationType) -> usize {
        self.edges.iter().filter(|e| e.relation == relation).count()
    }

    /// Edges with both endpoints inside `members`.
    pub fn edges_within<'a>(&'a self, members: &'a BTreeSet<&str>) -> impl Iterator<Item = &'a TypedEdge> {
        self.edges
            .iter()
            .filter(move |e| members.contains(e.source.as_str()) && members.contains(e.target.as_str()))
    }

    pub fn incident_edges<'a>(&'a self, id: &'a str) -> impl Iterator<Item = &'a TypedEdge> {
        self.edges.iter().filter(move |e| e.source == id || e.target == id)
    }

    /// `dep: N  wf: N  sem: N  alt: N`
    pub fn relation_summary(&self) -> String {
        RelationType::ALL
            .iter()
            .map(|r| format!("{}: {}", r, self.edge_count(*r)))
            .collect::<Vec<_>>()
            .join("  ")
    }
}

/// Structured retrieval query.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct QuerySchema {
    pub goal: String,
    pub operations: Vec<String>,
    pub artifacts: Vec<String>,
    pub constraints: Vec<String>,
    pub keywords: Vec<String>,
    pub raw: String,
}

impl QuerySchema {
    pub fn keyword_set(&self) -> BTreeSet<&str> {
        self.keywords.iter().map(String::as_str).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScoredSkill {
    pub id: String,
    pub diffusion_score: f64,
    pub match_score: f64,
    pub final_score: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum RetrievalStatus {
    #[serde(rename = "SKILL_HIT")]
    SkillHit,
    #[serde(rename = "NO_SKILL_HIT")]
    NoSkillHit,
}

impl fmt::Display for RetrievalStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::SkillHit => "SKILL_HIT",
            Self::NoSkillHit => "NO_SKILL_HIT",
        })
    }
}

/// One agent-consumable bundle entry.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HydratedSkill {
    pub id: String,
    pub final_score: f64,
    pub source_path: PathBuf,
    pub capability: String,
    pub execution_notes: String,
    pub snippet: String,
}

impl HydratedSkill {
    /// The exact text charged against the context budget.
    pub fn payload(&self) -> String {
        let mut out = format!("Source: {}\nCapability: {}\n", self.source_path.display(), self.capability);
        if !self.execution_notes.is_empty() {
            out.push_str("Notes: ");
            out.push_str(&self.execution_notes);
            out.push('\n');
        }
        out.push_str(&self.snippet);
        out
    }

    pub fn cost(&self) -> usize {
        self.payload().chars().count()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RetrievalResult {
    pub status: RetrievalStatus,
    pub bundle: Vec<HydratedSkill>,
    pub evidence_edges: Vec<TypedEdge>,
    pub total_cost: usize,
}

impl RetrievalResult {
    pub fn miss() -> Self {
        Self {
            status: RetrievalStatus::NoSkillHit,
            bundle: Vec::new(),
            evidence_edges: Vec::new(),
            total_cost: 0,
        }
    }

    pub fn bundle_ids(&self) -> Vec<&str> {
        self.bundle.iter().map(|b| b.id.as_str()).collect()
    }
}
