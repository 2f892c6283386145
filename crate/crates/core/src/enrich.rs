//! External provider contracts with deterministic offline fallbacks.
//!
//! Four request kinds travel as one JSON document per line:
//!
//! | kind | request | response |
//! |------|---------|----------|
//! | `semantic_completion` | `name`, `description`, `body` | `one_line_capability`, `inputs`, `outputs`, `domain_tags`, `tooling`, `example_tasks`, `edges` |
//! | `relation_validation` | `source`, `candidates` | `proposals: [{source, target, relation}]` |
//! | `query_rewrite` | `query` | `goal`, `operations`, `artifacts`, `constraints`, `keywords` |
//! | `embedding` | `text` | `vector` |
//!
//! An endpoint without a transport is a local stub and always takes the
//! fallback path. Any transport failure or schema violation also degrades to
//! the fallback; nothing here fails a build.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::io::Write;
use std::process::{Command, Stdio};
use std::sync::Arc;

use serde::Deserialize;
use serde_json::{json, Value};

use crate::error::EnrichError;
use crate::model::{QuerySchema, RelationType, SkillRecord};
use crate::text;

/// Environment variable naming an external provider command.
pub const PROVIDER_ENV: &str = "GOS_PROVIDER_CMD";

/// Jaccard threshold over tag and tooling tokens for the offline sem stub.
pub const STUB_SEM_THRESHOLD: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProviderKind {
    SemanticCompletion,
    RelationValidation,
    QueryRewrite,
    Embedding,
}

impl ProviderKind {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::SemanticCompletion => "semantic_completion",
            Self::RelationValidation => "relation_validation",
            Self::QueryRewrite => "query_rewrite",
            Self::Embedding => "embedding",
        }
    }
}

/// Request/response exchange with an external provider.
pub trait Transport: Send + Sync + fmt::Debug {
    fn exchange(&self, request: &Value) -> Result<Value, EnrichError>;
}

/// Runs `sh -c <command>`, writes the request as one line on stdin and reads
/// the first non-empty stdout line as the response.
#[derive(Debug, Clone)]
pub struct CommandTransport {
    command: String,
}

impl CommandTransport {
    pub fn new(command: impl Into<String>) -> Self {
        Self { command: command.into() }
    }
}

impl Transport for CommandTransport {
    fn exchange(&self, request: &Value) -> Result<Value, EnrichError> {
        let unavailable = |e: std::io::Error| EnrichError::ProviderUnavailable(format!("{}: {e}", self.command));
        let mut child = Command::new("sh")
            .arg("-c")
            .arg(&self.command)
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::null())
            .spawn()
            .map_err(unavailable)?;
        if let Some(mut stdin) = child.stdin.take() {
            // A provider that exits without reading stdin is still allowed to answer.
            let _ = writeln!(stdin, "{request}");
        }
        let output = child.wait_with_output().map_err(unavailable)?;
        if !output.status.success() {
            return Err(EnrichError::ProviderUnavailable(format!(
                "{} exited with {}",
                self.command, output.status
            )));
        }
        let stdout = String::from_utf8_lossy(&output.stdout);
        let line = stdout
            .lines()
            .find(|l| !l.trim().is_empty())
            .ok_or_else(|| EnrichError::ProviderUnavailable(format!("{} produced no output", self.command)))?;
        serde_json::from_str(line).map_err(|e| EnrichError::SchemaViolation(format!("invalid JSON: {e}")))
    }
}

#[derive(Debug, Clone)]
pub struct ProviderEndpoint {
    pub kind: ProviderKind,
    transport: Option<Arc<dyn Transport>>,
}

impl ProviderEndpoint {
    pub fn local(kind: ProviderKind) -> Self {
        Self { kind, transport: None }
    }

    pub fn external(kind: ProviderKind, transport: Arc<dyn Transport>) -> Self {
        Self {
            kind,
            transport: Some(transport),
        }
    }

    pub fn is_local(&self) -> bool {
        self.transport.is_none()
    }

    pub(crate) fn call(&self, expected: ProviderKind, request: Value) -> Result<Value, EnrichError> {
        if self.kind != expected {
            return Err(EnrichError::ProviderUnavailable(format!(
                "endpoint serves {}, not {}",
                self.kind.as_str(),
                expected.as_str()
            )));
        }
        match &self.transport {
            None => Err(EnrichError::ProviderUnavailable("local stub".into())),
            Some(t) => t.exchange(&request),
        }
    }
}

/// One endpoint per provider kind.
#[derive(Debug, Clone)]
pub struct Providers {
    pub completion: ProviderEndpoint,
    pub relations: ProviderEndpoint,
    pub rewrite: ProviderEndpoint,
    pub embedding: ProviderEndpoint,
}

impl Providers {
    pub fn local() -> Self {
        Self {
            completion: ProviderEndpoint::local(ProviderKind::SemanticCompletion),
            relations: ProviderEndpoint::local(ProviderKind::RelationValidation),
            rewrite: ProviderEndpoint::local(ProviderKind::QueryRewrite),
            embedding: ProviderEndpoint::local(ProviderKind::Embedding),
        }
    }

    /// All four kinds served by one transport.
    pub fn with_transport(transport: Arc<dyn Transport>) -> Self {
        Self {
            completion: ProviderEndpoint::external(ProviderKind::SemanticCompletion, transport.clone()),
            relations: ProviderEndpoint::external(ProviderKind::RelationValidation, transport.clone()),
            rewrite: ProviderEndpoint::external(ProviderKind::QueryRewrite, transport.clone()),
            embedding: ProviderEndpoint::external(ProviderKind::Embedding, transport),
        }
    }

    /// External command from `GOS_PROVIDER_CMD` when set, local stubs otherwise.
    pub fn from_env() -> Self {
        match std::env::var(PROVIDER_ENV) {
            Ok(cmd) if !cmd.trim().is_empty() => Self::with_transport(Arc::new(CommandTransport::new(cmd))),
            _ => Self::local(),
        }
    }

    /// Query rewriting is skipped entirely for local stubs.
    pub fn rewrite_endpoint(&self) -> Option<&ProviderEndpoint> {
        (!self.rewrite.is_local()).then_some(&self.rewrite)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct RelationProposal {
    pub source: String,
    pub target: String,
    pub relation: RelationType,
}

#[derive(Debug, Default, Deserialize)]
#[serde(default)]
struct CompletionResponse {
    one_line_capability: Option<String>,
    inputs: Option<Vec<String>>,
    outputs: Option<Vec<String>>,
    domain_tags: Option<Vec<String>>,
    tooling: Option<Vec<String>>,
    example_tasks: Option<Vec<String>>,
    #[allow(dead_code)]
    edges: Option<Vec<Value>>,
}

fn decode<T: for<'de> Deserialize<'de>>(value: Value) -> Result<T, EnrichError> {
    if !value.is_object() {
        return Err(EnrichError::SchemaViolation("response is not a JSON object".into()));
    }
    serde_json::from_value(value).map_err(|e| EnrichError::SchemaViolation(e.to_string()))
}

fn needs_completion(r: &SkillRecord) -> bool {
    r.one_line_capability.trim().is_empty()
        || r.inputs.is_empty()
        || r.outputs.is_empty()
        || r.domain_tags.is_empty()
        || r.tooling.is_empty()
        || r.example_tasks.is_empty()
}

/// Fill empty node-local semantic fields. Parsed values are never replaced,
/// name and description are never touched, and any `edges` the provider
/// returns are discarded.
pub fn complete_semantics(raw: &SkillRecord, provider: &ProviderEndpoint) -> SkillRecord {
    let mut record = raw.clone();
    if needs_completion(raw) {
        let request = json!({
            "kind": ProviderKind::SemanticCompletion.as_str(),
            "name": raw.name,
            "description": raw.description,
            "body": raw.raw_body,
        });
        match provider
            .call(ProviderKind::SemanticCompletion, request)
            .and_then(decode::<CompletionResponse>)
        {
            Ok(resp) => merge_completion(&mut record, resp),
            Err(e) => log::debug!("semantic completion for `{}` fell back: {e}", raw.id),
        }
    }
    if record.one_line_capability.trim().is_empty() {
        record.one_line_capability = text::first_sentence(&record.description);
    }
    record
}

fn merge_completion(record: &mut SkillRecord, resp: CompletionResponse) {
    fn fill(slot: &mut Vec<String>, value: Option<Vec<String>>, lowercase: bool) {
        if slot.is_empty() {
            if let Some(v) = value {
                *slot = text::dedup_phrases(v, lowercase);
            }
        }
    }
    if record.one_line_capability.trim().is_empty() {
        if let Some(cap) = resp.one_line_capability {
            record.one_line_capability = text::collapse_whitespace(&cap);
        }
    }
    fill(&mut record.inputs, resp.inputs, true);
    fill(&mut record.outputs, resp.outputs, true);
    fill(&mut record.domain_tags, resp.domain_tags, true);
    fill(&mut record.tooling, resp.tooling, true);
    fill(&mut record.example_tasks, resp.example_tasks, false);
}

#[derive(Debug, Deserialize)]
struct ValidationResponse {
    proposals: Vec<RawProposal>,
}

#[derive(Debug, Deserialize)]
struct RawProposal {
    source: String,
    target: String,
    relation: String,
}

fn relation_view(r: &SkillRecord) -> Value {
    json!({
        "id": r.id,
        "capability": r.capability_text(),
        "inputs": r.inputs,
        "outputs": r.outputs,
        "tags": r.domain_tags,
    })
}

/// Typed non-dependency relations from `source` to members of `candidates`.
///
/// Provider proposals are kept only when they start at `source`, end at a
/// pool member, and carry `wf`, `sem` or `alt`. A pair keeps at most one
/// relation, the first in `wf < sem < alt` order.
pub fn validate_relations(
    source: &SkillRecord,
    candidates: &[SkillRecord],
    provider: &ProviderEndpoint,
) -> Vec<RelationProposal> {
    if candidates.is_empty() {
        return Vec::new();
    }
    let request = json!({
        "kind": ProviderKind::RelationValidation.as_str(),
        "source": relation_view(source),
        "candidates": candidates.iter().map(relation_view).collect::<Vec<_>>(),
    });
    let response = provider
        .call(ProviderKind::RelationValidation, request)
        .and_then(decode::<ValidationResponse>);
    match response {
        Ok(resp) => filter_proposals(source, candidates, resp.proposals),
        Err(e) => {
            log::debug!("relation validation for `{}` fell back: {e}", source.id);
            stub_relations(source, candidates)
        }
    }
}

fn filter_proposals(source: &SkillRecord, candidates: &[SkillRecord], raw: Vec<RawProposal>) -> Vec<RelationProposal> {
    let pool: BTreeSet<&str> = candidates
        .iter()
        .map(|c| c.id.as_str())
        .filter(|id| *id != source.id)
        .collect();
    let mut best: BTreeMap<String, RelationType> = BTreeMap::new();
    for p in raw {
        let Ok(relation) = p.relation.parse::<RelationType>() else {
            continue;
        };
        if relation == RelationType::Dep || p.source != source.id || !pool.contains(p.target.as_str()) {
            continue;
        }
        best.entry(p.target)
            .and_modify(|r| *r = (*r).min(relation))
            .or_insert(relation);
    }
    best.into_iter()
        .map(|(target, relation)| RelationProposal {
            source: source.id.clone(),
            target,
            relation,
        })
        .collect()
}

/// Offline fallback: a `sem` proposal for each candidate whose tag and
/// tooling tokens overlap the source's with Jaccard at least 0.5.
pub fn stub_relations(source: &SkillRecord, candidates: &[SkillRecord]) -> Vec<RelationProposal> {
    let profile = |r: &SkillRecord| text::tokens_of_all(r.domain_tags.iter().chain(r.tooling.iter()));
    let mine = profile(source);
    let mut out: Vec<RelationProposal> = candidates
        .iter()
        .filter(|c| c.id != source.id)
        .filter(|c| text::jaccard(&mine, &profile(c)) >= STUB_SEM_THRESHOLD)
        .map(|c| RelationProposal {
            source: source.id.clone(),
            target: c.id.clone(),
            relation: RelationType::Sem,
        })
        .collect();
    out.sort();
    out.dedup();
    out
}

#[derive(Debug, Default, Deserialize)]
#[serde(default)]
struct RewriteResponse {
    goal: Option<String>,
    operations: Option<Vec<String>>,
    artifacts: Option<Vec<String>>,
    constraints: Option<Vec<String>>,
    keywords: Option<Vec<String>>,
}

/// Map a raw query to a retrieval schema. Keywords always include the
/// deterministic normalization of `raw`, so they are never empty for a
/// non-blank query.
pub fn rewrite_query(raw: &str, provider: Option<&ProviderEndpoint>) -> Result<QuerySchema, EnrichError> {
    if raw.trim().is_empty() {
        return Err(EnrichError::EmptyQuery);
    }
    let fallback = QuerySchema {
        goal: raw.to_string(),
        keywords: text::keywords(raw),
        raw: raw.to_string(),
        ..Default::default()
    };
    let Some(provider) = provider else {
        return Ok(fallback);
    };
    let request = json!({"kind": ProviderKind::QueryRewrite.as_str(), "query": raw});
    let resp = match provider
        .call(ProviderKind::QueryRewrite, request)
        .and_then(decode::<RewriteResponse>)
    {
        Ok(resp) => resp,
        Err(e) => {
            log::debug!("query rewrite fell back: {e}");
            return Ok(fallback);
        }
    };
    let mut keywords: BTreeSet<String> = fallback.keywords.iter().cloned().collect();
    for k in resp.keywords.iter().flatten() {
        keywords.extend(text::tokens(k));
    }
    let goal = resp.goal.filter(|g| !g.trim().is_empty()).unwrap_or_else(|| raw.to_string());
    Ok(QuerySchema {
        goal,
        operations: text::dedup_phrases(resp.operations.unwrap_or_default(), false),
        artifacts: text::dedup_phrases(resp.artifacts.unwrap_or_default(), false),
        constraints: text::dedup_phrases(resp.constraints.unwrap_or_default(), false),
        keywords: keywords.into_iter().collect(),
        raw: raw.to_string(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[derive(Debug)]
    struct Canned(Value);

    impl Transport for Canned {
        fn exchange(&self, _request: &Value) -> Result<Value, EnrichError> {
            Ok(self.0.clone())
        }
    }

    fn canned(kind: ProviderKind, v: Value) -> ProviderEndpoint {
        ProviderEndpoint::external(kind, Arc::new(Canned(v)))
    }

    fn record(id: &str) -> SkillRecord {
        SkillRecord {
            id: id.into(),
            name: id.into(),
            description: format!("{id} does things. Second sentence."),
            ..Default::default()
        }
    }

    fn full(id: &str) -> SkillRecord {
        SkillRecord {
            one_line_capability: "cap".into(),
            inputs: vec!["a".into()],
            outputs: vec!["b".into()],
            domain_tags: vec!["t".into()],
            tooling: vec!["x".into()],
            example_tasks: vec!["e".into()],
            ..record(id)
        }
    }

    #[test]
    fn complete_records_are_untouched() {
        let r = full("vid");
        let p = canned(ProviderKind::SemanticCompletion, json!({"inputs": ["other"]}));
        assert_eq!(complete_semantics(&r, &p), r);
    }

    #[test]
    fn completion_fills_only_empty_fields() {
        let mut r = full("vid");
        r.inputs.clear();
        let p = canned(
            ProviderKind::SemanticCompletion,
            json!({"inputs": ["Video File"], "outputs": ["ignored"], "name": "hijack", "edges": [{"source": "vid", "target": "x"}]}),
        );
        let out = complete_semantics(&r, &p);
        assert_eq!(out.inputs, vec!["video file"]);
        assert_eq!(out.outputs, vec!["b"]);
        assert_eq!(out.name, r.name);
        assert_eq!(out.description, r.description);
    }

    #[test]
    fn schema_violation_falls_back_to_first_sentence() {
        let r = record("vid");
        let p = canned(ProviderKind::SemanticCompletion, json!({"inputs": "not a list"}));
        let out = complete_semantics(&r, &p);
        assert_eq!(out.one_line_capability, "vid does things.");
        assert!(out.inputs.is_empty());
        let local = complete_semantics(&r, &ProviderEndpoint::local(ProviderKind::SemanticCompletion));
        assert_eq!(local, out);
    }

    #[test]
    fn stub_relations_use_tag_jaccard() {
        let mut a = record("a");
        let mut b = record("b");
        a.domain_tags = vec!["video analytics".into()];
        b.domain_tags = vec!["video analytics".into()];
        let local = ProviderEndpoint::local(ProviderKind::RelationValidation);
        let props = validate_relations(&a, std::slice::from_ref(&b), &local);
        assert_eq!(
            props,
            vec![RelationProposal {
                source: "a".into(),
                target: "b".into(),
                relation: RelationType::Sem
            }]
        );
        assert!(validate_relations(&a, &[], &local).is_empty());
    }

    #[test]
    fn provider_proposals_are_filtered_to_pool() {
        let a = record("a");
        let b = record("b");
        let p = canned(
            ProviderKind::RelationValidation,
            json!({"proposals": [
                {"source": "a", "target": "b", "relation": "alt"},
                {"source": "a", "target": "b", "relation": "workflow"},
                {"source": "a", "target": "zzz", "relation": "sem"},
                {"source": "a", "target": "b", "relation": "dep"},
                {"source": "b", "target": "a", "relation": "sem"},
                {"source": "a", "target": "b", "relation": "causes"}
            ]}),
        );
        let props = validate_relations(&a, &[b], &p);
        assert_eq!(props.len(), 1);
        assert_eq!(props[0].relation, RelationType::Wf);
    }

    #[test]
    fn rewrite_fallback_normalizes() {
        let q = rewrite_query("Count pedestrians in MP4 video", None).unwrap();
        assert_eq!(q.keywords, vec!["count", "in", "mp4", "pedestrians", "video"]);
        assert_eq!(q.goal, "Count pedestrians in MP4 video");
        assert!(matches!(rewrite_query("  \n", None), Err(EnrichError::EmptyQuery)));
    }

    #[test]
    fn rewrite_with_goal_only_keeps_keywords() {
        let p = canned(ProviderKind::QueryRewrite, json!({"goal": "count people"}));
        let q = rewrite_query("Count pedestrians", Some(&p)).unwrap();
        assert_eq!(q.goal, "count people");
        assert_eq!(q.keywords, vec!["count", "pedestrians"]);
        let p = canned(ProviderKind::QueryRewrite, json!({"keywords": ["MP4 Video"], "artifacts": ["clip.mp4"]}));
        let q = rewrite_query("Count pedestrians", Some(&p)).unwrap();
        assert_eq!(q.keywords, vec!["count", "mp4", "pedestrians", "video"]);
        assert_eq!(q.artifacts, vec!["clip.mp4"]);
    }

    #[test]
    fn wrong_kind_is_unavailable() {
        let p = canned(ProviderKind::Embedding, json!({}));
        assert!(matches!(
            p.call(ProviderKind::QueryRewrite, json!({})),
            Err(EnrichError::ProviderUnavailable(_))
        ));
    }
}
