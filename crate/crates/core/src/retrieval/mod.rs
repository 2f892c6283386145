//! Query-time pipeline: rewrite, seed, diffuse, rerank, hydrate.

pub mod hydrate;
pub mod objective;
pub mod ppr;
pub mod rerank;
pub mod seed;
pub mod transition;

use std::collections::BTreeMap;

pub use hydrate::{hydrate, hydrate_skill};
pub use objective::bundle_objective;
pub use ppr::{personalized_pagerank, PprOutcome};
pub use rerank::rerank;
pub use seed::{merge_seed_scores, seed_scores, SeedCandidate, SeedDistribution};
pub use transition::{build_transition, TransitionOperator};

use crate::config::RetrievalConfig;
use crate::enrich::{rewrite_query, Providers};
use crate::error::RetrievalError;
use crate::index::{stub_embed, try_embed_external, EmbedderKind, EmbeddingVector};
use crate::model::{QuerySchema, RetrievalResult, ScoredSkill};
use crate::workspace::Workspace;

/// Every intermediate of one retrieval.
#[derive(Debug, Clone)]
pub struct RetrievalTrace {
    pub query: QuerySchema,
    pub seeds: SeedDistribution,
    pub diffusion: BTreeMap<String, f64>,
    pub iterations: usize,
    pub ranked: Vec<ScoredSkill>,
    pub result: RetrievalResult,
}

fn query_text(q: &QuerySchema) -> String {
    let mut parts = vec![q.raw.clone()];
    parts.extend(q.operations.iter().cloned());
    parts.extend(q.artifacts.iter().cloned());
    parts.join(" \n")
}

/// Embed the query the same way the index was embedded; `None` when that is
/// impossible, which disables the dense channel.
fn embed_query(q: &QuerySchema, ws: &Workspace, providers: &Providers) -> Option<EmbeddingVector> {
    let text = query_text(q);
    let v = match ws.embedder {
        EmbedderKind::StubHash => stub_embed(&text),
        EmbedderKind::External => try_embed_external(&text, &providers.embedding).ok()?,
    };
    (v.dim() == ws.vectors.dim()).then_some(v)
}

pub fn retrieve(raw_query: &str, ws: &Workspace, config: &RetrievalConfig) -> Result<RetrievalResult, RetrievalError> {
    retrieve_with(raw_query, ws, config, &Providers::local())
}

pub fn retrieve_with(
    raw_query: &str,
    ws: &Workspace,
    config: &RetrievalConfig,
    providers: &Providers,
) -> Result<RetrievalResult, RetrievalError> {
    match retrieve_traced(raw_query, ws, config, providers) {
        Ok(trace) => Ok(trace.result),
        Err(RetrievalError::NoCandidates) => Ok(RetrievalResult::miss()),
        Err(e) => Err(e),
    }
}

/// Like [`retrieve_with`] but keeps intermediates. A query with no seed
/// evidence is `Err(NoCandidates)` here.
pub fn retrieve_traced(
    raw_query: &str,
    ws: &Workspace,
    config: &RetrievalConfig,
    providers: &Providers,
) -> Result<RetrievalTrace, RetrievalError> {
    let query = rewrite_query(raw_query, providers.rewrite_endpoint()).map_err(|_| RetrievalError::EmptyQuery)?;
    if ws.graph.is_empty() {
        return Err(RetrievalError::EmptyIndex);
    }
    let qv = embed_query(&query, ws, providers);
    let seeds = seed_scores(&query, qv.as_ref(), &ws.vectors, &ws.lexical, config)?;

    let p: Vec<f64> = ws.graph.ids().iter().map(|id| seeds.get(id)).collect();
    let t = build_transition(&ws.graph, config);
    let outcome = personalized_pagerank(&t, &p, config)?;
    let diffusion: BTreeMap<String, f64> = ws
        .graph
        .ids()
        .iter()
        .cloned()
        .zip(outcome.scores.iter().copied())
        .filter(|(_, s)| *s > 0.0)
        .collect();

    let ranked = rerank(&diffusion, &query, &ws.graph, Some(&ws.lexical), config.mu);
    let result = hydrate(&ranked, &ws.graph, config);
    Ok(RetrievalTrace {
        query,
        seeds,
        diffusion,
        iterations: outcome.iterations,
        ranked,
        result,
    })
}
