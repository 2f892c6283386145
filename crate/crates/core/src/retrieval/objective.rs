use std::collections::{BTreeSet, HashMap};

use crate::error::RetrievalError;
use crate::model::{RelationType, SkillGraph};

/// Relevance of the bundle plus `beta` per dependency edge inside it.
pub fn bundle_objective<'a>(
    bundle: impl IntoIterator<Item = &'a str>,
    relevance: &HashMap<String, f64>,
    graph: &SkillGraph,
    beta: f64,
) -> Result<f64, RetrievalError> {
    let members: BTreeSet<&str> = bundle.into_iter().collect();
    if let Some(bad) = members.iter().find(|id| graph.node(id).is_none()) {
        return Err(RetrievalError::UnknownId(bad.to_string()));
    }
    let relevance_sum: f64 = members.iter().map(|id| relevance.get(*id).copied().unwrap_or(0.0)).sum();
    let deps = graph.edges_within(&members).filter(|e| e.relation == RelationType::Dep).count();
    Ok(relevance_sum + beta * deps as f64)
}
