//! Budgeted bundle assembly.

use std::collections::BTreeSet;

use crate::config::RetrievalConfig;
use crate::model::{HydratedSkill, RetrievalResult, RetrievalStatus, ScoredSkill, SkillGraph, SkillRecord};
use crate::parser::{render_snippet, MIN_SNIPPET_BUDGET};

pub fn hydrate_skill(record: &SkillRecord, final_score: f64, per_skill_budget: usize) -> HydratedSkill {
    let snippet = if per_skill_budget >= MIN_SNIPPET_BUDGET {
        render_snippet(record, per_skill_budget).unwrap_or_default()
    } else {
        String::new()
    };
    HydratedSkill {
        id: record.id.clone(),
        final_score,
        source_path: record.source_path.clone(),
        capability: record.capability_text(),
        execution_notes: record.execution_notes(),
        snippet,
    }
}

/// Take ranked skills in order while they fit the global budget, stopping
/// at the first that does not. Evidence edges between included skills are
/// then added under the same rule.
pub fn hydrate(ranked: &[ScoredSkill], graph: &SkillGraph, config: &RetrievalConfig) -> RetrievalResult {
    let mut bundle = Vec::new();
    let mut total = 0usize;
    for s in ranked.iter().filter(|s| s.final_score >= config.hit_threshold) {
        let Some(record) = graph.node(&s.id) else { continue };
        let item = hydrate_skill(record, s.final_score, config.per_skill_budget);
        let cost = item.cost();
        if total + cost > config.global_budget {
            break;
        }
        total += cost;
        bundle.push(item);
    }
    if bundle.is_empty() {
        return RetrievalResult::miss();
    }

    let members: BTreeSet<&str> = bundle.iter().map(|b| b.id.as_str()).collect();
    let mut evidence = Vec::new();
    for e in graph.edges_within(&members) {
        let cost = e.evidence_line().chars().count();
        if total + cost > config.global_budget {
            break;
        }
        total += cost;
        evidence.push(e.clone());
    }
    RetrievalResult {
        status: RetrievalStatus::SkillHit,
        bundle,
        evidence_edges: evidence,
        total_cost: total,
    }
}
