//! Final ranking: diffusion mass plus a bounded field-match bonus.

use std::collections::BTreeMap;

use crate::index::{FieldTokens, LexField, LexicalIndex};
use crate::model::{QuerySchema, ScoredSkill, SkillGraph};

/// Weighted query overlap on name, capability, I/O and entrypoints.
pub fn raw_field_match(q: &QuerySchema, fields: &FieldTokens) -> f64 {
    fields.weighted_overlap(&q.keyword_set(), &LexField::MATCH)
}

/// Order by final score descending, then id ascending.
pub fn sort_ranked(ranked: &mut [ScoredSkill]) {
    ranked.sort_by(|a, b| b.final_score.total_cmp(&a.final_score).then_with(|| a.id.cmp(&b.id)));
}

/// `final = diffusion + mu * match`, with match scaled so its maximum over
/// the candidates is one. Candidates are nodes with positive diffusion mass.
pub fn combine(candidates: Vec<(String, f64, f64)>, mu: f64) -> Vec<ScoredSkill> {
    let candidates: Vec<_> = candidates.into_iter().filter(|c| c.1 > 0.0).collect();
    let top = candidates.iter().map(|c| c.2).fold(0.0, f64::max);
    let mut ranked: Vec<ScoredSkill> = candidates
        .into_iter()
        .map(|(id, diffusion, raw)| {
            let match_score = if top > 0.0 { raw / top } else { 0.0 };
            ScoredSkill {
                id,
                diffusion_score: diffusion,
                match_score,
                final_score: diffusion + mu * match_score,
            }
        })
        .collect();
    sort_ranked(&mut ranked);
    ranked
}

pub fn rerank(diffusion: &BTreeMap<String, f64>, q: &QuerySchema, graph: &SkillGraph, lexical: Option<&LexicalIndex>, mu: f64) -> Vec<ScoredSkill> {
    let candidates = diffusion
        .iter()
        .filter(|(_, s)| **s > 0.0)
        .map(|(id, &s)| {
            let m = match lexical.and_then(|l| l.field_tokens(id)) {
                Some(ft) => raw_field_match(q, ft),
                None => graph.node(id).map_or(0.0, |r| raw_field_match(q, &FieldTokens::of(r))),
            };
            (id.clone(), s, m)
        })
        .collect();
    combine(candidates, mu)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn match_bonus_breaks_diffusion_order() {
        let ranked = combine(vec![("a".into(), 0.3, 0.0), ("b".into(), 0.2, 2.0), ("c".into(), 0.0, 9.0)], 0.5);
        let ids: Vec<_> = ranked.iter().map(|r| r.id.as_str()).collect();
        assert_eq!(ids, ["b", "a"]);
        assert!((ranked[0].final_score - 0.7).abs() < 1e-12);
    }

    #[test]
    fn ties_by_id() {
        let ranked = combine(vec![("z".into(), 0.1, 0.0), ("m".into(), 0.1, 0.0)], 0.5);
        assert_eq!(ranked[0].id, "m");
    }
}
