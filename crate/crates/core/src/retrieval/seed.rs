//! Hybrid seeding: fuse dense and lexical evidence into a restart distribution.

use std::collections::BTreeMap;

use crate::config::{RetrievalConfig, SeedMerge};
use crate::error::RetrievalError;
use crate::index::{EmbeddingVector, LexicalIndex, VectorIndex};
use crate::model::QuerySchema;

#[derive(Debug, Clone, PartialEq)]
pub struct SeedCandidate {
    pub id: String,
    pub semantic: f64,
    pub lexical: f64,
}

/// Probability mass over seed skills; sums to one.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SeedDistribution {
    mass: BTreeMap<String, f64>,
}

impl SeedDistribution {
    pub fn is_empty(&self) -> bool {
        self.mass.is_empty()
    }

    pub fn len(&self) -> usize {
        self.mass.len()
    }

    pub fn get(&self, id: &str) -> f64 {
        self.mass.get(id).copied().unwrap_or(0.0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, f64)> {
        self.mass.iter().map(|(k, v)| (k.as_str(), *v))
    }

    pub fn total(&self) -> f64 {
        self.mass.values().sum()
    }
}

fn min_max(xs: &[f64]) -> Vec<f64> {
    let lo = xs.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    xs.iter()
        .map(|&x| {
            if hi > lo {
                (x - lo) / (hi - lo)
            } else if hi > 0.0 {
                1.0
            } else {
                0.0
            }
        })
        .collect()
}

/// Fuse per-candidate scores: `z = eta * sem + (1 - eta) * lex`, then
/// normalize `z` to a distribution. Candidates with zero fused score get no
/// mass.
pub fn merge_seed_scores(candidates: &[SeedCandidate], eta: f64, merge: SeedMerge) -> Result<SeedDistribution, RetrievalError> {
    let sem: Vec<f64> = candidates.iter().map(|c| c.semantic).collect();
    let lex: Vec<f64> = candidates.iter().map(|c| c.lexical).collect();
    let (sem, lex) = match merge {
        SeedMerge::MinMax => (min_max(&sem), min_max(&lex)),
        SeedMerge::Raw => (sem, lex),
    };
    let z: Vec<f64> = sem
        .iter()
        .zip(&lex)
        .map(|(s, l)| (eta * s + (1.0 - eta) * l).max(0.0))
        .collect();
    let total: f64 = z.iter().sum();
    if !(total > 0.0) {
        return Err(RetrievalError::NoCandidates);
    }
    let mass = candidates
        .iter()
        .zip(z)
        .filter(|(_, z)| *z > 0.0)
        .map(|(c, z)| (c.id.clone(), z / total))
        .collect();
    Ok(SeedDistribution { mass })
}

/// Gather the seed candidate set: the union of the top `k_seed` semantic and
/// top `k_seed` lexical hits, each rescored on both channels.
pub fn seed_candidates(
    q: &QuerySchema,
    query_vector: Option<&EmbeddingVector>,
    vectors: &VectorIndex,
    lexical: &LexicalIndex,
    k_seed: usize,
) -> Vec<SeedCandidate> {
    let mut ids: Vec<String> = Vec::new();
    if let Some(qv) = query_vector {
        if let Ok(hits) = vectors.semantic_neighbors(qv, k_seed) {
            ids.extend(hits.into_iter().filter(|(_, s)| *s > 0.0).map(|(id, _)| id));
        }
    }
    ids.extend(lexical.top_k(q, k_seed).into_iter().map(|(id, _)| id));
    ids.sort();
    ids.dedup();
    ids.into_iter()
        .map(|id| SeedCandidate {
            semantic: query_vector.map_or(0.0, |qv| vectors.similarity(&id, qv)),
            lexical: lexical.score(q, &id),
            id,
        })
        .collect()
}

pub fn seed_scores(
    q: &QuerySchema,
    query_vector: Option<&EmbeddingVector>,
    vectors: &VectorIndex,
    lexical: &LexicalIndex,
    config: &RetrievalConfig,
) -> Result<SeedDistribution, RetrievalError> {
    if vectors.is_empty() {
        return Err(RetrievalError::EmptyIndex);
    }
    let candidates = seed_candidates(q, query_vector, vectors, lexical, config.k_seed);
    merge_seed_scores(&candidates, config.eta, config.seed_merge)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cand(id: &str, semantic: f64, lexical: f64) -> SeedCandidate {
        SeedCandidate {
            id: id.into(),
            semantic,
            lexical,
        }
    }

    #[test]
    fn min_max_fusion() {
        let c = [cand("a", 0.9, 0.0), cand("b", 0.5, 4.0), cand("c", 0.1, 2.0)];
        let p = merge_seed_scores(&c, 0.6, SeedMerge::MinMax).unwrap();
        // sem -> (1, 0.5, 0), lex -> (0, 1, 0.5), z = (0.6, 0.7, 0.2)
        assert!((p.get("a") - 0.6 / 1.5).abs() < 1e-12);
        assert!((p.get("b") - 0.7 / 1.5).abs() < 1e-12);
        assert!((p.get("c") - 0.2 / 1.5).abs() < 1e-12);
        assert!((p.total() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn zero_mass_is_no_candidates() {
        let c = [cand("a", 0.0, 0.0)];
        assert_eq!(merge_seed_scores(&c, 0.6, SeedMerge::MinMax), Err(RetrievalError::NoCandidates));
        assert_eq!(merge_seed_scores(&[], 0.6, SeedMerge::Raw), Err(RetrievalError::NoCandidates));
    }

    #[test]
    fn single_candidate_gets_everything() {
        let p = merge_seed_scores(&[cand("x", 0.3, 0.0)], 0.6, SeedMerge::MinMax).unwrap();
        assert_eq!(p.get("x"), 1.0);
    }
}
