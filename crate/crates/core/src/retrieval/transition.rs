//! Typed, reverse-aware transition operator.
//!
//! For each relation the forward adjacency and its transpose are row
//! normalized separately, blended with `lambda[r]` and `lambda[r] * gamma[r]`,
//! summed over relations and row normalized again. Rows with no mass are
//! dangling and teleport back to the seeds during diffusion.

use std::collections::BTreeMap;

use crate::config::RetrievalConfig;
use crate::model::{RelationType, SkillGraph};

#[derive(Debug, Clone, PartialEq)]
pub struct TransitionOperator {
    rows: Vec<Vec<(usize, f64)>>,
    dangling: Vec<bool>,
}

impl TransitionOperator {
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn row(&self, i: usize) -> &[(usize, f64)] {
        &self.rows[i]
    }

    pub fn is_dangling(&self, i: usize) -> bool {
        self.dangling[i]
    }

    pub fn entry(&self, i: usize, j: usize) -> f64 {
        self.rows[i].iter().find(|(k, _)| *k == j).map_or(0.0, |(_, w)| *w)
    }

    /// Dense copy, row-major.
    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let n = self.len();
        self.rows
            .iter()
            .map(|row| {
                let mut dense = vec![0.0; n];
                for &(j, w) in row {
                    dense[j] += w;
                }
                dense
            })
            .collect()
    }
}

/// Unnormalized blended mass per row, before the final row normalization.
pub fn blended_mass(graph: &SkillGraph, config: &RetrievalConfig) -> Vec<BTreeMap<usize, f64>> {
    let n = graph.len();
    let mut out_sum = vec![[0.0f64; 4]; n];
    let mut in_sum = vec![[0.0f64; 4]; n];
    let mut endpoints = Vec::with_capacity(graph.edges().len());
    for e in graph.edges() {
        let (Some(u), Some(v)) = (graph.index_of(&e.source), graph.index_of(&e.target)) else {
            continue;
        };
        let r = e.relation.index();
        out_sum[u][r] += e.weight;
        in_sum[v][r] += e.weight;
        endpoints.push((u, v, e.relation, e.weight));
    }

    let mut mass = vec![BTreeMap::new(); n];
    for (u, v, rel, w) in endpoints {
        let r = rel.index();
        let lambda = config.lambda.get(rel);
        let gamma = config.gamma.get(rel);
        if lambda > 0.0 {
            *mass[u].entry(v).or_insert(0.0) += lambda * w / out_sum[u][r];
        }
        if lambda * gamma > 0.0 {
            *mass[v].entry(u).or_insert(0.0) += lambda * gamma * w / in_sum[v][r];
        }
    }
    mass
}

pub fn build_transition(graph: &SkillGraph, config: &RetrievalConfig) -> TransitionOperator {
    let mass = blended_mass(graph, config);
    let mut rows = Vec::with_capacity(mass.len());
    let mut dangling = Vec::with_capacity(mass.len());
    for row in mass {
        let total: f64 = row.values().sum();
        if total > 0.0 {
            rows.push(row.into_iter().map(|(j, w)| (j, w / total)).collect());
            dangling.push(false);
        } else {
            rows.push(Vec::new());
            dangling.push(true);
        }
    }
    TransitionOperator { rows, dangling }
}

/// Relations contributing a reverse term under `config`.
pub fn reverse_relations(config: &RetrievalConfig) -> Vec<RelationType> {
    RelationType::ALL
        .into_iter()
        .filter(|&r| config.lambda.get(r) * config.gamma.get(r) > 0.0)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::default_config;
    use crate::model::{SkillRecord, TypedEdge};

    fn graph(ids: &[&str], edges: Vec<TypedEdge>) -> SkillGraph {
        let records = ids
            .iter()
            .map(|id| SkillRecord {
                id: id.to_string(),
                name: id.to_string(),
                ..Default::default()
            })
            .collect();
        SkillGraph::new(records, edges, String::new()).unwrap()
    }

    #[test]
    fn single_dep_edge() {
        let g = graph(&["a", "b"], vec![TypedEdge::new("a", "b", RelationType::Dep)]);
        let t = build_transition(&g, &default_config());
        assert_eq!(t.entry(0, 1), 1.0);
        assert_eq!(t.entry(1, 0), 1.0);
        assert!(!t.is_dangling(0) && !t.is_dangling(1));
    }

    #[test]
    fn sem_reverse_is_scaled_before_normalization() {
        let g = graph(&["a", "b"], vec![TypedEdge::new("a", "b", RelationType::Sem)]);
        let m = blended_mass(&g, &default_config());
        assert!((m[1][&0] - 0.2 * m[0][&1]).abs() < 1e-15);
    }

    #[test]
    fn zero_gamma_leaves_sinks_dangling() {
        let mut cfg = default_config();
        cfg.gamma = crate::model::RelationWeights::uniform(0.0);
        let g = graph(&["a", "b"], vec![TypedEdge::new("a", "b", RelationType::Dep)]);
        let t = build_transition(&g, &cfg);
        assert!(t.is_dangling(1));
        assert!(reverse_relations(&cfg).is_empty());
    }

    #[test]
    fn rows_are_stochastic() {
        let g = graph(
            &["a", "b", "c"],
            vec![
                TypedEdge::new("a", "b", RelationType::Dep),
                TypedEdge::new("a", "c", RelationType::Wf),
                TypedEdge::new("c", "b", RelationType::Alt),
            ],
        );
        let t = build_transition(&g, &default_config());
        for i in 0..3 {
            let s: f64 = t.row(i).iter().map(|(_, w)| w).sum();
            assert!((s - 1.0).abs() < 1e-12);
        }
    }
}
