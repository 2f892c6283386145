//! Personalized PageRank by power iteration.

use crate::config::RetrievalConfig;
use crate::error::RetrievalError;

use super::transition::TransitionOperator;

/// Residuals above this after `max_iter` steps are reported as failures.
pub const NON_CONVERGENCE_RESIDUAL: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq)]
pub struct PprOutcome {
    pub scores: Vec<f64>,
    pub iterations: usize,
    /// L1 distance between the returned vector and one more update.
    pub residual: f64,
    pub converged: bool,
}

/// One update `alpha * p + (1 - alpha) * T^T s`; dangling rows return their
/// mass to `p`.
pub fn ppr_step(t: &TransitionOperator, p: &[f64], s: &[f64], alpha: f64) -> Vec<f64> {
    let n = t.len();
    let mut next = vec![0.0; n];
    let mut dangling = 0.0;
    for (i, &si) in s.iter().enumerate() {
        if si == 0.0 {
            continue;
        }
        if t.is_dangling(i) {
            dangling += si;
        } else {
            for &(j, w) in t.row(i) {
                next[j] += w * si;
            }
        }
    }
    for (j, x) in next.iter_mut().enumerate() {
        *x = alpha * p[j] + (1.0 - alpha) * (*x + dangling * p[j]);
    }
    next
}

fn l1(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum()
}

pub fn personalized_pagerank(t: &TransitionOperator, p: &[f64], config: &RetrievalConfig) -> Result<PprOutcome, RetrievalError> {
    assert_eq!(t.len(), p.len(), "seed vector does not match the operator");
    if !(p.iter().sum::<f64>() > 0.0) {
        return Err(RetrievalError::NoCandidates);
    }
    let alpha = config.alpha;
    let mut s = p.to_vec();
    let mut iterations = 0;
    let mut converged = false;
    while iterations < config.max_iter {
        let next = ppr_step(t, p, &s, alpha);
        iterations += 1;
        let delta = l1(&next, &s);
        s = next;
        if delta < config.tol {
            converged = true;
            break;
        }
    }
    let residual = l1(&ppr_step(t, p, &s, alpha), &s);
    if !converged {
        if residual > NON_CONVERGENCE_RESIDUAL {
            return Err(RetrievalError::NonConvergence { residual });
        }
        log::debug!("diffusion stopped after {iterations} iterations, residual {residual:.3e}");
    }
    Ok(PprOutcome {
        scores: s,
        iterations,
        residual,
        converged,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::default_config;
    use crate::model::{RelationType, SkillGraph, SkillRecord, TypedEdge};
    use crate::retrieval::transition::build_transition;

    #[test]
    fn isolated_seed_keeps_all_mass() {
        let records = vec![
            SkillRecord {
                id: "a".into(),
                ..Default::default()
            },
            SkillRecord {
                id: "b".into(),
                ..Default::default()
            },
        ];
        let g = SkillGraph::new(records, vec![], String::new()).unwrap();
        let t = build_transition(&g, &default_config());
        let out = personalized_pagerank(&t, &[1.0, 0.0], &default_config()).unwrap();
        assert_eq!(out.scores, vec![1.0, 0.0]);
        assert!(out.converged);
    }

    #[test]
    fn two_node_closed_form() {
        // s_a = a + (1-a) s_b, s_b = (1-a) s_a  =>  s_a = 1 / (2 - a)
        let records = ["a", "b"]
            .iter()
            .map(|id| SkillRecord {
                id: id.to_string(),
                ..Default::default()
            })
            .collect();
        let g = SkillGraph::new(records, vec![TypedEdge::new("a", "b", RelationType::Dep)], String::new()).unwrap();
        let cfg = default_config();
        let t = build_transition(&g, &cfg);
        let out = personalized_pagerank(&t, &[1.0, 0.0], &cfg).unwrap();
        let a = cfg.alpha;
        assert!((out.scores[0] - 1.0 / (2.0 - a)).abs() < 1e-6);
        assert!((out.scores[1] - (1.0 - a) / (2.0 - a)).abs() < 1e-6);
    }

    #[test]
    fn capped_iterations_still_close() {
        let records = ["a", "b"]
            .iter()
            .map(|id| SkillRecord {
                id: id.to_string(),
                ..Default::default()
            })
            .collect();
        let g = SkillGraph::new(records, vec![TypedEdge::new("a", "b", RelationType::Dep)], String::new()).unwrap();
        let mut cfg = default_config();
        cfg.tol = 1e-30;
        cfg.max_iter = 60;
        let t = build_transition(&g, &cfg);
        let out = personalized_pagerank(&t, &[1.0, 0.0], &cfg).unwrap();
        assert!(!out.converged);
        assert_eq!(out.iterations, 60);
        assert!(out.residual < NON_CONVERGENCE_RESIDUAL);
        cfg.max_iter = 3;
        assert!(matches!(
            personalized_pagerank(&t, &[1.0, 0.0], &cfg),
            Err(RetrievalError::NonConvergence { .. })
        ));
    }
}
