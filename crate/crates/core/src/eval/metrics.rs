use std::collections::BTreeSet;

use super::generator::SyntheticTask;
use crate::model::{RelationType, SkillGraph};

/// Fraction of the task's ground-truth bundle present in `bundle`.
pub fn prerequisite_recall<'a>(bundle: impl IntoIterator<Item = &'a str>, task: &SyntheticTask) -> f64 {
    if task.ground_truth_bundle.is_empty() {
        return 1.0;
    }
    let bundle: BTreeSet<&str> = bundle.into_iter().collect();
    let hit = task.ground_truth_bundle.iter().filter(|id| bundle.contains(id.as_str())).count();
    hit as f64 / task.ground_truth_bundle.len() as f64
}

/// Among dependency edges touching the bundle, the fraction with both ends
/// inside it. Vacuously one.
pub fn dependency_completeness<'a>(bundle: impl IntoIterator<Item = &'a str>, graph: &SkillGraph) -> f64 {
    let bundle: BTreeSet<&str> = bundle.into_iter().collect();
    let (mut touching, mut internal) = (0usize, 0usize);
    for e in graph.edges().iter().filter(|e| e.relation == RelationType::Dep) {
        let (s, t) = (bundle.contains(e.source.as_str()), bundle.contains(e.target.as_str()));
        if s || t {
            touching += 1;
        }
        if s && t {
            internal += 1;
        }
    }
    if touching == 0 {
        1.0
    } else {
        internal as f64 / touching as f64
    }
}
