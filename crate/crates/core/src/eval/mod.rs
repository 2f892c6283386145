//! Synthetic benchmark: planted prerequisite chains, baseline strategies and
//! oracle metrics.

pub mod generator;
pub mod metrics;
pub mod spec;
pub mod synonyms;

use std::collections::HashMap;
use std::fmt::Write as _;

pub use generator::{generate_library, SyntheticCorpus, SyntheticTask};
pub use metrics::{dependency_completeness, prerequisite_recall};
pub use spec::{Strategy, SyntheticSpec};

use crate::config::RetrievalConfig;
use crate::enrich::Providers;
use crate::error::{EvalError, RetrievalError};
use crate::index::stub_embed;
use crate::model::{RelationWeights, RetrievalResult, ScoredSkill};
use crate::retrieval::{bundle_objective, hydrate, hydrate_skill, retrieve_traced};
use crate::workspace::Workspace;

pub const TSV_HEADER: &str = "library_size\tstrategy\trecall\tcompleteness\tcost\tobjective\thead_hit_rate";

#[derive(Debug, Clone, PartialEq)]
pub struct TaskMetrics {
    pub recall: f64,
    pub completeness: f64,
    pub cost: usize,
    pub objective: f64,
    pub head_hit: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalRow {
    pub library_size: usize,
    pub strategy: Strategy,
    pub recall: f64,
    pub completeness: f64,
    pub cost: f64,
    pub objective: f64,
    pub head_hit_rate: f64,
}

impl EvalRow {
    pub fn aggregate(library_size: usize, strategy: Strategy, metrics: &[TaskMetrics]) -> Self {
        let n = metrics.len().max(1) as f64;
        let mean = |f: &dyn Fn(&TaskMetrics) -> f64| metrics.iter().map(f).sum::<f64>() / n;
        Self {
            library_size,
            strategy,
            recall: mean(&|m| m.recall),
            completeness: mean(&|m| m.completeness),
            cost: mean(&|m| m.cost as f64),
            objective: mean(&|m| m.objective),
            head_hit_rate: mean(&|m| f64::from(u8::from(m.head_hit))),
        }
    }

    pub fn tsv_line(&self) -> String {
        format!(
            "{}\t{}\t{:.4}\t{:.4}\t{:.1}\t{:.4}\t{:.4}",
            self.library_size, self.strategy, self.recall, self.completeness, self.cost, self.objective, self.head_hit_rate
        )
    }
}

pub fn write_tsv(rows: &[EvalRow]) -> String {
    let mut out = String::from(TSV_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&r.tsv_line());
        out.push('\n');
    }
    out
}

/// Fixed-width summary of `rows` for terminals.
pub fn summary_table(rows: &[EvalRow]) -> String {
    let mut out = format!(
        "{:>6}  {:<12} {:>7} {:>7} {:>10} {:>9} {:>8}\n",
        "size", "strategy", "recall", "compl", "cost", "objective", "head_hit"
    );
    for r in rows {
        let _ = writeln!(
            out,
            "{:>6}  {:<12} {:>7.3} {:>7.3} {:>10.1} {:>9.3} {:>8.3}",
            r.library_size,
            r.strategy.as_str(),
            r.recall,
            r.completeness,
            r.cost,
            r.objective,
            r.head_hit_rate
        );
    }
    out
}

/// The configuration a GoS variant runs with.
pub fn strategy_config(strategy: Strategy, base: &RetrievalConfig) -> RetrievalConfig {
    let mut cfg = base.clone();
    match strategy {
        Strategy::GosForward => cfg.gamma = RelationWeights::uniform(0.0),
        Strategy::GosDense => {
            cfg.eta = 1.0;
            cfg.mu = 0.0;
        }
        _ => {}
    }
    cfg
}

fn vector_result(ws: &Workspace, query: &str, k: usize, config: &RetrievalConfig) -> RetrievalResult {
    let qv = stub_embed(query);
    let hits = ws.vectors.semantic_neighbors(&qv, k).unwrap_or_default();
    let ranked: Vec<ScoredSkill> = hits
        .into_iter()
        .filter(|(_, s)| *s >= config.hit_threshold)
        .map(|(id, s)| ScoredSkill {
            id,
            diffusion_score: 0.0,
            match_score: 0.0,
            final_score: s,
        })
        .collect();
    hydrate(&ranked, &ws.graph, config)
}

fn gos_result(ws: &Workspace, query: &str, config: &RetrievalConfig) -> Result<RetrievalResult, RetrievalError> {
    match retrieve_traced(query, ws, config, &Providers::local()) {
        Ok(t) => Ok(t.result),
        Err(RetrievalError::NoCandidates) => Ok(RetrievalResult::miss()),
        Err(e) => Err(e),
    }
}

/// Per-skill relevance used by the objective: the GoS final score.
fn relevance(ws: &Workspace, query: &str, config: &RetrievalConfig) -> HashMap<String, f64> {
    retrieve_traced(query, ws, config, &Providers::local())
        .map(|t| t.ranked.into_iter().map(|s| (s.id, s.final_score)).collect())
        .unwrap_or_default()
}

pub fn run_strategy(
    strategy: Strategy,
    ws: &Workspace,
    tasks: &[SyntheticTask],
    config: &RetrievalConfig,
    k_vector: usize,
) -> Result<Vec<TaskMetrics>, EvalError> {
    let vanilla_cost: usize = ws
        .graph
        .nodes()
        .map(|r| hydrate_skill(r, 0.0, config.per_skill_budget).cost())
        .sum();
    let mut out = Vec::with_capacity(tasks.len());
    for task in tasks {
        let (ids, cost): (Vec<String>, usize) = match strategy {
            Strategy::Vanilla => (ws.graph.ids().to_vec(), vanilla_cost),
            Strategy::Vector => {
                let r = vector_result(ws, &task.query_text, k_vector, config);
                (r.bundle.iter().map(|b| b.id.clone()).collect(), r.total_cost)
            }
            Strategy::Gos | Strategy::GosForward | Strategy::GosDense => {
                let r = gos_result(ws, &task.query_text, &strategy_config(strategy, config))?;
                (r.bundle.iter().map(|b| b.id.clone()).collect(), r.total_cost)
            }
        };
        let ids: Vec<&str> = ids.iter().map(String::as_str).collect();
        let rel = relevance(ws, &task.query_text, config);
        out.push(TaskMetrics {
            recall: prerequisite_recall(ids.iter().copied(), task),
            completeness: dependency_completeness(ids.iter().copied(), &ws.graph),
            cost,
            objective: bundle_objective(ids.iter().copied(), &rel, &ws.graph, config.beta).unwrap_or(0.0),
            head_hit: ids.contains(&task.target_head.as_str()),
        });
    }
    Ok(out)
}

/// Build one workspace per library size and run every strategy on it.
pub fn run_eval(spec: &SyntheticSpec, config: &RetrievalConfig) -> Result<Vec<EvalRow>, EvalError> {
    spec.validate()?;
    let mut rows = Vec::new();
    for &size in &spec.library_sizes {
        let corpus = generate_library(spec, size)?;
        let ws = Workspace::build(corpus.records, config.clone(), &Providers::local())?;
        for &strategy in &spec.strategies {
            let metrics = run_strategy(strategy, &ws, &corpus.tasks, config, spec.k_vector)?;
            rows.push(EvalRow::aggregate(size, strategy, &metrics));
        }
    }
    Ok(rows)
}
