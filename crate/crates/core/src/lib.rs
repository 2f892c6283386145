//! Typed skill graphs and reverse-aware diffusion retrieval over local agent
//! skill libraries.
//!
//! A library of skill packages (a directory holding `SKILL.md` and an
//! optional `scripts/` folder) is parsed into [`SkillRecord`]s, linked by
//! typed edges (`dep`, `wf`, `sem`, `alt`) and indexed. At query time a
//! hybrid seed distribution is diffused over the graph, reranked and packed
//! into a bundle that fits a character budget.
//!
//! ```no_run
//! use gos_core::{default_config, retrieve, Providers, Workspace};
//!
//! let (ws, _skipped) = Workspace::index_library("skills".as_ref(), default_config(), &Providers::local())?;
//! let result = retrieve("merge two pdf reports", &ws, &ws.config)?;
//! for skill in &result.bundle {
//!     println!("{} {:.4}", skill.id, skill.final_score);
//! }
//! # Ok::<(), gos_core::Error>(())
//! ```

pub mod cli;
pub mod config;
pub mod enrich;
pub mod error;
pub mod eval;
pub mod graph_builder;
pub mod index;
pub mod model;
pub mod parser;
pub mod retrieval;
pub mod text;
pub mod workspace;

pub use config::{default_config, RetrievalConfig, SeedMerge};
pub use enrich::{complete_semantics, rewrite_query, validate_relations, ProviderEndpoint, ProviderKind, Providers};
pub use error::{Error, Result};
pub use graph_builder::{build_candidate_pool, build_graph, induce_dependency_edges, io_compatibility};
pub use index::{LexicalIndex, VectorIndex};
pub use model::{
    HydratedSkill, QuerySchema, RelationType, RelationWeights, RetrievalResult, RetrievalStatus, ScoredSkill, SkillGraph, SkillRecord,
    TypedEdge,
};
pub use parser::{discover_packages, parse_skill_document, parse_skill_package, render_snippet, SkillPackage};
pub use retrieval::{retrieve, retrieve_with};
pub use workspace::Workspace;
