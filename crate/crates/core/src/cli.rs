//! `gos` command-line interface.
//!
//! ```text
//! gos build   <library> <workspace> [--config FILE]
//! gos query   <workspace> <text>... [--json] [--config FILE] [--eta X] [--alpha X] [--mu X] [--budget N]
//! gos inspect <workspace> [id]
//! gos eval    <spec> <output.tsv>
//! ```

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use crate::config::{default_config, RetrievalConfig};
use crate::enrich::Providers;
use crate::error::EvalError;
use crate::eval::{run_eval, summary_table, write_tsv, SyntheticSpec};
use crate::model::{RelationType, RetrievalResult};
use crate::retrieval::retrieve_with;
use crate::workspace::Workspace;

pub mod exit {
    pub const OK: i32 = 0;
    pub const FAILURE: i32 = 1;
    pub const NO_PACKAGES: i32 = 2;
    pub const NO_SKILL_HIT: i32 = 3;
    pub const UNKNOWN_ID: i32 = 4;
    pub const INVALID_SPEC: i32 = 5;
}

#[derive(Debug, Parser)]
#[command(name = "gos", version, about = "Index a skill library as a typed graph and retrieve execution-ready bundles")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Parse a skill library and write a workspace.
    Build {
        library_dir: PathBuf,
        workspace_dir: PathBuf,
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Retrieve a bundle for a task description.
    Query {
        workspace_dir: PathBuf,
        #[arg(required = true, num_args = 1..)]
        query: Vec<String>,
        #[command(flatten)]
        overrides: QueryOverrides,
        /// Emit one JSON document instead of text.
        #[arg(long)]
        json: bool,
    },
    /// Summarize a workspace, or show one skill and its edges.
    Inspect { workspace_dir: PathBuf, skill_id: Option<String> },
    /// Run the synthetic benchmark and write a TSV.
    Eval { spec_path: PathBuf, output_path: PathBuf },
}

#[derive(Debug, Clone, Default, Args)]
pub struct QueryOverrides {
    /// Replace the workspace configuration.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub eta: Option<f64>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub mu: Option<f64>,
    /// Global character budget; also caps the per-skill budget.
    #[arg(long)]
    pub budget: Option<usize>,
}

impl QueryOverrides {
    pub fn apply(&self, base: &RetrievalConfig) -> Result<RetrievalConfig, String> {
        let mut cfg = match &self.config {
            Some(path) => RetrievalConfig::load(path).map_err(|e| format!("{}: {e}", path.display()))?,
            None => base.clone(),
        };
        if let Some(x) = self.eta {
            cfg.eta = x;
        }
        if let Some(x) = self.alpha {
            cfg.alpha = x;
        }
        if let Some(x) = self.mu {
            cfg.mu = x;
        }
        if let Some(b) = self.budget {
            cfg.global_budget = b;
            cfg.per_skill_budget = cfg.per_skill_budget.min(b);
        }
        cfg.validate().map_err(|e| e.to_string())?;
        Ok(cfg)
    }
}

/// Parse `args` (including the program name) and run; returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = write!(err, "{e}");
            return e.exit_code();
        }
    };
    let providers = Providers::from_env();
    let code = match cli.command {
        Command::Build {
            library_dir,
            workspace_dir,
            config,
        } => cmd_build(&library_dir, &workspace_dir, config.as_deref(), &providers, out, err),
        Command::Query {
            workspace_dir,
            query,
            overrides,
            json,
        } => cmd_query(&workspace_dir, &query.join(" "), &overrides, json, &providers, out, err),
        Command::Inspect { workspace_dir, skill_id } => cmd_inspect(&workspace_dir, skill_id.as_deref(), out, err),
        Command::Eval { spec_path, output_path } => cmd_eval(&spec_path, &output_path, out, err),
    };
    let _ = out.flush();
    code
}

/// Entry point for the binary.
pub fn main_entry() -> i32 {
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run(std::env::args_os(), &mut stdout.lock(), &mut stderr.lock())
}

pub fn cmd_build(
    library_dir: &Path,
    workspace_dir: &Path,
    config_path: Option<&Path>,
    providers: &Providers,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> i32 {
    let config = match config_path {
        Some(p) => match RetrievalConfig::load(p) {
            Ok(c) => c,
            Err(e) => {
                let _ = writeln!(err, "error: {}: {e}", p.display());
                return exit::FAILURE;
            }
        },
        None => default_config(),
    };
    if !library_dir.is_dir() {
        let _ = writeln!(err, "error: {} is not a directory", library_dir.display());
        return exit::FAILURE;
    }
    let (ws, skipped) = match Workspace::index_library(library_dir, config, providers) {
        Ok(x) => x,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return exit::FAILURE;
        }
    };
    for s in &skipped {
        let _ = writeln!(err, "skipped {}: {}", s.path.display(), s.reason);
    }
    if ws.graph.is_empty() {
        let _ = writeln!(err, "error: no parseable skill packages under {}", library_dir.display());
        return exit::NO_PACKAGES;
    }
    if let Err(e) = ws.save(workspace_dir) {
        let _ = writeln!(err, "error: cannot write workspace {}: {e}", workspace_dir.display());
        return exit::FAILURE;
    }
    let _ = writeln!(out, "nodes: {}", ws.graph.len());
    let _ = writeln!(out, "edges: {}", ws.graph.edges().len());
    let _ = writeln!(out, "{}", ws.graph.relation_summary());
    exit::OK
}

fn load(workspace_dir: &Path, err: &mut dyn Write) -> Option<Workspace> {
    match Workspace::load(workspace_dir) {
        Ok(ws) => Some(ws),
        Err(e) => {
            let _ = writeln!(err, "error: cannot load workspace {}: {e}", workspace_dir.display());
            None
        }
    }
}

/// Agent-facing text rendering of a retrieval result.
pub fn render_result(result: &RetrievalResult) -> String {
    let mut s = format!("Retrieval Status: {}\n", result.status);
    for (rank, item) in result.bundle.iter().enumerate() {
        s.push_str(&format!("\n[{}] {} ({:.4})\n", rank + 1, item.id, item.final_score));
        s.push_str(&item.payload());
        if !item.snippet.is_empty() && !item.snippet.ends_with('\n') {
            s.push('\n');
        }
    }
    s.push_str("\nEvidence:\n");
    for e in &result.evidence_edges {
        s.push_str("  ");
        s.push_str(&e.evidence_line());
        s.push('\n');
    }
    s.push_str(&format!("Total Cost: {}\n", result.total_cost));
    s
}

pub fn render_json(result: &RetrievalResult) -> serde_json::Value {
    json!({
        "status": result.status,
        "bundle": result.bundle.iter().enumerate().map(|(i, b)| json!({
            "rank": i + 1,
            "id": b.id,
            "final_score": b.final_score,
            "source": b.source_path,
            "capability": b.capability,
            "notes": b.execution_notes,
            "snippet": b.snippet,
        })).collect::<Vec<_>>(),
        "evidence": result.evidence_edges,
        "total_cost": result.total_cost,
    })
}

pub fn cmd_query(
    workspace_dir: &Path,
    query: &str,
    overrides: &QueryOverrides,
    as_json: bool,
    providers: &Providers,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> i32 {
    let Some(ws) = load(workspace_dir, err) else {
        return exit::FAILURE;
    };
    let config = match overrides.apply(&ws.config) {
        Ok(c) => c,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return exit::FAILURE;
        }
    };
    let result = match retrieve_with(query, &ws, &config, providers) {
        Ok(r) => r,
        Err(e) => {
            let _ = writeln!(err, "warning: {e}");
            RetrievalResult::miss()
        }
    };
    if as_json {
        let _ = writeln!(out, "{}", render_json(&result));
    } else {
        let _ = write!(out, "{}", render_result(&result));
    }
    if result.bundle.is_empty() {
        exit::NO_SKILL_HIT
    } else {
        exit::OK
    }
}

pub fn cmd_inspect(workspace_dir: &Path, skill_id: Option<&str>, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let Some(ws) = load(workspace_dir, err) else {
        return exit::FAILURE;
    };
    let Some(id) = skill_id else {
        let _ = writeln!(out, "nodes: {}", ws.graph.len());
        let _ = writeln!(out, "edges: {}", ws.graph.edges().len());
        let _ = writeln!(out, "{}", ws.graph.relation_summary());
        let _ = writeln!(out, "embedder: {} ({} dims)", ws.embedder.as_str(), ws.vectors.dim());
        let _ = writeln!(out, "fingerprint: {}", ws.graph.fingerprint());
        let _ = writeln!(out, "config:");
        for line in ws.config.to_kv().lines() {
            let _ = writeln!(out, "  {line}");
        }
        return exit::OK;
    };
    let Some(record) = ws.graph.node(id) else {
        let _ = writeln!(err, "error: unknown skill id `{id}`");
        return exit::UNKNOWN_ID;
    };
    let _ = writeln!(out, "{}", serde_json::to_string_pretty(record).unwrap_or_default());
    let _ = writeln!(out, "edges:");
    for rel in RelationType::ALL {
        for (label, outgoing) in [("out", true), ("in", false)] {
            let lines: Vec<String> = ws
                .graph
                .incident_edges(id)
                .filter(|e| e.relation == rel && (e.source == id) == outgoing)
                .map(|e| e.evidence_line())
                .collect();
            if lines.is_empty() {
                continue;
            }
            let _ = writeln!(out, "  {rel} {label}:");
            for l in lines {
                let _ = writeln!(out, "    {l}");
            }
        }
    }
    exit::OK
}

pub fn cmd_eval(spec_path: &Path, output_path: &Path, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let (spec, config) = match SyntheticSpec::load(spec_path, default_config()) {
        Ok(x) => x,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return exit::INVALID_SPEC;
        }
    };
    let rows = match run_eval(&spec, &config) {
        Ok(rows) => rows,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return match e {
                EvalError::SpecInvalid(_) | EvalError::UnknownStrategy(_) => exit::INVALID_SPEC,
                _ => exit::FAILURE,
            };
        }
    };
    if let Err(e) = std::fs::write(output_path, write_tsv(&rows)) {
        let _ = writeln!(err, "error: cannot write {}: {e}", output_path.display());
        return exit::FAILURE;
    }
    let _ = write!(out, "{}", summary_table(&rows));
    exit::OK
}
