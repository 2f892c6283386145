//! Plug in an external relation validator. Proposals that leave the
//! candidate pool or claim a dependency are dropped before they reach the
//! graph.
//!
//!     cargo run --example external_provider
//!
//! The same wire format is spoken by any command named in `GOS_PROVIDER_CMD`.

use std::path::Path;
use std::sync::Arc;

use gos_core::enrich::Transport;
use gos_core::error::EnrichError;
use gos_core::{default_config, Providers, Workspace};
use serde_json::{json, Value};

/// Proposes a workflow edge to every candidate whose inputs mention a word
/// from the source's outputs, plus two proposals that must be filtered.
#[derive(Debug)]
struct KeywordValidator;

impl Transport for KeywordValidator {
    fn exchange(&self, request: &Value) -> Result<Value, EnrichError> {
        if request["kind"] != "relation_validation" {
            return Err(EnrichError::ProviderUnavailable("only relation validation is served".into()));
        }
        let source = &request["source"];
        let words: Vec<String> = source["outputs"]
            .as_array()
            .into_iter()
            .flatten()
            .filter_map(Value::as_str)
            .flat_map(|s| s.split_whitespace().map(str::to_string).collect::<Vec<_>>())
            .collect();
        let mut proposals = vec![
            json!({"source": source["id"], "target": "not-in-pool", "relation": "wf"}),
            json!({"source": source["id"], "target": source["id"], "relation": "dep"}),
        ];
        for c in request["candidates"].as_array().into_iter().flatten() {
            let inputs = c["inputs"].to_string();
            if words.iter().any(|w| w.len() > 3 && inputs.contains(w.as_str())) {
                proposals.push(json!({"source": source["id"], "target": c["id"], "relation": "wf"}));
            }
        }
        Ok(json!({ "proposals": proposals }))
    }
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let library = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/library");
    let (local, _) = Workspace::index_library(&library, default_config(), &Providers::local())?;

    let mut providers = Providers::local();
    providers.relations = Providers::with_transport(Arc::new(KeywordValidator)).relations;
    let (external, _) = Workspace::index_library(&library, default_config(), &providers)?;

    println!("local stubs:        {}", local.graph.relation_summary());
    println!("external validator: {}", external.graph.relation_summary());
    for e in external.graph.edges().iter().filter(|e| e.relation.as_str() == "wf") {
        println!("  {}", e.evidence_line());
    }
    Ok(())
}
