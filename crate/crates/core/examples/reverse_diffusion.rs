//! Show how reverse edges carry relevance from a matched skill back to its
//! prerequisites, and what is lost when they are switched off.
//!
//!     cargo run --example reverse_diffusion

use std::path::Path;

use gos_core::retrieval::retrieve_traced;
use gos_core::{default_config, Providers, RelationWeights, Workspace};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let library = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/chain");
    let (ws, _) = Workspace::index_library(&library, default_config(), &Providers::local())?;
    for e in ws.graph.edges() {
        println!("{}", e.evidence_line());
    }

    let query = "reconcile the general ledger";
    let mut forward_only = ws.config.clone();
    forward_only.gamma = RelationWeights::uniform(0.0);

    for (label, config) in [("reverse-aware", ws.config.clone()), ("forward only", forward_only)] {
        let trace = retrieve_traced(query, &ws, &config, &Providers::local())?;
        println!("\n{label} ({} iterations)", trace.iterations);
        for id in ws.graph.ids() {
            println!(
                "  {id:<20} seed {:.3}  diffusion {:.4}",
                trace.seeds.get(id),
                trace.diffusion.get(id).copied().unwrap_or(0.0)
            );
        }
        println!("  bundle: {:?}", trace.result.bundle_ids());
    }
    Ok(())
}
