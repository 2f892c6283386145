//! Inspect the seed distribution as the semantic/lexical mix changes.
//!
//!     cargo run --example hybrid_seeding -- "summarize a scanned pdf"

use std::path::Path;

use gos_core::index::stub_embed;
use gos_core::retrieval::merge_seed_scores;
use gos_core::retrieval::seed::seed_candidates;
use gos_core::{default_config, rewrite_query, Providers, SeedMerge, Workspace};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let raw = std::env::args().skip(1).collect::<Vec<_>>().join(" ");
    let raw = if raw.trim().is_empty() { "summarize a scanned pdf".into() } else { raw };
    let library = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/library");
    let (ws, _) = Workspace::index_library(&library, default_config(), &Providers::local())?;

    let q = rewrite_query(&raw, None)?;
    println!("keywords: {:?}", q.keywords);
    let candidates = seed_candidates(&q, Some(&stub_embed(&q.raw)), &ws.vectors, &ws.lexical, ws.config.k_seed);

    print!("{:<22} {:>6} {:>6}", "candidate", "sem", "lex");
    let etas = [0.0, 0.6, 1.0];
    for eta in etas {
        print!(" {:>8}", format!("eta={eta}"));
    }
    println!(" {:>8}", "raw");
    let dists: Vec<_> = etas
        .iter()
        .map(|&eta| merge_seed_scores(&candidates, eta, SeedMerge::MinMax).unwrap_or_default())
        .collect();
    let raw_merge = merge_seed_scores(&candidates, ws.config.eta, SeedMerge::Raw).unwrap_or_default();
    for c in &candidates {
        print!("{:<22} {:>6.3} {:>6.2}", c.id, c.semantic, c.lexical);
        for d in &dists {
            print!(" {:>8.3}", d.get(&c.id));
        }
        println!(" {:>8.3}", raw_merge.get(&c.id));
    }
    Ok(())
}
