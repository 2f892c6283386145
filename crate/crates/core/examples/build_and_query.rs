//! Index the sample library and retrieve a bundle for a task.
//!
//!     cargo run --example build_and_query -- "estimate flood risk for a river county"

use std::path::Path;

use gos_core::cli::render_result;
use gos_core::{default_config, retrieve, Providers, Workspace};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let query = std::env::args().skip(1).collect::<Vec<_>>().join(" ");
    let query = if query.trim().is_empty() {
        "estimate flood risk for a river county".to_string()
    } else {
        query
    };
    let library = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/library");
    let (ws, skipped) = Workspace::index_library(&library, default_config(), &Providers::local())?;
    for s in skipped {
        eprintln!("skipped {}: {}", s.path.display(), s.reason);
    }
    println!("{} skills, {}\n", ws.graph.len(), ws.graph.relation_summary());

    for budget in [ws.config.global_budget, 700] {
        let mut config = ws.config.clone();
        config.global_budget = budget;
        config.per_skill_budget = config.per_skill_budget.min(budget);
        println!("== budget {budget}");
        print!("{}", render_result(&retrieve(&query, &ws, &config)?));
        println!();
    }
    Ok(())
}
