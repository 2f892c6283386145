//! Save a workspace, load it back and walk one skill's neighborhood.
//!
//!     cargo run --example inspect_workspace -- flood-detection

use std::path::Path;

use gos_core::{default_config, Providers, RelationType, Workspace};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let id = std::env::args().nth(1).unwrap_or_else(|| "flood-detection".into());
    let library = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/library");
    let (ws, _) = Workspace::index_library(&library, default_config(), &Providers::local())?;

    let dir = tempfile::tempdir()?;
    ws.save(dir.path())?;
    let mut files: Vec<_> = std::fs::read_dir(dir.path())?
        .map(|e| e.map(|e| (e.file_name().to_string_lossy().into_owned(), e.metadata().map(|m| m.len()).unwrap_or(0))))
        .collect::<Result<_, _>>()?;
    files.sort();
    for (name, len) in files {
        println!("{name:<12} {len:>8} bytes");
    }

    let loaded = Workspace::load(dir.path())?;
    assert_eq!(loaded, ws);
    println!("\nfingerprint {}", &loaded.graph.fingerprint()[..16]);

    let record = loaded.graph.node(&id).ok_or_else(|| format!("unknown skill `{id}`"))?;
    println!("\n{}: {}", record.id, record.capability_text());
    for rel in RelationType::ALL {
        for e in loaded.graph.incident_edges(&id).filter(|e| e.relation == rel) {
            println!("  {}", e.evidence_line());
        }
    }
    Ok(())
}
