//! Parse one skill package into a normalized record and render its snippet.
//!
//!     cargo run --example parse_package -- fixtures/library/flood-detection

use std::path::PathBuf;

use gos_core::parser::{parse_skill_package, render_snippet, SkillPackage};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures/library/flood-detection"));
    let pkg = SkillPackage::open(&dir).ok_or_else(|| format!("{} has no SKILL.md", dir.display()))?;
    let record = parse_skill_package(&pkg)?;

    println!("id:          {}", record.id);
    println!("capability:  {}", record.capability_text());
    println!("inputs:      {:?}", record.inputs);
    println!("outputs:     {:?}", record.outputs);
    println!("tags:        {:?}", record.domain_tags);
    println!("entrypoints: {:?}", record.script_entrypoints);
    println!("notes:       {}", record.execution_notes());
    println!();
    println!("{}", render_snippet(&record, 240)?);
    Ok(())
}
