//! Parser-first normalization of skill packages.
//!
//! A package is a directory holding a `SKILL.md` and optionally a `scripts/`
//! directory. The document may open with a frontmatter block:
//!
//! ```text
//! ---
//! name: pcap-analysis
//! description: Summarize packet captures.
//! inputs:
//!   - pcap file
//! ---
//! ## Outputs
//! - flow table
//! ```
//!
//! Frontmatter supports scalars (plain, quoted, `|` and `>` blocks) and flat
//! lists (`- item` lines or `[a, b]`). Nested mappings are rejected.
//! List-valued fields are collected from both the frontmatter and `##`-level
//! markdown sections whose header matches the field name.

use std::collections::BTreeMap;
use std::fs;
use std::io::Read;
use std::path::{Path, PathBuf};

use walkdir::WalkDir;

use crate::error::ParseError;
use crate::model::SkillRecord;
use crate::text;

pub const PRIMARY_DOC: &str = "SKILL.md";
pub const SCRIPTS_DIR: &str = "scripts";
pub const MIN_SNIPPET_BUDGET: usize = 64;
/// Snippet budget used when a record is first parsed.
pub const DEFAULT_SNIPPET_BUDGET: usize = 2000;

const SCRIPT_EXTENSIONS: [&str; 5] = ["py", "sh", "rb", "js", "ts"];

/// List-valued record fields, in the order they are reported.
const LIST_FIELDS: [&str; 7] = [
    "inputs",
    "outputs",
    "domain_tags",
    "tooling",
    "example_tasks",
    "compatibility",
    "allowed_tools",
];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SkillPackage {
    pub root_dir: PathBuf,
    pub primary_doc: PathBuf,
    pub scripts_dir: Option<PathBuf>,
}

impl SkillPackage {
    /// Package rooted at `root_dir`, if it holds a `SKILL.md`.
    pub fn open(root_dir: impl Into<PathBuf>) -> Option<Self> {
        let root_dir = root_dir.into();
        let primary_doc = root_dir.join(PRIMARY_DOC);
        if !primary_doc.is_file() {
            return None;
        }
        let scripts = root_dir.join(SCRIPTS_DIR);
        let scripts_dir = scripts.is_dir().then_some(scripts);
        Some(Self {
            root_dir,
            primary_doc,
            scripts_dir,
        })
    }
}

/// Every package below `library_dir`, sorted by primary document path.
pub fn discover_packages(library_dir: &Path) -> Vec<SkillPackage> {
    let mut packages: Vec<SkillPackage> = WalkDir::new(library_dir)
        .follow_links(true)
        .into_iter()
        .filter_map(Result::ok)
        .filter(|e| e.file_type().is_file() && e.file_name() == PRIMARY_DOC)
        .filter_map(|e| e.path().parent().and_then(SkillPackage::open))
        .collect();
    packages.sort_by(|a, b| a.primary_doc.cmp(&b.primary_doc));
    packages
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum FmValue {
    Scalar(String),
    List(Vec<String>),
}

pub fn parse_skill_package(pkg: &SkillPackage) -> Result<SkillRecord, ParseError> {
    let content = fs::read_to_string(&pkg.primary_doc).map_err(|source| ParseError::UnreadableDocument {
        path: pkg.primary_doc.clone(),
        source,
    })?;
    let entrypoints = pkg
        .scripts_dir
        .as_deref()
        .map(scan_entrypoints)
        .unwrap_or_default()
        .into_iter()
        .map(|rel| format!("{SCRIPTS_DIR}/{rel}"))
        .collect();
    parse_skill_document(&content, &pkg.primary_doc, entrypoints)
}

/// Parse document text. `source_path` is recorded verbatim and used in errors.
pub fn parse_skill_document(
    content: &str,
    source_path: &Path,
    script_entrypoints: Vec<String>,
) -> Result<SkillRecord, ParseError> {
    let malformed = |reason: String| ParseError::MalformedFrontmatter {
        path: source_path.to_path_buf(),
        reason,
    };
    let content = content.strip_prefix('\u{feff}').unwrap_or(content);
    let (front, body) = split_frontmatter(content).map_err(malformed)?;
    let front = match front {
        Some(block) => parse_frontmatter(block).map_err(malformed)?,
        None => BTreeMap::new(),
    };

    let scalar = |key: &str| -> Result<String, ParseError> {
        match front.get(key) {
            None => Ok(String::new()),
            Some(FmValue::Scalar(s)) => Ok(s.trim().to_string()),
            Some(FmValue::List(_)) => Err(malformed(format!("`{key}` must be a scalar"))),
        }
    };
    let name = scalar("name")?;
    if name.is_empty() {
        return Err(ParseError::MissingFrontmatterName {
            path: source_path.to_path_buf(),
        });
    }
    let description = scalar("description")?;

    let sections = markdown_sections(body);
    let mut lists: BTreeMap<&str, Vec<String>> = BTreeMap::new();
    for field in LIST_FIELDS {
        let mut items = match front.get(field) {
            Some(FmValue::List(items)) => items.clone(),
            Some(FmValue::Scalar(s)) => s.split(',').map(str::to_string).collect(),
            None => Vec::new(),
        };
        if let Some(section_items) = sections.get(field) {
            items.extend(section_items.iter().cloned());
        }
        let lowercase = matches!(field, "inputs" | "outputs" | "domain_tags" | "tooling");
        lists.insert(field, text::dedup_phrases(items, lowercase));
    }
    let mut take = |field: &str| lists.remove(field).unwrap_or_default();

    let mut record = SkillRecord {
        id: SkillRecord::id_for(&name),
        name,
        description,
        one_line_capability: String::new(),
        inputs: take("inputs"),
        outputs: take("outputs"),
        domain_tags: take("domain_tags"),
        tooling: take("tooling"),
        example_tasks: take("example_tasks"),
        script_entrypoints,
        compatibility: take("compatibility"),
        allowed_tools: take("allowed_tools"),
        source_path: source_path.to_path_buf(),
        rendered_snippet: String::new(),
        raw_body: body.to_string(),
    };
    record.rendered_snippet = render_snippet(&record, DEFAULT_SNIPPET_BUDGET)?;
    Ok(record)
}

/// Returns `(frontmatter, body)`. A document without a leading `---` line
/// has no frontmatter.
fn split_frontmatter(content: &str) -> Result<(Option<&str>, &str), String> {
    let mut lines = content.split_inclusive('\n');
    let Some(first) = lines.next() else {
        return Ok((None, content));
    };
    if first.trim_end() != "---" {
        return Ok((None, content));
    }
    let start = first.len();
    let mut offset = start;
    for line in lines {
        if line.trim_end() == "---" {
            let block = &content[start..offset];
            let body = &content[offset + line.len()..];
            return Ok((Some(block), body));
        }
        offset += line.len();
    }
    Err("unterminated frontmatter block (missing closing `---`)".into())
}

fn parse_frontmatter(block: &str) -> Result<BTreeMap<String, FmValue>, String> {
    let lines: Vec<&str> = block.lines().map(|l| l.trim_end_matches('\r')).collect();
    let mut out = BTreeMap::new();
    let mut i = 0;
    while i < lines.len() {
        let line = lines[i];
        let trimmed = line.trim();
        i += 1;
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        if line.starts_with(char::is_whitespace) || trimmed.starts_with("- ") || trimmed == "-" {
            return Err(format!("unexpected line outside a key: `{trimmed}`"));
        }
        let Some((key, rest)) = line.split_once(':') else {
            return Err(format!("expected `key: value`, found `{trimmed}`"));
        };
        let key = key.trim().to_lowercase().replace('-', "_");
        if key.is_empty() {
            return Err("empty key".into());
        }
        let rest = rest.trim();
        let value = if rest.starts_with('|') || rest.starts_with('>') {
            let folded = rest.starts_with('>');
            let mut parts = Vec::new();
            while i < lines.len() && (lines[i].trim().is_empty() || lines[i].starts_with(char::is_whitespace)) {
                parts.push(lines[i].trim());
                i += 1;
            }
            while parts.last().is_some_and(|p| p.is_empty()) {
                parts.pop();
            }
            FmValue::Scalar(if folded { text::collapse_whitespace(&parts.join(" ")) } else { parts.join("\n") })
        } else if rest.starts_with('[') {
            let inner = rest
                .strip_prefix('[')
                .and_then(|r| r.strip_suffix(']'))
                .ok_or_else(|| format!("unterminated flow list for `{key}`"))?;
            if inner.contains('{') || inner.contains('[') {
                return Err(format!("nested value under `{key}`"));
            }
            FmValue::List(
                inner
                    .split(',')
                    .map(|s| unquote(s.trim()))
                    .filter(|s| !s.is_empty())
                    .collect(),
            )
        } else if rest.starts_with('{') {
            return Err(format!("nested mapping under `{key}`"));
        } else if !rest.is_empty() {
            FmValue::Scalar(unquote(rest))
        } else {
            let mut items = Vec::new();
            while i < lines.len() {
                let next = lines[i].trim();
                if next.is_empty() || next.starts_with('#') {
                    i += 1;
                    continue;
                }
                if let Some(item) = next.strip_prefix("- ").or_else(|| (next == "-").then_some("")) {
                    let item = item.trim();
                    if item.starts_with('-') || (item.contains(": ") && !is_quoted(item)) {
                        return Err(format!("nested value in list `{key}`"));
                    }
                    items.push(unquote(item));
                    i += 1;
                } else if lines[i].starts_with(char::is_whitespace) {
                    return Err(format!("nested mapping under `{key}`"));
                } else {
                    break;
                }
            }
            if items.is_empty() {
                FmValue::Scalar(String::new())
            } else {
                FmValue::List(items.into_iter().filter(|s| !s.is_empty()).collect())
            }
        };
        if out.insert(key.clone(), value).is_some() {
            return Err(format!("duplicate key `{key}`"));
        }
    }
    Ok(out)
}

fn is_quoted(s: &str) -> bool {
    s.len() >= 2 && ((s.starts_with('"') && s.ends_with('"')) || (s.starts_with('\'') && s.ends_with('\'')))
}

fn unquote(s: &str) -> String {
    if is_quoted(s) {
        s[1..s.len() - 1].to_string()
    } else {
        s.to_string()
    }
}

/// Top-level list items under each recognized `##` section.
///
/// A `#` or `##` header closes the current section. Deeper headers suspend
/// collection until the next `#`/`##` header, and indented items are skipped.
fn markdown_sections(body: &str) -> BTreeMap<&'static str, Vec<String>> {
    let mut out: BTreeMap<&'static str, Vec<String>> = BTreeMap::new();
    let mut current: Option<&'static str> = None;
    let mut in_fence = false;
    for line in body.lines() {
        let line = line.trim_end_matches('\r');
        let trimmed = line.trim_start();
        if trimmed.starts_with("```") || trimmed.starts_with("~~~") {
            in_fence = !in_fence;
            continue;
        }
        if in_fence {
            continue;
        }
        if let Some(level) = header_level(line) {
            current = if level == 2 {
                let title = normalize_header(&line[level..]);
                LIST_FIELDS.iter().copied().find(|f| *f == title)
            } else {
                None
            };
            continue;
        }
        let Some(field) = current else { continue };
        if let Some(item) = list_item(line) {
            out.entry(field).or_default().push(item.to_string());
        }
    }
    out
}

fn header_level(line: &str) -> Option<usize> {
    let hashes = line.chars().take_while(|c| *c == '#').count();
    if hashes == 0 {
        return None;
    }
    let rest = &line[hashes..];
    (rest.is_empty() || rest.starts_with(' ')).then_some(hashes)
}

fn normalize_header(title: &str) -> String {
    title
        .trim()
        .trim_end_matches(':')
        .trim()
        .to_lowercase()
        .split(|c: char| c.is_whitespace() || c == '-' || c == '_')
        .filter(|s| !s.is_empty())
        .collect::<Vec<_>>()
        .join("_")
}

/// Unindented `- `, `* `, `+ ` or `N.`/`N)` list item.
fn list_item(line: &str) -> Option<&str> {
    if line.starts_with(char::is_whitespace) {
        return None;
    }
    for marker in ["- ", "* ", "+ "] {
        if let Some(rest) = line.strip_prefix(marker) {
            return Some(rest.trim()).filter(|s| !s.is_empty());
        }
    }
    let digits = line.chars().take_while(char::is_ascii_digit).count();
    if digits > 0 {
        let rest = &line[digits..];
        if let Some(item) = rest.strip_prefix(". ").or_else(|| rest.strip_prefix(") ")) {
            return Some(item.trim()).filter(|s| !s.is_empty());
        }
    }
    None
}

/// Executable scripts below `scripts_dir`, as sorted `/`-separated relative
/// paths. A file qualifies by extension or by a `#!` first line.
pub fn scan_entrypoints(scripts_dir: &Path) -> Vec<String> {
    if !scripts_dir.is_dir() {
        return Vec::new();
    }
    let mut found: Vec<String> = WalkDir::new(scripts_dir)
        .into_iter()
        .filter_map(Result::ok)
        .filter(|e| e.file_type().is_file())
        .filter(|e| is_script(e.path()))
        .filter_map(|e| {
            let rel = e.path().strip_prefix(scripts_dir).ok()?;
            let parts: Vec<String> = rel.components().map(|c| c.as_os_str().to_string_lossy().into_owned()).collect();
            Some(parts.join("/"))
        })
        .collect();
    found.sort();
    found
}

fn is_script(path: &Path) -> bool {
    let by_ext = path
        .extension()
        .and_then(|e| e.to_str())
        .is_some_and(|e| SCRIPT_EXTENSIONS.contains(&e));
    by_ext || has_shebang(path)
}

fn has_shebang(path: &Path) -> bool {
    let mut head = [0u8; 2];
    fs::File::open(path)
        .and_then(|mut f| f.read_exact(&mut head))
        .map(|_| &head == b"#!")
        .unwrap_or(false)
}

/// Compact text view of a record: name and capability, I/O summary, and the
/// first entrypoint, cut to `char_budget` characters at a whitespace
/// boundary.
pub fn render_snippet(record: &SkillRecord, char_budget: usize) -> Result<String, ParseError> {
    if char_budget < MIN_SNIPPET_BUDGET {
        return Err(ParseError::BudgetTooSmall(char_budget));
    }
    let capability = record.capability_text();
    let mut lines = Vec::new();
    if capability.is_empty() {
        lines.push(record.name.clone());
    } else {
        lines.push(format!("{}: {}", record.name, capability));
    }
    if !record.inputs.is_empty() {
        lines.push(format!("Inputs: {}", record.inputs.join("; ")));
    }
    if !record.outputs.is_empty() {
        lines.push(format!("Outputs: {}", record.outputs.join("; ")));
    }
    if let Some(entry) = record.script_entrypoints.first() {
        lines.push(format!("Entrypoint: {entry}"));
    }
    Ok(text::truncate_at_whitespace(&lines.join("\n"), char_budget))
}
