//! Synthetic libraries with planted prerequisite chains.
//!
//! Each chain `C1 -> C2 -> ... -> head` is wired through identical link
//! phrases so consecutive members form dependency edges. The head is named
//! with four words from the synonym table and is the only member the task
//! query can match. Every token of an intermediate hashes to a stub bucket
//! the query can never touch, so intermediates have exactly zero semantic
//! and lexical similarity to their task. Distractors are isolated.

use std::collections::{BTreeSet, HashSet};
use std::path::PathBuf;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::spec::SyntheticSpec;
use super::synonyms::SYNONYMS;
use crate::error::EvalError;
use crate::index::stub_bucket;
use crate::model::SkillRecord;
use crate::parser::{render_snippet, DEFAULT_SNIPPET_BUDGET};

const HEAD_WORDS: usize = 4;
const CONSONANTS: &[u8] = b"bdfgklmnprstvz";
const VOWELS: &[u8] = b"aeiou";

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticTask {
    pub query_text: String,
    pub target_head: String,
    /// Head plus every upstream member of its chain.
    pub ground_truth_bundle: BTreeSet<String>,
    /// Chain members from the most upstream to the head.
    pub chain: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticCorpus {
    pub records: Vec<SkillRecord>,
    pub tasks: Vec<SyntheticTask>,
}

struct Words {
    rng: ChaCha8Rng,
    used: HashSet<String>,
}

impl Words {
    fn new(rng: ChaCha8Rng) -> Self {
        let used = SYNONYMS.iter().flat_map(|(a, b)| [a.to_string(), b.to_string()]).collect();
        Self { rng, used }
    }

    /// A fresh pseudo-word whose stub bucket is outside `avoid`.
    fn fresh(&mut self, avoid: &BTreeSet<usize>) -> String {
        loop {
            let mut w = String::new();
            for _ in 0..3 {
                w.push(CONSONANTS[self.rng.random_range(0..CONSONANTS.len())] as char);
                w.push(VOWELS[self.rng.random_range(0..VOWELS.len())] as char);
            }
            if !avoid.contains(&stub_bucket(&w)) && self.used.insert(w.clone()) {
                return w;
            }
        }
    }

    fn phrase(&mut self, n: usize, avoid: &BTreeSet<usize>) -> String {
        (0..n).map(|_| self.fresh(avoid)).collect::<Vec<_>>().join(" ")
    }
}

fn buckets<'a>(words: impl IntoIterator<Item = &'a str>) -> BTreeSet<usize> {
    words.into_iter().map(stub_bucket).collect()
}

/// Pick `HEAD_WORDS` table pairs per chain such that no synonym shares a
/// stub bucket with the head's own words.
fn pick_heads(rng: &mut ChaCha8Rng, chains: usize) -> Result<Vec<Vec<(&'static str, &'static str)>>, EvalError> {
    for _ in 0..256 {
        let mut pool: Vec<(&str, &str)> = SYNONYMS.to_vec();
        pool.shuffle(rng);
        let mut heads = Vec::with_capacity(chains);
        for _ in 0..chains {
            let mut head: Vec<(&str, &str)> = Vec::new();
            let mut i = 0;
            while head.len() < HEAD_WORDS && i < pool.len() {
                let (w, s) = pool[i];
                let words = buckets(head.iter().map(|p| p.0).chain([w]));
                let syns = buckets(head.iter().map(|p| p.1).chain([s]));
                if words.is_disjoint(&syns) {
                    head.push(pool.remove(i));
                } else {
                    i += 1;
                }
            }
            if head.len() < HEAD_WORDS {
                break;
            }
            heads.push(head);
        }
        if heads.len() == chains {
            return Ok(heads);
        }
    }
    Err(EvalError::SpecInvalid(format!("cannot draw {chains} disjoint head vocabularies")))
}

struct Draft {
    name: String,
    capability: String,
    inputs: Vec<String>,
    outputs: Vec<String>,
    tags: Vec<String>,
    tooling: Vec<String>,
    example_tasks: Vec<String>,
    entrypoint: String,
}

impl Draft {
    fn filler(words: &mut Words, avoid: &BTreeSet<usize>) -> Self {
        Self {
            name: words.phrase(2, avoid),
            capability: words.phrase(6, avoid),
            inputs: vec![words.phrase(2, avoid), words.phrase(3, avoid)],
            outputs: vec![words.phrase(2, avoid), words.phrase(3, avoid)],
            tags: vec![words.fresh(avoid)],
            tooling: vec![words.fresh(avoid)],
            example_tasks: Vec::new(),
            entrypoint: format!("scripts/{}.py", words.fresh(avoid)),
        }
    }

    fn into_record(self) -> SkillRecord {
        let id = SkillRecord::id_for(&self.name);
        let mut r = SkillRecord {
            source_path: PathBuf::from(format!("synthetic/{id}/SKILL.md")),
            id,
            description: format!("{}.", self.capability),
            one_line_capability: self.capability,
            name: self.name,
            inputs: self.inputs,
            outputs: self.outputs,
            domain_tags: self.tags,
            tooling: self.tooling,
            example_tasks: self.example_tasks,
            script_entrypoints: vec![self.entrypoint],
            compatibility: vec!["python 3.10 or newer".into()],
            allowed_tools: vec!["bash".into(), "python".into()],
            ..Default::default()
        };
        r.rendered_snippet = render_snippet(&r, DEFAULT_SNIPPET_BUDGET).unwrap_or_default();
        r
    }
}

fn rng_for(spec: &SyntheticSpec, library_size: usize) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(spec.random_seed ^ (library_size as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15))
}

/// Deterministically generate a library of `library_size` records and one
/// task per planted chain.
pub fn generate_library(spec: &SyntheticSpec, library_size: usize) -> Result<SyntheticCorpus, EvalError> {
    spec.validate()?;
    if spec.chain_count * spec.chain_length > library_size {
        return Err(EvalError::SpecInvalid(format!("chains do not fit a library of {library_size}")));
    }
    let mut rng = rng_for(spec, library_size);
    let heads = pick_heads(&mut rng, spec.chain_count)?;
    let mut words = Words::new(rng);
    let none = BTreeSet::new();

    let mut records = Vec::with_capacity(library_size);
    let mut tasks = Vec::with_capacity(spec.chain_count);
    for head in heads {
        let head_words: Vec<&str> = head.iter().map(|p| p.0).collect();
        let synonyms: Vec<&str> = head.iter().map(|p| p.1).collect();
        let query_buckets = buckets(head_words.iter().chain(&synonyms).copied());

        let mut chain = Vec::with_capacity(spec.chain_length);
        let mut link = words.phrase(2, &query_buckets);
        for _ in 1..spec.chain_length {
            let mut d = Draft::filler(&mut words, &query_buckets);
            d.inputs[0] = link;
            link = words.phrase(2, &query_buckets);
            d.outputs[0] = link.clone();
            chain.push(d.into_record());
        }
        let name = head_words.join(" ");
        let mut d = Draft::filler(&mut words, &query_buckets);
        d.capability = format!("{name} {}", words.phrase(4, &query_buckets));
        d.name = name;
        d.inputs[0] = link;
        d.example_tasks = vec![synonyms.join(" ")];
        let head_record = d.into_record();

        let replaced = (spec.paraphrase_noise * HEAD_WORDS as f64).round() as usize;
        let mut positions: Vec<usize> = (0..HEAD_WORDS).collect();
        positions.shuffle(&mut words.rng);
        let mut query: Vec<&str> = head_words.clone();
        for &i in &positions[..replaced] {
            query[i] = synonyms[i];
        }

        chain.push(head_record);
        let ids: Vec<String> = chain.iter().map(|r| r.id.clone()).collect();
        tasks.push(SyntheticTask {
            query_text: query.join(" "),
            target_head: ids.last().unwrap().clone(),
            ground_truth_bundle: ids.iter().cloned().collect(),
            chain: ids,
        });
        records.extend(chain);
    }
    while records.len() < library_size {
        records.push(Draft::filler(&mut words, &none).into_record());
    }
    Ok(SyntheticCorpus { records, tasks })
}
