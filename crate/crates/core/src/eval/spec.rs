use std::fmt;
use std::path::Path;
use std::str::FromStr;

use crate::config::{parse_kv, RetrievalConfig};
use crate::error::EvalError;

/// Most chains a corpus can hold: each head draws four disjoint pairs from
/// the synonym table.
pub const MAX_CHAINS: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Strategy {
    Vanilla,
    Vector,
    Gos,
    /// Diffusion without reverse transitions.
    GosForward,
    /// Dense-only seeding, no field-match rerank.
    GosDense,
}

impl Strategy {
    pub const ALL: [Strategy; 5] = [Self::Vanilla, Self::Vector, Self::Gos, Self::GosForward, Self::GosDense];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Vanilla => "vanilla",
            Self::Vector => "vector",
            Self::Gos => "gos",
            Self::GosForward => "gos-forward",
            Self::GosDense => "gos-dense",
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Strategy {
    type Err = EvalError;

    fn from_str(s: &str) -> Result<Self, EvalError> {
        Self::ALL
            .into_iter()
            .find(|x| x.as_str() == s.trim())
            .ok_or_else(|| EvalError::UnknownStrategy(s.trim().to_string()))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticSpec {
    pub library_sizes: Vec<usize>,
    pub chain_count: usize,
    pub chain_length: usize,
    pub paraphrase_noise: f64,
    pub random_seed: u64,
    pub strategies: Vec<Strategy>,
    pub k_vector: usize,
}

impl Default for SyntheticSpec {
    fn default() -> Self {
        Self {
            library_sizes: vec![50, 200],
            chain_count: 8,
            chain_length: 3,
            paraphrase_noise: 0.0,
            random_seed: 7,
            strategies: vec![Strategy::Vanilla, Strategy::Vector, Strategy::Gos],
            k_vector: 3,
        }
    }
}

fn invalid(msg: impl Into<String>) -> EvalError {
    EvalError::SpecInvalid(msg.into())
}

fn list<T: FromStr>(key: &str, value: &str) -> Result<Vec<T>, EvalError> {
    value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse().map_err(|_| invalid(format!("{key}: cannot parse `{s}`"))))
        .collect()
}

fn scalar<T: FromStr>(key: &str, value: &str) -> Result<T, EvalError> {
    value.parse().map_err(|_| invalid(format!("{key}: cannot parse `{value}`")))
}

impl SyntheticSpec {
    pub fn validate(&self) -> Result<(), EvalError> {
        if self.library_sizes.is_empty() || self.library_sizes.contains(&0) {
            return Err(invalid("library_sizes must be a non-empty list of positive sizes"));
        }
        if !(2..=5).contains(&self.chain_length) {
            return Err(invalid("chain_length must be in [2, 5]"));
        }
        if self.chain_count == 0 || self.chain_count > MAX_CHAINS {
            return Err(invalid(format!("chain_count must be in [1, {MAX_CHAINS}]")));
        }
        if !(0.0..=1.0).contains(&self.paraphrase_noise) {
            return Err(invalid("paraphrase_noise must be in [0, 1]"));
        }
        let smallest = *self.library_sizes.iter().min().unwrap();
        if self.chain_count * self.chain_length > smallest {
            return Err(invalid(format!(
                "{} chains of length {} do not fit a library of {smallest}",
                self.chain_count, self.chain_length
            )));
        }
        if self.strategies.is_empty() {
            return Err(invalid("strategies is empty"));
        }
        if self.k_vector == 0 {
            return Err(invalid("k_vector must be positive"));
        }
        Ok(())
    }

    /// Parse a key = value spec. Retrieval configuration keys may be mixed
    /// in and are applied on top of `base`.
    pub fn from_kv(text: &str, base: RetrievalConfig) -> Result<(Self, RetrievalConfig), EvalError> {
        let mut spec = Self::default();
        let mut config = base;
        let entries = parse_kv(text).map_err(|e| invalid(e.to_string()))?;
        for e in entries {
            let (k, v) = (e.key.as_str(), e.value.as_str());
            match k {
                "library_sizes" => spec.library_sizes = list(k, v)?,
                "chain_count" => spec.chain_count = scalar(k, v)?,
                "chain_length" => spec.chain_length = scalar(k, v)?,
                "paraphrase_noise" => spec.paraphrase_noise = scalar(k, v)?,
                "random_seed" => spec.random_seed = scalar(k, v)?,
                "k_vector" => spec.k_vector = scalar(k, v)?,
                "strategies" => {
                    spec.strategies = v
                        .split(',')
                        .map(str::trim)
                        .filter(|s| !s.is_empty())
                        .map(str::parse)
                        .collect::<Result<_, _>>()?
                }
                _ => config
                    .apply(k, v)
                    .map_err(|err| invalid(format!("line {}: {err}", e.line)))?,
            }
        }
        spec.validate()?;
        config.validate().map_err(|e| invalid(e.to_string()))?;
        Ok((spec, config))
    }

    pub fn load(path: &Path, base: RetrievalConfig) -> Result<(Self, RetrievalConfig), EvalError> {
        let text = std::fs::read_to_string(path).map_err(|e| invalid(format!("{}: {e}", path.display())))?;
        Self::from_kv(&text, base)
    }

    pub fn to_kv(&self) -> String {
        let join = |xs: Vec<String>| xs.join(", ");
        format!(
            "library_sizes = {}\nchain_count = {}\nchain_length = {}\nparaphrase_noise = {}\nrandom_seed = {}\nstrategies = {}\nk_vector = {}\n",
            join(self.library_sizes.iter().map(|s| s.to_string()).collect()),
            self.chain_count,
            self.chain_length,
            self.paraphrase_noise,
            self.random_seed,
            join(self.strategies.iter().map(|s| s.to_string()).collect()),
            self.k_vector,
        )
    }
}
