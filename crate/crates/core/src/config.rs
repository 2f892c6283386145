//! Retrieval configuration and its flat `key = value` file format.
//!
//! ```text
//! eta = 0.6
//! alpha = 0.15
//! lambda.dep = 0.5
//! gamma.sem = 0.2
//! ```
//!
//! Missing keys keep their defaults. Unknown keys are rejected, and the
//! assembled configuration is validated before it is returned.

use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use serde::Serialize;

use crate::error::ConfigError;
use crate::model::{RelationType, RelationWeights};

/// How semantic and lexical seed scores are put on a common scale before
/// they are mixed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SeedMerge {
    /// Min-max normalize each signal over the candidate union.
    MinMax,
    /// Mix raw scores as-is.
    Raw,
}

impl SeedMerge {
    fn as_str(self) -> &'static str {
        match self {
            Self::MinMax => "minmax",
            Self::Raw => "raw",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RetrievalConfig {
    /// Semantic share of the seed mix.
    pub eta: f64,
    /// Restart probability of the diffusion.
    pub alpha: f64,
    /// Relation-type mixing weights; sum to one.
    pub lambda: RelationWeights,
    /// Reverse-traversal strength per relation type.
    pub gamma: RelationWeights,
    /// Weight of direct field evidence in the final ranking.
    pub mu: f64,
    /// Bonus per internal dependency edge in the bundle objective.
    pub beta: f64,
    pub k_seed: usize,
    pub k_pool: usize,
    pub theta_dep: f64,
    pub tol: f64,
    pub max_iter: usize,
    /// Characters.
    pub per_skill_budget: usize,
    /// Characters.
    pub global_budget: usize,
    pub hit_threshold: f64,
    pub seed_merge: SeedMerge,
}

pub fn default_config() -> RetrievalConfig {
    RetrievalConfig::default()
}

impl Default for RetrievalConfig {
    fn default() -> Self {
        Self {
            eta: 0.6,
            alpha: 0.15,
            lambda: RelationWeights::new(0.50, 0.25, 0.15, 0.10),
            gamma: RelationWeights::new(1.0, 0.5, 0.2, 0.1),
            mu: 0.5,
            beta: 0.5,
            k_seed: 20,
            k_pool: 20,
            theta_dep: 0.5,
            tol: 1e-8,
            max_iter: 100,
            per_skill_budget: 2000,
            global_budget: 16000,
            hit_threshold: 1e-6,
            seed_merge: SeedMerge::MinMax,
        }
    }
}

impl RetrievalConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        fn check(ok: bool, msg: &str) -> Result<(), ConfigError> {
            if ok {
                Ok(())
            } else {
                Err(ConfigError::Invalid(msg.to_string()))
            }
        }
        let finite = |x: f64| x.is_finite();
        check(finite(self.eta) && (0.0..=1.0).contains(&self.eta), "eta must lie in [0, 1]")?;
        check(finite(self.alpha) && self.alpha > 0.0 && self.alpha < 1.0, "alpha must lie in (0, 1)")?;
        for (r, w) in self.lambda.iter() {
            check(finite(w) && w >= 0.0, &format!("lambda.{r} must be non-negative"))?;
        }
        check((self.lambda.sum() - 1.0).abs() <= 1e-9, "lambda weights must sum to 1")?;
        for (r, w) in self.gamma.iter() {
            check(finite(w) && w >= 0.0, &format!("gamma.{r} must be non-negative"))?;
        }
        check(finite(self.mu) && self.mu >= 0.0, "mu must be non-negative")?;
        check(finite(self.beta) && self.beta >= 0.0, "beta must be non-negative")?;
        check(self.k_seed >= 1, "k_seed must be positive")?;
        check(self.k_pool >= 1, "k_pool must be positive")?;
        check(
            finite(self.theta_dep) && self.theta_dep > 0.0 && self.theta_dep <= 1.0,
            "theta_dep must lie in (0, 1]",
        )?;
        check(finite(self.tol) && self.tol > 0.0, "tol must be positive")?;
        check(self.max_iter >= 1, "max_iter must be positive")?;
        check(self.per_skill_budget >= 1, "per_skill_budget must be at least 1")?;
        check(
            self.global_budget >= self.per_skill_budget,
            "global_budget must be at least per_skill_budget",
        )?;
        check(
            finite(self.hit_threshold) && self.hit_threshold >= 0.0,
            "hit_threshold must be non-negative",
        )?;
        Ok(())
    }

    /// Serialize to the flat configuration format. Floats use the shortest
    /// representation that parses back to the same value.
    pub fn to_kv(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "eta = {}", self.eta);
        let _ = writeln!(out, "alpha = {}", self.alpha);
        let _ = writeln!(out, "mu = {}", self.mu);
        let _ = writeln!(out, "beta = {}", self.beta);
        let _ = writeln!(out, "k_seed = {}", self.k_seed);
        let _ = writeln!(out, "k_pool = {}", self.k_pool);
        let _ = writeln!(out, "theta_dep = {}", self.theta_dep);
        let _ = writeln!(out, "tol = {:e}", self.tol);
        let _ = writeln!(out, "max_iter = {}", self.max_iter);
        let _ = writeln!(out, "per_skill_budget = {}", self.per_skill_budget);
        let _ = writeln!(out, "global_budget = {}", self.global_budget);
        let _ = writeln!(out, "hit_threshold = {:e}", self.hit_threshold);
        let _ = writeln!(out, "seed_merge = {}", self.seed_merge.as_str());
        for (r, w) in self.lambda.iter() {
            let _ = writeln!(out, "lambda.{r} = {w}");
        }
        for (r, w) in self.gamma.iter() {
            let _ = writeln!(out, "gamma.{r} = {w}");
        }
        out
    }

    /// Parse a configuration file body on top of the defaults.
    pub fn from_kv(text: &str) -> Result<Self, ConfigError> {
        let mut cfg = Self::default();
        for entry in parse_kv(text)? {
            cfg.apply(&entry.key, &entry.value)?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        Self::from_kv(&std::fs::read_to_string(path)?)
    }

    /// Set one key. Does not validate; callers validate the whole config.
    pub fn apply(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        if let Some((table, rel)) = key.split_once('.') {
            let relation: RelationType = rel.parse().map_err(|_| ConfigError::UnknownKey(key.to_string()))?;
            let w = parse_value::<f64>(key, value)?;
            return match table {
                "lambda" => {
                    self.lambda.set(relation, w);
                    Ok(())
                }
                "gamma" => {
                    self.gamma.set(relation, w);
                    Ok(())
                }
                _ => Err(ConfigError::UnknownKey(key.to_string())),
            };
        }
        match key {
            "eta" => self.eta = parse_value(key, value)?,
            "alpha" => self.alpha = parse_value(key, value)?,
            "mu" => self.mu = parse_value(key, value)?,
            "beta" => self.beta = parse_value(key, value)?,
            "k_seed" => self.k_seed = parse_value(key, value)?,
            "k_pool" => self.k_pool = parse_value(key, value)?,
            "theta_dep" => self.theta_dep = parse_value(key, value)?,
            "tol" => self.tol = parse_value(key, value)?,
            "max_iter" => self.max_iter = parse_value(key, value)?,
            "per_skill_budget" => self.per_skill_budget = parse_value(key, value)?,
            "global_budget" => self.global_budget = parse_value(key, value)?,
            "hit_threshold" => self.hit_threshold = parse_value(key, value)?,
            "seed_merge" => {
                self.seed_merge = match value {
                    "minmax" => SeedMerge::MinMax,
                    "raw" => SeedMerge::Raw,
                    _ => {
                        return Err(ConfigError::InvalidValue {
                            key: key.into(),
                            message: "expected `minmax` or `raw`".into(),
                        })
                    }
                }
            }
            _ => return Err(ConfigError::UnknownKey(key.to_string())),
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KvEntry {
    pub line: usize,
    pub key: String,
    pub value: String,
}

/// Split a flat `key = value` document. Blank lines and `#` comments are
/// skipped; keys may not repeat.
pub fn parse_kv(text: &str) -> Result<Vec<KvEntry>, ConfigError> {
    let mut out: Vec<KvEntry> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(ConfigError::Syntax {
                line: i + 1,
                message: format!("expected `key = value`, found `{line}`"),
            });
        };
        let key = key.trim();
        if key.is_empty() {
            return Err(ConfigError::Syntax {
                line: i + 1,
                message: "empty key".into(),
            });
        }
        if out.iter().any(|e| e.key == key) {
            return Err(ConfigError::Syntax {
                line: i + 1,
                message: format!("duplicate key `{key}`"),
            });
        }
        out.push(KvEntry {
            line: i + 1,
            key: key.to_string(),
            value: value.trim().to_string(),
        });
    }
    Ok(out)
}

pub(crate) fn parse_value<T: FromStr>(key: &str, value: &str) -> Result<T, ConfigError> {
    value.parse().map_err(|_| ConfigError::InvalidValue {
        key: key.to_string(),
        message: format!("cannot parse `{value}`"),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_carry_reverse_weight_table() {
        let c = default_config();
        assert_eq!(c.gamma.get(RelationType::Dep), 1.0);
        assert_eq!(c.gamma.get(RelationType::Wf), 0.5);
        assert_eq!(c.gamma.get(RelationType::Sem), 0.2);
        assert_eq!(c.gamma.get(RelationType::Alt), 0.1);
        assert!((c.lambda.sum() - 1.0).abs() < 1e-12);
        c.validate().unwrap();
    }

    #[test]
    fn kv_round_trip_is_exact() {
        let mut c = default_config();
        c.eta = 0.1 + 0.2;
        c.tol = 3.3e-9;
        c.lambda = RelationWeights::new(0.4, 0.3, 0.2, 0.1);
        c.seed_merge = SeedMerge::Raw;
        let back = RetrievalConfig::from_kv(&c.to_kv()).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn partial_file_overrides_defaults() {
        let c = RetrievalConfig::from_kv("# ablation\neta = 1\ngamma.dep = 0\n").unwrap();
        assert_eq!(c.eta, 1.0);
        assert_eq!(c.gamma.get(RelationType::Dep), 0.0);
        assert_eq!(c.alpha, 0.15);
    }

    #[test]
    fn rejects_out_of_range_and_unknown() {
        assert!(matches!(RetrievalConfig::from_kv("alpha = 1.0"), Err(ConfigError::Invalid(_))));
        assert!(matches!(RetrievalConfig::from_kv("lambda.dep = 0.9"), Err(ConfigError::Invalid(_))));
        assert!(matches!(RetrievalConfig::from_kv("gamma.xyz = 1"), Err(ConfigError::UnknownKey(_))));
        assert!(matches!(RetrievalConfig::from_kv("colour = red"), Err(ConfigError::UnknownKey(_))));
        assert!(matches!(RetrievalConfig::from_kv("eta 0.5"), Err(ConfigError::Syntax { .. })));
        assert!(matches!(
            RetrievalConfig::from_kv("per_skill_budget = 500\nglobal_budget = 100"),
            Err(ConfigError::Invalid(_))
        ));
        assert!(matches!(RetrievalConfig::from_kv("eta = 0.5\neta = 0.4"), Err(ConfigError::Syntax { .. })));
    }
}
