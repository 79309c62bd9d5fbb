//! TOML configuration files with environment-variable overrides.
//!
//! Any config key can be overridden through the environment using the
//! `PERSONREC_` prefix; nested tables use `__` as the separator, e.g.
//! `PERSONREC_FOLDS__K=5` sets `folds.k` and `PERSONREC_CATEGORIES=8`
//! sets the top-level `categories`. Values parse as TOML, falling back to
//! plain strings.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::eval::{EligibilityConfig, FoldConfig, SkipRule};
use crate::gen::GeneratorConfig;
use crate::interest::ActionWeights;
use crate::recommend::{RecommendParams, RecommenderKind};

pub const ENV_PREFIX: &str = "PERSONREC_";

/// Everything an evaluation or recommendation run needs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RunConfig {
    pub edges: Option<PathBuf>,
    pub activities: Option<PathBuf>,
    pub out: Option<PathBuf>,
    /// Interest categories expected in the activity log.
    pub categories: usize,
    /// Recommenders to run, by label.
    pub methods: Vec<String>,
    pub lenient: bool,
    pub eligibility: EligibilityConfig,
    pub folds: FoldConfig,
    pub skip: SkipRule,
    pub recommend: RecommendParams<f64>,
    /// Action-kind weights; unlisted kinds weigh 1.
    pub weights: BTreeMap<String, f64>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            edges: None,
            activities: None,
            out: None,
            categories: 11,
            methods: RecommenderKind::ALL
                .iter()
                .map(|k| k.label().to_string())
                .collect(),
            lenient: false,
            eligibility: EligibilityConfig::default(),
            folds: FoldConfig::default(),
            skip: SkipRule::default(),
            recommend: RecommendParams::default(),
            weights: BTreeMap::new(),
        }
    }
}

impl RunConfig {
    pub fn kinds(&self) -> Result<Vec<RecommenderKind>> {
        self.methods.iter().map(|m| m.parse()).collect()
    }

    pub fn action_weights(&self) -> ActionWeights<f64> {
        self.weights.iter().map(|(k, &v)| (k.clone(), v)).collect()
    }

    pub fn validate(&self) -> Result<()> {
        if self.categories == 0 {
            return Err(Error::invalid_config("categories", "must be at least 1"));
        }
        self.kinds()?;
        self.action_weights().validate()?;
        self.skip.validate()?;
        self.recommend.validate()?;
        Ok(())
    }

    /// The path fields are optional in files but required to run.
    pub fn require_paths(&self) -> Result<(&Path, &Path)> {
        let edges = self
            .edges
            .as_deref()
            .ok_or_else(|| Error::invalid_config("edges", "no edge-list path given"))?;
        let activities = self
            .activities
            .as_deref()
            .ok_or_else(|| Error::invalid_config("activities", "no activity-log path given"))?;
        Ok((edges, activities))
    }
}

/// Loads a run config, layering environment overrides on top of the file.
pub fn load_run_config(path: Option<&Path>) -> Result<RunConfig> {
    load_with_env(path, std::env::vars())
}

/// Loads a generator config, layering environment overrides on top of the
/// file.
pub fn load_generator_config(path: Option<&Path>) -> Result<GeneratorConfig> {
    load_with_env(path, std::env::vars())
}

fn load_with_env<C>(path: Option<&Path>, vars: impl Iterator<Item = (String, String)>) -> Result<C>
where
    C: serde::de::DeserializeOwned + Default,
{
    let text = match path {
        Some(p) => std::fs::read_to_string(p).map_err(|e| Error::io(p, e))?,
        None => String::new(),
    };
    let mut table: toml::Table = text
        .parse()
        .map_err(|e: toml::de::Error| Error::invalid_config("config", e.to_string()))?;
    apply_env_overrides(&mut table, vars);
    table
        .try_into()
        .map_err(|e: toml::de::Error| Error::invalid_config("config", e.to_string()))
}

fn apply_env_overrides(table: &mut toml::Table, vars: impl Iterator<Item = (String, String)>) {
    let mut overrides: Vec<(String, String)> = vars
        .filter(|(key, _)| key.starts_with(ENV_PREFIX))
        .collect();
    overrides.sort();
    for (key, raw) in overrides {
        let path: Vec<String> = key[ENV_PREFIX.len()..]
            .split("__")
            .map(str::to_ascii_lowercase)
            .collect();
        if path.iter().any(String::is_empty) {
            continue;
        }
        let mut current = &mut *table;
        for segment in &path[..path.len() - 1] {
            let slot = current
                .entry(segment.clone())
                .or_insert_with(|| toml::Value::Table(toml::Table::new()));
            if !slot.is_table() {
                *slot = toml::Value::Table(toml::Table::new());
            }
            current = slot.as_table_mut().expect("just ensured a table");
        }
        current.insert(path[path.len() - 1].clone(), parse_toml_value(&raw));
    }
}

fn parse_toml_value(raw: &str) -> toml::Value {
    format!("v = {raw}")
        .parse::<toml::Table>()
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| toml::Value::String(raw.to_string()))
}
