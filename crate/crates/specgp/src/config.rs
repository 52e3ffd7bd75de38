//! Experiment configuration: a flat `key = value` file, overridden by
//! command-line flags.
//!
//! ```text
//! # forest vs savanna, Landsat
//! schema = landsat
//! data = pixels.csv
//! generations = 200
//! train_months = 60
//! ```
//!
//! Blank lines and lines starting with `#` are ignored. Relative paths are
//! resolved against the directory holding the config file. `index` and
//! `baseline` take comma-separated lists.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde_json::{json, Value};
use specgp_core::engine::MutationMode;
use specgp_core::indices::Baseline;
use specgp_core::stats::DEFAULT_ALPHA;
use specgp_core::{BandSchema, GPConfig};

use crate::error::{CliError, Result};

/// Which rows `classify` evaluates on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EvalSlice {
    /// Rows after the training window.
    Test,
    Train,
    All,
}

impl EvalSlice {
    pub fn name(self) -> &'static str {
        match self {
            EvalSlice::Test => "test",
            EvalSlice::Train => "train",
            EvalSlice::All => "all",
        }
    }
}

impl FromStr for EvalSlice {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "test" => Ok(EvalSlice::Test),
            "train" => Ok(EvalSlice::Train),
            "all" => Ok(EvalSlice::All),
            _ => Err(format!("unknown slice `{s}` (expected test, train or all)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub schema: Option<String>,
    pub data: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub indices: Vec<PathBuf>,
    pub baselines: Vec<Baseline>,
    /// Evolution parameters; `gp.seed` is the experiment seed.
    pub gp: GPConfig,
    /// Length of the training window, counted from the earliest month.
    pub train_months: u32,
    pub eval_slice: EvalSlice,
    pub max_missing_fraction: f64,
    pub alpha: f64,
    pub k: usize,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            schema: None,
            data: None,
            out: None,
            indices: Vec::new(),
            baselines: Vec::new(),
            gp: GPConfig::default(),
            train_months: 60,
            eval_slice: EvalSlice::Test,
            max_missing_fraction: 0.5,
            alpha: DEFAULT_ALPHA,
            k: 10,
        }
    }
}

fn parse_num<T: FromStr>(key: &str, value: &str) -> Result<T, String>
where
    T::Err: std::fmt::Display,
{
    value
        .parse()
        .map_err(|e| format!("`{key}`: cannot parse `{value}`: {e}"))
}

fn parse_mode(value: &str) -> Result<MutationMode, String> {
    match value {
        "offspring" => Ok(MutationMode::Offspring),
        "exclusive" => Ok(MutationMode::Exclusive),
        _ => Err(format!(
            "unknown mutation_mode `{value}` (expected offspring or exclusive)"
        )),
    }
}

fn mode_name(mode: MutationMode) -> &'static str {
    match mode {
        MutationMode::Offspring => "offspring",
        MutationMode::Exclusive => "exclusive",
    }
}

fn list(value: &str) -> impl Iterator<Item = &str> {
    value.split(',').map(str::trim).filter(|s| !s.is_empty())
}

impl ExperimentConfig {
    /// Sets one key. Paths are taken as given.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), String> {
        match key {
            "schema" => {
                BandSchema::builtin(value).map_err(|e| e.to_string())?;
                self.schema = Some(value.to_string());
            }
            "data" => self.data = Some(PathBuf::from(value)),
            "out" => self.out = Some(PathBuf::from(value)),
            "index" => self.indices = list(value).map(PathBuf::from).collect(),
            "baseline" => {
                self.baselines = list(value).map(Baseline::parse).collect::<Result<_, _>>()?
            }
            "seed" => self.gp.seed = parse_num(key, value)?,
            "population_size" => self.gp.population_size = parse_num(key, value)?,
            "generations" => self.gp.generations = parse_num(key, value)?,
            "max_initial_depth" => self.gp.max_initial_depth = parse_num(key, value)?,
            "max_tree_depth" => self.gp.max_tree_depth = parse_num(key, value)?,
            "tournament_k" => self.gp.tournament_k = parse_num(key, value)?,
            "p_crossover" => self.gp.p_crossover = parse_num(key, value)?,
            "p_mutation" => self.gp.p_mutation = parse_num(key, value)?,
            "p_replication" => self.gp.p_replication = parse_num(key, value)?,
            "mutation_subtree_max_depth" => {
                self.gp.mutation_subtree_max_depth = parse_num(key, value)?
            }
            "mutation_mode" => self.gp.mutation_mode = parse_mode(value)?,
            "train_months" => self.train_months = parse_num(key, value)?,
            "eval_slice" => self.eval_slice = value.parse()?,
            "max_missing_fraction" => self.max_missing_fraction = parse_num(key, value)?,
            "alpha" => self.alpha = parse_num(key, value)?,
            "k" => self.k = parse_num(key, value)?,
            _ => return Err(format!("unknown key `{key}`")),
        }
        Ok(())
    }

    /// Parses config text. `base` is the directory relative paths hang off.
    pub fn parse(text: &str, base: &Path) -> Result<Self, String> {
        let mut cfg = ExperimentConfig::default();
        let mut seen = BTreeSet::new();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| format!("line {}: expected `key = value`", n + 1))?;
            let (key, value) = (key.trim(), value.trim());
            if !seen.insert(key.to_string()) {
                return Err(format!("line {}: `{key}` given twice", n + 1));
            }
            cfg.set(key, value)
                .map_err(|e| format!("line {}: {e}", n + 1))?;
        }
        let rebase = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        cfg.data.as_mut().map(rebase);
        cfg.out.as_mut().map(rebase);
        cfg.indices.iter_mut().for_each(rebase);
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        let base = path.parent().unwrap_or(Path::new(""));
        Self::parse(&text, base).map_err(|m| CliError::input(path, m))
    }

    /// Checks ranges that the engine does not check itself.
    pub fn validate(&self) -> Result<()> {
        self.gp
            .validate()
            .map_err(|e| CliError::Config(e.to_string()))?;
        if self.train_months == 0 {
            return Err(CliError::Config("`train_months` must be at least 1".into()));
        }
        if !(0.0..=1.0).contains(&self.max_missing_fraction) {
            return Err(CliError::Config(format!(
                "`max_missing_fraction` = {} is outside [0, 1]",
                self.max_missing_fraction
            )));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(CliError::Config(format!(
                "`alpha` = {} is outside (0, 1)",
                self.alpha
            )));
        }
        if self.k == 0 {
            return Err(CliError::Config("`k` must be at least 1".into()));
        }
        Ok(())
    }

    pub fn schema(&self) -> Result<BandSchema> {
        let name = self.schema.as_deref().ok_or_else(|| {
            CliError::Config("no schema given (use --schema or `schema =`)".into())
        })?;
        Ok(BandSchema::builtin(name)?)
    }

    pub fn data_path(&self) -> Result<&Path> {
        self.data
            .as_deref()
            .ok_or_else(|| CliError::Config("no dataset given (use --data or `data =`)".into()))
    }

    pub fn out_dir(&self) -> Result<&Path> {
        self.out.as_deref().ok_or_else(|| {
            CliError::Config("no output directory given (use --out or `out =`)".into())
        })
    }

    /// Everything that determines results, for report provenance. The output
    /// directory is left out so reports written to different places match.
    pub fn to_json(&self) -> Value {
        let gp = &self.gp;
        json!({
            "schema": self.schema,
            "data": self.data.as_ref().map(|p| p.display().to_string()),
            "index": self.indices.iter().map(|p| p.display().to_string()).collect::<Vec<_>>(),
            "baseline": self.baselines.iter().map(|b| b.name()).collect::<Vec<_>>(),
            "seed": gp.seed,
            "population_size": gp.population_size,
            "generations": gp.generations,
            "max_initial_depth": gp.max_initial_depth,
            "max_tree_depth": gp.max_tree_depth,
            "tournament_k": gp.tournament_k,
            "p_crossover": gp.p_crossover,
            "p_mutation": gp.p_mutation,
            "p_replication": gp.p_replication,
            "mutation_subtree_max_depth": gp.mutation_subtree_max_depth,
            "mutation_mode": mode_name(gp.mutation_mode),
            "train_months": self.train_months,
            "eval_slice": self.eval_slice.name(),
            "max_missing_fraction": self.max_missing_fraction,
            "alpha": self.alpha,
            "k": self.k,
        })
    }
}
