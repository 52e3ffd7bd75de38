mod analyze;
mod classify;
mod eval_ts;
mod train;

pub use analyze::{cmd_analyze, AnalyzeOutcome};
pub use classify::{cmd_classify, ClassifyOutcome};
pub use eval_ts::{cmd_eval_ts, EvalTsOutcome, MethodScores};
pub use train::{cmd_train, TrainOutcome};

use std::collections::BTreeMap;
use std::path::PathBuf;

use serde_json::{json, Value};
use specgp_core::{BandSchema, ExprTree};

use crate::config::ExperimentConfig;
use crate::error::{CliError, Result};
use crate::formats::read_index;

/// An index under evaluation: a learned formula file or a built-in baseline.
#[derive(Debug, Clone)]
pub struct Method {
    pub name: String,
    pub tree: ExprTree,
    pub source: Option<PathBuf>,
}

/// Schema from the config, or failing that from the first index file.
pub(crate) fn resolve_schema(cfg: &ExperimentConfig) -> Result<BandSchema> {
    if cfg.schema.is_some() {
        return cfg.schema();
    }
    match cfg.indices.first() {
        Some(path) => Ok(read_index(path)?.schema),
        None => cfg.schema(),
    }
}

/// Index files first, then baselines. Names are file stems and baseline
/// names, made unique with a `#n` suffix.
pub(crate) fn resolve_methods(cfg: &ExperimentConfig, schema: &BandSchema) -> Result<Vec<Method>> {
    let mut methods = Vec::new();
    for path in &cfg.indices {
        let file = read_index(path)?;
        if file.schema.sensor() != schema.sensor() {
            return Err(CliError::input(
                path,
                format!(
                    "index is for schema `{}` but the dataset uses `{}`",
                    file.schema.sensor(),
                    schema.sensor()
                ),
            ));
        }
        let name = path
            .file_stem()
            .map_or("index".into(), |s| s.to_string_lossy().into_owned());
        methods.push(Method {
            name,
            tree: file.tree,
            source: Some(path.clone()),
        });
    }
    for b in &cfg.baselines {
        methods.push(Method {
            name: b.name().to_string(),
            tree: b.tree(schema)?,
            source: None,
        });
    }
    let mut seen: BTreeMap<String, usize> = BTreeMap::new();
    for m in &mut methods {
        let n = seen.entry(m.name.clone()).or_insert(0);
        *n += 1;
        if *n > 1 {
            m.name = format!("{}#{n}", m.name);
        }
    }
    Ok(methods)
}

pub(crate) fn provenance(command: &str, cfg: &ExperimentConfig) -> Value {
    json!({
        "tool": env!("CARGO_PKG_NAME"),
        "version": env!("CARGO_PKG_VERSION"),
        "command": command,
        "seed": cfg.gp.seed,
        "config": cfg.to_json(),
    })
}
