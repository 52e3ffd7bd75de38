use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use specgp_core::analysis::{band_histogram, element_frequency, top_k_individuals};
use specgp_core::engine::Individual;
use specgp_core::BandSchema;

use crate::config::ExperimentConfig;
use crate::error::{CliError, Result};
use crate::formats::{read_index, read_population};
use crate::io::{create_dir, csv_text, write_file};

#[derive(Debug, Clone, PartialEq)]
pub struct AnalyzeOutcome {
    pub schema: String,
    pub individuals: usize,
    pub histogram: BTreeMap<String, usize>,
    /// `(element, count)` best first.
    pub elements: Vec<(String, usize)>,
}

/// Index files (`*.gpvi`) in a directory, by file name.
fn read_index_dir(dir: &Path) -> Result<(BandSchema, Vec<Individual>)> {
    let mut paths: Vec<PathBuf> = std::fs::read_dir(dir)
        .map_err(|e| CliError::io(dir, e))?
        .map(|e| e.map(|e| e.path()).map_err(|err| CliError::io(dir, err)))
        .collect::<Result<_>>()?;
    paths.retain(|p| p.is_file() && p.extension().is_some_and(|x| x == "gpvi"));
    paths.sort();
    let first = paths
        .first()
        .ok_or_else(|| CliError::input(dir, "no .gpvi formula files in directory"))?;
    let schema = read_index(first)?.schema;
    let mut population = Vec::new();
    for p in &paths {
        let f = read_index(p)?;
        if f.schema.sensor() != schema.sensor() {
            return Err(CliError::input(
                p,
                format!(
                    "schema `{}` differs from `{}` in {}",
                    f.schema.sensor(),
                    schema.sensor(),
                    first.display()
                ),
            ));
        }
        population.push(Individual {
            tree: f.tree,
            fitness: f.fitness,
        });
    }
    Ok((schema, population))
}

/// Band histogram and element ranking over the `k` fittest individuals of a
/// population file or a directory of index files. Writes `histogram.csv` and
/// `elements.csv`; the latter has at most `k` rows.
pub fn cmd_analyze(cfg: &ExperimentConfig) -> Result<AnalyzeOutcome> {
    cfg.validate()?;
    let input = match cfg.indices.as_slice() {
        [one] => one,
        other => {
            return Err(CliError::Config(format!(
                "analyze takes one --index (population file or directory), got {}",
                other.len()
            )))
        }
    };
    let (schema, population) = if input.is_dir() {
        read_index_dir(input)?
    } else {
        read_population(input)?
    };
    if let Some(name) = &cfg.schema {
        if name != schema.sensor() {
            return Err(CliError::input(
                input,
                format!(
                    "formulas are for schema `{}`, not `{name}`",
                    schema.sensor()
                ),
            ));
        }
    }
    let k = cfg.k.min(population.len());
    if k < cfg.k {
        log::info!(
            "only {} individuals available; analyzing all of them",
            population.len()
        );
    }
    let top = top_k_individuals(&population, k)?;
    let trees: Vec<_> = top.iter().map(|i| &i.tree).collect();
    let histogram = band_histogram(trees.iter().copied(), &schema)?;
    let elements = element_frequency(trees.iter().copied(), &schema, cfg.k)?;

    let out = cfg.out_dir()?;
    create_dir(out)?;
    let hist_rows = schema.bands().iter().map(|b| {
        let n = histogram.get(&b.name).copied().unwrap_or(0);
        [b.name.clone(), n.to_string()]
    });
    write_file(
        &out.join("histogram.csv"),
        csv_text(&["band", "count"], hist_rows),
    )?;
    // Competition ranking: tied counts share a rank.
    let elem_rows = elements.iter().map(|(e, n)| {
        let rank = 1 + elements.iter().filter(|(_, m)| m > n).count();
        [e.clone(), n.to_string(), rank.to_string()]
    });
    write_file(
        &out.join("elements.csv"),
        csv_text(&["element", "count", "rank"], elem_rows),
    )?;

    Ok(AnalyzeOutcome {
        schema: schema.sensor().to_string(),
        individuals: top.len(),
        histogram,
        elements,
    })
}
