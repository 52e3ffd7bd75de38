use std::path::PathBuf;

use serde_json::json;
use specgp_core::analysis::top_k_individuals;
use specgp_core::engine::{evolve, GenerationRecord, Individual};
use specgp_core::expr::to_formula;
use specgp_core::Label;

use super::provenance;
use crate::config::ExperimentConfig;
use crate::error::{CliError, Result};
use crate::formats::{render_index, render_population};
use crate::io::{create_dir, csv_text, load_pixels, write_file, write_json};

#[derive(Debug, Clone)]
pub struct TrainOutcome {
    pub best: Individual,
    pub formula: String,
    pub index_path: PathBuf,
    pub train_rows: usize,
}

/// Evolves an index on the training window and writes `best.gpvi`,
/// `history.csv`, `population.txt` and `report.json` to the output directory.
pub fn cmd_train(cfg: &ExperimentConfig) -> Result<TrainOutcome> {
    cfg.validate()?;
    let schema = cfg.schema()?;
    let table = load_pixels(cfg.data_path()?, &schema)?;
    let boundary = table.train_boundary(cfg.train_months);
    let train_rows: Vec<_> = table.rows.iter().filter(|r| r.month < boundary).collect();
    let data = table.dataset(train_rows.iter().copied())?;
    data.require_both_classes().map_err(|e| {
        CliError::input(
            &table.path,
            format!("training window before {boundary}: {e}"),
        )
    })?;
    log::info!(
        "training on {} rows before {boundary} ({} class 0, {} class 1)",
        data.len(),
        data.class_count(Label::A),
        data.class_count(Label::B)
    );

    let mut sink = |r: &GenerationRecord| {
        if r.generation.is_multiple_of(10) {
            log::info!(
                "generation {}: best {:.6}, mean size {:.1}",
                r.generation,
                r.best_so_far,
                r.mean_size
            );
        }
    };
    let result = evolve(&cfg.gp, &data, &mut sink)?;
    let best = result.best.clone();
    let formula = to_formula(&best.tree, &schema);

    let out = cfg.out_dir()?;
    create_dir(out)?;
    let index_path = out.join("best.gpvi");
    write_file(&index_path, render_index(&schema, &best.tree, best.fitness))?;
    let history_csv = csv_text(
        &[
            "generation",
            "best_so_far",
            "generation_best",
            "mean_fitness",
            "mean_size",
        ],
        result.history.iter().map(|r| {
            [
                r.generation.to_string(),
                r.best_so_far.to_string(),
                r.generation_best.to_string(),
                r.mean_fitness.to_string(),
                r.mean_size.to_string(),
            ]
        }),
    );
    write_file(&out.join("history.csv"), history_csv)?;
    let ranked = top_k_individuals(&result.final_population, result.final_population.len())?;
    write_file(
        &out.join("population.txt"),
        render_population(&schema, &ranked),
    )?;

    let mut report = provenance("train", cfg);
    report["data"] = table.provenance();
    report["train_boundary"] = json!(boundary.to_string());
    report["train_rows"] = json!(data.len());
    report["best"] = json!({
        "fitness": best.fitness,
        "formula": formula,
        "nodes": best.tree.node_count(),
        "depth": best.tree.depth(),
    });
    report["generations_run"] = json!(result.history.len());
    write_json(&out.join("report.json"), &report)?;

    Ok(TrainOutcome {
        best,
        formula,
        index_path,
        train_rows: data.len(),
    })
}
