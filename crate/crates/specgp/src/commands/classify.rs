use std::collections::HashMap;
use std::fmt::Write as _;

use serde_json::json;
use specgp_core::classify::{
    confidence, confidence_scores, confusion, Centroids, ConfusionSummary, LogisticModel,
};
use specgp_core::expr::to_formula;
use specgp_core::Label;

use super::{provenance, resolve_methods, resolve_schema};
use crate::config::{EvalSlice, ExperimentConfig};
use crate::error::{CliError, Result};
use crate::io::{
    create_dir, csv_text, load_pixels, opt_cell, write_file, write_json, PixelRow, PixelTable,
};

#[derive(Debug, Clone)]
pub struct ClassifyOutcome {
    pub method: String,
    pub summary: ConfusionSummary,
    pub logistic: LogisticModel,
    pub eval_rows: usize,
}

/// Mean confidence and mean accuracy over one area's evaluated pixels.
#[derive(Debug, Clone, PartialEq)]
struct AreaScore {
    area_id: String,
    mean_confidence: f64,
    mean_accuracy: f64,
}

fn area_scores(rows: &[&PixelRow], confidences: &[f64], correct: &[bool]) -> Vec<AreaScore> {
    let mut order: Vec<&str> = Vec::new();
    let mut acc: HashMap<&str, (f64, usize, usize)> = HashMap::new();
    for ((row, &c), &ok) in rows.iter().zip(confidences).zip(correct) {
        let e = acc.entry(&row.area_id).or_insert_with(|| {
            order.push(&row.area_id);
            (0.0, 0, 0)
        });
        e.0 += c;
        e.1 += ok as usize;
        e.2 += 1;
    }
    order
        .into_iter()
        .map(|id| {
            let (c, ok, n) = acc[id];
            AreaScore {
                area_id: id.to_string(),
                mean_confidence: c / n as f64,
                mean_accuracy: ok as f64 / n as f64,
            }
        })
        .collect()
}

fn pct(v: Option<f64>) -> String {
    v.map_or("n/a".into(), |x| format!("{:.2}", 100.0 * x))
}

fn text_report(
    table: &PixelTable,
    method: &str,
    formula: &str,
    slice: &str,
    s: &ConfusionSummary,
) -> String {
    let mut t = String::new();
    writeln!(t, "index:   {method}").unwrap();
    writeln!(t, "formula: {formula}").unwrap();
    writeln!(t, "schema:  {}", table.schema.sensor()).unwrap();
    writeln!(t, "pixels:  {} ({slice})", s.total()).unwrap();
    writeln!(t).unwrap();
    writeln!(t, "{:<24}{:>10}{:>10}", "class", "producer", "user").unwrap();
    for l in Label::BOTH {
        let name = format!("{} ({})", l, table.label_name(l));
        writeln!(
            t,
            "{:<24}{:>10}{:>10}",
            name,
            pct(s.producer[l.index()]),
            pct(s.user[l.index()])
        )
        .unwrap();
    }
    writeln!(t, "{:<24}{:>10}", "normalized", pct(s.normalized)).unwrap();
    t
}

/// Fits the nearest-centroid classifier on the training window, classifies
/// the configured slice and writes `report.{txt,csv,json}` plus
/// `confidence.csv`.
pub fn cmd_classify(cfg: &ExperimentConfig) -> Result<ClassifyOutcome> {
    cfg.validate()?;
    let schema = resolve_schema(cfg)?;
    let mut methods = resolve_methods(cfg, &schema)?;
    if methods.len() != 1 {
        return Err(CliError::Config(format!(
            "classify takes exactly one index or baseline, got {}",
            methods.len()
        )));
    }
    let method = methods.remove(0);
    let table = load_pixels(cfg.data_path()?, &schema)?;
    let boundary = table.train_boundary(cfg.train_months);
    let train_rows: Vec<&PixelRow> = table.rows.iter().filter(|r| r.month < boundary).collect();
    let eval_rows: Vec<&PixelRow> = table
        .rows
        .iter()
        .filter(|r| match cfg.eval_slice {
            EvalSlice::Test => r.month >= boundary,
            EvalSlice::Train => r.month < boundary,
            EvalSlice::All => true,
        })
        .collect();
    if eval_rows.is_empty() {
        let (_, last) = table.month_range();
        return Err(CliError::input(
            &table.path,
            format!(
                "no rows in the {} slice (training window ends before {boundary}, data ends {last})",
                cfg.eval_slice.name()
            ),
        ));
    }

    let train = table.dataset(train_rows.iter().copied())?;
    train.require_both_classes().map_err(|e| {
        CliError::input(
            &table.path,
            format!("training window before {boundary}: {e}"),
        )
    })?;
    let eval = table.dataset(eval_rows.iter().copied())?;
    let train_values = train.project(&method.tree)?;
    let eval_values = eval.project(&method.tree)?;

    let centroids = Centroids::from_projections(&train_values, train.labels())?;
    let predicted = centroids.predict_values(&eval_values);
    let summary = confusion(&predicted, eval.labels())?;
    let (logistic, probs) = confidence_scores(&train_values, train.labels(), &eval_values)?;
    if logistic.capped {
        log::warn!(
            "logistic coefficients hit the cap; the classes are close to perfectly separated"
        );
    }
    let confidences: Vec<f64> = probs.iter().map(|&p| confidence(p)).collect();
    let correct: Vec<bool> = predicted
        .iter()
        .zip(eval.labels())
        .map(|(p, t)| p == t)
        .collect();
    let areas = area_scores(&eval_rows, &confidences, &correct);

    let formula = to_formula(&method.tree, &schema);
    let slice = match cfg.eval_slice {
        EvalSlice::Test => format!("test slice, from {boundary}"),
        EvalSlice::Train => format!("train slice, before {boundary}"),
        EvalSlice::All => "all rows".to_string(),
    };
    let out = cfg.out_dir()?;
    create_dir(out)?;
    write_file(
        &out.join("report.txt"),
        text_report(&table, &method.name, &formula, &slice, &summary),
    )?;

    let mut rows: Vec<[String; 4]> = Label::BOTH
        .iter()
        .map(|&l| {
            [
                l.to_string(),
                table.label_name(l).to_string(),
                opt_cell(summary.producer[l.index()]),
                opt_cell(summary.user[l.index()]),
            ]
        })
        .collect();
    rows.push([
        "normalized".into(),
        String::new(),
        opt_cell(summary.normalized),
        String::new(),
    ]);
    write_file(
        &out.join("report.csv"),
        csv_text(&["class", "name", "producer", "user"], rows),
    )?;

    write_file(
        &out.join("confidence.csv"),
        csv_text(
            &["area_id", "mean_confidence", "mean_accuracy"],
            areas.iter().map(|a| {
                [
                    a.area_id.clone(),
                    a.mean_confidence.to_string(),
                    a.mean_accuracy.to_string(),
                ]
            }),
        ),
    )?;

    let mut report = provenance("classify", cfg);
    report["data"] = table.provenance();
    report["method"] = json!({
        "name": method.name,
        "formula": formula,
        "source": method.source.as_ref().map(|p| p.display().to_string()),
    });
    report["train_boundary"] = json!(boundary.to_string());
    report["train_rows"] = json!(train.len());
    report["eval_slice"] = json!(cfg.eval_slice.name());
    report["eval_rows"] = json!(eval.len());
    report["centroids"] = json!(centroids.means);
    report["confusion"] = json!({
        "counts": summary.counts,
        "producer": summary.producer,
        "user": summary.user,
        "normalized": summary.normalized,
        "overall": summary.overall(),
    });
    report["logistic"] = json!({
        "intercept": logistic.intercept,
        "slope": logistic.slope,
        "iterations": logistic.iterations,
        "converged": logistic.converged,
        "capped": logistic.capped,
    });
    write_json(&out.join("report.json"), &report)?;

    Ok(ClassifyOutcome {
        method: method.name,
        summary,
        logistic,
        eval_rows: eval.len(),
    })
}
