use std::collections::HashMap;
use std::fmt::Write as _;

use serde_json::json;
use specgp_core::expr::to_formula;
use specgp_core::stats::{verdicts, VerdictReport};
use specgp_core::tseries::{
    class_profiles, cv_5x2, evaluate_splits, interpolate_gaps, monthly_composite, project_all,
    ExperimentRecord, Fold, LabeledSeries, TsError, YearMonth,
};
use specgp_core::{seeded_rng, Label};

use super::{provenance, resolve_methods, resolve_schema, Method};
use crate::config::ExperimentConfig;
use crate::error::{CliError, Result};
use crate::io::{create_dir, csv_text, load_pixels, opt_cell, write_file, write_json, PixelTable};

#[derive(Debug, Clone, PartialEq)]
pub struct MethodScores {
    pub name: String,
    /// Normalized accuracy of each of the ten experiments.
    pub accuracies: Vec<f64>,
    pub mean: f64,
    /// Population standard deviation.
    pub std: f64,
}

#[derive(Debug, Clone)]
pub struct EvalTsOutcome {
    pub methods: Vec<MethodScores>,
    /// The first method against each of the others.
    pub verdicts: VerdictReport,
    pub series_used: usize,
    pub rejected_areas: Vec<String>,
}

/// Groups rows per area, composites them onto the table's full month range
/// and fills gaps. Areas with too many gaps are dropped and returned with the
/// reason.
pub(crate) fn build_series(
    table: &PixelTable,
    max_missing_fraction: f64,
) -> Result<(Vec<LabeledSeries>, Vec<(String, String)>)> {
    let mut order: Vec<&str> = Vec::new();
    let mut areas: HashMap<&str, (Label, Vec<(YearMonth, Vec<f64>)>)> = HashMap::new();
    for row in &table.rows {
        let entry = areas.entry(&row.area_id).or_insert_with(|| {
            order.push(&row.area_id);
            (row.label, Vec::new())
        });
        if entry.0 != row.label {
            return Err(CliError::input(
                &table.path,
                format!(
                    "line {}: area `{}` is labeled both `{}` and `{}`",
                    row.line,
                    row.area_id,
                    table.label_name(entry.0),
                    table.label_name(row.label)
                ),
            ));
        }
        entry.1.push((row.month, row.bands.clone()));
    }
    let range = table.month_range();
    let mut series = Vec::new();
    let mut rejected = Vec::new();
    for id in order {
        let (label, obs) = &areas[id];
        let composite = monthly_composite(obs, Some(range))?;
        match interpolate_gaps(&composite.values, max_missing_fraction) {
            Ok(values) => series.push(LabeledSeries {
                area_id: id.to_string(),
                label: *label,
                start: range.0,
                values,
            }),
            Err(e @ (TsError::TooManyGaps { .. } | TsError::AllMissing)) => {
                log::warn!("area `{id}` dropped: {e}");
                rejected.push((id.to_string(), e.to_string()));
            }
            Err(e) => return Err(e.into()),
        }
    }
    Ok((series, rejected))
}

fn mean_std(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let m = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / n;
    (m, var.sqrt())
}

fn file_safe(name: &str) -> String {
    name.chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || c == '-' || c == '_' {
                c
            } else {
                '_'
            }
        })
        .collect()
}

fn fold_name(f: Fold) -> &'static str {
    match f {
        Fold::A => "a",
        Fold::B => "b",
    }
}

fn text_table(methods: &[MethodScores], report: &VerdictReport, alpha: f64) -> String {
    let mut t = String::new();
    writeln!(t, "{:<20}{:>20}", "method", "accuracy (%)").unwrap();
    for (i, m) in methods.iter().enumerate() {
        let glyph = if i == 0 {
            ""
        } else {
            report.comparisons[i - 1].verdict.glyph()
        };
        let cell = format!("{:.2} \u{b1} {:.2}", 100.0 * m.mean, 100.0 * m.std);
        writeln!(t, "{:<20}{:>20} {glyph}", m.name, cell).unwrap();
    }
    writeln!(t).unwrap();
    writeln!(
        t,
        "Friedman chi2 = {:.4} (df {}), p = {:.4e}",
        report.friedman.statistic, report.friedman.df, report.friedman.p_value
    )
    .unwrap();
    writeln!(
        t,
        "\u{25B2}/\u{25BC}: {} significantly better/worse than the method in that row \
         (Wilcoxon, Bonferroni-adjusted, alpha {alpha}); \u{2022}: no significant difference",
        methods[0].name
    )
    .unwrap();
    t
}

/// Runs DTW 1-NN under 5x2 cross-validation for every method on the same
/// splits and compares the first method to the rest.
pub fn cmd_eval_ts(cfg: &ExperimentConfig) -> Result<EvalTsOutcome> {
    cfg.validate()?;
    let schema = resolve_schema(cfg)?;
    let methods: Vec<Method> = resolve_methods(cfg, &schema)?;
    if methods.len() < 2 {
        return Err(CliError::Config(format!(
            "eval-ts compares at least two methods (indices and/or baselines), got {}",
            methods.len()
        )));
    }
    let table = load_pixels(cfg.data_path()?, &schema)?;
    let (series, rejected) = build_series(&table, cfg.max_missing_fraction)?;
    log::info!(
        "{} series kept, {} dropped for gaps",
        series.len(),
        rejected.len()
    );
    let labels: Vec<Label> = series.iter().map(|s| s.label).collect();
    let splits = cv_5x2(&mut seeded_rng(cfg.gp.seed), &labels)?;

    let mut scores = Vec::new();
    let mut records: Vec<Vec<ExperimentRecord>> = Vec::new();
    let mut profiles = Vec::new();
    for m in &methods {
        let projected = project_all(&m.tree, &series, schema.arity())?;
        let recs = evaluate_splits(&projected, &splits)?;
        let accuracies: Vec<f64> = recs
            .iter()
            .map(|r| r.summary.normalized.unwrap_or(f64::NAN))
            .collect();
        let (mean, std) = mean_std(&accuracies);
        scores.push(MethodScores {
            name: m.name.clone(),
            accuracies,
            mean,
            std,
        });
        records.push(recs);
        profiles.push(class_profiles(&projected)?);
    }
    let baselines: Vec<Vec<f64>> = scores[1..].iter().map(|s| s.accuracies.clone()).collect();
    let report = verdicts(&scores[0].accuracies, &baselines, cfg.alpha)?;

    let out = cfg.out_dir()?;
    create_dir(out)?;
    let mut raw = Vec::new();
    for (m, recs) in methods.iter().zip(&records) {
        for r in recs {
            raw.push([
                m.name.clone(),
                r.repetition.to_string(),
                fold_name(r.fold).to_string(),
                opt_cell(r.summary.normalized),
                opt_cell(r.summary.producer[0]),
                opt_cell(r.summary.producer[1]),
            ]);
        }
    }
    write_file(
        &out.join("raw.csv"),
        csv_text(
            &[
                "method",
                "repetition",
                "fold",
                "normalized",
                "producer_0",
                "producer_1",
            ],
            raw,
        ),
    )?;

    let comparison_rows = scores.iter().enumerate().map(|(i, s)| {
        let mut row = vec![s.name.clone(), s.mean.to_string(), s.std.to_string()];
        match i.checked_sub(1).map(|j| &report.comparisons[j]) {
            None => row.extend([
                "candidate".into(),
                String::new(),
                String::new(),
                String::new(),
                String::new(),
            ]),
            Some(c) => row.extend([
                c.verdict.name().to_string(),
                c.verdict.glyph().to_string(),
                c.wilcoxon.p_value.to_string(),
                c.adjusted_p.to_string(),
                c.mean_difference.to_string(),
            ]),
        }
        row
    });
    write_file(
        &out.join("comparison.csv"),
        csv_text(
            &[
                "method",
                "mean",
                "std",
                "verdict",
                "glyph",
                "wilcoxon_p",
                "adjusted_p",
                "mean_difference",
            ],
            comparison_rows,
        ),
    )?;
    write_file(
        &out.join("comparison.txt"),
        text_table(&scores, &report, cfg.alpha),
    )?;

    let profile_dir = out.join("profiles");
    create_dir(&profile_dir)?;
    let (start, _) = table.month_range();
    for (m, profs) in methods.iter().zip(&profiles) {
        let len = profs.first().map_or(0, |p| p.mean.len());
        let mut header = vec!["month".to_string()];
        for p in profs {
            header.push(format!("mean_{}", p.label));
            header.push(format!("std_{}", p.label));
        }
        let header: Vec<&str> = header.iter().map(String::as_str).collect();
        let rows = (0..len).map(|t| {
            let mut row = vec![start.offset(t as i64).to_string()];
            for p in profs {
                row.push(p.mean[t].to_string());
                row.push(p.std[t].to_string());
            }
            row
        });
        write_file(
            &profile_dir.join(format!("{}.csv", file_safe(&m.name))),
            csv_text(&header, rows),
        )?;
    }

    let mut json_report = provenance("eval-ts", cfg);
    json_report["data"] = table.provenance();
    json_report["series_used"] = json!(series.len());
    json_report["rejected_areas"] = json!(rejected
        .iter()
        .map(|(id, why)| json!({"area_id": id, "reason": why}))
        .collect::<Vec<_>>());
    json_report["methods"] = json!(methods
        .iter()
        .zip(&scores)
        .map(|(m, s)| json!({
            "name": m.name,
            "formula": to_formula(&m.tree, &schema),
            "accuracies": s.accuracies,
            "mean": s.mean,
            "std": s.std,
        }))
        .collect::<Vec<_>>());
    json_report["friedman"] = json!({
        "statistic": report.friedman.statistic,
        "df": report.friedman.df,
        "p_value": report.friedman.p_value,
    });
    json_report["comparisons"] = json!(report
        .comparisons
        .iter()
        .zip(&scores[1..])
        .map(|(c, s)| json!({
            "candidate": scores[0].name,
            "baseline": s.name,
            "verdict": c.verdict.name(),
            "glyph": c.verdict.glyph(),
            "wilcoxon_p": c.wilcoxon.p_value,
            "wilcoxon_w": c.wilcoxon.w,
            "n_effective": c.wilcoxon.n_effective,
            "adjusted_p": c.adjusted_p,
            "mean_difference": c.mean_difference,
        }))
        .collect::<Vec<_>>());
    write_json(&out.join("comparison.json"), &json_report)?;

    Ok(EvalTsOutcome {
        methods: scores,
        verdicts: report,
        series_used: series.len(),
        rejected_areas: rejected.into_iter().map(|(id, _)| id).collect(),
    })
}
