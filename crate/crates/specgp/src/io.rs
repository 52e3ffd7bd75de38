//! Pixel CSV ingestion and output helpers.
//!
//! The pixel file has the header `area_id,year_month,label,<bands>` with the
//! bands named and ordered as in the schema. Each row is one observation of
//! one area in one month.

use std::path::{Path, PathBuf};

use serde_json::{json, Value};
use specgp_core::tseries::YearMonth;
use specgp_core::{BandSchema, Label, PixelDataset};

use crate::error::{CliError, Result};

/// One accepted CSV row.
#[derive(Debug, Clone, PartialEq)]
pub struct PixelRow {
    /// 1-based line in the file.
    pub line: u64,
    pub area_id: String,
    pub month: YearMonth,
    pub label: Label,
    pub bands: Vec<f64>,
}

/// A row dropped during loading, with the reason.
#[derive(Debug, Clone, PartialEq)]
pub struct RejectedRow {
    pub line: u64,
    pub reason: String,
}

#[derive(Debug, Clone)]
pub struct PixelTable {
    pub path: PathBuf,
    pub schema: BandSchema,
    pub rows: Vec<PixelRow>,
    /// Raw label text for class 0 and, when present, class 1.
    pub label_names: Vec<String>,
    pub rejected: Vec<RejectedRow>,
}

pub fn expected_header(schema: &BandSchema) -> Vec<String> {
    ["area_id", "year_month", "label"]
        .into_iter()
        .map(String::from)
        .chain(schema.bands().iter().map(|b| b.name.clone()))
        .collect()
}

/// Reads and validates a pixel CSV. Rows with missing or non-finite band
/// values are skipped and reported; anything else malformed is an error.
pub fn load_pixels(path: &Path, schema: &BandSchema) -> Result<PixelTable> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| csv_error(path, e))?;
    let header: Vec<String> = reader
        .headers()
        .map_err(|e| csv_error(path, e))?
        .iter()
        .map(String::from)
        .collect();
    if header.iter().all(|h| h.is_empty()) {
        return Err(CliError::input(path, "empty file"));
    }
    let expected = expected_header(schema);
    if header != expected {
        return Err(CliError::input(
            path,
            format!(
                "header `{}` does not match schema `{}`; expected `{}`",
                header.join(","),
                schema.sensor(),
                expected.join(",")
            ),
        ));
    }

    let mut table = PixelTable {
        path: path.to_path_buf(),
        schema: schema.clone(),
        rows: Vec::new(),
        label_names: Vec::new(),
        rejected: Vec::new(),
    };
    for record in reader.records() {
        let record = record.map_err(|e| csv_error(path, e))?;
        let line = record.position().map_or(0, |p| p.line());
        let at = |msg: String| CliError::input(path, format!("line {line}: {msg}"));

        let area_id = record[0].to_string();
        if area_id.is_empty() {
            return Err(at("empty area_id".into()));
        }
        let month = YearMonth::parse(&record[1]).map_err(|e| at(e.to_string()))?;
        let raw_label = &record[2];
        if raw_label.is_empty() {
            return Err(at("empty label".into()));
        }

        let mut bands = Vec::with_capacity(schema.arity());
        let mut bad_band = None;
        for (i, cell) in record.iter().skip(3).enumerate() {
            let name = schema.band_name(i).expect("header checked");
            let value = if cell.is_empty() {
                f64::NAN
            } else {
                cell.parse::<f64>()
                    .map_err(|_| at(format!("band {name}: `{cell}` is not a number")))?
            };
            if !value.is_finite() && bad_band.is_none() {
                bad_band = Some(format!("band {name} is `{cell}`"));
            }
            bands.push(value);
        }
        if let Some(reason) = bad_band {
            log::warn!("{}: line {line} skipped: {reason}", path.display());
            table.rejected.push(RejectedRow { line, reason });
            continue;
        }

        let label = match table.label_names.iter().position(|n| n == raw_label) {
            Some(i) => Label::from_index(i).expect("at most two names"),
            None if table.label_names.len() < 2 => {
                table.label_names.push(raw_label.to_string());
                Label::from_index(table.label_names.len() - 1).expect("at most two names")
            }
            None => {
                return Err(at(format!(
                    "third class `{raw_label}`; only two are supported (seen `{}` and `{}`)",
                    table.label_names[0], table.label_names[1]
                )))
            }
        };
        table.rows.push(PixelRow {
            line,
            area_id,
            month,
            label,
            bands,
        });
    }
    if table.rows.is_empty() {
        return Err(CliError::input(path, "no usable data rows"));
    }
    Ok(table)
}

fn csv_error(path: &Path, e: csv::Error) -> CliError {
    let line = e.position().map(|p| p.line());
    match e.into_kind() {
        csv::ErrorKind::Io(source) => CliError::io(path, source),
        kind => {
            let msg = match kind {
                csv::ErrorKind::UnequalLengths {
                    expected_len, len, ..
                } => {
                    format!("{len} fields where the header has {expected_len}")
                }
                csv::ErrorKind::Utf8 { .. } => "invalid UTF-8".to_string(),
                other => format!("{other:?}"),
            };
            match line {
                Some(l) => CliError::input(path, format!("line {l}: {msg}")),
                None => CliError::input(path, msg),
            }
        }
    }
}

impl PixelTable {
    pub fn label_name(&self, label: Label) -> &str {
        self.label_names
            .get(label.index())
            .map_or("", String::as_str)
    }

    pub fn month_range(&self) -> (YearMonth, YearMonth) {
        let lo = self
            .rows
            .iter()
            .map(|r| r.month)
            .min()
            .expect("table is non-empty");
        let hi = self
            .rows
            .iter()
            .map(|r| r.month)
            .max()
            .expect("table is non-empty");
        (lo, hi)
    }

    /// First month after a training window of `train_months` months that
    /// starts at the earliest observation.
    pub fn train_boundary(&self, train_months: u32) -> YearMonth {
        self.month_range().0.offset(train_months as i64)
    }

    pub fn dataset<'a>(
        &self,
        rows: impl IntoIterator<Item = &'a PixelRow>,
    ) -> Result<PixelDataset> {
        let samples = rows
            .into_iter()
            .map(|r| (r.bands.clone(), r.label))
            .collect();
        Ok(PixelDataset::new(self.schema.clone(), samples)?)
    }

    /// Class names and where the data came from, for report provenance.
    pub fn provenance(&self) -> Value {
        let (lo, hi) = self.month_range();
        json!({
            "path": self.path.display().to_string(),
            "schema": self.schema.sensor(),
            "rows": self.rows.len(),
            "rejected_rows": self.rejected.iter().map(|r| json!({"line": r.line, "reason": r.reason})).collect::<Vec<_>>(),
            "labels": Label::BOTH.iter().map(|&l| json!({"class": l.index(), "name": self.label_name(l)})).collect::<Vec<_>>(),
            "first_month": lo.to_string(),
            "last_month": hi.to_string(),
        })
    }
}

pub fn create_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))
}

pub fn write_file(path: &Path, contents: impl AsRef<[u8]>) -> Result<()> {
    std::fs::write(path, contents).map_err(|e| CliError::io(path, e))
}

pub fn write_json(path: &Path, value: &Value) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value).expect("JSON values always serialize");
    text.push('\n');
    write_file(path, text)
}

/// Renders rows as CSV; fields are quoted only when needed.
pub fn csv_text<I, R, F>(header: &[&str], rows: I) -> String
where
    I: IntoIterator<Item = R>,
    R: IntoIterator<Item = F>,
    F: AsRef<[u8]>,
{
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("writing to memory");
    for row in rows {
        w.write_record(row).expect("writing to memory");
    }
    String::from_utf8(w.into_inner().expect("writing to memory")).expect("inputs are UTF-8")
}

/// `None` renders as an empty cell.
pub fn opt_cell(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}
