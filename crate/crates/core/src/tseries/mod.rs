//! Time-series preprocessing, DTW 1-NN classification and the 5x2
//! cross-validation protocol.
//!
//! Raw observations are composited to one value per calendar month, gaps are
//! filled by linear interpolation (nearest-value extension at the ends), and
//! each band-vector series is projected through an index pointwise into a
//! scalar series.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::dataset::{DatasetError, Label};
use crate::expr::{ExprError, ExprTree, Program};

mod cv;
mod dtw;

pub use cv::{cv_5x2, evaluate_splits, run_ts_experiment, CvSplit, ExperimentRecord, Fold};
pub use dtw::{dtw, knn1_dtw};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum TsError {
    #[error("no observations")]
    Empty,
    #[error("every month is missing")]
    AllMissing,
    #[error("{missing} of {total} months missing, above the allowed fraction {threshold}")]
    TooManyGaps {
        missing: usize,
        total: usize,
        threshold: f64,
    },
    #[error("observation has {got} bands, expected {expected}")]
    Arity { got: usize, expected: usize },
    #[error("observation month {month} lies outside {start}..={end}")]
    OutOfRange {
        month: YearMonth,
        start: YearMonth,
        end: YearMonth,
    },
    #[error("invalid month `{0}`")]
    BadMonth(String),
    #[error("class {label} has {found} series; at least {needed} are required")]
    TooFewInClass {
        label: Label,
        needed: usize,
        found: usize,
    },
    #[error("series lengths differ ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error(transparent)]
    Expr(#[from] ExprError),
    #[error(transparent)]
    Dataset(#[from] DatasetError),
}

/// A calendar month.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct YearMonth {
    pub year: i32,
    /// 1..=12
    pub month: u8,
}

impl YearMonth {
    pub fn new(year: i32, month: u8) -> Result<Self, TsError> {
        if (1..=12).contains(&month) {
            Ok(YearMonth { year, month })
        } else {
            Err(TsError::BadMonth(alloc::format!("{year}-{month}")))
        }
    }

    /// Parses `YYYY-MM`, or `YYYY-MM-DD` with the day ignored.
    pub fn parse(text: &str) -> Result<Self, TsError> {
        let bad = || TsError::BadMonth(String::from(text));
        let mut parts = text.trim().split('-');
        let year: i32 = parts.next().and_then(|y| y.parse().ok()).ok_or_else(bad)?;
        let month: u8 = parts.next().and_then(|m| m.parse().ok()).ok_or_else(bad)?;
        if let Some(day) = parts.next() {
            let day: u8 = day.parse().map_err(|_| bad())?;
            if !(1..=31).contains(&day) {
                return Err(bad());
            }
        }
        if parts.next().is_some() {
            return Err(bad());
        }
        YearMonth::new(year, month).map_err(|_| bad())
    }

    /// Months since year 0.
    pub fn ordinal(self) -> i64 {
        self.year as i64 * 12 + (self.month as i64 - 1)
    }

    pub fn from_ordinal(ordinal: i64) -> Self {
        YearMonth {
            year: ordinal.div_euclid(12) as i32,
            month: (ordinal.rem_euclid(12) + 1) as u8,
        }
    }

    pub fn offset(self, months: i64) -> Self {
        Self::from_ordinal(self.ordinal() + months)
    }

    /// Signed number of months from `self` to `later`.
    pub fn months_until(self, later: YearMonth) -> i64 {
        later.ordinal() - self.ordinal()
    }
}

impl fmt::Display for YearMonth {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:04}-{:02}", self.year, self.month)
    }
}

/// Monthly values with gaps, starting at `start`.
#[derive(Debug, Clone, PartialEq)]
pub struct MonthlyComposite {
    pub start: YearMonth,
    pub values: Vec<Option<Vec<f64>>>,
}

impl MonthlyComposite {
    pub fn missing_count(&self) -> usize {
        self.values.iter().filter(|v| v.is_none()).count()
    }
}

/// Averages observations per calendar month, band by band. Months without
/// observations are `None`. The span covers `range` when given, else the
/// first to last observed month.
pub fn monthly_composite(
    observations: &[(YearMonth, Vec<f64>)],
    range: Option<(YearMonth, YearMonth)>,
) -> Result<MonthlyComposite, TsError> {
    let first = observations.first().ok_or(TsError::Empty)?;
    let arity = first.1.len();
    let (start, end) = match range {
        Some(r) => r,
        None => {
            let lo = observations.iter().map(|o| o.0).min().expect("non-empty");
            let hi = observations.iter().map(|o| o.0).max().expect("non-empty");
            (lo, hi)
        }
    };
    let len = (start.months_until(end) + 1).max(0) as usize;
    let mut sums: Vec<Option<(Vec<f64>, usize)>> = alloc::vec![None; len];
    for (month, bands) in observations {
        if bands.len() != arity {
            return Err(TsError::Arity {
                got: bands.len(),
                expected: arity,
            });
        }
        if *month < start || *month > end {
            return Err(TsError::OutOfRange {
                month: *month,
                start,
                end,
            });
        }
        let slot = &mut sums[start.months_until(*month) as usize];
        match slot {
            Some((acc, n)) => {
                for (a, b) in acc.iter_mut().zip(bands) {
                    *a += b;
                }
                *n += 1;
            }
            None => *slot = Some((bands.clone(), 1)),
        }
    }
    let values = sums
        .into_iter()
        .map(|s| s.map(|(acc, n)| acc.into_iter().map(|v| v / n as f64).collect()))
        .collect();
    Ok(MonthlyComposite { start, values })
}

/// Fills gaps: interior gaps by linear interpolation between the nearest
/// present neighbours, leading and trailing gaps by the nearest present
/// value. Series with a missing fraction above `max_missing_fraction` are
/// rejected.
pub fn interpolate_gaps(
    values: &[Option<Vec<f64>>],
    max_missing_fraction: f64,
) -> Result<Vec<Vec<f64>>, TsError> {
    let present: Vec<usize> = (0..values.len()).filter(|&i| values[i].is_some()).collect();
    if values.is_empty() {
        return Err(TsError::Empty);
    }
    if present.is_empty() {
        return Err(TsError::AllMissing);
    }
    let missing = values.len() - present.len();
    if missing as f64 / values.len() as f64 > max_missing_fraction {
        return Err(TsError::TooManyGaps {
            missing,
            total: values.len(),
            threshold: max_missing_fraction,
        });
    }
    let get = |i: usize| values[i].as_ref().expect("present index");
    let mut out = Vec::with_capacity(values.len());
    // `next` is the position in `present` of the first present index >= i.
    let mut next = 0;
    for i in 0..values.len() {
        while next < present.len() && present[next] < i {
            next += 1;
        }
        let filled = if next < present.len() && present[next] == i {
            get(i).clone()
        } else if next == 0 {
            get(present[0]).clone()
        } else if next == present.len() {
            get(present[present.len() - 1]).clone()
        } else {
            let (p, q) = (present[next - 1], present[next]);
            let t = (i - p) as f64 / (q - p) as f64;
            get(p)
                .iter()
                .zip(get(q))
                .map(|(a, b)| a + (b - a) * t)
                .collect()
        };
        out.push(filled);
    }
    Ok(out)
}

/// [`interpolate_gaps`] for a scalar series.
pub fn interpolate_scalar(
    values: &[Option<f64>],
    max_missing_fraction: f64,
) -> Result<Vec<f64>, TsError> {
    let wrapped: Vec<Option<Vec<f64>>> = values.iter().map(|v| v.map(|x| alloc::vec![x])).collect();
    Ok(interpolate_gaps(&wrapped, max_missing_fraction)?
        .into_iter()
        .map(|v| v[0])
        .collect())
}

/// A complete monthly series of band vectors for one area.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledSeries {
    pub area_id: String,
    pub label: Label,
    pub start: YearMonth,
    pub values: Vec<Vec<f64>>,
}

impl LabeledSeries {
    pub fn months(&self) -> impl Iterator<Item = YearMonth> + '_ {
        (0..self.values.len()).map(|i| self.start.offset(i as i64))
    }
}

/// A series after projection through an index.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectedSeries {
    pub area_id: String,
    pub label: Label,
    pub values: Vec<f64>,
}

/// Applies `index` to every timestamp independently.
pub fn project_series(
    index: &ExprTree,
    series: &LabeledSeries,
    arity: usize,
) -> Result<ProjectedSeries, TsError> {
    let program = Program::compile(index, arity)?;
    for v in &series.values {
        if v.len() != arity {
            return Err(TsError::Arity {
                got: v.len(),
                expected: arity,
            });
        }
    }
    let cols = crate::expr::BandColumns::from_rows(&series.values, arity);
    Ok(ProjectedSeries {
        area_id: series.area_id.clone(),
        label: series.label,
        values: program.eval_columns(&cols),
    })
}

pub fn project_all(
    index: &ExprTree,
    series: &[LabeledSeries],
    arity: usize,
) -> Result<Vec<ProjectedSeries>, TsError> {
    series
        .iter()
        .map(|s| project_series(index, s, arity))
        .collect()
}

/// Per-timestamp mean and population standard deviation of one class.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassProfile {
    pub label: Label,
    pub count: usize,
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
}

/// Mean projected series per class, for every class that has members. All
/// series must have the same length.
pub fn class_profiles(series: &[ProjectedSeries]) -> Result<Vec<ClassProfile>, TsError> {
    let len = series.first().ok_or(TsError::Empty)?.values.len();
    if let Some(s) = series.iter().find(|s| s.values.len() != len) {
        return Err(TsError::LengthMismatch(len, s.values.len()));
    }
    let mut out = Vec::new();
    for label in Label::BOTH {
        let members: Vec<&ProjectedSeries> = series.iter().filter(|s| s.label == label).collect();
        if members.is_empty() {
            continue;
        }
        let n = members.len() as f64;
        let mut mean = alloc::vec![0.0; len];
        let mut std = alloc::vec![0.0; len];
        for t in 0..len {
            let m = members.iter().map(|s| s.values[t]).sum::<f64>() / n;
            let var = members
                .iter()
                .map(|s| (s.values[t] - m) * (s.values[t] - m))
                .sum::<f64>()
                / n;
            mean[t] = m;
            std[t] = libm::sqrt(var);
        }
        out.push(ClassProfile {
            label,
            count: members.len(),
            mean,
            std,
        });
    }
    Ok(out)
}
