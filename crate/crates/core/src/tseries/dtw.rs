use alloc::vec;

use super::{ProjectedSeries, TsError};
use crate::dataset::Label;

/// Unconstrained dynamic time warping distance with absolute-difference
/// local cost and unit step weights.
pub fn dtw(x: &[f64], y: &[f64]) -> Result<f64, TsError> {
    if x.is_empty() || y.is_empty() {
        return Err(TsError::Empty);
    }
    let m = y.len();
    // Two rolling rows of the cumulative cost matrix.
    let mut prev = vec![f64::INFINITY; m];
    let mut cur = vec![f64::INFINITY; m];
    for (i, &xi) in x.iter().enumerate() {
        for (j, &yj) in y.iter().enumerate() {
            let cost = libm::fabs(xi - yj);
            let best = match (i, j) {
                (0, 0) => 0.0,
                (0, _) => cur[j - 1],
                (_, 0) => prev[0],
                _ => prev[j].min(cur[j - 1]).min(prev[j - 1]),
            };
            cur[j] = cost + best;
        }
        core::mem::swap(&mut prev, &mut cur);
    }
    Ok(prev[m - 1])
}

/// Label of the training series nearest to `query` under DTW; ties go to the
/// earliest training series.
pub fn knn1_dtw(train: &[ProjectedSeries], query: &[f64]) -> Result<Label, TsError> {
    let mut best: Option<(f64, Label)> = None;
    for s in train {
        let d = dtw(&s.values, query)?;
        if best.is_none_or(|(bd, _)| d < bd) {
            best = Some((d, s.label));
        }
    }
    best.map(|(_, l)| l).ok_or(TsError::Empty)
}
