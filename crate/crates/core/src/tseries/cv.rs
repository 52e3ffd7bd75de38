use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::Rng;

use super::{knn1_dtw, project_all, LabeledSeries, ProjectedSeries, TsError};
use crate::classify::{confusion, ConfusionSummary};
use crate::dataset::Label;
use crate::expr::ExprTree;

const REPETITIONS: usize = 5;

/// Which half of a repetition trains.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Fold {
    /// First half trains, second half tests.
    A,
    /// The swap: second half trains, first half tests.
    B,
}

/// One train/test experiment, as positions into the dataset.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CvSplit {
    /// 1..=5
    pub repetition: usize,
    pub fold: Fold,
    pub train: Vec<usize>,
    pub test: Vec<usize>,
}

/// Five stratified random halvings of the dataset, each used in both
/// directions: ten experiments in total. With an odd class size the extra
/// sample goes to a random half.
pub fn cv_5x2<R: Rng + ?Sized>(rng: &mut R, labels: &[Label]) -> Result<Vec<CvSplit>, TsError> {
    let by_class: [Vec<usize>; 2] =
        Label::BOTH.map(|l| (0..labels.len()).filter(|&i| labels[i] == l).collect());
    for l in Label::BOTH {
        let found = by_class[l.index()].len();
        if found < 2 {
            return Err(TsError::TooFewInClass {
                label: l,
                needed: 2,
                found,
            });
        }
    }
    let mut splits = Vec::with_capacity(2 * REPETITIONS);
    for repetition in 1..=REPETITIONS {
        let mut first = Vec::new();
        let mut second = Vec::new();
        for ids in &by_class {
            let mut ids = ids.clone();
            ids.shuffle(rng);
            let mut cut = ids.len() / 2;
            if ids.len() % 2 == 1 && rng.gen::<bool>() {
                cut += 1;
            }
            first.extend_from_slice(&ids[..cut]);
            second.extend_from_slice(&ids[cut..]);
        }
        first.sort_unstable();
        second.sort_unstable();
        splits.push(CvSplit {
            repetition,
            fold: Fold::A,
            train: first.clone(),
            test: second.clone(),
        });
        splits.push(CvSplit {
            repetition,
            fold: Fold::B,
            train: second,
            test: first,
        });
    }
    Ok(splits)
}

/// Outcome of one cross-validation experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentRecord {
    pub repetition: usize,
    pub fold: Fold,
    pub summary: ConfusionSummary,
}

/// Runs DTW 1-NN on each split of already projected series.
pub fn evaluate_splits(
    series: &[ProjectedSeries],
    splits: &[CvSplit],
) -> Result<Vec<ExperimentRecord>, TsError> {
    splits
        .iter()
        .map(|split| {
            let train: Vec<ProjectedSeries> =
                split.train.iter().map(|&i| series[i].clone()).collect();
            let mut predicted = Vec::with_capacity(split.test.len());
            let mut truth = Vec::with_capacity(split.test.len());
            for &i in &split.test {
                predicted.push(knn1_dtw(&train, &series[i].values)?);
                truth.push(series[i].label);
            }
            let summary = confusion(&predicted, &truth).expect("equal lengths by construction");
            Ok(ExperimentRecord {
                repetition: split.repetition,
                fold: split.fold,
                summary,
            })
        })
        .collect()
}

/// Projects every series through `index`, then runs the 5x2 protocol with
/// DTW 1-NN. Returns the ten per-experiment summaries.
pub fn run_ts_experiment<R: Rng + ?Sized>(
    index: &ExprTree,
    dataset: &[LabeledSeries],
    arity: usize,
    rng: &mut R,
) -> Result<Vec<ExperimentRecord>, TsError> {
    let projected = project_all(index, dataset, arity)?;
    let labels: Vec<Label> = projected.iter().map(|s| s.label).collect();
    let splits = cv_5x2(rng, &labels)?;
    evaluate_splits(&projected, &splits)
}
