//! Classification in index space: nearest centroid labels, logistic
//! confidence scores and accuracy summaries.

use alloc::vec::Vec;

use crate::dataset::{DatasetError, Label, PixelDataset};
use crate::expr::ExprTree;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ClassifyError {
    #[error(transparent)]
    Dataset(#[from] DatasetError),
    #[error("label vectors differ in length: {predicted} predicted vs {truth} true")]
    LengthMismatch { predicted: usize, truth: usize },
    #[error("projections and labels differ in length: {values} vs {labels}")]
    ProjectionMismatch { values: usize, labels: usize },
}

/// Per-class mean index value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Centroids {
    pub means: [f64; 2],
}

impl Centroids {
    /// Fits centroids directly from projected values.
    pub fn from_projections(values: &[f64], labels: &[Label]) -> Result<Self, ClassifyError> {
        if values.len() != labels.len() {
            return Err(ClassifyError::ProjectionMismatch {
                values: values.len(),
                labels: labels.len(),
            });
        }
        let mut sums = [0.0; 2];
        let mut counts = [0usize; 2];
        for (&v, &l) in values.iter().zip(labels) {
            sums[l.index()] += v;
            counts[l.index()] += 1;
        }
        for l in Label::BOTH {
            if counts[l.index()] == 0 {
                return Err(DatasetError::MissingClass(l).into());
            }
        }
        Ok(Centroids {
            means: [sums[0] / counts[0] as f64, sums[1] / counts[1] as f64],
        })
    }

    /// Nearest centroid by absolute distance; an exact tie goes to class A.
    pub fn predict_value(&self, value: f64) -> Label {
        let da = libm::fabs(value - self.means[0]);
        let db = libm::fabs(value - self.means[1]);
        if db < da {
            Label::B
        } else {
            Label::A
        }
    }

    pub fn predict_values(&self, values: &[f64]) -> Vec<Label> {
        values.iter().map(|&v| self.predict_value(v)).collect()
    }
}

/// Projects the training pixels through `index` and fits class centroids.
pub fn ncc_fit(train: &PixelDataset, index: &ExprTree) -> Result<Centroids, ClassifyError> {
    let values = train.project(index)?;
    Centroids::from_projections(&values, train.labels())
}

/// Labels each pixel by its nearest centroid in index space.
pub fn ncc_predict(
    centroids: &Centroids,
    index: &ExprTree,
    pixels: &PixelDataset,
) -> Result<Vec<Label>, ClassifyError> {
    Ok(centroids.predict_values(&pixels.project(index)?))
}

const LOGIT_MAX_ITER: usize = 100;
const LOGIT_TOL: f64 = 1e-8;
/// Bound on |intercept| and |slope|; reached only under (near) separation.
pub const LOGIT_BETA_CAP: f64 = 30.0;

/// One-feature logistic regression `P(B | x) = 1 / (1 + exp(-(b0 + b1 x)))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogisticModel {
    pub intercept: f64,
    pub slope: f64,
    pub iterations: usize,
    pub converged: bool,
    /// A coefficient hit the cap, which happens when the classes are
    /// (almost) perfectly separated.
    pub capped: bool,
}

fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + libm::exp(-z))
    } else {
        let e = libm::exp(z);
        e / (1.0 + e)
    }
}

impl LogisticModel {
    /// Fits by iteratively reweighted least squares starting from zero.
    pub fn fit(values: &[f64], labels: &[Label]) -> Result<Self, ClassifyError> {
        if values.len() != labels.len() {
            return Err(ClassifyError::ProjectionMismatch {
                values: values.len(),
                labels: labels.len(),
            });
        }
        for l in Label::BOTH {
            if !labels.contains(&l) {
                return Err(DatasetError::MissingClass(l).into());
            }
        }
        let mut b0 = 0.0f64;
        let mut b1 = 0.0f64;
        let mut converged = false;
        let mut capped = false;
        let mut iterations = 0;
        while iterations < LOGIT_MAX_ITER {
            iterations += 1;
            // Gradient g and Hessian H of the log-likelihood.
            let (mut g0, mut g1) = (0.0, 0.0);
            let (mut h00, mut h01, mut h11) = (0.0, 0.0, 0.0);
            for (&x, &l) in values.iter().zip(labels) {
                let p = sigmoid(b0 + b1 * x);
                let y = l.index() as f64;
                let w = p * (1.0 - p);
                g0 += y - p;
                g1 += (y - p) * x;
                h00 += w;
                h01 += w * x;
                h11 += w * x * x;
            }
            let det = h00 * h11 - h01 * h01;
            if !(det.is_finite() && det > 1e-300) {
                break;
            }
            let d0 = (h11 * g0 - h01 * g1) / det;
            let d1 = (h00 * g1 - h01 * g0) / det;
            let n0 = (b0 + d0).clamp(-LOGIT_BETA_CAP, LOGIT_BETA_CAP);
            let n1 = (b1 + d1).clamp(-LOGIT_BETA_CAP, LOGIT_BETA_CAP);
            capped = libm::fabs(n0) >= LOGIT_BETA_CAP || libm::fabs(n1) >= LOGIT_BETA_CAP;
            let change = libm::fabs(n0 - b0).max(libm::fabs(n1 - b1));
            b0 = n0;
            b1 = n1;
            if change < LOGIT_TOL {
                converged = true;
                break;
            }
        }
        Ok(LogisticModel {
            intercept: b0,
            slope: b1,
            iterations,
            converged,
            capped,
        })
    }

    /// `P(class B | x)`.
    pub fn probability(&self, x: f64) -> f64 {
        sigmoid(self.intercept + self.slope * x)
    }
}

/// Confidence of a probabilistic prediction: `max(p, 1 - p)`, so 0.5 is
/// total uncertainty.
pub fn confidence(p: f64) -> f64 {
    p.max(1.0 - p)
}

/// Logistic model fitted on training projections plus `P(B | x)` for each
/// evaluation projection.
pub fn confidence_scores(
    train_values: &[f64],
    train_labels: &[Label],
    eval_values: &[f64],
) -> Result<(LogisticModel, Vec<f64>), ClassifyError> {
    let model = LogisticModel::fit(train_values, train_labels)?;
    let probs = eval_values.iter().map(|&x| model.probability(x)).collect();
    Ok((model, probs))
}

/// Producer's, user's and normalized accuracy of a binary prediction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConfusionSummary {
    /// `counts[truth][predicted]`.
    pub counts: [[usize; 2]; 2],
    /// Per-class recall; `None` when the class is absent from the truth.
    pub producer: [Option<f64>; 2],
    /// Per-class precision; `None` when the class is never predicted.
    pub user: [Option<f64>; 2],
    /// Mean of the defined producer accuracies; `None` with no samples.
    pub normalized: Option<f64>,
}

impl ConfusionSummary {
    pub fn total(&self) -> usize {
        self.counts.iter().flatten().sum()
    }

    /// Fraction of all samples classified correctly.
    pub fn overall(&self) -> Option<f64> {
        let total = self.total();
        (total > 0).then(|| (self.counts[0][0] + self.counts[1][1]) as f64 / total as f64)
    }
}

pub fn confusion(predicted: &[Label], truth: &[Label]) -> Result<ConfusionSummary, ClassifyError> {
    if predicted.len() != truth.len() {
        return Err(ClassifyError::LengthMismatch {
            predicted: predicted.len(),
            truth: truth.len(),
        });
    }
    let mut counts = [[0usize; 2]; 2];
    for (&p, &t) in predicted.iter().zip(truth) {
        counts[t.index()][p.index()] += 1;
    }
    let ratio = |num: usize, den: usize| (den > 0).then(|| num as f64 / den as f64);
    let producer = [0, 1].map(|c| ratio(counts[c][c], counts[c][0] + counts[c][1]));
    let user = [0, 1].map(|c| ratio(counts[c][c], counts[0][c] + counts[1][c]));
    let defined: Vec<f64> = producer.iter().flatten().copied().collect();
    let normalized =
        (!defined.is_empty()).then(|| defined.iter().sum::<f64>() / defined.len() as f64);
    Ok(ConfusionSummary {
        counts,
        producer,
        user,
        normalized,
    })
}
