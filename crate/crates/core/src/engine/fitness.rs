use alloc::vec::Vec;

use crate::dataset::{DatasetError, Label, PixelDataset};
use crate::expr::{BandColumns, ExprTree, Program};

/// Score given to a perfect separation: both classes collapse to distinct
/// points.
pub const FITNESS_CAP: f64 = 1e12;

const DEGENERATE_TOL: f64 = 1e-12;

/// Mean and population standard deviation.
pub(crate) fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    (mean, libm::sqrt(var))
}

/// Separability of two projected classes: `|mean_a - mean_b| / max(sd_a, sd_b)`
/// with population standard deviations.
///
/// Degenerate cases: zero spread with distinct means scores
/// [`FITNESS_CAP`]; zero spread with equal means, and any non-finite
/// statistic, score 0.
///
/// # Panics
///
/// If either class is empty.
pub fn separability(class_a: &[f64], class_b: &[f64]) -> f64 {
    assert!(
        !class_a.is_empty() && !class_b.is_empty(),
        "both classes need samples"
    );
    let (mu_a, sd_a) = mean_std(class_a);
    let (mu_b, sd_b) = mean_std(class_b);
    if ![mu_a, mu_b, sd_a, sd_b].iter().all(|v| v.is_finite()) {
        return 0.0;
    }
    let gap = libm::fabs(mu_a - mu_b);
    let spread = sd_a.max(sd_b);
    if spread <= DEGENERATE_TOL {
        return if gap > DEGENERATE_TOL {
            FITNESS_CAP
        } else {
            0.0
        };
    }
    let s = gap / spread;
    if s.is_finite() {
        s.min(FITNESS_CAP)
    } else {
        0.0
    }
}

/// Fitness of `tree` on `data`. Larger is better; always in `[0, 1e12]`.
pub fn fitness(tree: &ExprTree, data: &PixelDataset) -> Result<f64, DatasetError> {
    FitnessContext::new(data)?.score(tree)
}

/// A dataset laid out for scoring many trees.
#[derive(Debug, Clone)]
pub struct FitnessContext {
    columns: BandColumns,
    labels: Vec<Label>,
    arity: usize,
    buf_a: Vec<f64>,
    buf_b: Vec<f64>,
}

impl FitnessContext {
    pub fn new(data: &PixelDataset) -> Result<Self, DatasetError> {
        data.require_both_classes()?;
        Ok(FitnessContext {
            columns: data.columns(),
            labels: data.labels().to_vec(),
            arity: data.schema().arity(),
            buf_a: Vec::new(),
            buf_b: Vec::new(),
        })
    }

    pub fn score(&mut self, tree: &ExprTree) -> Result<f64, DatasetError> {
        let projected = Program::compile(tree, self.arity)?.eval_columns(&self.columns);
        self.buf_a.clear();
        self.buf_b.clear();
        for (&v, &l) in projected.iter().zip(&self.labels) {
            match l {
                Label::A => self.buf_a.push(v),
                Label::B => self.buf_b.push(v),
            }
        }
        Ok(separability(&self.buf_a, &self.buf_b))
    }
}
