//! Labeled pixel samples.

use alloc::vec::Vec;
use core::fmt;

use crate::expr::{BandColumns, ExprError, ExprTree, Program};
use crate::schema::BandSchema;

/// One of the two classes of a binary problem.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Label {
    A,
    B,
}

impl Label {
    pub const BOTH: [Label; 2] = [Label::A, Label::B];

    pub fn index(self) -> usize {
        match self {
            Label::A => 0,
            Label::B => 1,
        }
    }

    pub fn from_index(i: usize) -> Option<Label> {
        match i {
            0 => Some(Label::A),
            1 => Some(Label::B),
            _ => None,
        }
    }

    pub fn other(self) -> Label {
        match self {
            Label::A => Label::B,
            Label::B => Label::A,
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.index())
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum DatasetError {
    #[error("sample {row} has {got} bands, schema expects {expected}")]
    Arity {
        row: usize,
        got: usize,
        expected: usize,
    },
    #[error("sample {row} has a non-finite band value")]
    NonFinite { row: usize },
    #[error("class {0} has no samples; both classes are required")]
    MissingClass(Label),
    #[error("class {label} needs at least {needed} samples, found {found}")]
    TooFewInClass {
        label: Label,
        needed: usize,
        found: usize,
    },
    #[error("dataset is empty")]
    Empty,
    #[error(transparent)]
    Expr(#[from] ExprError),
}

/// Labeled multispectral pixels under one schema.
#[derive(Debug, Clone, PartialEq)]
pub struct PixelDataset {
    schema: BandSchema,
    pixels: Vec<Vec<f64>>,
    labels: Vec<Label>,
}

impl PixelDataset {
    /// Validates arity and finiteness of every sample.
    pub fn new(schema: BandSchema, samples: Vec<(Vec<f64>, Label)>) -> Result<Self, DatasetError> {
        let arity = schema.arity();
        let mut pixels = Vec::with_capacity(samples.len());
        let mut labels = Vec::with_capacity(samples.len());
        for (row, (px, label)) in samples.into_iter().enumerate() {
            if px.len() != arity {
                return Err(DatasetError::Arity {
                    row,
                    got: px.len(),
                    expected: arity,
                });
            }
            if px.iter().any(|v| !v.is_finite()) {
                return Err(DatasetError::NonFinite { row });
            }
            pixels.push(px);
            labels.push(label);
        }
        Ok(PixelDataset {
            schema,
            pixels,
            labels,
        })
    }

    pub fn schema(&self) -> &BandSchema {
        &self.schema
    }

    pub fn len(&self) -> usize {
        self.pixels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pixels.is_empty()
    }

    pub fn pixels(&self) -> &[Vec<f64>] {
        &self.pixels
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    pub fn class_count(&self, label: Label) -> usize {
        self.labels.iter().filter(|&&l| l == label).count()
    }

    /// Errors unless both classes have at least one sample.
    pub fn require_both_classes(&self) -> Result<(), DatasetError> {
        for label in Label::BOTH {
            if self.class_count(label) == 0 {
                return Err(DatasetError::MissingClass(label));
            }
        }
        Ok(())
    }

    pub fn columns(&self) -> BandColumns {
        BandColumns::from_rows(&self.pixels, self.schema.arity())
    }

    /// Index value of every sample.
    pub fn project(&self, index: &ExprTree) -> Result<Vec<f64>, DatasetError> {
        let program = Program::compile(index, self.schema.arity())?;
        Ok(program.eval_columns(&self.columns()))
    }

    /// Keeps the samples whose position satisfies `keep`.
    pub fn filter_by_position(&self, mut keep: impl FnMut(usize) -> bool) -> PixelDataset {
        let (pixels, labels) = self
            .pixels
            .iter()
            .zip(&self.labels)
            .enumerate()
            .filter(|(i, _)| keep(*i))
            .map(|(_, (p, l))| (p.clone(), *l))
            .unzip();
        PixelDataset {
            schema: self.schema.clone(),
            pixels,
            labels,
        }
    }
}
