//! Structure of learned indices: which bands, operators and subexpressions
//! the best individuals of a population are built from.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::engine::Individual;
use crate::expr::{canonical_formula, ExprTree};
use crate::schema::BandSchema;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AnalysisError {
    #[error("asked for the top {k} of a population of {size}")]
    KTooLarge { k: usize, size: usize },
    #[error("band index {index} is not in schema `{schema}`")]
    ForeignBand { index: usize, schema: String },
    #[error("no individuals to analyze")]
    Empty,
}

/// The `k` fittest individuals; ties go to the smaller tree, then to the
/// earlier position in `population`.
pub fn top_k_individuals(
    population: &[Individual],
    k: usize,
) -> Result<Vec<Individual>, AnalysisError> {
    if k > population.len() {
        return Err(AnalysisError::KTooLarge {
            k,
            size: population.len(),
        });
    }
    let mut order: Vec<usize> = (0..population.len()).collect();
    // Stable sort keeps insertion order among full ties.
    order.sort_by(|&a, &b| {
        let (ia, ib) = (&population[a], &population[b]);
        ib.score()
            .total_cmp(&ia.score())
            .then(ia.tree.node_count().cmp(&ib.tree.node_count()))
    });
    Ok(order
        .into_iter()
        .take(k)
        .map(|i| population[i].clone())
        .collect())
}

fn check_bands(tree: &ExprTree, schema: &BandSchema) -> Result<(), AnalysisError> {
    match tree.max_band_index() {
        Some(index) if index >= schema.arity() => Err(AnalysisError::ForeignBand {
            index,
            schema: schema.sensor().to_string(),
        }),
        _ => Ok(()),
    }
}

/// Occurrences of each band across all trees; repeated uses in one tree
/// each count. Bands that never occur are absent.
pub fn band_histogram<'a>(
    trees: impl IntoIterator<Item = &'a ExprTree>,
    schema: &BandSchema,
) -> Result<BTreeMap<String, usize>, AnalysisError> {
    let mut hist = BTreeMap::new();
    for tree in trees {
        check_bands(tree, schema)?;
        for node in tree.preorder() {
            if let ExprTree::Band(i) = node {
                let name = schema.band_name(*i).expect("checked above");
                *hist.entry(name.to_string()).or_insert(0) += 1;
            }
        }
    }
    Ok(hist)
}

/// Counts every formula element: band names, operator symbols and the
/// canonical text of every subexpression rooted at an inner node.
pub fn element_counts<'a>(
    trees: impl IntoIterator<Item = &'a ExprTree>,
    schema: &BandSchema,
) -> Result<BTreeMap<String, usize>, AnalysisError> {
    let mut counts = BTreeMap::new();
    let mut bump = |key: String| *counts.entry(key).or_insert(0) += 1;
    for tree in trees {
        check_bands(tree, schema)?;
        for node in tree.preorder() {
            match node {
                ExprTree::Band(i) => bump(schema.band_name(*i).expect("checked above").to_string()),
                ExprTree::Const(_) => {}
                ExprTree::Unary(op, _) => {
                    bump(op.symbol().to_string());
                    bump(canonical_formula(node, schema));
                }
                ExprTree::Binary(op, _, _) => {
                    bump(op.symbol().to_string());
                    bump(canonical_formula(node, schema));
                }
            }
        }
    }
    Ok(counts)
}

/// The `top_n` most frequent elements (see [`element_counts`]), ties broken
/// lexicographically.
pub fn element_frequency<'a>(
    trees: impl IntoIterator<Item = &'a ExprTree>,
    schema: &BandSchema,
    top_n: usize,
) -> Result<Vec<(String, usize)>, AnalysisError> {
    let mut trees = trees.into_iter().peekable();
    if trees.peek().is_none() {
        return Err(AnalysisError::Empty);
    }
    let mut ranked: Vec<(String, usize)> = element_counts(trees, schema)?.into_iter().collect();
    ranked.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    ranked.truncate(top_n);
    Ok(ranked)
}
