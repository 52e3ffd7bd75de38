mod common;

use std::collections::BTreeMap;

use common::arb_tree;
use proptest::prelude::*;
use specgp_core::analysis::{band_histogram, element_counts, top_k_individuals};
use specgp_core::engine::Individual;
use specgp_core::{BandSchema, ExprTree};

fn merged(a: &BTreeMap<String, usize>, b: &BTreeMap<String, usize>) -> BTreeMap<String, usize> {
    let mut out = a.clone();
    for (k, v) in b {
        *out.entry(k.clone()).or_insert(0) += v;
    }
    out
}

/// Band leaves found by plain recursion.
fn leaf_bands(t: &ExprTree, out: &mut usize) {
    match t {
        ExprTree::Band(_) => *out += 1,
        ExprTree::Const(_) => {}
        ExprTree::Unary(_, c) => leaf_bands(c, out),
        ExprTree::Binary(_, l, r) => {
            leaf_bands(l, out);
            leaf_bands(r, out);
        }
    }
}

proptest! {
    #[test]
    fn counts_are_additive(xs in prop::collection::vec(arb_tree(6, 5), 0..5), ys in prop::collection::vec(arb_tree(6, 5), 0..5)) {
        let s = BandSchema::landsat();
        let both: Vec<&ExprTree> = xs.iter().chain(&ys).collect();
        prop_assert_eq!(
            element_counts(both.iter().copied(), &s).unwrap(),
            merged(&element_counts(&xs, &s).unwrap(), &element_counts(&ys, &s).unwrap())
        );
        prop_assert_eq!(
            band_histogram(both.iter().copied(), &s).unwrap(),
            merged(&band_histogram(&xs, &s).unwrap(), &band_histogram(&ys, &s).unwrap())
        );
    }

    #[test]
    fn histogram_totals_match_leaf_walk(trees in prop::collection::vec(arb_tree(6, 6), 1..6)) {
        let s = BandSchema::landsat();
        let h = band_histogram(&trees, &s).unwrap();
        let mut n = 0;
        trees.iter().for_each(|t| leaf_bands(t, &mut n));
        prop_assert_eq!(h.values().sum::<usize>(), n);
        prop_assert!(h.keys().all(|k| s.index_of(k).is_some()));
    }

    #[test]
    fn top_k_is_sorted(fits in prop::collection::vec(-5.0..5.0f64, 1..30), k in 1usize..30) {
        let pop: Vec<Individual> = fits.iter().map(|&f| Individual::evaluated(ExprTree::band(0), f)).collect();
        let k = k.min(pop.len());
        let top = top_k_individuals(&pop, k).unwrap();
        prop_assert_eq!(top.len(), k);
        prop_assert!(top.windows(2).all(|w| w[0].score() >= w[1].score()));
        let mut sorted = fits.clone();
        sorted.sort_by(|a, b| b.total_cmp(a));
        prop_assert_eq!(top.iter().map(|i| i.score()).collect::<Vec<_>>(), sorted[..k].to_vec());
    }
}
