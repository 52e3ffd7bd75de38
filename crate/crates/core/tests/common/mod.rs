#![allow(dead_code)]

use proptest::prelude::*;
use specgp_core::expr::{random_tree, InitMethod};
use specgp_core::{seeded_rng, BinaryOp, ExprTree, UnaryOp};

/// Trees over `arity` bands with arbitrary finite constants, up to roughly
/// `depth` levels.
pub fn arb_tree(arity: usize, depth: u32) -> impl Strategy<Value = ExprTree> {
    let leaf = prop_oneof![
        (0..arity).prop_map(ExprTree::band),
        prop_oneof![
            -1e3..1e3f64,
            any::<f64>().prop_filter("finite", |c| c.is_finite()),
            Just(0.0),
            Just(1e-13),
        ]
        .prop_map(ExprTree::constant),
    ];
    leaf.prop_recursive(depth, 64, 2, |inner| {
        prop_oneof![
            (prop::sample::select(UnaryOp::ALL.to_vec()), inner.clone())
                .prop_map(|(op, c)| ExprTree::unary(op, c)),
            (
                prop::sample::select(BinaryOp::ALL.to_vec()),
                inner.clone(),
                inner
            )
                .prop_map(|(op, l, r)| ExprTree::binary(op, l, r)),
        ]
    })
}

/// Trees drawn the way the engine draws them.
pub fn engine_tree(arity: usize, max_depth: usize) -> impl Strategy<Value = ExprTree> {
    (any::<u64>(), 1..=max_depth, any::<bool>()).prop_map(move |(seed, depth, full)| {
        let method = if full {
            InitMethod::Full
        } else {
            InitMethod::Grow
        };
        random_tree(&mut seeded_rng(seed), arity, depth, method)
    })
}

/// Pixels mixing ordinary reflectances with values that stress the
/// protected operators.
pub fn arb_pixel(arity: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(
        prop_oneof![
            4 => -1.0..1.0f64,
            1 => Just(0.0),
            1 => -1e300..1e300f64,
            1 => -1e-300..1e-300f64,
        ],
        arity,
    )
}

/// Average ranks of `xs`, computed by counting rather than sorting.
pub fn naive_ranks(xs: &[f64]) -> Vec<f64> {
    xs.iter()
        .map(|&x| {
            let below = xs.iter().filter(|&&y| y < x).count() as f64;
            let equal = xs.iter().filter(|&&y| y == x).count() as f64;
            below + (equal + 1.0) / 2.0
        })
        .collect()
}
