use rand::Rng;

use super::Individual;
use crate::expr::{random_tree, ExprTree, InitMethod, LEAF_BIAS};

const MUTATION_ATTEMPTS: usize = 10;

/// Samples `k` individuals uniformly with replacement and returns the first
/// one with the highest fitness among them.
///
/// # Panics
///
/// If `population` is empty or `k` is zero.
pub fn tournament_select<'p, R: Rng + ?Sized>(
    rng: &mut R,
    population: &'p [Individual],
    k: usize,
) -> &'p Individual {
    assert!(!population.is_empty(), "empty population");
    assert!(k >= 1, "tournament size must be at least 1");
    let mut best = &population[rng.gen_range(0..population.len())];
    for _ in 1..k {
        let cand = &population[rng.gen_range(0..population.len())];
        if cand.score() > best.score() {
            best = cand;
        }
    }
    best
}

/// Swaps a randomly chosen subtree of each parent. A child deeper than
/// `max_depth` is replaced by a copy of the parent it came from.
pub fn crossover<R: Rng + ?Sized>(
    rng: &mut R,
    p1: &ExprTree,
    p2: &ExprTree,
    max_depth: usize,
) -> (ExprTree, ExprTree) {
    let i = p1.select_node(rng, LEAF_BIAS);
    let j = p2.select_node(rng, LEAF_BIAS);
    crossover_at(p1, i, p2, j, max_depth)
}

/// Crossover at fixed preorder positions `i` of `p1` and `j` of `p2`.
///
/// # Panics
///
/// If either position is past the end of its tree.
pub fn crossover_at(
    p1: &ExprTree,
    i: usize,
    p2: &ExprTree,
    j: usize,
    max_depth: usize,
) -> (ExprTree, ExprTree) {
    let s1 = p1.node(i).expect("crossover point in p1").clone();
    let s2 = p2.node(j).expect("crossover point in p2").clone();
    let c1 = p1.with_replaced(i, s2).expect("crossover point in p1");
    let c2 = p2.with_replaced(j, s1).expect("crossover point in p2");
    let c1 = if c1.depth() > max_depth {
        p1.clone()
    } else {
        c1
    };
    let c2 = if c2.depth() > max_depth {
        p2.clone()
    } else {
        c2
    };
    (c1, c2)
}

/// Replaces one node with a fresh grow-method subtree of depth at most
/// `subtree_max_depth`. Retries up to 10 replacements that respect
/// `max_depth`, then gives up and returns the input unchanged.
pub fn mutate<R: Rng + ?Sized>(
    rng: &mut R,
    tree: &ExprTree,
    arity: usize,
    subtree_max_depth: usize,
    max_depth: usize,
) -> ExprTree {
    let at = tree.select_node(rng, LEAF_BIAS);
    let above = tree.node_depth(at).expect("selected node exists") - 1;
    for _ in 0..MUTATION_ATTEMPTS {
        let sub = random_tree(rng, arity, subtree_max_depth, InitMethod::Grow);
        if above + sub.depth() <= max_depth {
            return tree.with_replaced(at, sub).expect("selected node exists");
        }
    }
    tree.clone()
}
