use rand::Rng;

use super::{BinaryOp, ExprTree, UnaryOp};

/// Ephemeral constants are drawn uniformly from `[CONST_MIN, CONST_MAX]`.
pub const CONST_MIN: f64 = 0.0;
pub const CONST_MAX: f64 = 1000.0;

const N_FUNCTIONS: usize = UnaryOp::ALL.len() + BinaryOp::ALL.len();

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InitMethod {
    /// Leaves may appear at any depth.
    Grow,
    /// Every leaf sits exactly at the maximum depth.
    Full,
}

/// A band terminal or a fresh ephemeral constant. Each band and the constant
/// generator are equally likely.
pub fn random_terminal<R: Rng + ?Sized>(rng: &mut R, arity: usize) -> ExprTree {
    let pick = rng.gen_range(0..=arity);
    if pick < arity {
        ExprTree::Band(pick)
    } else {
        ExprTree::Const(rng.gen_range(CONST_MIN..=CONST_MAX))
    }
}

fn random_function<R: Rng + ?Sized>(
    rng: &mut R,
    arity: usize,
    depth_left: usize,
    method: InitMethod,
) -> ExprTree {
    let pick = rng.gen_range(0..N_FUNCTIONS);
    if pick < UnaryOp::ALL.len() {
        let op = UnaryOp::ALL[pick];
        ExprTree::unary(op, build(rng, arity, depth_left - 1, method))
    } else {
        let op = BinaryOp::ALL[pick - UnaryOp::ALL.len()];
        let left = build(rng, arity, depth_left - 1, method);
        let right = build(rng, arity, depth_left - 1, method);
        ExprTree::binary(op, left, right)
    }
}

fn build<R: Rng + ?Sized>(
    rng: &mut R,
    arity: usize,
    depth_left: usize,
    method: InitMethod,
) -> ExprTree {
    if depth_left <= 1 {
        return random_terminal(rng, arity);
    }
    match method {
        InitMethod::Full => random_function(rng, arity, depth_left, method),
        InitMethod::Grow => {
            // Uniform over the primitive set: every function, every band and
            // the constant generator.
            let n_terminals = arity + 1;
            if rng.gen_range(0..N_FUNCTIONS + n_terminals) < n_terminals {
                random_terminal(rng, arity)
            } else {
                random_function(rng, arity, depth_left, method)
            }
        }
    }
}

/// Generates a random tree over `arity` bands with depth at most `max_depth`.
///
/// # Panics
///
/// If `max_depth` is zero or `arity` is zero.
pub fn random_tree<R: Rng + ?Sized>(
    rng: &mut R,
    arity: usize,
    max_depth: usize,
    method: InitMethod,
) -> ExprTree {
    assert!(max_depth >= 1, "max_depth must be at least 1");
    assert!(arity >= 1, "need at least one band");
    build(rng, arity, max_depth, method)
}
