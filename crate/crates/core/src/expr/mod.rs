//! The expression-tree genotype.
//!
//! An [`ExprTree`] is an index formula: leaves are band reflectances or
//! constants, inner nodes are `+ - * %` and the unary `srt`/`rlog`. All
//! operators are protected, so evaluating any tree on a finite pixel gives a
//! finite number.
//!
//! Node positions are addressed by their preorder index (root = 0), which is
//! what crossover and mutation use to pick and replace subtrees.

use alloc::boxed::Box;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

mod formula;
pub mod ops;
mod program;
mod random;

pub use formula::{canonical_formula, parse_formula, to_formula};
pub use program::{BandColumns, Program};
pub use random::{random_terminal, random_tree, InitMethod, CONST_MAX, CONST_MIN};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ExprError {
    #[error("band index {index} out of range for {arity} bands")]
    BandOutOfRange { index: usize, arity: usize },
    #[error("constant {0} is not finite")]
    NonFiniteConstant(f64),
    #[error("tree depth {depth} exceeds the cap of {cap}")]
    TooDeep { depth: usize, cap: usize },
    #[error("parse error at offset {offset}: {message}")]
    Parse { offset: usize, message: String },
    #[error("unknown band `{name}` at offset {offset}")]
    UnknownBand { name: String, offset: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum UnaryOp {
    /// Protected square root.
    Srt,
    /// Protected natural logarithm.
    Rlog,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BinaryOp {
    Add,
    Sub,
    Mul,
    /// Protected division.
    Pdiv,
}

impl UnaryOp {
    pub const ALL: [UnaryOp; 2] = [UnaryOp::Srt, UnaryOp::Rlog];

    #[inline]
    pub fn apply(self, x: f64) -> f64 {
        match self {
            UnaryOp::Srt => ops::srt(x),
            UnaryOp::Rlog => ops::rlog(x),
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            UnaryOp::Srt => "srt",
            UnaryOp::Rlog => "rlog",
        }
    }
}

impl BinaryOp {
    pub const ALL: [BinaryOp; 4] = [BinaryOp::Add, BinaryOp::Sub, BinaryOp::Mul, BinaryOp::Pdiv];

    #[inline]
    pub fn apply(self, x: f64, y: f64) -> f64 {
        match self {
            BinaryOp::Add => ops::add(x, y),
            BinaryOp::Sub => ops::sub(x, y),
            BinaryOp::Mul => ops::mul(x, y),
            BinaryOp::Pdiv => ops::pdiv(x, y),
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            BinaryOp::Add => "+",
            BinaryOp::Sub => "-",
            BinaryOp::Mul => "*",
            BinaryOp::Pdiv => "%",
        }
    }
}

impl fmt::Display for UnaryOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

impl fmt::Display for BinaryOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ExprTree {
    /// Reflectance of the band at this 0-based schema position.
    Band(usize),
    Const(f64),
    Unary(UnaryOp, Box<ExprTree>),
    Binary(BinaryOp, Box<ExprTree>, Box<ExprTree>),
}

impl ExprTree {
    pub fn band(index: usize) -> Self {
        ExprTree::Band(index)
    }

    pub fn constant(value: f64) -> Self {
        ExprTree::Const(value)
    }

    pub fn unary(op: UnaryOp, child: ExprTree) -> Self {
        ExprTree::Unary(op, Box::new(child))
    }

    pub fn binary(op: BinaryOp, left: ExprTree, right: ExprTree) -> Self {
        ExprTree::Binary(op, Box::new(left), Box::new(right))
    }

    pub fn add(left: ExprTree, right: ExprTree) -> Self {
        Self::binary(BinaryOp::Add, left, right)
    }

    pub fn sub(left: ExprTree, right: ExprTree) -> Self {
        Self::binary(BinaryOp::Sub, left, right)
    }

    pub fn mul(left: ExprTree, right: ExprTree) -> Self {
        Self::binary(BinaryOp::Mul, left, right)
    }

    pub fn pdiv(left: ExprTree, right: ExprTree) -> Self {
        Self::binary(BinaryOp::Pdiv, left, right)
    }

    pub fn srt(child: ExprTree) -> Self {
        Self::unary(UnaryOp::Srt, child)
    }

    pub fn rlog(child: ExprTree) -> Self {
        Self::unary(UnaryOp::Rlog, child)
    }

    pub fn is_leaf(&self) -> bool {
        matches!(self, ExprTree::Band(_) | ExprTree::Const(_))
    }

    /// Evaluates the tree on one pixel. A band index past the end of `pixel`
    /// is an error, never clamped.
    pub fn evaluate(&self, pixel: &[f64]) -> Result<f64, ExprError> {
        Ok(match self {
            ExprTree::Band(i) => *pixel.get(*i).ok_or(ExprError::BandOutOfRange {
                index: *i,
                arity: pixel.len(),
            })?,
            ExprTree::Const(c) => *c,
            ExprTree::Unary(op, child) => op.apply(child.evaluate(pixel)?),
            ExprTree::Binary(op, l, r) => op.apply(l.evaluate(pixel)?, r.evaluate(pixel)?),
        })
    }

    pub fn node_count(&self) -> usize {
        match self {
            ExprTree::Band(_) | ExprTree::Const(_) => 1,
            ExprTree::Unary(_, c) => 1 + c.node_count(),
            ExprTree::Binary(_, l, r) => 1 + l.node_count() + r.node_count(),
        }
    }

    pub fn internal_count(&self) -> usize {
        match self {
            ExprTree::Band(_) | ExprTree::Const(_) => 0,
            ExprTree::Unary(_, c) => 1 + c.internal_count(),
            ExprTree::Binary(_, l, r) => 1 + l.internal_count() + r.internal_count(),
        }
    }

    /// Depth with the root at depth 1.
    pub fn depth(&self) -> usize {
        match self {
            ExprTree::Band(_) | ExprTree::Const(_) => 1,
            ExprTree::Unary(_, c) => 1 + c.depth(),
            ExprTree::Binary(_, l, r) => 1 + l.depth().max(r.depth()),
        }
    }

    pub fn max_band_index(&self) -> Option<usize> {
        self.preorder()
            .filter_map(|n| match n {
                ExprTree::Band(i) => Some(*i),
                _ => None,
            })
            .max()
    }

    /// Checks the structural invariants against a schema arity and depth cap.
    pub fn validate(&self, arity: usize, max_depth: usize) -> Result<(), ExprError> {
        for node in self.preorder() {
            match *node {
                ExprTree::Band(index) if index >= arity => {
                    return Err(ExprError::BandOutOfRange { index, arity })
                }
                ExprTree::Const(c) if !c.is_finite() => {
                    return Err(ExprError::NonFiniteConstant(c))
                }
                _ => {}
            }
        }
        let depth = self.depth();
        if depth > max_depth {
            return Err(ExprError::TooDeep {
                depth,
                cap: max_depth,
            });
        }
        Ok(())
    }

    /// Nodes in preorder (node, then children left to right).
    pub fn preorder(&self) -> Preorder<'_> {
        Preorder {
            stack: alloc::vec![self],
        }
    }

    /// One subtree per inner node, each rooted at that node, in preorder.
    pub fn subtrees(&self) -> Vec<&ExprTree> {
        self.preorder().filter(|n| !n.is_leaf()).collect()
    }

    /// The node at a preorder position.
    pub fn node(&self, index: usize) -> Option<&ExprTree> {
        self.preorder().nth(index)
    }

    /// Depth of the node at a preorder position (root = 1).
    pub fn node_depth(&self, index: usize) -> Option<usize> {
        fn walk(t: &ExprTree, target: usize, next: &mut usize, depth: usize) -> Option<usize> {
            if *next == target {
                return Some(depth);
            }
            *next += 1;
            match t {
                ExprTree::Band(_) | ExprTree::Const(_) => None,
                ExprTree::Unary(_, c) => walk(c, target, next, depth + 1),
                ExprTree::Binary(_, l, r) => {
                    walk(l, target, next, depth + 1).or_else(|| walk(r, target, next, depth + 1))
                }
            }
        }
        walk(self, index, &mut 0, 1)
    }

    /// Returns a copy with the node at `index` replaced by `replacement`.
    /// Returns `None` if `index` is past the last node.
    pub fn with_replaced(&self, index: usize, replacement: ExprTree) -> Option<ExprTree> {
        let mut out = self.clone();
        let slot = out.node_mut(index)?;
        *slot = replacement;
        Some(out)
    }

    fn node_mut(&mut self, index: usize) -> Option<&mut ExprTree> {
        fn walk<'a>(
            t: &'a mut ExprTree,
            target: usize,
            next: &mut usize,
        ) -> Option<&'a mut ExprTree> {
            if *next == target {
                return Some(t);
            }
            *next += 1;
            match t {
                ExprTree::Band(_) | ExprTree::Const(_) => None,
                ExprTree::Unary(_, c) => walk(c, target, next),
                ExprTree::Binary(_, l, r) => {
                    // Skip the left subtree wholesale when the target lies right of it.
                    let left_size = l.node_count();
                    if target < *next + left_size {
                        walk(l, target, next)
                    } else {
                        *next += left_size;
                        walk(r, target, next)
                    }
                }
            }
        }
        walk(self, index, &mut 0)
    }

    /// Picks a node for crossover or mutation: a leaf with probability
    /// `leaf_bias`, otherwise an inner node, uniform within the chosen group.
    /// Trees without inner nodes always yield the root.
    pub fn select_node<R: rand::Rng + ?Sized>(&self, rng: &mut R, leaf_bias: f64) -> usize {
        let mut inner = Vec::new();
        let mut leaves = Vec::new();
        for (i, n) in self.preorder().enumerate() {
            if n.is_leaf() {
                leaves.push(i);
            } else {
                inner.push(i);
            }
        }
        if inner.is_empty() {
            return 0;
        }
        let pick_leaf = rng.gen::<f64>() < leaf_bias;
        let pool = if pick_leaf { &leaves } else { &inner };
        pool[rng.gen_range(0..pool.len())]
    }
}

pub struct Preorder<'a> {
    stack: Vec<&'a ExprTree>,
}

impl<'a> Iterator for Preorder<'a> {
    type Item = &'a ExprTree;

    fn next(&mut self) -> Option<&'a ExprTree> {
        let node = self.stack.pop()?;
        match node {
            ExprTree::Band(_) | ExprTree::Const(_) => {}
            ExprTree::Unary(_, c) => self.stack.push(c),
            ExprTree::Binary(_, l, r) => {
                self.stack.push(r);
                self.stack.push(l);
            }
        }
        Some(node)
    }
}

/// Default probability of choosing a leaf as crossover or mutation point.
pub const LEAF_BIAS: f64 = 0.1;
