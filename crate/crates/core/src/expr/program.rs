//! Column-wise evaluation of a tree over many pixels at once.
//!
//! The tree is flattened to postfix instructions, and each instruction runs
//! over a whole column of pixel values. Results are bit-identical to
//! [`ExprTree::evaluate`] applied pixel by pixel.

use alloc::vec;
use alloc::vec::Vec;

use super::{BinaryOp, ExprError, ExprTree, UnaryOp};

/// Band-major pixel storage: `column(b)[i]` is band `b` of pixel `i`.
#[derive(Debug, Clone, PartialEq)]
pub struct BandColumns {
    columns: Vec<Vec<f64>>,
    len: usize,
}

impl BandColumns {
    /// Transposes row-major pixels. All rows must have `arity` values.
    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R], arity: usize) -> Self {
        let mut columns = vec![Vec::with_capacity(rows.len()); arity];
        for row in rows {
            let row = row.as_ref();
            assert_eq!(
                row.len(),
                arity,
                "pixel has {} bands, expected {arity}",
                row.len()
            );
            for (col, &v) in columns.iter_mut().zip(row) {
                col.push(v);
            }
        }
        BandColumns {
            columns,
            len: rows.len(),
        }
    }

    pub fn arity(&self) -> usize {
        self.columns.len()
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn column(&self, band: usize) -> &[f64] {
        &self.columns[band]
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Instr {
    Band(usize),
    Const(f64),
    Unary(UnaryOp),
    Binary(BinaryOp),
}

/// A tree compiled for batch evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct Program {
    code: Vec<Instr>,
    max_stack: usize,
}

impl Program {
    /// Compiles `tree`, checking every band index against `arity`.
    pub fn compile(tree: &ExprTree, arity: usize) -> Result<Self, ExprError> {
        fn emit(t: &ExprTree, arity: usize, code: &mut Vec<Instr>) -> Result<(), ExprError> {
            match t {
                ExprTree::Band(i) if *i >= arity => {
                    return Err(ExprError::BandOutOfRange { index: *i, arity })
                }
                ExprTree::Band(i) => code.push(Instr::Band(*i)),
                ExprTree::Const(c) => code.push(Instr::Const(*c)),
                ExprTree::Unary(op, c) => {
                    emit(c, arity, code)?;
                    code.push(Instr::Unary(*op));
                }
                ExprTree::Binary(op, l, r) => {
                    emit(l, arity, code)?;
                    emit(r, arity, code)?;
                    code.push(Instr::Binary(*op));
                }
            }
            Ok(())
        }
        let mut code = Vec::with_capacity(tree.node_count());
        emit(tree, arity, &mut code)?;
        let mut depth = 0usize;
        let mut max_stack = 0usize;
        for ins in &code {
            match ins {
                Instr::Band(_) | Instr::Const(_) => depth += 1,
                Instr::Unary(_) => {}
                Instr::Binary(_) => depth -= 1,
            }
            max_stack = max_stack.max(depth);
        }
        Ok(Program { code, max_stack })
    }

    /// Projects every pixel in `data` through the compiled tree.
    ///
    /// # Panics
    ///
    /// If `data` has fewer bands than the program was compiled for.
    pub fn eval_columns(&self, data: &BandColumns) -> Vec<f64> {
        let n = data.len();
        let mut stack: Vec<Vec<f64>> = Vec::with_capacity(self.max_stack);
        let mut pool: Vec<Vec<f64>> = Vec::new();
        let fresh = |pool: &mut Vec<Vec<f64>>| {
            let mut v = pool.pop().unwrap_or_default();
            v.clear();
            v
        };
        for ins in &self.code {
            match *ins {
                Instr::Band(b) => {
                    let mut v = fresh(&mut pool);
                    v.extend_from_slice(data.column(b));
                    stack.push(v);
                }
                Instr::Const(c) => {
                    let mut v = fresh(&mut pool);
                    v.resize(n, c);
                    stack.push(v);
                }
                Instr::Unary(op) => {
                    let top = stack.last_mut().expect("stack underflow");
                    for x in top.iter_mut() {
                        *x = op.apply(*x);
                    }
                }
                Instr::Binary(op) => {
                    let right = stack.pop().expect("stack underflow");
                    let left = stack.last_mut().expect("stack underflow");
                    match op {
                        BinaryOp::Add => zip_apply(left, &right, super::ops::add),
                        BinaryOp::Sub => zip_apply(left, &right, super::ops::sub),
                        BinaryOp::Mul => zip_apply(left, &right, super::ops::mul),
                        BinaryOp::Pdiv => zip_apply(left, &right, super::ops::pdiv),
                    }
                    pool.push(right);
                }
            }
        }
        stack.pop().unwrap_or_default()
    }
}

#[inline]
fn zip_apply(left: &mut [f64], right: &[f64], f: impl Fn(f64, f64) -> f64) {
    for (l, &r) in left.iter_mut().zip(right) {
        *l = f(*l, r);
    }
}
