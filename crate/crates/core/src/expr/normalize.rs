//! Canonical form for expressions.
//!
//! Sums and products are flattened and their operands sorted by the derived
//! total order on trees; literal constants inside a chain are folded together.
//! A maximal constant-only subtree whose size estimate is below
//! [`COLLAPSE_THRESHOLD_BITS`] and whose value is nonnegative is replaced by
//! its value. Constant-only subtrees above the threshold keep their shape.

use num_bigint::BigUint;
use num_traits::{One, Zero};

use super::eval::{estimate, eval};
use super::Expr;

pub const COLLAPSE_THRESHOLD_BITS: u64 = 64;

pub fn normalize(e: &Expr) -> Expr {
    norm(e, true)
}

/// True iff both expressions have identical normal forms.
pub fn structurally_equal(a: &Expr, b: &Expr) -> bool {
    normalize(a) == normalize(b)
}

fn norm(e: &Expr, mut fold: bool) -> Expr {
    if fold && !matches!(e, Expr::Const(_)) && e.is_closed() {
        match estimate(e) {
            Ok(bits) if bits < COLLAPSE_THRESHOLD_BITS => {
                if let Ok(v) = eval(e, COLLAPSE_THRESHOLD_BITS) {
                    if let Some(v) = v.to_biguint() {
                        return Expr::Const(v);
                    }
                }
            }
            // Too big to fold here; the whole tower keeps its shape.
            _ => fold = false,
        }
    }
    match e {
        Expr::Const(_) | Expr::Var(_) => e.clone(),
        Expr::Fact(c) => Expr::Fact(Box::new(norm(c, fold))),
        Expr::Pow(b, x) => Expr::Pow(Box::new(norm(b, fold)), Box::new(norm(x, fold))),
        Expr::Sub(l, r) => Expr::Sub(Box::new(norm(l, fold)), Box::new(norm(r, fold))),
        Expr::Add(..) => chain(e, fold, Chain::Add),
        Expr::Mul(..) => chain(e, fold, Chain::Mul),
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Chain {
    Add,
    Mul,
}

impl Chain {
    fn split(self, e: &Expr) -> Option<(&Expr, &Expr)> {
        match (self, e) {
            (Chain::Add, Expr::Add(l, r)) | (Chain::Mul, Expr::Mul(l, r)) => Some((l, r)),
            _ => None,
        }
    }

    fn join(self, l: Expr, r: Expr) -> Expr {
        match self {
            Chain::Add => l + r,
            Chain::Mul => l * r,
        }
    }

    fn identity(self) -> BigUint {
        match self {
            Chain::Add => BigUint::zero(),
            Chain::Mul => BigUint::one(),
        }
    }
}

fn chain(e: &Expr, fold: bool, op: Chain) -> Expr {
    let mut raw = Vec::new();
    collect(e, op, &mut raw);

    let mut operands = Vec::with_capacity(raw.len());
    for operand in raw {
        let normalized = norm(operand, fold);
        // Normalizing an operand can expose another chain of the same kind.
        let mut flat = Vec::new();
        collect(&normalized, op, &mut flat);
        operands.extend(flat.into_iter().cloned());
    }

    if fold {
        let mut literal: Option<BigUint> = None;
        operands.retain(|o| match o {
            Expr::Const(v) => {
                literal = Some(match (literal.take(), op) {
                    (None, _) => v.clone(),
                    (Some(acc), Chain::Add) => acc + v,
                    (Some(acc), Chain::Mul) => acc * v,
                });
                false
            }
            _ => true,
        });
        if let Some(v) = literal {
            if v != op.identity() || operands.is_empty() {
                operands.push(Expr::Const(v));
            }
        }
    }

    operands.sort();
    let mut it = operands.into_iter();
    let first = it.next().expect("chains have at least one operand");
    it.fold(first, |acc, next| op.join(acc, next))
}

fn collect<'a>(e: &'a Expr, op: Chain, out: &mut Vec<&'a Expr>) {
    match op.split(e) {
        Some((l, r)) => {
            collect(l, op, out);
            collect(r, op, out);
        }
        None => out.push(e),
    }
}
