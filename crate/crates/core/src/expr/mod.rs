//! Factorial-power expressions over the variables `k` and `n`.
//!
//! An [`Expr`] is built from nonnegative integer literals, the two variables,
//! postfix factorial, exponentiation, sums, differences and products. Values
//! are exact signed integers; nothing in this module rounds.

pub(crate) mod eval;
mod normalize;
mod parse;

use std::fmt;
use std::ops;

use num_bigint::BigUint;
use thiserror::Error;

pub use eval::{estimate_bits, eval_exact, SizeEstimate, DEFAULT_EXACT_BUDGET_BITS};
pub use normalize::{normalize, structurally_equal, COLLAPSE_THRESHOLD_BITS};
pub use parse::{parse_expr, parse_expr_with_aux};

/// Signed exact value of a closed expression.
pub type IntValue = num_bigint::BigInt;

/// A free variable.
///
/// `J` is the auxiliary index used by catalog entries that quantify over an
/// extra integer range; the public grammar only accepts `k` and `n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Var {
    K,
    N,
    J,
}

impl Var {
    pub fn name(self) -> &'static str {
        match self {
            Var::K => "k",
            Var::N => "n",
            Var::J => "j",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Expr {
    Const(BigUint),
    Var(Var),
    Fact(Box<Expr>),
    Pow(Box<Expr>, Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExprError {
    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("unknown identifier `{name}` at byte {offset}")]
    UnknownIdentifier { offset: usize, name: String },
    #[error("variable `{}` has no value in this binding", .0.name())]
    UnboundVariable(Var),
    #[error("binding values must be positive integers (got k={k}, n={n})")]
    InvalidBinding { k: u64, n: u64 },
    #[error(
        "evaluation of `{subtree}` refused: estimated {estimate_bits} bits exceeds the budget of {budget_bits} bits"
    )]
    BudgetExceeded {
        subtree: Box<Expr>,
        estimate_bits: u64,
        budget_bits: u64,
    },
    #[error("factorial of a negative value")]
    NegativeFactorial,
    #[error("negative exponent")]
    NegativeExponent,
    #[error("size estimate exceeds the representable range")]
    EstimateOverflow,
    #[error("exponent or factorial argument `{0}` is too large to evaluate exactly")]
    ExponentTooLarge(Box<Expr>),
}

impl Expr {
    pub fn constant(v: u64) -> Self {
        Expr::Const(BigUint::from(v))
    }

    pub fn k() -> Self {
        Expr::Var(Var::K)
    }

    pub fn n() -> Self {
        Expr::Var(Var::N)
    }

    pub fn j() -> Self {
        Expr::Var(Var::J)
    }

    pub fn fact(self) -> Self {
        Expr::Fact(Box::new(self))
    }

    pub fn pow(self, exponent: Expr) -> Self {
        Expr::Pow(Box::new(self), Box::new(exponent))
    }

    /// Number of nodes in the tree.
    pub fn size(&self) -> usize {
        1 + self.children().map(Expr::size).sum::<usize>()
    }

    pub fn depth(&self) -> usize {
        1 + self.children().map(Expr::depth).max().unwrap_or(0)
    }

    /// True if no variable occurs in the tree.
    pub fn is_closed(&self) -> bool {
        match self {
            Expr::Const(_) => true,
            Expr::Var(_) => false,
            _ => self.children().all(Expr::is_closed),
        }
    }

    pub fn contains_var(&self, var: Var) -> bool {
        match self {
            Expr::Var(v) => *v == var,
            Expr::Const(_) => false,
            _ => self.children().any(|c| c.contains_var(var)),
        }
    }

    pub(crate) fn children(&self) -> impl Iterator<Item = &Expr> {
        let (a, b): (Option<&Expr>, Option<&Expr>) = match self {
            Expr::Const(_) | Expr::Var(_) => (None, None),
            Expr::Fact(c) => (Some(c), None),
            Expr::Pow(l, r) | Expr::Add(l, r) | Expr::Sub(l, r) | Expr::Mul(l, r) => (Some(l), Some(r)),
        };
        a.into_iter().chain(b)
    }
}

impl ops::Add for Expr {
    type Output = Expr;
    fn add(self, rhs: Expr) -> Expr {
        Expr::Add(Box::new(self), Box::new(rhs))
    }
}

impl ops::Sub for Expr {
    type Output = Expr;
    fn sub(self, rhs: Expr) -> Expr {
        Expr::Sub(Box::new(self), Box::new(rhs))
    }
}

impl ops::Mul for Expr {
    type Output = Expr;
    fn mul(self, rhs: Expr) -> Expr {
        Expr::Mul(Box::new(self), Box::new(rhs))
    }
}

impl From<u64> for Expr {
    fn from(v: u64) -> Self {
        Expr::constant(v)
    }
}

/// Prints the fully parenthesized form; the parser reads it back to the same tree.
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Const(v) => write!(f, "{v}"),
            Expr::Var(v) => f.write_str(v.name()),
            Expr::Fact(c) => write!(f, "{c}!"),
            Expr::Pow(b, e) => write!(f, "({b}^{e})"),
            Expr::Add(l, r) => write!(f, "({l} + {r})"),
            Expr::Sub(l, r) => write!(f, "({l} - {r})"),
            Expr::Mul(l, r) => write!(f, "({l} * {r})"),
        }
    }
}

/// Values for the variables of an expression.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Binding {
    pub k: u64,
    pub n: u64,
    /// Auxiliary index `j`, only used by catalog entries that range over it.
    pub aux: Option<u64>,
}

impl Binding {
    pub fn new(k: u64, n: u64) -> Result<Self, ExprError> {
        if k == 0 || n == 0 {
            return Err(ExprError::InvalidBinding { k, n });
        }
        Ok(Binding { k, n, aux: None })
    }

    pub fn with_aux(mut self, j: u64) -> Self {
        self.aux = Some(j);
        self
    }

    fn value_of(&self, var: Var) -> Option<u64> {
        match var {
            Var::K => Some(self.k),
            Var::N => Some(self.n),
            Var::J => self.aux,
        }
    }
}

/// An expression without free variables.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ClosedExpr(Expr);

impl ClosedExpr {
    pub fn new(expr: Expr) -> Result<Self, ExprError> {
        match first_var(&expr) {
            Some(v) => Err(ExprError::UnboundVariable(v)),
            None => Ok(ClosedExpr(expr)),
        }
    }

    pub fn expr(&self) -> &Expr {
        &self.0
    }

    pub fn into_expr(self) -> Expr {
        self.0
    }

    pub(crate) fn from_closed_unchecked(expr: Expr) -> Self {
        debug_assert!(expr.is_closed());
        ClosedExpr(expr)
    }
}

impl fmt::Display for ClosedExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

impl AsRef<Expr> for ClosedExpr {
    fn as_ref(&self) -> &Expr {
        &self.0
    }
}

fn first_var(e: &Expr) -> Option<Var> {
    match e {
        Expr::Var(v) => Some(*v),
        Expr::Const(_) => None,
        _ => e.children().find_map(first_var),
    }
}

/// Replaces every variable by its value under `b`.
///
/// Fails only if the expression mentions `j` and the binding carries no
/// auxiliary value.
pub fn substitute(e: &Expr, b: &Binding) -> Result<ClosedExpr, ExprError> {
    fn go(e: &Expr, b: &Binding) -> Result<Expr, ExprError> {
        Ok(match e {
            Expr::Const(_) => e.clone(),
            Expr::Var(v) => Expr::constant(b.value_of(*v).ok_or(ExprError::UnboundVariable(*v))?),
            Expr::Fact(c) => Expr::Fact(Box::new(go(c, b)?)),
            Expr::Pow(l, r) => Expr::Pow(Box::new(go(l, b)?), Box::new(go(r, b)?)),
            Expr::Add(l, r) => Expr::Add(Box::new(go(l, b)?), Box::new(go(r, b)?)),
            Expr::Sub(l, r) => Expr::Sub(Box::new(go(l, b)?), Box::new(go(r, b)?)),
            Expr::Mul(l, r) => Expr::Mul(Box::new(go(l, b)?), Box::new(go(r, b)?)),
        })
    }
    go(e, b).map(ClosedExpr::from_closed_unchecked)
}
