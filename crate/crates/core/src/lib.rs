//! Certified verification of factorial-power Diophantine equations.
//!
//! The crate compares integer expressions such as `(k!)^(n!) - k^n` against
//! each other without materializing astronomically large values. Decisions go
//! through three tiers, each producing a certificate:
//!
//! 1. structural identity of canonical forms,
//! 2. disjoint enclosures of `log2 |value|` with exact dyadic endpoints,
//! 3. exact arbitrary-precision evaluation under a size budget.
//!
//! On top of the comparator sit a registry of equations and inequalities
//! ([`catalog`]), an exhaustive range scanner with JSON/CSV reports
//! ([`scan`]), and the `facpow` command-line front end ([`cli`]).

pub mod catalog;
pub mod certified;
pub mod cli;
pub mod compare;
pub mod expr;
pub mod scan;

pub use catalog::{get_catalog, Catalog, EquationSpec, InequalitySpec};
pub use compare::{compare, compare_instance, Certificate, Comparator, ComparePolicy, Comparison, Verdict};
pub use expr::{parse_expr, substitute, Binding, ClosedExpr, Expr};
