//! Three-tier certified comparison of closed expressions.
//!
//! Tiers, in order: structural identity of normal forms, disjoint `log2`
//! enclosures over an escalating precision ladder, and exact evaluation under
//! a bit budget. When none of them decides, the result is an `Undecided`
//! error rather than a guess.

use std::cmp::Ordering;
use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering as AtomicOrdering};

use serde::Serialize;
use thiserror::Error;

use crate::certified::{bound_expr_at, BoundError, Precision, Sign, SignedLogMagnitude, DEFAULT_LADDER};
use crate::expr::{
    estimate_bits, eval_exact, normalize, substitute, Binding, ClosedExpr, Expr, ExprError, DEFAULT_EXACT_BUDGET_BITS,
};

/// Operands estimated at or below this size skip the log tier.
pub const DEFAULT_IMMEDIATE_EXACT_BITS: u64 = 4096;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Less,
    Equal,
    Greater,
}

impl Verdict {
    pub fn from_ordering(o: Ordering) -> Self {
        match o {
            Ordering::Less => Verdict::Less,
            Ordering::Equal => Verdict::Equal,
            Ordering::Greater => Verdict::Greater,
        }
    }

    pub fn reverse(self) -> Self {
        match self {
            Verdict::Less => Verdict::Greater,
            Verdict::Equal => Verdict::Equal,
            Verdict::Greater => Verdict::Less,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Less => "less",
            Verdict::Equal => "equal",
            Verdict::Greater => "greater",
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Less => "Less",
            Verdict::Equal => "Equal",
            Verdict::Greater => "Greater",
        })
    }
}

/// Which tier proved a verdict.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Certificate {
    Structural,
    /// Disjoint `log2` enclosures at this many fractional bits.
    LogSeparation {
        precision: u32,
    },
    /// Exact evaluation; `bits` is the larger operand bit length.
    Exact {
        bits: u64,
    },
}

impl Certificate {
    pub fn tier(&self) -> Tier {
        match self {
            Certificate::Structural => Tier::Structural,
            Certificate::LogSeparation { .. } => Tier::LogSeparation,
            Certificate::Exact { .. } => Tier::Exact,
        }
    }
}

impl fmt::Display for Certificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Certificate::Structural => f.write_str("structural"),
            Certificate::LogSeparation { precision } => write!(f, "log-separation(f={precision})"),
            Certificate::Exact { bits } => write!(f, "exact({bits} bits)"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Tier {
    Structural,
    LogSeparation,
    Exact,
}

impl Tier {
    pub fn as_str(self) -> &'static str {
        match self {
            Tier::Structural => "structural",
            Tier::LogSeparation => "log_separation",
            Tier::Exact => "exact",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Comparison {
    pub verdict: Verdict,
    pub certificate: Certificate,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolicyError {
    #[error("precision ladder must be nonempty")]
    EmptyLadder,
    #[error("precision ladder must be strictly increasing")]
    LadderNotIncreasing,
    #[error("precision {0} is below the minimum of {min}", min = Precision::MIN)]
    PrecisionTooSmall(u32),
    #[error("exact budget must be at least 1024 bits (got {0})")]
    BudgetTooSmall(u64),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComparePolicy {
    precision_ladder: Vec<Precision>,
    exact_budget_bits: u64,
    immediate_exact_bits: u64,
}

impl ComparePolicy {
    pub fn new(ladder: &[u32], exact_budget_bits: u64) -> Result<Self, PolicyError> {
        if ladder.is_empty() {
            return Err(PolicyError::EmptyLadder);
        }
        if ladder.windows(2).any(|w| w[0] >= w[1]) {
            return Err(PolicyError::LadderNotIncreasing);
        }
        let precision_ladder = ladder
            .iter()
            .map(|&f| Precision::new(f).map_err(|_| PolicyError::PrecisionTooSmall(f)))
            .collect::<Result<Vec<_>, _>>()?;
        if exact_budget_bits < 1024 {
            return Err(PolicyError::BudgetTooSmall(exact_budget_bits));
        }
        Ok(ComparePolicy {
            precision_ladder,
            exact_budget_bits,
            immediate_exact_bits: DEFAULT_IMMEDIATE_EXACT_BITS.min(exact_budget_bits),
        })
    }

    /// Operands up to this size are compared exactly without trying the log tier.
    /// Zero forces every non-structural comparison through the log tier first.
    pub fn with_immediate_exact_bits(mut self, bits: u64) -> Self {
        self.immediate_exact_bits = bits.min(self.exact_budget_bits);
        self
    }

    pub fn ladder(&self) -> impl Iterator<Item = u32> + '_ {
        self.precision_ladder.iter().map(|p| p.bits())
    }

    pub fn exact_budget_bits(&self) -> u64 {
        self.exact_budget_bits
    }

    pub fn immediate_exact_bits(&self) -> u64 {
        self.immediate_exact_bits
    }
}

impl Default for ComparePolicy {
    fn default() -> Self {
        ComparePolicy::new(&DEFAULT_LADDER, DEFAULT_EXACT_BUDGET_BITS).expect("default policy is valid")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CompareError {
    #[error(
        "undecided: enclosures still overlap at precision {max_precision} and exact evaluation is out of budget \
         (estimated bits: lhs {}, rhs {})",
        fmt_estimate(.lhs_estimate), fmt_estimate(.rhs_estimate)
    )]
    Undecided {
        max_precision: u32,
        lhs_estimate: Option<u64>,
        rhs_estimate: Option<u64>,
    },
    #[error(transparent)]
    Eval(#[from] ExprError),
}

fn fmt_estimate(e: &Option<u64>) -> String {
    e.map_or_else(|| "overflow".to_string(), |b| b.to_string())
}

/// Snapshot of [`Comparator`] instrumentation.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct CompareStats {
    pub comparisons: u64,
    pub structural: u64,
    pub log_separation: u64,
    pub exact: u64,
    pub undecided: u64,
    pub interval_evaluations: u64,
    pub exact_evaluations: u64,
    pub max_precision_used: u64,
    pub exact_bits_touched: u64,
}

#[derive(Default)]
struct Counters {
    comparisons: AtomicU64,
    structural: AtomicU64,
    log_separation: AtomicU64,
    exact: AtomicU64,
    undecided: AtomicU64,
    interval_evaluations: AtomicU64,
    exact_evaluations: AtomicU64,
    max_precision_used: AtomicU64,
    exact_bits_touched: AtomicU64,
}

fn bump(c: &AtomicU64, by: u64) {
    c.fetch_add(by, AtomicOrdering::Relaxed);
}

/// A policy plus instrumentation counters; safe to share across threads.
#[derive(Default)]
pub struct Comparator {
    policy: ComparePolicy,
    counters: Counters,
}

impl Comparator {
    pub fn new(policy: ComparePolicy) -> Self {
        Comparator {
            policy,
            counters: Counters::default(),
        }
    }

    pub fn policy(&self) -> &ComparePolicy {
        &self.policy
    }

    pub fn stats(&self) -> CompareStats {
        let c = &self.counters;
        let get = |a: &AtomicU64| a.load(AtomicOrdering::Relaxed);
        CompareStats {
            comparisons: get(&c.comparisons),
            structural: get(&c.structural),
            log_separation: get(&c.log_separation),
            exact: get(&c.exact),
            undecided: get(&c.undecided),
            interval_evaluations: get(&c.interval_evaluations),
            exact_evaluations: get(&c.exact_evaluations),
            max_precision_used: get(&c.max_precision_used),
            exact_bits_touched: get(&c.exact_bits_touched),
        }
    }

    pub fn compare(&self, a: &ClosedExpr, b: &ClosedExpr) -> Result<Comparison, CompareError> {
        let result = self.decide(a, b);
        let c = &self.counters;
        bump(&c.comparisons, 1);
        match &result {
            Ok(cmp) => match cmp.certificate {
                Certificate::Structural => bump(&c.structural, 1),
                Certificate::LogSeparation { .. } => bump(&c.log_separation, 1),
                Certificate::Exact { .. } => bump(&c.exact, 1),
            },
            Err(CompareError::Undecided { .. }) => bump(&c.undecided, 1),
            Err(_) => {}
        }
        result
    }

    pub fn compare_instance(&self, lhs: &Expr, rhs: &Expr, b: &Binding) -> Result<Comparison, CompareError> {
        self.compare(&substitute(lhs, b)?, &substitute(rhs, b)?)
    }

    fn decide(&self, a: &ClosedExpr, b: &ClosedExpr) -> Result<Comparison, CompareError> {
        let a = normalize(a.expr());
        let b = normalize(b.expr());
        if a == b {
            return Ok(structural());
        }

        let (lhs, rhs) = rearrange(&a, &b);
        if lhs == rhs {
            return Ok(structural());
        }
        let lhs = ClosedExpr::from_closed_unchecked(lhs);
        let rhs = ClosedExpr::from_closed_unchecked(rhs);

        let lhs_estimate = estimate_bits(&lhs).ok().map(|e| e.upper_bound_bits);
        let rhs_estimate = estimate_bits(&rhs).ok().map(|e| e.upper_bound_bits);
        let within = |limit: u64| matches!((lhs_estimate, rhs_estimate), (Some(x), Some(y)) if x.max(y) <= limit);

        if within(self.policy.immediate_exact_bits) {
            if let Some(cmp) = self.exact(&lhs, &rhs)? {
                return Ok(cmp);
            }
        }

        let mut prev: Option<(SignedLogMagnitude, SignedLogMagnitude)> = None;
        for &p in &self.policy.precision_ladder {
            self.counters
                .max_precision_used
                .fetch_max(p.bits() as u64, AtomicOrdering::Relaxed);
            bump(&self.counters.interval_evaluations, 2);
            let current = match (bound_expr_at(&lhs, p), bound_expr_at(&rhs, p)) {
                (Ok(l), Ok(r)) => (l, r),
                (Err(BoundError::AmbiguousSign { .. }), _) | (_, Err(BoundError::AmbiguousSign { .. })) => continue,
                (Err(BoundError::Eval(e)), _) | (_, Err(BoundError::Eval(e))) => return Err(e.into()),
                (Err(e), _) | (_, Err(e)) => unreachable!("precision validated by policy: {e}"),
            };
            let current = match prev {
                Some((pl, pr)) => (current.0.refine(&pl), current.1.refine(&pr)),
                None => current,
            };
            if let Some(verdict) = separate(&current.0, &current.1) {
                return Ok(Comparison {
                    verdict,
                    certificate: Certificate::LogSeparation { precision: p.bits() },
                });
            }
            prev = Some(current);
        }

        if within(self.policy.exact_budget_bits) {
            if let Some(cmp) = self.exact(&lhs, &rhs)? {
                return Ok(cmp);
            }
        }
        Err(CompareError::Undecided {
            max_precision: self.policy.precision_ladder.last().map_or(0, |p| p.bits()),
            lhs_estimate,
            rhs_estimate,
        })
    }

    /// `None` when either side turns out to exceed the budget.
    fn exact(&self, lhs: &ClosedExpr, rhs: &ClosedExpr) -> Result<Option<Comparison>, CompareError> {
        bump(&self.counters.exact_evaluations, 1);
        let budget = self.policy.exact_budget_bits;
        let values = eval_exact(lhs, budget).and_then(|l| Ok((l, eval_exact(rhs, budget)?)));
        match values {
            Ok((l, r)) => {
                let bits = l.bits().max(r.bits());
                bump(&self.counters.exact_bits_touched, bits);
                Ok(Some(Comparison {
                    verdict: Verdict::from_ordering(l.cmp(&r)),
                    certificate: Certificate::Exact { bits },
                }))
            }
            Err(ExprError::BudgetExceeded { .. }) | Err(ExprError::EstimateOverflow) => Ok(None),
            Err(e) => Err(e.into()),
        }
    }
}

fn structural() -> Comparison {
    Comparison {
        verdict: Verdict::Equal,
        certificate: Certificate::Structural,
    }
}

/// Moves subtracted top-level terms across, so `A - B` vs `C - D` becomes
/// `A + D` vs `C + B`, then cancels terms that appear on both sides.
fn rearrange(a: &Expr, b: &Expr) -> (Expr, Expr) {
    let mut lhs = Vec::new();
    let mut rhs = Vec::new();
    split_terms(a, true, &mut lhs, &mut rhs);
    split_terms(b, true, &mut rhs, &mut lhs);

    let mut i = 0;
    while i < lhs.len() {
        if let Some(j) = rhs.iter().position(|t| *t == lhs[i]) {
            rhs.swap_remove(j);
            lhs.swap_remove(i);
        } else {
            i += 1;
        }
    }
    (sum_of(lhs), sum_of(rhs))
}

/// Pushes the top-level terms of `e` onto `same` (added) or `other` (subtracted).
fn split_terms<'a>(e: &'a Expr, positive: bool, same: &mut Vec<&'a Expr>, other: &mut Vec<&'a Expr>) {
    match e {
        Expr::Add(l, r) => {
            split_terms(l, positive, same, other);
            split_terms(r, positive, same, other);
        }
        Expr::Sub(l, r) => {
            split_terms(l, positive, same, other);
            split_terms(r, !positive, same, other);
        }
        _ if positive => same.push(e),
        _ => other.push(e),
    }
}

fn sum_of(terms: Vec<&Expr>) -> Expr {
    let mut it = terms.into_iter().cloned();
    match it.next() {
        None => Expr::constant(0),
        Some(first) => normalize(&it.fold(first, |acc, t| acc + t)),
    }
}

/// Verdict from enclosures, if they prove one. Never returns `Equal`.
fn separate(l: &SignedLogMagnitude, r: &SignedLogMagnitude) -> Option<Verdict> {
    if l.sign() != r.sign() {
        return Some(Verdict::from_ordering(l.sign().cmp(&r.sign())));
    }
    let (lm, rm) = (l.magnitude()?, r.magnitude()?);
    let by_magnitude = if lm.is_below(rm) {
        Verdict::Less
    } else if rm.is_below(lm) {
        Verdict::Greater
    } else {
        return None;
    };
    Some(match l.sign() {
        Sign::Negative => by_magnitude.reverse(),
        _ => by_magnitude,
    })
}

/// Compares two closed expressions under `policy`.
pub fn compare(a: &ClosedExpr, b: &ClosedExpr, policy: &ComparePolicy) -> Result<Comparison, CompareError> {
    Comparator::new(policy.clone()).compare(a, b)
}

/// Substitutes `b` into both sides, then compares.
pub fn compare_instance(
    lhs: &Expr,
    rhs: &Expr,
    b: &Binding,
    policy: &ComparePolicy,
) -> Result<Comparison, CompareError> {
    Comparator::new(policy.clone()).compare_instance(lhs, rhs, b)
}
