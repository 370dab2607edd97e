//! Exact evaluation guarded by a priori bit-length estimates.

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Pow, Signed, ToPrimitive, Zero};

use super::{ClosedExpr, Expr, ExprError, IntValue};

/// Default cap on the bit length of any exactly evaluated subterm (about 10^6 decimal digits).
pub const DEFAULT_EXACT_BUDGET_BITS: u64 = 3_500_000;

/// Largest estimate we represent; anything above is `EstimateOverflow`.
const MAX_ESTIMATE_BITS: u64 = i64::MAX as u64;

/// Budget for exponents and factorial arguments evaluated while estimating.
pub(crate) const EXPONENT_BUDGET_BITS: u64 = 4096;

/// Upper bound on the bit length of `|value|`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SizeEstimate {
    pub upper_bound_bits: u64,
}

/// Sound upper bound on the bit length of the value of `e`, without evaluating it.
///
/// Exponents and factorial arguments are evaluated exactly; they must stay
/// within a small budget or the estimate fails with `ExponentTooLarge`.
pub fn estimate_bits(e: &ClosedExpr) -> Result<SizeEstimate, ExprError> {
    estimate(e.expr()).map(|upper_bound_bits| SizeEstimate { upper_bound_bits })
}

pub(crate) fn estimate(e: &Expr) -> Result<u64, ExprError> {
    let bits = match e {
        Expr::Const(v) => v.bits(),
        Expr::Var(v) => return Err(ExprError::UnboundVariable(*v)),
        Expr::Fact(arg) => {
            let m = small_nonnegative(arg, ExprError::NegativeFactorial)?;
            let m = m.to_u64().ok_or(ExprError::EstimateOverflow)?;
            factorial_bits(m).ok_or(ExprError::EstimateOverflow)?
        }
        Expr::Pow(base, exp) => {
            let x = small_nonnegative(exp, ExprError::NegativeExponent)?;
            if x.is_zero() {
                1
            } else {
                let b = estimate(base)?;
                if b <= 1 {
                    1
                } else {
                    let x = x.to_u64().ok_or(ExprError::EstimateOverflow)?;
                    x.checked_mul(b).ok_or(ExprError::EstimateOverflow)?
                }
            }
        }
        Expr::Add(l, r) | Expr::Sub(l, r) => {
            let m = estimate(l)?.max(estimate(r)?);
            m.checked_add(1).ok_or(ExprError::EstimateOverflow)?
        }
        Expr::Mul(l, r) => estimate(l)?
            .checked_add(estimate(r)?)
            .ok_or(ExprError::EstimateOverflow)?,
    };
    if bits > MAX_ESTIMATE_BITS {
        return Err(ExprError::EstimateOverflow);
    }
    Ok(bits)
}

/// Exactly evaluates a subterm that is used as an exponent or factorial argument.
fn small_nonnegative(e: &Expr, negative: ExprError) -> Result<BigUint, ExprError> {
    match eval(e, EXPONENT_BUDGET_BITS) {
        Ok(v) => v.to_biguint().ok_or(negative),
        Err(ExprError::BudgetExceeded { .. }) | Err(ExprError::EstimateOverflow) => {
            Err(ExprError::ExponentTooLarge(Box::new(e.clone())))
        }
        Err(err) => Err(err),
    }
}

/// `sum_{i=1..m} ceil(log2 i) + m`, an upper bound on the bit length of `m!`
/// (at least 1, since `0! = 1`).
pub(crate) fn factorial_bits(m: u64) -> Option<u64> {
    // ceil(log2 i) = j exactly for i in (2^(j-1), 2^j].
    let mut total: u64 = 0;
    let mut j = 1u32;
    while j < 64 {
        let lo = 1u64 << (j - 1);
        if lo >= m {
            break;
        }
        let hi = (1u64 << j).min(m);
        total = total.checked_add((hi - lo).checked_mul(j as u64)?)?;
        j += 1;
    }
    if m > (1u64 << 63) {
        total = total.checked_add((m - (1u64 << 63)).checked_mul(64)?)?;
    }
    total.checked_add(m).map(|b| b.max(1))
}

/// Evaluates `e` exactly, refusing any subcomputation estimated above `budget_bits`.
pub fn eval_exact(e: &ClosedExpr, budget_bits: u64) -> Result<IntValue, ExprError> {
    eval(e.expr(), budget_bits)
}

pub(crate) fn eval(e: &Expr, budget: u64) -> Result<BigInt, ExprError> {
    let exceeded = |estimate_bits: u64| ExprError::BudgetExceeded {
        subtree: Box::new(e.clone()),
        estimate_bits,
        budget_bits: budget,
    };
    match e {
        Expr::Const(v) => Ok(BigInt::from(v.clone())),
        Expr::Var(v) => Err(ExprError::UnboundVariable(*v)),
        Expr::Fact(arg) => {
            let m = eval(arg, budget)?;
            if m.is_negative() {
                return Err(ExprError::NegativeFactorial);
            }
            let m = m.to_u64().ok_or_else(|| exceeded(u64::MAX))?;
            let est = factorial_bits(m).unwrap_or(u64::MAX);
            if est > budget {
                return Err(exceeded(est));
            }
            Ok(BigInt::from(factorial(m)))
        }
        Expr::Pow(base, exp) => {
            // Exponents only need to be known exactly; a base of magnitude <= 1
            // makes even a very large one cheap.
            let x = eval(exp, budget.max(EXPONENT_BUDGET_BITS))?;
            if x.is_negative() {
                return Err(ExprError::NegativeExponent);
            }
            if x.is_zero() {
                return Ok(BigInt::one());
            }
            let b = eval(base, budget)?;
            if b.magnitude() <= &BigUint::one() {
                let negative = b.is_negative() && x.bit(0);
                return Ok(if negative {
                    -BigInt::one()
                } else {
                    BigInt::from(b.magnitude().clone())
                });
            }
            let est = x.to_u64().and_then(|x| x.checked_mul(b.bits())).unwrap_or(u64::MAX);
            if est > budget {
                return Err(exceeded(est));
            }
            let x = x.to_u64().expect("bounded by budget");
            Ok(Pow::pow(&b, x))
        }
        Expr::Add(l, r) => Ok(eval(l, budget)? + eval(r, budget)?),
        Expr::Sub(l, r) => Ok(eval(l, budget)? - eval(r, budget)?),
        Expr::Mul(l, r) => {
            let a = eval(l, budget)?;
            let b = eval(r, budget)?;
            let est = a.bits().saturating_add(b.bits());
            if est > budget {
                return Err(exceeded(est));
            }
            Ok(a * b)
        }
    }
}

/// `m!` by binary splitting.
pub(crate) fn factorial(m: u64) -> BigUint {
    fn range_product(lo: u64, hi: u64) -> BigUint {
        if hi - lo < 16 {
            return (lo..=hi).fold(BigUint::one(), |acc, i| acc * i);
        }
        let mid = lo + (hi - lo) / 2;
        range_product(lo, mid) * range_product(mid + 1, hi)
    }
    if m < 2 {
        BigUint::one()
    } else {
        range_product(2, m)
    }
}
