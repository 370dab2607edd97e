//! Structural recursion producing [`SignedLogMagnitude`] enclosures.

use num_bigint::{BigInt, BigUint};
use num_traits::{ToPrimitive, Zero};

use super::{log2_factorial, log2_nat, BoundError, Dyadic, LogInterval, Precision, Round, Sign, SignedLogMagnitude};
use crate::expr::eval::{estimate, eval, EXPONENT_BUDGET_BITS};
use crate::expr::{normalize, ClosedExpr, Expr, ExprError};

/// Subterms whose estimated size is at most this many bits are evaluated exactly.
const INLINE_EXACT_BITS: u64 = 4096;

/// Largest factorial argument handled by summing per-integer logarithms.
pub(crate) const MAX_FACTORIAL_ARGUMENT: u64 = 1 << 20;

/// Sign and `log2 |value|` enclosure of `e` at precision `p`.
///
/// The result at `p` is intersected with the result at `p / 2` (down to
/// [`Precision::MIN`]), so doubling the precision never widens the interval.
pub fn bound_expr(e: &ClosedExpr, p: Precision) -> Result<SignedLogMagnitude, BoundError> {
    let fine = bound_expr_at(e, p);
    let half = p.bits() / 2;
    if half < Precision::MIN {
        return fine;
    }
    let coarse = bound_expr(e, Precision(half));
    match (fine, coarse) {
        (Ok(a), Ok(b)) => Ok(a.refine(&b)),
        (Ok(a), Err(_)) => Ok(a),
        (Err(BoundError::AmbiguousSign { .. }), Ok(b)) => Ok(b),
        (Err(err), _) => Err(err),
    }
}

/// Single-precision enclosure, without refinement against coarser precisions.
pub fn bound_expr_at(e: &ClosedExpr, p: Precision) -> Result<SignedLogMagnitude, BoundError> {
    bound(e.expr(), p)
}

fn bound(e: &Expr, p: Precision) -> Result<SignedLogMagnitude, BoundError> {
    if !matches!(e, Expr::Const(_)) {
        if let Ok(bits) = estimate(e) {
            if bits <= INLINE_EXACT_BITS {
                match eval(e, INLINE_EXACT_BITS) {
                    Ok(v) => return Ok(from_exact(&v, p)),
                    Err(ExprError::BudgetExceeded { .. }) => {}
                    Err(err) => return Err(err.into()),
                }
            }
        }
    }
    match e {
        Expr::Const(v) => Ok(from_natural(v, p)),
        Expr::Var(v) => Err(ExprError::UnboundVariable(*v).into()),
        Expr::Fact(arg) => {
            let m = exact_argument(arg, ExprError::NegativeFactorial)?;
            let m = m
                .to_u64()
                .filter(|&m| m <= MAX_FACTORIAL_ARGUMENT)
                .ok_or_else(|| ExprError::ExponentTooLarge(arg.clone()))?;
            Ok(SignedLogMagnitude::nonzero(Sign::Positive, log2_factorial(m, p)))
        }
        Expr::Pow(base, exp) => {
            let x = exact_argument(exp, ExprError::NegativeExponent)?;
            if x.is_zero() {
                return Ok(SignedLogMagnitude::nonzero(
                    Sign::Positive,
                    LogInterval::point(Dyadic::zero()),
                ));
            }
            let b = bound(base, p)?;
            let Some(m) = b.magnitude() else {
                return Ok(SignedLogMagnitude::zero());
            };
            let sign = if b.sign() == Sign::Negative && x.bit(0) {
                Sign::Negative
            } else {
                Sign::Positive
            };
            Ok(SignedLogMagnitude::nonzero(sign, m.scale(&BigInt::from(x))))
        }
        Expr::Mul(l, r) => {
            let a = bound(l, p)?;
            let b = bound(r, p)?;
            match (a.magnitude(), b.magnitude()) {
                (Some(x), Some(y)) => Ok(SignedLogMagnitude::nonzero(a.sign().times(b.sign()), x.add(y))),
                _ => Ok(SignedLogMagnitude::zero()),
            }
        }
        Expr::Add(l, r) => combine(bound(l, p)?, bound(r, p)?, p),
        Expr::Sub(l, r) => {
            if normalize(l) == normalize(r) {
                return Ok(SignedLogMagnitude::zero());
            }
            combine(bound(l, p)?, bound(r, p)?.negate(), p)
        }
    }
}

/// Exactly evaluates an exponent or factorial argument.
fn exact_argument(e: &Expr, negative: ExprError) -> Result<BigUint, BoundError> {
    match eval(e, EXPONENT_BUDGET_BITS) {
        Ok(v) => v.to_biguint().ok_or_else(|| negative.into()),
        Err(ExprError::BudgetExceeded { .. }) | Err(ExprError::EstimateOverflow) => {
            Err(ExprError::ExponentTooLarge(Box::new(e.clone())).into())
        }
        Err(err) => Err(err.into()),
    }
}

fn from_natural(v: &BigUint, p: Precision) -> SignedLogMagnitude {
    if v.is_zero() {
        SignedLogMagnitude::zero()
    } else {
        SignedLogMagnitude::nonzero(Sign::Positive, log2_nat(v, p))
    }
}

fn from_exact(v: &BigInt, p: Precision) -> SignedLogMagnitude {
    let m = from_natural(v.magnitude(), p);
    if v.sign() == num_bigint::Sign::Minus {
        m.negate()
    } else {
        m
    }
}

/// Enclosure of `a + b` from enclosures of the summands.
fn combine(a: SignedLogMagnitude, b: SignedLogMagnitude, p: Precision) -> Result<SignedLogMagnitude, BoundError> {
    let (x, y) = match (a.magnitude(), b.magnitude()) {
        (None, _) => return Ok(b),
        (_, None) => return Ok(a),
        (Some(x), Some(y)) => (x, y),
    };
    let g = p.grid_bits();
    if a.sign() == b.sign() {
        return Ok(SignedLogMagnitude::nonzero(a.sign(), sum_bound(x, y, g)));
    }
    if y.is_below(x) {
        Ok(SignedLogMagnitude::nonzero(a.sign(), difference_bound(x, y, g)))
    } else if x.is_below(y) {
        Ok(SignedLogMagnitude::nonzero(b.sign(), difference_bound(y, x, g)))
    } else {
        Err(BoundError::AmbiguousSign { precision: p.bits() })
    }
}

/// `log2(2^u + 2^v)` for `u` in `x`, `v` in `y`.
///
/// With `d = v_hi - u_hi <= 0` the upper bound is `u_hi + log2(1 + 2^d)`,
/// and `log2(1 + 2^d) <= 2^(d+1)`, relaxed to `1` when `d > -2`.
fn sum_bound(x: &LogInterval, y: &LogInterval, g: i64) -> LogInterval {
    let (big, small) = if x.hi() >= y.hi() { (x, y) } else { (y, x) };
    let lo = x.lo().max(y.lo()).clone();
    let d = small.hi() - big.hi();
    let slack = if d > Dyadic::from_int(-2) {
        Dyadic::from_int(1)
    } else {
        let c = d.ceil();
        match c.to_i64() {
            Some(c) if c >= -(g + 2) => Dyadic::pow2(c + 1),
            _ => Dyadic::pow2(-g),
        }
    };
    let hi = (big.hi() + &slack).round_to(g, Round::Up);
    LogInterval::new(lo.round_to(g, Round::Down), hi)
}

/// `log2(2^u - 2^v)` for `u` in `big`, `v` in `small`, given `small` lies strictly below `big`.
///
/// With `d = u_lo - v_hi > 0` the lower bound is `u_lo + log2(1 - 2^-d)`, where
/// `log2(1 - 2^-d) >= -2^(2 - floor d)` for `d >= 1` and `>= floor(log2 d) - 2`
/// for `0 < d < 1`. Magnitudes of nonzero integers have nonnegative logs.
fn difference_bound(big: &LogInterval, small: &LogInterval, g: i64) -> LogInterval {
    let d = big.lo() - small.hi();
    debug_assert!(d.is_positive());
    let one = Dyadic::from_int(1);
    let penalty = if d >= one {
        match d.floor().to_i64() {
            Some(fl) if fl <= g + 2 => -&Dyadic::pow2(2 - fl),
            _ => -&Dyadic::pow2(-g),
        }
    } else {
        Dyadic::from_int(d.floor_log2() - 2)
    };
    let lo = (big.lo() + &penalty).max(Dyadic::zero());
    LogInterval::new(lo.round_to(g, Round::Down), big.hi().clone())
}
