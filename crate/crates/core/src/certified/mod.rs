//! Certified bounds on `log2 |value|` for closed expressions.
//!
//! Every interval produced here is an exact dyadic enclosure: no floating
//! point is involved, and all rounding is outward. Signs are always exact.

mod bound;
mod dyadic;
mod log2;

use std::fmt;

use thiserror::Error;

use crate::expr::ExprError;

pub use bound::{bound_expr, bound_expr_at};
pub use dyadic::{Dyadic, Round};
pub use log2::{log2_factorial, log2_nat};

/// Default precision ladder used by the comparator.
pub const DEFAULT_LADDER: [u32; 8] = [32, 64, 128, 256, 512, 1024, 2048, 4096];

/// Target number of fractional bits for atomic logarithms.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Precision(u32);

impl Precision {
    pub const MIN: u32 = 8;

    pub fn new(f: u32) -> Result<Self, BoundError> {
        if f < Self::MIN {
            return Err(BoundError::InvalidPrecision(f));
        }
        Ok(Precision(f))
    }

    pub fn bits(self) -> u32 {
        self.0
    }

    /// Fractional bits of the grid that composite endpoints are rounded to.
    pub(crate) fn grid_bits(self) -> i64 {
        self.0 as i64 + 16
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BoundError {
    #[error("sign of a difference could not be certified at precision {precision}")]
    AmbiguousSign { precision: u32 },
    #[error("precision must be at least {min} fractional bits (got {0})", min = Precision::MIN)]
    InvalidPrecision(u32),
    #[error(transparent)]
    Eval(#[from] ExprError),
}

/// Closed interval `[lo, hi]` with dyadic endpoints.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LogInterval {
    lo: Dyadic,
    hi: Dyadic,
}

impl LogInterval {
    pub fn new(lo: Dyadic, hi: Dyadic) -> Self {
        assert!(lo <= hi, "interval endpoints out of order: {lo} > {hi}");
        LogInterval { lo, hi }
    }

    pub fn point(v: Dyadic) -> Self {
        LogInterval { lo: v.clone(), hi: v }
    }

    pub fn lo(&self) -> &Dyadic {
        &self.lo
    }

    pub fn hi(&self) -> &Dyadic {
        &self.hi
    }

    pub fn width(&self) -> Dyadic {
        &self.hi - &self.lo
    }

    pub fn add(&self, other: &LogInterval) -> LogInterval {
        LogInterval {
            lo: &self.lo + &other.lo,
            hi: &self.hi + &other.hi,
        }
    }

    /// Scales by a nonnegative integer.
    pub fn scale(&self, k: &num_bigint::BigInt) -> LogInterval {
        assert!(k.sign() != num_bigint::Sign::Minus);
        LogInterval {
            lo: self.lo.mul_int(k),
            hi: self.hi.mul_int(k),
        }
    }

    /// Strictly below `other`, with no overlap.
    pub fn is_below(&self, other: &LogInterval) -> bool {
        self.hi < other.lo
    }

    pub fn overlaps(&self, other: &LogInterval) -> bool {
        !self.is_below(other) && !other.is_below(self)
    }

    /// Intersection of two enclosures of the same quantity.
    pub fn intersect(&self, other: &LogInterval) -> Option<LogInterval> {
        let lo = (&self.lo).max(&other.lo).clone();
        let hi = (&self.hi).min(&other.hi).clone();
        (lo <= hi).then_some(LogInterval { lo, hi })
    }

    /// Decimal rendering `[lo, hi]` with outward rounding.
    pub fn to_decimal(&self, digits: u32) -> String {
        format!(
            "[{}, {}]",
            self.lo.to_decimal(digits, Round::Down),
            self.hi.to_decimal(digits, Round::Up)
        )
    }
}

impl fmt::Display for LogInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_decimal(6))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Sign {
    Negative,
    Zero,
    Positive,
}

impl Sign {
    pub fn negate(self) -> Sign {
        match self {
            Sign::Negative => Sign::Positive,
            Sign::Zero => Sign::Zero,
            Sign::Positive => Sign::Negative,
        }
    }

    pub fn times(self, other: Sign) -> Sign {
        match (self, other) {
            (Sign::Zero, _) | (_, Sign::Zero) => Sign::Zero,
            (a, b) if a == b => Sign::Positive,
            _ => Sign::Negative,
        }
    }
}

/// Exact sign plus an enclosure of `log2 |value|` when the value is nonzero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SignedLogMagnitude {
    sign: Sign,
    magnitude: Option<LogInterval>,
}

impl SignedLogMagnitude {
    pub fn zero() -> Self {
        SignedLogMagnitude {
            sign: Sign::Zero,
            magnitude: None,
        }
    }

    pub fn nonzero(sign: Sign, magnitude: LogInterval) -> Self {
        assert!(sign != Sign::Zero);
        SignedLogMagnitude {
            sign,
            magnitude: Some(magnitude),
        }
    }

    pub fn sign(&self) -> Sign {
        self.sign
    }

    pub fn magnitude(&self) -> Option<&LogInterval> {
        self.magnitude.as_ref()
    }

    pub fn negate(self) -> Self {
        SignedLogMagnitude {
            sign: self.sign.negate(),
            magnitude: self.magnitude,
        }
    }

    /// Intersects two sound enclosures of the same value.
    pub(crate) fn refine(&self, other: &SignedLogMagnitude) -> SignedLogMagnitude {
        debug_assert_eq!(self.sign, other.sign, "exact signs disagree");
        match (&self.magnitude, &other.magnitude) {
            (Some(a), Some(b)) => SignedLogMagnitude {
                sign: self.sign,
                magnitude: Some(a.intersect(b).expect("sound enclosures of one value intersect")),
            },
            _ => self.clone(),
        }
    }
}

impl fmt::Display for SignedLogMagnitude {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (&self.sign, &self.magnitude) {
            (Sign::Zero, _) | (_, None) => f.write_str("0"),
            (Sign::Positive, Some(m)) => write!(f, "+2^{m}"),
            (Sign::Negative, Some(m)) => write!(f, "-2^{m}"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn iv(lo: i64, hi: i64) -> LogInterval {
        LogInterval::new(Dyadic::from_int(lo), Dyadic::from_int(hi))
    }

    #[test]
    fn interval_relations() {
        assert!(iv(1, 2).is_below(&iv(3, 4)));
        assert!(!iv(1, 3).is_below(&iv(3, 4)));
        assert!(iv(1, 3).overlaps(&iv(3, 4)));
        assert_eq!(iv(1, 5).intersect(&iv(3, 8)), Some(iv(3, 5)));
        assert_eq!(iv(1, 2).intersect(&iv(3, 8)), None);
        assert_eq!(iv(1, 2).scale(&7.into()), iv(7, 14));
    }

    #[test]
    fn precision_floor() {
        assert!(Precision::new(7).is_err());
        assert_eq!(Precision::new(8).unwrap().bits(), 8);
    }

    #[test]
    fn interval_display() {
        let x = LogInterval::new(Dyadic::new(1, -2), Dyadic::new(3, -2));
        assert_eq!(x.to_decimal(1), "[0.2, 0.8]");
    }
}
