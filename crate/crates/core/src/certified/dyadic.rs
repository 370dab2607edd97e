//! Exact dyadic rationals `mantissa * 2^exponent`.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{One, Pow, Signed, Zero};

/// `mantissa * 2^exponent`, kept with an odd mantissa (or zero with exponent 0).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Dyadic {
    mantissa: BigInt,
    exponent: i64,
}

/// Rounding direction for conversions that lose precision.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Round {
    Down,
    Up,
}

impl Dyadic {
    pub fn new(mantissa: impl Into<BigInt>, exponent: i64) -> Self {
        let mantissa = mantissa.into();
        if mantissa.is_zero() {
            return Dyadic::zero();
        }
        let tz = mantissa.trailing_zeros().unwrap_or(0);
        Dyadic {
            mantissa: mantissa >> tz,
            exponent: exponent + tz as i64,
        }
    }

    pub fn zero() -> Self {
        Dyadic {
            mantissa: BigInt::zero(),
            exponent: 0,
        }
    }

    pub fn from_int(v: impl Into<BigInt>) -> Self {
        Dyadic::new(v, 0)
    }

    /// `2^exponent`.
    pub fn pow2(exponent: i64) -> Self {
        Dyadic {
            mantissa: BigInt::one(),
            exponent,
        }
    }

    pub fn mantissa(&self) -> &BigInt {
        &self.mantissa
    }

    pub fn exponent(&self) -> i64 {
        self.exponent
    }

    pub fn is_zero(&self) -> bool {
        self.mantissa.is_zero()
    }

    pub fn is_positive(&self) -> bool {
        self.mantissa.is_positive()
    }

    pub fn is_negative(&self) -> bool {
        self.mantissa.is_negative()
    }

    pub fn abs(&self) -> Self {
        Dyadic {
            mantissa: self.mantissa.abs(),
            exponent: self.exponent,
        }
    }

    pub fn mul_int(&self, k: &BigInt) -> Self {
        Dyadic::new(&self.mantissa * k, self.exponent)
    }

    /// Rounds to a multiple of `2^-frac_bits` in the given direction.
    pub fn round_to(&self, frac_bits: i64, dir: Round) -> Self {
        if self.exponent >= -frac_bits {
            return self.clone();
        }
        let shift = (-frac_bits - self.exponent) as u64;
        let divisor = BigInt::one() << shift;
        let q = match dir {
            Round::Down => self.mantissa.div_floor(&divisor),
            Round::Up => self.mantissa.div_ceil(&divisor),
        };
        Dyadic::new(q, -frac_bits)
    }

    pub fn floor(&self) -> BigInt {
        self.round_to(0, Round::Down).to_integer_unchecked()
    }

    pub fn ceil(&self) -> BigInt {
        self.round_to(0, Round::Up).to_integer_unchecked()
    }

    fn to_integer_unchecked(&self) -> BigInt {
        debug_assert!(self.exponent >= 0 || self.is_zero());
        &self.mantissa << (self.exponent.max(0) as u64)
    }

    /// `floor(log2 self)` for a positive value.
    pub fn floor_log2(&self) -> i64 {
        assert!(self.is_positive(), "floor_log2 of a non-positive dyadic");
        self.mantissa.bits() as i64 - 1 + self.exponent
    }

    /// Decimal rendering with `digits` fractional digits, rounded in direction `dir`.
    pub fn to_decimal(&self, digits: u32, dir: Round) -> String {
        let scale = Pow::pow(BigInt::from(10u32), digits);
        let scaled = &self.mantissa * scale;
        let q = if self.exponent >= 0 {
            scaled << (self.exponent as u64)
        } else {
            let divisor = BigInt::one() << ((-self.exponent) as u64);
            match dir {
                Round::Down => scaled.div_floor(&divisor),
                Round::Up => scaled.div_ceil(&divisor),
            }
        };
        let negative = q.sign() == Sign::Minus;
        let mut s = q.magnitude().to_str_radix(10);
        if digits > 0 {
            let digits = digits as usize;
            if s.len() <= digits {
                s = format!("{}{}", "0".repeat(digits + 1 - s.len()), s);
            }
            s.insert(s.len() - digits, '.');
        }
        if negative {
            s.insert(0, '-');
        }
        s
    }

    /// Nearest `f64`, for diagnostics only.
    pub fn to_f64(&self) -> f64 {
        let bits = self.mantissa.bits() as i64;
        let keep = 60;
        let (m, e) = if bits > keep {
            (&self.mantissa >> ((bits - keep) as u64), self.exponent + bits - keep)
        } else {
            (self.mantissa.clone(), self.exponent)
        };
        let m: f64 = num_traits::ToPrimitive::to_f64(&m).unwrap_or(f64::NAN);
        m * 2f64.powi(e.clamp(i32::MIN as i64, i32::MAX as i64) as i32)
    }

    fn aligned(a: &Dyadic, b: &Dyadic) -> (BigInt, BigInt, i64) {
        let e = a.exponent.min(b.exponent);
        let am = &a.mantissa << ((a.exponent - e) as u64);
        let bm = &b.mantissa << ((b.exponent - e) as u64);
        (am, bm, e)
    }
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> Ordering {
        let (sa, sb) = (self.mantissa.sign(), other.mantissa.sign());
        if sa != sb {
            return sa.cmp(&sb);
        }
        if sa == Sign::NoSign {
            return Ordering::Equal;
        }
        // Same sign: compare magnitudes by bit position before aligning.
        let ta = self.mantissa.bits() as i64 + self.exponent;
        let tb = other.mantissa.bits() as i64 + other.exponent;
        if ta != tb {
            let by_magnitude = ta.cmp(&tb);
            return if sa == Sign::Plus {
                by_magnitude
            } else {
                by_magnitude.reverse()
            };
        }
        let (am, bm, _) = Dyadic::aligned(self, other);
        am.cmp(&bm)
    }
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Add for &Dyadic {
    type Output = Dyadic;
    fn add(self, rhs: &Dyadic) -> Dyadic {
        if self.is_zero() {
            return rhs.clone();
        }
        if rhs.is_zero() {
            return self.clone();
        }
        let (a, b, e) = Dyadic::aligned(self, rhs);
        Dyadic::new(a + b, e)
    }
}

impl Sub for &Dyadic {
    type Output = Dyadic;
    fn sub(self, rhs: &Dyadic) -> Dyadic {
        self + &(-rhs)
    }
}

impl Mul for &Dyadic {
    type Output = Dyadic;
    fn mul(self, rhs: &Dyadic) -> Dyadic {
        Dyadic::new(&self.mantissa * &rhs.mantissa, self.exponent + rhs.exponent)
    }
}

impl Neg for &Dyadic {
    type Output = Dyadic;
    fn neg(self) -> Dyadic {
        Dyadic {
            mantissa: -&self.mantissa,
            exponent: self.exponent,
        }
    }
}

impl Add for Dyadic {
    type Output = Dyadic;
    fn add(self, rhs: Dyadic) -> Dyadic {
        &self + &rhs
    }
}

impl Sub for Dyadic {
    type Output = Dyadic;
    fn sub(self, rhs: Dyadic) -> Dyadic {
        &self - &rhs
    }
}

impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exponent >= 0 {
            write!(f, "{}", &self.mantissa << (self.exponent as u64))
        } else {
            write!(f, "{}/2^{}", self.mantissa, -self.exponent)
        }
    }
}
