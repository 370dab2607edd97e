//! Test oracles that share no code with the library's evaluators.

#![allow(dead_code)]

use factorial_powers::certified::Dyadic;
use factorial_powers::expr::{estimate_bits, Var};
use factorial_powers::{ClosedExpr, Expr};
use num_bigint::{BigInt, BigUint, Sign};
use num_traits::{One, Pow, Signed, ToPrimitive, Zero};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// Largest value the oracles will build, in bits.
pub const ORACLE_LIMIT_BITS: u64 = 100_000;

/// Variable values for [`reference_eval`].
#[derive(Clone, Copy, Debug, Default)]
pub struct Env {
    pub k: u64,
    pub n: u64,
    pub j: u64,
}

/// Evaluates `e` directly under `env`, or `None` on a domain error or if an
/// intermediate grows past twice [`ORACLE_LIMIT_BITS`].
pub fn reference_eval(e: &Expr, env: &Env) -> Option<BigInt> {
    let cap = 2 * ORACLE_LIMIT_BITS;
    let v = match e {
        Expr::Const(c) => BigInt::from(c.clone()),
        Expr::Var(Var::K) => BigInt::from(env.k),
        Expr::Var(Var::N) => BigInt::from(env.n),
        Expr::Var(Var::J) => BigInt::from(env.j),
        Expr::Fact(a) => {
            let m = reference_eval(a, env)?.to_u64()?;
            if m > 20_000 {
                return None;
            }
            let mut acc = BigInt::one();
            for i in 2..=m {
                acc *= i;
            }
            acc
        }
        Expr::Pow(b, x) => {
            let x = reference_eval(x, env)?;
            if x.is_negative() {
                return None;
            }
            if x.is_zero() {
                return Some(BigInt::one());
            }
            let b = reference_eval(b, env)?;
            if b.magnitude() <= &BigUint::one() {
                let odd = (&x % 2u32) == BigInt::one();
                return Some(if b.is_negative() && !odd { BigInt::one() } else { b });
            }
            let x = x.to_u64()?;
            if x.checked_mul(b.bits())? > cap {
                return None;
            }
            Pow::pow(&b, x)
        }
        Expr::Add(l, r) => reference_eval(l, env)? + reference_eval(r, env)?,
        Expr::Sub(l, r) => reference_eval(l, env)? - reference_eval(r, env)?,
        Expr::Mul(l, r) => {
            let a = reference_eval(l, env)?;
            let b = reference_eval(r, env)?;
            if a.bits() + b.bits() > cap {
                return None;
            }
            a * b
        }
    };
    Some(v)
}

pub fn reference_closed(e: &ClosedExpr) -> Option<BigInt> {
    reference_eval(e.expr(), &Env::default())
}

/// Fixed-point scale of the log oracle.
pub const LOG_SCALE: u32 = 440;
/// Absolute error of [`log2_oracle`] is below `2^-LOG_TOLERANCE`.
pub const LOG_TOLERANCE: u32 = 400;

/// `2 atanh(t)` for `t = num/den` in `[0, 1/3]`, scaled by `2^LOG_SCALE`.
fn two_atanh(num: &BigInt, den: &BigInt) -> BigInt {
    let scale = BigInt::one() << LOG_SCALE;
    let t = (&scale * num) / den;
    let t2 = (&t * &t) >> LOG_SCALE;
    let mut power = t.clone();
    let mut sum = BigInt::zero();
    let mut i = 1u32;
    while !power.is_zero() {
        sum += &power / i;
        power = (&power * &t2) >> LOG_SCALE;
        i += 2;
    }
    sum * 2
}

/// `log2(m)` scaled by `2^LOG_SCALE`, via `ln x = 2 atanh((x-1)/(x+1))`.
pub fn log2_oracle(m: &BigUint) -> BigInt {
    assert!(!m.is_zero());
    let e = m.bits() - 1;
    let m = BigInt::from(m.clone());
    // x = m / 2^e in [1, 2), kept at LOG_SCALE fractional bits.
    let x = if e <= LOG_SCALE as u64 {
        m << (LOG_SCALE as u64 - e)
    } else {
        m >> (e - LOG_SCALE as u64)
    };
    let one = BigInt::one() << LOG_SCALE;
    let ln_x = two_atanh(&(&x - &one), &(&x + &one));
    let ln_2 = two_atanh(&BigInt::one(), &BigInt::from(3));
    (BigInt::from(e) << LOG_SCALE) + ((ln_x << LOG_SCALE) / ln_2)
}

/// `d * 2^LOG_SCALE` rounded toward negative infinity.
pub fn dyadic_scaled_floor(d: &Dyadic) -> BigInt {
    let shift = d.exponent() + LOG_SCALE as i64;
    if shift >= 0 {
        d.mantissa() << shift as u64
    } else {
        // BigInt `>>` rounds toward negative infinity.
        d.mantissa() >> (-shift) as u64
    }
}

/// Whether `[lo, hi]` contains the oracle value, allowing for the oracle's error.
pub fn interval_contains(lo: &Dyadic, hi: &Dyadic, oracle: &BigInt) -> bool {
    let slack = BigInt::one() << (LOG_SCALE - LOG_TOLERANCE);
    let lo = dyadic_scaled_floor(lo);
    let hi = dyadic_scaled_floor(hi) + 1;
    lo <= oracle + &slack && hi >= oracle - &slack
}

/// Exact sign as -1, 0, 1.
pub fn sign_of(v: &BigInt) -> i8 {
    match v.sign() {
        Sign::Minus => -1,
        Sign::NoSign => 0,
        Sign::Plus => 1,
    }
}

/// Random closed expressions with exact values of at most [`ORACLE_LIMIT_BITS`] bits.
pub struct ExprGen {
    pub rng: ChaCha8Rng,
}

impl ExprGen {
    pub fn new(seed: u64) -> Self {
        use rand::SeedableRng;
        ExprGen {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    fn small_const(&mut self) -> Expr {
        let v = match self.rng.gen_range(0..10) {
            0 => 0,
            1 => 1,
            2 => 2,
            _ => self.rng.gen_range(0..=13),
        };
        Expr::constant(v)
    }

    fn exponent(&mut self) -> Expr {
        match self.rng.gen_range(0..6) {
            0 => Expr::constant(self.rng.gen_range(0..=7)).fact(),
            1 => Expr::constant(self.rng.gen_range(100..=3000)),
            2 => self.small_const() + self.small_const(),
            _ => Expr::constant(self.rng.gen_range(0..=60)),
        }
    }

    pub fn tree(&mut self, depth: u32) -> Expr {
        if depth == 0 {
            return self.small_const();
        }
        match self.rng.gen_range(0..12) {
            0 | 1 => self.small_const(),
            2 => Expr::constant(self.rng.gen_range(0..=40)).fact(),
            3 => self.tree(depth - 1).fact(),
            4..=6 => {
                let base = self.tree(depth - 1);
                let exp = self.exponent();
                base.pow(exp)
            }
            7 | 8 => self.tree(depth - 1) + self.tree(depth - 1),
            9 | 10 => self.tree(depth - 1) - self.tree(depth - 1),
            _ => self.tree(depth - 1) * self.tree(depth - 1),
        }
    }

    /// An expression with its exact value.
    pub fn closed(&mut self) -> (ClosedExpr, BigInt) {
        loop {
            let depth = self.rng.gen_range(1..=5);
            let e = ClosedExpr::new(self.tree(depth)).unwrap();
            match estimate_bits(&e) {
                Ok(est) if est.upper_bound_bits <= ORACLE_LIMIT_BITS => {}
                _ => continue,
            }
            if let Some(v) = reference_closed(&e) {
                if v.bits() <= ORACLE_LIMIT_BITS {
                    return (e, v);
                }
            }
        }
    }

    /// A second expression related to `a`: often equal in value or off by one,
    /// so the comparator's harder paths get exercised.
    pub fn partner(&mut self, a: &ClosedExpr) -> ClosedExpr {
        let e = a.expr().clone();
        let partner = match self.rng.gen_range(0..8) {
            0 => e + Expr::constant(1),
            1 => e - Expr::constant(1),
            2 => Expr::constant(1) * e,
            3 => (e.clone() + Expr::constant(3)) - Expr::constant(3),
            4 => e.clone().pow(Expr::constant(1)) + Expr::constant(0),
            _ => return self.closed().0,
        };
        ClosedExpr::new(partner).unwrap()
    }
}

#[cfg(test)]
mod self_checks {
    use super::*;

    #[test]
    fn oracle_matches_known_logs() {
        let l6 = log2_oracle(&BigUint::from(6u32));
        let approx = (l6.clone() >> (LOG_SCALE - 52)).to_f64().unwrap() / (2.0f64).powi(52);
        assert!((approx - 2.584962500721156).abs() < 1e-15);
        assert_eq!(log2_oracle(&BigUint::from(1024u32)), BigInt::from(10) << LOG_SCALE);
    }

    #[test]
    fn containment_rejects_a_slightly_shifted_interval() {
        let eight = log2_oracle(&BigUint::from(8u32));
        let three = Dyadic::from_int(3);
        assert!(interval_contains(&three, &three, &eight));
        let nudge = Dyadic::pow2(-300);
        let above = &three + &nudge;
        assert!(!interval_contains(&above, &(&above + &nudge), &eight));
        let below = &three - &nudge;
        assert!(!interval_contains(&(&below - &nudge), &below, &eight));
    }
}
