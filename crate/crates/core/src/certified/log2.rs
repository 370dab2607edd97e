//! Sound enclosures of `log2 m` and `log2 m!`.

use std::collections::HashMap;
use std::sync::{OnceLock, RwLock};

use num_bigint::{BigInt, BigUint};
use num_traits::One;

use super::{Dyadic, LogInterval, Precision};

/// Largest `m` for which per-integer enclosures are memoized.
const NAT_CACHE_LIMIT: u64 = 1 << 20;

type Memo = RwLock<HashMap<(u64, u32), LogInterval>>;

fn nat_memo() -> &'static Memo {
    static MEMO: OnceLock<Memo> = OnceLock::new();
    MEMO.get_or_init(Default::default)
}

fn factorial_memo() -> &'static Memo {
    static MEMO: OnceLock<Memo> = OnceLock::new();
    MEMO.get_or_init(Default::default)
}

fn memo_get(memo: &Memo, key: (u64, u32)) -> Option<LogInterval> {
    memo.read().unwrap_or_else(|e| e.into_inner()).get(&key).cloned()
}

fn memo_put(memo: &Memo, key: (u64, u32), value: &LogInterval) {
    // Concurrent writers compute identical values, so last write wins.
    memo.write()
        .unwrap_or_else(|e| e.into_inner())
        .insert(key, value.clone());
}

/// Interval containing `log2 m` of width at most `2^(1-f)`.
///
/// The integer part comes from the bit length; the fractional bits are
/// extracted by repeated squaring of the normalized mantissa, carried along
/// two fixed-point paths rounded down and up respectively.
///
/// # Panics
/// If `m` is zero.
pub fn log2_nat(m: &BigUint, p: Precision) -> LogInterval {
    assert!(m.bits() > 0, "log2 of zero");
    let small = u64::try_from(m).ok().filter(|&v| v <= NAT_CACHE_LIMIT);
    if let Some(v) = small {
        if let Some(hit) = memo_get(nat_memo(), (v, p.bits())) {
            return hit;
        }
    }
    let result = log2_nat_uncached(m, p.bits());
    if let Some(v) = small {
        memo_put(nat_memo(), (v, p.bits()), &result);
    }
    result
}

fn log2_nat_uncached(m: &BigUint, f: u32) -> LogInterval {
    let int_part = m.bits() as i64 - 1;
    if m.count_ones() == 1 {
        let exact = Dyadic::from_int(int_part);
        return LogInterval::new(exact.clone(), exact);
    }
    let mut guard = 16 + 2 * (32 - f.leading_zeros());
    loop {
        let (lo_bits, hi_bits) = fractional_bits(m, f, guard);
        let lo = Dyadic::new(BigInt::from(lo_bits), -(f as i64));
        let hi = Dyadic::new(BigInt::from(hi_bits), -(f as i64));
        let offset = Dyadic::from_int(int_part);
        let interval = LogInterval::new(&offset + &lo, &offset + &hi);
        if interval.width() <= Dyadic::pow2(1 - f as i64) {
            return interval;
        }
        guard += 32;
    }
}

/// Returns `(B, B_hi)` with `B / 2^f <= log2(x) <= B_hi / 2^f`, where
/// `x = m / 2^(bits(m)-1)` lies in `[1, 2)`.
fn fractional_bits(m: &BigUint, f: u32, guard: u32) -> (BigUint, BigUint) {
    let w = (f + guard) as u64;
    let top = m.bits() - 1;
    // Fixed point with w fractional bits: value = raw / 2^w.
    let (mut lo, mut hi) = if top <= w {
        let exact = m << (w - top);
        (exact.clone(), exact)
    } else {
        let shift = top - w;
        let down = m >> shift;
        let exact = (&down << shift) == *m;
        let up = if exact { down.clone() } else { &down + 1u32 };
        (down, up)
    };
    let one = BigUint::one() << w;
    let two = BigUint::one() << (w + 1);
    let round_up = &one - 1u32;

    let mut lo_bits = BigUint::default();
    let mut hi_bits = BigUint::default();
    for i in (0..f as u64).rev() {
        // Lower path: every rounding goes down, so lo <= x^(2^t) / 2^B.
        lo = (&lo * &lo) >> w;
        if lo >= two {
            lo >>= 1;
            lo_bits.set_bit(i, true);
        }
        // Upper path: every rounding goes up, so hi >= x^(2^t) / 2^B_hi.
        hi = (&hi * &hi + &round_up) >> w;
        if hi >= two {
            hi = (hi + 1u32) >> 1;
            hi_bits.set_bit(i, true);
        }
    }
    // lo >= 1 gives the lower bound; hi <= 2 gives B_hi + 1, tightened to B_hi
    // when the upper path landed exactly on 1.
    if hi != one {
        hi_bits += 1u32;
    }
    (lo_bits, hi_bits)
}

/// Interval containing `log2(m!)`, the exact dyadic sum of [`log2_nat`] over `2..=m`.
pub fn log2_factorial(m: u64, p: Precision) -> LogInterval {
    if m < 2 {
        return LogInterval::point(Dyadic::zero());
    }
    let key = (m, p.bits());
    if let Some(hit) = memo_get(factorial_memo(), key) {
        return hit;
    }
    // Resume from the largest memoized prefix below m, if any.
    let (mut start, mut acc) = {
        let memo = factorial_memo().read().unwrap_or_else(|e| e.into_inner());
        let mut best = (2u64, LogInterval::point(Dyadic::zero()));
        for (&(mm, f), v) in memo.iter() {
            if f == p.bits() && mm < m && mm + 1 > best.0 {
                best = (mm + 1, v.clone());
            }
        }
        best
    };
    while start <= m {
        acc = acc.add(&log2_nat(&BigUint::from(start), p));
        start += 1;
    }
    memo_put(factorial_memo(), key, &acc);
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    fn prec(f: u32) -> Precision {
        Precision::new(f).unwrap()
    }

    #[test]
    fn powers_of_two_are_exact() {
        for j in 0..70u32 {
            let iv = log2_nat(&(BigUint::one() << j), prec(16));
            assert_eq!(iv.lo(), &Dyadic::from_int(j));
            assert_eq!(iv.hi(), &Dyadic::from_int(j));
        }
    }

    #[test]
    fn log2_of_six() {
        // log2 6 = 2.584962500721156181453738943947816508759...
        let iv = log2_nat(&BigUint::from(6u32), prec(20));
        assert!(iv.width() <= Dyadic::pow2(-19));
        assert!(iv.lo().to_decimal(12, crate::certified::Round::Down).as_str() <= "2.584962500721");
        assert!(iv.hi().to_decimal(12, crate::certified::Round::Up).as_str() >= "2.584962500722");
    }

    #[test]
    fn factorials() {
        assert_eq!(log2_factorial(0, prec(20)), LogInterval::point(Dyadic::zero()));
        assert_eq!(log2_factorial(1, prec(20)), LogInterval::point(Dyadic::zero()));
        let three = log2_factorial(3, prec(20));
        assert_eq!(three.lo().floor(), BigInt::from(2));
        // log2(10!) = 21.79106111471695352899...
        let ten = log2_factorial(10, prec(20));
        assert!(ten.lo().to_f64() <= 21.791061114716953);
        assert!(ten.hi().to_f64() >= 21.791061114716953);
        assert!(ten.width() <= Dyadic::pow2(-19).mul_int(&BigInt::from(9)));
        // Resuming from a memoized prefix gives the same answer as a cold start.
        let eleven = log2_factorial(11, prec(20));
        let direct = (2..=11u64).fold(LogInterval::point(Dyadic::zero()), |acc, i| {
            acc.add(&log2_nat(&BigUint::from(i), prec(20)))
        });
        assert_eq!(eleven, direct);
    }

    #[test]
    fn width_bound_holds_across_precisions() {
        for f in [8u32, 9, 16, 31, 64, 200] {
            for m in [3u64, 5, 7, 1000, 999_983, 1 << 40 | 1] {
                let iv = log2_nat(&BigUint::from(m), prec(f));
                assert!(iv.width() <= Dyadic::pow2(1 - f as i64), "m={m} f={f}");
                assert!(iv.lo() <= iv.hi());
            }
        }
    }

    #[test]
    fn huge_arguments() {
        // 3^1000 has log2 = 1000 * 1.58496250072115618...
        let m = num_traits::Pow::pow(BigUint::from(3u32), 1000u32);
        let iv = log2_nat(&m, prec(32));
        assert!(iv.lo().to_f64() <= 1584.962500721156 && iv.hi().to_f64() >= 1584.962500721156);
    }
}
