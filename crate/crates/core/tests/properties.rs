mod common;

use factorial_powers::certified::{log2_nat, Dyadic, Precision};
use factorial_powers::expr::{estimate_bits, eval_exact, normalize, structurally_equal};
use factorial_powers::scan::Scanner;
use factorial_powers::{compare, get_catalog, substitute, Binding, ClosedExpr, ComparePolicy, Expr};
use num_bigint::BigUint;
use proptest::prelude::*;

use common::{interval_contains, log2_oracle, reference_closed, reference_eval, Env, ORACLE_LIMIT_BITS};

fn leaf() -> impl Strategy<Value = Expr> {
    prop_oneof![
        3 => (0u64..=12).prop_map(Expr::constant),
        2 => Just(Expr::k()),
        2 => Just(Expr::n()),
    ]
}

fn expr() -> impl Strategy<Value = Expr> {
    leaf().prop_recursive(4, 24, 2, |inner| {
        prop_oneof![
            leaf().prop_map(Expr::fact),
            (inner.clone(), leaf()).prop_map(|(b, e)| b.pow(e)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a + b),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a - b),
            (inner.clone(), inner).prop_map(|(a, b)| a * b),
        ]
    })
}

fn closed_expr() -> impl Strategy<Value = ClosedExpr> {
    (expr(), 1u64..=6, 1u64..=6).prop_map(|(e, k, n)| substitute(&e, &Binding::new(k, n).unwrap()).unwrap())
}

fn fits(e: &ClosedExpr) -> bool {
    estimate_bits(e).is_ok_and(|s| s.upper_bound_bits <= ORACLE_LIMIT_BITS)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn substitution_is_sound(e in expr(), k in 1u64..=9, n in 1u64..=9) {
        let closed = substitute(&e, &Binding::new(k, n).unwrap()).unwrap();
        prop_assume!(fits(&closed));
        let want = reference_eval(&e, &Env { k, n, j: 0 });
        match eval_exact(&closed, ORACLE_LIMIT_BITS) {
            Ok(v) => prop_assert_eq!(Some(v), want),
            // Domain errors (negative factorials or exponents) are errors for both.
            Err(_) => prop_assert!(want.is_none()),
        }
    }

    #[test]
    fn estimates_bound_the_true_size(e in closed_expr()) {
        prop_assume!(fits(&e));
        if let Some(v) = reference_closed(&e) {
            prop_assert!(estimate_bits(&e).unwrap().upper_bound_bits >= v.bits());
        }
    }

    #[test]
    fn comparison_is_antisymmetric(a in closed_expr(), b in closed_expr()) {
        prop_assume!(fits(&a) && fits(&b));
        prop_assume!(reference_closed(&a).is_some() && reference_closed(&b).is_some());
        let policy = ComparePolicy::default().with_immediate_exact_bits(0);
        let ab = compare(&a, &b, &policy).unwrap();
        let ba = compare(&b, &a, &policy).unwrap();
        prop_assert_eq!(ab.verdict, ba.verdict.reverse());
        let truth = reference_closed(&a).unwrap().cmp(&reference_closed(&b).unwrap());
        prop_assert_eq!(ab.verdict, factorial_powers::Verdict::from_ordering(truth));
    }

    #[test]
    fn structural_equality_implies_equal_values(a in closed_expr(), b in closed_expr()) {
        prop_assume!(fits(&a) && fits(&b));
        if structurally_equal(a.expr(), b.expr()) {
            prop_assert_eq!(reference_closed(&a), reference_closed(&b));
        }
        let na = ClosedExpr::new(normalize(a.expr())).unwrap();
        prop_assert_eq!(reference_closed(&na), reference_closed(&a));
    }

    #[test]
    fn log2_nat_contains_the_oracle(bytes in prop::collection::vec(any::<u8>(), 1..200), f in 8u32..300) {
        let m = BigUint::from_bytes_le(&bytes);
        prop_assume!(m.bits() > 0);
        let iv = log2_nat(&m, Precision::new(f).unwrap());
        prop_assert!(interval_contains(iv.lo(), iv.hi(), &log2_oracle(&m)));
        prop_assert!(iv.width() <= Dyadic::pow2(1 - f as i64));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn scans_are_order_independent(eq in 0usize..4, k_max in 1u64..=12, n_max in 1u64..=12) {
        let eq = &get_catalog().equations[eq];
        let mut par = Scanner::new(ComparePolicy::default()).scan_equation(eq, k_max, n_max).unwrap();
        let mut seq = Scanner::new(ComparePolicy::default()).sequential().scan_equation(eq, k_max, n_max).unwrap();
        par.clear_timings();
        seq.clear_timings();
        prop_assert_eq!(par.to_json(), seq.to_json());
        prop_assert_eq!(par.to_csv(), seq.to_csv());
    }
}
