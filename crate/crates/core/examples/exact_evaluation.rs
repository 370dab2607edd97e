//! Parsing, size estimates and budgeted exact evaluation.
//!
//! `cargo run --example exact_evaluation`

use factorial_powers::expr::{estimate_bits, eval_exact, DEFAULT_EXACT_BUDGET_BITS};
use factorial_powers::{parse_expr, substitute, Binding};

fn main() {
    let lhs = parse_expr("(k!)^(n!) - k^n").unwrap();
    let rhs = parse_expr("(n!)^(k!) - n^k").unwrap();
    println!("parsed: {lhs}  vs  {rhs}");

    for (k, n) in [(1, 2), (2, 1), (2, 3), (3, 4), (3, 10)] {
        let b = Binding::new(k, n).unwrap();
        let l = substitute(&lhs, &b).unwrap();
        let r = substitute(&rhs, &b).unwrap();
        let est = estimate_bits(&l).map(|e| e.upper_bound_bits);
        match (
            eval_exact(&l, DEFAULT_EXACT_BUDGET_BITS),
            eval_exact(&r, DEFAULT_EXACT_BUDGET_BITS),
        ) {
            (Ok(a), Ok(c)) if a.bits() <= 64 && c.bits() <= 64 => println!("({k},{n}): {a} vs {c}"),
            (Ok(a), Ok(c)) => println!("({k},{n}): {}-bit vs {}-bit values", a.bits(), c.bits()),
            (Err(e), _) | (_, Err(e)) => println!("({k},{n}): lhs estimated at {est:?} bits; {e}"),
        }
    }

    let b = Binding::new(1, 1).unwrap();
    let spot = |s: &str| eval_exact(&substitute(&parse_expr(s).unwrap(), &b).unwrap(), 1 << 16).unwrap();
    println!("3^(4!) = {}", spot("3^(4!)"));
    println!("4!^3 + 4^(3!) = {}", spot("4!^3 + 4^(3!)"));
}
