//! Compares expressions and shows which tier certified each verdict.
//!
//! `cargo run --example compare_expressions`

use factorial_powers::{compare, compare_instance, parse_expr, Binding, ClosedExpr, ComparePolicy};

fn closed(text: &str) -> ClosedExpr {
    ClosedExpr::new(parse_expr(text).unwrap()).unwrap()
}

fn main() {
    let policy = ComparePolicy::default();

    // Same canonical form: no arithmetic at all.
    let c = compare(&closed("3 * (2 + 7!)"), &closed("(7! + 2) * 3"), &policy).unwrap();
    println!("3*(2+7!) vs (7!+2)*3           -> {} ({})", c.verdict, c.certificate);

    // Small enough to evaluate.
    let c = compare(&closed("3^(4!)"), &closed("4!^3 + 4^(3!)"), &policy).unwrap();
    println!("3^(4!) vs 4!^3 + 4^(3!)        -> {} ({})", c.verdict, c.certificate);

    // Millions of digits: decided from log2 enclosures.
    let lhs = parse_expr("(k!)^(n!) - k^n").unwrap();
    let rhs = parse_expr("(n!)^(k!) - n^k").unwrap();
    for (k, n) in [(2, 3), (3, 10), (5, 18), (18, 5)] {
        let c = compare_instance(&lhs, &rhs, &Binding::new(k, n).unwrap(), &policy).unwrap();
        println!(
            "T1 sides at (k, n) = ({k:>2}, {n:>2})  -> {} ({})",
            c.verdict, c.certificate
        );
    }

    // Equal values in different shapes, too large to evaluate: the comparator
    // refuses to guess.
    let tight = ComparePolicy::new(&[32, 64], 4096).unwrap();
    match compare(&closed("(2^(20!))^2"), &closed("4^(20!)"), &tight) {
        Ok(c) => println!("unexpected: {c:?}"),
        Err(e) => println!("(2^(20!))^2 vs 4^(20!)         -> {e}"),
    }
}
