//! Prints certified enclosures of log2 |value| for a few huge expressions.
//!
//! `cargo run --release --example log_bounds`

use factorial_powers::certified::{bound_expr, log2_factorial, log2_nat, Precision, DEFAULT_LADDER};
use factorial_powers::{parse_expr, ClosedExpr};
use num_bigint::BigUint;

fn main() {
    for f in [16, 64, 256] {
        let p = Precision::new(f).unwrap();
        println!(
            "log2 6      at f={f:<3}: {}",
            log2_nat(&BigUint::from(6u32), p).to_decimal(20)
        );
        println!("log2 (20!)  at f={f:<3}: {}", log2_factorial(20, p).to_decimal(20));
    }

    for text in [
        "(7!)^(12!)",
        "(3!)^(20!) - 3^20",
        "2^(30!) + 3^(29!)",
        "(5!)^(4!) - (4!)^(5!)",
    ] {
        let e = ClosedExpr::new(parse_expr(text).unwrap()).unwrap();
        println!("{text}");
        for f in DEFAULT_LADDER.iter().take(4) {
            let m = bound_expr(&e, Precision::new(*f).unwrap()).unwrap();
            let iv = m.magnitude().unwrap();
            println!("  f={f:<4} sign {:?}  log2|v| in {}", m.sign(), iv.to_decimal(12));
        }
    }
}
