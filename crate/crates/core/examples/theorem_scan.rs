//! Scans all four equations over a 20 x 20 grid and checks the solution sets.
//!
//! Run with `cargo run --release --example theorem_scan [max]`.

use factorial_powers::scan::{diff_expected, DiffResult, Scanner};
use factorial_powers::{get_catalog, ComparePolicy};

fn main() {
    let max: u64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(20);
    let scanner = Scanner::new(ComparePolicy::default());
    for eq in &get_catalog().equations {
        let report = scanner.scan_equation(eq, max, max).expect("every pair is decidable");
        let verdict = match diff_expected(&report, eq) {
            DiffResult::Match => "matches".to_string(),
            DiffResult::Mismatch { missing, spurious } => format!("MISMATCH missing={missing:?} spurious={spurious:?}"),
        };
        let sols: Vec<String> = report
            .solution_set()
            .iter()
            .filter(|(k, n)| k != n)
            .map(|(k, n)| format!("({k},{n})"))
            .collect();
        println!(
            "{}: {} = {}\n    off-diagonal solutions: [{}]  {verdict}  tiers {:?}  {} ms",
            eq.id,
            eq.lhs_text,
            eq.rhs_text,
            sols.join(", "),
            report.tiers,
            report.elapsed_ms
        );
    }
    println!("{:?}", scanner.comparator().stats());
}
