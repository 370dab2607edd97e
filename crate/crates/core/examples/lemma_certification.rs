//! Certifies every registered inequality over its default range.
//!
//! `cargo run --release --example lemma_certification`

use factorial_powers::compare::Tier;
use factorial_powers::scan::{default_bounds, Scanner};
use factorial_powers::{get_catalog, ComparePolicy};

fn main() {
    let scanner = Scanner::new(ComparePolicy::default());
    let mut all_hold = true;
    for spec in &get_catalog().inequalities {
        let bounds = default_bounds(spec);
        let report = scanner
            .scan_inequality(spec, &bounds)
            .expect("decidable under the default policy");
        all_hold &= report.failures.is_empty();
        println!(
            "{:<4} {:>4} bindings  exact {:>4}  log {:>4}  {}",
            spec.id,
            report.pairs.len(),
            report.tier_count(Tier::Exact),
            report.tier_count(Tier::LogSeparation),
            if report.failures.is_empty() { "holds" } else { "FAILS" }
        );
    }
    let stats = scanner.comparator().stats();
    println!(
        "{} comparisons, highest precision used: {} bits",
        stats.comparisons, stats.max_precision_used
    );
    std::process::exit(if all_hold { 0 } else { 2 });
}
