//! Writes JSON and CSV reports for a scan into a directory.
//!
//! `cargo run --example report_export -- [dir]` (defaults to `./reports`)

use std::fs;
use std::path::PathBuf;

use factorial_powers::scan::{diff_expected, scan_equation, DiffResult};
use factorial_powers::{get_catalog, ComparePolicy};

fn main() -> std::io::Result<()> {
    let dir = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "reports".into()));
    fs::create_dir_all(&dir)?;
    for eq in &get_catalog().equations {
        let mut report = scan_equation(eq, 12, 12, &ComparePolicy::default()).expect("decidable");
        assert_eq!(diff_expected(&report, eq), DiffResult::Match);
        // Without timings the files are identical from run to run.
        report.clear_timings();
        let stem = eq.id.to_lowercase();
        fs::write(dir.join(format!("{stem}.json")), report.to_json())?;
        fs::write(dir.join(format!("{stem}.csv")), report.to_csv())?;
        println!(
            "{}: {} pairs, {} solutions",
            eq.id,
            report.pairs.len(),
            report.solutions.len()
        );
    }
    println!("reports written to {}", dir.display());
    Ok(())
}
