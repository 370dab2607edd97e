//! Exhaustive scans of equations and inequalities over parameter ranges.
//!
//! Pairs are independent and may be evaluated on the rayon pool; records are
//! always assembled in `(k, n, j)` order so reports are reproducible.

use std::collections::{BTreeMap, BTreeSet};
use std::io;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::catalog::{CheckError, CheckOutcome, Domain, EquationSpec, InequalitySpec};
use crate::compare::{Certificate, Comparator, CompareError, ComparePolicy, Comparison, Tier, Verdict};
use crate::expr::Binding;

/// Inclusive parameter bounds for an inequality scan.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ScanBounds {
    pub k: (u64, u64),
    pub n: (u64, u64),
    /// Restrict to `n > k` even when the domain does not require it.
    pub n_above_k: bool,
}

impl ScanBounds {
    /// Bounds covering `[from, to]` on the domain's leading parameters, with
    /// `k` additionally capped by `k_max` for two-parameter domains.
    pub fn for_domain(domain: &Domain, from: u64, to: u64, k_max: Option<u64>) -> Self {
        let kcap = k_max.map_or(to, |m| m.min(to));
        match domain {
            Domain::K { .. } | Domain::KWithIndex { .. } => ScanBounds {
                k: (from, to),
                n: (1, 1),
                n_above_k: false,
            },
            Domain::N { .. } => ScanBounds {
                k: (1, 1),
                n: (from, to),
                n_above_k: false,
            },
            Domain::Ordered { .. } | Domain::Independent { .. } => ScanBounds {
                k: (from, kcap),
                n: (from, to),
                n_above_k: true,
            },
        }
    }

    fn bindings(&self, domain: &Domain) -> Vec<Binding> {
        let mut out = Vec::new();
        for k in self.k.0.max(1)..=self.k.1 {
            for n in self.n.0.max(1)..=self.n.1 {
                if self.n_above_k && n <= k {
                    continue;
                }
                let b = Binding { k, n, aux: None };
                if let Domain::KWithIndex { .. } = domain {
                    out.extend((0..k).map(|j| b.with_aux(j)).filter(|b| domain.contains(b)));
                } else if domain.contains(&b) {
                    out.push(b);
                }
            }
        }
        out
    }
}

/// Default `(to, k_max)` for an inequality scan starting at the domain minimum.
pub fn default_range(spec: &InequalitySpec) -> (u64, Option<u64>) {
    match spec.id {
        "I1" | "I2" | "I12" | "I14" | "I15" => (60, None),
        "I16" => (20, None),
        "I19" | "I20" => (25, Some(10)),
        "I10" | "I11" | "I13" | "I17" | "I18" => (25, None),
        _ => (40, None),
    }
}

/// Default scan bounds per inequality: the domain minimum up to a desk-scale maximum.
pub fn default_bounds(spec: &InequalitySpec) -> ScanBounds {
    let (to, k_max) = default_range(spec);
    ScanBounds::for_domain(&spec.domain, spec.domain.min(), to, k_max)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TargetKind {
    Equation,
    Inequality,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Ranges {
    pub k: [u64; 2],
    pub n: [u64; 2],
}

/// One compared binding.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct PairRecord {
    pub k: u64,
    pub n: u64,
    pub j: Option<u64>,
    pub verdict: Verdict,
    pub tier: Tier,
    /// Fractional bits of the separating enclosures, for the log tier.
    pub precision: Option<u32>,
    /// Larger operand bit length, for the exact tier.
    pub exact_bits: Option<u64>,
    /// For inequality scans, whether the relation holds.
    pub holds: Option<bool>,
    pub wall_us: u64,
}

impl PairRecord {
    fn new(b: &Binding, c: &Comparison, holds: Option<bool>, wall_us: u64) -> Self {
        let (precision, exact_bits) = match c.certificate {
            Certificate::Structural => (None, None),
            Certificate::LogSeparation { precision } => (Some(precision), None),
            Certificate::Exact { bits } => (None, Some(bits)),
        };
        PairRecord {
            k: b.k,
            n: b.n,
            j: b.aux,
            verdict: c.verdict,
            tier: c.certificate.tier(),
            precision,
            exact_bits,
            holds,
            wall_us,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct Point {
    pub k: u64,
    pub n: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub j: Option<u64>,
}

impl From<&PairRecord> for Point {
    fn from(r: &PairRecord) -> Self {
        Point { k: r.k, n: r.n, j: r.j }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ScanReport {
    pub target: String,
    pub kind: TargetKind,
    pub ranges: Ranges,
    pub pairs: Vec<PairRecord>,
    /// Pairs with verdict `Equal`.
    pub solutions: Vec<Point>,
    /// Inequality scans only: bindings where the relation fails.
    pub failures: Vec<Point>,
    pub tiers: BTreeMap<Tier, u64>,
    pub elapsed_ms: u64,
}

impl ScanReport {
    fn assemble(target: &str, kind: TargetKind, ranges: Ranges, pairs: Vec<PairRecord>, elapsed_ms: u64) -> Self {
        let mut tiers: BTreeMap<Tier, u64> = [Tier::Structural, Tier::LogSeparation, Tier::Exact]
            .into_iter()
            .map(|t| (t, 0))
            .collect();
        for p in &pairs {
            *tiers.entry(p.tier).or_default() += 1;
        }
        let solutions = pairs
            .iter()
            .filter(|p| p.verdict == Verdict::Equal)
            .map(Point::from)
            .collect();
        let failures = pairs
            .iter()
            .filter(|p| p.holds == Some(false))
            .map(Point::from)
            .collect();
        ScanReport {
            target: target.to_string(),
            kind,
            ranges,
            pairs,
            solutions,
            failures,
            tiers,
            elapsed_ms,
        }
    }

    /// Solutions as `(k, n)` pairs.
    pub fn solution_set(&self) -> BTreeSet<(u64, u64)> {
        self.solutions.iter().map(|p| (p.k, p.n)).collect()
    }

    pub fn tier_count(&self, tier: Tier) -> u64 {
        self.tiers.get(&tier).copied().unwrap_or(0)
    }

    /// Zeroes every wall-time field, leaving a report that depends only on the inputs.
    pub fn clear_timings(&mut self) {
        self.elapsed_ms = 0;
        for p in &mut self.pairs {
            p.wall_us = 0;
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    /// One CSV row per pair.
    pub fn write_csv<W: io::Write>(&self, w: W) -> Result<(), csv::Error> {
        let mut out = csv::Writer::from_writer(w);
        for p in &self.pairs {
            out.serialize(p)?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn to_csv(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("csv is utf-8")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScanError {
    #[error("{target} at k={k}, n={n}{}: {source}", .j.map(|j| format!(", j={j}")).unwrap_or_default())]
    Undecided {
        target: String,
        k: u64,
        n: u64,
        j: Option<u64>,
        source: CompareError,
    },
    #[error("{target} at k={k}, n={n}: {source}")]
    Compare {
        target: String,
        k: u64,
        n: u64,
        source: CompareError,
    },
    #[error("scan bounds do not meet the domain of {0}")]
    EmptyBounds(String),
    #[error("scan range must start at 1 or above and be nonempty")]
    InvalidRange,
}

impl ScanError {
    fn at(target: &str, b: &Binding, source: CompareError) -> Self {
        match source {
            CompareError::Undecided { .. } => ScanError::Undecided {
                target: target.to_string(),
                k: b.k,
                n: b.n,
                j: b.aux,
                source,
            },
            other => ScanError::Compare {
                target: target.to_string(),
                k: b.k,
                n: b.n,
                source: other,
            },
        }
    }
}

/// Runs scans with a shared comparator.
pub struct Scanner {
    comparator: Comparator,
    parallel: bool,
}

impl Scanner {
    pub fn new(policy: ComparePolicy) -> Self {
        Scanner {
            comparator: Comparator::new(policy),
            parallel: true,
        }
    }

    /// Evaluate pairs one after another on the calling thread.
    pub fn sequential(mut self) -> Self {
        self.parallel = false;
        self
    }

    pub fn comparator(&self) -> &Comparator {
        &self.comparator
    }

    fn run<F>(&self, bindings: &[Binding], f: F) -> Result<Vec<PairRecord>, ScanError>
    where
        F: Fn(&Binding) -> Result<PairRecord, ScanError> + Sync,
    {
        if self.parallel {
            bindings.par_iter().map(&f).collect()
        } else {
            bindings.iter().map(&f).collect()
        }
    }

    /// Classifies every `(k, n)` in `[1, k_max] x [1, n_max]`.
    pub fn scan_equation(&self, eq: &EquationSpec, k_max: u64, n_max: u64) -> Result<ScanReport, ScanError> {
        if k_max == 0 || n_max == 0 {
            return Err(ScanError::InvalidRange);
        }
        let start = Instant::now();
        let bindings: Vec<Binding> = (1..=k_max)
            .flat_map(|k| (1..=n_max).map(move |n| Binding { k, n, aux: None }))
            .collect();
        let pairs = self.run(&bindings, |b| {
            let t = Instant::now();
            let c = self
                .comparator
                .compare_instance(&eq.lhs, &eq.rhs, b)
                .map_err(|e| ScanError::at(eq.id, b, e))?;
            Ok(PairRecord::new(b, &c, None, micros(t)))
        })?;
        let ranges = Ranges {
            k: [1, k_max],
            n: [1, n_max],
        };
        Ok(ScanReport::assemble(
            eq.id,
            TargetKind::Equation,
            ranges,
            pairs,
            millis(start),
        ))
    }

    /// Checks every in-domain binding within `bounds`.
    pub fn scan_inequality(&self, spec: &InequalitySpec, bounds: &ScanBounds) -> Result<ScanReport, ScanError> {
        let start = Instant::now();
        let bindings = bounds.bindings(&spec.domain);
        if bindings.is_empty() {
            return Err(ScanError::EmptyBounds(spec.id.to_string()));
        }
        let pairs = self.run(&bindings, |b| {
            let t = Instant::now();
            let outcome = spec.check(&self.comparator, b).map_err(|e| match e {
                CheckError::Compare(c) => ScanError::at(spec.id, b, c),
                CheckError::OutOfDomain { .. } => unreachable!("bindings are filtered by the domain"),
            })?;
            let holds = matches!(outcome, CheckOutcome::Holds(_));
            Ok(PairRecord::new(b, outcome.comparison(), Some(holds), micros(t)))
        })?;
        let ranges = Ranges {
            k: [bounds.k.0, bounds.k.1],
            n: [bounds.n.0, bounds.n.1],
        };
        Ok(ScanReport::assemble(
            spec.id,
            TargetKind::Inequality,
            ranges,
            pairs,
            millis(start),
        ))
    }
}

fn micros(t: Instant) -> u64 {
    t.elapsed().as_micros().try_into().unwrap_or(u64::MAX)
}

fn millis(t: Instant) -> u64 {
    t.elapsed().as_millis().try_into().unwrap_or(u64::MAX)
}

pub fn scan_equation(
    eq: &EquationSpec,
    k_max: u64,
    n_max: u64,
    policy: &ComparePolicy,
) -> Result<ScanReport, ScanError> {
    Scanner::new(policy.clone()).scan_equation(eq, k_max, n_max)
}

pub fn scan_inequality(
    spec: &InequalitySpec,
    bounds: &ScanBounds,
    policy: &ComparePolicy,
) -> Result<ScanReport, ScanError> {
    Scanner::new(policy.clone()).scan_inequality(spec, bounds)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DiffResult {
    Match,
    Mismatch {
        missing: BTreeSet<(u64, u64)>,
        spurious: BTreeSet<(u64, u64)>,
    },
}

/// Compares found solutions with the expected set over the report's range.
pub fn diff_expected(report: &ScanReport, eq: &EquationSpec) -> DiffResult {
    let found = report.solution_set();
    let [k0, k1] = report.ranges.k;
    let [n0, n1] = report.ranges.n;
    let expected: BTreeSet<(u64, u64)> = (k0..=k1)
        .flat_map(|k| (n0..=n1).map(move |n| (k, n)))
        .filter(|&(k, n)| eq.expected(k, n))
        .collect();
    if found == expected {
        return DiffResult::Match;
    }
    DiffResult::Mismatch {
        missing: expected.difference(&found).copied().collect(),
        spurious: found.difference(&expected).copied().collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::get_catalog;

    fn eq(id: &str) -> &'static EquationSpec {
        get_catalog().equation(id).unwrap()
    }

    fn ineq(id: &str) -> &'static InequalitySpec {
        get_catalog().inequality(id).unwrap()
    }

    #[test]
    fn t1_and_t2_small_grids_match() {
        let policy = ComparePolicy::default();
        let r = scan_equation(eq("T1"), 10, 10, &policy).unwrap();
        assert_eq!(r.pairs.len(), 100);
        assert_eq!(diff_expected(&r, eq("T1")), DiffResult::Match);
        assert!(r.solution_set().contains(&(2, 1)));

        let r = scan_equation(eq("T2"), 10, 10, &policy).unwrap();
        let diag: BTreeSet<_> = (1..=10).map(|i| (i, i)).collect();
        assert_eq!(r.solution_set(), diag);
        for p in r.pairs.iter().filter(|p| p.k == p.n) {
            assert_eq!(p.tier, Tier::Structural);
        }
    }

    #[test]
    fn t4_at_two_three_is_not_a_solution() {
        // 8 + 64 = 72 against 36 + 9 = 45
        let r = scan_equation(eq("T4"), 3, 3, &ComparePolicy::default()).unwrap();
        let p = r.pairs.iter().find(|p| (p.k, p.n) == (2, 3)).unwrap();
        assert_eq!(p.verdict, Verdict::Greater);
        assert_eq!(p.tier, Tier::Exact);
    }

    #[test]
    fn records_are_ordered_and_complete() {
        let r = scan_equation(eq("T3"), 4, 6, &ComparePolicy::default()).unwrap();
        let keys: Vec<(u64, u64)> = r.pairs.iter().map(|p| (p.k, p.n)).collect();
        let want: Vec<(u64, u64)> = (1..=4).flat_map(|k| (1..=6).map(move |n| (k, n))).collect();
        assert_eq!(keys, want);
        assert_eq!(r.ranges, Ranges { k: [1, 4], n: [1, 6] });
    }

    #[test]
    fn sequential_and_parallel_agree() {
        let policy = ComparePolicy::default();
        let mut a = Scanner::new(policy.clone()).scan_equation(eq("T3"), 8, 8).unwrap();
        let mut b = Scanner::new(policy).sequential().scan_equation(eq("T3"), 8, 8).unwrap();
        a.clear_timings();
        b.clear_timings();
        assert_eq!(a, b);
        assert_eq!(a.to_json(), b.to_json());
        assert_eq!(a.to_csv(), b.to_csv());
    }

    #[test]
    fn diff_reports_missing_and_spurious() {
        let mut r = scan_equation(eq("T1"), 4, 4, &ComparePolicy::default()).unwrap();
        let full = r.solutions.clone();
        r.solutions.retain(|p| (p.k, p.n) != (2, 1));
        assert_eq!(
            diff_expected(&r, eq("T1")),
            DiffResult::Mismatch {
                missing: [(2, 1)].into(),
                spurious: BTreeSet::new()
            }
        );
        r.solutions = full;
        r.solutions.push(Point { k: 3, n: 4, j: None });
        assert_eq!(
            diff_expected(&r, eq("T1")),
            DiffResult::Mismatch {
                missing: BTreeSet::new(),
                spurious: [(3, 4)].into()
            }
        );
    }

    #[test]
    fn inequality_scans() {
        let policy = ComparePolicy::default();
        let r = scan_inequality(
            ineq("I16"),
            &ScanBounds::for_domain(&ineq("I16").domain, 3, 10, None),
            &policy,
        )
        .unwrap();
        assert_eq!(r.pairs.len(), (3..=10).sum::<u64>() as usize);
        assert!(r.failures.is_empty());

        let i10 = ineq("I10");
        let r = scan_inequality(i10, &ScanBounds::for_domain(&i10.domain, 3, 8, None), &policy).unwrap();
        assert!(r.pairs.iter().all(|p| p.n > p.k && p.k >= 3));
        assert_eq!(r.pairs.len(), 15);
        assert!(r.failures.is_empty());
    }

    #[test]
    fn i14_from_two_reports_the_counterexample() {
        let spec = InequalitySpec {
            domain: Domain::N { min: 2 },
            ..ineq("I14").clone()
        };
        let bounds = ScanBounds::for_domain(&spec.domain, 2, 6, None);
        let r = scan_inequality(&spec, &bounds, &ComparePolicy::default()).unwrap();
        assert_eq!(r.failures, vec![Point { k: 1, n: 2, j: None }]);
    }

    #[test]
    fn bounds_outside_the_domain_are_rejected() {
        let i2 = ineq("I2");
        let bounds = ScanBounds::for_domain(&i2.domain, 1, 4, None);
        assert_eq!(
            scan_inequality(i2, &bounds, &ComparePolicy::default()),
            Err(ScanError::EmptyBounds("I2".into()))
        );
    }

    #[test]
    fn default_bounds_follow_the_domain() {
        let b = default_bounds(ineq("I20"));
        assert_eq!((b.k, b.n, b.n_above_k), ((3, 10), (3, 25), true));
        let b = default_bounds(ineq("I2"));
        assert_eq!((b.k, b.n), ((1, 1), (5, 60)));
    }

    #[test]
    fn csv_has_one_row_per_pair() {
        let r = scan_equation(eq("T2"), 2, 3, &ComparePolicy::default()).unwrap();
        let csv = r.to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "k,n,j,verdict,tier,precision,exact_bits,holds,wall_us");
        assert_eq!(lines.len(), 7);
    }
}
