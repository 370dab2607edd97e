//! Registry of the four factorial-power equations and the twenty inequalities
//! their proofs rest on.
//!
//! Each entry keeps its expressions as text (the form printed by `catalog
//! list`) alongside the parsed trees.

use std::fmt;
use std::sync::OnceLock;

use serde::Serialize;
use thiserror::Error;

use crate::compare::{Comparator, CompareError, ComparePolicy, Comparison, Verdict};
use crate::expr::{parse_expr, parse_expr_with_aux, Binding, Expr};

/// Which off-diagonal pairs are expected to solve an equation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ExpectedSolutions {
    /// Exactly the pairs with `k = n`.
    Diagonal,
    /// The diagonal plus `(1, 2)` and `(2, 1)`.
    DiagonalAndSporadic,
}

impl ExpectedSolutions {
    pub fn contains(self, k: u64, n: u64) -> bool {
        k == n || (self == ExpectedSolutions::DiagonalAndSporadic && matches!((k, n), (1, 2) | (2, 1)))
    }
}

#[derive(Clone, Debug)]
pub struct EquationSpec {
    pub id: &'static str,
    pub lhs_text: &'static str,
    pub rhs_text: &'static str,
    pub lhs: Expr,
    pub rhs: Expr,
    pub expected: ExpectedSolutions,
    pub anchor: &'static str,
}

impl EquationSpec {
    /// Whether `(k, n)` is claimed to be a solution.
    pub fn expected(&self, k: u64, n: u64) -> bool {
        self.expected.contains(k, n)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    Greater,
    GreaterOrEqual,
}

impl Relation {
    pub fn holds(self, v: Verdict) -> bool {
        match self {
            Relation::Greater => v == Verdict::Greater,
            Relation::GreaterOrEqual => v != Verdict::Less,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Relation::Greater => ">",
            Relation::GreaterOrEqual => ">=",
        }
    }
}

/// Parameter domain of an inequality.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Domain {
    /// Only `k` occurs, `k >= min`.
    K { min: u64 },
    /// Only `n` occurs, `n >= min`.
    N { min: u64 },
    /// `n > k >= k_min`.
    Ordered { k_min: u64 },
    /// `k >= k_min` and `0 <= j <= k - 1`.
    KWithIndex { k_min: u64 },
    /// `k >= k_min` and `n >= n_min`, independently.
    Independent { k_min: u64, n_min: u64 },
}

impl Domain {
    pub fn contains(&self, b: &Binding) -> bool {
        match *self {
            Domain::K { min } => b.k >= min && b.aux.is_none(),
            Domain::N { min } => b.n >= min && b.aux.is_none(),
            Domain::Ordered { k_min } => b.k >= k_min && b.n > b.k && b.aux.is_none(),
            Domain::KWithIndex { k_min } => b.k >= k_min && b.aux.is_some_and(|j| j < b.k),
            Domain::Independent { k_min, n_min } => b.k >= k_min && b.n >= n_min && b.aux.is_none(),
        }
    }

    /// Smallest value of the leading parameter.
    pub fn min(&self) -> u64 {
        match *self {
            Domain::K { min } | Domain::N { min } => min,
            Domain::Ordered { k_min } | Domain::KWithIndex { k_min } | Domain::Independent { k_min, .. } => k_min,
        }
    }
}

impl fmt::Display for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Domain::K { min } => write!(f, "k >= {min}"),
            Domain::N { min } => write!(f, "n >= {min}"),
            Domain::Ordered { k_min } => write!(f, "n > k >= {k_min}"),
            Domain::KWithIndex { k_min } => write!(f, "k >= {k_min}, 0 <= j <= k-1"),
            Domain::Independent { k_min, n_min } => write!(f, "k >= {k_min}, n >= {n_min}"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct InequalitySpec {
    pub id: &'static str,
    pub lhs_text: &'static str,
    pub rhs_text: &'static str,
    pub lhs: Expr,
    pub rhs: Expr,
    pub relation: Relation,
    pub domain: Domain,
    pub anchor: &'static str,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CheckError {
    #[error("binding k={}, n={}{} is outside the domain {domain}", .binding.k, .binding.n,
        .binding.aux.map(|j| format!(", j={j}")).unwrap_or_default())]
    OutOfDomain { binding: Binding, domain: Domain },
    #[error(transparent)]
    Compare(#[from] CompareError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CheckOutcome {
    Holds(Comparison),
    Fails {
        counterexample: Binding,
        comparison: Comparison,
    },
}

impl CheckOutcome {
    pub fn holds(&self) -> bool {
        matches!(self, CheckOutcome::Holds(_))
    }

    pub fn comparison(&self) -> &Comparison {
        match self {
            CheckOutcome::Holds(c) | CheckOutcome::Fails { comparison: c, .. } => c,
        }
    }
}

impl InequalitySpec {
    /// Checks the inequality at one in-domain binding using `comparator`.
    pub fn check(&self, comparator: &Comparator, b: &Binding) -> Result<CheckOutcome, CheckError> {
        if !self.domain.contains(b) {
            return Err(CheckError::OutOfDomain {
                binding: *b,
                domain: self.domain,
            });
        }
        let comparison = comparator.compare_instance(&self.lhs, &self.rhs, b)?;
        Ok(if self.relation.holds(comparison.verdict) {
            CheckOutcome::Holds(comparison)
        } else {
            CheckOutcome::Fails {
                counterexample: *b,
                comparison,
            }
        })
    }
}

/// Checks `spec` at `b` under `policy`.
pub fn check_inequality(
    spec: &InequalitySpec,
    b: &Binding,
    policy: &ComparePolicy,
) -> Result<CheckOutcome, CheckError> {
    spec.check(&Comparator::new(policy.clone()), b)
}

#[derive(Debug)]
pub struct Catalog {
    pub equations: Vec<EquationSpec>,
    pub inequalities: Vec<InequalitySpec>,
}

impl Catalog {
    /// Case-insensitive lookup.
    pub fn equation(&self, id: &str) -> Option<&EquationSpec> {
        self.equations.iter().find(|e| e.id.eq_ignore_ascii_case(id))
    }

    /// Case-insensitive lookup.
    pub fn inequality(&self, id: &str) -> Option<&InequalitySpec> {
        self.inequalities.iter().find(|e| e.id.eq_ignore_ascii_case(id))
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(CatalogView::from(self)).expect("catalog serializes")
    }
}

#[derive(Serialize)]
struct CatalogView<'a> {
    equations: Vec<EquationView<'a>>,
    inequalities: Vec<InequalityView<'a>>,
}

#[derive(Serialize)]
struct EquationView<'a> {
    id: &'a str,
    lhs: &'a str,
    rhs: &'a str,
    relation: &'a str,
    expected_solutions: ExpectedSolutions,
    anchor: &'a str,
}

#[derive(Serialize)]
struct InequalityView<'a> {
    id: &'a str,
    lhs: &'a str,
    rhs: &'a str,
    relation: &'a str,
    domain: String,
    anchor: &'a str,
}

impl<'a> From<&'a Catalog> for CatalogView<'a> {
    fn from(c: &'a Catalog) -> Self {
        CatalogView {
            equations: c
                .equations
                .iter()
                .map(|e| EquationView {
                    id: e.id,
                    lhs: e.lhs_text,
                    rhs: e.rhs_text,
                    relation: "=",
                    expected_solutions: e.expected,
                    anchor: e.anchor,
                })
                .collect(),
            inequalities: c
                .inequalities
                .iter()
                .map(|i| InequalityView {
                    id: i.id,
                    lhs: i.lhs_text,
                    rhs: i.rhs_text,
                    relation: i.relation.symbol(),
                    domain: i.domain.to_string(),
                    anchor: i.anchor,
                })
                .collect(),
        }
    }
}

/// The immutable registry.
pub fn get_catalog() -> &'static Catalog {
    static CATALOG: OnceLock<Catalog> = OnceLock::new();
    CATALOG.get_or_init(build)
}

fn equation(
    id: &'static str,
    lhs_text: &'static str,
    rhs_text: &'static str,
    expected: ExpectedSolutions,
    anchor: &'static str,
) -> EquationSpec {
    EquationSpec {
        id,
        lhs_text,
        rhs_text,
        lhs: parse_expr(lhs_text).expect("catalog expression parses"),
        rhs: parse_expr(rhs_text).expect("catalog expression parses"),
        expected,
        anchor,
    }
}

fn inequality(
    id: &'static str,
    lhs_text: &'static str,
    relation: Relation,
    rhs_text: &'static str,
    domain: Domain,
    anchor: &'static str,
) -> InequalitySpec {
    InequalitySpec {
        id,
        lhs_text,
        rhs_text,
        lhs: parse_expr_with_aux(lhs_text).expect("catalog expression parses"),
        rhs: parse_expr_with_aux(rhs_text).expect("catalog expression parses"),
        relation,
        domain,
        anchor,
    }
}

fn build() -> Catalog {
    use Domain::*;
    use ExpectedSolutions::*;
    use Relation::*;

    let equations = vec![
        equation(
            "T1",
            "(k!)^(n!) - k^n",
            "(n!)^(k!) - n^k",
            DiagonalAndSporadic,
            "Theorem, minus sign with factorial exponents: solutions are k = n and (k,n) in {(1,2),(2,1)}",
        ),
        equation(
            "T2",
            "(k!)^(n!) + k^n",
            "(n!)^(k!) + n^k",
            Diagonal,
            "Theorem, plus sign with factorial exponents: solutions are exactly k = n",
        ),
        equation(
            "T3",
            "(k!)^n - k^(n!)",
            "(n!)^k - n^(k!)",
            DiagonalAndSporadic,
            "Theorem, minus sign with factorial exponents on k^ and n^: solutions are k = n and (k,n) in {(1,2),(2,1)}",
        ),
        equation(
            "T4",
            "(k!)^n + k^(n!)",
            "(n!)^k + n^(k!)",
            Diagonal,
            "Theorem, plus sign with factorial exponents on k^ and n^: solutions are exactly k = n",
        ),
    ];

    let inequalities = vec![
        inequality(
            "I1",
            "2^(n!) - 2^n",
            Greater,
            "(n!)^2",
            N { min: 3 },
            "T1, case k = 2: 2^(n!) - 2^n > (n!)^2 for n > 2",
        ),
        inequality(
            "I2",
            "2^((n-1)!)",
            Greater,
            "2*(n!)^2",
            N { min: 5 },
            "T1, case k = 2: induction bound inside the lemma, starting at n = 5",
        ),
        inequality(
            "I3",
            "k^((k+1)!)",
            Greater,
            "((k+1)!)^k + (k+1)^(k!)",
            K { min: 3 },
            "Lemma k^((k+1)!) > ((k+1)!)^k + (k+1)^(k!), the base case of both double inductions",
        ),
        inequality(
            "I4",
            "(k+1)^(k!*(k+2))",
            Greater,
            "(k+2)^((k+1)!)",
            K { min: 3 },
            "Induction step of I3: bound on the last binomial term",
        ),
        inequality(
            "I5",
            "(k+2)*((k+1)!)^k*(k+1)^(k!*(k+1))",
            Greater,
            "((k+2)!)^(k+1)",
            K { min: 3 },
            "Induction step of I3: bound on the next-to-last binomial term",
        ),
        inequality(
            "I6",
            "(k+1)^(k+2)",
            Greater,
            "(k+2)^(k+1)",
            K { min: 3 },
            "Induction step of I3: (k+1)^(k+2) > (k+2)^(k+1)",
        ),
        inequality(
            "I7",
            "(k!)^((k+1)!)",
            Greater,
            "((k+1)!)^(k!) + k^(k+1)",
            K { min: 3 },
            "T1, case k >= 3: induction start at n = k + 1",
        ),
        inequality(
            "I8",
            "((k-1)!)^((k+1)!) * (k+1)^(k!)",
            Greater,
            "((k+1)!)^(k!)",
            K { min: 3 },
            "T1, induction start: first factor bound",
        ),
        inequality(
            "I9",
            "((k-1)!)^((k+1)!) * ((k+1)!)^k",
            Greater,
            "k^(k+1)",
            K { min: 3 },
            "T1, induction start: second factor bound",
        ),
        inequality(
            "I10",
            "(k!)^(n!)",
            Greater,
            "(n!)^(k!) + k^n",
            Ordered { k_min: 3 },
            "T1, case k >= 3: (k!)^(n!) > (n!)^(k!) + k^n for n > k",
        ),
        inequality(
            "I11",
            "k^n",
            Greater,
            "n^k",
            Ordered { k_min: 3 },
            "T2, case k >= 3: k^n > n^k for n > k",
        ),
        inequality(
            "I12",
            "(k!)^(k-1)",
            GreaterOrEqual,
            "k^k",
            K { min: 3 },
            "T2, final contradiction: k^(k/(k-1)) <= k!, stated as k^k <= (k!)^(k-1)",
        ),
        inequality(
            "I13",
            "(n!)^k",
            Greater,
            "(k!)^n",
            Ordered { k_min: 3 },
            "T3, case k >= 3: (n!)^k > (k!)^n for n > k",
        ),
        inequality(
            "I14",
            "(n!)^(n-1)",
            Greater,
            "n+1",
            N { min: 3 },
            "T1, induction step in n: (n!)^(n-1) > n + 1",
        ),
        inequality(
            "I15",
            "((k-1)!)^k",
            Greater,
            "k",
            K { min: 3 },
            "T1, induction start: ((k-1)!)^k > k",
        ),
        inequality(
            "I16",
            "(k+1)^(k+1)",
            Greater,
            "(k-j)*(k+2)",
            KWithIndex { k_min: 3 },
            "Induction step of I3: (k+1)^(k+1) > (k-j)(k+2) for every j in 0..k-1",
        ),
        inequality(
            "I17",
            "k^(n!)",
            Greater,
            "n^(k!)",
            Ordered { k_min: 3 },
            "T3, case k >= 3: k^(n!) > n^(k!) for n > k",
        ),
        inequality(
            "I18",
            "k^(n!)",
            Greater,
            "(n!)^k + n^(k!)",
            Ordered { k_min: 3 },
            "T4, case k >= 3: k^(n!) > (n!)^k + n^(k!) for n > k",
        ),
        inequality(
            "I19",
            "(n+1)*(n!)^k*n^(k!*n)",
            Greater,
            "((n+1)!)^k",
            Ordered { k_min: 3 },
            "T4, induction step in n: first inequality",
        ),
        inequality(
            "I20",
            "n^(k!*(n+1))",
            Greater,
            "(n+1)^(k!)",
            Independent { k_min: 3, n_min: 2 },
            "T4, induction step in n: second inequality",
        ),
    ];

    Catalog {
        equations,
        inequalities,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn at(k: u64, n: u64) -> Binding {
        Binding::new(k, n).unwrap()
    }

    #[test]
    fn registry_shape() {
        let c = get_catalog();
        assert_eq!(c.equations.len(), 4);
        assert_eq!(c.inequalities.len(), 20);
        for (i, spec) in c.inequalities.iter().enumerate() {
            assert_eq!(spec.id, format!("I{}", i + 1));
            assert!(!spec.anchor.is_empty());
        }
        assert!(c.equations.iter().all(|e| !e.anchor.is_empty()));
        assert!(c.equation("t1").is_some());
        assert!(c.equation("t9").is_none());
        assert!(c.inequality("i16").is_some());
    }

    #[test]
    fn expected_predicates() {
        let c = get_catalog();
        let t1 = c.equation("T1").unwrap();
        assert!(t1.expected(1, 2));
        assert!(t1.expected(2, 1));
        assert!(!t1.expected(1, 3));
        assert!(t1.expected(7, 7));
        let t2 = c.equation("T2").unwrap();
        assert!(!t2.expected(1, 2));
        assert!(t2.expected(4, 4));
    }

    #[test]
    fn index_domain() {
        let i16 = get_catalog().inequality("I16").unwrap();
        let js: Vec<u64> = (0..10)
            .filter(|&j| i16.domain.contains(&at(3, 1).with_aux(j)))
            .collect();
        assert_eq!(js, vec![0, 1, 2]);
        assert!(!i16.domain.contains(&at(3, 1)));
    }

    #[test]
    fn domain_guards_are_exact() {
        let c = get_catalog();
        let i11 = c.inequality("I11").unwrap();
        // 2^4 = 4^2, but (2, 4) is outside n > k >= 3.
        assert!(matches!(
            check_inequality(i11, &at(2, 4), &ComparePolicy::default()),
            Err(CheckError::OutOfDomain { .. })
        ));
        assert!(matches!(
            check_inequality(i11, &at(4, 4), &ComparePolicy::default()),
            Err(CheckError::OutOfDomain { .. })
        ));
    }

    #[test]
    fn spot_checks() {
        let c = get_catalog();
        let policy = ComparePolicy::default();
        // 56 > 36
        assert!(check_inequality(c.inequality("I1").unwrap(), &at(1, 3), &policy)
            .unwrap()
            .holds());
        // 1024 > 625
        assert!(check_inequality(c.inequality("I6").unwrap(), &at(3, 1), &policy)
            .unwrap()
            .holds());
        // 36 >= 27
        assert!(check_inequality(c.inequality("I12").unwrap(), &at(3, 1), &policy)
            .unwrap()
            .holds());
    }

    #[test]
    fn i14_is_false_at_two() {
        // (2!)^1 = 2 is not greater than 3, which is why the domain starts at n = 3.
        let i14 = get_catalog().inequality("I14").unwrap();
        let outside = InequalitySpec {
            domain: Domain::N { min: 2 },
            ..i14.clone()
        };
        let outcome = check_inequality(&outside, &at(1, 2), &ComparePolicy::default()).unwrap();
        assert!(matches!(outcome, CheckOutcome::Fails { .. }));
        assert_eq!(outcome.comparison().verdict, Verdict::Less);
    }

    #[test]
    fn expressions_round_trip_through_the_printer() {
        let c = get_catalog();
        for e in &c.equations {
            assert_eq!(parse_expr(&e.lhs.to_string()).unwrap(), e.lhs);
            assert_eq!(parse_expr(&e.rhs.to_string()).unwrap(), e.rhs);
        }
        for i in &c.inequalities {
            assert_eq!(parse_expr_with_aux(&i.lhs.to_string()).unwrap(), i.lhs);
            assert_eq!(parse_expr_with_aux(&i.rhs.to_string()).unwrap(), i.rhs);
        }
    }

    #[test]
    fn json_listing() {
        let v = get_catalog().to_json();
        assert_eq!(v["equations"].as_array().unwrap().len(), 4);
        assert_eq!(v["inequalities"][15]["domain"], "k >= 3, 0 <= j <= k-1");
        assert_eq!(v["inequalities"][0]["relation"], ">");
        assert_eq!(v["equations"][0]["expected_solutions"], "diagonal_and_sporadic");
    }
}
