//! Command-line front end.
//!
//! Exit codes: 0 success, 2 mismatch or counterexample, 3 undecided,
//! 64 usage error, 1 I/O failure.
//!
//! `FACPOW_LADDER` (comma-separated precisions) and `FACPOW_BUDGET_BITS` set
//! the policy defaults; `--ladder` and `--budget` take priority over both.

use std::fmt::Write as _;
use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::catalog::{get_catalog, InequalitySpec};
use crate::certified::DEFAULT_LADDER;
use crate::compare::{Certificate, Comparator, CompareError, ComparePolicy, Comparison, Verdict};
use crate::expr::{parse_expr, parse_expr_with_aux, substitute, Binding, ExprError, DEFAULT_EXACT_BUDGET_BITS};
use crate::scan::{default_range, diff_expected, DiffResult, ScanBounds, ScanError, ScanReport, Scanner};

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 1;
pub const EXIT_MISMATCH: i32 = 2;
pub const EXIT_UNDECIDED: i32 = 3;
pub const EXIT_USAGE: i32 = 64;

pub const ENV_LADDER: &str = "FACPOW_LADDER";
pub const ENV_BUDGET: &str = "FACPOW_BUDGET_BITS";

#[derive(Parser, Debug)]
#[command(
    name = "facpow",
    version,
    about = "Certified verification of factorial-power equations and inequalities"
)]
struct Cli {
    /// Precision ladder in fractional bits, e.g. 32,64,128.
    #[arg(long, global = true, value_delimiter = ',')]
    ladder: Option<Vec<u32>>,
    /// Largest operand size in bits that may be evaluated exactly.
    #[arg(long, global = true)]
    budget: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Classify every (k, n) of a grid against an equation.
    Scan(ScanArgs),
    /// Verify inequalities over a parameter range.
    Lemma(LemmaArgs),
    /// Compare two expressions at one binding.
    Compare(CompareArgs),
    /// List the registered equations and inequalities.
    Catalog(CatalogArgs),
}

#[derive(Args, Debug)]
struct Output {
    #[arg(long, value_enum, default_value_t = Format::Table)]
    format: Format,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Zero all wall-time fields so reports are byte-reproducible.
    #[arg(long)]
    no_timings: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Table,
    Json,
    Csv,
}

#[derive(Args, Debug)]
struct ScanArgs {
    /// Equation id (T1 to T4).
    #[arg(long)]
    equation: String,
    /// Upper bound for both k and n.
    #[arg(long, default_value_t = 20)]
    max: u64,
    #[arg(long)]
    k_max: Option<u64>,
    #[arg(long)]
    n_max: Option<u64>,
    #[command(flatten)]
    output: Output,
}

#[derive(Args, Debug)]
struct LemmaArgs {
    /// Inequality id (I1 to I20).
    #[arg(long, required_unless_present = "all", conflicts_with = "all")]
    id: Option<String>,
    /// Check every inequality over its default range.
    #[arg(long)]
    all: bool,
    /// First value of the leading parameter.
    #[arg(long, requires = "id")]
    from: Option<u64>,
    /// Last value of the leading parameter.
    #[arg(long, requires = "id")]
    to: Option<u64>,
    /// Cap on k for two-parameter inequalities.
    #[arg(long, requires = "id")]
    k_max: Option<u64>,
    #[command(flatten)]
    output: Output,
}

#[derive(Args, Debug)]
struct CompareArgs {
    #[arg(long)]
    lhs: String,
    #[arg(long)]
    rhs: String,
    #[arg(short = 'k')]
    k: Option<u64>,
    #[arg(short = 'n')]
    n: Option<u64>,
    /// Value of the auxiliary index j.
    #[arg(short = 'j')]
    j: Option<u64>,
    #[arg(long, value_enum, default_value_t = Format::Table)]
    format: Format,
}

#[derive(Args, Debug)]
struct CatalogArgs {
    /// Optional `list` keyword.
    #[arg(value_parser = ["list"])]
    action: Option<String>,
    #[arg(long, value_enum, default_value_t = Format::Table)]
    format: Format,
}

/// Failure carrying its exit code.
struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }

    fn io(e: io::Error) -> Self {
        Failure {
            code: EXIT_IO,
            message: e.to_string(),
        }
    }
}

impl From<ScanError> for Failure {
    fn from(e: ScanError) -> Self {
        let code = match e {
            ScanError::Undecided { .. } => EXIT_UNDECIDED,
            ScanError::EmptyBounds(_) | ScanError::InvalidRange => EXIT_USAGE,
            ScanError::Compare { .. } => EXIT_IO,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

/// Parses `argv` (including the program name), runs the command and returns the exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    run_with_env(argv, |name| std::env::var(name).ok())
}

/// As [`run`], reading policy overrides through `env`.
pub fn run_with_env<I, T>(argv: I, env: impl Fn(&str) -> Option<String>) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match execute(cli, &env) {
        Ok(code) => code,
        Err(f) => {
            eprintln!("facpow: {}", f.message);
            f.code
        }
    }
}

fn execute(cli: Cli, env: &dyn Fn(&str) -> Option<String>) -> Result<i32, Failure> {
    let policy = policy(&cli, env)?;
    match cli.command {
        Command::Scan(args) => scan(args, policy),
        Command::Lemma(args) => lemma(args, policy),
        Command::Compare(args) => compare(args, policy),
        Command::Catalog(args) => catalog(args),
    }
}

fn policy(cli: &Cli, env: &dyn Fn(&str) -> Option<String>) -> Result<ComparePolicy, Failure> {
    let ladder = match (&cli.ladder, env(ENV_LADDER)) {
        (Some(l), _) => l.clone(),
        (None, Some(s)) => s
            .split(',')
            .map(|p| p.trim().parse::<u32>())
            .collect::<Result<_, _>>()
            .map_err(|_| Failure::usage(format!("{ENV_LADDER} must be a comma-separated list of integers")))?,
        (None, None) => DEFAULT_LADDER.to_vec(),
    };
    let budget = match (cli.budget, env(ENV_BUDGET)) {
        (Some(b), _) => b,
        (None, Some(s)) => s
            .trim()
            .parse()
            .map_err(|_| Failure::usage(format!("{ENV_BUDGET} must be an integer")))?,
        (None, None) => DEFAULT_EXACT_BUDGET_BITS,
    };
    ComparePolicy::new(&ladder, budget).map_err(|e| Failure::usage(e.to_string()))
}

fn emit(text: &str, out: Option<&PathBuf>) -> Result<(), Failure> {
    match out {
        Some(path) => fs::write(path, text).map_err(Failure::io),
        None => io::stdout().lock().write_all(text.as_bytes()).map_err(Failure::io),
    }
}

fn scan(args: ScanArgs, policy: ComparePolicy) -> Result<i32, Failure> {
    let eq = get_catalog()
        .equation(&args.equation)
        .ok_or_else(|| Failure::usage(format!("unknown equation `{}` (expected T1 to T4)", args.equation)))?;
    let k_max = args.k_max.unwrap_or(args.max);
    let n_max = args.n_max.unwrap_or(args.max);
    if k_max == 0 || n_max == 0 {
        return Err(Failure::usage("scan bounds must be at least 1"));
    }
    let mut report = Scanner::new(policy).scan_equation(eq, k_max, n_max)?;
    if args.output.no_timings {
        report.clear_timings();
    }
    let diff = diff_expected(&report, eq);
    let text = match args.output.format {
        Format::Json => report.to_json(),
        Format::Csv => report.to_csv(),
        Format::Table => equation_table(&report, eq.lhs_text, eq.rhs_text, &diff),
    };
    emit(&text, args.output.out.as_ref())?;
    Ok(scan_exit_code(&diff))
}

fn scan_exit_code(diff: &DiffResult) -> i32 {
    match diff {
        DiffResult::Match => EXIT_OK,
        DiffResult::Mismatch { .. } => EXIT_MISMATCH,
    }
}

fn lemma_exit_code<'a>(reports: impl IntoIterator<Item = &'a ScanReport>) -> i32 {
    if reports.into_iter().any(|r| !r.failures.is_empty()) {
        EXIT_MISMATCH
    } else {
        EXIT_OK
    }
}

fn lemma(args: LemmaArgs, policy: ComparePolicy) -> Result<i32, Failure> {
    let catalog = get_catalog();
    let targets: Vec<(&InequalitySpec, ScanBounds)> = match &args.id {
        Some(id) => {
            let spec = catalog
                .inequality(id)
                .ok_or_else(|| Failure::usage(format!("unknown inequality `{id}` (expected I1 to I20)")))?;
            let (to, k_max) = default_range(spec);
            let from = args.from.unwrap_or(spec.domain.min());
            let to = args.to.unwrap_or(to);
            if from > to {
                return Err(Failure::usage(format!("empty range {from}..={to}")));
            }
            vec![(
                spec,
                ScanBounds::for_domain(&spec.domain, from, to, args.k_max.or(k_max)),
            )]
        }
        None => catalog
            .inequalities
            .iter()
            .map(|s| (s, crate::scan::default_bounds(s)))
            .collect(),
    };
    if targets.len() > 1 && args.output.format == Format::Csv {
        return Err(Failure::usage("CSV output needs a single --id"));
    }
    let scanner = Scanner::new(policy);
    let mut reports = Vec::with_capacity(targets.len());
    for (spec, bounds) in &targets {
        let mut report = scanner.scan_inequality(spec, bounds)?;
        if args.output.no_timings {
            report.clear_timings();
        }
        reports.push((*spec, report));
    }
    let text = match args.output.format {
        Format::Csv => reports[0].1.to_csv(),
        Format::Json if args.id.is_some() => reports[0].1.to_json(),
        Format::Json => {
            let all: Vec<&ScanReport> = reports.iter().map(|(_, r)| r).collect();
            let mut s = serde_json::to_string_pretty(&all).expect("reports serialize");
            s.push('\n');
            s
        }
        Format::Table => reports.iter().map(|(s, r)| inequality_table(s, r)).collect(),
    };
    emit(&text, args.output.out.as_ref())?;
    Ok(lemma_exit_code(reports.iter().map(|(_, r)| r)))
}

#[derive(Serialize)]
struct CompareOutput<'a> {
    lhs: &'a str,
    rhs: &'a str,
    k: Option<u64>,
    n: Option<u64>,
    j: Option<u64>,
    verdict: Verdict,
    tier: &'static str,
    precision: Option<u32>,
    exact_bits: Option<u64>,
}

fn compare(args: CompareArgs, policy: ComparePolicy) -> Result<i32, Failure> {
    let parse = |text: &str| {
        let parsed = if args.j.is_some() {
            parse_expr_with_aux(text)
        } else {
            parse_expr(text)
        };
        parsed.map_err(|e| Failure::usage(format!("cannot parse `{text}`: {e}")))
    };
    let lhs = parse(&args.lhs)?;
    let rhs = parse(&args.rhs)?;
    let mut binding =
        Binding::new(args.k.unwrap_or(1), args.n.unwrap_or(1)).map_err(|e| Failure::usage(e.to_string()))?;
    binding.aux = args.j;
    let unbound = |e: ExprError| Failure::usage(e.to_string());
    let (a, b) = (
        substitute(&lhs, &binding).map_err(unbound)?,
        substitute(&rhs, &binding).map_err(unbound)?,
    );
    for (var, given) in [(crate::expr::Var::K, args.k), (crate::expr::Var::N, args.n)] {
        if given.is_none() && (lhs.contains_var(var) || rhs.contains_var(var)) {
            return Err(Failure::usage(format!(
                "expression uses `{}` but no value was given",
                var.name()
            )));
        }
    }
    let result = Comparator::new(policy).compare(&a, &b);
    let c = match result {
        Ok(c) => c,
        Err(e @ CompareError::Undecided { .. }) => {
            return Err(Failure {
                code: EXIT_UNDECIDED,
                message: e.to_string(),
            })
        }
        Err(CompareError::Eval(e)) => return Err(Failure::usage(e.to_string())),
    };
    let text = match args.format {
        Format::Table => format!("{}\n", describe(&c)),
        Format::Json | Format::Csv => {
            let (precision, exact_bits) = certificate_fields(&c.certificate);
            let out = CompareOutput {
                lhs: &args.lhs,
                rhs: &args.rhs,
                k: args.k,
                n: args.n,
                j: args.j,
                verdict: c.verdict,
                tier: c.certificate.tier().as_str(),
                precision,
                exact_bits,
            };
            if args.format == Format::Json {
                let mut s = serde_json::to_string_pretty(&out).expect("serializes");
                s.push('\n');
                s
            } else {
                let mut w = csv::Writer::from_writer(Vec::new());
                w.serialize(&out).map_err(|e| Failure::io(e.into()))?;
                String::from_utf8(w.into_inner().map_err(|e| Failure::io(e.into_error()))?).expect("csv is utf-8")
            }
        }
    };
    emit(&text, None)?;
    Ok(EXIT_OK)
}

fn certificate_fields(c: &Certificate) -> (Option<u32>, Option<u64>) {
    match *c {
        Certificate::Structural => (None, None),
        Certificate::LogSeparation { precision } => (Some(precision), None),
        Certificate::Exact { bits } => (None, Some(bits)),
    }
}

fn describe(c: &Comparison) -> String {
    format!("{} ({})", c.verdict, c.certificate)
}

fn catalog(args: CatalogArgs) -> Result<i32, Failure> {
    let catalog = get_catalog();
    let text = match args.format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&catalog.to_json()).expect("serializes");
            s.push('\n');
            s
        }
        Format::Csv => return Err(Failure::usage("catalog supports table or json output")),
        Format::Table => {
            let mut s = String::new();
            for e in &catalog.equations {
                let _ = writeln!(s, "{:<4} {} = {}", e.id, e.lhs_text, e.rhs_text);
                let _ = writeln!(s, "     {}", e.anchor);
            }
            for i in &catalog.inequalities {
                let _ = writeln!(
                    s,
                    "{:<4} {} {} {}   [{}]",
                    i.id,
                    i.lhs_text,
                    i.relation.symbol(),
                    i.rhs_text,
                    i.domain
                );
                let _ = writeln!(s, "     {}", i.anchor);
            }
            s
        }
    };
    emit(&text, None)?;
    Ok(EXIT_OK)
}

fn tiers_line(r: &ScanReport) -> String {
    r.tiers
        .iter()
        .map(|(t, c)| format!("{} {c}", t.as_str()))
        .collect::<Vec<_>>()
        .join(", ")
}

fn equation_table(r: &ScanReport, lhs: &str, rhs: &str, diff: &DiffResult) -> String {
    let mut s = String::new();
    let [_, k1] = r.ranges.k;
    let [_, n1] = r.ranges.n;
    let _ = writeln!(s, "{}: {lhs} = {rhs}", r.target);
    let _ = writeln!(
        s,
        "k in 1..={k1}, n in 1..={n1}; rows are k, columns n ('=' equal, '>' lhs larger, '<' rhs larger)"
    );
    let _ = write!(s, "{:>4} ", "");
    for n in 1..=n1 {
        let _ = write!(s, "{}", n % 10);
    }
    s.push('\n');
    for row in r.pairs.chunks(n1 as usize) {
        let _ = write!(s, "{:>4} ", row[0].k);
        for p in row {
            s.push(match p.verdict {
                Verdict::Less => '<',
                Verdict::Equal => '=',
                Verdict::Greater => '>',
            });
        }
        s.push('\n');
    }
    let sols: Vec<String> = r.solutions.iter().map(|p| format!("({},{})", p.k, p.n)).collect();
    let _ = writeln!(s, "solutions: {}", sols.join(" "));
    let _ = writeln!(s, "tiers: {}", tiers_line(r));
    match diff {
        DiffResult::Match => {
            let _ = writeln!(s, "result: matches the expected solution set ({} ms)", r.elapsed_ms);
        }
        DiffResult::Mismatch { missing, spurious } => {
            let _ = writeln!(s, "result: MISMATCH missing {missing:?} spurious {spurious:?}");
        }
    }
    s
}

fn inequality_table(spec: &InequalitySpec, r: &ScanReport) -> String {
    let status = if r.failures.is_empty() {
        "holds".to_string()
    } else {
        let pts: Vec<String> = r
            .failures
            .iter()
            .map(|p| match p.j {
                Some(j) => format!("(k={},n={},j={j})", p.k, p.n),
                None => format!("(k={},n={})", p.k, p.n),
            })
            .collect();
        format!("FAILS at {}", pts.join(" "))
    };
    let mut s = String::new();
    let _ = writeln!(
        s,
        "{:<4} {} {} {}  [{}]",
        spec.id,
        spec.lhs_text,
        spec.relation.symbol(),
        spec.rhs_text,
        spec.domain
    );
    let _ = writeln!(
        s,
        "     {} bindings, {}; {} ({} ms)",
        r.pairs.len(),
        tiers_line(r),
        status,
        r.elapsed_ms
    );
    s
}
