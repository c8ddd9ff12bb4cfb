//! Command-line front end: `build`, `verify`, `analyze` and `export`.
//!
//! Exit codes: 0 success, 1 verification or bound failure, 2 usage or file
//! format error.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use num_traits::Signed;
use serde_json::{json, Value};

use crate::bounds::{growth_cap, growth_report, k_envelope, BoundCheck, BoundError};
use crate::construction::{run_with_options, BasisTrace, RunOptions};
use crate::growth::{parse_int_list, GrowthSpec, Threshold};
use crate::oracle::{
    brute_rep_report, cross_check, verify_all_decompositions, verify_b_growth,
    verify_step_fields, verify_unique_window, witness_order, Outcome, RepReport, Witness,
};
use crate::tracefile::TraceFile;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

/// Widest window `analyze --rep-window` will tabulate.
pub const MAX_REP_WINDOW: u64 = 100_000;

#[derive(Debug, Parser)]
#[command(name = "urbasis", version, about = "Build and check unique representation bases of the integers")]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Construct a trace and write it to a file.
    Build(BuildArgs),
    /// Run the brute-force oracle suite on a trace file.
    Verify(VerifyArgs),
    /// Evaluate density bounds and representation counts for a trace file.
    Analyze(AnalyzeArgs),
    /// Print the final set, its sumset, or the step table.
    Export(ExportArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("mode").required(true).args(["greedy", "threshold", "c_list"])))]
struct BuildArgs {
    /// Greedy construction (c_k = d_k) with K steps.
    #[arg(long, value_name = "K")]
    greedy: Option<usize>,
    /// Threshold-driven construction: SPEC is table:T1,T2,..., log:SCALE,OFFSET,SHIFT
    /// or loglog:SCALE,OFFSET,SHIFT.
    #[arg(long, num_args = 2, value_names = ["SPEC", "K"], allow_hyphen_values = true)]
    threshold: Option<Vec<String>>,
    /// Explicit c-values: a file of integers, or an inline list like [1,4].
    /// Builds one more step than there are values.
    #[arg(long, value_name = "PATH|[C1,C2,...]")]
    c_list: Option<String>,
    /// Where to write the trace.
    #[arg(short, long)]
    output: PathBuf,
    /// Skip the uniqueness re-check after each extension.
    #[arg(long)]
    no_check: bool,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    trace: PathBuf,
    /// Scan only the guaranteed window |n| <= K/2 instead of [-2d_K, 2d_K].
    #[arg(long)]
    fast: bool,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Debug, Args)]
struct AnalyzeArgs {
    trace: PathBuf,
    /// Comma-separated sample points; defaults to every c_k and d_k.
    #[arg(long, value_name = "X1,X2,...", allow_hyphen_values = true)]
    x: Option<String>,
    /// Tabulate representation counts for LO <= n <= HI.
    #[arg(long, value_name = "LO,HI", allow_hyphen_values = true)]
    rep_window: Option<String>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ExportWhat {
    Set,
    Sumset,
    Steps,
}

#[derive(Debug, Args)]
struct ExportArgs {
    trace: PathBuf,
    #[arg(long, value_enum, default_value_t = ExportWhat::Set)]
    what: ExportWhat,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

/// A usage or format error; maps to exit code 2.
#[derive(Debug)]
struct UsageError(String);

impl<E: std::fmt::Display> From<E> for UsageError {
    fn from(e: E) -> Self {
        UsageError(e.to_string())
    }
}

type CmdResult = Result<i32, UsageError>;

/// Parses `args` (including the program name) and runs the command,
/// returning the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let target: &mut dyn Write = if e.use_stderr() { err } else { out };
            let _ = write!(target, "{}", e.render());
            return code;
        }
    };
    let result = match cli.command {
        Command::Build(a) => cmd_build(&a, out),
        Command::Verify(a) => cmd_verify(&a, out),
        Command::Analyze(a) => cmd_analyze(&a, out),
        Command::Export(a) => cmd_export(&a, out),
    };
    match result {
        Ok(code) => code,
        Err(UsageError(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_USAGE
        }
    }
}

fn read_trace(path: &Path) -> Result<TraceFile, UsageError> {
    let text = fs::read_to_string(path)
        .map_err(|e| UsageError(format!("cannot read {}: {e}", path.display())))?;
    TraceFile::parse(&text).map_err(|e| UsageError(format!("{}: {e}", path.display())))
}

fn read_c_list(arg: &str) -> Result<Vec<BigInt>, UsageError> {
    let text = if arg.trim_start().starts_with('[') {
        arg.to_string()
    } else {
        fs::read_to_string(arg).map_err(|e| UsageError(format!("cannot read {arg}: {e}")))?
    };
    parse_int_list(&text).map_err(UsageError)
}

fn parse_steps(s: &str) -> Result<usize, UsageError> {
    match s.parse::<usize>() {
        Ok(k) if k >= 1 => Ok(k),
        _ => Err(UsageError(format!("step count must be a positive integer, got {s:?}"))),
    }
}

fn cmd_build(a: &BuildArgs, out: &mut dyn Write) -> CmdResult {
    let (spec, steps) = if let Some(k) = a.greedy {
        (GrowthSpec::Greedy, parse_steps(&k.to_string())?)
    } else if let Some(v) = &a.threshold {
        let t: Threshold = v[0].parse()?;
        (GrowthSpec::Threshold(t), parse_steps(&v[1])?)
    } else {
        let cs = read_c_list(a.c_list.as_deref().expect("clap enforces one mode"))?;
        let k = cs.len() + 1;
        (GrowthSpec::ExplicitC(cs), k)
    };
    let opts = RunOptions {
        check_uniqueness: !a.no_check,
    };
    let trace = run_with_options(&spec, steps, opts)?;
    let file = TraceFile::new(spec, trace);
    fs::write(&a.output, file.to_text())
        .map_err(|e| UsageError(format!("cannot write {}: {e}", a.output.display())))?;
    let last = file.trace.last().expect("at least one step");
    match a.format {
        Format::Text => writeln!(out, "K={} d_K={} b_K={}", last.k, last.d, last.b)?,
        Format::Json => writeln!(
            out,
            "{}",
            json!({"K": last.k.to_string(), "d_K": last.d.to_string(), "b_K": last.b.to_string()})
        )?,
    }
    Ok(EXIT_OK)
}

struct CheckRow {
    name: &'static str,
    pass: bool,
    detail: String,
    n: Option<BigInt>,
}

impl CheckRow {
    fn from_outcome(name: &'static str, o: Outcome) -> Self {
        match o {
            Outcome::Pass => Self::pass(name, String::new()),
            Outcome::Fail(w) => Self::fail(name, &w),
        }
    }

    fn pass(name: &'static str, detail: String) -> Self {
        Self { name, pass: true, detail, n: None }
    }

    fn fail(name: &'static str, w: &Witness) -> Self {
        Self {
            name,
            pass: false,
            detail: w.to_string(),
            n: w.n().cloned(),
        }
    }

    fn error(name: &'static str, detail: String) -> Self {
        Self { name, pass: false, detail, n: None }
    }
}

fn cmd_verify(a: &VerifyArgs, out: &mut dyn Write) -> CmdResult {
    let file = read_trace(&a.trace)?;
    let trace = &file.trace;
    let last = trace.last().ok_or_else(|| UsageError("trace has no steps".into()))?;
    let mut rows = vec![
        CheckRow::from_outcome("step-fields", verify_step_fields(trace)),
        CheckRow::from_outcome("unique-window", verify_unique_window(trace)),
    ];

    let guaranteed = BigInt::from(last.k / 2);
    let (lo, hi) = if a.fast {
        (-guaranteed.clone(), guaranteed.clone())
    } else {
        (-2 * &last.d, 2 * &last.d)
    };
    let report = brute_rep_report(&last.set, &lo, &hi)?;
    let rep_row = if let Some(n) = report.violations.first() {
        CheckRow {
            name: "rep-report",
            pass: false,
            detail: format!("n = {n} has {} representations", report.count(n)),
            n: Some(n.clone()),
        }
    } else if let Err(d) = cross_check(&last.set, &report) {
        CheckRow {
            name: "rep-report",
            pass: false,
            detail: format!("oracle count {} disagrees with fast count {} at n = {}", d.oracle, d.fast, d.n),
            n: Some(d.n),
        }
    } else if let Some(n) = unrepresented_in_window(&report, &guaranteed, last.k) {
        CheckRow {
            name: "rep-report",
            pass: false,
            detail: format!("n = {n} in the guaranteed window has no representation"),
            n: Some(n),
        }
    } else {
        CheckRow::pass(
            "rep-report",
            format!(
                "window [{lo}, {hi}]: {} represented, {} unrepresented, no repeated sums",
                report.counts.len(),
                report.gap_count()
            ),
        )
    };
    rows.push(rep_row);

    rows.push(match verify_all_decompositions(trace) {
        Ok(o) => CheckRow::from_outcome("decomposition", o),
        Err(e) => CheckRow::error("decomposition", e.to_string()),
    });
    rows.push(if trace.len() < 2 {
        CheckRow::pass("b-growth", "skipped: fewer than 2 steps".into())
    } else {
        match verify_b_growth(trace) {
            Ok(o) => CheckRow::from_outcome("b-growth", o),
            Err(e) => CheckRow::error("b-growth", e.to_string()),
        }
    });

    let all_pass = rows.iter().all(|r| r.pass);
    match a.format {
        Format::Text => {
            for r in &rows {
                let status = if r.pass { "pass" } else { "fail" };
                if r.detail.is_empty() {
                    writeln!(out, "{}\t{status}", r.name)?;
                } else {
                    writeln!(out, "{}\t{status}\t{}", r.name, r.detail)?;
                }
            }
            writeln!(out, "result\t{}", if all_pass { "pass" } else { "fail" })?;
        }
        Format::Json => {
            let checks: Vec<Value> = rows
                .iter()
                .map(|r| {
                    json!({
                        "name": r.name,
                        "pass": r.pass,
                        "detail": r.detail,
                        "witness_n": r.n.as_ref().map(|n| n.to_string()),
                    })
                })
                .collect();
            writeln!(out, "{}", json!({"checks": checks, "pass": all_pass}))?;
        }
    }
    Ok(if all_pass { EXIT_OK } else { EXIT_FAILED })
}

/// First `|n| <= guaranteed` with no representation, in witness order.
fn unrepresented_in_window(report: &RepReport, guaranteed: &BigInt, steps: u64) -> Option<BigInt> {
    if steps < 2 {
        return None;
    }
    let mut n = -guaranteed.clone();
    let mut missing = Vec::new();
    while &n <= guaranteed {
        if report.count(&n) == 0 {
            missing.push(n.clone());
        }
        n += 1;
    }
    missing.into_iter().min_by(witness_order)
}

fn default_samples(trace: &BasisTrace) -> Vec<BigInt> {
    let mut xs: Vec<BigInt> = trace
        .steps
        .iter()
        .flat_map(|s| std::iter::once(s.d.clone()).chain(s.c.clone()))
        .collect();
    xs.sort();
    xs.dedup();
    xs
}

fn parse_window(s: &str) -> Result<(BigInt, BigInt), UsageError> {
    let v = parse_int_list(s).map_err(UsageError)?;
    match v.as_slice() {
        [lo, hi] if lo <= hi => Ok((lo.clone(), hi.clone())),
        _ => Err(UsageError(format!("--rep-window expects LO,HI with LO <= HI, got {s:?}"))),
    }
}

fn cmd_analyze(a: &AnalyzeArgs, out: &mut dyn Write) -> CmdResult {
    let file = read_trace(&a.trace)?;
    let trace = &file.trace;
    let first = trace.first().ok_or_else(|| UsageError("trace has no steps".into()))?;
    let last = trace.last().expect("nonempty");
    let xs = match &a.x {
        Some(s) => parse_int_list(s).map_err(UsageError)?,
        None => default_samples(trace),
    };
    if let Some(x) = xs.iter().find(|x| !x.is_positive()) {
        return Err(UsageError(format!("sample x = {x} must be at least 1")));
    }
    let window = a.rep_window.as_deref().map(parse_window).transpose()?;
    if let Some((lo, hi)) = &window {
        if hi - lo >= BigInt::from(MAX_REP_WINDOW) {
            return Err(UsageError(format!("--rep-window wider than {MAX_REP_WINDOW}")));
        }
    }

    let mut rows: Vec<BoundCheck> = growth_report(trace, &xs).map_err(|e| match e {
        BoundError::SampleOutOfRange { .. } | BoundError::OutOfRange { .. } => UsageError(e.to_string()),
        other => UsageError(other.to_string()),
    })?;
    if trace.is_greedy() {
        for s in &trace.steps {
            rows.push(k_envelope(s.k, &s.d)?);
        }
    }
    if let (GrowthSpec::Threshold(t), Some(c1)) = (&file.mode, first.c.as_ref()) {
        for x in xs.iter().filter(|x| *x >= c1) {
            let observed = last.set.counting_symmetric(x)? as u64;
            rows.push(growth_cap(t.eval(x), x, observed, t.is_exact()));
        }
    }

    let mut rep_rows: Vec<(BigInt, u64, bool, bool)> = Vec::new();
    if let Some((lo, hi)) = &window {
        let report = brute_rep_report(&last.set, lo, hi)?;
        let guaranteed = BigInt::from(last.k / 2);
        let mut n = lo.clone();
        while &n <= hi {
            let count = report.count(&n);
            let inside = n.abs() <= guaranteed && last.k >= 2;
            let ok = count <= 1 && (!inside || count == 1);
            rep_rows.push((n.clone(), count, inside, ok));
            n += 1;
        }
    }

    let all_hold = rows.iter().all(|r| r.holds) && rep_rows.iter().all(|r| r.3);
    let fmt_real = |v: Option<f64>| v.map_or_else(|| "-".to_string(), |v| format!("{v:.12}"));
    match a.format {
        Format::Text => {
            writeln!(out, "kind\tx\tobserved\tlower\tupper\tholds")?;
            for r in &rows {
                writeln!(
                    out,
                    "{}\t{}\t{}\t{}\t{}\t{}",
                    r.kind,
                    r.x,
                    r.observed,
                    fmt_real(r.lower),
                    fmt_real(r.upper),
                    r.holds
                )?;
            }
            if !rep_rows.is_empty() {
                writeln!(out, "n\tcount\tguaranteed\tok")?;
                for (n, count, inside, ok) in &rep_rows {
                    writeln!(out, "{n}\t{count}\t{inside}\t{ok}")?;
                }
            }
            writeln!(out, "result\t{}", if all_hold { "pass" } else { "fail" })?;
        }
        Format::Json => {
            let bounds: Vec<Value> = rows
                .iter()
                .map(|r| {
                    json!({
                        "kind": r.kind.label(),
                        "x": r.x.to_string(),
                        "observed": r.observed.to_string(),
                        "lower": r.lower,
                        "upper": r.upper,
                        "holds": r.holds,
                    })
                })
                .collect();
            let reps: Vec<Value> = rep_rows
                .iter()
                .map(|(n, count, inside, ok)| {
                    json!({"n": n.to_string(), "count": count, "guaranteed": inside, "ok": ok})
                })
                .collect();
            writeln!(out, "{}", json!({"bounds": bounds, "representations": reps, "pass": all_hold}))?;
        }
    }
    Ok(if all_hold { EXIT_OK } else { EXIT_FAILED })
}

fn cmd_export(a: &ExportArgs, out: &mut dyn Write) -> CmdResult {
    let file = read_trace(&a.trace)?;
    let last = file
        .trace
        .last()
        .ok_or_else(|| UsageError("trace has no steps".into()))?;
    match a.what {
        ExportWhat::Set | ExportWhat::Sumset => {
            let set = if a.what == ExportWhat::Set {
                last.set.clone()
            } else {
                last.set.sumset(&last.set)
            };
            match a.format {
                Format::Text => {
                    for v in &set {
                        writeln!(out, "{v}")?;
                    }
                }
                Format::Json => {
                    let vals: Vec<String> = set.iter().map(|v| v.to_string()).collect();
                    writeln!(out, "{}", json!(vals))?;
                }
            }
        }
        ExportWhat::Steps => match a.format {
            Format::Text => {
                writeln!(out, "k\tsize\td\tb\tbranch\tc")?;
                for s in &file.trace.steps {
                    let c = s.c.as_ref().map_or_else(|| "-".to_string(), |c| c.to_string());
                    let branch = if s.positive_branch { "positive" } else { "negative" };
                    writeln!(out, "{}\t{}\t{}\t{}\t{branch}\t{c}", s.k, s.set.len(), s.d, s.b)?;
                }
            }
            Format::Json => {
                let steps: Vec<Value> = file
                    .trace
                    .steps
                    .iter()
                    .map(|s| {
                        json!({
                            "k": s.k.to_string(),
                            "size": s.set.len(),
                            "d": s.d.to_string(),
                            "b": s.b.to_string(),
                            "positive_branch": s.positive_branch,
                            "c": s.c.as_ref().map(|c| c.to_string()),
                        })
                    })
                    .collect();
                writeln!(out, "{}", json!(steps))?;
            }
        },
    }
    Ok(EXIT_OK)
}
