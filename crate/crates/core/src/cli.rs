//! Command-line front end for `treedim`.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::bsv::{BsvContext, CheckReport};
use crate::dimension::{dimension_report, export_report, level_group, Format};
use crate::error::Error;
use crate::perm::order_mod_subgroup;
use crate::tree::{AutomatonSpec, Degree, Element, LevelImages, PointBudget, DEFAULT_POINT_BUDGET};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "treedim", version, about = "Level quotients and Hausdorff dimension of automaton groups on m-adic trees")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Level indices, s_n and dimension estimates.
    Dim(DimArgs),
    /// Run the verification suites for the Brunner–Sidki–Vieira group.
    Verify(VerifyArgs),
    /// Order of an element on a level and modulo the derived subgroup there.
    Order(OrderArgs),
}

#[derive(Debug, Args)]
pub struct Common {
    /// Tree arity; read from the file for `file:` groups.
    #[arg(long)]
    pub m: Option<usize>,
    /// `bsv` or `file:<path>` to an automaton description.
    #[arg(long, default_value = "bsv")]
    pub group: String,
    /// Largest number of level points a computation may use.
    #[arg(long, env = "TREEDIM_POINT_BUDGET", default_value_t = DEFAULT_POINT_BUDGET)]
    pub point_budget: usize,
    #[arg(long, value_enum, default_value_t = OutFormat::Json)]
    pub format: OutFormat,
    /// Write to this file instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutFormat {
    Json,
    Csv,
}

impl From<OutFormat> for Format {
    fn from(f: OutFormat) -> Format {
        match f {
            OutFormat::Json => Format::Json,
            OutFormat::Csv => Format::Csv,
        }
    }
}

#[derive(Debug, Args)]
pub struct DimArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long, default_value_t = 4)]
    pub max_level: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Which {
    Prop34,
    Lemma32,
    Prop35,
    Structure,
    #[value(name = "matrixA", alias = "matrix-a")]
    MatrixA,
    All,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long, value_enum, default_value_t = Which::All)]
    pub which: Which,
    #[arg(long, default_value_t = 4)]
    pub max_level: usize,
    /// Largest k for the element-order statements; defaults to what fits
    /// in the maximum level and the point budget.
    #[arg(long)]
    pub kmax: Option<usize>,
}

#[derive(Debug, Args)]
pub struct OrderArgs {
    #[command(flatten)]
    pub common: Common,
    /// Whitespace-separated state names, each optionally suffixed `^-1`.
    #[arg(long)]
    pub element: String,
    #[arg(long)]
    pub level: usize,
}

/// Failure of a command, carrying its exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    fn config(msg: impl Into<String>) -> Self {
        Failure {
            code: EXIT_CONFIG,
            message: msg.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::PointBudgetExceeded { .. } => EXIT_BUDGET,
            _ => EXIT_CONFIG,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

/// Output of a successful run: the document and the exit code.
#[derive(Debug)]
pub struct Outcome {
    pub code: i32,
    pub output: String,
    pub diagnostics: Vec<String>,
}

enum Group {
    Bsv(Degree),
    File(Arc<AutomatonSpec>, String),
}

fn resolve_group(c: &Common) -> Result<Group, Failure> {
    if c.group == "bsv" {
        let m = c.m.ok_or_else(|| Failure::config("--m is required for --group bsv"))?;
        return Ok(Group::Bsv(Degree::new(m)?));
    }
    let Some(path) = c.group.strip_prefix("file:") else {
        return Err(Failure::config(format!(
            "unknown group `{}`: expected `bsv` or `file:<path>`",
            c.group
        )));
    };
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::config(format!("{path}: {e}")))?;
    let spec = AutomatonSpec::from_json(&text).map_err(|e| Failure::config(format!("{path}: {e}")))?;
    if let Some(m) = c.m {
        if m != spec.degree().get() {
            return Err(Failure::config(format!(
                "--m {m} does not match alphabet_size {} in {path}",
                spec.degree().get()
            )));
        }
    }
    Ok(Group::File(Arc::new(spec), c.group.clone()))
}

fn degree_of(g: &Group) -> Degree {
    match g {
        Group::Bsv(m) => *m,
        Group::File(spec, _) => spec.degree(),
    }
}

fn check_budget(c: &Common, m: Degree) -> Result<PointBudget, Failure> {
    let budget = PointBudget(c.point_budget);
    budget.check(m, 1)?;
    Ok(budget)
}

pub fn cmd_dim(args: &DimArgs) -> Result<Outcome, Failure> {
    if args.max_level == 0 {
        return Err(Failure::config("--max-level must be at least 1"));
    }
    let group = resolve_group(&args.common)?;
    let budget = check_budget(&args.common, degree_of(&group))?;
    let mut diagnostics = Vec::new();
    let mut code = EXIT_OK;
    let report = match &group {
        Group::Bsv(m) => {
            let ctx = BsvContext::new(*m, budget);
            let report = ctx.dimension_report(args.max_level)?;
            for l in &report.levels {
                if let Some(s) = &l.s_n {
                    if *s != ctx.predicted_s(l.n) {
                        code = EXIT_CHECK_FAILED;
                        diagnostics.push(format!(
                            "s_{} = {} differs from the predicted {}",
                            l.n,
                            s,
                            ctx.predicted_s(l.n)
                        ));
                    }
                }
            }
            if let (Some(t), Some(cf)) = (report.final_estimate(), &report.closed_form) {
                if (t.estimate - cf.float).abs() > t.tail + 1e-9 {
                    code = EXIT_CHECK_FAILED;
                    diagnostics.push(format!(
                        "estimate {} is farther than {} from the closed form {}",
                        t.estimate, t.tail, cf.float
                    ));
                }
            }
            report
        }
        Group::File(spec, id) => dimension_report(spec, id, args.max_level, budget)?,
    };
    if let Some(s) = &report.skipped {
        diagnostics.push(format!("levels from {} skipped: {}", s.from_level, s.reason));
    }
    Ok(Outcome {
        code,
        output: export_report(&report, args.common.format.into())?,
        diagnostics,
    })
}

pub fn cmd_verify(args: &VerifyArgs) -> Result<Outcome, Failure> {
    let group = resolve_group(&args.common)?;
    let Group::Bsv(m) = group else {
        return Err(Failure::config("verify supports only --group bsv"));
    };
    let budget = check_budget(&args.common, m)?;
    let ctx = BsvContext::new(m, budget);
    let top = args.max_level;
    let mut report = CheckReport::default();
    let wants = |w: Which| args.which == w || args.which == Which::All;
    if wants(Which::Prop34) {
        let kmax = match args.kmax {
            Some(k) => Some(k),
            None => ctx.default_kmax(Some(top)),
        };
        match kmax {
            Some(k) => report.extend(ctx.verify_prop_34(k)?),
            None => report.records.push(skipped_record("prop34", m, "no k fits in the maximum level")),
        }
    }
    if wants(Which::Lemma32) {
        for n in 2..=top {
            report.extend(budgeted(ctx.verify_lemma_32(n), "lemma32", m, n)?);
        }
    }
    if wants(Which::Prop35) {
        report.extend(ctx.verify_prop_35(top)?);
    }
    if wants(Which::Structure) {
        for n in 1..=top {
            report.extend(budgeted(ctx.verify_structure(n), "structure", m, n)?);
        }
    }
    if wants(Which::MatrixA) {
        report.extend(ctx.verify_matrix_a()?);
    }
    let output = match args.common.format {
        OutFormat::Json => {
            let mut s = serde_json::to_string_pretty(&report).map_err(|e| Failure::config(e.to_string()))?;
            s.push('\n');
            s
        }
        OutFormat::Csv => check_csv(&report)?,
    };
    let failures: Vec<String> = report
        .failures()
        .map(|r| format!("{} (n={:?}, k={:?}, j={:?}): expected {}, got {}", r.check, r.n, r.k, r.j, r.expected, r.actual))
        .collect();
    Ok(Outcome {
        code: if failures.is_empty() { EXIT_OK } else { EXIT_CHECK_FAILED },
        output,
        diagnostics: failures,
    })
}

fn skipped_record(check: &str, m: Degree, note: &str) -> crate::bsv::CheckRecord {
    crate::bsv::CheckRecord {
        check: check.into(),
        m: m.get(),
        n: None,
        k: None,
        j: None,
        expected: String::new(),
        actual: "skipped".into(),
        pass: None,
        note: Some(note.into()),
    }
}

fn budgeted(
    r: crate::error::Result<CheckReport>,
    check: &str,
    m: Degree,
    n: usize,
) -> Result<CheckReport, Failure> {
    match r {
        Ok(r) => Ok(r),
        Err(e @ Error::PointBudgetExceeded { .. }) => {
            let mut rec = skipped_record(check, m, &e.to_string());
            rec.n = Some(n);
            Ok(CheckReport { records: vec![rec] })
        }
        Err(e) => Err(e.into()),
    }
}

fn check_csv(report: &CheckReport) -> Result<String, Failure> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let err = |e: csv::Error| Failure::config(e.to_string());
    w.write_record(["check", "m", "n", "k", "j", "expected", "actual", "pass", "note"])
        .map_err(err)?;
    let opt = |x: Option<usize>| x.map(|v| v.to_string()).unwrap_or_default();
    for r in &report.records {
        w.write_record([
            r.check.clone(),
            r.m.to_string(),
            opt(r.n),
            opt(r.k),
            opt(r.j),
            r.expected.clone(),
            r.actual.clone(),
            r.pass.map(|p| p.to_string()).unwrap_or_else(|| "skipped".into()),
            r.note.clone().unwrap_or_default(),
        ])
        .map_err(err)?;
    }
    let bytes = w.into_inner().map_err(|e| Failure::config(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Failure::config(e.to_string()))
}

#[derive(Debug, Serialize)]
struct OrderRecord {
    element: String,
    level: usize,
    order: String,
    order_mod_derived: String,
}

pub fn cmd_order(args: &OrderArgs) -> Result<Outcome, Failure> {
    if args.level == 0 {
        return Err(Failure::config("--level must be at least 1"));
    }
    let group = resolve_group(&args.common)?;
    let budget = check_budget(&args.common, degree_of(&group))?;
    let spec = match &group {
        Group::Bsv(m) => Arc::new(AutomatonSpec::bsv(m.get())?),
        Group::File(spec, _) => Arc::clone(spec),
    };
    let g = Element::parse(&spec, &args.element)?;
    let images = LevelImages::new(&spec, args.level, budget)?;
    let p = images.element(&g)?;
    let h = level_group(&spec, args.level, budget)?;
    let der = h.derived_subgroup();
    let rec = OrderRecord {
        element: g.display_word(),
        level: args.level,
        order: p.order().to_string(),
        order_mod_derived: order_mod_subgroup(&p, &der, &h)?.to_string(),
    };
    let output = match args.common.format {
        OutFormat::Json => {
            let mut s = serde_json::to_string_pretty(&rec).map_err(|e| Failure::config(e.to_string()))?;
            s.push('\n');
            s
        }
        OutFormat::Csv => {
            let mut s = String::from("element,level,order,order_mod_derived\n");
            let _ = writeln!(s, "{},{},{},{}", rec.element, rec.level, rec.order, rec.order_mod_derived);
            s
        }
    };
    Ok(Outcome {
        code: EXIT_OK,
        output,
        diagnostics: Vec::new(),
    })
}

/// Runs a parsed command; writes to `--out` when given.
pub fn run(cli: &Cli) -> Result<Outcome, Failure> {
    let (outcome, out) = match &cli.command {
        Command::Dim(a) => (cmd_dim(a)?, &a.common.out),
        Command::Verify(a) => (cmd_verify(a)?, &a.common.out),
        Command::Order(a) => (cmd_order(a)?, &a.common.out),
    };
    if let Some(path) = out {
        std::fs::write(path, &outcome.output)
            .map_err(|e| Failure::config(format!("{}: {e}", path.display())))?;
        return Ok(Outcome {
            output: String::new(),
            ..outcome
        });
    }
    Ok(outcome)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> Cli {
        Cli::try_parse_from(std::iter::once("treedim").chain(args.iter().copied())).unwrap()
    }

    #[test]
    fn order_examples() {
        let out = run(&parse(&["order", "--m", "3", "--element", "a b", "--level", "2"])).unwrap();
        let v: serde_json::Value = serde_json::from_str(&out.output).unwrap();
        assert_eq!(v["order_mod_derived"], "3");
        let out = run(&parse(&["order", "--m", "2", "--element", "e", "--level", "3"])).unwrap();
        let v: serde_json::Value = serde_json::from_str(&out.output).unwrap();
        assert_eq!((v["order"].as_str(), v["order_mod_derived"].as_str()), (Some("1"), Some("1")));
        let out = run(&parse(&["order", "--m", "4", "--element", "a b", "--level", "1"])).unwrap();
        let v: serde_json::Value = serde_json::from_str(&out.output).unwrap();
        assert_eq!(v["order"], "2");
    }

    #[test]
    fn exit_codes() {
        let err = run(&parse(&["order", "--m", "3", "--element", "a c", "--level", "2"])).unwrap_err();
        assert_eq!(err.code, EXIT_CONFIG);
        let err = run(&parse(&["dim", "--m", "3", "--point-budget", "2"])).unwrap_err();
        assert_eq!(err.code, EXIT_BUDGET);
        let err = run(&parse(&["dim", "--group", "nope", "--m", "3"])).unwrap_err();
        assert_eq!(err.code, EXIT_CONFIG);
        let err = run(&parse(&["dim"])).unwrap_err();
        assert_eq!(err.code, EXIT_CONFIG);
        assert!(Cli::try_parse_from(["treedim", "dim", "--format", "xml"]).is_err());
    }

    #[test]
    fn dim_single_level() {
        let out = run(&parse(&["dim", "--group", "bsv", "--m", "2", "--max-level", "1"])).unwrap();
        assert_eq!(out.code, EXIT_OK);
        let v: serde_json::Value = serde_json::from_str(&out.output).unwrap();
        assert_eq!(v["levels"].as_array().unwrap().len(), 1);
    }
}
