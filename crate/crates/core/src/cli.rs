//! The `sumset` command-line front end.
//!
//! Problem files are JSON:
//!
//! ```json
//! {
//!   "name": "three-five",
//!   "semigroup": { "kind": "product", "components": ["free"] },
//!   "nonnegative": true,
//!   "B": [0],
//!   "A": [[0, 3, 5]]
//! }
//! ```
//!
//! Elements are integers (1-coordinate products, table indices) or integer
//! arrays. Data goes to stdout (or `--output`), diagnostics to stderr.

use std::collections::BTreeSet;
use std::path::PathBuf;
use std::sync::Arc;

use clap::{Parser, Subcommand, ValueEnum};
use num_traits::Zero;
use serde::Deserialize;
use serde_json::{json, Value};

use crate::error::Error;
use crate::growth::{detect_stabilization, FittedPolynomial, StabilizationReport, Status};
use crate::lattice;
use crate::scalar::{rational_parts, Rat};
use crate::semigroup::{validate_spec, Component, ElementSet, RawSemigroup, SemigroupSpec};
use crate::series::rational_form_check;
use crate::structure::{
    frobenius_number, gap_count, normalize_problem, structure_sets, verify_multilinear, Discrepancy,
};
use crate::sumset::{
    brute_force_sumset, first_divergence, growth_table, GrowthOptions, GrowthTable, Mode, Problem,
    Retain,
};
use crate::Int;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;
pub const EXIT_NOT_STABILIZED: i32 = 4;
pub const EXIT_GCD: i32 = 5;
pub const EXIT_BOX_TOO_SMALL: i32 = 6;

pub const DEFAULT_CAP: u64 = 10_000_000;
pub const DEFAULT_WINDOW: usize = 2;

#[derive(Debug, Parser)]
#[command(
    name = "sumset",
    version,
    about = "Growth of iterated sumsets in abelian semigroups"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, clap::Args)]
pub struct Flags {
    /// Box upper corner `H`, comma separated; one value is broadcast.
    #[arg(long = "box", value_delimiter = ',')]
    pub upper: Option<Vec<usize>>,
    /// Largest diagonal threshold to try.
    #[arg(long)]
    pub max_threshold: Option<usize>,
    /// Validation window beyond the interpolation grid.
    #[arg(long, default_value_t = DEFAULT_WINDOW)]
    pub window: usize,
    #[arg(long, value_enum, default_value_t = ModeArg::Memoized)]
    pub mode: ModeArg,
    /// Cap on formal symbols for brute-force enumeration.
    #[arg(long, default_value_t = DEFAULT_CAP)]
    pub cap: u64,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Write data here instead of stdout.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Memoized,
    Brute,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check a problem file.
    Validate { file: PathBuf },
    /// Growth table over a box.
    Grow {
        file: PathBuf,
        #[command(flatten)]
        flags: Flags,
    },
    /// Find and certify the growth polynomial.
    Fit {
        file: PathBuf,
        #[command(flatten)]
        flags: Flags,
    },
    /// Gap sets and Δ of an integer problem.
    Structure {
        file: PathBuf,
        #[command(flatten)]
        flags: Flags,
    },
    /// Numerator of the growth series.
    Series {
        file: PathBuf,
        #[command(flatten)]
        flags: Flags,
    },
    /// Frobenius number of coprime positive generators.
    Frobenius {
        #[arg(required = true, allow_negative_numbers = true)]
        generators: Vec<i64>,
    },
    /// Memoized growth table against brute-force enumeration.
    OracleCheck {
        file: PathBuf,
        #[command(flatten)]
        flags: Flags,
    },
}

/// Captured result of one invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn ok(stdout: String) -> Self {
        Outcome {
            code: EXIT_OK,
            stdout,
            stderr: String::new(),
        }
    }

    fn fail(code: i32, stdout: String, stderr: String) -> Self {
        Outcome {
            code,
            stdout,
            stderr,
        }
    }
}

/// One problem-file diagnostic.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub location: String,
    pub kind: String,
    pub message: String,
}

impl Diagnostic {
    fn new(location: impl Into<String>, err: &Error) -> Self {
        Diagnostic {
            location: location.into(),
            kind: error_kind(err).to_string(),
            message: err.to_string(),
        }
    }

    fn to_json(&self) -> Value {
        json!({ "location": self.location, "kind": self.kind, "message": self.message })
    }
}

fn error_kind(err: &Error) -> &'static str {
    match err {
        Error::NotCommutative(..) => "NotCommutative",
        Error::NotAssociative(..) => "NotAssociative",
        Error::NoIdentity(..) => "NoIdentity",
        Error::BadModulus { .. } => "BadModulus",
        Error::Malformed(_) => "Malformed",
        Error::SpecMismatch => "SpecMismatch",
        Error::ArityMismatch { .. } => "ArityMismatch",
        Error::IndexOutOfRange { .. } => "IndexOutOfRange",
        Error::Overflow => "Overflow",
        Error::EmptySet(_) => "EmptySet",
        Error::DimensionMismatch { .. } => "DimensionMismatch",
        Error::BudgetExceeded(_) => "BudgetExceeded",
        Error::EnumerationCapExceeded { .. } => "EnumerationCapExceeded",
        Error::BoxTooSmall(_) => "BoxTooSmall",
        Error::GridOutsideBox => "GridOutsideBox",
        Error::GcdNotOne(_) => "GcdNotOne",
        Error::EmptyGenerators => "EmptyGenerators",
        Error::BadGenerator(_) => "BadGenerator",
        Error::NotStabilized(_) => "NotStabilized",
        Error::Unsupported(_) => "Unsupported",
    }
}

fn exit_code(err: &Error) -> i32 {
    match err {
        Error::BudgetExceeded(_) | Error::EnumerationCapExceeded { .. } => EXIT_BUDGET,
        Error::NotStabilized(_) => EXIT_NOT_STABILIZED,
        Error::GcdNotOne(_) => EXIT_GCD,
        Error::BoxTooSmall(_) => EXIT_BOX_TOO_SMALL,
        _ => EXIT_INVALID,
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum RawElement {
    Scalar(i64),
    Coords(Vec<i64>),
}

impl RawElement {
    fn coords(&self) -> Vec<i64> {
        match self {
            RawElement::Scalar(x) => vec![*x],
            RawElement::Coords(v) => v.clone(),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct ProblemFile {
    #[serde(default)]
    name: Option<String>,
    #[serde(default)]
    notes: Option<String>,
    semigroup: RawSemigroup,
    #[serde(default)]
    nonnegative: bool,
    #[serde(rename = "B")]
    base: Vec<RawElement>,
    #[serde(rename = "A")]
    summands: Vec<Vec<RawElement>>,
}

/// A problem file after validation.
#[derive(Debug, Clone)]
pub struct LoadedProblem {
    pub name: Option<String>,
    pub notes: Option<String>,
    pub nonnegative: bool,
    pub problem: Problem,
}

/// Parses and validates a problem file, collecting every diagnostic.
pub fn load_problem(text: &str) -> std::result::Result<LoadedProblem, Vec<Diagnostic>> {
    let file: ProblemFile = serde_json::from_str(text).map_err(|e| {
        vec![Diagnostic {
            location: format!("line {}, column {}", e.line(), e.column()),
            kind: "Parse".into(),
            message: e.to_string(),
        }]
    })?;
    let spec = Arc::new(
        validate_spec(&file.semigroup).map_err(|e| vec![Diagnostic::new("semigroup", &e)])?,
    );
    let mut diags = Vec::new();
    let load = |loc: &str, raw: &[RawElement], diags: &mut Vec<Diagnostic>| -> Option<ElementSet> {
        if raw.is_empty() {
            diags.push(Diagnostic::new(loc, &Error::EmptySet(loc.to_string())));
            return None;
        }
        let mut ok = true;
        for (j, e) in raw.iter().enumerate() {
            let c = e.coords();
            if let Err(err) = spec.canonicalize(&c) {
                diags.push(Diagnostic::new(format!("{loc}[{j}]"), &err));
                ok = false;
            } else if file.nonnegative && !nonnegative_ok(&spec, &c) {
                diags.push(Diagnostic {
                    location: format!("{loc}[{j}]"),
                    kind: "Negative".into(),
                    message: "problem is declared nonnegative but this element has a negative free coordinate".into(),
                });
                ok = false;
            }
        }
        if !ok {
            return None;
        }
        ElementSet::from_raw(&spec, raw.iter().map(RawElement::coords)).ok()
    };
    let base = load("B", &file.base, &mut diags);
    if file.summands.is_empty() {
        diags.push(Diagnostic::new(
            "A",
            &Error::Unsupported("at least one summand set is required".into()),
        ));
    }
    let summands: Vec<Option<ElementSet>> = file
        .summands
        .iter()
        .enumerate()
        .map(|(i, a)| load(&format!("A[{i}]"), a, &mut diags))
        .collect();
    if !diags.is_empty() {
        return Err(diags);
    }
    let problem = Problem::new(
        base.expect("checked"),
        summands.into_iter().map(|s| s.expect("checked")).collect(),
    )
    .map_err(|e| vec![Diagnostic::new("problem", &e)])?;
    Ok(LoadedProblem {
        name: file.name,
        notes: file.notes,
        nonnegative: file.nonnegative,
        problem,
    })
}

fn nonnegative_ok(spec: &SemigroupSpec, coords: &[i64]) -> bool {
    match spec {
        SemigroupSpec::Product(comps) => coords
            .iter()
            .zip(comps)
            .all(|(&x, c)| !matches!(c, Component::Free) || x >= 0),
        SemigroupSpec::Table(_) => true,
    }
}

/// Every setting a run used, embedded in its report.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunConfig {
    pub command: String,
    pub upper: Option<Vec<usize>>,
    pub max_threshold: usize,
    pub window: usize,
    pub mode: Mode,
    pub cap: u64,
    pub format: Format,
    pub output: Option<String>,
}

impl RunConfig {
    fn resolve(
        command: &str,
        flags: &Flags,
        r: usize,
        default_box: Option<Vec<usize>>,
    ) -> std::result::Result<Self, String> {
        if flags.window == 0 {
            return Err("--window must be at least 1".into());
        }
        if flags.cap == 0 {
            return Err("--cap must be positive".into());
        }
        let upper = match (&flags.upper, default_box) {
            (Some(b), _) if b.len() == 1 => Some(vec![b[0]; r]),
            (Some(b), _) if b.len() == r => Some(b.clone()),
            (Some(b), _) => {
                return Err(format!(
                    "--box has {} values, the problem has r = {r}",
                    b.len()
                ))
            }
            (None, d) => d,
        };
        Ok(RunConfig {
            command: command.into(),
            upper,
            max_threshold: flags.max_threshold.unwrap_or(if r == 1 { 50 } else { 12 }),
            window: flags.window,
            mode: match flags.mode {
                ModeArg::Memoized => Mode::Memoized,
                ModeArg::Brute => Mode::Brute,
            },
            cap: flags.cap,
            format: flags.format.unwrap_or(if command == "grow" {
                Format::Csv
            } else {
                Format::Json
            }),
            output: flags.output.as_ref().map(|p| p.display().to_string()),
        })
    }

    pub fn to_json(&self) -> Value {
        json!({
            "command": self.command,
            "box": self.upper,
            "max_threshold": self.max_threshold,
            "window": self.window,
            "mode": match self.mode { Mode::Memoized => "memoized", Mode::Brute => "brute" },
            "cap": self.cap,
            "format": match self.format { Format::Csv => "csv", Format::Json => "json" },
            "output": self.output,
        })
    }

    fn growth_options(&self) -> GrowthOptions {
        GrowthOptions {
            mode: self.mode,
            ..GrowthOptions::default()
        }
    }
}

fn rational_json(q: &Rat<Int>) -> Value {
    let (num, den) = rational_parts(q);
    json!({ "num": num, "den": den })
}

fn fitted_json(f: &FittedPolynomial<Int>) -> Value {
    let monomials: Vec<Value> = f
        .polynomial
        .terms()
        .iter()
        .map(|(e, c)| json!({ "exponents": e, "coefficient": rational_json(c) }))
        .collect();
    json!({
        "polynomial": f.polynomial.to_string(),
        "monomials": monomials,
        "thresholds": f.thresholds,
        "relaxed_thresholds": f.relaxed_thresholds,
        "window": f.window,
        "degree_bounds": f.degree_bounds,
        "degrees": f.degrees(),
        "validated_box": { "lo": f.validated_lo, "hi": f.validated_hi },
    })
}

fn stabilization_json(rep: &StabilizationReport<Int>) -> Value {
    json!({
        "status": match rep.status { Status::Stabilized => "stabilized", Status::NotStabilized => "not_stabilized" },
        "fitted": rep.fitted.as_ref().map(fitted_json),
        "search_limit": rep.search_limit,
        "window": rep.window,
        "table_box": rep.table_box,
        "witnesses": rep.witnesses.iter().map(|w| json!({
            "threshold": w.threshold,
            "h": w.h,
            "gamma": w.gamma.to_string(),
            "predicted": rational_json(&w.predicted),
        })).collect::<Vec<_>>(),
    })
}

fn set_json(s: &BTreeSet<i64>) -> Value {
    json!(s.iter().collect::<Vec<_>>())
}

fn discrepancy_json(d: &Discrepancy) -> Value {
    match d {
        Discrepancy::Polynomial { fitted, expected } => {
            json!({ "kind": "polynomial", "fitted": fitted, "expected": expected })
        }
        Discrepancy::Decomposition { h } => json!({ "kind": "decomposition", "h": h }),
        Discrepancy::Delta { h, observed } => {
            json!({ "kind": "delta", "h": h, "observed": observed })
        }
    }
}

fn problem_json(lp: &LoadedProblem) -> Value {
    let p = &lp.problem;
    json!({
        "name": lp.name,
        "r": p.r(),
        "k": p.k(),
        "s": p.s(),
        "base_size": p.base().len(),
    })
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json values serialize");
    s.push('\n');
    s
}

/// Parses `args` (including the program name) and runs one command.
pub fn run<I, S>(args: I) -> Outcome
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => execute(cli.command),
        Err(e) => {
            let code = if e.use_stderr() {
                EXIT_INVALID
            } else {
                EXIT_OK
            };
            let text = e.to_string();
            if code == EXIT_OK {
                Outcome::ok(text)
            } else {
                Outcome::fail(code, String::new(), text)
            }
        }
    }
}

fn read_problem(file: &PathBuf) -> std::result::Result<LoadedProblem, Outcome> {
    let text = std::fs::read_to_string(file).map_err(|e| {
        Outcome::fail(
            EXIT_INVALID,
            String::new(),
            format!("cannot read {}: {e}\n", file.display()),
        )
    })?;
    load_problem(&text).map_err(|diags| invalid_outcome(&diags))
}

fn invalid_outcome(diags: &[Diagnostic]) -> Outcome {
    let stdout = pretty(&json!({
        "valid": false,
        "errors": diags.iter().map(Diagnostic::to_json).collect::<Vec<_>>(),
    }));
    let stderr = diags
        .iter()
        .map(|d| format!("error at {}: {}\n", d.location, d.message))
        .collect();
    Outcome::fail(EXIT_INVALID, stdout, stderr)
}

fn error_outcome(err: &Error) -> Outcome {
    Outcome::fail(
        exit_code(err),
        pretty(&json!({ "error": { "kind": error_kind(err), "message": err.to_string() } })),
        format!("error: {err}\n"),
    )
}

/// Sends `data` to `--output` when given, else returns it as stdout.
fn deliver(cfg: &RunConfig, code: i32, data: String, stderr: String) -> Outcome {
    match &cfg.output {
        None => Outcome::fail(code, data, stderr),
        Some(path) => match std::fs::write(path, data) {
            Ok(()) => Outcome::fail(code, String::new(), stderr),
            Err(e) => Outcome::fail(
                EXIT_FAILED,
                String::new(),
                format!("cannot write {path}: {e}\n"),
            ),
        },
    }
}

fn config_or_exit(
    command: &str,
    flags: &Flags,
    r: usize,
    default_box: Option<Vec<usize>>,
) -> std::result::Result<RunConfig, Outcome> {
    RunConfig::resolve(command, flags, r, default_box)
        .map_err(|m| Outcome::fail(EXIT_INVALID, String::new(), format!("error: {m}\n")))
}

/// Runs a parsed command.
pub fn execute(command: Command) -> Outcome {
    let result = match command {
        Command::Validate { file } => cmd_validate(&file),
        Command::Grow { file, flags } => cmd_grow(&file, &flags),
        Command::Fit { file, flags } => cmd_fit(&file, &flags),
        Command::Structure { file, flags } => cmd_structure(&file, &flags),
        Command::Series { file, flags } => cmd_series(&file, &flags),
        Command::Frobenius { generators } => Ok(cmd_frobenius(&generators)),
        Command::OracleCheck { file, flags } => cmd_oracle_check(&file, &flags, |_| {}),
    };
    result.unwrap_or_else(|o| o)
}

type CmdResult = std::result::Result<Outcome, Outcome>;

fn cmd_validate(file: &PathBuf) -> CmdResult {
    let lp = read_problem(file)?;
    let p = &lp.problem;
    let kind = match &**p.spec() {
        SemigroupSpec::Product(_) => "product",
        SemigroupSpec::Table(_) => "table",
    };
    Ok(Outcome::ok(pretty(&json!({
        "valid": true,
        "problem": problem_json(&lp),
        "semigroup": kind,
        "group": p.spec().is_group(),
        "nonnegative": lp.nonnegative,
    }))))
}

fn cmd_grow(file: &PathBuf, flags: &Flags) -> CmdResult {
    let lp = read_problem(file)?;
    let p = &lp.problem;
    let cfg = config_or_exit("grow", flags, p.r(), Some(vec![10; p.r()]))?;
    let upper = cfg.upper.clone().expect("grow has a default box");
    let table = growth_table(p, &upper, &cfg.growth_options()).map_err(|e| error_outcome(&e))?;
    let data = match cfg.format {
        Format::Csv => table.to_csv(),
        Format::Json => pretty(&json!({
            "config": cfg.to_json(),
            "problem": problem_json(&lp),
            "rows": table.gamma().iter().map(|(h, g)| json!({ "h": h, "gamma": g })).collect::<Vec<_>>(),
        })),
    };
    Ok(deliver(&cfg, EXIT_OK, data, String::new()))
}

fn cmd_fit(file: &PathBuf, flags: &Flags) -> CmdResult {
    let lp = read_problem(file)?;
    let p = &lp.problem;
    let cfg = config_or_exit("fit", flags, p.r(), None)?;
    let rep = detect_stabilization::<Int>(p, cfg.max_threshold, cfg.window, &cfg.growth_options())
        .map_err(|e| error_outcome(&e))?;
    let (code, stderr) = match rep.status {
        Status::Stabilized => (EXIT_OK, String::new()),
        Status::NotStabilized => (
            EXIT_NOT_STABILIZED,
            format!("no threshold up to {} validated\n", cfg.max_threshold),
        ),
    };
    let data = pretty(&json!({
        "config": cfg.to_json(),
        "problem": problem_json(&lp),
        "report": stabilization_json(&rep),
    }));
    Ok(deliver(&cfg, code, data, stderr))
}

fn cmd_structure(file: &PathBuf, flags: &Flags) -> CmdResult {
    let lp = read_problem(file)?;
    let p = &lp.problem;
    let cfg = config_or_exit("structure", flags, p.r(), None)?;
    let norm = normalize_problem(p).map_err(|e| error_outcome(&e))?;
    let rep =
        structure_sets(&norm, cfg.max_threshold, cfg.window).map_err(|e| error_outcome(&e))?;
    let normalized = norm.to_problem().map_err(|e| error_outcome(&e))?;
    let stab = detect_stabilization::<Int>(
        &normalized,
        cfg.max_threshold,
        cfg.window,
        &cfg.growth_options(),
    )
    .map_err(|e| error_outcome(&e))?;
    let (verification, code, stderr) = match &stab.fitted {
        Some(fit) => {
            let d = verify_multilinear(&norm, &rep, fit).map_err(|e| error_outcome(&e))?;
            let code = if d.is_empty() { EXIT_OK } else { EXIT_FAILED };
            let stderr = if d.is_empty() {
                String::new()
            } else {
                format!(
                    "{} discrepancies against the multilinear formula\n",
                    d.len()
                )
            };
            (
                json!({
                    "consistent": d.is_empty(),
                    "discrepancies": d.iter().map(discrepancy_json).collect::<Vec<_>>(),
                }),
                code,
                stderr,
            )
        }
        None => (
            json!({ "consistent": Value::Null, "discrepancies": [] }),
            EXIT_NOT_STABILIZED,
            "growth polynomial did not stabilize; multilinear check skipped\n".to_string(),
        ),
    };
    let data = pretty(&json!({
        "config": cfg.to_json(),
        "problem": problem_json(&lp),
        "normalized": {
            "B": norm.base,
            "A": norm.summands,
            "base_shift": norm.base_shift,
            "summand_shifts": norm.summand_shifts,
            "gcd": norm.gcd,
        },
        "structure": {
            "b_star": rep.b_star,
            "a_star": rep.a_star,
            "c": rep.c,
            "C": set_json(&rep.c_set),
            "d": rep.d,
            "D": set_json(&rep.d_set),
            "delta": rep.delta,
            "g_low": set_json(&rep.g_low),
            "g_top": set_json(&rep.g_top),
            "h_star": rep.h_star,
            "top_at_h_star": rep.top_at_h_star,
            "certified_steps": rep.certified,
        },
        "fit": stab.fitted.as_ref().map(fitted_json),
        "verification": verification,
    }));
    Ok(deliver(&cfg, code, data, stderr))
}

fn cmd_series(file: &PathBuf, flags: &Flags) -> CmdResult {
    let lp = read_problem(file)?;
    let p = &lp.problem;
    let default_box = p
        .k()
        .iter()
        .map(|k| {
            if p.r() == 1 {
                20.max(k + 4)
            } else {
                10.max(k + 4)
            }
        })
        .collect();
    let cfg = config_or_exit("series", flags, p.r(), Some(default_box))?;
    let upper = cfg.upper.clone().expect("series has a default box");
    let sum = rational_form_check::<Int>(p, &upper, cfg.window, &cfg.growth_options())
        .map_err(|e| error_outcome(&e))?;
    let num = &sum.numerator;
    let nonzero: Vec<Value> = num
        .p_coefficients()
        .iter()
        .filter(|(_, c)| !c.is_zero())
        .map(|(e, c)| json!({ "exponents": e, "coefficient": c.to_string() }))
        .collect();
    let mut stderr = String::new();
    if let Some(a) = &num.anomaly {
        stderr.push_str(&format!("anomaly: {a}\n"));
    }
    let data = pretty(&json!({
        "config": cfg.to_json(),
        "problem": problem_json(&lp),
        "numerator": {
            "k": num.k,
            "beta": num.beta,
            "degree": num.degree,
            "margin": num.margin,
            "terminated": num.terminated,
            "anomaly": num.anomaly,
            "P": nonzero,
        },
        "fit": sum.fit.as_ref().map(fitted_json),
        "tail": {
            "lo": sum.tail_lo,
            "points": sum.tail_points,
            "agrees": sum.tail_agrees,
        },
    }));
    Ok(deliver(&cfg, EXIT_OK, data, stderr))
}

fn cmd_frobenius(generators: &[i64]) -> Outcome {
    match (frobenius_number(generators), gap_count(generators)) {
        (Ok(f), Ok(_)) => Outcome::ok(format!("{f}\n")),
        (Err(e), _) | (_, Err(e)) => {
            Outcome::fail(exit_code(&e), String::new(), format!("error: {e}\n"))
        }
    }
}

/// `oracle-check` with a hook that may alter the memoized table before the
/// comparison; the hook exists so tests can confirm divergences are caught.
pub fn cmd_oracle_check(
    file: &PathBuf,
    flags: &Flags,
    tamper: impl FnOnce(&mut GrowthTable),
) -> CmdResult {
    let lp = read_problem(file)?;
    let p = &lp.problem;
    let cfg = config_or_exit("oracle-check", flags, p.r(), Some(vec![6; p.r()]))?;
    let upper = cfg.upper.clone().expect("oracle-check has a default box");
    let summary = oracle_check(p, &upper, cfg.cap, tamper).map_err(|e| error_outcome(&e))?;
    let (code, stderr) = match &summary.first_divergence {
        None => (EXIT_OK, String::new()),
        Some(d) => (
            EXIT_FAILED,
            format!(
                "divergence at h = {:?}: memoized {} vs oracle {}\n",
                d.0, d.1, d.2
            ),
        ),
    };
    let data = pretty(&json!({
        "config": cfg.to_json(),
        "problem": problem_json(&lp),
        "pass": summary.first_divergence.is_none(),
        "points": summary.points,
        "enumerated_points": summary.enumerated,
        "skipped_over_cap": summary.skipped,
        "first_divergence": summary.first_divergence.as_ref().map(|(h, m, o)| json!({
            "h": h, "memoized": m, "oracle": o,
        })),
    }));
    Ok(deliver(&cfg, code, data, stderr))
}

/// Result of comparing the memoized engine against both oracles.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleSummary {
    pub points: usize,
    /// Points also checked by multiset enumeration.
    pub enumerated: usize,
    /// Points whose enumeration would exceed the cap.
    pub skipped: usize,
    /// `(h, memoized γ, oracle γ)` at the first disagreement.
    pub first_divergence: Option<(Vec<usize>, u64, u64)>,
}

/// Compares the memoized table with brute-mode evaluation everywhere and
/// with multiset enumeration wherever it fits under `cap`.
pub fn oracle_check(
    p: &Problem,
    upper: &[usize],
    cap: u64,
    tamper: impl FnOnce(&mut GrowthTable),
) -> crate::Result<OracleSummary> {
    let mut memo = growth_table(
        p,
        upper,
        &GrowthOptions {
            retain: Retain::All,
            ..GrowthOptions::default()
        },
    )?;
    tamper(&mut memo);
    let brute = growth_table(
        p,
        upper,
        &GrowthOptions {
            mode: Mode::Brute,
            ..GrowthOptions::default()
        },
    )?;
    let mut first = first_divergence(&memo, &brute).map(|d| (d.h, d.left, d.right));
    let mut enumerated = 0;
    let mut skipped = 0;
    for h in lattice::points(upper) {
        match brute_force_sumset(p, &h, cap) {
            Ok(set) => {
                enumerated += 1;
                let g = memo.get(&h).expect("point in box");
                let same_set = memo.retained().get(&h) == Some(&set);
                if (g != set.len() as u64 || !same_set) && first.as_ref().is_none_or(|f| h < f.0) {
                    first = Some((h.clone(), g, set.len() as u64));
                }
            }
            Err(Error::EnumerationCapExceeded { .. }) => skipped += 1,
            Err(e) => return Err(e),
        }
    }
    Ok(OracleSummary {
        points: memo.gamma().len(),
        enumerated,
        skipped,
        first_divergence: first,
    })
}
