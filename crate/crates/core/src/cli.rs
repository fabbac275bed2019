//! Command-line front end.
//!
//! Every command produces a report: the argument vector, a SHA-256 digest
//! of each input file, a command-specific result and the exit status.
//! Exit codes: 0 success, 1 usage or parse error, 2 capacity error,
//! 3 negative result (unsatisfiable, inconsistent, gadget not found, or an
//! attack invariant violated).

use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::adversary::{self, demo, gen_onehot_formula, AttackClass, BlockSpec, Mode, WitnessPair};
use crate::classify::classify_set;
use crate::clauses::{synthesize_clauses, Family};
use crate::constraint::{builtin, Constraint, ConstraintSet, DEFAULT_MAX_ARITY};
use crate::error::{Error, Result};
use crate::format::{self, AssignmentList};
use crate::formula::{Assignment, Formula};
use crate::fraction::Fraction;
use crate::gadget::{self, GadgetLibrary};
use crate::oracle::{self, CspAnswer, CspQuery, DEFAULT_N_MAX};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_CAPACITY: i32 = 2;
pub const EXIT_NEGATIVE: i32 = 3;

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Usage(_) | Error::Parse { .. } => EXIT_USAGE,
        Error::Capacity { .. } => EXIT_CAPACITY,
        Error::Invariant(_) => EXIT_NEGATIVE,
    }
}

#[derive(Debug, Parser)]
#[command(name = "dichotomy", version, about = "Boolean CSP classification, proximity-proof adversaries and gadget reductions")]
struct Cli {
    /// Largest constraint arity accepted when reading files.
    #[arg(long, global = true, default_value_t = DEFAULT_MAX_ARITY)]
    max_arity: usize,
    /// Largest variable count for exhaustive enumeration.
    #[arg(long, global = true, default_value_t = DEFAULT_N_MAX)]
    n_max: usize,
    #[arg(long, global = true, value_enum, default_value_t = ReportMode::Text)]
    report: ReportMode,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ReportMode {
    Json,
    Text,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Classify a constraint set.
    Classify {
        #[arg(long)]
        set: PathBuf,
    },
    /// Synthesize clause representations for every constraint of a set.
    Synth {
        #[arg(long)]
        set: PathBuf,
        /// horn, dual-horn, two-clause or linear-equation; all four if omitted.
        #[arg(long)]
        family: Option<String>,
    },
    /// Exact maximum satisfiable fraction, optionally as a gap decision.
    Solve {
        #[command(flatten)]
        input: FormulaInput,
        #[arg(long, requires = "sigma")]
        kappa: Option<String>,
        #[arg(long, requires = "kappa")]
        sigma: Option<String>,
    },
    /// Solve a linear formula by Gaussian elimination over GF(2).
    LinAttack {
        #[command(flatten)]
        input: FormulaInput,
    },
    /// Distance from an assignment to the nearest satisfying assignment.
    Distance {
        #[command(flatten)]
        input: FormulaInput,
        #[arg(long)]
        assignment: String,
    },
    /// Generate a one-hot formula, or a ready-made attack demo.
    Gen(GenArgs),
    /// Prune, combine witnesses and measure.
    Attack {
        #[arg(long)]
        class: String,
        #[command(flatten)]
        input: FormulaInput,
        #[arg(long)]
        witnesses: PathBuf,
        #[arg(long)]
        alphas: PathBuf,
    },
    /// Search for a perfect gadget implementing a target constraint.
    Gadget(GadgetArgs),
    /// Compile a clause formula through a gadget library.
    Reduce {
        #[arg(long)]
        formula: PathBuf,
        /// Constraint set the gadgets are written over.
        #[arg(long)]
        set: PathBuf,
        /// Directory of `*.gad` files.
        #[arg(long)]
        library: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
struct FormulaInput {
    #[arg(long)]
    formula: PathBuf,
    /// Optional constraint set the formula's names resolve against first.
    #[arg(long)]
    set: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct GenArgs {
    #[arg(long)]
    mode: Option<String>,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    m: usize,
    #[arg(long)]
    out: PathBuf,
    /// Where to write the honest assignments the attack compares against.
    #[arg(long)]
    alphas: Option<PathBuf>,
    /// Generate a verifier formula in this class instead of the plain one-hot formula.
    #[arg(long)]
    demo: Option<String>,
    /// Where to write the demo witnesses (required with --demo).
    #[arg(long)]
    witnesses: Option<PathBuf>,
    /// Violated fraction per witness, comma separated, or one value for all.
    #[arg(long)]
    epsilon: Option<String>,
}

#[derive(Debug, Args)]
struct GadgetArgs {
    #[arg(long, required_unless_present = "write_clause_library")]
    target: Option<String>,
    #[arg(long, required_unless_present = "write_clause_library")]
    set: Option<PathBuf>,
    #[arg(long, default_value_t = 2)]
    max_aux: usize,
    #[arg(long, default_value_t = 3)]
    max_apps: usize,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Write the one-in-three clause gadgets and their set into this directory.
    #[arg(long, conflicts_with_all = ["target", "set"])]
    write_clause_library: Option<PathBuf>,
}

#[derive(Debug, Serialize)]
struct InputDigest {
    path: String,
    sha256: String,
}

#[derive(Debug, Serialize)]
struct RunReport {
    command: Vec<String>,
    inputs: Vec<InputDigest>,
    result: Value,
    exit_status: i32,
}

/// What a run printed and how it ended.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

struct Ctx {
    max_arity: usize,
    n_max: usize,
    inputs: Vec<InputDigest>,
}

impl Ctx {
    fn read(&mut self, path: &Path) -> Result<String> {
        let bytes = std::fs::read(path)
            .map_err(|e| Error::usage(format!("cannot read {}: {e}", path.display())))?;
        self.inputs.push(InputDigest {
            path: path.display().to_string(),
            sha256: hex::encode(Sha256::digest(&bytes)),
        });
        String::from_utf8(bytes).map_err(|_| Error::parse(0, format!("{} is not UTF-8", path.display())))
    }

    fn set(&mut self, path: &Path) -> Result<ConstraintSet> {
        let text = self.read(path)?;
        format::parse_constraint_set_with_limit(&text, self.max_arity)
    }

    fn formula(&mut self, input: &FormulaInput) -> Result<Formula> {
        let base = input.set.as_deref().map(|p| self.set(p)).transpose()?;
        let text = self.read(&input.formula)?;
        format::parse_formula_with_limit(&text, base.as_ref(), self.max_arity)
    }

    fn assignments(&mut self, path: &Path) -> Result<AssignmentList> {
        let text = self.read(path)?;
        format::parse_assignments(&text)
    }
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::usage(format!("cannot write {}: {e}", path.display())))
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report values serialize")
}

fn parse_fraction(s: &str, what: &str) -> Result<Fraction> {
    s.parse()
        .map_err(|_| Error::usage(format!("invalid {what} `{s}`, expected n/d")))
}

/// Runs the command line `args` (program name first).
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let args: Vec<std::ffi::OsString> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                Outcome {
                    code: EXIT_USAGE,
                    stdout: String::new(),
                    stderr: text,
                }
            } else {
                Outcome {
                    code: EXIT_OK,
                    stdout: text,
                    stderr: String::new(),
                }
            };
        }
    };
    let mut ctx = Ctx {
        max_arity: cli.max_arity,
        n_max: cli.n_max,
        inputs: Vec::new(),
    };
    match dispatch(&cli.command, &mut ctx) {
        Ok((code, result)) => {
            let report = RunReport {
                command: args.iter().skip(1).map(|a| a.to_string_lossy().into_owned()).collect(),
                inputs: ctx.inputs,
                result,
                exit_status: code,
            };
            let stdout = match cli.report {
                ReportMode::Json => render_json(&report),
                ReportMode::Text => render_text(&report),
            };
            Outcome {
                code,
                stdout,
                stderr: String::new(),
            }
        }
        Err(e) => Outcome {
            code: exit_code(&e),
            stdout: String::new(),
            stderr: format!("error: {e}\n"),
        },
    }
}

fn render_json(report: &RunReport) -> String {
    // Going through `Value` sorts object keys, so parsing the output and
    // printing it again reproduces it byte for byte.
    let mut s = serde_json::to_string_pretty(&to_value(report)).expect("serializable");
    s.push('\n');
    s
}

fn scalar(v: &Value) -> Option<String> {
    match v {
        Value::Null => Some("none".into()),
        Value::Bool(b) => Some(b.to_string()),
        Value::Number(n) => Some(n.to_string()),
        Value::String(s) => Some(s.clone()),
        _ => None,
    }
}

fn flatten(prefix: &str, v: &Value, out: &mut String) {
    match v {
        Value::Object(map) => {
            for (k, child) in map {
                let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                flatten(&key, child, out);
            }
        }
        Value::Array(items) => {
            let scalars: Option<Vec<String>> = items.iter().map(scalar).collect();
            match scalars {
                Some(s) if s.iter().all(|x| !x.contains(char::is_whitespace)) => {
                    out.push_str(&format!("{prefix}: {}\n", s.join(" ")));
                }
                _ => {
                    for (i, child) in items.iter().enumerate() {
                        flatten(&format!("{prefix}[{i}]"), child, out);
                    }
                }
            }
        }
        other => {
            let text = scalar(other).expect("scalar");
            if text.contains('\n') {
                out.push_str(&format!("{prefix}:\n"));
                for line in text.lines() {
                    out.push_str(&format!("  {line}\n"));
                }
            } else {
                out.push_str(&format!("{prefix}: {text}\n"));
            }
        }
    }
}

/// One `key: value` line per fact of the result, summary first.
fn render_text(report: &RunReport) -> String {
    let mut out = String::new();
    if let Some(summary) = report.result.get("summary").and_then(Value::as_str) {
        out.push_str(summary);
        out.push('\n');
    }
    let mut rest = report.result.clone();
    if let Value::Object(map) = &mut rest {
        map.remove("summary");
    }
    flatten("", &rest, &mut out);
    out.push_str(&format!("exit_status: {}\n", report.exit_status));
    out
}

fn dispatch(cmd: &Command, ctx: &mut Ctx) -> Result<(i32, Value)> {
    match cmd {
        Command::Classify { set } => classify(ctx, set),
        Command::Synth { set, family } => synth(ctx, set, family.as_deref()),
        Command::Solve { input, kappa, sigma } => solve(ctx, input, kappa.as_deref(), sigma.as_deref()),
        Command::LinAttack { input } => lin_attack(ctx, input),
        Command::Distance { input, assignment } => distance(ctx, input, assignment),
        Command::Gen(args) => gen(args),
        Command::Attack {
            class,
            input,
            witnesses,
            alphas,
        } => attack(ctx, class, input, witnesses, alphas),
        Command::Gadget(args) => gadget_cmd(ctx, args),
        Command::Reduce {
            formula,
            set,
            library,
            out,
        } => reduce(ctx, formula, set, library, out.as_deref()),
    }
}

fn classify(ctx: &mut Ctx, path: &Path) -> Result<(i32, Value)> {
    let s = ctx.set(path)?;
    let report = classify_set(&s);
    let mut v = to_value(&report);
    v["summary"] = json!(report.verdict.to_string());
    Ok((EXIT_OK, v))
}

fn synth(ctx: &mut Ctx, path: &Path, family: Option<&str>) -> Result<(i32, Value)> {
    let s = ctx.set(path)?;
    let families = match family {
        Some(f) => vec![f.parse::<Family>()?],
        None => Family::ALL.to_vec(),
    };
    let mut per_constraint = Vec::new();
    for c in &s {
        let mut reps = serde_json::Map::new();
        for &f in &families {
            let rep = synthesize_clauses(c, f);
            let clauses: Option<Vec<String>> =
                rep.map(|r| r.clauses.iter().map(ToString::to_string).collect());
            reps.insert(f.tag().to_string(), json!(clauses));
        }
        per_constraint.push(json!({ "name": c.name(), "representations": reps }));
    }
    Ok((
        EXIT_OK,
        json!({
            "summary": format!("clause synthesis for {} constraints", s.len()),
            "per_constraint": per_constraint,
        }),
    ))
}

fn solve(ctx: &mut Ctx, input: &FormulaInput, kappa: Option<&str>, sigma: Option<&str>) -> Result<(i32, Value)> {
    let phi = ctx.formula(input)?;
    let best = oracle::max_sat(&phi, ctx.n_max)?;
    let mut v = json!({
        "max_fraction": best.fraction,
        "witness": best.witness,
        "satisfiable": best.fraction == Fraction::ONE,
    });
    let code = match (kappa, sigma) {
        (Some(k), Some(s)) => {
            let q = CspQuery::new(phi, parse_fraction(k, "kappa")?, parse_fraction(s, "sigma")?)?;
            let answer = oracle::answer_for(best.fraction, q.kappa(), q.sigma());
            v["kappa"] = json!(q.kappa());
            v["sigma"] = json!(q.sigma());
            v["answer"] = json!(answer);
            v["summary"] = json!(answer.to_string());
            if answer == CspAnswer::KappaSatisfiable {
                EXIT_OK
            } else {
                EXIT_NEGATIVE
            }
        }
        _ => {
            let sat = best.fraction == Fraction::ONE;
            v["summary"] = json!(if sat {
                format!("satisfiable by {}", best.witness)
            } else {
                format!("unsatisfiable, best fraction {}", best.fraction)
            });
            if sat {
                EXIT_OK
            } else {
                EXIT_NEGATIVE
            }
        }
    };
    Ok((code, v))
}

fn lin_attack(ctx: &mut Ctx, input: &FormulaInput) -> Result<(i32, Value)> {
    let phi = ctx.formula(input)?;
    Ok(match oracle::linear_attack(&phi)? {
        Some(x) => (
            EXIT_OK,
            json!({ "summary": format!("solved: {x}"), "status": "solved", "assignment": x }),
        ),
        None => (
            EXIT_NEGATIVE,
            json!({ "summary": "inconsistent", "status": "inconsistent", "assignment": null }),
        ),
    })
}

fn distance(ctx: &mut Ctx, input: &FormulaInput, bits: &str) -> Result<(i32, Value)> {
    let phi = ctx.formula(input)?;
    let a: Assignment = bits
        .parse()
        .map_err(|_| Error::usage(format!("expected a 0/1 string, got `{bits}`")))?;
    let fraction = phi.evaluate(&a)?;
    let d = oracle::distance_to_satisfying(&phi, &a, ctx.n_max)?;
    let (code, text) = match d {
        Some(d) => (EXIT_OK, d.to_string()),
        None => (EXIT_NEGATIVE, "infinite".to_string()),
    };
    Ok((
        code,
        json!({
            "summary": format!("distance {text}"),
            "distance": text,
            "satisfied_fraction": fraction,
        }),
    ))
}

fn parse_epsilons(spec: &str, count: usize) -> Result<Vec<Fraction>> {
    let parts: Vec<Fraction> = spec
        .split(',')
        .map(|p| parse_fraction(p.trim(), "epsilon"))
        .collect::<Result<_>>()?;
    match parts.len() {
        1 => Ok(vec![parts[0]; count]),
        n if n == count => Ok(parts),
        n => Err(Error::usage(format!("got {n} epsilons for {count} witnesses"))),
    }
}

fn gen(args: &GenArgs) -> Result<(i32, Value)> {
    let mode = args.mode.as_deref().map(str::parse::<Mode>).transpose()?;
    let Some(class) = args.demo.as_deref() else {
        if args.witnesses.is_some() || args.epsilon.is_some() {
            return Err(Error::usage("--witnesses and --epsilon need --demo"));
        }
        let mode = mode.ok_or_else(|| Error::usage("--mode is required without --demo"))?;
        let spec = BlockSpec::new(args.n, args.m, mode)?;
        let (phi, sats) = gen_onehot_formula(&spec)?;
        write_file(&args.out, &format::write_formula(&phi))?;
        let alphas = sats[1..].to_vec();
        if let Some(path) = &args.alphas {
            write_file(path, &format::write_assignments(&AssignmentList { split: None, rows: alphas }))?;
        }
        return Ok((
            EXIT_OK,
            json!({
                "summary": format!("{mode} one-hot formula on {} variables", phi.num_vars()),
                "num_vars": phi.num_vars(),
                "applications": phi.len(),
                "satisfying": sats,
            }),
        ));
    };

    let class: AttackClass = class.parse()?;
    let expected = if class == AttackClass::TwoCnf {
        Mode::Triplewise
    } else {
        Mode::Pairwise
    };
    if mode.is_some_and(|m| m != expected) {
        return Err(Error::usage(format!("the {class} demo uses {expected} blocks")));
    }
    let witness_path = args
        .witnesses
        .as_ref()
        .ok_or_else(|| Error::usage("--demo needs --witnesses"))?;
    let mut d = demo::demo(class, args.n, args.m)?;
    if let Some(spec) = &args.epsilon {
        let eps = parse_epsilons(spec, d.witnesses.len())?;
        d = d.with_violations(&eps)?;
    }
    write_file(&args.out, &format::write_formula(&d.psi))?;
    let base = d.witnesses[0].base.len();
    let proof = d.witnesses[0].proof.len();
    let list = AssignmentList {
        split: Some((base, proof)),
        rows: d.witnesses.iter().map(WitnessPair::full).collect(),
    };
    write_file(witness_path, &format::write_assignments(&list))?;
    if let Some(path) = &args.alphas {
        let rows = d.alphas.clone();
        write_file(path, &format::write_assignments(&AssignmentList { split: None, rows }))?;
    }
    Ok((
        EXIT_OK,
        json!({
            "summary": format!("{class} demo on {} variables ({base} assignment, {proof} proof)", d.psi.num_vars()),
            "class": class,
            "num_vars": d.psi.num_vars(),
            "applications": d.psi.len(),
            "total_weight": d.psi.total_weight(),
            "witness_count": d.witnesses.len(),
        }),
    ))
}

fn attack(
    ctx: &mut Ctx,
    class: &str,
    input: &FormulaInput,
    witnesses: &Path,
    alphas: &Path,
) -> Result<(i32, Value)> {
    let class: AttackClass = class.parse()?;
    let psi = ctx.formula(input)?;
    let w = ctx.assignments(witnesses)?;
    let a = ctx.assignments(alphas)?;
    let base_len = match (w.split, a.rows.first()) {
        (Some((n, _)), _) => n,
        (None, Some(first)) => first.len(),
        (None, None) => return Err(Error::usage("witness file has no split header and no alphas given")),
    };
    let pairs = w
        .rows
        .iter()
        .map(|row| WitnessPair::split(row, base_len))
        .collect::<Result<Vec<_>>>()?;
    let r = adversary::run_attack(class, &psi, &pairs, &a.rows)?;
    let mut v = to_value(&r);
    v["summary"] = json!(format!(
        "{class} attack: pruned formula fully satisfied, original {} (bound {}), min distance {}",
        r.satisfied_fraction_original,
        r.bound,
        r.min_distance.map_or("none".to_string(), |d| d.to_string())
    ));
    Ok((EXIT_OK, v))
}

fn resolve_target(name: &str, s: &ConstraintSet) -> Result<Constraint> {
    s.by_name(name)
        .cloned()
        .or_else(|| builtin::lookup(name))
        .ok_or_else(|| Error::usage(format!("unknown target constraint `{name}`")))
}

fn gadget_cmd(ctx: &mut Ctx, args: &GadgetArgs) -> Result<(i32, Value)> {
    if let Some(dir) = &args.write_clause_library {
        let (s, lib) = gadget::one_in_three_clause_library();
        std::fs::create_dir_all(dir)
            .map_err(|e| Error::usage(format!("cannot create {}: {e}", dir.display())))?;
        write_file(&dir.join("1in3.cset"), &format::write_constraint_set(&s))?;
        let mut files = Vec::new();
        for g in lib.iter() {
            let name = format!("{}.gad", g.target.name());
            write_file(&dir.join(&name), &gadget::write_gadget(g, &s))?;
            files.push(name);
        }
        return Ok((
            EXIT_OK,
            json!({
                "summary": format!("wrote {} clause gadgets over ONE_IN_THREE", files.len()),
                "files": files,
            }),
        ));
    }
    let set_path = args.set.as_ref().expect("required by clap");
    let s = ctx.set(set_path)?;
    let target = resolve_target(args.target.as_deref().expect("required by clap"), &s)?;
    let found = gadget::search_gadget(&target, &s, args.max_aux, args.max_apps)?;
    let Some(g) = found else {
        return Ok((
            EXIT_NEGATIVE,
            json!({
                "summary": format!("no gadget for {} within {} aux, {} applications", target.name(), args.max_aux, args.max_apps),
                "found": false,
            }),
        ));
    };
    if !gadget::verify_perfect(&g, &s, ctx.n_max.max(g.num_vars()))? {
        return Err(Error::invariant("search returned a gadget that fails verification"));
    }
    let text = gadget::write_gadget(&g, &s);
    if let Some(out) = &args.out {
        write_file(out, &text)?;
    }
    Ok((
        EXIT_OK,
        json!({
            "summary": format!("gadget for {} with {} aux and {} applications", target.name(), g.aux_count, g.applications.len()),
            "found": true,
            "aux_count": g.aux_count,
            "applications": g.applications.len(),
            "verified": true,
            "gadget": text,
        }),
    ))
}

fn reduce(
    ctx: &mut Ctx,
    formula: &Path,
    set: &Path,
    library: &Path,
    out: Option<&Path>,
) -> Result<(i32, Value)> {
    let s = Arc::new(ctx.set(set)?);
    let text = ctx.read(formula)?;
    let phi = format::parse_formula_with_limit(&text, None, ctx.max_arity)?;
    let lib = GadgetLibrary::load_dir(library, &s)?;
    for g in lib.iter() {
        if !gadget::verify_perfect(g, &s, ctx.n_max.max(g.num_vars()))? {
            return Err(Error::usage(format!("library gadget for `{}` is not perfect", g.target.name())));
        }
    }
    let reduced = gadget::reduce_3sat(&phi, s, &lib)?;
    if let Some(path) = out {
        write_file(path, &format::write_formula(&reduced))?;
    }
    // Satisfiability is compared only when both sides fit the oracle.
    let sat = |f: &Formula| -> Result<Option<bool>> {
        if f.num_vars() > ctx.n_max {
            return Ok(None);
        }
        Ok(Some(oracle::max_sat(f, ctx.n_max)?.fraction == Fraction::ONE))
    };
    let (before, after) = (sat(&phi)?, sat(&reduced)?);
    if let (Some(b), Some(a)) = (before, after) {
        if a != b {
            return Err(Error::invariant("reduction changed satisfiability"));
        }
    }
    Ok((
        EXIT_OK,
        json!({
            "summary": format!("reduced {} applications to {} on {} variables", phi.len(), reduced.len(), reduced.num_vars()),
            "num_vars": reduced.num_vars(),
            "applications": reduced.len(),
            "original_satisfiable": before,
            "reduced_satisfiable": after,
            "formula": format::write_formula(&reduced),
        }),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn help_and_bad_flags() {
        let ok = run(["dichotomy", "--help"]);
        assert_eq!(ok.code, EXIT_OK);
        assert!(ok.stdout.contains("classify"));
        let bad = run(["dichotomy", "classify"]);
        assert_eq!(bad.code, EXIT_USAGE);
        assert!(!bad.stderr.is_empty());
    }

    #[test]
    fn missing_file_is_usage_error() {
        let out = run(["dichotomy", "classify", "--set", "/nonexistent/x.cset"]);
        assert_eq!(out.code, EXIT_USAGE);
        assert!(out.stdout.is_empty());
    }

    #[test]
    fn text_rendering_flattens() {
        let report = RunReport {
            command: vec![],
            inputs: vec![],
            result: json!({"summary": "s", "a": {"b": [1, 2]}, "c": null}),
            exit_status: 0,
        };
        assert_eq!(render_text(&report), "s\na.b: 1 2\nc: none\nexit_status: 0\n");
    }
}
