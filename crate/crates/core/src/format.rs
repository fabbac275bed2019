//! Text formats for constraint sets (`.cset`), formulas (`.cfr`) and
//! assignment / witness lists.
//!
//! ```text
//! # constraint set
//! constraint XOR2 2 0110
//!
//! # formula: optional inline constraint lines, then the header and apps
//! vars 3
//! app 1 XOR2 1 2
//!
//! # assignments, optionally split into assignment and proof parts
//! split 2 1
//! 101
//! ```
//!
//! Formula files resolve constraint names against, in order, an explicitly
//! supplied set, constraints defined inline, and the built-in constraints.

use std::fmt::Write as _;
use std::sync::Arc;

use crate::constraint::{builtin, Constraint, ConstraintSet, DEFAULT_MAX_ARITY};
use crate::error::{Error, Result};
use crate::formula::{Application, Assignment, Formula};

fn lines(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines().enumerate().filter_map(|(i, raw)| {
        let content = raw.split('#').next().unwrap_or("");
        let words: Vec<&str> = content.split_whitespace().collect();
        (!words.is_empty()).then_some((i + 1, words))
    })
}

fn parse_num<T: std::str::FromStr>(line: usize, word: &str, what: &str) -> Result<T> {
    word.parse()
        .map_err(|_| Error::parse(line, format!("invalid {what} `{word}`")))
}

fn parse_constraint_line(line: usize, words: &[&str], max_arity: usize) -> Result<Constraint> {
    if words.len() != 4 {
        return Err(Error::parse(line, "expected `constraint <name> <arity> <table>`"));
    }
    let arity: usize = parse_num(line, words[2], "arity")?;
    if arity > max_arity {
        return Err(Error::Capacity {
            what: "constraint arity",
            got: arity,
            limit: max_arity,
        });
    }
    let table = words[3];
    if arity >= usize::BITS as usize || table.len() != 1usize << arity {
        return Err(Error::parse(
            line,
            format!("table of `{}` must have 2^{arity} entries", words[1]),
        ));
    }
    Constraint::from_table_with_limit(words[1], table, max_arity).map_err(|e| match e {
        Error::Usage(m) => Error::parse(line, m),
        other => other,
    })
}

pub fn parse_constraint_set(text: &str) -> Result<ConstraintSet> {
    parse_constraint_set_with_limit(text, DEFAULT_MAX_ARITY)
}

pub fn parse_constraint_set_with_limit(text: &str, max_arity: usize) -> Result<ConstraintSet> {
    let mut constraints = Vec::new();
    for (line, words) in lines(text) {
        match words[0] {
            "constraint" => constraints.push(parse_constraint_line(line, &words, max_arity)?),
            other => return Err(Error::parse(line, format!("unexpected keyword `{other}`"))),
        }
    }
    ConstraintSet::new(constraints)
}

pub fn write_constraint_set(set: &ConstraintSet) -> String {
    let mut out = String::new();
    for c in set {
        writeln!(out, "constraint {c}").unwrap();
    }
    out
}

pub fn parse_formula(text: &str, base: Option<&ConstraintSet>) -> Result<Formula> {
    parse_formula_with_limit(text, base, DEFAULT_MAX_ARITY)
}

pub fn parse_formula_with_limit(
    text: &str,
    base: Option<&ConstraintSet>,
    max_arity: usize,
) -> Result<Formula> {
    let mut constraints: Vec<Constraint> = base.map(|s| s.constraints().to_vec()).unwrap_or_default();
    let mut num_vars: Option<usize> = None;
    let mut raw_apps: Vec<(usize, u64, String, Vec<usize>)> = Vec::new();

    for (line, words) in lines(text) {
        match words[0] {
            "constraint" => {
                if num_vars.is_some() {
                    return Err(Error::parse(line, "constraint lines must precede `vars`"));
                }
                let c = parse_constraint_line(line, &words, max_arity)?;
                match constraints.iter().find(|d| d.name() == c.name()) {
                    Some(d) if d.same_table(&c) => {}
                    Some(_) => {
                        return Err(Error::parse(
                            line,
                            format!("conflicting definition of `{}`", c.name()),
                        ))
                    }
                    None => constraints.push(c),
                }
            }
            "vars" => {
                if num_vars.is_some() || words.len() != 2 {
                    return Err(Error::parse(line, "expected a single `vars <n>` line"));
                }
                let n: usize = parse_num(line, words[1], "variable count")?;
                if n == 0 {
                    return Err(Error::parse(line, "variable count must be positive"));
                }
                num_vars = Some(n);
            }
            "app" => {
                let n = num_vars.ok_or_else(|| Error::parse(line, "`app` before `vars`"))?;
                if words.len() < 3 {
                    return Err(Error::parse(line, "expected `app <weight> <name> <i1> ...`"));
                }
                let weight: u64 = parse_num(line, words[1], "weight")?;
                if weight == 0 {
                    return Err(Error::parse(line, "weight must be positive"));
                }
                let mut vars = Vec::with_capacity(words.len() - 3);
                for w in &words[3..] {
                    let v: usize = parse_num(line, w, "variable index")?;
                    if v == 0 || v > n {
                        return Err(Error::parse(line, format!("variable {v} outside 1..={n}")));
                    }
                    vars.push(v - 1);
                }
                raw_apps.push((line, weight, words[2].to_string(), vars));
            }
            other => return Err(Error::parse(line, format!("unexpected keyword `{other}`"))),
        }
    }

    let n = num_vars.ok_or_else(|| Error::parse(0, "missing `vars <n>` line"))?;
    for (line, _, name, _) in &raw_apps {
        if !constraints.iter().any(|c| c.name() == name) {
            let c = builtin::lookup(name)
                .ok_or_else(|| Error::parse(*line, format!("unknown constraint `{name}`")))?;
            constraints.push(c);
        }
    }
    if constraints.is_empty() {
        return Err(Error::parse(0, "formula defines no constraints"));
    }
    let set = Arc::new(ConstraintSet::new(constraints)?);
    let mut formula = Formula::new(Arc::clone(&set), n)?;
    for (line, weight, name, vars) in raw_apps {
        let idx = set.index_of(&name).expect("resolved above");
        formula
            .push(Application::new(idx, vars), weight)
            .map_err(|e| match e {
                Error::Usage(m) => Error::parse(line, m),
                other => other,
            })?;
    }
    Ok(formula)
}

/// Writes the formula with its full constraint set inline.
pub fn write_formula(f: &Formula) -> String {
    let mut out = write_constraint_set(f.set());
    writeln!(out, "vars {}", f.num_vars()).unwrap();
    for w in f.applications() {
        let c = f.constraint_of(&w.application);
        write!(out, "app {} {}", w.weight, c.name()).unwrap();
        for v in &w.application.vars {
            write!(out, " {}", v + 1).unwrap();
        }
        out.push('\n');
    }
    out
}

/// A list of assignments, optionally split into an assignment part of
/// `base` bits followed by a proof part of `proof` bits.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct AssignmentList {
    pub split: Option<(usize, usize)>,
    pub rows: Vec<Assignment>,
}

pub fn parse_assignments(text: &str) -> Result<AssignmentList> {
    let mut list = AssignmentList::default();
    for (line, words) in lines(text) {
        if words[0] == "split" {
            if !list.rows.is_empty() || list.split.is_some() || words.len() != 3 {
                return Err(Error::parse(line, "`split <n> <p>` must be a single leading header"));
            }
            let n = parse_num(line, words[1], "assignment length")?;
            let p = parse_num(line, words[2], "proof length")?;
            list.split = Some((n, p));
            continue;
        }
        if words.len() != 1 {
            return Err(Error::parse(line, "expected one 0/1 string per line"));
        }
        let row: Assignment = words[0].parse().map_err(|_| {
            Error::parse(line, format!("expected a 0/1 string, got `{}`", words[0]))
        })?;
        if let Some((n, p)) = list.split {
            if row.len() != n + p {
                return Err(Error::parse(
                    line,
                    format!("row has length {}, split header says {}", row.len(), n + p),
                ));
            }
        }
        if let Some(first) = list.rows.first() {
            if first.len() != row.len() {
                return Err(Error::parse(line, "rows have different lengths"));
            }
        }
        list.rows.push(row);
    }
    Ok(list)
}

pub fn write_assignments(list: &AssignmentList) -> String {
    let mut out = String::new();
    if let Some((n, p)) = list.split {
        writeln!(out, "split {n} {p}").unwrap();
    }
    for row in &list.rows {
        writeln!(out, "{row}").unwrap();
    }
    out
}
