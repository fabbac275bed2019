//! Perfect gadgets: formulas over a constraint set, with auxiliary
//! variables, whose projection onto the first `r` variables is exactly a
//! target relation. Includes an exhaustive canonical search and the
//! clause-by-clause compilation of 3SAT formulas.
//!
//! Gadget file format:
//!
//! ```text
//! target NAND 2 1110
//! vars 3
//! app 1 ONE_IN_THREE 1 2 3
//! ```
//!
//! Variables `1..=r` are the target's, the rest are auxiliary.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;
use std::sync::Arc;

use rayon::prelude::*;

use crate::constraint::{builtin, Constraint, ConstraintSet};
use crate::error::{Error, Result};
use crate::formula::{Application, Formula};

/// Largest `r + aux` the search accepts; relations are held as bitsets of
/// `2^(r + aux)` bits.
pub const SEARCH_VAR_LIMIT: usize = 16;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Gadget {
    pub target: Constraint,
    pub aux_count: usize,
    /// Constraint indices refer to the set the gadget was built over.
    pub applications: Vec<Application>,
}

impl Gadget {
    pub fn num_vars(&self) -> usize {
        self.target.arity() + self.aux_count
    }
}

/// Bitset over assignments of `r + a` variables. Auxiliary variables take
/// the low bits, so the extensions of a target point form one aligned block.
#[derive(Debug, Clone, Copy)]
struct Layout {
    r: usize,
    a: usize,
}

impl Layout {
    fn bits(self) -> usize {
        1 << (self.r + self.a)
    }

    fn words(self) -> usize {
        self.bits().div_ceil(64)
    }

    fn full(self) -> Vec<u64> {
        let mut m = vec![u64::MAX; self.words()];
        if self.bits() < 64 {
            m[0] = (1u64 << self.bits()) - 1;
        }
        m
    }

    /// Value of gadget variable `p` (0-based) under bitset index `idx`.
    fn value(self, idx: usize, p: usize) -> bool {
        let bit = if p < self.r { self.a + p } else { p - self.r };
        idx >> bit & 1 == 1
    }

    fn mask(self, c: &Constraint, vars: &[usize]) -> Vec<u64> {
        let mut m = vec![0u64; self.words()];
        for idx in 0..self.bits() {
            let local = vars
                .iter()
                .enumerate()
                .fold(0u64, |acc, (j, &p)| acc | (self.value(idx, p) as u64) << j);
            if c.accepts(local) {
                m[idx / 64] |= 1 << (idx % 64);
            }
        }
        m
    }

    /// Whether some extension of target point `x` lies in `m`.
    fn extends(self, m: &[u64], x: usize) -> bool {
        let len = 1usize << self.a;
        let start = x * len;
        if len >= 64 {
            m[start / 64..(start + len) / 64].iter().any(|&w| w != 0)
        } else {
            (m[start / 64] >> (start % 64)) & ((1u64 << len) - 1) != 0
        }
    }
}

fn check_applications(g: &Gadget, s: &ConstraintSet) -> Result<()> {
    for app in &g.applications {
        app.check(s, g.num_vars())?;
    }
    Ok(())
}

/// Exhaustively checks that the gadget's projection is exactly the target.
pub fn verify_perfect(g: &Gadget, s: &ConstraintSet, n_max: usize) -> Result<bool> {
    crate::oracle::check_capacity(g.num_vars(), n_max)?;
    check_applications(g, s)?;
    let layout = Layout {
        r: g.target.arity(),
        a: g.aux_count,
    };
    let mut m = layout.full();
    for app in &g.applications {
        let c = s.get(app.constraint).expect("checked");
        for (w, v) in m.iter_mut().zip(layout.mask(c, &app.vars)) {
            *w &= v;
        }
    }
    Ok((0..1usize << layout.r).all(|x| layout.extends(&m, x) == g.target.accepts(x as u64)))
}

struct Candidate {
    constraint: usize,
    vars: Vec<usize>,
    /// Auxiliary variables in order of first appearance within the tuple.
    aux_order: Vec<usize>,
    mask: Vec<u64>,
}

struct Search<'a> {
    layout: Layout,
    target: &'a Constraint,
    candidates: Vec<Candidate>,
    max_arity: usize,
}

impl Search<'_> {
    fn new<'a>(target: &'a Constraint, s: &ConstraintSet, a: usize) -> Search<'a> {
        let layout = Layout {
            r: target.arity(),
            a,
        };
        let v = layout.r + a;
        let mut order: Vec<usize> = (0..s.len()).collect();
        order.sort_by(|&i, &j| s.get(i).unwrap().name().cmp(s.get(j).unwrap().name()));
        let full = layout.full();
        let mut candidates = Vec::new();
        for ci in order {
            let c = s.get(ci).unwrap();
            let k = c.arity();
            for t in 0..v.pow(k as u32) {
                // Lexicographic order: first position most significant.
                let vars: Vec<usize> = (0..k).map(|j| t / v.pow((k - 1 - j) as u32) % v).collect();
                let mask = layout.mask(c, &vars);
                if mask == full {
                    // Always satisfied: never needed by a smallest gadget.
                    continue;
                }
                let mut aux_order = Vec::new();
                for &p in &vars {
                    if p >= layout.r && !aux_order.contains(&(p - layout.r)) {
                        aux_order.push(p - layout.r);
                    }
                }
                candidates.push(Candidate {
                    constraint: ci,
                    vars,
                    aux_order,
                    mask,
                });
            }
        }
        Search {
            layout,
            target,
            candidates,
            max_arity: s.max_arity(),
        }
    }

    /// Aux count after adding `cand`, or `None` if it would introduce an
    /// auxiliary variable out of first-use order.
    fn next_used(cand: &Candidate, used: usize) -> Option<usize> {
        let mut used = used;
        for &x in &cand.aux_order {
            if x == used {
                used += 1;
            } else if x > used {
                return None;
            }
        }
        Some(used)
    }

    fn covers_target(&self, m: &[u64]) -> bool {
        (0..1usize << self.layout.r)
            .all(|x| !self.target.accepts(x as u64) || self.layout.extends(m, x))
    }

    fn is_exact(&self, m: &[u64]) -> bool {
        (0..1usize << self.layout.r)
            .all(|x| self.layout.extends(m, x) == self.target.accepts(x as u64))
    }

    fn dfs(&self, m: &[u64], used: usize, start: usize, left: usize, chosen: &mut Vec<usize>) -> bool {
        if left == 0 {
            return used == self.layout.a && self.is_exact(m);
        }
        if self.layout.a - used > left * self.max_arity {
            return false;
        }
        for i in start..self.candidates.len() {
            if self.try_candidate(m, used, i, left, chosen) {
                return true;
            }
        }
        false
    }

    fn try_candidate(
        &self,
        m: &[u64],
        used: usize,
        i: usize,
        left: usize,
        chosen: &mut Vec<usize>,
    ) -> bool {
        let cand = &self.candidates[i];
        let Some(next) = Self::next_used(cand, used) else {
            return false;
        };
        let merged: Vec<u64> = m.iter().zip(&cand.mask).map(|(a, b)| a & b).collect();
        if !self.covers_target(&merged) {
            return false;
        }
        chosen.push(i);
        if self.dfs(&merged, next, i + 1, left - 1, chosen) {
            return true;
        }
        chosen.pop();
        false
    }

    /// First gadget with exactly `b` applications, in canonical order.
    fn level(&self, b: usize) -> Option<Vec<usize>> {
        let full = self.layout.full();
        if b == 0 {
            return (self.layout.a == 0 && self.is_exact(&full)).then(Vec::new);
        }
        (0..self.candidates.len()).into_par_iter().find_map_first(|i| {
            let mut chosen = Vec::with_capacity(b);
            self.try_candidate(&full, 0, i, b, &mut chosen).then_some(chosen)
        })
    }
}

/// Searches levels `(aux, apps)` in lexicographic order up to the bounds
/// and returns the first perfect gadget found. Within a level, application
/// sets are strictly increasing in (constraint name, variable tuple) order
/// and auxiliary variables must be introduced in first-use order.
pub fn search_gadget(
    target: &Constraint,
    s: &ConstraintSet,
    max_aux: usize,
    max_apps: usize,
) -> Result<Option<Gadget>> {
    let r = target.arity();
    if r + max_aux > SEARCH_VAR_LIMIT {
        return Err(Error::Capacity {
            what: "gadget variables",
            got: r + max_aux,
            limit: SEARCH_VAR_LIMIT,
        });
    }
    for a in 0..=max_aux {
        let search = Search::new(target, s, a);
        for b in 0..=max_apps {
            if let Some(chosen) = search.level(b) {
                let applications = chosen
                    .into_iter()
                    .map(|i| {
                        let c = &search.candidates[i];
                        Application::new(c.constraint, c.vars.clone())
                    })
                    .collect();
                return Ok(Some(Gadget {
                    target: target.clone(),
                    aux_count: a,
                    applications,
                }));
            }
        }
    }
    Ok(None)
}

pub fn write_gadget(g: &Gadget, s: &ConstraintSet) -> String {
    let mut out = String::new();
    writeln!(out, "target {}", g.target).unwrap();
    writeln!(out, "vars {}", g.num_vars()).unwrap();
    for app in &g.applications {
        let name = s.get(app.constraint).map_or("?", Constraint::name);
        write!(out, "app 1 {name}").unwrap();
        for v in &app.vars {
            write!(out, " {}", v + 1).unwrap();
        }
        out.push('\n');
    }
    out
}

/// Parses a gadget file. Constraint names resolve against `s` only.
pub fn parse_gadget(text: &str, s: &ConstraintSet) -> Result<Gadget> {
    let mut target: Option<Constraint> = None;
    let mut num_vars: Option<usize> = None;
    let mut applications = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let words: Vec<&str> = raw.split('#').next().unwrap_or("").split_whitespace().collect();
        let Some(&head) = words.first() else { continue };
        match head {
            "target" => {
                if target.is_some() || num_vars.is_some() || words.len() != 4 {
                    return Err(Error::parse(
                        line,
                        "expected one leading `target <name> <arity> <table>` line",
                    ));
                }
                let c = Constraint::from_table(words[1], words[3])
                    .map_err(|e| Error::parse(line, e.to_string()))?;
                if words[2] != c.arity().to_string() {
                    return Err(Error::parse(line, "arity does not match table length"));
                }
                target = Some(c);
            }
            "vars" => {
                let t = target.as_ref().ok_or_else(|| Error::parse(line, "`vars` before `target`"))?;
                let n: usize = match words.as_slice() {
                    [_, n] if num_vars.is_none() => n
                        .parse()
                        .map_err(|_| Error::parse(line, format!("invalid variable count `{n}`")))?,
                    _ => return Err(Error::parse(line, "expected a single `vars <n>` line")),
                };
                if n < t.arity() {
                    return Err(Error::parse(line, "fewer variables than the target's arity"));
                }
                num_vars = Some(n);
            }
            "app" => {
                let n = num_vars.ok_or_else(|| Error::parse(line, "`app` before `vars`"))?;
                if words.len() < 3 || words[1] != "1" {
                    return Err(Error::parse(line, "expected `app 1 <name> <i1> ...`"));
                }
                let idx = s
                    .index_of(words[2])
                    .ok_or_else(|| Error::parse(line, format!("unknown constraint `{}`", words[2])))?;
                let vars = words[3..]
                    .iter()
                    .map(|w| match w.parse::<usize>() {
                        Ok(v) if (1..=n).contains(&v) => Ok(v - 1),
                        _ => Err(Error::parse(line, format!("bad variable index `{w}`"))),
                    })
                    .collect::<Result<Vec<_>>>()?;
                let app = Application::new(idx, vars);
                app.check(s, n).map_err(|e| Error::parse(line, e.to_string()))?;
                applications.push(app);
            }
            other => return Err(Error::parse(line, format!("unexpected keyword `{other}`"))),
        }
    }
    let target = target.ok_or_else(|| Error::parse(0, "missing `target` line"))?;
    let n = num_vars.ok_or_else(|| Error::parse(0, "missing `vars` line"))?;
    Ok(Gadget {
        aux_count: n - target.arity(),
        target,
        applications,
    })
}

/// Gadgets keyed by the truth table of their target.
#[derive(Debug, Clone, Default)]
pub struct GadgetLibrary {
    gadgets: BTreeMap<(usize, String), Gadget>,
}

impl GadgetLibrary {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds a gadget; a second gadget for the same table is a usage error.
    pub fn insert(&mut self, g: Gadget) -> Result<()> {
        let key = (g.target.arity(), g.target.table_string());
        if let Some(old) = self.gadgets.get(&key) {
            return Err(Error::usage(format!(
                "gadgets `{}` and `{}` implement the same relation",
                old.target.name(),
                g.target.name()
            )));
        }
        self.gadgets.insert(key, g);
        Ok(())
    }

    pub fn get(&self, c: &Constraint) -> Option<&Gadget> {
        self.gadgets.get(&(c.arity(), c.table_string()))
    }

    pub fn len(&self) -> usize {
        self.gadgets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gadgets.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Gadget> {
        self.gadgets.values()
    }

    /// Loads every `*.gad` file in `dir`, in file-name order.
    pub fn load_dir(dir: &Path, s: &ConstraintSet) -> Result<Self> {
        let entries = std::fs::read_dir(dir)
            .map_err(|e| Error::usage(format!("cannot read {}: {e}", dir.display())))?;
        let mut paths: Vec<_> = entries
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|x| x == "gad"))
            .collect();
        paths.sort();
        let mut lib = GadgetLibrary::new();
        for p in paths {
            let text = std::fs::read_to_string(&p)
                .map_err(|e| Error::usage(format!("cannot read {}: {e}", p.display())))?;
            lib.insert(parse_gadget(&text, s)?)?;
        }
        Ok(lib)
    }
}

/// Replaces every application of `phi` by its gadget over `s`, with fresh
/// auxiliary variables per application. Weights carry over to each of the
/// gadget's applications.
pub fn reduce_3sat(phi: &Formula, s: Arc<ConstraintSet>, library: &GadgetLibrary) -> Result<Formula> {
    let mut plan = Vec::with_capacity(phi.len());
    let mut num_vars = phi.num_vars();
    for w in phi.applications() {
        let c = phi.constraint_of(&w.application);
        let g = library
            .get(c)
            .ok_or_else(|| Error::usage(format!("no gadget for `{}` ({})", c.name(), c.table_string())))?;
        plan.push((w, g, num_vars));
        num_vars += g.aux_count;
    }
    let mut out = Formula::new(Arc::clone(&s), num_vars)?;
    for (w, g, offset) in plan {
        let r = g.target.arity();
        for app in &g.applications {
            let vars = app
                .vars
                .iter()
                .map(|&p| if p < r { w.application.vars[p] } else { offset + p - r })
                .collect();
            out.push(Application::new(app.constraint, vars), w.weight)?;
        }
    }
    Ok(out)
}

/// Clause gadgets over `{ONE_IN_THREE}` (written `R` below) for every
/// polarity pattern of arity 1 to 3.
///
/// Units: `x = ∃a R(x,a,a)` and `not x = ∃a R(x,x,a)`. Two literals:
/// `l1 or l2 = ∃a R(not l1, not l2, a)`. Three literals use the chain
/// `∃a,b,c,d R(not e1,a,b) R(b,m,c) R(c,d,not e2)`, with negated literals
/// placed at the ends `e1`, `e2` when possible. Any other negation needs an
/// auxiliary `v'` with `R(v,v',f)`, where `R(f,f,t)` pins `f = 0`.
pub fn one_in_three_clause_library() -> (Arc<ConstraintSet>, GadgetLibrary) {
    let set = Arc::new(ConstraintSet::new(vec![builtin::one_in_three()]).expect("valid set"));
    let mut lib = GadgetLibrary::new();
    for arity in 1..=3 {
        for negated in 0..(1u64 << arity) {
            let target = builtin::clause(arity, negated);
            lib.insert(one_in_three_clause(target, arity, negated))
                .expect("distinct patterns");
        }
    }
    (set, lib)
}

struct ClauseBuilder {
    next: usize,
    apps: Vec<[usize; 3]>,
    zero: Option<usize>,
}

impl ClauseBuilder {
    fn fresh(&mut self) -> usize {
        self.next += 1;
        self.next - 1
    }

    fn negation(&mut self, v: usize) -> usize {
        let f = match self.zero {
            Some(f) => f,
            None => {
                let (f, t) = (self.fresh(), self.fresh());
                self.apps.push([f, f, t]);
                self.zero = Some(f);
                f
            }
        };
        let nv = self.fresh();
        self.apps.push([v, nv, f]);
        nv
    }

    /// Variable carrying the literal's value (`want = true`) or its negation.
    fn literal(&mut self, (v, negated): (usize, bool), want: bool) -> usize {
        if negated == want {
            self.negation(v)
        } else {
            v
        }
    }
}

fn one_in_three_clause(target: Constraint, arity: usize, negated: u64) -> Gadget {
    let mut b = ClauseBuilder {
        next: arity,
        apps: Vec::new(),
        zero: None,
    };
    let mut lits: Vec<(usize, bool)> = (0..arity).map(|j| (j, negated >> j & 1 == 1)).collect();
    match arity {
        1 => {
            let a = b.fresh();
            b.apps.push(if lits[0].1 { [0, 0, a] } else { [0, a, a] });
        }
        2 => {
            let u = b.literal(lits[0], false);
            let v = b.literal(lits[1], false);
            let a = b.fresh();
            b.apps.push([u, v, a]);
        }
        _ => {
            // Negated literals first: they become the chain's ends.
            lits.sort_by_key(|&(j, neg)| (!neg, j));
            let (e1, e2, m) = (lits[0], lits[1], lits[2]);
            let n1 = b.literal(e1, false);
            let n2 = b.literal(e2, false);
            let mid = b.literal(m, true);
            let (a, x, c, d) = (b.fresh(), b.fresh(), b.fresh(), b.fresh());
            b.apps.push([n1, a, x]);
            b.apps.push([x, mid, c]);
            b.apps.push([c, d, n2]);
        }
    }
    Gadget {
        target,
        aux_count: b.next - arity,
        applications: b.apps.into_iter().map(|v| Application::new(0, v.to_vec())).collect(),
    }
}
