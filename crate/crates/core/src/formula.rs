//! Assignments, constraint applications and weighted formulas.
//!
//! Variables are numbered from 0 in memory; the text formats use 1-based
//! names and convert at the boundary.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::constraint::{parse_bits, Constraint, ConstraintSet};
use crate::error::{Error, Result};
use crate::fraction::Fraction;

/// A bit vector, written as a `0`/`1` string with variable 1 first.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Assignment {
    bits: Vec<bool>,
}

impl Assignment {
    pub fn new(bits: Vec<bool>) -> Self {
        Assignment { bits }
    }

    pub fn zeros(len: usize) -> Self {
        Assignment::new(vec![false; len])
    }

    pub fn ones(len: usize) -> Self {
        Assignment::new(vec![true; len])
    }

    /// Bit `i` of `index` becomes variable `i`. Requires `len <= 64`.
    pub fn from_index(index: u64, len: usize) -> Self {
        debug_assert!(len <= 64);
        Assignment::new((0..len).map(|i| (index >> i) & 1 == 1).collect())
    }

    /// Inverse of [`Assignment::from_index`]; `None` when longer than 64 bits.
    pub fn to_index(&self) -> Option<u64> {
        (self.bits.len() <= 64).then(|| crate::constraint::encode(&self.bits))
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn get(&self, i: usize) -> bool {
        self.bits[i]
    }

    pub fn set(&mut self, i: usize, value: bool) {
        self.bits[i] = value;
    }

    pub fn count_ones(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    pub fn complement(&self) -> Self {
        Assignment::new(self.bits.iter().map(|b| !b).collect())
    }

    pub fn concat(&self, other: &Assignment) -> Self {
        let mut bits = self.bits.clone();
        bits.extend_from_slice(&other.bits);
        Assignment::new(bits)
    }

    pub fn split_at(&self, mid: usize) -> (Assignment, Assignment) {
        let (a, b) = self.bits.split_at(mid);
        (Assignment::new(a.to_vec()), Assignment::new(b.to_vec()))
    }

    pub fn hamming(&self, other: &Assignment) -> Result<usize> {
        if self.len() != other.len() {
            return Err(Error::usage(format!(
                "assignment lengths differ: {} vs {}",
                self.len(),
                other.len()
            )));
        }
        Ok(self
            .bits
            .iter()
            .zip(&other.bits)
            .filter(|(a, b)| a != b)
            .count())
    }
}

impl From<Vec<bool>> for Assignment {
    fn from(bits: Vec<bool>) -> Self {
        Assignment::new(bits)
    }
}

impl fmt::Display for Assignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.bits {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl FromStr for Assignment {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(Assignment::new(parse_bits(s.trim())?))
    }
}

impl Serialize for Assignment {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Assignment {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        String::deserialize(d)?
            .parse()
            .map_err(serde::de::Error::custom)
    }
}

/// A constraint (by index into the owning set) applied to a tuple of
/// variables. Variables may repeat.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Application {
    pub constraint: usize,
    pub vars: Vec<usize>,
}

impl Application {
    pub fn new(constraint: usize, vars: Vec<usize>) -> Self {
        Application { constraint, vars }
    }

    /// Reads the argument tuple out of `bits` and looks it up in `c`.
    #[inline]
    pub fn holds(&self, c: &Constraint, bits: &[bool]) -> bool {
        let idx = self
            .vars
            .iter()
            .enumerate()
            .fold(0u64, |acc, (j, &v)| acc | ((bits[v] as u64) << j));
        c.accepts(idx)
    }

    pub(crate) fn check(&self, set: &ConstraintSet, num_vars: usize) -> Result<()> {
        let c = set.get(self.constraint).ok_or_else(|| {
            Error::usage(format!("constraint index {} out of range", self.constraint))
        })?;
        if self.vars.len() != c.arity() {
            return Err(Error::usage(format!(
                "application of `{}` has {} arguments, arity is {}",
                c.name(),
                self.vars.len(),
                c.arity()
            )));
        }
        if let Some(&v) = self.vars.iter().find(|&&v| v >= num_vars) {
            return Err(Error::usage(format!(
                "variable {} out of range 1..={num_vars}",
                v + 1
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct WeightedApplication {
    pub application: Application,
    pub weight: u64,
}

/// A weighted multiset of constraint applications over `num_vars` variables.
///
/// A formula with no applications is allowed; it is satisfied by every
/// assignment.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Formula {
    set: Arc<ConstraintSet>,
    num_vars: usize,
    apps: Vec<WeightedApplication>,
}

impl Formula {
    pub fn new(set: Arc<ConstraintSet>, num_vars: usize) -> Result<Self> {
        if num_vars == 0 {
            return Err(Error::usage("a formula needs at least one variable"));
        }
        Ok(Formula {
            set,
            num_vars,
            apps: Vec::new(),
        })
    }

    pub fn from_applications(
        set: Arc<ConstraintSet>,
        num_vars: usize,
        apps: Vec<WeightedApplication>,
    ) -> Result<Self> {
        let mut f = Formula::new(set, num_vars)?;
        for a in apps {
            f.push(a.application, a.weight)?;
        }
        Ok(f)
    }

    pub fn push(&mut self, application: Application, weight: u64) -> Result<()> {
        if weight == 0 {
            return Err(Error::usage("application weights must be positive"));
        }
        application.check(&self.set, self.num_vars)?;
        self.apps.push(WeightedApplication {
            application,
            weight,
        });
        Ok(())
    }

    /// Appends an application by constraint name, with 0-based variables.
    pub fn add(&mut self, name: &str, vars: &[usize], weight: u64) -> Result<()> {
        let idx = self
            .set
            .index_of(name)
            .ok_or_else(|| Error::usage(format!("unknown constraint `{name}`")))?;
        self.push(Application::new(idx, vars.to_vec()), weight)
    }

    pub fn set(&self) -> &ConstraintSet {
        &self.set
    }

    pub fn shared_set(&self) -> Arc<ConstraintSet> {
        Arc::clone(&self.set)
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn applications(&self) -> &[WeightedApplication] {
        &self.apps
    }

    pub fn len(&self) -> usize {
        self.apps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.apps.is_empty()
    }

    pub fn total_weight(&self) -> u64 {
        self.apps.iter().map(|a| a.weight).sum()
    }

    pub fn constraint_of(&self, app: &Application) -> &Constraint {
        &self.set.constraints()[app.constraint]
    }

    fn check_len(&self, a: &Assignment) -> Result<()> {
        if a.len() != self.num_vars {
            return Err(Error::usage(format!(
                "assignment has length {}, formula has {} variables",
                a.len(),
                self.num_vars
            )));
        }
        Ok(())
    }

    pub fn is_satisfied(&self, index: usize, a: &Assignment) -> Result<bool> {
        self.check_len(a)?;
        let app = &self.apps[index].application;
        Ok(app.holds(self.constraint_of(app), a.bits()))
    }

    pub fn satisfied_weight(&self, a: &Assignment) -> Result<u64> {
        self.check_len(a)?;
        Ok(self
            .apps
            .iter()
            .filter(|w| w.application.holds(self.constraint_of(&w.application), a.bits()))
            .map(|w| w.weight)
            .sum())
    }

    /// Satisfied weight over total weight, as an exact fraction.
    pub fn evaluate(&self, a: &Assignment) -> Result<Fraction> {
        let sat = self.satisfied_weight(a)?;
        Ok(self.fraction_of(sat))
    }

    pub(crate) fn fraction_of(&self, weight: u64) -> Fraction {
        match self.total_weight() {
            0 => Fraction::ONE,
            total => Fraction::new(weight, total),
        }
    }

    /// Keeps the applications for which `keep` returns true.
    pub fn retain(&self, mut keep: impl FnMut(usize, &WeightedApplication) -> bool) -> Formula {
        let apps = self
            .apps
            .iter()
            .enumerate()
            .filter(|(i, a)| keep(*i, a))
            .map(|(_, a)| a.clone())
            .collect();
        Formula {
            set: Arc::clone(&self.set),
            num_vars: self.num_vars,
            apps,
        }
    }

    /// Rebinds the formula to a superset of its constraint set, by name.
    pub fn rebind(&self, set: Arc<ConstraintSet>) -> Result<Formula> {
        let mut out = Formula::new(set, self.num_vars)?;
        for w in &self.apps {
            let name = self.constraint_of(&w.application).name();
            out.add(name, &w.application.vars, w.weight)?;
        }
        Ok(out)
    }

    /// Compiles the formula for evaluation on `u64`-packed assignments.
    pub fn packed(&self) -> Result<PackedFormula<'_>> {
        PackedFormula::new(self)
    }
}

/// Formula view that evaluates assignments given as the integer encoding
/// used by [`Assignment::from_index`]. Limited to 63 variables.
pub struct PackedFormula<'a> {
    terms: Vec<(&'a Constraint, Vec<u32>, u64)>,
    total: u64,
}

impl<'a> PackedFormula<'a> {
    pub fn new(formula: &'a Formula) -> Result<Self> {
        if formula.num_vars > 63 {
            return Err(Error::Capacity {
                what: "variables for packed evaluation",
                got: formula.num_vars,
                limit: 63,
            });
        }
        let terms = formula
            .apps
            .iter()
            .map(|w| {
                (
                    formula.constraint_of(&w.application),
                    w.application.vars.iter().map(|&v| v as u32).collect(),
                    w.weight,
                )
            })
            .collect();
        Ok(PackedFormula {
            terms,
            total: formula.total_weight(),
        })
    }

    pub fn total_weight(&self) -> u64 {
        self.total
    }

    #[inline]
    pub fn satisfied_weight(&self, x: u64) -> u64 {
        self.terms
            .iter()
            .filter(|(c, vars, _)| c.accepts(gather(x, vars)))
            .map(|t| t.2)
            .sum()
    }

    #[inline]
    pub fn satisfies_all(&self, x: u64) -> bool {
        self.terms.iter().all(|(c, vars, _)| c.accepts(gather(x, vars)))
    }
}

#[inline]
fn gather(x: u64, vars: &[u32]) -> u64 {
    vars.iter()
        .enumerate()
        .fold(0u64, |acc, (j, &v)| acc | (((x >> v) & 1) << j))
}
