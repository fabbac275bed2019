//! Clause-level representations of constraints, built straight from the
//! class definitions: collect every clause of a family implied by the
//! constraint and keep the conjunction if it defines the same relation.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::classify::{Class, Polymorphism};
use crate::constraint::Constraint;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    /// At most one positive literal per clause (weakly negative).
    Horn,
    /// At most one negated literal per clause (weakly positive).
    DualHorn,
    /// At most two literals per clause.
    TwoClause,
    /// Parity equations over subsets of the variables.
    LinearEquation,
}

impl Family {
    pub const ALL: [Family; 4] = [
        Family::Horn,
        Family::DualHorn,
        Family::TwoClause,
        Family::LinearEquation,
    ];

    pub fn polymorphism(self) -> Polymorphism {
        match self {
            Family::Horn => Polymorphism::And2,
            Family::DualHorn => Polymorphism::Or2,
            Family::TwoClause => Polymorphism::Maj3,
            Family::LinearEquation => Polymorphism::Xor3,
        }
    }

    pub fn class(self) -> Class {
        match self {
            Family::Horn => Class::WeaklyNegative,
            Family::DualHorn => Class::WeaklyPositive,
            Family::TwoClause => Class::TwoCnf,
            Family::LinearEquation => Class::Linear,
        }
    }

    pub fn tag(self) -> &'static str {
        match self {
            Family::Horn => "horn",
            Family::DualHorn => "dual-horn",
            Family::TwoClause => "two-clause",
            Family::LinearEquation => "linear-equation",
        }
    }

    fn admits(self, pos: u64, neg: u64) -> bool {
        match self {
            Family::Horn => pos.count_ones() <= 1,
            Family::DualHorn => neg.count_ones() <= 1,
            Family::TwoClause => (pos | neg).count_ones() <= 2,
            Family::LinearEquation => false,
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for Family {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Family::ALL
            .into_iter()
            .find(|f| f.tag() == s)
            .ok_or_else(|| Error::usage(format!("unknown clause family `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Literal {
    /// Argument position, 0-based.
    pub var: usize,
    pub positive: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Clause {
    /// Disjunction of literals over argument positions.
    Disjunction(Vec<Literal>),
    /// `xor of vars = parity`.
    Equation { vars: Vec<usize>, parity: bool },
}

impl Clause {
    /// Evaluates the clause on an encoded tuple.
    pub fn holds(&self, x: u64) -> bool {
        match self {
            Clause::Disjunction(lits) => lits
                .iter()
                .any(|l| ((x >> l.var) & 1 == 1) == l.positive),
            Clause::Equation { vars, parity } => {
                let ones = vars.iter().filter(|&&v| (x >> v) & 1 == 1).count();
                (ones % 2 == 1) == *parity
            }
        }
    }

    pub fn len(&self) -> usize {
        match self {
            Clause::Disjunction(l) => l.len(),
            Clause::Equation { vars, .. } => vars.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn from_masks(pos: u64, neg: u64, arity: usize) -> Clause {
        let lits = (0..arity)
            .filter_map(|v| {
                if (pos >> v) & 1 == 1 {
                    Some(Literal { var: v, positive: true })
                } else if (neg >> v) & 1 == 1 {
                    Some(Literal { var: v, positive: false })
                } else {
                    None
                }
            })
            .collect();
        Clause::Disjunction(lits)
    }
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Clause::Disjunction(lits) => {
                let parts: Vec<String> = lits
                    .iter()
                    .map(|l| format!("{}x{}", if l.positive { "" } else { "-" }, l.var + 1))
                    .collect();
                write!(f, "({})", parts.join(" | "))
            }
            Clause::Equation { vars, parity } => {
                let parts: Vec<String> = vars.iter().map(|v| format!("x{}", v + 1)).collect();
                write!(f, "{} = {}", parts.join(" + "), *parity as u8)
            }
        }
    }
}

impl Serialize for Clause {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// A conjunction of family clauses over a constraint's argument positions.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClauseRepresentation {
    #[serde(serialize_with = "ser_family")]
    pub family: Family,
    pub arity: usize,
    pub clauses: Vec<Clause>,
}

fn ser_family<S: serde::Serializer>(f: &Family, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(f.tag())
}

impl ClauseRepresentation {
    pub fn holds(&self, x: u64) -> bool {
        self.clauses.iter().all(|c| c.holds(x))
    }

    /// Whether the conjunction has exactly the relation of `c`.
    pub fn defines(&self, c: &Constraint) -> bool {
        self.arity == c.arity() && (0..c.table_len()).all(|p| self.holds(p) == c.accepts(p))
    }

    /// Checks the per-family shape restriction on every clause.
    pub fn well_shaped(&self) -> bool {
        self.clauses.iter().all(|cl| match (self.family, cl) {
            (Family::LinearEquation, Clause::Equation { .. }) => true,
            (Family::LinearEquation, _) | (_, Clause::Equation { .. }) => false,
            (fam, Clause::Disjunction(lits)) => {
                let pos = lits.iter().filter(|l| l.positive).count();
                let neg = lits.len() - pos;
                match fam {
                    Family::Horn => pos <= 1,
                    Family::DualHorn => neg <= 1,
                    Family::TwoClause => lits.len() <= 2,
                    Family::LinearEquation => unreachable!(),
                }
            }
        })
    }
}

/// All implied clauses of `family`, if their conjunction is equivalent to `c`.
///
/// The result is canonical: every implied non-empty clause, ordered by
/// length and then by literal list.
pub fn synthesize_clauses(c: &Constraint, family: Family) -> Option<ClauseRepresentation> {
    let k = c.arity();
    let rel = c.satisfying();
    let full = c.full_mask();
    let mut clauses = Vec::new();

    if family == Family::LinearEquation {
        for subset in 1..=full {
            for parity in [false, true] {
                let implied = rel
                    .iter()
                    .all(|&x| ((x & subset).count_ones() % 2 == 1) == parity);
                if implied {
                    let vars = (0..k).filter(|v| (subset >> v) & 1 == 1).collect();
                    clauses.push(Clause::Equation { vars, parity });
                }
            }
        }
    } else {
        for pos in 0..=full {
            // Iterate over subsets `neg` of the complement of `pos`.
            let free = full & !pos;
            let mut neg = free;
            loop {
                if (pos | neg) != 0 && family.admits(pos, neg) {
                    // The clause is falsified exactly when pos-vars are 0 and neg-vars are 1.
                    let implied = rel.iter().all(|&x| x & pos != 0 || x & neg != neg);
                    if implied {
                        clauses.push(Clause::from_masks(pos, neg, k));
                    }
                }
                if neg == 0 {
                    break;
                }
                neg = (neg - 1) & free;
            }
        }
    }

    clauses.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| clause_key(a).cmp(&clause_key(b))));
    let rep = ClauseRepresentation {
        family,
        arity: k,
        clauses,
    };
    rep.defines(c).then_some(rep)
}

fn clause_key(c: &Clause) -> Vec<(usize, bool)> {
    match c {
        Clause::Disjunction(l) => l.iter().map(|l| (l.var, l.positive)).collect(),
        Clause::Equation { vars, parity } => {
            let mut k: Vec<(usize, bool)> = vars.iter().map(|&v| (v, false)).collect();
            k.push((usize::MAX, *parity));
            k
        }
    }
}
