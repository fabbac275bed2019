//! Membership of constraints and constraint sets in the tractable structural
//! classes, and the resulting dichotomy verdict.
//!
//! Class membership is decided by closure under a polymorphism: Horn
//! (weakly negative) under binary AND, dual-Horn (weakly positive) under
//! binary OR, affine (linear) under ternary XOR, bijunctive (2CNF) under
//! ternary majority. [`crate::clauses::synthesize_clauses`] decides the same
//! classes from their clause definitions and is kept as a cross-check.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::constraint::{builtin, Constraint, ConstraintSet};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Polymorphism {
    And2,
    Or2,
    Xor3,
    Maj3,
}

impl Polymorphism {
    pub const ALL: [Polymorphism; 4] = [
        Polymorphism::And2,
        Polymorphism::Or2,
        Polymorphism::Xor3,
        Polymorphism::Maj3,
    ];

    pub fn arity(self) -> usize {
        match self {
            Polymorphism::And2 | Polymorphism::Or2 => 2,
            Polymorphism::Xor3 | Polymorphism::Maj3 => 3,
        }
    }

    /// Coordinate-wise application to encoded tuples. Binary operations
    /// ignore `c`.
    #[inline]
    pub fn combine(self, a: u64, b: u64, c: u64) -> u64 {
        match self {
            Polymorphism::And2 => a & b,
            Polymorphism::Or2 => a | b,
            Polymorphism::Xor3 => a ^ b ^ c,
            Polymorphism::Maj3 => (a & b) | (a & c) | (b & c),
        }
    }
}

impl fmt::Display for Polymorphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Polymorphism::And2 => "and2",
            Polymorphism::Or2 => "or2",
            Polymorphism::Xor3 => "xor3",
            Polymorphism::Maj3 => "maj3",
        })
    }
}

impl FromStr for Polymorphism {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Polymorphism::ALL
            .into_iter()
            .find(|p| p.to_string() == s)
            .ok_or_else(|| Error::usage(format!("unknown polymorphism `{s}`")))
    }
}

/// Whether the relation of `c` is closed under `op` applied coordinate-wise.
pub fn closed_under(c: &Constraint, op: Polymorphism) -> bool {
    let rel = c.satisfying();
    // Both ternary operations are symmetric, so unordered triples suffice.
    match op.arity() {
        2 => rel.iter().enumerate().all(|(i, &a)| {
            rel[i + 1..]
                .iter()
                .all(|&b| c.accepts(op.combine(a, b, 0)))
        }),
        _ => (0..rel.len()).all(|i| {
            (i..rel.len()).all(|j| {
                (j..rel.len()).all(|k| c.accepts(op.combine(rel[i], rel[j], rel[k])))
            })
        }),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Class {
    #[serde(rename = "0-valid")]
    ZeroValid,
    #[serde(rename = "1-valid")]
    OneValid,
    #[serde(rename = "weakly-positive")]
    WeaklyPositive,
    #[serde(rename = "weakly-negative")]
    WeaklyNegative,
    #[serde(rename = "linear")]
    Linear,
    #[serde(rename = "2cnf")]
    TwoCnf,
    #[serde(rename = "c-closed")]
    CClosed,
}

impl Class {
    pub const ALL: [Class; 7] = [
        Class::ZeroValid,
        Class::OneValid,
        Class::WeaklyPositive,
        Class::WeaklyNegative,
        Class::Linear,
        Class::TwoCnf,
        Class::CClosed,
    ];

    /// The six classes whose set-level presence makes the CSP tractable.
    pub const TRACTABLE: [Class; 6] = [
        Class::ZeroValid,
        Class::OneValid,
        Class::WeaklyPositive,
        Class::WeaklyNegative,
        Class::Linear,
        Class::TwoCnf,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            Class::ZeroValid => "0-valid",
            Class::OneValid => "1-valid",
            Class::WeaklyPositive => "weakly-positive",
            Class::WeaklyNegative => "weakly-negative",
            Class::Linear => "linear",
            Class::TwoCnf => "2cnf",
            Class::CClosed => "c-closed",
        }
    }

    /// The polymorphism characterising the class, for the four clause-defined classes.
    pub fn polymorphism(self) -> Option<Polymorphism> {
        match self {
            Class::WeaklyNegative => Some(Polymorphism::And2),
            Class::WeaklyPositive => Some(Polymorphism::Or2),
            Class::Linear => Some(Polymorphism::Xor3),
            Class::TwoCnf => Some(Polymorphism::Maj3),
            _ => None,
        }
    }
}

impl fmt::Display for Class {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for Class {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Class::ALL
            .into_iter()
            .find(|c| c.tag() == s)
            .ok_or_else(|| Error::usage(format!("unknown class `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct ClassFlags {
    #[serde(rename = "0-valid")]
    pub zero_valid: bool,
    #[serde(rename = "1-valid")]
    pub one_valid: bool,
    #[serde(rename = "weakly-positive")]
    pub weakly_positive: bool,
    #[serde(rename = "weakly-negative")]
    pub weakly_negative: bool,
    pub linear: bool,
    #[serde(rename = "2cnf")]
    pub two_cnf: bool,
    #[serde(rename = "c-closed")]
    pub c_closed: bool,
}

impl ClassFlags {
    pub const ALL_TRUE: ClassFlags = ClassFlags {
        zero_valid: true,
        one_valid: true,
        weakly_positive: true,
        weakly_negative: true,
        linear: true,
        two_cnf: true,
        c_closed: true,
    };

    pub fn get(&self, class: Class) -> bool {
        match class {
            Class::ZeroValid => self.zero_valid,
            Class::OneValid => self.one_valid,
            Class::WeaklyPositive => self.weakly_positive,
            Class::WeaklyNegative => self.weakly_negative,
            Class::Linear => self.linear,
            Class::TwoCnf => self.two_cnf,
            Class::CClosed => self.c_closed,
        }
    }

    pub fn and(&self, other: &ClassFlags) -> ClassFlags {
        ClassFlags {
            zero_valid: self.zero_valid && other.zero_valid,
            one_valid: self.one_valid && other.one_valid,
            weakly_positive: self.weakly_positive && other.weakly_positive,
            weakly_negative: self.weakly_negative && other.weakly_negative,
            linear: self.linear && other.linear,
            two_cnf: self.two_cnf && other.two_cnf,
            c_closed: self.c_closed && other.c_closed,
        }
    }

    /// Every class (including c-closed) whose flag is set.
    pub fn holding(&self) -> Vec<Class> {
        Class::ALL.into_iter().filter(|&c| self.get(c)).collect()
    }

    pub fn tractable(&self) -> Vec<Class> {
        Class::TRACTABLE.into_iter().filter(|&c| self.get(c)).collect()
    }
}

pub fn classify_constraint(c: &Constraint) -> ClassFlags {
    let mask = c.full_mask();
    ClassFlags {
        zero_valid: c.accepts(0),
        one_valid: c.accepts(mask),
        weakly_positive: closed_under(c, Polymorphism::Or2),
        weakly_negative: closed_under(c, Polymorphism::And2),
        linear: closed_under(c, Polymorphism::Xor3),
        two_cnf: closed_under(c, Polymorphism::Maj3),
        c_closed: (0..c.table_len()).all(|p| c.accepts(p) == c.accepts(p ^ mask)),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    /// Tractable; lists every tractable class that holds at set level.
    Polynomial(Vec<Class>),
    NpHard,
}

impl Verdict {
    pub fn is_np_hard(&self) -> bool {
        matches!(self, Verdict::NpHard)
    }

    pub fn statement(&self) -> &'static str {
        match self {
            Verdict::Polynomial(_) => "polynomial (under P!=NP the CSP is tractable)",
            Verdict::NpHard => "NP-hard (Schaefer)",
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Polynomial(classes) => {
                let tags: Vec<&str> = classes.iter().map(|c| c.tag()).collect();
                write!(f, "polynomial({})", tags.join(", "))
            }
            Verdict::NpHard => f.write_str("np-hard"),
        }
    }
}

impl Serialize for Verdict {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("Verdict", 3)?;
        let (kind, classes): (&str, &[Class]) = match self {
            Verdict::Polynomial(c) => ("polynomial", c),
            Verdict::NpHard => ("np-hard", &[]),
        };
        st.serialize_field("kind", kind)?;
        st.serialize_field("classes", classes)?;
        st.serialize_field("statement", self.statement())?;
        st.end()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConstraintReport {
    pub name: String,
    pub flags: ClassFlags,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClassificationReport {
    pub per_constraint: Vec<ConstraintReport>,
    pub flags: ClassFlags,
    pub verdict: Verdict,
    /// APX-hardness is not decided here.
    pub apx_hard: &'static str,
}

pub fn classify_set(s: &ConstraintSet) -> ClassificationReport {
    let per_constraint: Vec<ConstraintReport> = s
        .iter()
        .map(|c| ConstraintReport {
            name: c.name().to_string(),
            flags: classify_constraint(c),
        })
        .collect();
    let flags = per_constraint
        .iter()
        .fold(ClassFlags::ALL_TRUE, |acc, r| acc.and(&r.flags));
    let tractable = flags.tractable();
    let verdict = if tractable.is_empty() {
        Verdict::NpHard
    } else {
        Verdict::Polynomial(tractable)
    };
    ClassificationReport {
        per_constraint,
        flags,
        verdict,
        apx_hard: "not applicable (out of scope)",
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Augment {
    Id,
    Not,
}

impl FromStr for Augment {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "id" => Ok(Augment::Id),
            "not" => Ok(Augment::Not),
            _ => Err(Error::usage(format!("expected `id` or `not`, got `{s}`"))),
        }
    }
}

/// Adds `ID` or `NOT` to the set, which makes it non-C-closed while keeping
/// the linear, Horn, dual-Horn and 2CNF flags. Idempotent.
pub fn de_c_close(s: &ConstraintSet, which: Augment) -> Result<ConstraintSet> {
    let c = match which {
        Augment::Id => builtin::id(),
        Augment::Not => builtin::not(),
    };
    s.with(c)
}
