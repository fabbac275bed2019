//! Boolean constraints as truth tables, and named constraint sets.
//!
//! A constraint of arity `k` is stored as a `2^k`-bit table. Position `p`
//! holds `f(x)` for the tuple `x` with `p = x_1 + 2 x_2 + ... + 2^(k-1) x_k`,
//! i.e. the first argument is the least significant bit.

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};

/// Default upper bound on constraint arity.
pub const DEFAULT_MAX_ARITY: usize = 10;

/// Hard ceiling independent of configuration; keeps tables addressable by `u64`.
pub const ARITY_CEILING: usize = 24;

pub const ID: &str = "ID";
pub const NOT: &str = "NOT";

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Constraint {
    name: String,
    arity: usize,
    words: Vec<u64>,
}

fn words_for(arity: usize) -> usize {
    ((1usize << arity) + 63) / 64
}

fn check_name(name: &str) -> Result<()> {
    if name.is_empty() || name.chars().any(|c| c.is_whitespace() || c == '#') {
        return Err(Error::usage(format!("invalid constraint name `{name}`")));
    }
    Ok(())
}

impl Constraint {
    /// Builds a constraint from a predicate on encoded tuples, rejecting
    /// arities above [`DEFAULT_MAX_ARITY`].
    pub fn from_fn(name: &str, arity: usize, f: impl Fn(u64) -> bool) -> Result<Self> {
        Self::from_fn_with_limit(name, arity, DEFAULT_MAX_ARITY, f)
    }

    pub fn from_fn_with_limit(
        name: &str,
        arity: usize,
        max_arity: usize,
        f: impl Fn(u64) -> bool,
    ) -> Result<Self> {
        check_name(name)?;
        if arity == 0 {
            return Err(Error::usage(format!("constraint `{name}` has arity 0")));
        }
        let limit = max_arity.min(ARITY_CEILING);
        if arity > limit {
            return Err(Error::Capacity {
                what: "constraint arity",
                got: arity,
                limit,
            });
        }
        let mut words = vec![0u64; words_for(arity)];
        for p in 0..(1u64 << arity) {
            if f(p) {
                words[(p / 64) as usize] |= 1 << (p % 64);
            }
        }
        Ok(Constraint {
            name: name.to_string(),
            arity,
            words,
        })
    }

    /// Parses a `0`/`1` table string; its length must be `2^arity`.
    pub fn from_table(name: &str, table: &str) -> Result<Self> {
        Self::from_table_with_limit(name, table, DEFAULT_MAX_ARITY)
    }

    pub fn from_table_with_limit(name: &str, table: &str, max_arity: usize) -> Result<Self> {
        let len = table.len();
        if len < 2 || !len.is_power_of_two() {
            return Err(Error::usage(format!(
                "table of `{name}` has length {len}, expected a power of two >= 2"
            )));
        }
        let bits = parse_bits(table)?;
        let arity = len.trailing_zeros() as usize;
        Self::from_fn_with_limit(name, arity, max_arity, |p| bits[p as usize])
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    /// Number of table entries, `2^arity`.
    pub fn table_len(&self) -> u64 {
        1u64 << self.arity
    }

    /// All-ones mask over the argument positions.
    pub fn full_mask(&self) -> u64 {
        self.table_len() - 1
    }

    #[inline]
    pub fn accepts(&self, index: u64) -> bool {
        (self.words[(index / 64) as usize] >> (index % 64)) & 1 == 1
    }

    /// Evaluates the constraint on an explicit tuple.
    pub fn apply(&self, values: &[bool]) -> Result<bool> {
        if values.len() != self.arity {
            return Err(Error::usage(format!(
                "constraint `{}` has arity {} but got {} values",
                self.name,
                self.arity,
                values.len()
            )));
        }
        Ok(self.accepts(encode(values)))
    }

    /// Encoded tuples on which the constraint holds, ascending.
    pub fn satisfying(&self) -> Vec<u64> {
        (0..self.table_len()).filter(|&p| self.accepts(p)).collect()
    }

    pub fn relation_size(&self) -> u64 {
        self.words.iter().map(|w| w.count_ones() as u64).sum()
    }

    pub fn is_empty_relation(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn table_string(&self) -> String {
        (0..self.table_len())
            .map(|p| if self.accepts(p) { '1' } else { '0' })
            .collect()
    }

    /// Same truth table under a new name.
    pub fn renamed(&self, name: &str) -> Result<Self> {
        check_name(name)?;
        Ok(Constraint {
            name: name.to_string(),
            ..self.clone()
        })
    }

    /// The constraint `x -> f(not x)`: every input is complemented.
    pub fn flip_inputs(&self, name: &str) -> Result<Self> {
        let mask = self.full_mask();
        Self::from_fn_with_limit(name, self.arity, ARITY_CEILING, |p| self.accepts(p ^ mask))
    }

    /// Whether two constraints have the same arity and truth table.
    pub fn same_table(&self, other: &Constraint) -> bool {
        self.arity == other.arity && self.words == other.words
    }
}

impl fmt::Display for Constraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {}", self.name, self.arity, self.table_string())
    }
}

impl Serialize for Constraint {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("Constraint", 3)?;
        st.serialize_field("name", &self.name)?;
        st.serialize_field("arity", &self.arity)?;
        st.serialize_field("table", &self.table_string())?;
        st.end()
    }
}

/// Little-endian encoding of a tuple: the first value is bit 0.
pub fn encode(values: &[bool]) -> u64 {
    values
        .iter()
        .enumerate()
        .fold(0u64, |acc, (j, &b)| acc | ((b as u64) << j))
}

pub fn decode(index: u64, arity: usize) -> Vec<bool> {
    (0..arity).map(|j| (index >> j) & 1 == 1).collect()
}

pub(crate) fn parse_bits(s: &str) -> Result<Vec<bool>> {
    s.chars()
        .map(|c| match c {
            '0' => Ok(false),
            '1' => Ok(true),
            _ => Err(Error::usage(format!("expected a 0/1 string, got `{s}`"))),
        })
        .collect()
}

/// A non-empty, ordered collection of constraints with unique names.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct ConstraintSet {
    constraints: Vec<Constraint>,
}

impl ConstraintSet {
    pub fn new(constraints: Vec<Constraint>) -> Result<Self> {
        if constraints.is_empty() {
            return Err(Error::usage("a constraint set must be non-empty"));
        }
        for (i, c) in constraints.iter().enumerate() {
            if constraints[..i].iter().any(|d| d.name == c.name) {
                return Err(Error::usage(format!("duplicate constraint name `{}`", c.name)));
            }
            check_reserved(c)?;
        }
        Ok(ConstraintSet { constraints })
    }

    pub fn len(&self) -> usize {
        self.constraints.len()
    }

    pub fn is_empty(&self) -> bool {
        self.constraints.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Constraint> {
        self.constraints.iter()
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    pub fn get(&self, index: usize) -> Option<&Constraint> {
        self.constraints.get(index)
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.constraints.iter().position(|c| c.name == name)
    }

    pub fn by_name(&self, name: &str) -> Option<&Constraint> {
        self.index_of(name).map(|i| &self.constraints[i])
    }

    pub fn contains(&self, name: &str) -> bool {
        self.index_of(name).is_some()
    }

    /// Set union by name: returns `self` unchanged if `c`'s name is present.
    pub fn with(&self, c: Constraint) -> Result<Self> {
        if let Some(existing) = self.by_name(c.name()) {
            if !existing.same_table(&c) {
                return Err(Error::usage(format!(
                    "constraint `{}` already defined with a different table",
                    c.name()
                )));
            }
            return Ok(self.clone());
        }
        let mut constraints = self.constraints.clone();
        constraints.push(c);
        ConstraintSet::new(constraints)
    }

    /// Largest arity among the members.
    pub fn max_arity(&self) -> usize {
        self.constraints.iter().map(Constraint::arity).max().unwrap_or(0)
    }
}

impl<'a> IntoIterator for &'a ConstraintSet {
    type Item = &'a Constraint;
    type IntoIter = std::slice::Iter<'a, Constraint>;
    fn into_iter(self) -> Self::IntoIter {
        self.constraints.iter()
    }
}

fn check_reserved(c: &Constraint) -> Result<()> {
    let expected = match c.name() {
        ID => builtin::id(),
        NOT => builtin::not(),
        _ => return Ok(()),
    };
    if !c.same_table(&expected) {
        return Err(Error::usage(format!(
            "`{}` is reserved for the table {}",
            c.name(),
            expected.table_string()
        )));
    }
    Ok(())
}

/// Named constraints used throughout the crate and accepted in formula files
/// without a separate definition.
pub mod builtin {
    use super::Constraint;

    fn make(name: &str, arity: usize, f: impl Fn(u64) -> bool) -> Constraint {
        Constraint::from_fn(name, arity, f).expect("builtin constraint is well-formed")
    }

    fn bit(p: u64, j: usize) -> bool {
        (p >> j) & 1 == 1
    }

    pub fn id() -> Constraint {
        make(super::ID, 1, |p| p == 1)
    }

    pub fn not() -> Constraint {
        make(super::NOT, 1, |p| p == 0)
    }

    /// `x xor y`, table `0110`.
    pub fn xor2() -> Constraint {
        make("XOR2", 2, |p| p.count_ones() == 1)
    }

    /// `x = y`, table `1001`.
    pub fn eq2() -> Constraint {
        make("EQ2", 2, |p| p == 0 || p == 3)
    }

    pub fn or2() -> Constraint {
        make("OR2", 2, |p| p != 0)
    }

    pub fn and2() -> Constraint {
        make("AND2", 2, |p| p == 3)
    }

    pub fn nand2() -> Constraint {
        make("NAND2", 2, |p| p != 3)
    }

    /// `x -> y`, i.e. `not x or y`, table `1011`.
    pub fn imp() -> Constraint {
        make("IMP", 2, |p| !(bit(p, 0) && !bit(p, 1)))
    }

    /// Exactly one of three inputs is true, table `01101000`.
    pub fn one_in_three() -> Constraint {
        make("ONE_IN_THREE", 3, |p| p.count_ones() == 1)
    }

    pub fn or3() -> Constraint {
        make("OR3", 3, |p| p != 0)
    }

    pub fn nand3() -> Constraint {
        make("NAND3", 3, |p| p != 7)
    }

    /// `x xor y xor z = 1`.
    pub fn xor3() -> Constraint {
        make("XOR3", 3, |p| p.count_ones() % 2 == 1)
    }

    /// `x xor y xor z = 0`.
    pub fn xnor3() -> Constraint {
        make("XNOR3", 3, |p| p.count_ones() % 2 == 0)
    }

    /// `z = x or y`.
    pub fn or_eq() -> Constraint {
        make("OREQ", 3, |p| bit(p, 2) == (bit(p, 0) || bit(p, 1)))
    }

    /// Disjunction of `arity` literals; bit `j` of `negated` negates literal `j`.
    /// The only falsifying tuple is `negated` itself.
    pub fn clause(arity: usize, negated: u64) -> Constraint {
        let name = clause_name(arity, negated);
        make(&name, arity, move |p| p != negated)
    }

    /// `CL3_pnp` style name: one letter per literal, `p` positive and `n` negated.
    pub fn clause_name(arity: usize, negated: u64) -> String {
        let pattern: String = (0..arity)
            .map(|j| if bit(negated, j) { 'n' } else { 'p' })
            .collect();
        format!("CL{arity}_{pattern}")
    }

    pub fn all() -> Vec<Constraint> {
        let mut v = vec![
            id(),
            not(),
            xor2(),
            eq2(),
            or2(),
            and2(),
            nand2(),
            imp(),
            one_in_three(),
            or3(),
            nand3(),
            xor3(),
            xnor3(),
            or_eq(),
        ];
        for arity in 1..=3 {
            for negated in 0..(1u64 << arity) {
                v.push(clause(arity, negated));
            }
        }
        v
    }

    /// Finds a built-in by name. The short names `AND`, `NAND`, `OR`, `XOR`,
    /// `EQ` and `1in3` are accepted too and keep the name they were asked by.
    pub fn lookup(name: &str) -> Option<Constraint> {
        let canonical = match name {
            "AND" => "AND2",
            "NAND" => "NAND2",
            "OR" => "OR2",
            "XOR" => "XOR2",
            "EQ" => "EQ2",
            "1in3" | "1IN3" => "ONE_IN_THREE",
            other => other,
        };
        let c = all().into_iter().find(|c| c.name() == canonical)?;
        if canonical == name {
            Some(c)
        } else {
            c.renamed(name).ok()
        }
    }
}
