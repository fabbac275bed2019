//! Proof construction for 2CNF verifiers.
//!
//! Every variable `z` of the pruned formula gets the symmetric `m x m`
//! matrix `V(z)` of the values it takes under the pair witnesses. Variables
//! sharing a matrix form a class and receive a common value:
//!
//! 1. if `D^j <= A` for some `j`, the class gets 1;
//! 2. else if `A <= 1 - D^j` for some `j`, it gets 0;
//! 3. otherwise it gets the majority of the `m^2` entries of `A`.
//!
//! `D^j` is the matrix that is 1 exactly on row and column `j`. The
//! assignment point `beta` (all ones) sits in the `D^j` classes.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use super::onehot::canonical_pairs;
use super::WitnessPair;
use crate::clauses::{synthesize_clauses, Clause, Family};
use crate::error::{Error, Result};
use crate::formula::{Assignment, Formula};

/// An `m x m` symmetric 0/1 matrix, rows and columns 1-based in the API.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SymMatrix {
    m: usize,
    entries: Vec<bool>,
}

impl SymMatrix {
    pub fn zeros(m: usize) -> Self {
        SymMatrix {
            m,
            entries: vec![false; m * m],
        }
    }

    pub fn ones(m: usize) -> Self {
        SymMatrix {
            m,
            entries: vec![true; m * m],
        }
    }

    /// `D^j`: ones on row `j` and column `j`.
    pub fn d(m: usize, j: usize) -> Self {
        let mut a = SymMatrix::zeros(m);
        for t in 1..=m {
            a.set(j, t, true);
        }
        a
    }

    /// Builds a matrix from a symmetric predicate on `(p, q)`.
    pub fn from_fn(m: usize, f: impl Fn(usize, usize) -> bool) -> Self {
        let mut a = SymMatrix::zeros(m);
        for (p, q) in canonical_pairs(m) {
            a.set(p, q, f(p, q));
        }
        a
    }

    pub fn size(&self) -> usize {
        self.m
    }

    pub fn get(&self, p: usize, q: usize) -> bool {
        self.entries[(p - 1) * self.m + (q - 1)]
    }

    /// Sets entries `(p, q)` and `(q, p)`.
    pub fn set(&mut self, p: usize, q: usize, v: bool) {
        let m = self.m;
        self.entries[(p - 1) * m + (q - 1)] = v;
        self.entries[(q - 1) * m + (p - 1)] = v;
    }

    pub fn le(&self, other: &SymMatrix) -> bool {
        self.entries
            .iter()
            .zip(&other.entries)
            .all(|(&a, &b)| !a || b)
    }

    pub fn complement(&self) -> Self {
        SymMatrix {
            m: self.m,
            entries: self.entries.iter().map(|b| !b).collect(),
        }
    }

    pub fn count_ones(&self) -> usize {
        self.entries.iter().filter(|&&b| b).count()
    }
}

impl fmt::Display for SymMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for p in 1..=self.m {
            if p > 1 {
                f.write_str("/")?;
            }
            for q in 1..=self.m {
                f.write_str(if self.get(p, q) { "1" } else { "0" })?;
            }
        }
        Ok(())
    }
}

impl Serialize for SymMatrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// Witnesses indexed by unordered block pairs `{j, k}`, `j = k` allowed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairWitnesses {
    m: usize,
    by_pair: BTreeMap<(usize, usize), WitnessPair>,
}

impl PairWitnesses {
    /// Accepts entries under either `(j, k)` or `(k, j)`. If both are given
    /// they must be identical; every pair must be covered.
    pub fn from_map(m: usize, map: BTreeMap<(usize, usize), WitnessPair>) -> Result<Self> {
        if m == 0 {
            return Err(Error::usage("m must be positive"));
        }
        if let Some(&(j, k)) = map.keys().find(|&&(j, k)| j == 0 || k == 0 || j > m || k > m) {
            return Err(Error::invariant(format!("witness index ({j},{k}) outside 1..={m}")));
        }
        let mut by_pair = BTreeMap::new();
        for (j, k) in canonical_pairs(m) {
            let w = match (map.get(&(j, k)), map.get(&(k, j))) {
                (Some(a), Some(b)) if a != b => {
                    return Err(Error::invariant(format!(
                        "witness map is not symmetric at ({j},{k})"
                    )))
                }
                (Some(a), _) | (None, Some(a)) => a.clone(),
                (None, None) => {
                    return Err(Error::invariant(format!("missing witness for pair ({j},{k})")))
                }
            };
            by_pair.insert((j, k), w);
        }
        Ok(PairWitnesses { m, by_pair })
    }

    /// Reads `m(m+1)/2` witnesses in canonical pair order.
    pub fn from_canonical(list: &[WitnessPair]) -> Result<Self> {
        let m = (1..=64)
            .find(|m| m * (m + 1) / 2 == list.len())
            .ok_or_else(|| {
                Error::usage(format!(
                    "{} witnesses is not a triangular number m(m+1)/2",
                    list.len()
                ))
            })?;
        let map = canonical_pairs(m).into_iter().zip(list.iter().cloned()).collect();
        PairWitnesses::from_map(m, map)
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// Witness for the unordered pair `{j, k}`.
    pub fn get(&self, j: usize, k: usize) -> &WitnessPair {
        &self.by_pair[&(j.min(k), j.max(k))]
    }

    /// Witnesses in canonical pair order.
    pub fn list(&self) -> Vec<WitnessPair> {
        self.by_pair.values().cloned().collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Rule {
    /// `D^j <= A` for some `j`.
    AboveD,
    /// `A <= 1 - D^j` for some `j`.
    BelowComplementD,
    Majority,
}

/// Value assigned to every variable whose matrix is `a`.
pub fn class_value(a: &SymMatrix) -> (bool, Rule) {
    let m = a.size();
    if (1..=m).any(|j| SymMatrix::d(m, j).le(a)) {
        (true, Rule::AboveD)
    } else if (1..=m).any(|j| a.le(&SymMatrix::d(m, j).complement())) {
        (false, Rule::BelowComplementD)
    } else {
        (2 * a.count_ones() > m * m, Rule::Majority)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MatrixClass {
    pub matrix: SymMatrix,
    /// 1-based variable names.
    pub members: Vec<usize>,
    pub value: bool,
    pub rule: Rule,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TwoCnfProof {
    pub assignment: Assignment,
    pub classes: Vec<MatrixClass>,
    /// Implication edges checked against `A <= B`.
    pub edges_checked: usize,
}

/// Builds the combined assignment for a pruned 2CNF formula. The first
/// `base_len` variables (the witnesses' assignment part) must end up true.
pub fn construct_2cnf_proof(psi: &Formula, witnesses: &PairWitnesses) -> Result<TwoCnfProof> {
    let m = witnesses.m();
    if m % 2 == 0 {
        return Err(Error::invariant(format!("m must be odd, got {m}")));
    }
    let first = witnesses.get(1, 1);
    let base_len = first.base.len();
    let n = psi.num_vars();
    for (j, k) in canonical_pairs(m) {
        let w = witnesses.get(j, k);
        if w.base.len() != base_len || w.full_len() != n {
            return Err(Error::usage(format!(
                "witness ({j},{k}) has shape {}+{}, expected {base_len}+{}",
                w.base.len(),
                w.proof.len(),
                n - base_len.min(n)
            )));
        }
    }

    let full: BTreeMap<(usize, usize), Assignment> = canonical_pairs(m)
        .into_iter()
        .map(|(j, k)| ((j, k), witnesses.get(j, k).full()))
        .collect();
    let matrix_of = |z: usize| SymMatrix::from_fn(m, |p, q| full[&(p.min(q), p.max(q))].get(z));
    let matrices: Vec<SymMatrix> = (0..n).map(matrix_of).collect();

    let mut classes: BTreeMap<SymMatrix, Vec<usize>> = BTreeMap::new();
    for (z, a) in matrices.iter().enumerate() {
        classes.entry(a.clone()).or_default().push(z);
    }

    for a in classes.keys() {
        for j in 1..=m {
            let d = SymMatrix::d(m, j);
            if d.le(a) && a.le(&d.complement()) {
                return Err(Error::invariant(format!("D^{j} <= {a} <= 1 - D^{j}")));
            }
        }
        let (v, _) = class_value(a);
        let (w, _) = class_value(&a.complement());
        if v == w {
            return Err(Error::invariant(format!(
                "complementary classes {a} and {} got equal values",
                a.complement()
            )));
        }
    }

    // Every clause kept after pruning is satisfied by all pair witnesses, so
    // each implication edge u -> v must run between classes with V(u) <= V(v).
    let mut edges_checked = 0;
    let mut reps = Vec::with_capacity(psi.set().len());
    for c in psi.set() {
        reps.push(synthesize_clauses(c, Family::TwoClause));
    }
    let literal_matrix = |var: usize, positive: bool| {
        if positive {
            matrices[var].clone()
        } else {
            matrices[var].complement()
        }
    };
    for w in psi.applications() {
        let app = &w.application;
        let rep = reps[app.constraint].as_ref().ok_or_else(|| {
            Error::usage(format!(
                "constraint `{}` is not expressible by 2-clauses",
                psi.constraint_of(app).name()
            ))
        })?;
        for clause in &rep.clauses {
            let Clause::Disjunction(lits) = clause else {
                unreachable!("two-clause family yields disjunctions")
            };
            let mats: Vec<SymMatrix> = lits
                .iter()
                .map(|l| literal_matrix(app.vars[l.var], l.positive))
                .collect();
            let ok = match mats.as_slice() {
                [a] => SymMatrix::ones(m).le(a),
                [a, b] => a.complement().le(b) && b.complement().le(a),
                _ => unreachable!("two-clauses have one or two literals"),
            };
            edges_checked += 1;
            if !ok {
                return Err(Error::invariant(format!(
                    "clause {clause} of `{}` links classes violating A <= B",
                    psi.constraint_of(app).name()
                )));
            }
        }
    }

    let mut assignment = Assignment::zeros(n);
    let mut out = Vec::with_capacity(classes.len());
    for (matrix, members) in classes {
        let (value, rule) = class_value(&matrix);
        for &z in &members {
            assignment.set(z, value);
        }
        out.push(MatrixClass {
            matrix,
            members: members.iter().map(|z| z + 1).collect(),
            value,
            rule,
        });
    }
    if let Some(z) = (0..base_len).find(|&z| !assignment.get(z)) {
        return Err(Error::invariant(format!(
            "assignment variable {} is not forced to 1 (matrix {})",
            z + 1,
            matrices[z]
        )));
    }

    Ok(TwoCnfProof {
        assignment,
        classes: out,
        edges_checked,
    })
}
