//! Adversaries against almost-perfect proofs of proximity over tractable
//! constraint sets.
//!
//! Given a verifier formula `psi` (assignment variables followed by proof
//! variables) and honest witnesses for several far-apart satisfying
//! assignments, an attack drops every application some witness violates,
//! then merges the witnesses with an operation the constraint set is closed
//! under. The merged point satisfies everything that survived pruning,
//! while its assignment part is far from every honest assignment.

mod combine;
pub mod demo;
mod matrix;
mod onehot;

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::Serialize;

pub use combine::{combine_and, combine_majority, combine_or, combine_xor};
pub use matrix::{
    class_value, construct_2cnf_proof, MatrixClass, PairWitnesses, Rule, SymMatrix, TwoCnfProof,
};
pub use onehot::{canonical_pairs, gen_onehot_formula, BlockSpec, Mode};

use crate::classify::{classify_set, Augment, Class};
use crate::error::{Error, Result};
use crate::formula::{Assignment, Formula};
use crate::fraction::Fraction;
use crate::oracle::distance;

/// An assignment part followed by a proof part.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct WitnessPair {
    pub base: Assignment,
    pub proof: Assignment,
}

impl WitnessPair {
    pub fn new(base: Assignment, proof: Assignment) -> Self {
        WitnessPair { base, proof }
    }

    /// Splits a full vector after `base_len` bits.
    pub fn split(full: &Assignment, base_len: usize) -> Result<Self> {
        if base_len > full.len() {
            return Err(Error::usage(format!(
                "split point {base_len} beyond vector length {}",
                full.len()
            )));
        }
        let (base, proof) = full.split_at(base_len);
        Ok(WitnessPair { base, proof })
    }

    pub fn full(&self) -> Assignment {
        self.base.concat(&self.proof)
    }

    pub fn full_len(&self) -> usize {
        self.base.len() + self.proof.len()
    }
}

/// The four classes an attack is dispatched on. The 0-valid and 1-valid
/// classes need no attack: the constant assignment already satisfies every
/// formula over such a set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum AttackClass {
    Linear,
    WeaklyPositive,
    WeaklyNegative,
    #[serde(rename = "2cnf")]
    TwoCnf,
}

impl AttackClass {
    pub const ALL: [AttackClass; 4] = [
        AttackClass::Linear,
        AttackClass::WeaklyPositive,
        AttackClass::WeaklyNegative,
        AttackClass::TwoCnf,
    ];

    pub fn class(self) -> Class {
        match self {
            AttackClass::Linear => Class::Linear,
            AttackClass::WeaklyPositive => Class::WeaklyPositive,
            AttackClass::WeaklyNegative => Class::WeaklyNegative,
            AttackClass::TwoCnf => Class::TwoCnf,
        }
    }
}

impl fmt::Display for AttackClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.class().fmt(f)
    }
}

impl FromStr for AttackClass {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.parse::<Class>()? {
            Class::Linear => Ok(AttackClass::Linear),
            Class::WeaklyPositive => Ok(AttackClass::WeaklyPositive),
            Class::WeaklyNegative => Ok(AttackClass::WeaklyNegative),
            Class::TwoCnf => Ok(AttackClass::TwoCnf),
            other => Err(Error::usage(format!(
                "class `{other}` has no attack; the constant assignment satisfies every formula"
            ))),
        }
    }
}

fn check_witness_shapes(psi: &Formula, witnesses: &[WitnessPair]) -> Result<()> {
    let first = witnesses
        .first()
        .ok_or_else(|| Error::usage("need at least one witness"))?;
    for w in witnesses {
        if w.base.len() != first.base.len() || w.proof.len() != first.proof.len() {
            return Err(Error::usage("witnesses have inconsistent shapes"));
        }
        if w.full_len() != psi.num_vars() {
            return Err(Error::usage(format!(
                "witness has {} bits, formula has {} variables",
                w.full_len(),
                psi.num_vars()
            )));
        }
    }
    Ok(())
}

/// Drops every application violated by at least one witness. Returns the
/// pruned formula and the fraction of weight kept.
pub fn prune(psi: &Formula, witnesses: &[WitnessPair]) -> Result<(Formula, Fraction)> {
    check_witness_shapes(psi, witnesses)?;
    let fulls: Vec<Assignment> = witnesses.iter().map(WitnessPair::full).collect();
    let pruned = psi.retain(|_, w| {
        let c = psi.constraint_of(&w.application);
        fulls.iter().all(|a| w.application.holds(c, a.bits()))
    });
    let kept = psi.fraction_of(pruned.total_weight());
    Ok((pruned, kept))
}

/// Outcome of an attack. Fractions are exact.
#[derive(Debug, Clone, Serialize)]
pub struct AttackResult {
    pub class: AttackClass,
    pub witness_count: usize,
    pub applications_kept: usize,
    pub applications_total: usize,
    pub pruned_weight_fraction: Fraction,
    /// The merged point, assignment part then proof part.
    pub combined: Assignment,
    pub beta: Assignment,
    pub satisfied_fraction_pruned: Fraction,
    pub satisfied_fraction_original: Fraction,
    pub distances: Vec<Fraction>,
    pub min_distance: Option<Fraction>,
    pub epsilon_per_witness: Vec<Fraction>,
    pub epsilon_sum: Fraction,
    pub max_epsilon: Fraction,
    /// `1 - sum of epsilons`, saturating at 0.
    pub bound: Fraction,
    /// `1 - (witness count) * max epsilon`, saturating at 0.
    pub coarse_bound: Fraction,
    /// Largest epsilon for which the coarse bound stays positive: `1 / count`.
    pub lambda: Fraction,
    /// Rejection factor the pruning argument beats (the witness count).
    pub proof_factor: u64,
    /// Soundness factor of the corresponding impossibility statement, with
    /// `ceil(1/delta)` taken as `m`.
    pub statement_factor: u64,
    /// Whether the original fraction exceeds `1 - statement_factor * max_epsilon`.
    pub beats_statement_factor: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub matrix_classes: Option<Vec<MatrixClass>>,
    #[serde(skip)]
    pub pruned: Formula,
}

/// Prunes, merges by the class's closure operation, and measures.
///
/// Witness counts: linear needs an odd number; 2CNF needs `m(m+1)/2` pair
/// witnesses in canonical order with `m` odd. `alphas` are the honest
/// assignment parts the merged point is compared against.
pub fn run_attack(
    class: AttackClass,
    psi: &Formula,
    witnesses: &[WitnessPair],
    alphas: &[Assignment],
) -> Result<AttackResult> {
    let report = classify_set(psi.set());
    if !report.flags.get(class.class()) {
        return Err(Error::usage(format!(
            "constraint set of the formula is not {}",
            class.class()
        )));
    }
    check_witness_shapes(psi, witnesses)?;
    let base_len = witnesses[0].base.len();
    if let Some(a) = alphas.iter().find(|a| a.len() != base_len) {
        return Err(Error::usage(format!(
            "alpha has {} bits, witness assignment part has {base_len}",
            a.len()
        )));
    }

    let count = witnesses.len();
    let pairs = match class {
        AttackClass::Linear if count % 2 == 0 => {
            return Err(Error::usage(format!(
                "linear attack needs an odd number of witnesses, got {count}"
            )))
        }
        AttackClass::TwoCnf => {
            let pw = PairWitnesses::from_canonical(witnesses)?;
            if pw.m() % 2 == 0 {
                return Err(Error::usage(format!("2cnf attack needs odd m, got {}", pw.m())));
            }
            Some(pw)
        }
        _ => None,
    };

    let fulls: Vec<Assignment> = witnesses.iter().map(WitnessPair::full).collect();
    let epsilons = fulls
        .iter()
        .map(|a| psi.evaluate(a).map(Fraction::complement))
        .collect::<Result<Vec<_>>>()?;
    let (pruned, kept) = prune(psi, witnesses)?;

    let mut matrix_classes = None;
    let combined = match class {
        AttackClass::Linear => combine_xor(&fulls)?,
        AttackClass::WeaklyPositive => combine_or(&fulls)?,
        AttackClass::WeaklyNegative => combine_and(&fulls)?,
        AttackClass::TwoCnf => {
            let proof = construct_2cnf_proof(&pruned, pairs.as_ref().expect("set above"))?;
            matrix_classes = Some(proof.classes);
            proof.assignment
        }
    };

    let sat_pruned = pruned.evaluate(&combined)?;
    let sat_original = psi.evaluate(&combined)?;
    if sat_pruned != Fraction::ONE {
        return Err(Error::invariant(format!(
            "combined point satisfies only {sat_pruned} of the pruned formula"
        )));
    }
    let beta = combined.split_at(base_len).0;
    let distances = alphas
        .iter()
        .map(|a| distance(&beta, a))
        .collect::<Result<Vec<_>>>()?;

    let epsilon_sum: Fraction = epsilons.iter().copied().sum();
    let max_epsilon = epsilons.iter().copied().max().unwrap_or(Fraction::ZERO);
    let bound = epsilon_sum.complement();
    if sat_original < bound {
        return Err(Error::invariant(format!(
            "original fraction {sat_original} is below the pruning bound {bound}"
        )));
    }
    let m = pairs.as_ref().map_or(count, PairWitnesses::m) as u64;
    let statement_factor = match class {
        AttackClass::Linear => m + 2,
        AttackClass::WeaklyPositive | AttackClass::WeaklyNegative => m + 1,
        AttackClass::TwoCnf => (m + 2) * (m + 2),
    };
    let slack = max_epsilon.mul_int(statement_factor);
    let beats_statement_factor = slack >= Fraction::ONE || sat_original > slack.complement();

    Ok(AttackResult {
        class,
        witness_count: count,
        applications_kept: pruned.len(),
        applications_total: psi.len(),
        pruned_weight_fraction: kept,
        beta,
        combined,
        satisfied_fraction_pruned: sat_pruned,
        satisfied_fraction_original: sat_original,
        min_distance: distances.iter().copied().min(),
        distances,
        epsilon_per_witness: epsilons,
        epsilon_sum,
        max_epsilon,
        bound,
        coarse_bound: max_epsilon.mul_int(count as u64).complement(),
        lambda: Fraction::new(1, count as u64),
        proof_factor: count as u64,
        statement_factor,
        beats_statement_factor,
        matrix_classes,
        pruned,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Force {
    /// Second half forced true with `ID` units.
    TrueHalf,
    /// Second half forced false with `NOT` units.
    FalseHalf,
}

impl FromStr for Force {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "true-half" | "true" => Ok(Force::TrueHalf),
            "false-half" | "false" => Ok(Force::FalseHalf),
            _ => Err(Error::usage(format!("expected true-half or false-half, got `{s}`"))),
        }
    }
}

/// Doubles the variable count: the original applications act on the first
/// half and a unit application pins every variable of the second half.
pub fn double_formula(phi: &Formula, force: Force) -> Result<Formula> {
    let (augment, unit) = match force {
        Force::TrueHalf => (Augment::Id, crate::constraint::ID),
        Force::FalseHalf => (Augment::Not, crate::constraint::NOT),
    };
    let set = Arc::new(crate::classify::de_c_close(phi.set(), augment)?);
    let n = phi.num_vars();
    let mut out = Formula::new(Arc::clone(&set), 2 * n)?;
    for w in phi.applications() {
        out.add(phi.constraint_of(&w.application).name(), &w.application.vars, w.weight)?;
    }
    for v in n..2 * n {
        out.add(unit, &[v], 1)?;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::format::parse_formula;
    use crate::oracle::{satisfying_assignments, DEFAULT_N_MAX};

    fn a(s: &str) -> Assignment {
        s.parse().unwrap()
    }

    #[test]
    fn prune_examples() {
        let psi = parse_formula("vars 2\napp 1 ID 1\napp 1 ID 2\napp 1 OR2 1 2", None).unwrap();
        let w = WitnessPair::new(a("10"), Assignment::default());
        let (pruned, kept) = prune(&psi, &[w]).unwrap();
        assert_eq!(pruned.len(), 2);
        assert_eq!(kept, Fraction::new(2, 3));

        let good = WitnessPair::new(a("1"), a("1"));
        let (pruned, kept) = prune(&psi, &[good.clone(), good]).unwrap();
        assert_eq!(pruned, psi);
        assert_eq!(kept, Fraction::ONE);

        assert!(prune(&psi, &[WitnessPair::new(a("1"), Assignment::default())]).is_err());
    }

    #[test]
    fn prune_union_bound() {
        // 20 unit apps; two witnesses each violate a disjoint 10% slice.
        let mut text = String::from("vars 20\n");
        for v in 1..=20 {
            text.push_str(&format!("app 1 ID {v}\n"));
        }
        let psi = parse_formula(&text, None).unwrap();
        let w1 = WitnessPair::new(a("00111111111111111111"), Assignment::default());
        let w2 = WitnessPair::new(a("11001111111111111111"), Assignment::default());
        let (_, kept) = prune(&psi, &[w1, w2]).unwrap();
        assert_eq!(kept, Fraction::new(4, 5));
    }

    #[test]
    fn class_tags() {
        assert_eq!("linear".parse::<AttackClass>().unwrap(), AttackClass::Linear);
        assert_eq!("2cnf".parse::<AttackClass>().unwrap(), AttackClass::TwoCnf);
        assert!(matches!("0-valid".parse::<AttackClass>(), Err(Error::Usage(_))));
        assert!("1-valid".parse::<AttackClass>().is_err());
    }

    #[test]
    fn run_attack_rejects_wrong_class() {
        let psi = parse_formula("vars 2\napp 1 OR2 1 2", None).unwrap();
        let w = WitnessPair::new(a("10"), Assignment::default());
        assert!(matches!(
            run_attack(AttackClass::Linear, &psi, &[w], &[]),
            Err(Error::Usage(_))
        ));
    }

    #[test]
    fn double_formula_examples() {
        let phi = parse_formula("vars 1\napp 1 ID 1", None).unwrap();
        let d = double_formula(&phi, Force::TrueHalf).unwrap();
        assert_eq!(d.num_vars(), 2);
        assert_eq!(d.len(), 2);
        let sats = satisfying_assignments(&d, DEFAULT_N_MAX).unwrap();
        assert_eq!(sats, vec![a("11")]);

        let phi = parse_formula("vars 2\napp 1 OR2 1 2", None).unwrap();
        let d = double_formula(&phi, Force::FalseHalf).unwrap();
        let sats = satisfying_assignments(&d, DEFAULT_N_MAX).unwrap();
        let expect: Vec<Assignment> = ["1000", "0100", "1100"].iter().map(|s| a(s)).collect();
        assert_eq!(sats, expect);
        assert!(d.set().contains("NOT"));
    }
}
