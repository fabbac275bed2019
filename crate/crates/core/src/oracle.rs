//! Brute-force ground truth: maximum satisfaction, gap decisions and
//! distances by full enumeration, plus the Gaussian-elimination attack on
//! formulas over affine constraint sets.

use std::fmt;

use rayon::prelude::*;
use serde::Serialize;

use crate::clauses::{synthesize_clauses, Clause, Family};
use crate::error::{Error, Result};
use crate::formula::{Assignment, Formula};
use crate::fraction::Fraction;
use crate::gf2::Gf2System;

/// Default bound on the number of variables for exhaustive enumeration.
pub const DEFAULT_N_MAX: usize = 24;

/// Hard ceiling: enumeration uses `u64`-packed assignments.
pub const N_CEILING: usize = 40;

pub(crate) fn check_capacity(n: usize, n_max: usize) -> Result<()> {
    let limit = n_max.min(N_CEILING);
    if n > limit {
        return Err(Error::Capacity {
            what: "variables to enumerate",
            got: n,
            limit,
        });
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MaxSat {
    pub fraction: Fraction,
    pub witness: Assignment,
}

/// Maximum satisfied fraction over all `2^n` assignments. Ties go to the
/// smallest assignment in the little-endian integer encoding.
pub fn max_sat(phi: &Formula, n_max: usize) -> Result<MaxSat> {
    let n = phi.num_vars();
    check_capacity(n, n_max)?;
    let packed = phi.packed()?;
    let better = |a: (u64, u64), b: (u64, u64)| {
        if a.0 > b.0 || (a.0 == b.0 && a.1 < b.1) {
            a
        } else {
            b
        }
    };
    let (weight, x) = (0..1u64 << n)
        .into_par_iter()
        .map(|x| (packed.satisfied_weight(x), x))
        .reduce(|| (0, u64::MAX), better);
    Ok(MaxSat {
        fraction: phi.fraction_of(weight),
        witness: Assignment::from_index(x, n),
    })
}

/// Every fully satisfying assignment, in increasing encoding order.
pub fn satisfying_assignments(phi: &Formula, n_max: usize) -> Result<Vec<Assignment>> {
    let n = phi.num_vars();
    check_capacity(n, n_max)?;
    let packed = phi.packed()?;
    let xs: Vec<u64> = (0..1u64 << n)
        .into_par_iter()
        .filter(|&x| packed.satisfies_all(x))
        .collect();
    Ok(xs.into_iter().map(|x| Assignment::from_index(x, n)).collect())
}

/// An instance of the gap problem: is some assignment at least
/// `kappa`-satisfying, or is every assignment at most `sigma`-satisfying?
#[derive(Debug, Clone)]
pub struct CspQuery {
    formula: Formula,
    kappa: Fraction,
    sigma: Fraction,
}

impl CspQuery {
    pub fn new(formula: Formula, kappa: Fraction, sigma: Fraction) -> Result<Self> {
        if !(sigma < kappa && kappa <= Fraction::ONE) {
            return Err(Error::usage(format!(
                "need 0 <= sigma < kappa <= 1, got kappa={kappa} sigma={sigma}"
            )));
        }
        Ok(CspQuery {
            formula,
            kappa,
            sigma,
        })
    }

    pub fn formula(&self) -> &Formula {
        &self.formula
    }

    pub fn kappa(&self) -> Fraction {
        self.kappa
    }

    pub fn sigma(&self) -> Fraction {
        self.sigma
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CspAnswer {
    KappaSatisfiable,
    AtMostSigma,
    /// The maximum lies strictly between `sigma` and `kappa`.
    GapViolated,
}

impl fmt::Display for CspAnswer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CspAnswer::KappaSatisfiable => "kappa-satisfiable",
            CspAnswer::AtMostSigma => "at-most-sigma",
            CspAnswer::GapViolated => "gap-violated",
        })
    }
}

pub fn decide_csp(q: &CspQuery, n_max: usize) -> Result<CspAnswer> {
    let best = max_sat(&q.formula, n_max)?.fraction;
    Ok(answer_for(best, q.kappa, q.sigma))
}

pub(crate) fn answer_for(best: Fraction, kappa: Fraction, sigma: Fraction) -> CspAnswer {
    if best >= kappa {
        CspAnswer::KappaSatisfiable
    } else if best <= sigma {
        CspAnswer::AtMostSigma
    } else {
        CspAnswer::GapViolated
    }
}

/// Normalised Hamming distance. Two empty assignments are at distance 0.
pub fn distance(a: &Assignment, b: &Assignment) -> Result<Fraction> {
    let d = a.hamming(b)?;
    if a.is_empty() {
        return Ok(Fraction::ZERO);
    }
    Ok(Fraction::new(d as u64, a.len() as u64))
}

/// Distance from `a` to the nearest fully satisfying assignment, or `None`
/// if the formula is unsatisfiable.
pub fn distance_to_satisfying(phi: &Formula, a: &Assignment, n_max: usize) -> Result<Option<Fraction>> {
    let n = phi.num_vars();
    if a.len() != n {
        return Err(Error::usage(format!(
            "assignment has length {}, formula has {n} variables",
            a.len()
        )));
    }
    check_capacity(n, n_max)?;
    let packed = phi.packed()?;
    let target = a.to_index().expect("length checked against capacity");
    let best = (0..1u64 << n)
        .into_par_iter()
        .filter(|&x| packed.satisfies_all(x))
        .map(|x| (x ^ target).count_ones())
        .min();
    Ok(best.map(|d| Fraction::new(d as u64, n as u64)))
}

/// Solves a formula over an affine constraint set exactly: every
/// application contributes its parity equations and the stacked system is
/// eliminated over GF(2). Free variables are set to 0.
pub fn linear_attack(phi: &Formula) -> Result<Option<Assignment>> {
    let mut reps = Vec::with_capacity(phi.set().len());
    for c in phi.set() {
        let rep = synthesize_clauses(c, Family::LinearEquation).ok_or_else(|| {
            Error::usage(format!("constraint `{}` is not linear", c.name()))
        })?;
        reps.push(rep);
    }
    let mut sys = Gf2System::new(phi.num_vars());
    for w in phi.applications() {
        let app = &w.application;
        for clause in &reps[app.constraint].clauses {
            if let Clause::Equation { vars, parity } = clause {
                let mapped: Vec<usize> = vars.iter().map(|&p| app.vars[p]).collect();
                sys.add_equation(&mapped, *parity);
            }
        }
    }
    Ok(sys.solve().map(Assignment::new))
}
