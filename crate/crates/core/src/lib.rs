//! Boolean constraint satisfaction: Schaefer-style classification, exact
//! weighted oracles, adversaries that defeat almost-perfect proofs of
//! proximity over tractable constraint sets, and gadget reductions.

pub mod adversary;
pub mod classify;
pub mod cli;
pub mod clauses;
pub mod constraint;
pub mod error;
pub mod format;
pub mod formula;
pub mod fraction;
pub mod gadget;
pub mod gf2;
pub mod oracle;

pub use constraint::{Constraint, ConstraintSet};
pub use error::{Error, Result};
pub use formula::{Application, Assignment, Formula, WeightedApplication};
pub use fraction::Fraction;
