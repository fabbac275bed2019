//! One-hot counterexample formulas on `m` blocks of `n` variables.
//!
//! Variable `x_i^j` (block `j`, position `i`, both 1-based) lives at index
//! `(j - 1) * n + (i - 1)`.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::Serialize;

use crate::constraint::{builtin, ConstraintSet};
use crate::error::{Error, Result};
use crate::formula::{Assignment, Formula};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// At most one block may be true.
    Pairwise,
    /// At most two blocks may be true.
    Triplewise,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Pairwise => "pairwise",
            Mode::Triplewise => "triplewise",
        })
    }
}

impl FromStr for Mode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "pairwise" => Ok(Mode::Pairwise),
            "triplewise" => Ok(Mode::Triplewise),
            _ => Err(Error::usage(format!("unknown mode `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct BlockSpec {
    pub n: usize,
    pub m: usize,
    pub mode: Mode,
}

impl BlockSpec {
    pub fn new(n: usize, m: usize, mode: Mode) -> Result<Self> {
        let min_m = match mode {
            Mode::Pairwise => 2,
            Mode::Triplewise => 3,
        };
        if n == 0 {
            return Err(Error::usage("block size n must be positive"));
        }
        if m < min_m {
            return Err(Error::usage(format!("{mode} mode needs m >= {min_m}, got {m}")));
        }
        Ok(BlockSpec { n, m, mode })
    }

    pub fn num_vars(&self) -> usize {
        self.n * self.m
    }

    /// Index of `x_i^j`, with 1-based `i` and `j`.
    pub fn var(&self, i: usize, j: usize) -> usize {
        (j - 1) * self.n + (i - 1)
    }

    /// The assignment making exactly the listed blocks true.
    pub fn blocks_true(&self, blocks: &[usize]) -> Assignment {
        let mut a = Assignment::zeros(self.num_vars());
        for &j in blocks {
            for i in 1..=self.n {
                a.set(self.var(i, j), true);
            }
        }
        a
    }

    /// `alpha_j` for `j = 1..=m`.
    pub fn block_indicators(&self) -> Vec<Assignment> {
        (1..=self.m).map(|j| self.blocks_true(&[j])).collect()
    }

    /// `alpha_{j,k}` for `1 <= j <= k <= m`, in canonical pair order.
    pub fn pair_indicators(&self) -> Vec<Assignment> {
        canonical_pairs(self.m)
            .into_iter()
            .map(|(j, k)| self.blocks_true(&[j, k]))
            .collect()
    }
}

/// Unordered pairs `(j, k)` with `1 <= j <= k <= m`, row by row.
pub fn canonical_pairs(m: usize) -> Vec<(usize, usize)> {
    (1..=m).flat_map(|j| (j..=m).map(move |k| (j, k))).collect()
}

/// The counterexample formula and its complete list of satisfying
/// assignments: `alpha_0` (all false) followed by `alpha_1..alpha_m`
/// (pairwise) or the `alpha_{j,k}` in canonical pair order (triplewise).
pub fn gen_onehot_formula(spec: &BlockSpec) -> Result<(Formula, Vec<Assignment>)> {
    let BlockSpec { n, m, mode } = *spec;
    let spec = BlockSpec::new(n, m, mode)?;
    let cross = match mode {
        Mode::Pairwise => builtin::nand2(),
        Mode::Triplewise => builtin::nand3(),
    };
    let cross_name = cross.name().to_string();
    let set = Arc::new(ConstraintSet::new(vec![builtin::imp(), cross])?);
    let mut phi = Formula::new(set, spec.num_vars())?;

    for j in 1..=m {
        for i in 1..=n {
            for i2 in (i + 1)..=n {
                let (a, b) = (spec.var(i, j), spec.var(i2, j));
                phi.add("IMP", &[a, b], 1)?;
                phi.add("IMP", &[b, a], 1)?;
            }
        }
    }
    match mode {
        Mode::Pairwise => {
            for j in 1..=m {
                for j2 in (j + 1)..=m {
                    for i in 1..=n {
                        for i2 in 1..=n {
                            phi.add(&cross_name, &[spec.var(i, j), spec.var(i2, j2)], 1)?;
                        }
                    }
                }
            }
        }
        Mode::Triplewise => {
            for j in 1..=m {
                for j2 in (j + 1)..=m {
                    for j3 in (j2 + 1)..=m {
                        for i in 1..=n {
                            for i2 in 1..=n {
                                for i3 in 1..=n {
                                    let vars = [spec.var(i, j), spec.var(i2, j2), spec.var(i3, j3)];
                                    phi.add(&cross_name, &vars, 1)?;
                                }
                            }
                        }
                    }
                }
            }
        }
    }

    let mut sats = vec![Assignment::zeros(spec.num_vars())];
    match mode {
        Mode::Pairwise => sats.extend(spec.block_indicators()),
        Mode::Triplewise => sats.extend(spec.pair_indicators()),
    }
    Ok((phi, sats))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fraction::Fraction;

    #[test]
    fn spec_validation() {
        assert!(BlockSpec::new(1, 1, Mode::Pairwise).is_err());
        assert!(BlockSpec::new(1, 2, Mode::Triplewise).is_err());
        assert!(BlockSpec::new(0, 3, Mode::Pairwise).is_err());
        assert!(BlockSpec::new(1, 2, Mode::Pairwise).is_ok());
    }

    #[test]
    fn n1_m2_pairwise() {
        let spec = BlockSpec::new(1, 2, Mode::Pairwise).unwrap();
        let (phi, sats) = gen_onehot_formula(&spec).unwrap();
        assert_eq!(phi.len(), 1);
        let c = phi.constraint_of(&phi.applications()[0].application);
        assert_eq!(c.name(), "NAND2");
        let s: Vec<String> = sats.iter().map(|a| a.to_string()).collect();
        assert_eq!(s, ["00", "10", "01"]);
    }

    #[test]
    fn n1_m3_triplewise() {
        let spec = BlockSpec::new(1, 3, Mode::Triplewise).unwrap();
        let (phi, sats) = gen_onehot_formula(&spec).unwrap();
        assert_eq!(phi.len(), 1);
        assert_eq!(sats.len(), 7);
        assert!(!sats.contains(&"111".parse().unwrap()));
        for a in &sats {
            assert_eq!(phi.evaluate(a).unwrap(), Fraction::ONE);
        }
    }

    #[test]
    fn layout() {
        let spec = BlockSpec::new(2, 3, Mode::Pairwise).unwrap();
        assert_eq!(spec.var(1, 1), 0);
        assert_eq!(spec.var(2, 3), 5);
        assert_eq!(spec.blocks_true(&[2]).to_string(), "001100");
        assert_eq!(canonical_pairs(3), vec![(1, 1), (1, 2), (1, 3), (2, 2), (2, 3), (3, 3)]);
    }
}
