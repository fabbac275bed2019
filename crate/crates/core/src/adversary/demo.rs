//! Ready-made verifier formulas for the attacks.
//!
//! Each generator encodes the one-hot block structure directly in the target
//! class, together with auxiliary proof variables, and returns honest
//! witnesses for every block indicator (or block-pair indicator for 2CNF).
//! [`DemoInstance::with_violations`] then makes the witnesses imperfect by
//! exact, chosen amounts.

use std::sync::Arc;

use super::onehot::{canonical_pairs, BlockSpec, Mode};
use super::{AttackClass, WitnessPair};
use crate::constraint::{builtin, Constraint, ConstraintSet, ID, NOT};
use crate::error::{Error, Result};
use crate::formula::{Application, Assignment, Formula};
use crate::fraction::Fraction;

#[derive(Debug, Clone)]
pub struct DemoInstance {
    pub class: AttackClass,
    pub spec: BlockSpec,
    pub psi: Formula,
    pub witnesses: Vec<WitnessPair>,
    /// Honest assignment parts, aligned with `witnesses`.
    pub alphas: Vec<Assignment>,
}

pub fn demo(class: AttackClass, n: usize, m: usize) -> Result<DemoInstance> {
    match class {
        AttackClass::Linear => linear_demo(n, m),
        AttackClass::WeaklyPositive => weakly_positive_demo(n, m),
        AttackClass::WeaklyNegative => weakly_negative_demo(n, m),
        AttackClass::TwoCnf => two_cnf_demo(n, m),
    }
}

fn require_odd(m: usize) -> Result<()> {
    if m % 2 == 0 {
        return Err(Error::usage(format!("m must be odd, got {m}")));
    }
    Ok(())
}

fn shared(cs: Vec<Constraint>) -> Result<Arc<ConstraintSet>> {
    Ok(Arc::new(ConstraintSet::new(cs)?))
}

/// Ties every variable of each block to the block's first variable.
fn block_equalities(psi: &mut Formula, spec: &BlockSpec, eq: &str, both_ways: bool) -> Result<()> {
    for j in 1..=spec.m {
        for i in 2..=spec.n {
            let (a, b) = (spec.var(1, j), spec.var(i, j));
            psi.add(eq, &[a, b], 1)?;
            if both_ways {
                psi.add(eq, &[b, a], 1)?;
            }
        }
    }
    Ok(())
}

/// Parity chain over the block representatives: `s_1 = x_1^1`,
/// `s_k = s_{k-1} xor x_1^k`, and `s_m = 1`. Block `j`'s proof sets
/// `s_k = [k >= j]`.
pub fn linear_demo(n: usize, m: usize) -> Result<DemoInstance> {
    require_odd(m)?;
    let spec = BlockSpec::new(n, m, Mode::Pairwise)?;
    let base = spec.num_vars();
    let s = |k: usize| if k == 1 { spec.var(1, 1) } else { base + k - 2 };
    let set = shared(vec![builtin::eq2(), builtin::xnor3(), builtin::id()])?;
    let mut psi = Formula::new(set, base + m - 1)?;
    block_equalities(&mut psi, &spec, "EQ2", false)?;
    for k in 2..=m {
        psi.add("XNOR3", &[s(k - 1), spec.var(1, k), s(k)], 1)?;
    }
    psi.add(ID, &[s(m)], 1)?;

    let witnesses = (1..=m)
        .map(|j| {
            let proof = Assignment::new((2..=m).map(|k| k >= j).collect());
            WitnessPair::new(spec.blocks_true(&[j]), proof)
        })
        .collect();
    Ok(DemoInstance {
        class: AttackClass::Linear,
        spec,
        psi,
        witnesses,
        alphas: spec.block_indicators(),
    })
}

/// Dual-Horn encoding: choice bits `c_j = x_1^j` and an OR chain
/// `s_k = s_{k-1} or c_k` ending in `s_m = 1`.
pub fn weakly_positive_demo(n: usize, m: usize) -> Result<DemoInstance> {
    let spec = BlockSpec::new(n, m, Mode::Pairwise)?;
    let base = spec.num_vars();
    let c = |k: usize| base + k - 1;
    let s = |k: usize| if k == 1 { c(1) } else { base + m + k - 2 };
    let set = shared(vec![builtin::imp(), builtin::or_eq(), builtin::id()])?;
    let mut psi = Formula::new(set, base + 2 * m - 1)?;
    block_equalities(&mut psi, &spec, "IMP", true)?;
    for j in 1..=m {
        psi.add("IMP", &[c(j), spec.var(1, j)], 1)?;
        psi.add("IMP", &[spec.var(1, j), c(j)], 1)?;
    }
    for k in 2..=m {
        psi.add("OREQ", &[s(k - 1), c(k), s(k)], 1)?;
    }
    psi.add(ID, &[s(m)], 1)?;

    let witnesses = (1..=m)
        .map(|j| {
            let mut bits: Vec<bool> = (1..=m).map(|k| k == j).collect();
            bits.extend((2..=m).map(|k| k >= j));
            WitnessPair::new(spec.blocks_true(&[j]), Assignment::new(bits))
        })
        .collect();
    Ok(DemoInstance {
        class: AttackClass::WeaklyPositive,
        spec,
        psi,
        witnesses,
        alphas: spec.block_indicators(),
    })
}

/// The dual-Horn demo with every variable negated: a Horn formula whose
/// honest assignments are the complements of the block indicators.
pub fn weakly_negative_demo(n: usize, m: usize) -> Result<DemoInstance> {
    let d = weakly_positive_demo(n, m)?;
    Ok(DemoInstance {
        class: AttackClass::WeaklyNegative,
        spec: d.spec,
        psi: negate_formula(&d.psi)?,
        witnesses: d
            .witnesses
            .iter()
            .map(|w| WitnessPair::new(w.base.complement(), w.proof.complement()))
            .collect(),
        alphas: d.alphas.iter().map(Assignment::complement).collect(),
    })
}

fn negated_name(name: &str) -> String {
    match name {
        ID => NOT.to_string(),
        NOT => ID.to_string(),
        other => format!("NEG_{other}"),
    }
}

/// Replaces every constraint `f` by `x -> f(not x)`. An assignment satisfies
/// the result iff its complement satisfies the input.
pub fn negate_formula(phi: &Formula) -> Result<Formula> {
    let flipped = phi
        .set()
        .iter()
        .map(|c| c.flip_inputs(&negated_name(c.name())))
        .collect::<Result<Vec<_>>>()?;
    let mut out = Formula::new(shared(flipped)?, phi.num_vars())?;
    for w in phi.applications() {
        out.push(w.application.clone(), w.weight)?;
    }
    Ok(out)
}

/// 2CNF encoding for pair witnesses. Proof variables per block `p`:
/// `z_p = not x_1^p`; per block pair `p < q`: `y_pq` below both blocks and
/// `w_pq` above both; and a complementary pair `d`, `e` flagging whether the
/// witness pair is diagonal.
pub fn two_cnf_demo(n: usize, m: usize) -> Result<DemoInstance> {
    require_odd(m)?;
    let spec = BlockSpec::new(n, m, Mode::Triplewise)?;
    let base = spec.num_vars();
    let z = |p: usize| base + p - 1;
    let off_diag: Vec<(usize, usize)> = canonical_pairs(m).into_iter().filter(|(p, q)| p < q).collect();
    let y = |idx: usize| base + m + 2 * idx;
    let w = |idx: usize| base + m + 2 * idx + 1;
    let d = base + m + 2 * off_diag.len();
    let e = d + 1;

    let set = shared(vec![builtin::imp(), builtin::xor2(), builtin::id()])?;
    let mut psi = Formula::new(set, e + 1)?;
    block_equalities(&mut psi, &spec, "IMP", true)?;
    for p in 1..=m {
        psi.add("XOR2", &[spec.var(1, p), z(p)], 1)?;
    }
    for (idx, &(p, q)) in off_diag.iter().enumerate() {
        psi.add("IMP", &[y(idx), spec.var(1, p)], 1)?;
        psi.add("IMP", &[y(idx), spec.var(1, q)], 1)?;
        psi.add("IMP", &[y(idx), e], 1)?;
        psi.add("IMP", &[spec.var(1, p), w(idx)], 1)?;
        psi.add("IMP", &[spec.var(1, q), w(idx)], 1)?;
    }
    psi.add("XOR2", &[d, e], 1)?;

    let witnesses = canonical_pairs(m)
        .into_iter()
        .map(|(j, k)| {
            let full_len = e + 1;
            let mut a = spec.blocks_true(&[j, k]).concat(&Assignment::zeros(full_len - base));
            let chosen = |t: usize| t == j || t == k;
            for p in 1..=m {
                a.set(z(p), !chosen(p));
            }
            for (idx, &(p, q)) in off_diag.iter().enumerate() {
                a.set(y(idx), j != k && (p, q) == (j, k));
                a.set(w(idx), chosen(p) || chosen(q));
            }
            a.set(d, j == k);
            a.set(e, j != k);
            WitnessPair::split(&a, base).expect("base fits")
        })
        .collect();
    Ok(DemoInstance {
        class: AttackClass::TwoCnf,
        spec,
        psi,
        witnesses,
        alphas: spec.pair_indicators(),
    })
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn lcm(a: u64, b: u64) -> u64 {
    a / gcd(a, b) * b
}

impl DemoInstance {
    /// Makes witness `j` violate exactly an `eps[j]` fraction of the total
    /// weight. Each witness with a positive target gets a sentinel proof
    /// bit `g_j`, constrained by `ID(g_j)`, which only that witness leaves
    /// false; all existing weights are scaled so the fractions come out
    /// exact. The sum of targets must be below 1.
    pub fn with_violations(&self, eps: &[Fraction]) -> Result<DemoInstance> {
        if eps.len() != self.witnesses.len() {
            return Err(Error::usage(format!(
                "got {} violation targets for {} witnesses",
                eps.len(),
                self.witnesses.len()
            )));
        }
        let total: Fraction = eps.iter().copied().sum();
        if total >= Fraction::ONE {
            return Err(Error::usage(format!("violation targets sum to {total} >= 1")));
        }
        let base_weight = Fraction::new(self.psi.total_weight().max(1), 1);
        let scaled_total = base_weight / total.complement();
        let mut scale = scaled_total.denom();
        for e in eps {
            scale = lcm(scale, (*e * scaled_total).denom());
        }

        let sentinels: Vec<usize> = (0..eps.len()).filter(|&j| eps[j] > Fraction::ZERO).collect();
        let set = Arc::new(self.psi.set().with(builtin::id())?);
        let old_n = self.psi.num_vars();
        let mut psi = Formula::new(set, old_n + sentinels.len())?;
        for w in self.psi.applications() {
            let name = self.psi.constraint_of(&w.application).name();
            psi.add(name, &w.application.vars, w.weight * scale)?;
        }
        for (slot, &j) in sentinels.iter().enumerate() {
            let weight = (eps[j] * scaled_total).mul_int(scale);
            debug_assert_eq!(weight.denom(), 1);
            let id = psi.set().index_of(ID).expect("added above");
            psi.push(Application::new(id, vec![old_n + slot]), weight.numer())?;
        }

        let witnesses = self
            .witnesses
            .iter()
            .enumerate()
            .map(|(j, w)| {
                let extra = Assignment::new(sentinels.iter().map(|&s| s != j).collect());
                WitnessPair::new(w.base.clone(), w.proof.concat(&extra))
            })
            .collect();
        Ok(DemoInstance {
            class: self.class,
            spec: self.spec,
            psi,
            witnesses,
            alphas: self.alphas.clone(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classify::classify_set;

    #[test]
    fn demos_carry_their_class_and_honest_witnesses() {
        for class in AttackClass::ALL {
            for (n, m) in [(1, 3), (2, 3), (1, 5)] {
                let d = demo(class, n, m).unwrap();
                assert!(classify_set(d.psi.set()).flags.get(class.class()), "{class}");
                for w in &d.witnesses {
                    assert_eq!(d.psi.evaluate(&w.full()).unwrap(), Fraction::ONE, "{class}");
                }
                assert_eq!(d.witnesses.len(), d.alphas.len());
                for (w, a) in d.witnesses.iter().zip(&d.alphas) {
                    assert_eq!(&w.base, a);
                }
            }
        }
    }

    #[test]
    fn even_m_rejected_where_needed() {
        assert!(linear_demo(1, 4).is_err());
        assert!(two_cnf_demo(1, 4).is_err());
        assert!(weakly_positive_demo(1, 4).is_ok());
    }

    #[test]
    fn violations_are_exact() {
        let d = linear_demo(2, 3).unwrap();
        let eps = [Fraction::new(1, 20), Fraction::ZERO, Fraction::new(1, 20)];
        let v = d.with_violations(&eps).unwrap();
        for (w, e) in v.witnesses.iter().zip(eps) {
            assert_eq!(v.psi.evaluate(&w.full()).unwrap().complement(), e);
        }
        assert!(d.with_violations(&[Fraction::new(1, 2); 3]).is_err());
        assert!(d.with_violations(&[Fraction::ZERO; 2]).is_err());
    }

    #[test]
    fn negation_maps_reserved_names() {
        let d = weakly_negative_demo(1, 3).unwrap();
        assert!(d.psi.set().contains(NOT));
        assert!(d.psi.set().contains("NEG_OREQ"));
    }

    #[test]
    fn attacks_succeed_on_demos() {
        use crate::adversary::run_attack;
        for class in AttackClass::ALL {
            let d = demo(class, 1, 3).unwrap();
            let r = run_attack(class, &d.psi, &d.witnesses, &d.alphas).unwrap();
            assert_eq!(r.satisfied_fraction_pruned, Fraction::ONE);
            assert_eq!(r.pruned_weight_fraction, Fraction::ONE, "{class}");
            assert!(r.min_distance.unwrap() > Fraction::ZERO, "{class} {:?}", r.distances);
        }
        let d = linear_demo(2, 3).unwrap();
        let r = run_attack(d.class, &d.psi, &d.witnesses, &d.alphas).unwrap();
        assert_eq!(r.beta.to_string(), "111111");
        assert!(r.distances.iter().all(|&x| x == Fraction::new(2, 3)));
    }

    #[test]
    fn attacks_with_violations_meet_the_bound() {
        use crate::adversary::run_attack;
        for class in AttackClass::ALL {
            let d = demo(class, 1, 3).unwrap();
            let mut eps = vec![Fraction::ZERO; d.witnesses.len()];
            eps[0] = Fraction::new(1, 20);
            eps[1] = Fraction::new(1, 30);
            let v = d.with_violations(&eps).unwrap();
            let r = run_attack(class, &v.psi, &v.witnesses, &v.alphas).unwrap();
            assert_eq!(r.epsilon_per_witness, eps, "{class}");
            assert!(r.satisfied_fraction_original >= r.bound);
        }
    }
}
