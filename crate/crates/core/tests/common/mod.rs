//! Generators and naive reference checks shared by the integration tests.
#![allow(dead_code)]

use std::sync::Arc;

use dichotomy::classify::Polymorphism;
use dichotomy::constraint::{Constraint, ConstraintSet};
use dichotomy::formula::{Application, Assignment, Formula};
use dichotomy::fraction::Fraction;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

/// Every truth table of arity 1, 2 and 3, named `T<arity>_<index>`.
pub fn all_small_tables() -> Vec<Constraint> {
    let mut out = Vec::new();
    for k in 1..=3usize {
        for t in 0..(1u64 << (1 << k)) {
            out.push(Constraint::from_fn(&format!("T{k}_{t}"), k, |p| t >> p & 1 == 1).unwrap());
        }
    }
    out
}

fn op(p: Polymorphism, xs: &[u64]) -> u64 {
    match p {
        Polymorphism::And2 => xs[0] & xs[1],
        Polymorphism::Or2 => xs[0] | xs[1],
        Polymorphism::Xor3 => xs[0] ^ xs[1] ^ xs[2],
        Polymorphism::Maj3 => (xs[0] & xs[1]) | (xs[1] & xs[2]) | (xs[0] & xs[2]),
    }
}

/// Closure over all ordered tuples of satisfying points.
pub fn naive_closed(c: &Constraint, p: Polymorphism) -> bool {
    let sats: Vec<u64> = (0..1u64 << c.arity()).filter(|&x| c.accepts(x)).collect();
    let width = if matches!(p, Polymorphism::And2 | Polymorphism::Or2) { 2 } else { 3 };
    let mut idx = vec![0usize; width];
    if sats.is_empty() {
        return true;
    }
    loop {
        let xs: Vec<u64> = idx.iter().map(|&i| sats[i]).collect();
        if !c.accepts(op(p, &xs)) {
            return false;
        }
        let mut pos = 0;
        loop {
            if pos == width {
                return true;
            }
            idx[pos] += 1;
            if idx[pos] < sats.len() {
                break;
            }
            idx[pos] = 0;
            pos += 1;
        }
    }
}

/// A random affine relation: the solutions of up to `arity` random parity
/// equations (possibly none, possibly inconsistent).
pub fn affine_constraint(rng: &mut StdRng, name: &str, arity: usize) -> Constraint {
    let eqs: Vec<(u64, bool)> = (0..rng.gen_range(0..=arity))
        .map(|_| (rng.gen_range(1..1u64 << arity), rng.gen()))
        .collect();
    Constraint::from_fn(name, arity, |x| {
        eqs.iter().all(|&(mask, rhs)| ((x & mask).count_ones() % 2 == 1) == rhs)
    })
    .unwrap()
}

/// A random constraint whose table has the given value at all-zeros
/// (`zero`) and/or all-ones (`one`) when those are `Some`.
pub fn random_constraint(
    rng: &mut StdRng,
    name: &str,
    arity: usize,
    zero: Option<bool>,
    one: Option<bool>,
) -> Constraint {
    let mut table: u64 = rng.gen::<u64>() & ((1u64 << (1 << arity)) - 1);
    let top = (1u64 << arity) - 1;
    if let Some(z) = zero {
        table = (table & !1) | z as u64;
    }
    if let Some(o) = one {
        table = (table & !(1 << top)) | (o as u64) << top;
    }
    Constraint::from_fn(name, arity, |p| table >> p & 1 == 1).unwrap()
}

pub fn random_formula(rng: &mut StdRng, set: Arc<ConstraintSet>, n: usize, apps: usize, max_weight: u64) -> Formula {
    let mut phi = Formula::new(Arc::clone(&set), n).unwrap();
    for _ in 0..apps {
        let ci = rng.gen_range(0..set.len());
        let k = set.get(ci).unwrap().arity();
        let vars = (0..k).map(|_| rng.gen_range(0..n)).collect();
        phi.push(Application::new(ci, vars), rng.gen_range(1..=max_weight)).unwrap();
    }
    phi
}

/// Maximum satisfied fraction by plain enumeration through `evaluate`.
pub fn naive_max(phi: &Formula) -> Fraction {
    (0..1u64 << phi.num_vars())
        .map(|x| phi.evaluate(&Assignment::from_index(x, phi.num_vars())).unwrap())
        .max()
        .unwrap()
}

pub fn naive_satisfying(phi: &Formula) -> Vec<Assignment> {
    (0..1u64 << phi.num_vars())
        .map(|x| Assignment::from_index(x, phi.num_vars()))
        .filter(|a| phi.evaluate(a).unwrap() == Fraction::ONE)
        .collect()
}

pub fn bits(s: &str) -> Assignment {
    s.parse().unwrap()
}
