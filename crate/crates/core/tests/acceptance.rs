//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
//! failure. Run with `cargo test --test acceptance`.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::Arc;
use std::time::{Duration, Instant};

use common::*;
use dichotomy::adversary::{
    canonical_pairs, combine_and, combine_majority, combine_or, combine_xor, demo, gen_onehot_formula, run_attack,
    AttackClass, AttackResult, BlockSpec, Mode, SymMatrix,
};
use dichotomy::classify::{classify_constraint, classify_set, closed_under, Class, Verdict};
use dichotomy::clauses::{synthesize_clauses, Family};
use dichotomy::constraint::{builtin, Constraint, ConstraintSet};
use dichotomy::formula::{Application, Assignment, Formula};
use dichotomy::fraction::Fraction;
use dichotomy::gadget::{one_in_three_clause_library, reduce_3sat, search_gadget, verify_perfect, Gadget};
use dichotomy::oracle::{self, DEFAULT_N_MAX};
use rand::Rng;

type Check = std::result::Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn criterion(id: usize, name: &str, limit: Duration, f: impl FnOnce() -> Check) -> bool {
    let start = Instant::now();
    let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
        let msg = p
            .downcast_ref::<String>()
            .cloned()
            .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
            .unwrap_or_else(|| "panic".into());
        Err(format!("panicked: {msg}"))
    });
    let took = start.elapsed();
    let outcome = match outcome {
        Ok(detail) if took > limit => Err(format!("{detail}; took {took:.2?}, limit {limit:?}")),
        other => other,
    };
    let (tag, detail) = match &outcome {
        Ok(d) => ("PASS", d.as_str()),
        Err(d) => ("FAIL", d.as_str()),
    };
    println!("{tag} [{id}] {name}: {detail} ({took:.2?})");
    outcome.is_ok()
}

/// Multisets of size `m` drawn from `0..n`, as index lists.
fn multisets(n: usize, m: usize) -> Vec<Vec<usize>> {
    fn go(n: usize, m: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == m {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(n, m, i, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(n, m, 0, &mut Vec::new(), &mut out);
    out
}

fn frac(n: u64, d: u64) -> Fraction {
    Fraction::new(n, d)
}

fn cross_validation() -> Check {
    let tables = all_small_tables();
    ensure!(tables.len() == 276, "expected 276 relations, got {}", tables.len());
    let mut mismatches = Vec::new();
    let mut checks = 0;
    for c in &tables {
        for family in Family::ALL {
            let p = family.polymorphism();
            let closed = closed_under(c, p);
            let rep = synthesize_clauses(c, family);
            checks += 1;
            if rep.is_some() != closed || closed != naive_closed(c, p) {
                mismatches.push(format!("{}/{family}", c.name()));
            }
            if let Some(rep) = rep {
                let defines = (0..1u64 << c.arity()).all(|x| rep.holds(x) == c.accepts(x));
                if !defines || !rep.well_shaped() {
                    mismatches.push(format!("{}/{family} representation", c.name()));
                }
            }
        }
    }
    ensure!(mismatches.is_empty(), "{} mismatches: {:?}", mismatches.len(), &mismatches[..mismatches.len().min(5)]);
    Ok(format!("276 relations x 4 families, {checks} agreements, 0 mismatches"))
}

fn reference_classifications() -> Check {
    let two_lin = ConstraintSet::new(vec![
        Constraint::from_table("f1", "0110").unwrap(),
        Constraint::from_table("f2", "1001").unwrap(),
    ])
    .unwrap();
    let r = classify_set(&two_lin);
    ensure!(
        r.verdict == Verdict::Polynomial(vec![Class::Linear, Class::TwoCnf]),
        "2LIN verdict {}",
        r.verdict
    );
    ensure!(r.flags.get(Class::CClosed), "2LIN not c-closed");

    let hard = classify_set(&ConstraintSet::new(vec![builtin::one_in_three()]).unwrap());
    ensure!(hard.verdict == Verdict::NpHard, "ONE_IN_THREE verdict {}", hard.verdict);
    ensure!(hard.verdict.statement() == "NP-hard (Schaefer)", "statement");

    let common = [Class::Linear, Class::WeaklyPositive, Class::WeaklyNegative, Class::TwoCnf];
    for (c, extra) in [(builtin::id(), Class::OneValid), (builtin::not(), Class::ZeroValid)] {
        let got = classify_constraint(&c);
        let expect: Vec<Class> = Class::ALL.into_iter().filter(|k| common.contains(k) || *k == extra).collect();
        ensure!(got.holding() == expect, "{} flags {:?}", c.name(), got.holding());
        let set = classify_set(&ConstraintSet::new(vec![c.clone()]).unwrap());
        ensure!(set.flags == got, "{} set flags differ", c.name());
    }
    Ok("2LIN polynomial(linear, 2cnf) c-closed; ONE_IN_THREE np-hard; ID and NOT flags exact".into())
}

fn combination_lemmas() -> Check {
    let mut checked = 0u64;
    let mut violations = Vec::new();
    for c in all_small_tables() {
        let flags = classify_constraint(&c);
        let k = c.arity();
        let sats: Vec<Assignment> = (0..1u64 << k)
            .filter(|&x| c.accepts(x))
            .map(|x| Assignment::from_index(x, k))
            .collect();
        if sats.is_empty() {
            continue;
        }
        let ok = |a: &Assignment| c.accepts(a.to_index().unwrap());
        let pick = |idx: &[usize]| idx.iter().map(|&i| sats[i].clone()).collect::<Vec<_>>();
        if flags.get(Class::Linear) {
            for m in [1, 3, 5] {
                for idx in multisets(sats.len(), m) {
                    checked += 1;
                    if !ok(&combine_xor(&pick(&idx)).unwrap()) {
                        violations.push(format!("{} xor {idx:?}", c.name()));
                    }
                }
            }
        }
        let subsets = || {
            (1u64..1 << sats.len()).map(|mask| (0..sats.len()).filter(|&i| mask >> i & 1 == 1).collect::<Vec<_>>())
        };
        if flags.get(Class::WeaklyPositive) {
            for idx in subsets() {
                checked += 1;
                if !ok(&combine_or(&pick(&idx)).unwrap()) {
                    violations.push(format!("{} or {idx:?}", c.name()));
                }
            }
        }
        if flags.get(Class::WeaklyNegative) {
            for idx in subsets() {
                checked += 1;
                if !ok(&combine_and(&pick(&idx)).unwrap()) {
                    violations.push(format!("{} and {idx:?}", c.name()));
                }
            }
        }
        if flags.get(Class::TwoCnf) {
            for idx in multisets(sats.len(), 3) {
                checked += 1;
                let p = pick(&idx);
                if !ok(&combine_majority(&p[0], &p[1], &p[2]).unwrap()) {
                    violations.push(format!("{} maj {idx:?}", c.name()));
                }
            }
        }
    }
    ensure!(violations.is_empty(), "{} violations: {:?}", violations.len(), &violations[..violations.len().min(5)]);
    Ok(format!("{checked} combinations, 0 violations"))
}

/// All 2^count patterns of epsilons drawn from {0, eps}.
fn epsilon_patterns(count: usize, eps: Fraction) -> Vec<Vec<Fraction>> {
    (0u32..1 << count)
        .map(|mask| (0..count).map(|j| if mask >> j & 1 == 1 { eps } else { Fraction::ZERO }).collect())
        .collect()
}

fn check_common(r: &AttackResult, eps: &[Fraction]) -> std::result::Result<(), String> {
    ensure!(r.satisfied_fraction_pruned == Fraction::ONE, "pruned fraction {}", r.satisfied_fraction_pruned);
    // Recheck the pruned formula directly.
    for (i, w) in r.pruned.applications().iter().enumerate() {
        let c = r.pruned.constraint_of(&w.application);
        ensure!(w.application.holds(c, r.combined.bits()), "pruned application {i} violated");
    }
    ensure!(r.epsilon_per_witness == eps, "epsilons {:?} != injected {:?}", r.epsilon_per_witness, eps);
    let sum: Fraction = eps.iter().copied().sum();
    ensure!(
        r.satisfied_fraction_original >= sum.complement(),
        "original {} below 1 - {sum}",
        r.satisfied_fraction_original
    );
    Ok(())
}

fn linear_demo() -> Check {
    let base = demo::linear_demo(2, 3).map_err(|e| e.to_string())?;
    let mut worst = Fraction::ONE;
    for eps in epsilon_patterns(3, frac(1, 20)) {
        let d = base.with_violations(&eps).map_err(|e| e.to_string())?;
        let r = run_attack(AttackClass::Linear, &d.psi, &d.witnesses, &d.alphas).map_err(|e| e.to_string())?;
        check_common(&r, &eps)?;
        ensure!(r.beta == Assignment::ones(6), "beta {}", r.beta);
        ensure!(r.distances.iter().all(|&x| x == frac(2, 3)), "distances {:?}", r.distances);
        // beta stays far from every satisfying one-hot assignment too.
        let (phi, _) = gen_onehot_formula(&BlockSpec::new(2, 3, Mode::Pairwise).unwrap()).unwrap();
        let far = oracle::distance_to_satisfying(&phi, &r.beta, DEFAULT_N_MAX).unwrap();
        ensure!(far == Some(frac(2, 3)), "distance to nearest one-hot assignment {far:?}");
        worst = worst.min(r.satisfied_fraction_original);
    }
    Ok(format!("8 epsilon patterns over {{0, 1/20}}; pruned 1/1, distances 2/3, worst original {worst}"))
}

fn horn_demos() -> Check {
    let mut runs = 0;
    for (class, beta) in [
        (AttackClass::WeaklyPositive, Assignment::ones(6)),
        (AttackClass::WeaklyNegative, Assignment::zeros(6)),
    ] {
        let base = demo::demo(class, 2, 3).map_err(|e| e.to_string())?;
        ensure!(classify_set(base.psi.set()).flags.get(class.class()), "{class} demo set lacks the flag");
        for eps in epsilon_patterns(3, frac(1, 20)) {
            let d = base.with_violations(&eps).map_err(|e| e.to_string())?;
            let r = run_attack(class, &d.psi, &d.witnesses, &d.alphas).map_err(|e| e.to_string())?;
            check_common(&r, &eps)?;
            ensure!(r.beta == beta, "{class} beta {}", r.beta);
            ensure!(r.distances.iter().all(|&x| x == frac(2, 3)), "{class} distances {:?}", r.distances);
            runs += 1;
        }
    }
    Ok(format!("{runs} runs (OR over dual-Horn, AND over negated encoding); pruned 1/1 each"))
}

fn two_cnf_demo() -> Check {
    let base = demo::two_cnf_demo(1, 3).map_err(|e| e.to_string())?;
    let mut classes_seen = 0;
    let patterns = [vec![Fraction::ZERO; 6], {
        let mut e = vec![Fraction::ZERO; 6];
        e[1] = frac(1, 20);
        e[4] = frac(1, 20);
        e
    }];
    for eps in patterns {
        let d = base.with_violations(&eps).map_err(|e| e.to_string())?;
        let r = run_attack(AttackClass::TwoCnf, &d.psi, &d.witnesses, &d.alphas).map_err(|e| e.to_string())?;
        check_common(&r, &eps)?;
        ensure!(r.min_distance == Some(frac(1, 3)), "min distance {:?}", r.min_distance);
        let bound = eps.iter().copied().max().unwrap().mul_int(6).complement();
        ensure!(r.satisfied_fraction_original >= bound, "below 1 - m(m+1)/2 max eps");
        let classes = r.matrix_classes.as_ref().ok_or("no matrix classes reported")?;
        for cl in classes {
            classes_seen += 1;
            for j in 1..=3 {
                let dj = SymMatrix::d(3, j);
                ensure!(
                    !(dj.le(&cl.matrix) && cl.matrix.le(&dj.complement())),
                    "class {} sits between D^{j} and its complement",
                    cl.matrix
                );
            }
            if let Some(other) = classes.iter().find(|o| o.matrix == cl.matrix.complement()) {
                ensure!(other.value != cl.value, "complement classes {} share a value", cl.matrix);
            }
            for &v in &cl.members {
                ensure!(r.combined.get(v - 1) == cl.value, "member {v} of {} has the wrong value", cl.matrix);
            }
        }
        for ((j, k), dist) in canonical_pairs(3).into_iter().zip(&r.distances) {
            let expect = if j < k { frac(1, 3) } else { frac(2, 3) };
            ensure!(*dist == expect, "distance to alpha_({j},{k}) is {dist}");
        }
        let (phi, _) = gen_onehot_formula(&BlockSpec::new(1, 3, Mode::Triplewise).unwrap()).unwrap();
        let far = oracle::distance_to_satisfying(&phi, &r.beta, DEFAULT_N_MAX).unwrap();
        ensure!(far == Some(frac(1, 3)), "distance to nearest satisfying assignment {far:?}");
    }
    Ok(format!(
        "pruned 1/1; {classes_seen} classes checked, none between D^j and 1-D^j, complements opposite; \
         distance 1/3 to every alpha_(j,k) with j<k (2/3 for j=k)"
    ))
}

fn linear_vs_oracle() -> Check {
    let mut r = rng(7);
    let (mut sat, mut unsat) = (0, 0);
    for case in 0..1200 {
        let n = r.gen_range(1..=12);
        let cs: Vec<Constraint> = (0..r.gen_range(1..=4))
            .map(|i| {
                let k = r.gen_range(1..=3);
                affine_constraint(&mut r, &format!("L{i}"), k)
            })
            .collect();
        let set = Arc::new(ConstraintSet::new(cs).unwrap());
        let apps = r.gen_range(1..=2 * n);
        let phi = random_formula(&mut r, set, n, apps, 3);
        let best = oracle::max_sat(&phi, DEFAULT_N_MAX).unwrap().fraction;
        let solved = oracle::linear_attack(&phi).map_err(|e| e.to_string())?;
        ensure!(solved.is_some() == (best == Fraction::ONE), "case {case}: attack {solved:?}, oracle max {best}");
        if let Some(x) = solved {
            ensure!(phi.evaluate(&x).unwrap() == Fraction::ONE, "case {case}: solution {x} not satisfying");
            sat += 1;
        } else {
            unsat += 1;
        }
    }
    Ok(format!("1200 formulas ({sat} satisfiable, {unsat} not), 0 disagreements"))
}

/// Direct definition of a perfect gadget, independent of the bitset code.
fn naive_perfect(g: &Gadget, s: &ConstraintSet) -> bool {
    let r = g.target.arity();
    (0..1u64 << r).all(|x| {
        let extends = (0..1u64 << g.aux_count).any(|aux| {
            let full = Assignment::from_index(x | aux << r, r + g.aux_count);
            g.applications.iter().all(|a| a.holds(s.get(a.constraint).unwrap(), full.bits()))
        });
        extends == g.target.accepts(x)
    })
}

fn clause_corpus() -> Vec<Formula> {
    let (_, lib) = one_in_three_clause_library();
    let clauses: Vec<Constraint> = (1..=3)
        .flat_map(|k| (0..1u64 << k).map(move |neg| builtin::clause(k, neg)))
        .collect();
    let set = Arc::new(ConstraintSet::new(clauses).unwrap());
    let lit = |name: &str| set.index_of(name).unwrap();
    let fixed: Vec<(usize, Vec<(&str, Vec<usize>)>)> = vec![
        (1, vec![("CL1_p", vec![0]), ("CL1_n", vec![0])]),
        (2, vec![("CL2_pp", vec![0, 1]), ("CL1_n", vec![0]), ("CL1_n", vec![1])]),
        (2, vec![("CL2_nn", vec![0, 1]), ("CL1_p", vec![0]), ("CL1_p", vec![1])]),
        (3, vec![("CL3_ppp", vec![0, 1, 2]), ("CL1_n", vec![0]), ("CL1_n", vec![1]), ("CL1_n", vec![2])]),
    ];
    let mut corpus = Vec::new();
    for (n, apps) in fixed {
        let mut phi = Formula::new(Arc::clone(&set), n).unwrap();
        for (name, vars) in apps {
            phi.push(Application::new(lit(name), vars), 1).unwrap();
        }
        corpus.push(phi);
    }
    // Random clause formulas, kept small enough that the reduced formula
    // stays within brute-force reach.
    let mut r = rng(2024);
    while corpus.len() < 20 {
        let n = r.gen_range(2..=8);
        let mut phi = Formula::new(Arc::clone(&set), n).unwrap();
        let mut total = n;
        for _ in 0..8 {
            let k = r.gen_range(1..=3.min(n));
            let mut vars: Vec<usize> = Vec::new();
            while vars.len() < k {
                let v = r.gen_range(0..n);
                if !vars.contains(&v) {
                    vars.push(v);
                }
            }
            let neg = r.gen_range(0..1u64 << k);
            let c = builtin::clause(k, neg);
            let aux = lib.get(&c).unwrap().aux_count;
            if total + aux > 20 {
                continue;
            }
            total += aux;
            phi.push(Application::new(lit(c.name()), vars), 1).unwrap();
        }
        if !phi.is_empty() {
            corpus.push(phi);
        }
    }
    corpus
}

fn gadget_suite() -> Check {
    let s = ConstraintSet::new(vec![builtin::one_in_three()]).unwrap();
    let app = |v: &[usize]| Application::new(0, v.to_vec());
    let and_not = Gadget {
        target: Constraint::from_table("AND_X_NOT_Y", "0100").unwrap(),
        aux_count: 0,
        applications: vec![app(&[0, 1, 1])],
    };
    let nand = Gadget {
        target: builtin::nand2(),
        aux_count: 1,
        applications: vec![app(&[0, 1, 2])],
    };
    for g in [&and_not, &nand] {
        ensure!(verify_perfect(g, &s, DEFAULT_N_MAX).unwrap(), "{} rejected", g.target.name());
        ensure!(naive_perfect(g, &s), "{} fails the direct check", g.target.name());
    }

    let found = search_gadget(&builtin::nand2(), &s, 1, 1).unwrap().ok_or("no NAND gadget within (1, 1)")?;
    ensure!(naive_perfect(&found, &s), "searched NAND gadget fails the direct check");
    let or2 = search_gadget(&builtin::or2(), &s, 5, 4).unwrap().ok_or("no OR2 gadget within (5, 4)")?;
    ensure!(naive_perfect(&or2, &s), "searched OR2 gadget fails the direct check");
    let or_set = ConstraintSet::new(vec![builtin::or2()]).unwrap();
    ensure!(search_gadget(&builtin::xor2(), &or_set, 3, 6).unwrap().is_none(), "XOR2 over {{OR2}} found");

    let (lib_set, lib) = one_in_three_clause_library();
    for g in lib.iter() {
        ensure!(naive_perfect(g, &lib_set), "library gadget {} not perfect", g.target.name());
    }
    let corpus = clause_corpus();
    let (mut sat, mut max_vars) = (0, 0);
    for (i, phi) in corpus.iter().enumerate() {
        ensure!(phi.num_vars() <= 8, "corpus formula {i} has {} variables", phi.num_vars());
        let before = naive_max(phi) == Fraction::ONE;
        let reduced = reduce_3sat(phi, Arc::clone(&lib_set), &lib).map_err(|e| e.to_string())?;
        max_vars = max_vars.max(reduced.num_vars());
        let after = oracle::max_sat(&reduced, DEFAULT_N_MAX).unwrap().fraction == Fraction::ONE;
        ensure!(before == after, "formula {i}: satisfiable {before} before, {after} after");
        sat += before as usize;
    }
    ensure!(sat > 0 && sat < corpus.len(), "corpus needs both outcomes, got {sat} satisfiable");
    Ok(format!(
        "fixed gadgets verified; NAND ({}, {}), OR2 ({}, {}) found; XOR2 over {{OR2}} none; \
         {} formulas ({sat} satisfiable) preserved, reduced size up to {max_vars} variables",
        found.aux_count,
        found.applications.len(),
        or2.aux_count,
        or2.applications.len(),
        corpus.len()
    ))
}

fn constant_classes() -> Check {
    let mut r = rng(99);
    for (value, class) in [(true, Class::OneValid), (false, Class::ZeroValid)] {
        for case in 0..100 {
            let cs: Vec<Constraint> = (0..r.gen_range(1..=3))
                .map(|i| {
                    let k = r.gen_range(1..=3);
                    let (zero, one) = if value { (None, Some(true)) } else { (Some(true), None) };
                    random_constraint(&mut r, &format!("C{i}"), k, zero, one)
                })
                .collect();
            let set = Arc::new(ConstraintSet::new(cs).unwrap());
            ensure!(classify_set(&set).flags.get(class), "case {case}: set not {class}");
            let n = r.gen_range(1..=16);
            let apps = r.gen_range(1..=20);
            let phi = random_formula(&mut r, set, n, apps, 5);
            let constant = if value { Assignment::ones(n) } else { Assignment::zeros(n) };
            ensure!(phi.evaluate(&constant).unwrap() == Fraction::ONE, "case {case}: constant assignment fails");
        }
    }
    Ok("100 formulas over 1-valid sets and 100 over 0-valid sets; 0 violations".into())
}

fn main() {
    let secs = Duration::from_secs;
    let results = [
        criterion(1, "classifier cross-validation", secs(10), cross_validation),
        criterion(2, "reference classifications", secs(10), reference_classifications),
        criterion(3, "combination lemmas, exhaustive", secs(30), combination_lemmas),
        criterion(4, "linear demo (n=2, m=3)", secs(1), linear_demo),
        criterion(5, "dual-Horn and Horn demos", secs(1), horn_demos),
        criterion(6, "2CNF demo (n=1, m=3)", secs(1), two_cnf_demo),
        criterion(7, "linear attack vs oracle", secs(30), linear_vs_oracle),
        criterion(8, "gadget suite", secs(120), gadget_suite),
        criterion(9, "constant-class sanity", secs(10), constant_classes),
    ];
    let failed = results.iter().filter(|&&ok| !ok).count();
    println!("{} of {} criteria passed", results.len() - failed, results.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
