//! Seeded random corpora and the brute-force agreement suites.
//!
//! Everything here is deterministic given the seed, so a failing case can be
//! replayed by number.  The generators deliberately stay inside the default
//! resource caps: small signatures, shallow terms, term sets of at most six
//! elements, structures of at most four.

use crate::qe::{close_congruence, ElementaryExistential, Partition};
use crate::structures::{
    extension_witness_blind, extension_witness_constructive, FiniteStructure,
};
use crate::syntax::{Formula, Signature, SymbolKind, Term};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;

/// A random signature with one or two symbols of arity at most two.
pub fn random_signature(rng: &mut impl Rng) -> Signature {
    let mut sig = Signature::new();
    let n = rng.gen_range(1..=2);
    let fun_names = ["F", "G"];
    let rel_names = ["P", "R"];
    for i in 0..n {
        let arity = rng.gen_range(0..=2);
        if rng.gen_bool(0.6) {
            sig = sig.with_fun(fun_names[i], arity);
        } else {
            sig = sig.with_rel(rel_names[i], arity);
        }
    }
    sig
}

/// A random term over the given variables, at most `depth` applications deep.
pub fn random_term(sig: &Signature, vars: &[&str], depth: usize, rng: &mut impl Rng) -> Term {
    let funs: Vec<(String, usize)> = sig
        .functions()
        .map(|(n, k)| (n.to_string(), k))
        .collect();
    let pick_var = |rng: &mut dyn rand::RngCore| -> Term {
        Term::var(*vars.choose(rng).expect("variable pool must be nonempty"))
    };
    if depth == 0 || funs.is_empty() || rng.gen_bool(0.4) {
        return pick_var(rng);
    }
    let (name, arity) = funs.choose(rng).unwrap().clone();
    let args = (0..arity)
        .map(|_| random_term(sig, vars, depth - 1, rng))
        .collect();
    Term::app(name, args)
}

fn random_atom(sig: &Signature, vars: &[&str], rng: &mut impl Rng) -> Formula {
    let rels: Vec<(String, usize)> = sig
        .relations()
        .map(|(n, k)| (n.to_string(), k))
        .collect();
    if !rels.is_empty() && rng.gen_bool(0.4) {
        let (name, arity) = rels.choose(rng).unwrap().clone();
        let args = (0..arity)
            .map(|_| random_term(sig, vars, 1, rng))
            .collect();
        Formula::rel(name, args)
    } else {
        Formula::eq(
            random_term(sig, vars, 1, rng),
            random_term(sig, vars, 1, rng),
        )
    }
}

/// A random quantifier-free formula with at most `size` connectives.
pub fn random_qf_formula(
    sig: &Signature,
    vars: &[&str],
    size: usize,
    rng: &mut impl Rng,
) -> Formula {
    if size == 0 || rng.gen_bool(0.3) {
        return random_atom(sig, vars, rng);
    }
    match rng.gen_range(0..5) {
        0 => Formula::not(random_qf_formula(sig, vars, size - 1, rng)),
        1 => Formula::and(
            random_qf_formula(sig, vars, size / 2, rng),
            random_qf_formula(sig, vars, size / 2, rng),
        ),
        2 => Formula::or(
            random_qf_formula(sig, vars, size / 2, rng),
            random_qf_formula(sig, vars, size / 2, rng),
        ),
        3 => Formula::imp(
            random_qf_formula(sig, vars, size / 2, rng),
            random_qf_formula(sig, vars, size / 2, rng),
        ),
        _ => Formula::iff(
            random_qf_formula(sig, vars, size / 2, rng),
            random_qf_formula(sig, vars, size / 2, rng),
        ),
    }
}

/// A random formula that quantifies some of its variables; the rest stay
/// free.
pub fn random_formula(
    sig: &Signature,
    vars: &[&str],
    size: usize,
    rng: &mut impl Rng,
) -> Formula {
    let mut f = random_qf_formula(sig, vars, size, rng);
    let mut pool: Vec<&str> = vars.to_vec();
    pool.shuffle(rng);
    let quantified = rng.gen_range(0..=pool.len());
    for v in &pool[..quantified] {
        f = if rng.gen_bool(0.5) {
            Formula::exists(*v, f)
        } else {
            Formula::forall(*v, f)
        };
    }
    f
}

/// A random sentence: every variable ends up quantified.
pub fn random_sentence(sig: &Signature, vars: &[&str], size: usize, rng: &mut impl Rng) -> Formula {
    let mut f = random_qf_formula(sig, vars, size, rng);
    let mut pool: Vec<&str> = vars.to_vec();
    pool.shuffle(rng);
    for v in pool {
        f = if rng.gen_bool(0.5) {
            Formula::exists(v, f)
        } else {
            Formula::forall(v, f)
        };
    }
    f
}

/// A random structure of the given size with uniformly random tables.
pub fn random_structure(sig: &Signature, size: usize, rng: &mut impl Rng) -> FiniteStructure {
    let mut m = FiniteStructure::new(sig.clone(), size)
        .expect("caller picks a size admissible for the signature");
    let names: Vec<(String, SymbolKind, usize)> = sig
        .symbols()
        .map(|(n, k, a)| (n.to_string(), k, a))
        .collect();
    for (name, kind, arity) in names {
        for tuple in crate::structures::tuples(size, arity) {
            match kind {
                SymbolKind::Function => {
                    let v = rng.gen_range(0..size);
                    m.set_fun(&name, &tuple, v).unwrap();
                }
                SymbolKind::Relation => {
                    m.set_rel(&name, &tuple, rng.gen_bool(0.5)).unwrap();
                }
            }
        }
    }
    m
}

/// A random elementary existential formula: a subterm-closed term set grown
/// from the variables, a random admissible partition (random labels repaired
/// by congruence closure), and random literal bits.
pub fn random_elementary(
    sig: &Signature,
    free_vars: &[&str],
    bound_vars: &[&str],
    max_terms: usize,
    rng: &mut impl Rng,
) -> ElementaryExistential {
    let all_vars: Vec<&str> = free_vars.iter().chain(bound_vars).copied().collect();
    let mut theta: Vec<Term> = all_vars.iter().map(|v| Term::var(*v)).collect();
    theta.sort();
    theta.dedup();
    let funs: Vec<(String, usize)> = sig
        .functions()
        .map(|(n, k)| (n.to_string(), k))
        .collect();
    if !funs.is_empty() {
        for _ in 0..max_terms * 2 {
            if theta.len() >= max_terms {
                break;
            }
            let (name, arity) = funs.choose(rng).unwrap().clone();
            let args: Vec<Term> = (0..arity)
                .map(|_| theta.choose(rng).unwrap().clone())
                .collect();
            let t = Term::app(name, args);
            if !theta.contains(&t) {
                theta.push(t);
            }
        }
    }
    theta.sort();

    let labels: Vec<usize> = (0..theta.len())
        .map(|_| rng.gen_range(0..theta.len().max(1)))
        .collect();
    let p = close_congruence(&theta, &Partition::from_block_of(&labels));

    let mut epsilon: BTreeMap<(String, Vec<usize>), bool> = BTreeMap::new();
    for (rel, arity) in sig.relations() {
        for tuple in crate::structures::tuples(p.num_blocks(), arity) {
            epsilon.insert((rel.to_string(), tuple), rng.gen_bool(0.5));
        }
    }

    ElementaryExistential::new(
        sig,
        free_vars.iter().map(|s| s.to_string()).collect(),
        bound_vars.iter().map(|s| s.to_string()).collect(),
        theta,
        p,
        epsilon,
    )
    .expect("generated descriptions satisfy the invariants by construction")
}

/// One extension-oracle case: random signature, structure, tuple, and
/// description; passes when the resultant's verdict, the constructive
/// witness, and the blind search all agree (witnesses are additionally validated
/// internally against the matrix).
pub fn res_oracle_case(rng: &mut impl Rng) -> bool {
    let sig = random_signature(rng);
    let size = rng.gen_range(1..=4);
    let m = random_structure(&sig, size, rng);
    let free: &[&str] = if rng.gen_bool(0.5) { &["x"] } else { &["x", "y"] };
    let bound: &[&str] = if rng.gen_bool(0.7) { &["z"] } else { &["z", "w"] };
    let e = random_elementary(&sig, free, bound, 6, rng);
    let u: Vec<usize> = free.iter().map(|_| rng.gen_range(0..size)).collect();

    let star = crate::qe::compute_star(&e);
    let env: BTreeMap<String, usize> = free
        .iter()
        .map(|s| s.to_string())
        .zip(u.iter().copied())
        .collect();
    let predicted = m
        .eval_formula(&star.formula, &env)
        .expect("the resultant is a formula over the free variables");

    let constructive = extension_witness_constructive(&m, &u, &e)
        .expect("generated inputs satisfy the preconditions");
    let blind =
        extension_witness_blind(&m, &u, &e).expect("generated inputs satisfy the preconditions");
    let witnesses_extend = constructive
        .iter()
        .chain(blind.iter())
        .all(|w| m.is_substructure_of(&w.structure));
    constructive.is_some() == predicted && blind.is_some() == predicted && witnesses_extend
}

/// Runs `cases` extension-oracle cases from `seed`; returns the number that
/// passed.
pub fn run_res_oracle(cases: usize, seed: u64) -> usize {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..cases).filter(|_| res_oracle_case(&mut rng)).count()
}

/// A random universally quantified sentence whose subterm closure (prefix
/// variables included) stays within `max_subterms` terms, drawn by
/// rejection.
pub fn random_universal_sentence(
    sig: &Signature,
    max_subterms: usize,
    rng: &mut impl Rng,
) -> Formula {
    loop {
        let vars: &[&str] = if rng.gen_bool(0.5) { &["x"] } else { &["x", "y"] };
        let matrix = random_qf_formula(sig, vars, 3, rng);
        let mut seed: Vec<Term> = matrix.atom_terms();
        let prefix: Vec<String> = matrix.free_vars().into_iter().collect();
        seed.extend(prefix.iter().map(Term::var));
        if crate::syntax::subterm_closure(seed).len() > max_subterms {
            continue;
        }
        return Formula::forall_all(&prefix, matrix);
    }
}

/// Cross-checks ground validity of a universal sentence's matrix against
/// exhaustive finite-model search on `cases` sentences; instances whose
/// enumeration would blow the default caps are redrawn, so every counted
/// case ran both routes.  Returns the number that agreed.
pub fn run_universal_oracle(cases: usize, seed: u64) -> usize {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut agreed = 0;
    let mut produced = 0;
    while produced < cases {
        let sig = random_signature(&mut rng);
        let f = random_universal_sentence(&sig, 5, &mut rng);
        let naive = match crate::decide::naive_universal_check(&f) {
            Ok(answer) => answer,
            Err(_) => continue,
        };
        produced += 1;
        let (_, matrix) = f.universal_prefix();
        if crate::euf::ground_valid(matrix) == naive {
            agreed += 1;
        }
    }
    agreed
}
