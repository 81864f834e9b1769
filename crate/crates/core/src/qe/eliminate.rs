//! Decomposition into elementary existential formulas and the elimination
//! driver.
//!
//! A quantifier-free matrix determines, for each admissible partition of its
//! subterm-closed term set and each truth assignment over the classes, a
//! complete description of how the terms could relate; the matrix is
//! equivalent to the disjunction of the realized descriptions.  Elimination
//! replaces each description by its resultant and simplifies.  The
//! description language is inferred from the formula itself, which keeps
//! large ambient signatures out of the enumeration.

use super::{
    compute_star, enumerate_congruences, simplify_open, ElementaryExistential, Partition, QeError,
};
use crate::limits::Limits;
use crate::structures::tuples;
use crate::syntax::{subterm_closure, Formula, Signature, Term};
use std::collections::{BTreeMap, BTreeSet};

/// Runs `found` on every elementary description realizing `psi`, in a
/// deterministic order, without materializing the whole list.
fn decompose_each(
    psi: &Formula,
    free_vars: &[String],
    bound_vars: &[String],
    limits: &Limits,
    found: &mut dyn FnMut(ElementaryExistential),
) -> Result<(), QeError> {
    if !psi.is_quantifier_free() {
        return Err(QeError::NotQuantifierFree);
    }
    let sig = Signature::inferred(psi).map_err(|e| QeError::IllFormed(e.to_string()))?;
    let declared: BTreeSet<&str> = free_vars
        .iter()
        .chain(bound_vars)
        .map(String::as_str)
        .collect();
    for v in psi.free_vars() {
        if !declared.contains(v.as_str()) {
            return Err(QeError::StrayVariable(v));
        }
    }
    let theta = subterm_closure(psi.atom_terms());
    if theta.len() > limits.max_theta {
        return Err(QeError::TooManyTerms {
            got: theta.len(),
            cap: limits.max_theta,
        });
    }
    let index: BTreeMap<&Term, usize> = theta.iter().enumerate().map(|(i, t)| (t, i)).collect();
    let rels: Vec<(String, usize)> = sig
        .relations()
        .map(|(n, k)| (n.to_string(), k))
        .collect();

    let mut budget = limits.max_partitions;
    for p in enumerate_congruences(&theta, limits.max_partitions) {
        let p = p?;
        let keys: Vec<(String, Vec<usize>)> = rels
            .iter()
            .flat_map(|(r, k)| {
                tuples(p.num_blocks(), *k)
                    .into_iter()
                    .map(move |t| (r.clone(), t))
            })
            .collect();
        let key_index: BTreeMap<&(String, Vec<usize>), usize> =
            keys.iter().enumerate().map(|(i, k)| (k, i)).collect();
        let mut bits = vec![false; keys.len()];
        loop {
            if budget == 0 {
                return Err(QeError::TooManyPartitions {
                    cap: limits.max_partitions,
                });
            }
            budget -= 1;
            if eval_description(psi, &index, &p, &key_index, &bits) {
                let epsilon: BTreeMap<(String, Vec<usize>), bool> = keys
                    .iter()
                    .cloned()
                    .zip(bits.iter().copied())
                    .collect();
                let e = ElementaryExistential::new(
                    &sig,
                    free_vars.to_vec(),
                    bound_vars.to_vec(),
                    theta.clone(),
                    p.clone(),
                    epsilon,
                )
                .expect("realized descriptions are valid by construction");
                found(e);
            }
            if !increment(&mut bits) {
                break;
            }
        }
    }
    Ok(())
}

/// Binary odometer over the truth assignment, last key fastest.
fn increment(bits: &mut [bool]) -> bool {
    for b in bits.iter_mut().rev() {
        if !*b {
            *b = true;
            return true;
        }
        *b = false;
    }
    false
}

/// Truth of `psi` under the complete description `(p, bits)`.
fn eval_description(
    f: &Formula,
    index: &BTreeMap<&Term, usize>,
    p: &Partition,
    key_index: &BTreeMap<&(String, Vec<usize>), usize>,
    bits: &[bool],
) -> bool {
    match f {
        Formula::True => true,
        Formula::False => false,
        Formula::Eq(a, b) => p.same(index[a], index[b]),
        Formula::Rel(name, args) => {
            let classes: Vec<usize> = args.iter().map(|a| p.block_of(index[a])).collect();
            bits[key_index[&(name.clone(), classes)]]
        }
        Formula::Not(g) => !eval_description(g, index, p, key_index, bits),
        Formula::And(a, b) => {
            eval_description(a, index, p, key_index, bits)
                && eval_description(b, index, p, key_index, bits)
        }
        Formula::Or(a, b) => {
            eval_description(a, index, p, key_index, bits)
                || eval_description(b, index, p, key_index, bits)
        }
        Formula::Imp(a, b) => {
            !eval_description(a, index, p, key_index, bits)
                || eval_description(b, index, p, key_index, bits)
        }
        Formula::Iff(a, b) => {
            eval_description(a, index, p, key_index, bits)
                == eval_description(b, index, p, key_index, bits)
        }
        Formula::Exists(..) | Formula::Forall(..) => {
            unreachable!("decomposition input is checked quantifier-free")
        }
    }
}

/// Every elementary existential formula over `psi`'s own terms and relations
/// that realizes `psi`.  Their disjunction (under the bound-variable prefix)
/// is logically equivalent to `psi`.
pub fn elementary_decomposition(
    psi: &Formula,
    free_vars: &[String],
    bound_vars: &[String],
    limits: &Limits,
) -> Result<Vec<ElementaryExistential>, QeError> {
    let mut out = Vec::new();
    decompose_each(psi, free_vars, bound_vars, limits, &mut |e| out.push(e))?;
    Ok(out)
}

/// Replaces `∃y psi` by a quantifier-free equivalent: the simplified
/// disjunction of the resultants of the realized descriptions.
pub fn eliminate_one(
    psi: &Formula,
    free_vars: &[String],
    y: &str,
    limits: &Limits,
) -> Result<Formula, QeError> {
    let mut stars: BTreeSet<Formula> = BTreeSet::new();
    decompose_each(psi, free_vars, &[y.to_string()], limits, &mut |e| {
        stars.insert(compute_star(&e).formula);
    })?;
    Ok(simplify_open(&Formula::or_all(stars)))
}

/// Full quantifier elimination, innermost quantifier first; universals go
/// through their existential duals.  The output is quantifier-free, mentions
/// only free variables of the input, and is equivalent to it modulo the
/// theory of existentially closed structures.
pub fn eliminate(f: &Formula, limits: &Limits) -> Result<Formula, QeError> {
    let open = eliminate_inner(f, limits)?;
    Ok(simplify_open(&open))
}

fn eliminate_inner(f: &Formula, limits: &Limits) -> Result<Formula, QeError> {
    Ok(match f {
        Formula::True | Formula::False | Formula::Eq(..) | Formula::Rel(..) => f.clone(),
        Formula::Not(g) => Formula::not(eliminate_inner(g, limits)?),
        Formula::And(a, b) => {
            Formula::and(eliminate_inner(a, limits)?, eliminate_inner(b, limits)?)
        }
        Formula::Or(a, b) => {
            Formula::or(eliminate_inner(a, limits)?, eliminate_inner(b, limits)?)
        }
        Formula::Imp(a, b) => {
            Formula::imp(eliminate_inner(a, limits)?, eliminate_inner(b, limits)?)
        }
        Formula::Iff(a, b) => {
            Formula::iff(eliminate_inner(a, limits)?, eliminate_inner(b, limits)?)
        }
        Formula::Exists(y, g) => {
            let body = simplify_open(&eliminate_inner(g, limits)?);
            eliminate_one(&body, &free_vars_without(&body, y), y, limits)?
        }
        Formula::Forall(y, g) => {
            let body = simplify_open(&eliminate_inner(g, limits)?);
            let negated = simplify_open(&Formula::not(body));
            Formula::not(eliminate_one(
                &negated,
                &free_vars_without(&negated, y),
                y,
                limits,
            )?)
        }
    })
}

fn free_vars_without(f: &Formula, y: &str) -> Vec<String> {
    f.free_vars().into_iter().filter(|v| v != y).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parser::{parse_formula, parse_signature, print_formula};

    fn fm(decls: &str, s: &str) -> Formula {
        parse_formula(s, &parse_signature(decls).unwrap()).unwrap()
    }

    fn strings(names: &[&str]) -> Vec<String> {
        names.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn decomposition_of_pairing_matrix() {
        let psi = fm("(fun L 1) (fun R 1)", "(and (= (L z) x) (= (R z) y))");
        let es = elementary_decomposition(
            &psi,
            &strings(&["x", "y"]),
            &strings(&["z"]),
            &Limits::default(),
        )
        .unwrap();
        assert!(!es.is_empty());
        let (lz, rz) = (
            Term::app("L", vec![Term::var("z")]),
            Term::app("R", vec![Term::var("z")]),
        );
        let mut saw_equal = false;
        let mut saw_distinct = false;
        for e in &es {
            let p = e.partition();
            let (ix, iy) = (
                e.index_of(&Term::var("x")).unwrap(),
                e.index_of(&Term::var("y")).unwrap(),
            );
            assert!(p.same(e.index_of(&lz).unwrap(), ix));
            assert!(p.same(e.index_of(&rz).unwrap(), iy));
            if p.same(ix, iy) {
                saw_equal = true;
            } else {
                saw_distinct = true;
            }
        }
        assert!(saw_equal && saw_distinct);
    }

    #[test]
    fn decomposition_of_falsity_is_empty() {
        let psi = Formula::False;
        let es = elementary_decomposition(&psi, &[], &[], &Limits::default()).unwrap();
        assert!(es.is_empty());
    }

    #[test]
    fn decomposition_of_reflexivity() {
        let psi = fm("", "(= x x)");
        let es =
            elementary_decomposition(&psi, &strings(&["x"]), &[], &Limits::default()).unwrap();
        assert_eq!(es.len(), 1);
        assert!(es[0].epsilon().is_empty());
        assert_eq!(es[0].theta(), &[Term::var("x")]);
    }

    #[test]
    fn disjunction_of_descriptions_is_equivalent_to_the_matrix() {
        // Check Tarskian equivalence structure by structure on small domains.
        let sig = parse_signature("(fun F 1) (rel P 1)").unwrap();
        let psi = fm(
            "(fun F 1) (rel P 1)",
            "(or (and (P x) (= (F x) y)) (not (P y)))",
        );
        let es = elementary_decomposition(
            &psi,
            &strings(&["x", "y"]),
            &[],
            &Limits::default(),
        )
        .unwrap();
        for m in
            crate::structures::enumerate_structures(&sig, 2, &Limits::default()).unwrap()
        {
            for vx in m.elements() {
                for vy in m.elements() {
                    let env: std::collections::BTreeMap<String, usize> =
                        [("x".to_string(), vx), ("y".to_string(), vy)]
                            .into_iter()
                            .collect();
                    let direct = m.eval_formula(&psi, &env).unwrap();
                    let via = es
                        .iter()
                        .map(|e| m.eval_formula(&e.theta_formula(), &env).unwrap())
                        .any(|b| b);
                    assert_eq!(direct, via);
                }
            }
        }
    }

    #[test]
    fn eliminate_one_pairing_gives_truth() {
        let psi = fm("(fun L 1) (fun R 1)", "(and (= (L z) x) (= (R z) y))");
        let out = eliminate_one(&psi, &strings(&["x", "y"]), "z", &Limits::default()).unwrap();
        assert_eq!(out, Formula::True);
    }

    #[test]
    fn eliminate_one_fixed_point_sentence() {
        let psi = fm("(fun F 1)", "(= (F x) x)");
        let out = eliminate_one(&psi, &[], "x", &Limits::default()).unwrap();
        assert_eq!(out, Formula::True);
    }

    #[test]
    fn eliminate_one_contradiction() {
        let psi = fm("", "(not (= y y))");
        let out = eliminate_one(&psi, &[], "y", &Limits::default()).unwrap();
        assert_eq!(out, Formula::False);
    }

    #[test]
    fn eliminate_fresh_preimage_sentence() {
        let f = fm(
            "(fun F 1)",
            "(forall x (exists z (and (not (= z x)) (= (F z) x))))",
        );
        assert_eq!(eliminate(&f, &Limits::default()).unwrap(), Formula::True);
    }

    #[test]
    fn eliminate_is_identity_on_quantifier_free_inputs() {
        let f = fm("(rel P 1)", "(and (P x) (not (P y)))");
        let out = eliminate(&f, &Limits::default()).unwrap();
        assert_eq!(print_formula(&out), "(and (P x) (not (P y)))");
    }

    #[test]
    fn eliminate_unsatisfiable_existential() {
        let f = fm("", "(exists x (not (= x x)))");
        assert_eq!(eliminate(&f, &Limits::default()).unwrap(), Formula::False);
    }

    #[test]
    fn eliminate_universal_pairing_theorem() {
        let f = fm(
            "(fun L 1) (fun R 1)",
            "(forall x (forall y (exists z (and (= (L z) x) (= (R z) y)))))",
        );
        assert_eq!(eliminate(&f, &Limits::default()).unwrap(), Formula::True);
    }

    #[test]
    fn term_cap_is_enforced() {
        let limits = Limits {
            max_theta: 3,
            ..Limits::default()
        };
        // Closure of {x, F(F(y))} has four terms.
        let f = fm("(fun F 1)", "(exists y (= (F (F y)) x))");
        let err = eliminate(&f, &limits).unwrap_err();
        assert_eq!(err, QeError::TooManyTerms { got: 4, cap: 3 });
    }

    #[test]
    fn free_variables_never_grow() {
        let f = fm(
            "(fun F 1) (rel P 1)",
            "(exists y (and (= (F y) x) (P y)))",
        );
        let out = eliminate(&f, &Limits::default()).unwrap();
        assert!(out.is_quantifier_free());
        assert!(out.free_vars().iter().all(|v| v == "x"));
    }
}
