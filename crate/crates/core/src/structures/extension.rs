//! The extension-witness oracle.
//!
//! Given a structure M, values for the free variables, and an elementary
//! existential formula, both routes here answer the same question: does some
//! extension of M satisfy the formula's matrix under those values?
//!
//! The constructive route evaluates the resultant in M and, when it holds,
//! glues one fresh element per dropped class onto M.  The blind route knows
//! nothing about resultants: it searches assignments of the term set into a
//! candidate domain of size at most |M| + |Θ|, constrained only by the
//! partition, by functionality, and by M's own tables.  The two are
//! implemented with no shared logic precisely so they can check each other.

use super::{FiniteStructure, StructureError};
use crate::qe::{compute_star, ElementaryExistential};
use crate::syntax::{SymbolKind, Term};
use std::collections::BTreeMap;

/// An extension together with values for the bound variables that make the
/// matrix true in it (when paired with the free-variable values).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtensionWitness {
    pub structure: FiniteStructure,
    /// One value per bound variable, in the formula's bound-variable order.
    pub bound_values: Vec<usize>,
}

impl ExtensionWitness {
    /// Environment mapping every variable of `e` to its value.
    pub fn env(&self, e: &ElementaryExistential, u: &[usize]) -> BTreeMap<String, usize> {
        let mut env = BTreeMap::new();
        for (name, &val) in e.free_vars().iter().zip(u) {
            env.insert(name.clone(), val);
        }
        for (name, &val) in e.bound_vars().iter().zip(&self.bound_values) {
            env.insert(name.clone(), val);
        }
        env
    }
}

fn check_inputs(
    m: &FiniteStructure,
    u: &[usize],
    e: &ElementaryExistential,
) -> Result<(), StructureError> {
    if u.len() != e.free_vars().len() {
        return Err(StructureError::FreeTupleLength {
            expected: e.free_vars().len(),
            got: u.len(),
        });
    }
    for &val in u {
        if val >= m.size() {
            return Err(StructureError::ElementOutOfRange {
                element: val,
                size: m.size(),
            });
        }
    }
    let sig = m.signature();
    for t in e.theta() {
        if let Term::App(name, args) = t {
            match sig.kind_arity(name) {
                Some((SymbolKind::Function, k)) if k == args.len() => {}
                Some((SymbolKind::Function, k)) => {
                    return Err(StructureError::BadTuple {
                        name: name.clone(),
                        expected: k,
                        got: args.len(),
                    })
                }
                _ => return Err(StructureError::UnknownSymbol(name.clone())),
            }
        }
    }
    for (rel, arity) in e.epsilon_relations() {
        match sig.kind_arity(&rel) {
            Some((SymbolKind::Relation, k)) if k == arity => {}
            Some((SymbolKind::Relation, k)) => {
                return Err(StructureError::BadTuple {
                    name: rel,
                    expected: k,
                    got: arity,
                })
            }
            _ => return Err(StructureError::UnknownSymbol(rel)),
        }
    }
    Ok(())
}

/// Copies every table entry of `m` into `n` (whose domain must contain m's).
fn copy_tables(m: &FiniteStructure, n: &mut FiniteStructure) {
    let sig = m.signature().clone();
    for (name, arity) in sig.functions() {
        for tuple in super::tuples(m.size(), arity) {
            n.set_fun(&name, &tuple, m.fun(&name, &tuple))
                .expect("copying into a larger domain cannot fail");
        }
    }
    for (name, arity) in sig.relations() {
        for tuple in super::tuples(m.size(), arity) {
            n.set_rel(&name, &tuple, m.rel(&name, &tuple))
                .expect("copying into a larger domain cannot fail");
        }
    }
}

/// Shared final check: the witness really satisfies the matrix.
fn verify(
    n: &FiniteStructure,
    e: &ElementaryExistential,
    u: &[usize],
    w: &ExtensionWitness,
) -> Result<(), StructureError> {
    let holds = n.eval_formula(&e.theta_formula(), &w.env(e, u))?;
    assert!(holds, "internal invariant violated: witness fails the matrix");
    Ok(())
}

/// The constructive route: evaluate the resultant in M; on success build the
/// extension by adjoining one element per dropped class.
pub fn extension_witness_constructive(
    m: &FiniteStructure,
    u: &[usize],
    e: &ElementaryExistential,
) -> Result<Option<ExtensionWitness>, StructureError> {
    check_inputs(m, u, e)?;
    let star = compute_star(e);
    let free_env: BTreeMap<String, usize> = e
        .free_vars()
        .iter()
        .cloned()
        .zip(u.iter().copied())
        .collect();
    if !m.eval_formula(&star.formula, &free_env)? {
        return Ok(None);
    }

    let theta = e.theta();
    let p = e.partition();
    // One fresh element per class dropped from the retained set, numbered by
    // first occurrence.  Dropped classes never straddle the retained set.
    let mut class_to_new: BTreeMap<usize, usize> = BTreeMap::new();
    for i in 0..theta.len() {
        if !star.xi.contains(&i) {
            let next = m.size() + class_to_new.len();
            class_to_new.entry(p.block_of(i)).or_insert(next);
        }
    }
    let mut size_n = m.size() + class_to_new.len();
    if size_n == 0 && !e.bound_vars().is_empty() {
        // The matrix mentions no terms but still quantifies; any one-element
        // extension carries the quantifier.
        size_n = 1;
    }
    let default = if class_to_new.is_empty() { 0 } else { m.size() };

    let mut n = FiniteStructure::new(m.signature().clone(), size_n)?;
    // Unconstrained function values go to the default element; entries over
    // M keep M's tables.
    for (name, arity) in m.signature().functions() {
        for tuple in super::tuples(size_n, arity) {
            if tuple.iter().any(|&a| a >= m.size()) {
                n.set_fun(&name, &tuple, default)?;
            }
        }
    }
    copy_tables(m, &mut n);

    // Value of each term of the term set in N.
    let value: Vec<usize> = (0..theta.len())
        .map(|i| match class_to_new.get(&p.block_of(i)) {
            Some(&fresh) => Ok(fresh),
            None => m.eval_term(&star.stars[&i], &free_env),
        })
        .collect::<Result<_, _>>()?;

    // Forced function entries and relation bits on tuples that touch a
    // fresh element.
    for (i, t) in theta.iter().enumerate() {
        if let Term::App(f, args) = t {
            let arg_vals: Vec<usize> = args
                .iter()
                .map(|a| value[e.index_of(a).expect("term sets are subterm-closed")])
                .collect();
            n.set_fun(f, &arg_vals, value[i])?;
        }
    }
    for (rel, arity) in e.epsilon_relations() {
        for indices in super::tuples(theta.len(), arity) {
            let vals: Vec<usize> = indices.iter().map(|&i| value[i]).collect();
            if vals.iter().any(|&a| a >= m.size()) {
                let bit = e
                    .epsilon_bit(&rel, &indices)
                    .expect("assignments are total over their relations");
                n.set_rel(&rel, &vals, bit)?;
            }
        }
    }

    let bound_values = e
        .bound_vars()
        .iter()
        .map(|y| match e.index_of(&Term::var(y.as_str())) {
            Some(i) => value[i],
            None => default,
        })
        .collect();
    let witness = ExtensionWitness {
        structure: n,
        bound_values,
    };
    verify(&witness.structure, e, u, &witness)?;
    Ok(Some(witness))
}

/// The blind route: search term-set assignments into a domain of size at
/// most |M| + |Θ| directly against the partition, functionality, and M.
pub fn extension_witness_blind(
    m: &FiniteStructure,
    u: &[usize],
    e: &ElementaryExistential,
) -> Result<Option<ExtensionWitness>, StructureError> {
    check_inputs(m, u, e)?;
    let theta = e.theta();
    let p = e.partition();
    let apps = {
        // Argument indices for each application; arguments precede their
        // applications in the sorted order, so a left-to-right search always
        // sees argument values first.
        let index: BTreeMap<&Term, usize> =
            theta.iter().enumerate().map(|(i, t)| (t, i)).collect();
        theta
            .iter()
            .map(|t| match t {
                Term::Var(_) => None,
                Term::App(f, args) => Some((
                    f.clone(),
                    args.iter().map(|a| index[a]).collect::<Vec<usize>>(),
                )),
            })
            .collect::<Vec<_>>()
    };
    let free_value: BTreeMap<usize, usize> = e
        .free_vars()
        .iter()
        .zip(u)
        .filter_map(|(x, &val)| e.index_of(&Term::var(x.as_str())).map(|i| (i, val)))
        .collect();

    let mut hi = m.size() + theta.len();
    if !e.bound_vars().is_empty() {
        hi = hi.max(1);
    }
    for s in m.size()..=hi {
        if s == 0 && !e.bound_vars().is_empty() {
            continue;
        }
        let mut v: Vec<usize> = Vec::with_capacity(theta.len());
        let mut fun_entries: BTreeMap<(String, Vec<usize>), usize> = BTreeMap::new();
        if search_assignment(m, e, &apps, &free_value, s, &mut v, &mut fun_entries, p) {
            return Ok(Some(build_blind_witness(m, u, e, &apps, &v, s)?));
        }
    }
    Ok(None)
}

/// Depth-first extension of the partial assignment `v` to all term-set
/// indices.  Values range over `0..s`; returns true on the first success.
#[allow(clippy::too_many_arguments)]
fn search_assignment(
    m: &FiniteStructure,
    e: &ElementaryExistential,
    apps: &[Option<(String, Vec<usize>)>],
    free_value: &BTreeMap<usize, usize>,
    s: usize,
    v: &mut Vec<usize>,
    fun_entries: &mut BTreeMap<(String, Vec<usize>), usize>,
    p: &crate::qe::Partition,
) -> bool {
    let i = v.len();
    if i == e.theta().len() {
        return epsilon_holds_on_old_tuples(m, e, v);
    }
    let candidates: Vec<usize> = if let Some(&forced) = free_value.get(&i) {
        vec![forced]
    } else if let Some(j) = (0..i).find(|&j| p.same(i, j)) {
        vec![v[j]]
    } else if let Some((f, arg_ids)) = &apps[i] {
        let vals: Vec<usize> = arg_ids.iter().map(|&a| v[a]).collect();
        if let Some(&known) = fun_entries.get(&(f.clone(), vals.clone())) {
            vec![known]
        } else if vals.iter().all(|&a| a < m.size()) {
            vec![m.fun(f, &vals)]
        } else {
            (0..s).collect()
        }
    } else {
        (0..s).collect()
    };
    for c in candidates {
        if (0..i).any(|j| p.same(i, j) != (v[j] == c)) {
            continue;
        }
        let mut inserted = None;
        if let Some((f, arg_ids)) = &apps[i] {
            let vals: Vec<usize> = arg_ids.iter().map(|&a| v[a]).collect();
            let key = (f.clone(), vals.clone());
            match fun_entries.get(&key) {
                Some(&known) if known != c => continue,
                Some(_) => {}
                None => {
                    if vals.iter().all(|&a| a < m.size()) && m.fun(f, &vals) != c {
                        continue;
                    }
                    fun_entries.insert(key.clone(), c);
                    inserted = Some(key);
                }
            }
        }
        v.push(c);
        if search_assignment(m, e, apps, free_value, s, v, fun_entries, p) {
            return true;
        }
        v.pop();
        if let Some(key) = inserted {
            fun_entries.remove(&key);
        }
    }
    false
}

/// Relation bits on tuples that land entirely inside M must match M.
fn epsilon_holds_on_old_tuples(
    m: &FiniteStructure,
    e: &ElementaryExistential,
    v: &[usize],
) -> bool {
    for (rel, arity) in e.epsilon_relations() {
        for indices in super::tuples(e.theta().len(), arity) {
            let vals: Vec<usize> = indices.iter().map(|&i| v[i]).collect();
            if vals.iter().all(|&a| a < m.size()) {
                let bit = e
                    .epsilon_bit(&rel, &indices)
                    .expect("assignments are total over their relations");
                if m.rel(&rel, &vals) != bit {
                    return false;
                }
            }
        }
    }
    true
}

fn build_blind_witness(
    m: &FiniteStructure,
    u: &[usize],
    e: &ElementaryExistential,
    apps: &[Option<(String, Vec<usize>)>],
    v: &[usize],
    s: usize,
) -> Result<ExtensionWitness, StructureError> {
    let mut n = FiniteStructure::new(m.signature().clone(), s)?;
    copy_tables(m, &mut n);
    for (i, app) in apps.iter().enumerate() {
        if let Some((f, arg_ids)) = app {
            let vals: Vec<usize> = arg_ids.iter().map(|&a| v[a]).collect();
            n.set_fun(f, &vals, v[i])?;
        }
    }
    for (rel, arity) in e.epsilon_relations() {
        for indices in super::tuples(e.theta().len(), arity) {
            let vals: Vec<usize> = indices.iter().map(|&i| v[i]).collect();
            if vals.iter().any(|&a| a >= m.size()) {
                let bit = e
                    .epsilon_bit(&rel, &indices)
                    .expect("assignments are total over their relations");
                n.set_rel(&rel, &vals, bit)?;
            }
        }
    }
    let bound_values = e
        .bound_vars()
        .iter()
        .map(|y| match e.index_of(&Term::var(y.as_str())) {
            Some(i) => v[i],
            None => 0,
        })
        .collect();
    let witness = ExtensionWitness {
        structure: n,
        bound_values,
    };
    verify(&witness.structure, e, u, &witness)?;
    Ok(witness)
}

/// Does some extension of `m` satisfy the matrix of `e` with free variables
/// set to `u`?  This is the constructive route; [`extension_witness_blind`]
/// answers the same question by brute force.
pub fn extension_satisfies(
    m: &FiniteStructure,
    u: &[usize],
    e: &ElementaryExistential,
) -> Result<Option<ExtensionWitness>, StructureError> {
    extension_witness_constructive(m, u, e)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qe::Partition;
    use crate::syntax::parser::parse_signature;
    use crate::syntax::Signature;

    fn v(n: &str) -> Term {
        Term::var(n)
    }

    fn fixed_point_formula() -> (Signature, ElementaryExistential) {
        // Matrix of ∃y(F(y)=x ∧ y≠x ∧ y≠F(y)): classes {x, F(y)} and {y}.
        let sig = parse_signature("(fun F 1)").unwrap();
        let theta = vec![v("x"), v("y"), Term::app("F", vec![v("y")])];
        let p = Partition::from_classes(3, &[vec![0, 2], vec![1]]).unwrap();
        let e = ElementaryExistential::new(
            &sig,
            vec!["x".to_string()],
            vec!["y".to_string()],
            theta,
            p,
            BTreeMap::new(),
        )
        .unwrap();
        (sig, e)
    }

    #[test]
    fn adjoins_a_preimage() {
        let (sig, e) = fixed_point_formula();
        let m = FiniteStructure::new(sig, 1).unwrap(); // F(0) = 0
        let w = extension_witness_constructive(&m, &[0], &e)
            .unwrap()
            .expect("a preimage can always be adjoined");
        assert_eq!(w.structure.size(), 2);
        assert_eq!(w.structure.fun("F", &[1]), 0);
        assert_eq!(w.bound_values, vec![1]);
        assert!(m.is_substructure_of(&w.structure));

        let b = extension_witness_blind(&m, &[0], &e)
            .unwrap()
            .expect("the blind search must agree");
        assert!(m.is_substructure_of(&b.structure));
    }

    #[test]
    fn witness_inside_m_when_everything_is_retained() {
        let sig = parse_signature("(fun F 1)").unwrap();
        let e = ElementaryExistential::new(
            &sig,
            vec!["x".to_string()],
            vec![],
            vec![v("x")],
            Partition::singletons(1),
            BTreeMap::new(),
        )
        .unwrap();
        let mut m = FiniteStructure::new(sig, 2).unwrap();
        m.set_fun("F", &[0], 1).unwrap();
        let w = extension_satisfies(&m, &[1], &e).unwrap().unwrap();
        assert_eq!(w.structure, m);
        assert!(w.bound_values.is_empty());
    }

    #[test]
    fn absent_when_m_contradicts_the_description() {
        // ε demands P on x's class but M has P empty and no way out: P is
        // fixed on M's elements in every extension.
        let sig = parse_signature("(rel P 1)").unwrap();
        let e = ElementaryExistential::new(
            &sig,
            vec!["x".to_string()],
            vec![],
            vec![v("x")],
            Partition::singletons(1),
            [(("P".to_string(), vec![0]), true)].into_iter().collect(),
        )
        .unwrap();
        let m = FiniteStructure::new(sig, 1).unwrap();
        assert!(extension_witness_constructive(&m, &[0], &e).unwrap().is_none());
        assert!(extension_witness_blind(&m, &[0], &e).unwrap().is_none());
    }

    #[test]
    fn rejects_wrong_tuple_length() {
        let (sig, e) = fixed_point_formula();
        let m = FiniteStructure::new(sig, 1).unwrap();
        let err = extension_satisfies(&m, &[], &e).unwrap_err();
        assert_eq!(
            err,
            StructureError::FreeTupleLength {
                expected: 1,
                got: 0
            }
        );
    }

    #[test]
    fn quantifier_over_empty_term_set_forces_an_element() {
        // ∃y with an empty term set and no relations: true in every
        // extension with an element, so the empty structure must grow.
        let sig = parse_signature("(rel P 1)").unwrap();
        let e = ElementaryExistential::new(
            &sig,
            vec![],
            vec!["y".to_string()],
            vec![],
            Partition::singletons(0),
            BTreeMap::new(),
        )
        .unwrap();
        let m = FiniteStructure::new(sig, 0).unwrap();
        let w = extension_witness_constructive(&m, &[], &e).unwrap().unwrap();
        assert_eq!(w.structure.size(), 1);
        let b = extension_witness_blind(&m, &[], &e).unwrap().unwrap();
        assert!(b.structure.size() >= 1);
    }

    /// Exhaustive agreement between the two routes and the resultant, over
    /// every admissible description of a small term set and every structure
    /// of size at most 2.
    #[test]
    fn routes_agree_with_the_resultant_exhaustively() {
        let sig = parse_signature("(fun F 1) (rel P 1)").unwrap();
        let theta = vec![v("x"), v("y"), Term::app("F", vec![v("y")])];
        let free = vec!["x".to_string()];
        let bound = vec!["y".to_string()];

        let mut descriptions = Vec::new();
        for p in crate::qe::enumerate_congruences(
            &crate::syntax::subterm_closure(theta.iter().cloned()),
            1_000_000,
        ) {
            let p = p.unwrap();
            // Every truth assignment for P over the classes.
            for bits in 0..(1u32 << p.num_blocks()) {
                let eps: BTreeMap<(String, Vec<usize>), bool> = (0..p.num_blocks())
                    .map(|c| (("P".to_string(), vec![c]), bits >> c & 1 == 1))
                    .collect();
                descriptions.push(
                    ElementaryExistential::new(
                        &sig,
                        free.clone(),
                        bound.clone(),
                        theta.clone(),
                        p.clone(),
                        eps,
                    )
                    .unwrap(),
                );
            }
        }
        // Partitions of a 3-element set: one with a single class, three with
        // two, one with three; times the truth assignments for P per class.
        assert_eq!(descriptions.len(), 2 + 3 * 4 + 8);

        let mut checked = 0usize;
        for m in
            crate::structures::enumerate_structures(&sig, 2, &crate::Limits::default()).unwrap()
        {
            for u0 in m.elements() {
                for e in &descriptions {
                    let star = crate::qe::compute_star(e);
                    let env: BTreeMap<String, usize> =
                        [("x".to_string(), u0)].into_iter().collect();
                    let predicted = m.eval_formula(&star.formula, &env).unwrap();
                    let constructive =
                        extension_witness_constructive(&m, &[u0], e).unwrap();
                    let blind = extension_witness_blind(&m, &[u0], e).unwrap();
                    assert_eq!(constructive.is_some(), predicted);
                    assert_eq!(blind.is_some(), predicted);
                    checked += 1;
                }
            }
        }
        // 2 one-element structures and 16 two-element structures, times the
        // element choices for x, times 22 descriptions.
        assert_eq!(checked, (2 + 16 * 2) * 22);
    }
}
