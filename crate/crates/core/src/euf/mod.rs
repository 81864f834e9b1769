//! Ground reasoning about equality with uninterpreted functions and
//! relations.
//!
//! Free variables are treated as fresh constants, so consistency of a
//! literal set means satisfiability of its existential closure in some
//! nonempty structure, and [`ground_valid`] on an open formula decides
//! validity of its universal closure (the empty structure, where a
//! universal closure holds vacuously, never separates the two).
//!
//! The engine is a congruence closure over the subterm graph: union-find
//! with the functional condition saturated by a worklist pass, which is
//! quadratic and entirely adequate at the term counts this crate produces.

use crate::qe::app_structure;
use crate::syntax::{subterm_closure, Formula, Term};
use std::collections::BTreeMap;

/// An atomic assertion: an equality between terms or a relation tuple.
/// Equalities are stored with the smaller side first so that `t = s` and
/// `s = t` are the same atom.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum Atom {
    Eq(Term, Term),
    Rel(String, Vec<Term>),
}

impl Atom {
    pub fn eq(a: Term, b: Term) -> Atom {
        if a <= b {
            Atom::Eq(a, b)
        } else {
            Atom::Eq(b, a)
        }
    }

    pub fn rel(name: impl Into<String>, args: Vec<Term>) -> Atom {
        Atom::Rel(name.into(), args)
    }

    /// The atom as a formula.
    pub fn to_formula(&self) -> Formula {
        match self {
            Atom::Eq(a, b) => Formula::eq(a.clone(), b.clone()),
            Atom::Rel(name, args) => Formula::rel(name, args.clone()),
        }
    }

    fn terms(&self) -> Vec<Term> {
        match self {
            Atom::Eq(a, b) => vec![a.clone(), b.clone()],
            Atom::Rel(_, args) => args.clone(),
        }
    }
}

/// A signed atom.  Ordered by atom first, so a literal and its complement
/// sort together.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Literal {
    pub atom: Atom,
    pub positive: bool,
}

impl Literal {
    pub fn pos(atom: Atom) -> Literal {
        Literal { positive: true, atom }
    }

    pub fn neg(atom: Atom) -> Literal {
        Literal { positive: false, atom }
    }

    pub fn to_formula(&self) -> Formula {
        let f = self.atom.to_formula();
        if self.positive {
            f
        } else {
            Formula::not(f)
        }
    }
}

/// Result of saturating a literal set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Closure {
    /// The classes of every term and subterm mentioned, each sorted, the
    /// list sorted by least member.
    Consistent(Vec<Vec<Term>>),
    Inconsistent,
}

fn find(uf: &mut [usize], mut x: usize) -> usize {
    while uf[x] != x {
        uf[x] = uf[uf[x]];
        x = uf[x];
    }
    x
}

fn union(uf: &mut [usize], a: usize, b: usize) -> bool {
    let (ra, rb) = (find(uf, a), find(uf, b));
    if ra == rb {
        return false;
    }
    // Keep the smaller index as root for determinism.
    let (lo, hi) = (ra.min(rb), ra.max(rb));
    uf[hi] = lo;
    true
}

/// Congruence closure of a literal set.
pub fn congruence_close(lits: &[Literal]) -> Closure {
    let terms = subterm_closure(lits.iter().flat_map(|l| l.atom.terms()));
    let index: BTreeMap<&Term, usize> = terms.iter().enumerate().map(|(i, t)| (t, i)).collect();
    let apps = app_structure(&terms);
    let mut uf: Vec<usize> = (0..terms.len()).collect();

    for l in lits {
        if let (true, Atom::Eq(a, b)) = (l.positive, &l.atom) {
            union(&mut uf, index[a], index[b]);
        }
    }
    loop {
        let mut changed = false;
        for i in 0..terms.len() {
            let Some((fi, ai)) = &apps[i] else { continue };
            for j in i + 1..terms.len() {
                let Some((fj, aj)) = &apps[j] else { continue };
                if fi == fj
                    && ai.len() == aj.len()
                    && ai
                        .iter()
                        .zip(aj)
                        .all(|(&a, &b)| find(&mut uf, a) == find(&mut uf, b))
                    && union(&mut uf, i, j)
                {
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }

    for l in lits {
        if let (false, Atom::Eq(a, b)) = (l.positive, &l.atom) {
            if find(&mut uf, index[a]) == find(&mut uf, index[b]) {
                return Closure::Inconsistent;
            }
        }
    }
    // The outer loop keeps only positive literals, so the clash scan must
    // cover every negative literal, not just those later in the list.
    for l in lits {
        let Atom::Rel(name, args) = &l.atom else { continue };
        if !l.positive {
            continue;
        }
        for m in lits {
            let Atom::Rel(name2, args2) = &m.atom else { continue };
            if m.positive
                || name != name2
                || args.len() != args2.len()
                || !args
                    .iter()
                    .zip(args2)
                    .all(|(a, b)| find(&mut uf, index[a]) == find(&mut uf, index[b]))
            {
                continue;
            }
            return Closure::Inconsistent;
        }
    }

    let mut by_root: BTreeMap<usize, Vec<Term>> = BTreeMap::new();
    for i in 0..terms.len() {
        let r = find(&mut uf, i);
        by_root.entry(r).or_default().push(terms[i].clone());
    }
    Closure::Consistent(by_root.into_values().collect())
}

/// Is the conjunction of the literals satisfiable?
pub fn literals_consistent(lits: &[Literal]) -> bool {
    matches!(congruence_close(lits), Closure::Consistent(_))
}

/// Distinct atoms of a quantifier-free formula in first-occurrence order,
/// with trivial reflexive equalities dropped.
fn collect_atoms(f: &Formula) -> Vec<Atom> {
    let mut out = Vec::new();
    let mut push = |a: Atom| {
        if !out.contains(&a) {
            out.push(a);
        }
    };
    f.walk(&mut |g| match g {
        Formula::Eq(a, b) => {
            if a != b {
                push(Atom::eq(a.clone(), b.clone()));
            }
        }
        Formula::Rel(name, args) => push(Atom::rel(name.clone(), args.clone())),
        _ => {}
    });
    out
}

/// Three-valued evaluation under a partial atom assignment.
fn eval3(f: &Formula, assign: &BTreeMap<Atom, bool>) -> Option<bool> {
    match f {
        Formula::True => Some(true),
        Formula::False => Some(false),
        Formula::Eq(a, b) => {
            if a == b {
                Some(true)
            } else {
                assign.get(&Atom::eq(a.clone(), b.clone())).copied()
            }
        }
        Formula::Rel(name, args) => assign.get(&Atom::rel(name.clone(), args.clone())).copied(),
        Formula::Not(g) => eval3(g, assign).map(|v| !v),
        Formula::And(a, b) => match (eval3(a, assign), eval3(b, assign)) {
            (Some(false), _) | (_, Some(false)) => Some(false),
            (Some(true), Some(true)) => Some(true),
            _ => None,
        },
        Formula::Or(a, b) => match (eval3(a, assign), eval3(b, assign)) {
            (Some(true), _) | (_, Some(true)) => Some(true),
            (Some(false), Some(false)) => Some(false),
            _ => None,
        },
        Formula::Imp(a, b) => match (eval3(a, assign), eval3(b, assign)) {
            (Some(false), _) | (_, Some(true)) => Some(true),
            (Some(true), Some(false)) => Some(false),
            _ => None,
        },
        Formula::Iff(a, b) => match (eval3(a, assign), eval3(b, assign)) {
            (Some(x), Some(y)) => Some(x == y),
            _ => None,
        },
        Formula::Exists(..) | Formula::Forall(..) => {
            panic!("euf evaluation requires a quantifier-free formula")
        }
    }
}

fn assignment_literals(assign: &BTreeMap<Atom, bool>) -> Vec<Literal> {
    assign
        .iter()
        .map(|(a, &v)| Literal {
            positive: v,
            atom: a.clone(),
        })
        .collect()
}

fn search(
    f: &Formula,
    atoms: &[Atom],
    assign: &mut BTreeMap<Atom, bool>,
) -> Option<BTreeMap<Atom, bool>> {
    match eval3(f, assign) {
        Some(true) => return Some(assign.clone()),
        Some(false) => return None,
        None => {}
    }
    let atom = atoms
        .iter()
        .find(|a| !assign.contains_key(*a))
        .expect("an undetermined formula has an unassigned atom")
        .clone();
    for value in [true, false] {
        assign.insert(atom.clone(), value);
        if literals_consistent(&assignment_literals(assign)) {
            if let Some(found) = search(f, atoms, assign) {
                assign.remove(&atom);
                return Some(found);
            }
        }
        assign.remove(&atom);
    }
    None
}

/// A satisfying atom assignment for a quantifier-free formula, or `None`
/// when it is unsatisfiable.  The assignment mentions only the atoms that
/// were forced during the search; unmentioned atoms are free.
pub fn satisfying_assignment(f: &Formula) -> Option<Vec<(Atom, bool)>> {
    assert!(
        f.is_quantifier_free(),
        "satisfiability search requires a quantifier-free formula"
    );
    let atoms = collect_atoms(f);
    let mut assign = BTreeMap::new();
    search(f, &atoms, &mut assign).map(|found| found.into_iter().collect())
}

/// Validity of the universal closure of a quantifier-free formula.
pub fn ground_valid(f: &Formula) -> bool {
    satisfying_assignment(&Formula::not(f.clone())).is_none()
}

/// Are two quantifier-free formulas equivalent in every structure?
pub fn formulas_equivalent(f: &Formula, g: &Formula) -> bool {
    ground_valid(&Formula::iff(f.clone(), g.clone()))
}
