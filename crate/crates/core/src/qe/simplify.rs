//! Simplification of quantifier-free formulas, sound in every structure.
//!
//! The formula is constant-folded, put into disjunctive normal form (with a
//! size ceiling; past it the folded input is returned unchanged), and the
//! disjunct set is cleaned up: duplicate literals vanish in the set
//! representation, congruence-refutable disjuncts are dropped, subsumed
//! disjuncts are pruned, and disjunct pairs differing in one complementary
//! literal are merged.  Every step preserves logical equivalence, so outputs
//! can be certified against inputs by the euf module.

use crate::euf::{self, Atom, Literal};
use crate::syntax::Formula;
use std::collections::BTreeSet;

/// Ceiling on the number of disjuncts built before giving up on DNF.
const DNF_CAP: usize = 4096;

type Disjunct = BTreeSet<Literal>;

/// Simplifies a quantifier-free formula to a logically equivalent one.
/// Formulas with quantifiers are only constant-folded.
pub fn simplify_open(f: &Formula) -> Formula {
    let folded = fold(f);
    match folded {
        Formula::True | Formula::False => return folded,
        _ => {}
    }
    if !folded.is_quantifier_free() {
        return folded;
    }
    let Some(mut disjuncts) = dnf(&folded, true) else {
        return folded;
    };
    disjuncts.retain(|d| {
        let lits: Vec<Literal> = d.iter().cloned().collect();
        euf::literals_consistent(&lits)
    });
    let mut set: BTreeSet<Disjunct> = disjuncts.into_iter().collect();
    loop {
        if let Some(reduced) = subsumption_step(&set).or_else(|| merge_step(&set)) {
            set = reduced;
        } else {
            break;
        }
    }
    rebuild(&set)
}

/// Propositional constant folding; leaves quantified subformulas in place
/// except for the two collapses valid over every domain including the empty
/// one.
fn fold(f: &Formula) -> Formula {
    match f {
        Formula::True | Formula::False | Formula::Rel(..) => f.clone(),
        Formula::Eq(a, b) => {
            if a == b {
                Formula::True
            } else {
                f.clone()
            }
        }
        Formula::Not(g) => match fold(g) {
            Formula::True => Formula::False,
            Formula::False => Formula::True,
            Formula::Not(h) => *h,
            h => Formula::not(h),
        },
        Formula::And(a, b) => match (fold(a), fold(b)) {
            (Formula::False, _) | (_, Formula::False) => Formula::False,
            (Formula::True, h) | (h, Formula::True) => h,
            (g, h) => Formula::and(g, h),
        },
        Formula::Or(a, b) => match (fold(a), fold(b)) {
            (Formula::True, _) | (_, Formula::True) => Formula::True,
            (Formula::False, h) | (h, Formula::False) => h,
            (g, h) => Formula::or(g, h),
        },
        Formula::Imp(a, b) => match (fold(a), fold(b)) {
            (Formula::False, _) | (_, Formula::True) => Formula::True,
            (Formula::True, h) => h,
            (g, Formula::False) => fold(&Formula::not(g)),
            (g, h) => Formula::imp(g, h),
        },
        Formula::Iff(a, b) => match (fold(a), fold(b)) {
            (Formula::True, h) | (h, Formula::True) => h,
            (Formula::False, h) | (h, Formula::False) => fold(&Formula::not(h)),
            (g, h) => Formula::iff(g, h),
        },
        // ∀v truth holds vacuously over the empty domain too; ∃v falsity
        // fails everywhere.  No other quantifier collapse is domain-safe.
        Formula::Forall(v, g) => match fold(g) {
            Formula::True => Formula::True,
            h => Formula::forall(v.clone(), h),
        },
        Formula::Exists(v, g) => match fold(g) {
            Formula::False => Formula::False,
            h => Formula::exists(v.clone(), h),
        },
    }
}

/// Disjunctive normal form of `f` (negated when `positive` is false), as a
/// list of literal sets.  `None` when the disjunct count passes [`DNF_CAP`].
/// Disjuncts containing a literal and its complement are dropped on the way.
fn dnf(f: &Formula, positive: bool) -> Option<Vec<Disjunct>> {
    match f {
        Formula::True => Some(if positive { vec![Disjunct::new()] } else { vec![] }),
        Formula::False => Some(if positive { vec![] } else { vec![Disjunct::new()] }),
        Formula::Eq(a, b) => {
            if a == b {
                return dnf(&Formula::True, positive);
            }
            let lit = Literal {
                positive,
                atom: Atom::eq(a.clone(), b.clone()),
            };
            Some(vec![[lit].into_iter().collect()])
        }
        Formula::Rel(name, args) => {
            let lit = Literal {
                positive,
                atom: Atom::rel(name.clone(), args.clone()),
            };
            Some(vec![[lit].into_iter().collect()])
        }
        Formula::Not(g) => dnf(g, !positive),
        Formula::And(a, b) => {
            if positive {
                cross(dnf(a, true)?, dnf(b, true)?)
            } else {
                Some(join(dnf(a, false)?, dnf(b, false)?))
            }
        }
        Formula::Or(a, b) => {
            if positive {
                Some(join(dnf(a, true)?, dnf(b, true)?))
            } else {
                cross(dnf(a, false)?, dnf(b, false)?)
            }
        }
        Formula::Imp(a, b) => {
            if positive {
                Some(join(dnf(a, false)?, dnf(b, true)?))
            } else {
                cross(dnf(a, true)?, dnf(b, false)?)
            }
        }
        Formula::Iff(a, b) => {
            // (a ∧ b) ∨ (¬a ∧ ¬b), or its complement.
            let same = cross(dnf(a, true)?, dnf(b, true)?)?;
            let diff = cross(dnf(a, false)?, dnf(b, false)?)?;
            let (left, right) = if positive {
                (same, diff)
            } else {
                (
                    cross(dnf(a, true)?, dnf(b, false)?)?,
                    cross(dnf(a, false)?, dnf(b, true)?)?,
                )
            };
            Some(join(left, right))
        }
        Formula::Exists(..) | Formula::Forall(..) => None,
    }
}

fn join(mut a: Vec<Disjunct>, mut b: Vec<Disjunct>) -> Vec<Disjunct> {
    a.append(&mut b);
    a
}

fn cross(a: Vec<Disjunct>, b: Vec<Disjunct>) -> Option<Vec<Disjunct>> {
    let mut out = Vec::new();
    for d1 in &a {
        'next: for d2 in &b {
            let mut merged = d1.clone();
            for lit in d2 {
                let twin = Literal {
                    positive: !lit.positive,
                    atom: lit.atom.clone(),
                };
                if merged.contains(&twin) {
                    continue 'next;
                }
                merged.insert(lit.clone());
            }
            out.push(merged);
            if out.len() > DNF_CAP {
                return None;
            }
        }
    }
    Some(out)
}

/// One subsumption pruning, if any applies: a disjunct strictly containing
/// another is redundant.
fn subsumption_step(set: &BTreeSet<Disjunct>) -> Option<BTreeSet<Disjunct>> {
    for d in set {
        if set.iter().any(|d2| d2 != d && d2.is_subset(d)) {
            let mut out = set.clone();
            out.remove(d);
            return Some(out);
        }
    }
    None
}

/// One complementary merge, if any applies: `C ∪ {l}` together with
/// `C ∪ {¬l}` is equivalent to `C`.
fn merge_step(set: &BTreeSet<Disjunct>) -> Option<BTreeSet<Disjunct>> {
    for d in set {
        for lit in d {
            let mut twin_disjunct = d.clone();
            twin_disjunct.remove(lit);
            let twin = Literal {
                positive: !lit.positive,
                atom: lit.atom.clone(),
            };
            twin_disjunct.insert(twin);
            if set.contains(&twin_disjunct) {
                let mut core = d.clone();
                core.remove(lit);
                let mut out = set.clone();
                out.remove(d);
                out.remove(&twin_disjunct);
                out.insert(core);
                return Some(out);
            }
        }
    }
    None
}

fn rebuild(set: &BTreeSet<Disjunct>) -> Formula {
    if set.iter().any(BTreeSet::is_empty) {
        return Formula::True;
    }
    Formula::or_all(
        set.iter()
            .map(|d| Formula::and_all(d.iter().map(Literal::to_formula))),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parser::{parse_formula, parse_signature, print_formula};
    use crate::syntax::Signature;
    use proptest::prelude::*;

    fn sig() -> Signature {
        parse_signature("(fun F 1) (const c) (rel P 1)").unwrap()
    }

    fn fm(s: &str) -> Formula {
        parse_formula(s, &sig()).unwrap()
    }

    #[test]
    fn excluded_middle_collapses() {
        assert_eq!(simplify_open(&fm("(or (= x y) (not (= x y)))")), Formula::True);
    }

    #[test]
    fn duplicate_conjuncts_collapse() {
        let out = simplify_open(&fm("(and (= (F c) c) (= (F c) c))"));
        // Equalities come back oriented with the smaller term first.
        assert_eq!(print_formula(&out), "(= c (F c))");
    }

    #[test]
    fn congruence_refutes_a_disjunct() {
        assert_eq!(
            simplify_open(&fm("(and (= x y) (not (= (F x) (F y))))")),
            Formula::False
        );
    }

    #[test]
    fn subsumption_prunes() {
        let out = simplify_open(&fm("(or (P x) (and (P x) (P y)))"));
        assert_eq!(print_formula(&out), "(P x)");
    }

    #[test]
    fn implication_unfolds() {
        let out = simplify_open(&fm("(imp (P x) (P x))"));
        assert_eq!(out, Formula::True);
    }

    #[test]
    fn reflexive_equality_folds() {
        assert_eq!(simplify_open(&fm("(= x x)")), Formula::True);
        assert_eq!(simplify_open(&fm("(not (= (F c) (F c)))")), Formula::False);
    }

    #[test]
    fn equality_orientation_merges_disjuncts() {
        // x=y and y=x are the same literal, so the two disjuncts coincide.
        let out = simplify_open(&fm("(or (= x y) (= y x))"));
        assert_eq!(print_formula(&out), "(= x y)");
    }

    #[test]
    fn quantified_formulas_fold_only_where_domain_safe() {
        let f = fm("(forall x (= x x))");
        assert_eq!(simplify_open(&f), Formula::True);
        let g = fm("(exists x (= x x))");
        // ∃x truth asserts a nonempty domain; the quantifier must survive.
        assert_eq!(simplify_open(&g), fm("(exists x true)"));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(128))]

        /// Simplification preserves truth in every structure.
        #[test]
        fn preserves_equivalence(seed in 0u64..8192) {
            use rand::SeedableRng;
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let f = crate::cli::harness::random_qf_formula(&sig(), &["x", "y"], 3, &mut rng);
            let out = simplify_open(&f);
            prop_assert!(out.is_quantifier_free());
            prop_assert!(crate::euf::formulas_equivalent(&f, &out));
        }
    }
}
