//! The resultant of an elementary existential formula.
//!
//! The retained set Xi is the least subset of the term set containing the
//! free variables, closed under the partition (a class mate of a retained
//! term is retained) and under applications whose arguments are all retained.
//! Each retained term gets a star term over the free variables, assigned by
//! the same three rules; where several rules apply the choice does not affect
//! the resultant up to logical equivalence, so a deterministic chooser is the
//! default and a seeded random chooser exists to exercise that freedom.
//!
//! The resultant keeps the equalities, disequalities and relation literals of
//! the matrix restricted to retained terms, rewritten through the star map,
//! and adds one compatibility equation per retained application.

use super::partitions::app_structure;
use super::ElementaryExistential;
use crate::syntax::{Formula, Term};
use rand::Rng;
use std::collections::{BTreeMap, BTreeSet};

/// How to resolve the freedom in star assignment.
pub enum StarChoice<'a> {
    /// Scan in term order; prefer the free-variable rule, then copying a
    /// class mate's star, then rebuilding an application.
    Deterministic,
    /// Pick uniformly among all currently enabled assignments.
    Random(&'a mut dyn rand::RngCore),
}

/// Outcome of the star computation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StarResult {
    /// Indices (into the sorted term set) of the retained terms, ascending.
    pub xi: Vec<usize>,
    /// Star term for each retained index.
    pub stars: BTreeMap<usize, Term>,
    /// The resultant: a quantifier-free formula over the free variables.
    pub formula: Formula,
}

/// Star computation with the deterministic chooser.
pub fn compute_star(e: &ElementaryExistential) -> StarResult {
    compute_star_with(e, StarChoice::Deterministic)
}

/// Star computation with an explicit chooser.
pub fn compute_star_with(e: &ElementaryExistential, mut choice: StarChoice) -> StarResult {
    let theta = e.theta();
    let n = theta.len();
    let apps = app_structure(theta);
    let p = e.partition();
    let free: BTreeSet<&str> = e.free_vars().iter().map(String::as_str).collect();
    let is_free_var = |i: usize| match &theta[i] {
        Term::Var(v) => free.contains(v.as_str()),
        Term::App(..) => false,
    };

    // Membership: least fixpoint of the three rules.
    let mut in_xi = vec![false; n];
    loop {
        let mut changed = false;
        for i in 0..n {
            if in_xi[i] {
                continue;
            }
            let joins = is_free_var(i)
                || (0..n).any(|j| in_xi[j] && p.same(i, j))
                || matches!(&apps[i], Some((_, args)) if args.iter().all(|&a| in_xi[a]));
            if joins {
                in_xi[i] = true;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    let xi: Vec<usize> = (0..n).filter(|&i| in_xi[i]).collect();

    // Star assignment.  An option is (index, rule, star term); rules are
    // numbered so the deterministic chooser can order by rule then index.
    let mut stars: BTreeMap<usize, Term> = BTreeMap::new();
    while stars.len() < xi.len() {
        let mut options: Vec<(u8, usize, Term)> = Vec::new();
        for &i in &xi {
            if stars.contains_key(&i) {
                continue;
            }
            // A free variable is always its own star; letting it copy a
            // mate's star instead would detach it from the resultant.
            if is_free_var(i) {
                options.push((0, i, theta[i].clone()));
                continue;
            }
            // Map iteration is ascending, so this is the least assigned mate.
            let mate = stars
                .iter()
                .find(|(&k, _)| k != i && p.same(i, k))
                .map(|(_, s)| s.clone());
            if let Some(star) = mate {
                options.push((1, i, star));
            }
            if let Some((f, args)) = &apps[i] {
                if args.iter().all(|a| stars.contains_key(a)) {
                    let built = Term::app(f, args.iter().map(|a| stars[a].clone()).collect());
                    options.push((2, i, built));
                }
            }
        }
        assert!(
            !options.is_empty(),
            "star assignment cannot stall on a retained set"
        );
        let (_, i, star) = match &mut choice {
            StarChoice::Deterministic => {
                options.sort();
                options.swap_remove(0)
            }
            StarChoice::Random(rng) => {
                let k = rng.gen_range(0..options.len());
                options.swap_remove(k)
            }
        };
        stars.insert(i, star);
    }

    // Resultant conjuncts, deduplicated and deterministically ordered.
    let mut conjuncts: BTreeSet<Formula> = BTreeSet::new();
    let oriented_eq = |a: &Term, b: &Term| {
        if a <= b {
            Formula::eq(a.clone(), b.clone())
        } else {
            Formula::eq(b.clone(), a.clone())
        }
    };
    for (ai, &i) in xi.iter().enumerate() {
        for &j in &xi[ai + 1..] {
            let (s, t) = (&stars[&i], &stars[&j]);
            if p.same(i, j) {
                if s != t {
                    conjuncts.insert(oriented_eq(s, t));
                }
            } else {
                conjuncts.insert(Formula::not(oriented_eq(s, t)));
            }
        }
    }
    for (rel, arity) in e.epsilon_relations() {
        for tuple in tuples_over(&xi, arity) {
            let atom = Formula::rel(
                &rel,
                tuple.iter().map(|&i| stars[&i].clone()).collect::<Vec<_>>(),
            );
            match e.epsilon_bit(&rel, &tuple) {
                Some(true) => conjuncts.insert(atom),
                Some(false) => conjuncts.insert(Formula::not(atom)),
                None => unreachable!("assignments are total over their relations"),
            };
        }
    }
    for &i in &xi {
        if let Some((f, args)) = &apps[i] {
            // An application retained as a class mate may have dropped
            // arguments; it constrains nothing beyond its class.
            if !args.iter().all(|&a| in_xi[a]) {
                continue;
            }
            let built = Term::app(f, args.iter().map(|a| stars[a].clone()).collect());
            if stars[&i] != built {
                conjuncts.insert(Formula::eq(stars[&i].clone(), built));
            }
        }
    }

    let formula = Formula::and_all(conjuncts);
    StarResult { xi, stars, formula }
}

/// All `arity`-tuples over the given index list, lexicographic.
fn tuples_over(indices: &[usize], arity: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..arity {
        out = out
            .into_iter()
            .flat_map(|t| {
                indices.iter().map(move |&i| {
                    let mut t2 = t.clone();
                    t2.push(i);
                    t2
                })
            })
            .collect();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qe::Partition;
    use crate::syntax::parser::{parse_signature, print_formula};
    use crate::syntax::subterm_closure;
    use std::collections::BTreeMap;

    fn v(n: &str) -> Term {
        Term::var(n)
    }

    /// Terms {x, y, F(y)} with y ~ F(y), x apart, bound variable y: the
    /// matrix says F has a fixed point other than x.  Everything except x
    /// drops out, so the resultant is truth.
    #[test]
    fn unretained_terms_leave_no_trace() {
        let sig = parse_signature("(fun F 1)").unwrap();
        let theta = vec![v("x"), v("y"), Term::app("F", vec![v("y")])];
        let p = Partition::from_classes(3, &[vec![0], vec![1, 2]]).unwrap();
        let e = ElementaryExistential::new(
            &sig,
            vec!["x".to_string()],
            vec!["y".to_string()],
            theta,
            p,
            BTreeMap::new(),
        )
        .unwrap();
        let r = compute_star(&e);
        assert_eq!(r.xi, vec![0]);
        assert_eq!(r.formula, Formula::True);
    }

    /// Terms {x, y, F(x), F(y)} with classes {x, F(y)} and {y, F(x)}, all of
    /// them retained: the resultant pins F to swap x and y.
    #[test]
    fn swap_classes_force_equations() {
        let sig = parse_signature("(fun F 1)").unwrap();
        let theta = subterm_closure([Term::app("F", vec![v("x")]), Term::app("F", vec![v("y")])]);
        let p = Partition::from_classes(4, &[vec![0, 3], vec![1, 2]]).unwrap();
        let e = ElementaryExistential::new(
            &sig,
            vec!["x".to_string(), "y".to_string()],
            vec![],
            theta,
            p,
            BTreeMap::new(),
        )
        .unwrap();
        let r = compute_star(&e);
        assert_eq!(r.xi, vec![0, 1, 2, 3]);
        assert_eq!(
            print_formula(&r.formula),
            "(and (= x (F y)) (and (= y (F x)) (not (= x y))))"
        );
    }

    /// A retained application of a bound variable: x ~ F(y) retains F(y) and
    /// then y (nothing retains... ) — here y is retained only through its own
    /// class, so with y in a singleton class the application F(y) is retained
    /// by rule two and y must be rebuilt before F(y)'s star can exist; the
    /// compatibility equation ties them.
    #[test]
    fn class_mate_retains_application_and_arguments() {
        let sig = parse_signature("(fun F 1)").unwrap();
        // Theta sorted: x, y, F(y); classes {x, F(y)}, {y}.
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
        let r = compute_star(&e);
        // F(y) is retained as x's class mate; y is not retained by any rule.
        assert_eq!(r.xi, vec![0, 2]);
        assert_eq!(r.stars[&2], v("x"));
        // Remaining conjunct: none (the pair x, F(y) is an equality with
        // identical stars, and F(y)'s argument y is outside the retained
        // set, so no compatibility equation is emitted).
        assert_eq!(r.formula, Formula::True);
    }

    /// Constants are always retained (an application with zero arguments),
    /// and their stars are themselves.
    #[test]
    fn constants_are_retained() {
        let sig = parse_signature("(const c) (rel P 1)").unwrap();
        let theta = vec![v("y"), Term::constant("c")];
        let p = Partition::singletons(2);
        let mut eps = BTreeMap::new();
        eps.insert(("P".to_string(), vec![0]), false);
        eps.insert(("P".to_string(), vec![1]), true);
        let e = ElementaryExistential::new(
            &sig,
            vec![],
            vec!["y".to_string()],
            theta,
            p,
            eps,
        )
        .unwrap();
        let r = compute_star(&e);
        let c_idx = e.index_of(&Term::constant("c")).unwrap();
        assert_eq!(r.xi, vec![c_idx]);
        assert_eq!(r.stars[&c_idx], Term::constant("c"));
        assert_eq!(print_formula(&r.formula), "(P c)");
    }

    /// The random chooser yields a formula equivalent up to congruence
    /// reasoning; on this instance every choice gives a syntactically equal
    /// set of conjuncts or the documented variant.
    #[test]
    fn random_choice_changes_only_presentation() {
        use rand::SeedableRng;
        let sig = parse_signature("(fun F 1)").unwrap();
        let theta = subterm_closure([Term::app("F", vec![v("x")]), Term::app("F", vec![v("y")])]);
        let p = Partition::from_classes(4, &[vec![0, 3], vec![1, 2]]).unwrap();
        let e = ElementaryExistential::new(
            &sig,
            vec!["x".to_string(), "y".to_string()],
            vec![],
            theta,
            p,
            BTreeMap::new(),
        )
        .unwrap();
        let base = compute_star(&e);
        for seed in 0..20u64 {
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let r = compute_star_with(&e, StarChoice::Random(&mut rng));
            assert_eq!(r.xi, base.xi);
            assert!(crate::euf::formulas_equivalent(&r.formula, &base.formula));
        }
    }
}
