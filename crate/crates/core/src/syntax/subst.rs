//! Capture-avoiding substitution.

use super::{Formula, Term};
use std::collections::{BTreeMap, BTreeSet};

/// First name of the form `base_1`, `base_2`, ... not in `avoid`.
pub fn fresh_name(base: &str, avoid: &BTreeSet<String>) -> String {
    for k in 1.. {
        let candidate = format!("{base}_{k}");
        if !avoid.contains(&candidate) {
            return candidate;
        }
    }
    unreachable!()
}

/// Simultaneous substitution of terms for variables in a term.
pub fn substitute_term(t: &Term, binding: &BTreeMap<String, Term>) -> Term {
    match t {
        Term::Var(v) => binding.get(v).cloned().unwrap_or_else(|| t.clone()),
        Term::App(name, args) => Term::App(
            name.clone(),
            args.iter().map(|a| substitute_term(a, binding)).collect(),
        ),
    }
}

/// Simultaneous capture-avoiding substitution of terms for free variables.
///
/// A binder whose variable would capture a variable of a substituted term is
/// renamed to the first free `name_k`; the avoided set includes every
/// variable of the formula and of the substituted terms, so renaming cannot
/// introduce a second clash.
pub fn substitute(f: &Formula, binding: &BTreeMap<String, Term>) -> Formula {
    if binding.is_empty() {
        return f.clone();
    }
    let mut avoid: BTreeSet<String> = f.all_vars();
    for t in binding.values() {
        t.vars_into(&mut avoid);
    }
    go(f, binding, &mut avoid)
}

fn go(f: &Formula, binding: &BTreeMap<String, Term>, avoid: &mut BTreeSet<String>) -> Formula {
    match f {
        Formula::True | Formula::False => f.clone(),
        Formula::Eq(l, r) => Formula::Eq(substitute_term(l, binding), substitute_term(r, binding)),
        Formula::Rel(name, args) => Formula::Rel(
            name.clone(),
            args.iter().map(|a| substitute_term(a, binding)).collect(),
        ),
        Formula::Not(g) => Formula::not(go(g, binding, avoid)),
        Formula::And(a, b) => Formula::and(go(a, binding, avoid), go(b, binding, avoid)),
        Formula::Or(a, b) => Formula::or(go(a, binding, avoid), go(b, binding, avoid)),
        Formula::Imp(a, b) => Formula::imp(go(a, binding, avoid), go(b, binding, avoid)),
        Formula::Iff(a, b) => Formula::iff(go(a, binding, avoid), go(b, binding, avoid)),
        Formula::Exists(v, g) | Formula::Forall(v, g) => {
            // The binder shadows v, so drop it from the substitution.
            let mut inner: BTreeMap<String, Term> = binding
                .iter()
                .filter(|(k, _)| *k != v)
                .map(|(k, t)| (k.clone(), t.clone()))
                .collect();
            // Rename the binder if a substituted term mentions v and would be
            // captured.  Only bindings for variables actually free in the
            // body matter.
            let body_free = g.free_vars();
            let captured = inner
                .iter()
                .any(|(k, t)| body_free.contains(k) && t.vars().contains(v));
            let (v2, g2) = if captured {
                let fresh = fresh_name(v, avoid);
                avoid.insert(fresh.clone());
                inner.insert(v.clone(), Term::var(fresh.clone()));
                (fresh, go(g, &inner, avoid))
            } else {
                let g2 = if inner.is_empty() { (**g).clone() } else { go(g, &inner, avoid) };
                (v.clone(), g2)
            };
            match f {
                Formula::Exists(..) => Formula::exists(v2, g2),
                _ => Formula::forall(v2, g2),
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parser::{parse_formula, print_formula};
    use crate::syntax::Signature;

    fn v(n: &str) -> Term {
        Term::var(n)
    }

    fn bind(pairs: &[(&str, Term)]) -> BTreeMap<String, Term> {
        pairs.iter().map(|(k, t)| (k.to_string(), t.clone())).collect()
    }

    #[test]
    fn renames_binder_to_avoid_capture() {
        let sig = Signature::new().with_fun("F", 1);
        let f = parse_formula("(exists y (= (F y) x))", &sig).unwrap();
        let out = substitute(&f, &bind(&[("x", v("y"))]));
        assert_eq!(print_formula(&out), "(exists y_1 (= (F y_1) y))");
    }

    #[test]
    fn substitutes_into_open_formula() {
        let sig = Signature::new().with_fun("F", 1).with_const("c");
        let f = parse_formula("(= (F x) x)", &sig).unwrap();
        let out = substitute(&f, &bind(&[("x", Term::constant("c"))]));
        assert_eq!(print_formula(&out), "(= (F c) c)");
    }

    #[test]
    fn identity_binding_preserves_ast() {
        let sig = Signature::new().with_fun("F", 1);
        let f = parse_formula("(forall y (= (F y) x))", &sig).unwrap();
        let out = substitute(&f, &bind(&[("x", v("x"))]));
        assert_eq!(out, f);
    }

    #[test]
    fn bound_occurrences_are_untouched() {
        let sig = Signature::new();
        let f = parse_formula("(and (= x x) (exists x (= x x)))", &sig).unwrap();
        let out = substitute(&f, &bind(&[("x", v("z"))]));
        assert_eq!(print_formula(&out), "(and (= z z) (exists x (= x x)))");
    }

    #[test]
    fn simultaneous_substitution_is_not_sequential() {
        let sig = Signature::new();
        let f = parse_formula("(= x y)", &sig).unwrap();
        let out = substitute(&f, &bind(&[("x", v("y")), ("y", v("x"))]));
        assert_eq!(print_formula(&out), "(= y x)");
    }

    #[test]
    fn symbol_occurrences_change_only_at_substituted_positions() {
        let sig = Signature::new().with_fun("F", 1).with_const("c");
        let f = parse_formula("(and (= (F x) x) (exists y (= (F y) x)))", &sig).unwrap();
        let t = Term::app("F", vec![Term::constant("c")]);
        let out = substitute(&f, &bind(&[("x", t)]));
        // x occurs free 3 times; each occurrence adds one F and one c to the
        // original two F occurrences.
        let count = |f: &Formula, sym: &str| {
            let mut n = 0usize;
            fn count_term(t: &Term, sym: &str, n: &mut usize) {
                if let Term::App(name, args) = t {
                    if name == sym {
                        *n += 1;
                    }
                    for a in args {
                        count_term(a, sym, n);
                    }
                }
            }
            f.walk(&mut |g| match g {
                Formula::Eq(l, r) => {
                    count_term(l, sym, &mut n);
                    count_term(r, sym, &mut n);
                }
                Formula::Rel(_, args) => args.iter().for_each(|a| count_term(a, sym, &mut n)),
                _ => {}
            });
            n
        };
        assert_eq!(count(&out, "F"), count(&f, "F") + 3);
        assert_eq!(count(&out, "c"), 3);
    }

    #[test]
    fn fresh_names_count_up() {
        let avoid: BTreeSet<String> = ["z_1".to_string(), "z_2".to_string()].into();
        assert_eq!(fresh_name("z", &avoid), "z_3");
        assert_eq!(fresh_name("w", &avoid), "w_1");
    }
}
