//! Explicit interpretation constructions: collapsing any functional
//! signature into one binary function plus constants, turning relations
//! into functions, and pairing terms witnessing surjective projections.

use super::{compose, slot, FunDef, InterpError, Translation};
use crate::syntax::{substitute_term, Formula, Signature, SymbolKind, Term};
use std::collections::BTreeMap;

/// Right-nested tuple over a binary pair function:
/// `(a0, a1, ..., ak) = (a0, (a1, (... , ak)))`.
fn tuple_term(pair: &str, mut items: Vec<Term>) -> Term {
    let last = items.pop().expect("tuples have at least one component");
    items
        .into_iter()
        .rev()
        .fold(last, |acc, item| Term::app(pair, vec![item, acc]))
}

/// A name built from `base` that avoids every symbol of `sig` and of the
/// target signature under construction, grown with underscores until free.
fn unclaimed(base: &str, sig: &Signature, target: &Signature) -> String {
    let mut name = base.to_string();
    while sig.kind_arity(&name).is_some() || target.kind_arity(&name).is_some() {
        name.push('_');
    }
    name
}

/// Translates `sig` into a language with one binary pair function, the
/// constants of `sig`, and one fresh tag constant per nonconstant function.
/// A function application becomes the tuple `((tag, args), args, args)`,
/// which the tag constants keep disjoint across function symbols.
///
/// Relations are not expressible in the target directly; with
/// `preprocess_relations` each relation `R` first becomes the equation
/// `F_R(args) = c` for a fresh function `F_R` and an existing constant `c`,
/// and the reduction applies to the enlarged functional signature.
///
/// Returns the translation, its target signature, and the pairwise
/// distinctness sentences for the tag constants.  Distinctness is asserted
/// only among the tags, not against the source constants.
pub fn binary_reduction(
    sig: &Signature,
    preprocess_relations: bool,
) -> Result<(Translation, Signature, Vec<Formula>), InterpError> {
    let has_relations = sig.relations().next().is_some();
    if has_relations && !preprocess_relations {
        return Err(InterpError::RelationsNeedPreprocessing);
    }
    if has_relations {
        let preprocessing = relations_to_functions(sig)?;
        let functional = preprocessing.target().clone();
        let (core, target, distinctness) = binary_core(&functional);
        let composed = compose(&core, &preprocessing)?;
        return Ok((composed, target, distinctness));
    }
    let (core, target, distinctness) = binary_core(sig);
    Ok((core, target, distinctness))
}

/// The reduction for a relation-free signature.
fn binary_core(sig: &Signature) -> (Translation, Signature, Vec<Formula>) {
    let mut target = Signature::new();
    let pair = unclaimed("pair", sig, &target);
    target
        .declare(&pair, SymbolKind::Function, 2)
        .expect("the pair symbol is the first declaration");
    for c in sig.constants() {
        target
            .declare(c, SymbolKind::Function, 0)
            .expect("source constants are distinct from the fresh pair symbol");
    }
    let mut tags: BTreeMap<String, String> = BTreeMap::new();
    for (name, arity) in sig.functions() {
        if arity == 0 {
            continue;
        }
        let tag = unclaimed(&format!("pair_tag_{name}"), sig, &target);
        target
            .declare(&tag, SymbolKind::Function, 0)
            .expect("freshness checks both signatures");
        tags.insert(name.to_string(), tag);
    }
    let funs = sig
        .functions()
        .map(|(name, arity)| {
            let def = if arity == 0 {
                FunDef::Terms(vec![Term::constant(name)])
            } else {
                let args: Vec<Term> = (0..arity).map(|i| Term::var(slot(i))).collect();
                let mut tagged = vec![Term::constant(&tags[name])];
                tagged.extend(args.iter().cloned());
                let mut items = vec![tuple_term(&pair, tagged)];
                items.extend(args.iter().cloned());
                items.extend(args);
                FunDef::Terms(vec![tuple_term(&pair, items)])
            };
            (name.to_string(), def)
        })
        .collect();
    let translation = Translation::new(
        sig.clone(),
        target.clone(),
        1,
        None,
        None,
        BTreeMap::new(),
        funs,
    )
    .expect("the reduction produces a well-formed translation");
    let tag_names: Vec<&String> = tags.values().collect();
    let mut distinctness = Vec::new();
    for (i, a) in tag_names.iter().enumerate() {
        for b in &tag_names[i + 1..] {
            distinctness.push(Formula::not(Formula::eq(
                Term::constant(*a),
                Term::constant(*b),
            )));
        }
    }
    (translation, target, distinctness)
}

/// Replaces each relation `R` by the equation `F_R(args) = c`, with `F_R` a
/// fresh function of the same arity and `c` the first constant of `sig`.
/// The functions of `sig` pass through unchanged.
fn relations_to_functions(sig: &Signature) -> Result<Translation, InterpError> {
    let anchor = sig
        .constants()
        .next()
        .ok_or(InterpError::NeedsConstant)?
        .to_string();
    let mut target = Signature::new();
    for (name, arity) in sig.functions() {
        target
            .declare(name, SymbolKind::Function, arity)
            .expect("source functions are distinct");
    }
    let mut rels = BTreeMap::new();
    let mut rel_funs: BTreeMap<String, String> = BTreeMap::new();
    for (name, arity) in sig.relations() {
        let fr = unclaimed(&format!("rel_{name}"), sig, &target);
        target
            .declare(&fr, SymbolKind::Function, arity)
            .expect("freshness checks both signatures");
        rel_funs.insert(name.to_string(), fr.clone());
        let args: Vec<Term> = (0..arity).map(|i| Term::var(slot(i))).collect();
        rels.insert(
            name.to_string(),
            Formula::eq(Term::app(fr, args), Term::constant(&anchor)),
        );
    }
    let funs = sig
        .functions()
        .map(|(name, arity)| {
            let args: Vec<Term> = (0..arity).map(|i| Term::var(slot(i))).collect();
            (name.to_string(), FunDef::Terms(vec![Term::app(name, args)]))
        })
        .collect();
    Ok(Translation::new(sig.clone(), target, 1, None, None, rels, funs)
        .expect("relation preprocessing produces a well-formed translation"))
}

/// Terms `L(x)` and `R(x)` acting as jointly surjective projections, with
/// the sentence `∀x,y ∃z (L(z)=x ∧ R(z)=y)` they satisfy.  With two unary
/// functions the symbols themselves project; a `k`-ary function (`k ≥ 2`)
/// yields `L(x) = F(F(x,..,x),x,..,x)` and `R(x) = F(x,..,x,F(x,..,x))`.
pub fn pairing_terms(sig: &Signature) -> Result<(Term, Term, Formula), InterpError> {
    let x = || Term::var("x");
    let unaries: Vec<&str> = sig
        .functions()
        .filter(|&(_, arity)| arity == 1)
        .map(|(name, _)| name)
        .collect();
    let (left, right) = if unaries.len() >= 2 {
        (
            Term::app(unaries[0], vec![x()]),
            Term::app(unaries[1], vec![x()]),
        )
    } else if let Some((name, arity)) = sig.functions().find(|&(_, arity)| arity >= 2) {
        let spread = |special: Option<usize>| -> Term {
            let inner = Term::app(name, vec![x(); arity]);
            let args: Vec<Term> = (0..arity)
                .map(|i| if special == Some(i) { inner.clone() } else { x() })
                .collect();
            Term::app(name, args)
        };
        (spread(Some(0)), spread(Some(arity - 1)))
    } else {
        return Err(InterpError::NoPairingCapacity);
    };
    let z = BTreeMap::from([("x".to_string(), Term::var("z"))]);
    let theorem = Formula::forall(
        "x",
        Formula::forall(
            "y",
            Formula::exists(
                "z",
                Formula::and(
                    Formula::eq(substitute_term(&left, &z), Term::var("x")),
                    Formula::eq(substitute_term(&right, &z), Term::var("y")),
                ),
            ),
        ),
    );
    Ok((left, right, theorem))
}
