//! Textual format for translations.
//!
//! ```text
//! (translation
//!   (dim 1)
//!   (domain FORMULA)
//!   (eq FORMULA)
//!   (rel P FORMULA)
//!   (fun F (term TERM ...))
//!   (fun G (graph FORMULA)))
//! ```
//!
//! `dim` is required; `domain` and `eq` are optional.  Member formulas and
//! terms are written over the target signature in the positional variables
//! `v0, v1, ...`; a `fun` body is either a `term` form with one term per
//! dimension or a `graph` form with a single formula.

use super::{FunDef, InterpError, Translation};
use crate::syntax::parser::{
    formula_from_sexpr, print_formula, term_from_sexpr, ParseError,
};
use crate::syntax::sexpr::{self, Pos, Sexpr};
use crate::syntax::Signature;
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TranslationFileError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("{pos}: {err}")]
    At { pos: Pos, err: InterpError },
    #[error("{pos}: {msg}")]
    Malformed { pos: Pos, msg: String },
}

fn malformed(pos: Pos, msg: impl Into<String>) -> TranslationFileError {
    TranslationFileError::Malformed { pos, msg: msg.into() }
}

/// Parses a translation file; member formulas are read over `target`.
pub fn parse_translation(
    text: &str,
    source: &Signature,
    target: &Signature,
) -> Result<Translation, TranslationFileError> {
    let form = sexpr::read_one(text).map_err(ParseError::from)?;
    let Sexpr::List(items, pos) = &form else {
        return Err(malformed(form.pos(), "expected a (translation ...) form"));
    };
    if items.first().and_then(Sexpr::as_atom) != Some("translation") {
        return Err(malformed(*pos, "expected a (translation ...) form"));
    }
    let mut dim: Option<usize> = None;
    let mut domain = None;
    let mut equality = None;
    let mut rels = BTreeMap::new();
    let mut funs = BTreeMap::new();
    for item in &items[1..] {
        let Sexpr::List(sub, sub_pos) = item else {
            return Err(malformed(item.pos(), "expected a (dim|domain|eq|rel|fun ...) form"));
        };
        match sub.first().and_then(Sexpr::as_atom) {
            Some("dim") => {
                if sub.len() != 2 || dim.is_some() {
                    return Err(malformed(*sub_pos, "malformed or repeated dim form"));
                }
                dim = sub[1].as_atom().and_then(|s| s.parse::<usize>().ok());
                if dim.is_none() {
                    return Err(malformed(sub[1].pos(), "expected a number"));
                }
            }
            Some("domain") => {
                if sub.len() != 2 || domain.is_some() {
                    return Err(malformed(*sub_pos, "malformed or repeated domain form"));
                }
                domain = Some(formula_from_sexpr(&sub[1], target)?);
            }
            Some("eq") => {
                if sub.len() != 2 || equality.is_some() {
                    return Err(malformed(*sub_pos, "malformed or repeated eq form"));
                }
                equality = Some(formula_from_sexpr(&sub[1], target)?);
            }
            Some("rel") => {
                if sub.len() != 3 {
                    return Err(malformed(*sub_pos, "expected (rel NAME FORMULA)"));
                }
                let name = sub[1]
                    .as_atom()
                    .ok_or_else(|| malformed(sub[1].pos(), "expected a relation name"))?;
                if rels
                    .insert(name.to_string(), formula_from_sexpr(&sub[2], target)?)
                    .is_some()
                {
                    return Err(malformed(*sub_pos, format!("repeated rel form for {name}")));
                }
            }
            Some("fun") => {
                if sub.len() != 3 {
                    return Err(malformed(
                        *sub_pos,
                        "expected (fun NAME (term ...)) or (fun NAME (graph FORMULA))",
                    ));
                }
                let name = sub[1]
                    .as_atom()
                    .ok_or_else(|| malformed(sub[1].pos(), "expected a function name"))?;
                let def = fun_def(&sub[2], target)?;
                if funs.insert(name.to_string(), def).is_some() {
                    return Err(malformed(*sub_pos, format!("repeated fun form for {name}")));
                }
            }
            _ => return Err(malformed(*sub_pos, "expected dim, domain, eq, rel, or fun")),
        }
    }
    let dim = dim.ok_or_else(|| malformed(*pos, "missing (dim N)"))?;
    Translation::new(source.clone(), target.clone(), dim, domain, equality, rels, funs)
        .map_err(|err| TranslationFileError::At { pos: *pos, err })
}

fn fun_def(form: &Sexpr, target: &Signature) -> Result<FunDef, TranslationFileError> {
    let Sexpr::List(body, body_pos) = form else {
        return Err(malformed(form.pos(), "expected (term ...) or (graph FORMULA)"));
    };
    match body.first().and_then(Sexpr::as_atom) {
        Some("term") => {
            if body.len() < 2 {
                return Err(malformed(*body_pos, "expected at least one term"));
            }
            let terms = body[1..]
                .iter()
                .map(|t| term_from_sexpr(t, target))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(FunDef::Terms(terms))
        }
        Some("graph") => {
            if body.len() != 2 {
                return Err(malformed(*body_pos, "expected (graph FORMULA)"));
            }
            Ok(FunDef::Graph(formula_from_sexpr(&body[1], target)?))
        }
        _ => Err(malformed(*body_pos, "expected term or graph")),
    }
}

/// Prints a translation in the format accepted by [`parse_translation`].
pub fn print_translation(i: &Translation) -> String {
    let mut out = String::new();
    out.push_str("(translation\n");
    out.push_str(&format!("  (dim {})\n", i.dim()));
    if let Some(d) = i.domain() {
        out.push_str(&format!("  (domain {})\n", print_formula(d)));
    }
    if let Some(e) = i.equality() {
        out.push_str(&format!("  (eq {})\n", print_formula(e)));
    }
    for (name, _) in i.source().relations() {
        let f = i.rel_formula(name).expect("validated translations cover every relation");
        out.push_str(&format!("  (rel {name} {})\n", print_formula(f)));
    }
    for (name, _) in i.source().functions() {
        match i.fun_def(name).expect("validated translations cover every function") {
            FunDef::Terms(ts) => {
                let shown: Vec<String> = ts.iter().map(|t| format!("{t}")).collect();
                out.push_str(&format!("  (fun {name} (term {}))\n", shown.join(" ")));
            }
            FunDef::Graph(g) => {
                out.push_str(&format!("  (fun {name} (graph {}))\n", print_formula(g)));
            }
        }
    }
    out.push(')');
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parser::parse_signature;

    fn source() -> Signature {
        parse_signature("(fun F 1) (rel P 1) (const c)").unwrap()
    }

    fn target() -> Signature {
        parse_signature("(fun H 2) (rel D 1) (rel Q 2) (const c)").unwrap()
    }

    #[test]
    fn parses_a_full_translation() {
        let text = "(translation (dim 1) (domain (D v0)) (rel P (Q v0 v0)) \
                    (fun F (term (H v0 v0))) (fun c (term c)))";
        let i = parse_translation(text, &source(), &target()).unwrap();
        assert_eq!(i.dim(), 1);
        assert!(i.domain().is_some());
        assert!(i.equality().is_none());
        assert!(matches!(i.fun_def("F"), Some(FunDef::Terms(_))));
    }

    #[test]
    fn parses_graph_definitions() {
        let text = "(translation (dim 1) (rel P (Q v0 v0)) \
                    (fun F (graph (Q v0 v1))) (fun c (term c)))";
        let i = parse_translation(text, &source(), &target()).unwrap();
        assert!(matches!(i.fun_def("F"), Some(FunDef::Graph(_))));
    }

    #[test]
    fn missing_dim_is_rejected() {
        let text = "(translation (rel P (Q v0 v0)) (fun F (term (H v0 v0))) (fun c (term c)))";
        assert!(matches!(
            parse_translation(text, &source(), &target()),
            Err(TranslationFileError::Malformed { .. })
        ));
    }

    #[test]
    fn uncovered_symbols_are_rejected() {
        let text = "(translation (dim 1) (fun F (term (H v0 v0))) (fun c (term c)))";
        assert!(matches!(
            parse_translation(text, &source(), &target()),
            Err(TranslationFileError::At { err: InterpError::Uncovered(_), .. })
        ));
    }

    #[test]
    fn out_of_range_slots_are_rejected() {
        let text = "(translation (dim 1) (rel P (Q v0 v1)) \
                    (fun F (term (H v0 v0))) (fun c (term c)))";
        assert!(matches!(
            parse_translation(text, &source(), &target()),
            Err(TranslationFileError::At { err: InterpError::SlotOutOfRange { .. }, .. })
        ));
    }

    #[test]
    fn print_parse_round_trip() {
        let text = "(translation (dim 2) (domain (D v0)) \
                    (eq (and (= v0 v2) (= v1 v3))) (rel P (Q v0 v1)) \
                    (fun F (term (H v0 v1) v0)) (fun c (term c c)))";
        let i = parse_translation(text, &source(), &target()).unwrap();
        let printed = print_translation(&i);
        let again = parse_translation(&printed, &source(), &target()).unwrap();
        assert_eq!(i, again);
    }

    #[test]
    fn identity_round_trips_through_text() {
        let sig = source();
        let i = Translation::identity(&sig);
        let again = parse_translation(&print_translation(&i), &sig, &sig).unwrap();
        assert_eq!(i, again);
    }
}
