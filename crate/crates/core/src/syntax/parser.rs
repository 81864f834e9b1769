//! Parsing and printing of formulas and signature files.
//!
//! Formulas use fully parenthesized prefix syntax:
//!
//! ```text
//! (forall x (exists z (and (= (L z) x) (not (P z)))))
//! ```
//!
//! Connective tokens are `forall`, `exists`, `and`, `or`, `not`, `imp`,
//! `iff`, `=`, `true`, `false`; they are reserved words.  `and` and `or`
//! accept two or more arguments and fold to the right; quantifiers accept one
//! or more variables before the body.  A bare identifier is a variable, a
//! constant, or a nullary relation atom depending on the signature, which is
//! why every parse is signature-directed.  Printing always emits the binary,
//! one-variable-per-quantifier form, so `parse(print(f)) == f` for every
//! formula `f`.
//!
//! Signature files are sequences of declarations:
//!
//! ```text
//! (fun F 1) (rel P 2) (const c)
//! ```

use super::sexpr::{self, Pos, Sexpr, SexprError};
use super::{Formula, Signature, SymbolKind, SyntaxError, Term};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error(transparent)]
    Lex(#[from] SexprError),
    #[error("{pos}: {err}")]
    At { pos: Pos, err: SyntaxError },
    #[error("{pos}: {msg}")]
    Malformed { pos: Pos, msg: String },
}

fn malformed(pos: Pos, msg: impl Into<String>) -> ParseError {
    ParseError::Malformed { pos, msg: msg.into() }
}

const KEYWORDS: &[&str] = [
    "forall", "exists", "and", "or", "not", "imp", "iff", "=", "true", "false",
]
.as_slice();

fn is_keyword(s: &str) -> bool {
    KEYWORDS.contains(&s)
}

fn check_name(name: &str, pos: Pos) -> Result<(), ParseError> {
    let mut chars = name.chars();
    let head_ok = chars.next().is_some_and(|c| c.is_ascii_alphabetic() || c == '_');
    if !head_ok {
        return Err(malformed(pos, format!("invalid identifier {name:?}")));
    }
    if is_keyword(name) {
        return Err(malformed(pos, format!("{name} is a reserved word")));
    }
    Ok(())
}

/// Parses one formula and checks it against `sig`.
pub fn parse_formula(text: &str, sig: &Signature) -> Result<Formula, ParseError> {
    let form = sexpr::read_one(text)?;
    formula_from_sexpr(&form, sig)
}

/// Parses a whole file of formulas, one per top-level form.
pub fn parse_formulas(text: &str, sig: &Signature) -> Result<Vec<Formula>, ParseError> {
    sexpr::read_all(text)?
        .iter()
        .map(|form| formula_from_sexpr(form, sig))
        .collect()
}

pub fn formula_from_sexpr(form: &Sexpr, sig: &Signature) -> Result<Formula, ParseError> {
    match form {
        Sexpr::Atom(tok, pos) => match tok.as_str() {
            "true" => Ok(Formula::True),
            "false" => Ok(Formula::False),
            name => match sig.kind_arity(name) {
                Some((SymbolKind::Relation, 0)) => Ok(Formula::Rel(name.to_string(), Vec::new())),
                Some((SymbolKind::Relation, arity)) => Err(ParseError::At {
                    pos: *pos,
                    err: SyntaxError::ArityMismatch {
                        name: name.to_string(),
                        expected: arity,
                        got: 0,
                    },
                }),
                _ => Err(malformed(
                    *pos,
                    format!("expected a formula, found term {name}"),
                )),
            },
        },
        Sexpr::List(items, pos) => {
            let head = match items.first() {
                Some(h) => h,
                None => return Err(malformed(*pos, "empty form")),
            };
            let Sexpr::Atom(op, op_pos) = head else {
                return Err(malformed(head.pos(), "expected an operator or symbol"));
            };
            let args = &items[1..];
            match op.as_str() {
                "not" => {
                    expect_args(op, args, 1, *pos)?;
                    Ok(Formula::not(formula_from_sexpr(&args[0], sig)?))
                }
                "and" | "or" => {
                    if args.len() < 2 {
                        return Err(malformed(
                            *pos,
                            format!("{op} expects at least 2 arguments, got {}", args.len()),
                        ));
                    }
                    let parts: Vec<Formula> = args
                        .iter()
                        .map(|a| formula_from_sexpr(a, sig))
                        .collect::<Result<_, _>>()?;
                    Ok(if op == "and" {
                        Formula::and_all(parts)
                    } else {
                        Formula::or_all(parts)
                    })
                }
                "imp" | "iff" => {
                    expect_args(op, args, 2, *pos)?;
                    let a = formula_from_sexpr(&args[0], sig)?;
                    let b = formula_from_sexpr(&args[1], sig)?;
                    Ok(if op == "imp" {
                        Formula::imp(a, b)
                    } else {
                        Formula::iff(a, b)
                    })
                }
                "=" => {
                    expect_args(op, args, 2, *pos)?;
                    let l = term_from_sexpr(&args[0], sig)?;
                    let r = term_from_sexpr(&args[1], sig)?;
                    Ok(Formula::Eq(l, r))
                }
                "forall" | "exists" => {
                    if args.len() < 2 {
                        return Err(malformed(
                            *pos,
                            format!("{op} expects variables and a body"),
                        ));
                    }
                    let (vars, body) = args.split_at(args.len() - 1);
                    let mut names = Vec::with_capacity(vars.len());
                    for v in vars {
                        let Sexpr::Atom(name, vpos) = v else {
                            return Err(malformed(v.pos(), "expected a variable name"));
                        };
                        check_name(name, *vpos)?;
                        if sig.contains(name) {
                            return Err(malformed(
                                *vpos,
                                format!("bound variable {name} clashes with a declared symbol"),
                            ));
                        }
                        names.push(name.clone());
                    }
                    let mut f = formula_from_sexpr(&body[0], sig)?;
                    for name in names.into_iter().rev() {
                        f = if op == "forall" {
                            Formula::forall(name, f)
                        } else {
                            Formula::exists(name, f)
                        };
                    }
                    Ok(f)
                }
                name => match sig.kind_arity(name) {
                    Some((SymbolKind::Relation, arity)) => {
                        if args.len() != arity {
                            return Err(ParseError::At {
                                pos: *op_pos,
                                err: SyntaxError::ArityMismatch {
                                    name: name.to_string(),
                                    expected: arity,
                                    got: args.len(),
                                },
                            });
                        }
                        let ts: Vec<Term> = args
                            .iter()
                            .map(|a| term_from_sexpr(a, sig))
                            .collect::<Result<_, _>>()?;
                        Ok(Formula::Rel(name.to_string(), ts))
                    }
                    Some((SymbolKind::Function, _)) => Err(ParseError::At {
                        pos: *op_pos,
                        err: SyntaxError::WrongKind {
                            name: name.to_string(),
                            kind: SymbolKind::Function,
                            used_as: SymbolKind::Relation,
                        },
                    }),
                    None => Err(ParseError::At {
                        pos: *op_pos,
                        err: SyntaxError::UnknownSymbol(name.to_string()),
                    }),
                },
            }
        }
    }
}

pub fn term_from_sexpr(form: &Sexpr, sig: &Signature) -> Result<Term, ParseError> {
    match form {
        Sexpr::Atom(tok, pos) => {
            check_name(tok, *pos)?;
            match sig.kind_arity(tok) {
                None => Ok(Term::Var(tok.clone())),
                Some((SymbolKind::Function, 0)) => Ok(Term::constant(tok.clone())),
                Some((SymbolKind::Function, arity)) => Err(ParseError::At {
                    pos: *pos,
                    err: SyntaxError::ArityMismatch {
                        name: tok.clone(),
                        expected: arity,
                        got: 0,
                    },
                }),
                Some((SymbolKind::Relation, _)) => Err(ParseError::At {
                    pos: *pos,
                    err: SyntaxError::WrongKind {
                        name: tok.clone(),
                        kind: SymbolKind::Relation,
                        used_as: SymbolKind::Function,
                    },
                }),
            }
        }
        Sexpr::List(items, pos) => {
            let head = match items.first() {
                Some(Sexpr::Atom(name, hpos)) => (name, *hpos),
                Some(other) => return Err(malformed(other.pos(), "expected a function symbol")),
                None => return Err(malformed(*pos, "empty term")),
            };
            let (name, hpos) = head;
            if is_keyword(name) {
                return Err(malformed(
                    hpos,
                    format!("{name} is a connective, not a function symbol"),
                ));
            }
            match sig.kind_arity(name) {
                Some((SymbolKind::Function, arity)) => {
                    if items.len() - 1 != arity {
                        return Err(ParseError::At {
                            pos: hpos,
                            err: SyntaxError::ArityMismatch {
                                name: name.clone(),
                                expected: arity,
                                got: items.len() - 1,
                            },
                        });
                    }
                    let args: Vec<Term> = items[1..]
                        .iter()
                        .map(|a| term_from_sexpr(a, sig))
                        .collect::<Result<_, _>>()?;
                    Ok(Term::App(name.clone(), args))
                }
                Some((SymbolKind::Relation, _)) => Err(ParseError::At {
                    pos: hpos,
                    err: SyntaxError::WrongKind {
                        name: name.clone(),
                        kind: SymbolKind::Relation,
                        used_as: SymbolKind::Function,
                    },
                }),
                None => Err(ParseError::At {
                    pos: hpos,
                    err: SyntaxError::UnknownSymbol(name.clone()),
                }),
            }
        }
    }
}

fn expect_args(op: &str, args: &[Sexpr], n: usize, pos: Pos) -> Result<(), ParseError> {
    if args.len() != n {
        return Err(malformed(
            pos,
            format!("{op} expects exactly {n} argument(s), got {}", args.len()),
        ));
    }
    Ok(())
}

/// Prints in the canonical form accepted by [`parse_formula`]: binary `and`
/// and `or`, one variable per quantifier, nullary atoms as bare names.
pub fn print_formula(f: &Formula) -> String {
    match f {
        Formula::True => "true".to_string(),
        Formula::False => "false".to_string(),
        Formula::Eq(l, r) => format!("(= {l} {r})"),
        Formula::Rel(name, args) if args.is_empty() => name.clone(),
        Formula::Rel(name, args) => {
            let mut s = format!("({name}");
            for a in args {
                s.push(' ');
                s.push_str(&a.to_string());
            }
            s.push(')');
            s
        }
        Formula::Not(g) => format!("(not {})", print_formula(g)),
        Formula::And(a, b) => format!("(and {} {})", print_formula(a), print_formula(b)),
        Formula::Or(a, b) => format!("(or {} {})", print_formula(a), print_formula(b)),
        Formula::Imp(a, b) => format!("(imp {} {})", print_formula(a), print_formula(b)),
        Formula::Iff(a, b) => format!("(iff {} {})", print_formula(a), print_formula(b)),
        Formula::Exists(v, g) => format!("(exists {v} {})", print_formula(g)),
        Formula::Forall(v, g) => format!("(forall {v} {})", print_formula(g)),
    }
}

/// Parses a signature file: a sequence of `(fun NAME ARITY)`,
/// `(rel NAME ARITY)`, and `(const NAME)` forms.
pub fn parse_signature(text: &str) -> Result<Signature, ParseError> {
    let forms = sexpr::read_all(text)?;
    let mut sig = Signature::new();
    for form in &forms {
        let Sexpr::List(items, pos) = form else {
            return Err(malformed(form.pos(), "expected a declaration form"));
        };
        let head = items
            .first()
            .and_then(Sexpr::as_atom)
            .ok_or_else(|| malformed(*pos, "expected fun, rel, or const"))?;
        let decl = |items: &[Sexpr], want_arity: bool| -> Result<(String, usize), ParseError> {
            let expected_len = if want_arity { 3 } else { 2 };
            if items.len() != expected_len {
                return Err(malformed(*pos, format!("malformed {head} declaration")));
            }
            let name_form = &items[1];
            let name = name_form
                .as_atom()
                .ok_or_else(|| malformed(name_form.pos(), "expected a symbol name"))?;
            check_name(name, name_form.pos())?;
            let arity = if want_arity {
                let a = &items[2];
                a.as_atom()
                    .and_then(|s| s.parse::<usize>().ok())
                    .ok_or_else(|| malformed(a.pos(), "expected a numeric arity"))?
            } else {
                0
            };
            Ok((name.to_string(), arity))
        };
        let (kind, name, arity) = match head {
            "fun" => {
                let (n, a) = decl(items, true)?;
                (SymbolKind::Function, n, a)
            }
            "rel" => {
                let (n, a) = decl(items, true)?;
                (SymbolKind::Relation, n, a)
            }
            "const" => {
                let (n, _) = decl(items, false)?;
                (SymbolKind::Function, n, 0)
            }
            other => {
                return Err(malformed(
                    *pos,
                    format!("expected fun, rel, or const, found {other}"),
                ))
            }
        };
        sig.declare(name, kind, arity)
            .map_err(|err| ParseError::At { pos: *pos, err })?;
    }
    Ok(sig)
}

/// Prints a signature as a parseable declaration sequence, one per line.
pub fn print_signature(sig: &Signature) -> String {
    let mut out = String::new();
    for (name, kind, arity) in sig.symbols() {
        let line = match (kind, arity) {
            (SymbolKind::Function, 0) => format!("(const {name})\n"),
            (SymbolKind::Function, a) => format!("(fun {name} {a})\n"),
            (SymbolKind::Relation, a) => format!("(rel {name} {a})\n"),
        };
        out.push_str(&line);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn v(n: &str) -> Term {
        Term::var(n)
    }

    fn pairing_sig() -> Signature {
        Signature::new().with_fun("L", 1).with_fun("R", 1)
    }

    #[test]
    fn parses_reflexivity() {
        let sig = Signature::new();
        let f = parse_formula("(= x x)", &sig).unwrap();
        assert_eq!(f, Formula::eq(v("x"), v("x")));
    }

    #[test]
    fn parses_pairing_body() {
        let f = parse_formula(
            "(exists z (and (= (L z) x) (= (R z) y)))",
            &pairing_sig(),
        )
        .unwrap();
        let expected = Formula::exists(
            "z",
            Formula::and(
                Formula::eq(Term::app("L", vec![v("z")]), v("x")),
                Formula::eq(Term::app("R", vec![v("z")]), v("y")),
            ),
        );
        assert_eq!(f, expected);
    }

    #[test]
    fn equality_applied_to_three_terms_is_an_error() {
        let sig = Signature::new().with_fun("F", 1);
        let err = parse_formula("(= (F x) y z)", &sig).unwrap_err();
        assert!(err.to_string().contains("exactly 2"));
    }

    #[test]
    fn arity_errors_carry_the_symbol() {
        let sig = Signature::new().with_fun("F", 1);
        let err = parse_formula("(= (F x y) x)", &sig).unwrap_err();
        assert!(matches!(
            err,
            ParseError::At {
                err: SyntaxError::ArityMismatch { .. },
                ..
            }
        ));
    }

    #[test]
    fn unknown_and_misused_symbols_error() {
        let sig = Signature::new().with_rel("P", 1);
        assert!(parse_formula("(Q x)", &sig).is_err());
        // Relation symbol in term position.
        assert!(parse_formula("(= (P x) x)", &sig).is_err());
        // Function symbol in formula position.
        let sig2 = Signature::new().with_fun("F", 1);
        assert!(parse_formula("(F x)", &sig2).is_err());
    }

    #[test]
    fn bare_identifiers_resolve_by_signature() {
        let sig = Signature::new().with_const("c").with_rel("P", 0);
        assert_eq!(
            parse_formula("(= c x)", &sig).unwrap(),
            Formula::eq(Term::constant("c"), v("x"))
        );
        assert_eq!(parse_formula("P", &sig).unwrap(), Formula::rel("P", vec![]));
    }

    #[test]
    fn quantifier_sugar_folds_right() {
        let sig = Signature::new();
        let f = parse_formula("(forall x y (= x y))", &sig).unwrap();
        assert_eq!(
            f,
            Formula::forall("x", Formula::forall("y", Formula::eq(v("x"), v("y"))))
        );
    }

    #[test]
    fn nary_and_folds_right() {
        let sig = Signature::new().with_rel("P", 0).with_rel("Q", 0).with_rel("S", 0);
        let f = parse_formula("(and P Q S)", &sig).unwrap();
        assert_eq!(
            f,
            Formula::and(
                Formula::rel("P", vec![]),
                Formula::and(Formula::rel("Q", vec![]), Formula::rel("S", vec![]))
            )
        );
    }

    #[test]
    fn bound_variable_may_not_shadow_symbol() {
        let sig = Signature::new().with_const("c");
        assert!(parse_formula("(exists c (= c c))", &sig).is_err());
    }

    #[test]
    fn prints_canonical_forms() {
        assert_eq!(print_formula(&Formula::eq(v("x"), v("x"))), "(= x x)");
        let f = Formula::exists(
            "z",
            Formula::and(
                Formula::eq(Term::app("L", vec![v("z")]), v("x")),
                Formula::eq(Term::app("R", vec![v("z")]), v("y")),
            ),
        );
        assert_eq!(
            print_formula(&f),
            "(exists z (and (= (L z) x) (= (R z) y)))"
        );
    }

    #[test]
    fn print_then_parse_is_identity_on_nested_quantifiers() {
        let sig = Signature::new().with_fun("F", 1).with_rel("P", 2);
        let f = Formula::forall(
            "x",
            Formula::imp(
                Formula::rel("P", vec![v("x"), Term::app("F", vec![v("x")])]),
                Formula::exists(
                    "y",
                    Formula::iff(
                        Formula::rel("P", vec![v("y"), v("x")]),
                        Formula::not(Formula::eq(v("y"), Term::app("F", vec![v("y")]))),
                    ),
                ),
            ),
        );
        let printed = print_formula(&f);
        assert_eq!(parse_formula(&printed, &sig).unwrap(), f);
    }

    #[test]
    fn signature_file_round_trip() {
        let text = "(fun F 2)\n(rel P 1)\n(const c)\n";
        let sig = parse_signature(text).unwrap();
        assert_eq!(sig.fun_arity("F"), Some(2));
        assert_eq!(sig.rel_arity("P"), Some(1));
        assert_eq!(sig.fun_arity("c"), Some(0));
        let printed = print_signature(&sig);
        assert_eq!(parse_signature(&printed).unwrap(), sig);
    }

    #[test]
    fn signature_file_rejects_duplicates_and_keywords() {
        assert!(parse_signature("(fun F 1) (rel F 2)").is_err());
        assert!(parse_signature("(const forall)").is_err());
        assert!(parse_signature("(fun F x)").is_err());
    }

    // Random formula generator for the round-trip property, over a fixed
    // signature with a unary function, a binary function, and relations of
    // arity 0 through 2.
    fn test_sig() -> Signature {
        Signature::new()
            .with_fun("F", 1)
            .with_fun("G", 2)
            .with_const("c")
            .with_rel("P", 1)
            .with_rel("Q", 2)
            .with_rel("Z", 0)
    }

    fn arb_term() -> impl Strategy<Value = Term> {
        let leaf = prop_oneof![
            prop_oneof![Just("x"), Just("y"), Just("z"), Just("w")].prop_map(Term::var),
            Just(Term::constant("c")),
        ];
        leaf.prop_recursive(3, 16, 2, |inner| {
            prop_oneof![
                inner.clone().prop_map(|t| Term::app("F", vec![t])),
                (inner.clone(), inner).prop_map(|(a, b)| Term::app("G", vec![a, b])),
            ]
        })
    }

    fn arb_formula() -> impl Strategy<Value = Formula> {
        let atom = prop_oneof![
            Just(Formula::True),
            Just(Formula::False),
            Just(Formula::rel("Z", vec![])),
            (arb_term(), arb_term()).prop_map(|(l, r)| Formula::eq(l, r)),
            arb_term().prop_map(|t| Formula::rel("P", vec![t])),
            (arb_term(), arb_term()).prop_map(|(a, b)| Formula::rel("Q", vec![a, b])),
        ];
        atom.prop_recursive(4, 24, 2, |inner| {
            let var = prop_oneof![Just("x"), Just("y"), Just("z"), Just("w")];
            prop_oneof![
                inner.clone().prop_map(Formula::not),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::and(a, b)),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::or(a, b)),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::imp(a, b)),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::iff(a, b)),
                (var.clone(), inner.clone()).prop_map(|(v, f)| Formula::exists(v, f)),
                (var, inner).prop_map(|(v, f)| Formula::forall(v, f)),
            ]
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(256))]

        #[test]
        fn parse_print_round_trip(f in arb_formula()) {
            let sig = test_sig();
            let printed = print_formula(&f);
            let reparsed = parse_formula(&printed, &sig).unwrap();
            prop_assert_eq!(reparsed, f);
        }

        #[test]
        fn parsing_never_panics(s in "[(); =a-z0-9]{0,40}") {
            let _ = parse_formula(&s, &test_sig());
        }
    }
}
