//! Textual format for finite structures.
//!
//! ```text
//! (structure
//!   (domain 2)
//!   (fun F ((0) 1) ((1) 1))
//!   (fun c (() 0))
//!   (rel P (0)))
//! ```
//!
//! `domain` gives the size; each `fun` form lists `((args...) value)` entries
//! and each `rel` form lists the tuples where the relation holds.  Function
//! entries not listed default to element 0.

use super::{FiniteStructure, StructureError};
use crate::syntax::parser::ParseError;
use crate::syntax::sexpr::{self, Pos, Sexpr};
use crate::syntax::{Signature, SymbolKind};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StructureFileError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("{pos}: {err}")]
    At { pos: Pos, err: StructureError },
    #[error("{pos}: {msg}")]
    Malformed { pos: Pos, msg: String },
}

fn malformed(pos: Pos, msg: impl Into<String>) -> StructureFileError {
    StructureFileError::Malformed { pos, msg: msg.into() }
}

fn number(form: &Sexpr) -> Result<usize, StructureFileError> {
    form.as_atom()
        .and_then(|s| s.parse::<usize>().ok())
        .ok_or_else(|| malformed(form.pos(), "expected a number"))
}

fn number_list(form: &Sexpr) -> Result<Vec<usize>, StructureFileError> {
    match form {
        Sexpr::List(items, _) => items.iter().map(number).collect(),
        Sexpr::Atom(..) => Err(malformed(form.pos(), "expected a tuple")),
    }
}

/// Parses a structure file against `sig`.
pub fn parse_structure(text: &str, sig: &Signature) -> Result<FiniteStructure, StructureFileError> {
    let form = sexpr::read_one(text).map_err(ParseError::from)?;
    let Sexpr::List(items, pos) = &form else {
        return Err(malformed(form.pos(), "expected a (structure ...) form"));
    };
    if items.first().and_then(Sexpr::as_atom) != Some("structure") {
        return Err(malformed(*pos, "expected a (structure ...) form"));
    }
    let mut size: Option<usize> = None;
    let mut body = Vec::new();
    for item in &items[1..] {
        let Sexpr::List(sub, sub_pos) = item else {
            return Err(malformed(item.pos(), "expected a (domain|fun|rel ...) form"));
        };
        match sub.first().and_then(Sexpr::as_atom) {
            Some("domain") => {
                if sub.len() != 2 || size.is_some() {
                    return Err(malformed(*sub_pos, "malformed or repeated domain form"));
                }
                size = Some(number(&sub[1])?);
            }
            Some("fun") | Some("rel") => body.push((sub, *sub_pos)),
            _ => return Err(malformed(*sub_pos, "expected domain, fun, or rel")),
        }
    }
    let size = size.ok_or_else(|| malformed(*pos, "missing (domain N)"))?;
    let mut m = FiniteStructure::new(sig.clone(), size)
        .map_err(|err| StructureFileError::At { pos: *pos, err })?;

    for (sub, sub_pos) in body {
        let kind = sub[0].as_atom().unwrap();
        if sub.len() < 2 {
            return Err(malformed(sub_pos, format!("malformed {kind} form")));
        }
        let name = sub[1]
            .as_atom()
            .ok_or_else(|| malformed(sub[1].pos(), "expected a symbol name"))?;
        match kind {
            "fun" => {
                if sig.kind_arity(name).map(|(k, _)| k) != Some(SymbolKind::Function) {
                    return Err(StructureFileError::At {
                        pos: sub[1].pos(),
                        err: StructureError::UnknownSymbol(name.to_string()),
                    });
                }
                for entry in &sub[2..] {
                    let Sexpr::List(pair, entry_pos) = entry else {
                        return Err(malformed(entry.pos(), "expected ((args...) value)"));
                    };
                    if pair.len() != 2 {
                        return Err(malformed(*entry_pos, "expected ((args...) value)"));
                    }
                    let args = number_list(&pair[0])?;
                    let value = number(&pair[1])?;
                    m.set_fun(name, &args, value)
                        .map_err(|err| StructureFileError::At { pos: *entry_pos, err })?;
                }
            }
            "rel" => {
                if sig.kind_arity(name).map(|(k, _)| k) != Some(SymbolKind::Relation) {
                    return Err(StructureFileError::At {
                        pos: sub[1].pos(),
                        err: StructureError::UnknownSymbol(name.to_string()),
                    });
                }
                for entry in &sub[2..] {
                    let args = number_list(entry)?;
                    m.set_rel(name, &args, true)
                        .map_err(|err| StructureFileError::At { pos: entry.pos(), err })?;
                }
            }
            _ => unreachable!(),
        }
    }
    Ok(m)
}

/// Prints a structure in the format accepted by [`parse_structure`], with
/// full function tables and the positive relation tuples.
pub fn print_structure(m: &FiniteStructure) -> String {
    let mut out = String::new();
    out.push_str("(structure\n");
    out.push_str(&format!("  (domain {})\n", m.size()));
    for (name, arity) in m.signature().functions() {
        out.push_str(&format!("  (fun {name}"));
        for args in super::tuples(m.size(), arity) {
            let shown: Vec<String> = args.iter().map(|a| a.to_string()).collect();
            out.push_str(&format!(
                " (({}) {})",
                shown.join(" "),
                m.fun(name, &args)
            ));
        }
        out.push_str(")\n");
    }
    for (name, arity) in m.signature().relations() {
        out.push_str(&format!("  (rel {name}"));
        for args in super::tuples(m.size(), arity) {
            if m.rel(name, &args) {
                let shown: Vec<String> = args.iter().map(|a| a.to_string()).collect();
                out.push_str(&format!(" ({})", shown.join(" ")));
            }
        }
        out.push_str(")\n");
    }
    out.push(')');
    out
}
