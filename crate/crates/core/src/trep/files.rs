//! Textual format for finite function and predicate tables.
//!
//! ```text
//! (tables
//!   (numerals 2)
//!   (fun G 1 ((0) 1) ((1) 0))
//!   (pred P 1 (pos (0)) (neg (1))))
//! ```
//!
//! `numerals` gives the numeral count; each `fun` form lists
//! `((args...) value)` entries and each `pred` form lists the tuples
//! asserted to hold under `pos` and those asserted not to under `neg`.

use super::{FunTable, PredTable, RepTables, TrepError};
use crate::syntax::parser::ParseError;
use crate::syntax::sexpr::{self, Pos, Sexpr};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TablesFileError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("{pos}: {err}")]
    At { pos: Pos, err: TrepError },
    #[error("{pos}: {msg}")]
    Malformed { pos: Pos, msg: String },
}

fn malformed(pos: Pos, msg: impl Into<String>) -> TablesFileError {
    TablesFileError::Malformed { pos, msg: msg.into() }
}

fn number(form: &Sexpr) -> Result<usize, TablesFileError> {
    form.as_atom()
        .and_then(|s| s.parse::<usize>().ok())
        .ok_or_else(|| malformed(form.pos(), "expected a number"))
}

fn number_list(form: &Sexpr) -> Result<Vec<usize>, TablesFileError> {
    match form {
        Sexpr::List(items, _) => items.iter().map(number).collect(),
        Sexpr::Atom(..) => Err(malformed(form.pos(), "expected a tuple")),
    }
}

/// Parses a tables file and validates the result.
pub fn parse_tables(text: &str) -> Result<RepTables, TablesFileError> {
    let form = sexpr::read_one(text).map_err(ParseError::from)?;
    let Sexpr::List(items, pos) = &form else {
        return Err(malformed(form.pos(), "expected a (tables ...) form"));
    };
    if items.first().and_then(Sexpr::as_atom) != Some("tables") {
        return Err(malformed(*pos, "expected a (tables ...) form"));
    }
    let mut numerals: Option<usize> = None;
    let mut tables = RepTables {
        numerals: 0,
        funs: Default::default(),
        preds: Default::default(),
    };
    for item in &items[1..] {
        let Sexpr::List(sub, sub_pos) = item else {
            return Err(malformed(item.pos(), "expected a (numerals|fun|pred ...) form"));
        };
        match sub.first().and_then(Sexpr::as_atom) {
            Some("numerals") => {
                if sub.len() != 2 || numerals.is_some() {
                    return Err(malformed(*sub_pos, "malformed or repeated numerals form"));
                }
                numerals = Some(number(&sub[1])?);
            }
            Some("fun") => {
                if sub.len() < 3 {
                    return Err(malformed(*sub_pos, "expected (fun NAME ARITY entries...)"));
                }
                let name = sub[1]
                    .as_atom()
                    .ok_or_else(|| malformed(sub[1].pos(), "expected a function name"))?;
                let arity = number(&sub[2])?;
                let mut entries = std::collections::BTreeMap::new();
                for entry in &sub[3..] {
                    let Sexpr::List(pair, entry_pos) = entry else {
                        return Err(malformed(entry.pos(), "expected ((args...) value)"));
                    };
                    if pair.len() != 2 {
                        return Err(malformed(*entry_pos, "expected ((args...) value)"));
                    }
                    entries.insert(number_list(&pair[0])?, number(&pair[1])?);
                }
                if tables
                    .funs
                    .insert(name.to_string(), FunTable { arity, entries })
                    .is_some()
                {
                    return Err(malformed(*sub_pos, format!("repeated fun form for {name}")));
                }
            }
            Some("pred") => {
                if sub.len() < 3 {
                    return Err(malformed(*sub_pos, "expected (pred NAME ARITY (pos ...) (neg ...))"));
                }
                let name = sub[1]
                    .as_atom()
                    .ok_or_else(|| malformed(sub[1].pos(), "expected a predicate name"))?;
                let arity = number(&sub[2])?;
                let mut table = PredTable {
                    arity,
                    positive: Default::default(),
                    negative: Default::default(),
                };
                for part in &sub[3..] {
                    let Sexpr::List(signed, signed_pos) = part else {
                        return Err(malformed(part.pos(), "expected (pos ...) or (neg ...)"));
                    };
                    let into = match signed.first().and_then(Sexpr::as_atom) {
                        Some("pos") => &mut table.positive,
                        Some("neg") => &mut table.negative,
                        _ => return Err(malformed(*signed_pos, "expected pos or neg")),
                    };
                    for tuple in &signed[1..] {
                        into.insert(number_list(tuple)?);
                    }
                }
                if tables.preds.insert(name.to_string(), table).is_some() {
                    return Err(malformed(*sub_pos, format!("repeated pred form for {name}")));
                }
            }
            _ => return Err(malformed(*sub_pos, "expected numerals, fun, or pred")),
        }
    }
    tables.numerals = numerals.ok_or_else(|| malformed(*pos, "missing (numerals N)"))?;
    tables
        .validate()
        .map_err(|err| TablesFileError::At { pos: *pos, err })?;
    Ok(tables)
}

/// Prints tables in the format accepted by [`parse_tables`].
pub fn print_tables(tables: &RepTables) -> String {
    let tuple = |t: &[usize]| -> String {
        let shown: Vec<String> = t.iter().map(|v| v.to_string()).collect();
        format!("({})", shown.join(" "))
    };
    let mut out = String::new();
    out.push_str("(tables\n");
    out.push_str(&format!("  (numerals {})\n", tables.numerals));
    for (name, table) in &tables.funs {
        out.push_str(&format!("  (fun {name} {}", table.arity));
        for (args, value) in &table.entries {
            out.push_str(&format!(" ({} {value})", tuple(args)));
        }
        out.push_str(")\n");
    }
    for (name, table) in &tables.preds {
        out.push_str(&format!("  (pred {name} {}", table.arity));
        if !table.positive.is_empty() {
            out.push_str(" (pos");
            for t in &table.positive {
                out.push_str(&format!(" {}", tuple(t)));
            }
            out.push(')');
        }
        if !table.negative.is_empty() {
            out.push_str(" (neg");
            for t in &table.negative {
                out.push_str(&format!(" {}", tuple(t)));
            }
            out.push(')');
        }
        out.push_str(")\n");
    }
    out.push(')');
    out
}
