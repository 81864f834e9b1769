//! Generators for quantifier-free arithmetic-flavoured axiom sets: theories
//! pinning down finite function and predicate tables over numerals, and
//! finite fragments of the classical successor/plus/times/order theory with
//! their collapsed finite models.
//!
//! Everything here is constructive: each generated axiom set comes with a
//! finite structure satisfying it, so consistency is witnessed rather than
//! assumed.

mod files;

pub use files::{parse_tables, print_tables, TablesFileError};

use crate::structures::{FiniteStructure, StructureError};
use crate::syntax::{Formula, Signature, SymbolKind, SyntaxError, Term};
use std::collections::{BTreeMap, BTreeSet};
use thiserror::Error;

/// The pairing `(n, m) ↦ (n+m)(n+m+1)/2 + n`, a bijection `ℕ² → ℕ`.
pub fn cantor_pair(n: u64, m: u64) -> u64 {
    (n + m) * (n + m + 1) / 2 + n
}

/// The two-sided inverse of [`cantor_pair`].
pub fn cantor_unpair(p: u64) -> (u64, u64) {
    // Largest s with s(s+1)/2 ≤ p; isqrt is exact, so no float drift.
    let s = ((8 * p + 1).isqrt() - 1) / 2;
    let n = p - s * (s + 1) / 2;
    (n, s - n)
}

/// How numerals are spelled as terms.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NumeralStyle {
    /// One fresh constant `n0, n1, ...` per numeral.
    Constants,
    /// `succ` iterated on the constant `zero`.
    Successor,
    /// A single binary function `U` and the constant `n0`; the successor is
    /// the section `U(n0, ·)`, so the numeral `n` is `U(n0, ...(n0))` nested
    /// `n` deep.
    Tprfu,
}

impl NumeralStyle {
    /// The symbols carrying the numerals themselves.
    pub fn signature(self, count: usize) -> Signature {
        let mut sig = Signature::new();
        match self {
            NumeralStyle::Constants => {
                for n in 0..count {
                    sig.declare(format!("n{n}"), SymbolKind::Function, 0)
                        .expect("numeral names are distinct");
                }
            }
            NumeralStyle::Successor => {
                sig.declare("zero", SymbolKind::Function, 0).expect("fresh symbol");
                sig.declare("succ", SymbolKind::Function, 1).expect("fresh symbol");
            }
            NumeralStyle::Tprfu => {
                sig.declare("n0", SymbolKind::Function, 0).expect("fresh symbol");
                sig.declare("U", SymbolKind::Function, 2).expect("fresh symbol");
            }
        }
        sig
    }
}

/// The term for the numeral `n` in the given style.
pub fn numeral(n: usize, style: NumeralStyle) -> Term {
    match style {
        NumeralStyle::Constants => Term::constant(format!("n{n}")),
        NumeralStyle::Successor => {
            let mut t = Term::constant("zero");
            for _ in 0..n {
                t = Term::app("succ", vec![t]);
            }
            t
        }
        NumeralStyle::Tprfu => {
            let mut t = Term::constant("n0");
            for _ in 0..n {
                t = Term::app("U", vec![Term::constant("n0"), t]);
            }
            t
        }
    }
}

/// A function symbol's finite table: entries from argument tuples to values.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FunTable {
    pub arity: usize,
    pub entries: BTreeMap<Vec<usize>, usize>,
}

/// A predicate symbol's finite table: tuples asserted to hold and tuples
/// asserted not to.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PredTable {
    pub arity: usize,
    pub positive: BTreeSet<Vec<usize>>,
    pub negative: BTreeSet<Vec<usize>>,
}

/// Finite function and predicate tables over the numerals `0..count`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RepTables {
    pub numerals: usize,
    pub funs: BTreeMap<String, FunTable>,
    pub preds: BTreeMap<String, PredTable>,
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum TrepError {
    #[error("tables need at least one numeral")]
    NoNumerals,
    #[error("table for {name} has a tuple of length {got}, expected {expected}")]
    TupleArity { name: String, expected: usize, got: usize },
    #[error("table for {name} mentions {value}, outside the numerals 0..{count}")]
    OutOfRange { name: String, value: usize, count: usize },
    #[error("predicate table for {name} asserts and denies the same tuple")]
    Overlap { name: String },
    #[error("table symbol clashes with the numeral apparatus: {0}")]
    Clash(#[from] SyntaxError),
    #[error("structure operation failed: {0}")]
    Structure(#[from] StructureError),
}

impl RepTables {
    /// Checks tuple arities, value ranges, and positive/negative
    /// disjointness.
    pub fn validate(&self) -> Result<(), TrepError> {
        if self.numerals == 0 {
            return Err(TrepError::NoNumerals);
        }
        let range = |name: &str, tuple: &[usize]| -> Result<(), TrepError> {
            match tuple.iter().find(|&&v| v >= self.numerals) {
                Some(&value) => Err(TrepError::OutOfRange {
                    name: name.to_string(),
                    value,
                    count: self.numerals,
                }),
                None => Ok(()),
            }
        };
        for (name, table) in &self.funs {
            for (args, &value) in &table.entries {
                if args.len() != table.arity {
                    return Err(TrepError::TupleArity {
                        name: name.clone(),
                        expected: table.arity,
                        got: args.len(),
                    });
                }
                range(name, args)?;
                range(name, &[value])?;
            }
        }
        for (name, table) in &self.preds {
            for tuple in table.positive.iter().chain(&table.negative) {
                if tuple.len() != table.arity {
                    return Err(TrepError::TupleArity {
                        name: name.clone(),
                        expected: table.arity,
                        got: tuple.len(),
                    });
                }
                range(name, tuple)?;
            }
            if table.positive.intersection(&table.negative).next().is_some() {
                return Err(TrepError::Overlap { name: name.clone() });
            }
        }
        Ok(())
    }

    /// The numeral apparatus plus one symbol per table.
    pub fn signature(&self, style: NumeralStyle) -> Result<Signature, TrepError> {
        let mut sig = style.signature(self.numerals);
        for (name, table) in &self.funs {
            sig.declare(name, SymbolKind::Function, table.arity)?;
        }
        for (name, table) in &self.preds {
            sig.declare(name, SymbolKind::Relation, table.arity)?;
        }
        Ok(sig)
    }
}

/// The quantifier-free sentences pinning the tables down: numeral
/// distinctness, one equation per function entry, and one signed literal
/// per predicate tuple.
pub fn trep_axioms(
    tables: &RepTables,
    style: NumeralStyle,
) -> Result<Vec<Formula>, TrepError> {
    tables.validate()?;
    let num = |n: usize| numeral(n, style);
    let mut out = Vec::new();
    for n in 0..tables.numerals {
        for m in n + 1..tables.numerals {
            out.push(Formula::not(Formula::eq(num(n), num(m))));
        }
    }
    for (name, table) in &tables.funs {
        for (args, &value) in &table.entries {
            let applied = Term::app(name, args.iter().map(|&a| num(a)).collect());
            out.push(Formula::eq(applied, num(value)));
        }
    }
    for (name, table) in &tables.preds {
        for tuple in &table.positive {
            out.push(Formula::rel(name, tuple.iter().map(|&a| num(a)).collect::<Vec<_>>()));
        }
        for tuple in &table.negative {
            out.push(Formula::not(Formula::rel(
                name,
                tuple.iter().map(|&a| num(a)).collect::<Vec<_>>(),
            )));
        }
    }
    Ok(out)
}

/// The structure on the numerals `0..count` induced by the tables: numerals
/// denote themselves, listed entries hold, and unlisted function values
/// default to 0.  It satisfies every sentence of [`trep_axioms`].
pub fn table_structure(
    tables: &RepTables,
    style: NumeralStyle,
) -> Result<FiniteStructure, TrepError> {
    tables.validate()?;
    let sig = tables.signature(style)?;
    let size = tables.numerals;
    let mut m = FiniteStructure::new(sig, size)?;
    match style {
        NumeralStyle::Constants => {
            for n in 0..size {
                m.set_fun(&format!("n{n}"), &[], n)?;
            }
        }
        NumeralStyle::Successor => {
            m.set_fun("zero", &[], 0)?;
            for k in 0..size {
                m.set_fun("succ", &[k], (k + 1).min(size - 1))?;
            }
        }
        NumeralStyle::Tprfu => {
            m.set_fun("n0", &[], 0)?;
            for k in 0..size {
                m.set_fun("U", &[0, k], (k + 1).min(size - 1))?;
            }
        }
    }
    for (name, table) in &tables.funs {
        for (args, &value) in &table.entries {
            m.set_fun(name, args, value)?;
        }
    }
    for (name, table) in &tables.preds {
        for tuple in &table.positive {
            m.set_rel(name, tuple, true)?;
        }
    }
    Ok(m)
}

/// The successor/plus/times/order signature.
pub fn r_signature() -> Signature {
    Signature::new()
        .with_const("zero")
        .with_fun("succ", 1)
        .with_fun("add", 2)
        .with_fun("mul", 2)
        .with_rel("lt", 2)
}

/// The numeral `succ^n(zero)`.
pub fn r_numeral(n: usize) -> Term {
    numeral(n, NumeralStyle::Successor)
}

fn r_add(a: Term, b: Term) -> Term {
    Term::app("add", vec![a, b])
}

fn r_mul(a: Term, b: Term) -> Term {
    Term::app("mul", vec![a, b])
}

fn r_lt(a: Term, b: Term) -> Formula {
    Formula::rel("lt", vec![a, b])
}

/// The sentence characterizing `< n̄`: everything below `n̄` is one of the
/// smaller numerals.  At `n = 0` this is `∀x ¬(x < zero)`.
pub fn order_axiom(n: usize) -> Formula {
    let x = || Term::var("x");
    if n == 0 {
        return Formula::forall("x", Formula::not(r_lt(x(), r_numeral(0))));
    }
    let cases = Formula::or_all((0..n).map(|i| Formula::eq(x(), r_numeral(i))));
    Formula::forall("x", Formula::iff(r_lt(x(), r_numeral(n)), cases))
}

/// The finite fragment of the classical theory: sum and product tables for
/// numerals up to `b`, and the order characterization for each `n ≤ b`.
pub fn r_axioms(b: usize) -> Vec<Formula> {
    let mut out = Vec::new();
    for n in 0..=b {
        for m in 0..=b {
            out.push(Formula::eq(r_add(r_numeral(n), r_numeral(m)), r_numeral(n + m)));
        }
    }
    for n in 0..=b {
        for m in 0..=b {
            out.push(Formula::eq(r_mul(r_numeral(n), r_numeral(m)), r_numeral(n * m)));
        }
    }
    for n in 0..=b {
        out.push(order_axiom(n));
    }
    out
}

/// The collapsed model: the numbers `0..=b+1` plus one element standing for
/// everything larger, with arithmetic computed in the integers and clamped.
/// It satisfies all of [`r_axioms`]`(b)` — and more: the order
/// characterization only starts failing at `n = b+3`, where the collapse
/// element equals the numeral `b+2` without lying below the numeral `b+3`.
pub fn r_fragment_model(b: usize) -> FiniteStructure {
    let top = b + 2;
    let size = b + 3;
    let clamp = |v: usize| v.min(top);
    let mut m = FiniteStructure::new(r_signature(), size)
        .expect("the collapsed domain is nonempty");
    m.set_fun("zero", &[], 0).expect("zero is in range");
    for a in 0..size {
        m.set_fun("succ", &[a], clamp(a + 1)).expect("clamped values are in range");
        for c in 0..size {
            m.set_fun("add", &[a, c], clamp(a + c)).expect("clamped values are in range");
            m.set_fun("mul", &[a, c], clamp(a * c)).expect("clamped values are in range");
            m.set_rel("lt", &[a, c], a < c).expect("the order is total on the domain");
        }
    }
    m
}
