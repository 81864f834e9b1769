//! Finite structures: evaluation, exhaustive enumeration, and diagrams.
//!
//! A [`FiniteStructure`] interprets a signature over the domain `0..size`
//! with dense function and relation tables.  The empty domain is admissible
//! exactly when the signature has no constants; evaluation then follows the
//! usual convention that universal sentences hold and existential ones fail.

mod extension;
mod files;

pub use extension::{
    extension_satisfies, extension_witness_blind, extension_witness_constructive, ExtensionWitness,
};
pub use files::{parse_structure, print_structure, StructureFileError};

use crate::limits::Limits;
use crate::syntax::{Formula, Signature, SymbolKind, Term};
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StructureError {
    #[error("a structure with constants cannot have an empty domain")]
    EmptyDomainWithConstants,
    #[error("element {element} out of range for domain size {size}")]
    ElementOutOfRange { element: usize, size: usize },
    #[error("{name} expects {expected} arguments, got {got}")]
    BadTuple {
        name: String,
        expected: usize,
        got: usize,
    },
    #[error("unknown symbol {0}")]
    UnknownSymbol(String),
    #[error("variable {0} is not bound by the environment")]
    UnboundVariable(String),
    #[error("expected {expected} values for the free variables, got {got}")]
    FreeTupleLength { expected: usize, got: usize },
    #[error("function table too large to allocate")]
    TableTooBig,
    #[error("enumeration would visit more than {cap} structures")]
    TooManyStructures { cap: u128 },
}

/// A finite structure with domain `{0, 1, ..., size - 1}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteStructure {
    sig: Signature,
    size: usize,
    funs: BTreeMap<String, Vec<usize>>,
    rels: BTreeMap<String, Vec<bool>>,
}

fn table_len(size: usize, arity: usize) -> Result<usize, StructureError> {
    size.checked_pow(arity as u32).ok_or(StructureError::TableTooBig)
}

impl FiniteStructure {
    /// A structure with every function constantly 0 and every relation empty.
    pub fn new(sig: Signature, size: usize) -> Result<FiniteStructure, StructureError> {
        if size == 0 && sig.has_constants() {
            return Err(StructureError::EmptyDomainWithConstants);
        }
        let mut funs = BTreeMap::new();
        let mut rels = BTreeMap::new();
        for (name, kind, arity) in sig.symbols() {
            let len = table_len(size, arity)?;
            match kind {
                SymbolKind::Function => {
                    // Size 0 forces len 0 for positive arities; constants were
                    // rejected above.
                    funs.insert(name.to_string(), vec![0; len]);
                }
                SymbolKind::Relation => {
                    rels.insert(name.to_string(), vec![false; len]);
                }
            }
        }
        Ok(FiniteStructure { sig, size, funs, rels })
    }

    pub fn signature(&self) -> &Signature {
        &self.sig
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn elements(&self) -> impl Iterator<Item = usize> {
        0..self.size
    }

    fn index(&self, args: &[usize]) -> usize {
        let mut idx = 0usize;
        for &a in args {
            debug_assert!(a < self.size);
            idx = idx * self.size + a;
        }
        idx
    }

    /// Value of the function `name` on `args`.  Panics on unknown symbols or
    /// out-of-range arguments; use the checked setters for untrusted input.
    pub fn fun(&self, name: &str, args: &[usize]) -> usize {
        let table = &self.funs[name];
        table[self.index(args)]
    }

    pub fn rel(&self, name: &str, args: &[usize]) -> bool {
        let table = &self.rels[name];
        table[self.index(args)]
    }

    pub fn set_fun(
        &mut self,
        name: &str,
        args: &[usize],
        value: usize,
    ) -> Result<(), StructureError> {
        let arity = self
            .sig
            .fun_arity(name)
            .ok_or_else(|| StructureError::UnknownSymbol(name.to_string()))?;
        if args.len() != arity {
            return Err(StructureError::BadTuple {
                name: name.to_string(),
                expected: arity,
                got: args.len(),
            });
        }
        for &a in args.iter().chain([&value]) {
            if a >= self.size {
                return Err(StructureError::ElementOutOfRange { element: a, size: self.size });
            }
        }
        let idx = self.index(args);
        self.funs.get_mut(name).unwrap()[idx] = value;
        Ok(())
    }

    pub fn set_rel(
        &mut self,
        name: &str,
        args: &[usize],
        holds: bool,
    ) -> Result<(), StructureError> {
        let arity = self
            .sig
            .rel_arity(name)
            .ok_or_else(|| StructureError::UnknownSymbol(name.to_string()))?;
        if args.len() != arity {
            return Err(StructureError::BadTuple {
                name: name.to_string(),
                expected: arity,
                got: args.len(),
            });
        }
        for &a in args {
            if a >= self.size {
                return Err(StructureError::ElementOutOfRange { element: a, size: self.size });
            }
        }
        let idx = self.index(args);
        self.rels.get_mut(name).unwrap()[idx] = holds;
        Ok(())
    }

    /// Evaluates a term under an environment binding variables to elements.
    pub fn eval_term(
        &self,
        t: &Term,
        env: &BTreeMap<String, usize>,
    ) -> Result<usize, StructureError> {
        let mut stack: Vec<(String, usize)> =
            env.iter().map(|(k, v)| (k.clone(), *v)).collect();
        self.eval_term_inner(t, &mut stack)
    }

    fn eval_term_inner(
        &self,
        t: &Term,
        env: &mut Vec<(String, usize)>,
    ) -> Result<usize, StructureError> {
        match t {
            Term::Var(v) => env
                .iter()
                .rev()
                .find(|(name, _)| name == v)
                .map(|(_, val)| *val)
                .ok_or_else(|| StructureError::UnboundVariable(v.clone())),
            Term::App(name, args) => {
                let arity = self
                    .sig
                    .fun_arity(name)
                    .ok_or_else(|| StructureError::UnknownSymbol(name.clone()))?;
                if args.len() != arity {
                    return Err(StructureError::BadTuple {
                        name: name.clone(),
                        expected: arity,
                        got: args.len(),
                    });
                }
                let mut vals = Vec::with_capacity(args.len());
                for a in args {
                    vals.push(self.eval_term_inner(a, env)?);
                }
                Ok(self.fun(name, &vals))
            }
        }
    }

    /// Tarskian truth under an environment.  Free variables of `f` must all
    /// be bound by `env`.
    pub fn eval_formula(
        &self,
        f: &Formula,
        env: &BTreeMap<String, usize>,
    ) -> Result<bool, StructureError> {
        let mut stack: Vec<(String, usize)> =
            env.iter().map(|(k, v)| (k.clone(), *v)).collect();
        self.eval_inner(f, &mut stack)
    }

    /// Evaluates a sentence.
    pub fn eval_sentence(&self, f: &Formula) -> Result<bool, StructureError> {
        self.eval_formula(f, &BTreeMap::new())
    }

    fn eval_inner(
        &self,
        f: &Formula,
        env: &mut Vec<(String, usize)>,
    ) -> Result<bool, StructureError> {
        match f {
            Formula::True => Ok(true),
            Formula::False => Ok(false),
            Formula::Eq(l, r) => {
                Ok(self.eval_term_inner(l, env)? == self.eval_term_inner(r, env)?)
            }
            Formula::Rel(name, args) => {
                let arity = self
                    .sig
                    .rel_arity(name)
                    .ok_or_else(|| StructureError::UnknownSymbol(name.clone()))?;
                if args.len() != arity {
                    return Err(StructureError::BadTuple {
                        name: name.clone(),
                        expected: arity,
                        got: args.len(),
                    });
                }
                let mut vals = Vec::with_capacity(args.len());
                for a in args {
                    vals.push(self.eval_term_inner(a, env)?);
                }
                Ok(self.rel(name, &vals))
            }
            Formula::Not(g) => Ok(!self.eval_inner(g, env)?),
            Formula::And(a, b) => Ok(self.eval_inner(a, env)? && self.eval_inner(b, env)?),
            Formula::Or(a, b) => Ok(self.eval_inner(a, env)? || self.eval_inner(b, env)?),
            Formula::Imp(a, b) => Ok(!self.eval_inner(a, env)? || self.eval_inner(b, env)?),
            Formula::Iff(a, b) => Ok(self.eval_inner(a, env)? == self.eval_inner(b, env)?),
            Formula::Exists(v, g) => {
                for x in 0..self.size {
                    env.push((v.clone(), x));
                    let holds = self.eval_inner(g, env)?;
                    env.pop();
                    if holds {
                        return Ok(true);
                    }
                }
                Ok(false)
            }
            Formula::Forall(v, g) => {
                for x in 0..self.size {
                    env.push((v.clone(), x));
                    let holds = self.eval_inner(g, env)?;
                    env.pop();
                    if !holds {
                        return Ok(false);
                    }
                }
                Ok(true)
            }
        }
    }

    /// Is `self` a substructure of `other` under the identity embedding of
    /// elements?  Requires the same signature and `self.size <= other.size`.
    pub fn is_substructure_of(&self, other: &FiniteStructure) -> bool {
        if self.sig != other.sig || self.size > other.size {
            return false;
        }
        for (name, _, arity) in self.sig.symbols() {
            for args in tuples(self.size, arity) {
                match self.sig.kind_arity(name).unwrap().0 {
                    SymbolKind::Function => {
                        if self.fun(name, &args) != other.fun(name, &args) {
                            return false;
                        }
                    }
                    SymbolKind::Relation => {
                        if self.rel(name, &args) != other.rel(name, &args) {
                            return false;
                        }
                    }
                }
            }
        }
        true
    }

    /// The diagram of the structure: an expanded signature with one fresh
    /// constant per element, the constant names in element order, and the
    /// literals that pin the structure down over that signature.
    ///
    /// Literals come in a fixed order: disequalities between distinct element
    /// constants, then one equation per function-table entry, then one
    /// literal (positive or negated) per relation-table entry.
    pub fn diagram(&self) -> (Signature, Vec<String>, Vec<Formula>) {
        let prefix = {
            let mut candidate = "e".to_string();
            loop {
                let clash = (0..self.size).any(|i| self.sig.contains(&format!("{candidate}{i}")));
                if !clash {
                    break candidate;
                }
                candidate.push('_');
            }
        };
        let names: Vec<String> = (0..self.size).map(|i| format!("{prefix}{i}")).collect();
        let mut sig = self.sig.clone();
        for n in &names {
            sig.declare(n.clone(), SymbolKind::Function, 0)
                .expect("fresh constant clashed with signature");
        }
        let el = |i: usize| Term::constant(names[i].clone());

        let mut literals = Vec::new();
        for i in 0..self.size {
            for j in i + 1..self.size {
                literals.push(Formula::not(Formula::eq(el(i), el(j))));
            }
        }
        for (name, arity) in self.sig.functions() {
            for args in tuples(self.size, arity) {
                let value = self.fun(name, &args);
                let lhs = if arity == 0 {
                    Term::constant(name)
                } else {
                    Term::app(name, args.iter().map(|&a| el(a)).collect())
                };
                literals.push(Formula::eq(lhs, el(value)));
            }
        }
        for (name, arity) in self.sig.relations() {
            for args in tuples(self.size, arity) {
                let atom = Formula::rel(name, args.iter().map(|&a| el(a)).collect());
                literals.push(if self.rel(name, &args) {
                    atom
                } else {
                    Formula::not(atom)
                });
            }
        }
        (sig, names, literals)
    }
}

/// All `arity`-tuples over `0..size` in lexicographic order.
pub fn tuples(size: usize, arity: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current = vec![0usize; arity];
    if arity == 0 {
        out.push(current);
        return out;
    }
    if size == 0 {
        return out;
    }
    loop {
        out.push(current.clone());
        let mut pos = arity;
        loop {
            if pos == 0 {
                return out;
            }
            pos -= 1;
            if current[pos] + 1 < size {
                current[pos] += 1;
                current[pos + 1..].fill(0);
                break;
            }
        }
    }
}

/// Number of structures of domain size exactly `size`, by closed-form table
/// arithmetic.  `None` means the count overflows a `u128`.
pub fn count_structures(sig: &Signature, size: usize) -> Option<u128> {
    let mut total: u128 = 1;
    for (_, kind, arity) in sig.symbols() {
        let cells = (size as u128).checked_pow(arity as u32)?;
        let cells32: u32 = cells.try_into().ok()?;
        let choices = match kind {
            // size ** cells; a constant over the empty domain yields 0 ** 1,
            // which correctly rules the empty structure out.
            SymbolKind::Function => (size as u128).checked_pow(cells32)?,
            SymbolKind::Relation => 2u128.checked_pow(cells32)?,
        };
        total = total.checked_mul(choices)?;
    }
    Some(total)
}

/// Sum of [`count_structures`] over sizes `0..=max_size`.
pub fn count_structures_up_to(sig: &Signature, max_size: usize) -> Option<u128> {
    let mut total: u128 = 0;
    for n in 0..=max_size {
        total = total.checked_add(count_structures(sig, n)?)?;
    }
    Some(total)
}

/// Exhaustively enumerates every structure over `sig` with domain size at
/// most `max_size`, smallest domains first, in a fixed table order.
///
/// The total count is checked against `limits.max_structures` up front, so
/// iteration itself cannot hit a cap.
pub fn enumerate_structures(
    sig: &Signature,
    max_size: usize,
    limits: &Limits,
) -> Result<StructureEnum, StructureError> {
    match count_structures_up_to(sig, max_size) {
        Some(n) if n <= limits.max_structures => {}
        _ => {
            return Err(StructureError::TooManyStructures { cap: limits.max_structures })
        }
    }
    Ok(StructureEnum {
        sig: sig.clone(),
        max_size,
        size: 0,
        current: None,
    })
}

pub struct StructureEnum {
    sig: Signature,
    max_size: usize,
    size: usize,
    current: Option<FiniteStructure>,
}

impl StructureEnum {
    /// Moves to the first structure of the next viable size.
    fn start_next_size(&mut self) -> Option<FiniteStructure> {
        while self.size <= self.max_size {
            let size = self.size;
            if count_structures(&self.sig, size) == Some(0) {
                self.size += 1;
                continue;
            }
            let s = FiniteStructure::new(self.sig.clone(), size)
                .expect("constant-free check already done");
            self.current = Some(s.clone());
            return Some(s);
        }
        None
    }

    /// Odometer step over the current structure's tables; `None` at the end
    /// of this size.
    fn advance(&mut self) -> Option<FiniteStructure> {
        let s = self.current.as_mut()?;
        // Function cells count in base `size`, relation cells in base 2,
        // functions varying fastest from the last cell.
        for table in s.rels.values_mut().rev() {
            for cell in table.iter_mut().rev() {
                if !*cell {
                    *cell = true;
                    return Some(self.current.clone().unwrap());
                }
                *cell = false;
            }
        }
        let size = s.size;
        for table in s.funs.values_mut().rev() {
            for cell in table.iter_mut().rev() {
                if *cell + 1 < size {
                    *cell += 1;
                    return Some(self.current.clone().unwrap());
                }
                *cell = 0;
            }
        }
        self.current = None;
        self.size += 1;
        None
    }
}

impl Iterator for StructureEnum {
    type Item = FiniteStructure;

    fn next(&mut self) -> Option<FiniteStructure> {
        if self.current.is_none() {
            return self.start_next_size();
        }
        match self.advance() {
            Some(s) => Some(s),
            None => self.start_next_size(),
        }
    }
}
