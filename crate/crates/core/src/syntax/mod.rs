//! Signatures, terms, and formulas.
//!
//! Terms carry a total order: first by height, then variables by name, then
//! applications by symbol name and recursively by arguments.  Everything that
//! enumerates or prints term sets relies on this order being stable, so
//! [`subterm_closure`] and friends always hand back sorted, deduplicated
//! vectors.

pub mod parser;
pub mod sexpr;
mod subst;

pub use parser::{parse_formula, parse_signature, print_formula};
pub use subst::{fresh_name, substitute, substitute_term};

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SymbolKind {
    Function,
    Relation,
}

impl fmt::Display for SymbolKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SymbolKind::Function => write!(f, "function"),
            SymbolKind::Relation => write!(f, "relation"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SyntaxError {
    #[error("symbol {0} declared twice")]
    DuplicateSymbol(String),
    #[error("unknown symbol {0}")]
    UnknownSymbol(String),
    #[error("{name} is a {kind} symbol, used as a {used_as}")]
    WrongKind {
        name: String,
        kind: SymbolKind,
        used_as: SymbolKind,
    },
    #[error("{name} has arity {expected}, applied to {got} arguments")]
    ArityMismatch {
        name: String,
        expected: usize,
        got: usize,
    },
}

/// A finite first-order signature: symbol names with kind and arity.
///
/// Nullary functions are constants; nullary relations are propositional
/// symbols.  Symbol names live in one namespace.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Signature {
    symbols: BTreeMap<String, (SymbolKind, usize)>,
}

impl Signature {
    pub fn new() -> Signature {
        Signature::default()
    }

    pub fn declare(
        &mut self,
        name: impl Into<String>,
        kind: SymbolKind,
        arity: usize,
    ) -> Result<(), SyntaxError> {
        let name = name.into();
        if self.symbols.contains_key(&name) {
            return Err(SyntaxError::DuplicateSymbol(name));
        }
        self.symbols.insert(name, (kind, arity));
        Ok(())
    }

    /// The minimal signature over which `f` is well formed: every function
    /// application and relation atom declares its symbol.  Fails when a name
    /// is used at two arities or both as a function and as a relation.
    pub fn inferred(f: &Formula) -> Result<Signature, SyntaxError> {
        fn add(
            sig: &mut Signature,
            name: &str,
            kind: SymbolKind,
            arity: usize,
        ) -> Result<(), SyntaxError> {
            match sig.kind_arity(name) {
                None => sig.declare(name, kind, arity),
                Some((k, _)) if k != kind => Err(SyntaxError::WrongKind {
                    name: name.to_string(),
                    kind: k,
                    used_as: kind,
                }),
                Some((_, a)) if a != arity => Err(SyntaxError::ArityMismatch {
                    name: name.to_string(),
                    expected: a,
                    got: arity,
                }),
                Some(_) => Ok(()),
            }
        }
        fn add_term(sig: &mut Signature, t: &Term) -> Result<(), SyntaxError> {
            if let Term::App(name, args) = t {
                add(sig, name, SymbolKind::Function, args.len())?;
                for a in args {
                    add_term(sig, a)?;
                }
            }
            Ok(())
        }
        let mut sig = Signature::new();
        let mut result = Ok(());
        f.walk(&mut |g| {
            if result.is_err() {
                return;
            }
            result = match g {
                Formula::Eq(a, b) => add_term(&mut sig, a).and_then(|()| add_term(&mut sig, b)),
                Formula::Rel(name, args) => {
                    add(&mut sig, name, SymbolKind::Relation, args.len()).and_then(|()| {
                        args.iter().try_for_each(|a| add_term(&mut sig, a))
                    })
                }
                _ => Ok(()),
            };
        });
        result.map(|()| sig)
    }

    /// Builder form of [`declare`](Self::declare) for function symbols.
    /// Panics on duplicate names, so only use it with fixed symbol lists.
    pub fn with_fun(mut self, name: &str, arity: usize) -> Signature {
        self.declare(name, SymbolKind::Function, arity).unwrap();
        self
    }

    pub fn with_rel(mut self, name: &str, arity: usize) -> Signature {
        self.declare(name, SymbolKind::Relation, arity).unwrap();
        self
    }

    pub fn with_const(self, name: &str) -> Signature {
        self.with_fun(name, 0)
    }

    pub fn contains(&self, name: &str) -> bool {
        self.symbols.contains_key(name)
    }

    pub fn kind_arity(&self, name: &str) -> Option<(SymbolKind, usize)> {
        self.symbols.get(name).copied()
    }

    pub fn fun_arity(&self, name: &str) -> Option<usize> {
        match self.symbols.get(name) {
            Some((SymbolKind::Function, k)) => Some(*k),
            _ => None,
        }
    }

    pub fn rel_arity(&self, name: &str) -> Option<usize> {
        match self.symbols.get(name) {
            Some((SymbolKind::Relation, k)) => Some(*k),
            _ => None,
        }
    }

    /// All symbols in name order.
    pub fn symbols(&self) -> impl Iterator<Item = (&str, SymbolKind, usize)> {
        self.symbols.iter().map(|(n, (k, a))| (n.as_str(), *k, *a))
    }

    /// Function symbols (constants included) in name order.
    pub fn functions(&self) -> impl Iterator<Item = (&str, usize)> {
        self.symbols().filter_map(|(n, k, a)| match k {
            SymbolKind::Function => Some((n, a)),
            SymbolKind::Relation => None,
        })
    }

    pub fn relations(&self) -> impl Iterator<Item = (&str, usize)> {
        self.symbols().filter_map(|(n, k, a)| match k {
            SymbolKind::Relation => Some((n, a)),
            SymbolKind::Function => None,
        })
    }

    pub fn constants(&self) -> impl Iterator<Item = &str> {
        self.functions().filter_map(|(n, a)| (a == 0).then_some(n))
    }

    pub fn has_constants(&self) -> bool {
        self.constants().next().is_some()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    /// The subsignature containing exactly the named symbols.
    pub fn restrict_to(&self, names: &BTreeSet<String>) -> Signature {
        Signature {
            symbols: self
                .symbols
                .iter()
                .filter(|(n, _)| names.contains(*n))
                .map(|(n, ka)| (n.clone(), *ka))
                .collect(),
        }
    }

    /// Union of two signatures; errors if a shared name disagrees in kind or
    /// arity.
    pub fn merged(&self, other: &Signature) -> Result<Signature, SyntaxError> {
        let mut out = self.clone();
        for (name, &(kind, arity)) in &other.symbols {
            match out.symbols.get(name) {
                None => {
                    out.symbols.insert(name.clone(), (kind, arity));
                }
                Some(&(k, a)) if k == kind && a == arity => {}
                Some(_) => return Err(SyntaxError::DuplicateSymbol(name.clone())),
            }
        }
        Ok(out)
    }
}

/// A first-order term: a variable or a function application.
///
/// Constants are nullary applications.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Term {
    Var(String),
    App(String, Vec<Term>),
}

impl Term {
    pub fn var(name: impl Into<String>) -> Term {
        Term::Var(name.into())
    }

    pub fn constant(name: impl Into<String>) -> Term {
        Term::App(name.into(), Vec::new())
    }

    pub fn app(name: impl Into<String>, args: Vec<Term>) -> Term {
        Term::App(name.into(), args)
    }

    /// Variables have height 0, applications one more than their deepest
    /// argument (so constants have height 1).
    pub fn height(&self) -> usize {
        match self {
            Term::Var(_) => 0,
            Term::App(_, args) => 1 + args.iter().map(Term::height).max().unwrap_or(0),
        }
    }

    pub fn is_var(&self) -> bool {
        matches!(self, Term::Var(_))
    }

    pub fn vars_into(&self, out: &mut BTreeSet<String>) {
        match self {
            Term::Var(v) => {
                out.insert(v.clone());
            }
            Term::App(_, args) => {
                for a in args {
                    a.vars_into(out);
                }
            }
        }
    }

    pub fn vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.vars_into(&mut out);
        out
    }

    pub fn is_ground(&self) -> bool {
        match self {
            Term::Var(_) => false,
            Term::App(_, args) => args.iter().all(Term::is_ground),
        }
    }

    /// Checks that every application matches a function symbol of the right
    /// arity.
    pub fn well_formed(&self, sig: &Signature) -> Result<(), SyntaxError> {
        match self {
            Term::Var(_) => Ok(()),
            Term::App(name, args) => {
                match sig.kind_arity(name) {
                    None => return Err(SyntaxError::UnknownSymbol(name.clone())),
                    Some((SymbolKind::Relation, _)) => {
                        return Err(SyntaxError::WrongKind {
                            name: name.clone(),
                            kind: SymbolKind::Relation,
                            used_as: SymbolKind::Function,
                        })
                    }
                    Some((SymbolKind::Function, arity)) if arity != args.len() => {
                        return Err(SyntaxError::ArityMismatch {
                            name: name.clone(),
                            expected: arity,
                            got: args.len(),
                        })
                    }
                    Some(_) => {}
                }
                args.iter().try_for_each(|a| a.well_formed(sig))
            }
        }
    }

    fn subterms_into(&self, out: &mut BTreeSet<Term>) {
        out.insert(self.clone());
        if let Term::App(_, args) = self {
            for a in args {
                a.subterms_into(out);
            }
        }
    }
}

impl Ord for Term {
    fn cmp(&self, other: &Self) -> Ordering {
        self.height().cmp(&other.height()).then_with(|| match (self, other) {
            (Term::Var(a), Term::Var(b)) => a.cmp(b),
            (Term::App(f, fa), Term::App(g, ga)) => f.cmp(g).then_with(|| fa.cmp(ga)),
            // Equal heights with mixed variants cannot happen: variables are
            // the only terms of height 0.
            (Term::Var(_), Term::App(..)) => Ordering::Less,
            (Term::App(..), Term::Var(_)) => Ordering::Greater,
        })
    }
}

impl PartialOrd for Term {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) => write!(f, "{v}"),
            Term::App(name, args) if args.is_empty() => write!(f, "{name}"),
            Term::App(name, args) => {
                write!(f, "({name}")?;
                for a in args {
                    write!(f, " {a}")?;
                }
                write!(f, ")")
            }
        }
    }
}

/// The least subterm-closed superset of `terms`, sorted in term order.
pub fn subterm_closure(terms: impl IntoIterator<Item = Term>) -> Vec<Term> {
    let mut set = BTreeSet::new();
    for t in terms {
        t.subterms_into(&mut set);
    }
    set.into_iter().collect()
}

/// First-order formulas over the full classical connective set.
///
/// The derived `Ord` is an arbitrary but stable structural order used for
/// deduplication and canonical printing of conjunct sets; it has no semantic
/// meaning.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    True,
    False,
    Eq(Term, Term),
    Rel(String, Vec<Term>),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Imp(Box<Formula>, Box<Formula>),
    Iff(Box<Formula>, Box<Formula>),
    Exists(String, Box<Formula>),
    Forall(String, Box<Formula>),
}

impl Formula {
    pub fn eq(lhs: Term, rhs: Term) -> Formula {
        Formula::Eq(lhs, rhs)
    }

    pub fn rel(name: impl Into<String>, args: Vec<Term>) -> Formula {
        Formula::Rel(name.into(), args)
    }

    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn imp(a: Formula, b: Formula) -> Formula {
        Formula::Imp(Box::new(a), Box::new(b))
    }

    pub fn iff(a: Formula, b: Formula) -> Formula {
        Formula::Iff(Box::new(a), Box::new(b))
    }

    pub fn exists(v: impl Into<String>, f: Formula) -> Formula {
        Formula::Exists(v.into(), Box::new(f))
    }

    pub fn forall(v: impl Into<String>, f: Formula) -> Formula {
        Formula::Forall(v.into(), Box::new(f))
    }

    /// Conjunction of all the formulas; `true` when empty.  Built as a
    /// balanced tree so that machine-generated chains keep every later
    /// recursive traversal at logarithmic depth.
    pub fn and_all(fs: impl IntoIterator<Item = Formula>) -> Formula {
        let fs: Vec<Formula> = fs.into_iter().collect();
        Formula::balanced(fs, &Formula::and, Formula::True)
    }

    /// Disjunction of all the formulas; `false` when empty, balanced like
    /// [`Formula::and_all`].
    pub fn or_all(fs: impl IntoIterator<Item = Formula>) -> Formula {
        let fs: Vec<Formula> = fs.into_iter().collect();
        Formula::balanced(fs, &Formula::or, Formula::False)
    }

    fn balanced(
        mut fs: Vec<Formula>,
        join: &impl Fn(Formula, Formula) -> Formula,
        empty: Formula,
    ) -> Formula {
        match fs.len() {
            0 => empty,
            1 => fs.pop().unwrap(),
            n => {
                let right = fs.split_off(n / 2);
                join(
                    Formula::balanced(fs, join, empty.clone()),
                    Formula::balanced(right, join, empty),
                )
            }
        }
    }

    /// Nested universal quantification over `vars`, first variable outermost.
    pub fn forall_all(vars: &[String], f: Formula) -> Formula {
        vars.iter().rev().fold(f, |acc, v| Formula::forall(v.clone(), acc))
    }

    pub fn exists_all(vars: &[String], f: Formula) -> Formula {
        vars.iter().rev().fold(f, |acc, v| Formula::exists(v.clone(), acc))
    }

    pub fn free_vars(&self) -> BTreeSet<String> {
        fn go(f: &Formula, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
            match f {
                Formula::True | Formula::False => {}
                Formula::Eq(l, r) => {
                    for v in l.vars().union(&r.vars()) {
                        if !bound.contains(v) {
                            out.insert(v.clone());
                        }
                    }
                }
                Formula::Rel(_, args) => {
                    for a in args {
                        for v in a.vars() {
                            if !bound.contains(&v) {
                                out.insert(v);
                            }
                        }
                    }
                }
                Formula::Not(g) => go(g, bound, out),
                Formula::And(a, b)
                | Formula::Or(a, b)
                | Formula::Imp(a, b)
                | Formula::Iff(a, b) => {
                    go(a, bound, out);
                    go(b, bound, out);
                }
                Formula::Exists(v, g) | Formula::Forall(v, g) => {
                    bound.push(v.clone());
                    go(g, bound, out);
                    bound.pop();
                }
            }
        }
        let mut out = BTreeSet::new();
        go(self, &mut Vec::new(), &mut out);
        out
    }

    /// Every variable name occurring anywhere, bound or free.
    pub fn all_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.walk(&mut |f| match f {
            Formula::Eq(l, r) => {
                l.vars_into(&mut out);
                r.vars_into(&mut out);
            }
            Formula::Rel(_, args) => {
                for a in args {
                    a.vars_into(&mut out);
                }
            }
            Formula::Exists(v, _) | Formula::Forall(v, _) => {
                out.insert(v.clone());
            }
            _ => {}
        });
        out
    }

    /// Calls `f` on every subformula, outermost first.
    pub fn walk(&self, f: &mut impl FnMut(&Formula)) {
        f(self);
        match self {
            Formula::True | Formula::False | Formula::Eq(..) | Formula::Rel(..) => {}
            Formula::Not(g) | Formula::Exists(_, g) | Formula::Forall(_, g) => g.walk(f),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Imp(a, b) | Formula::Iff(a, b) => {
                a.walk(f);
                b.walk(f);
            }
        }
    }

    pub fn is_quantifier_free(&self) -> bool {
        let mut qf = true;
        self.walk(&mut |f| {
            if matches!(f, Formula::Exists(..) | Formula::Forall(..)) {
                qf = false;
            }
        });
        qf
    }

    pub fn is_sentence(&self) -> bool {
        self.free_vars().is_empty()
    }

    /// No variables at all: every term is closed.
    pub fn is_ground(&self) -> bool {
        self.all_vars().is_empty()
    }

    /// A block of universal quantifiers (possibly empty) over a
    /// quantifier-free matrix.
    pub fn is_universal(&self) -> bool {
        match self {
            Formula::Forall(_, g) => g.is_universal(),
            f => f.is_quantifier_free(),
        }
    }

    pub fn is_existential(&self) -> bool {
        match self {
            Formula::Exists(_, g) => g.is_existential(),
            f => f.is_quantifier_free(),
        }
    }

    /// Splits a universal formula into its prefix variables and matrix.
    pub fn universal_prefix(&self) -> (Vec<String>, &Formula) {
        let mut vars = Vec::new();
        let mut f = self;
        while let Formula::Forall(v, g) = f {
            vars.push(v.clone());
            f = g;
        }
        (vars, f)
    }

    /// The terms appearing as arguments of atoms (not their subterms).
    pub fn atom_terms(&self) -> Vec<Term> {
        let mut out = Vec::new();
        self.walk(&mut |f| match f {
            Formula::Eq(l, r) => {
                out.push(l.clone());
                out.push(r.clone());
            }
            Formula::Rel(_, args) => out.extend(args.iter().cloned()),
            _ => {}
        });
        out
    }

    /// Names of relation symbols occurring in the formula, in name order.
    pub fn relation_symbols(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.walk(&mut |f| {
            if let Formula::Rel(name, _) = f {
                out.insert(name.clone());
            }
        });
        out
    }

    /// Names of all function and relation symbols occurring in the formula.
    pub fn symbols(&self) -> BTreeSet<String> {
        fn term_syms(t: &Term, out: &mut BTreeSet<String>) {
            if let Term::App(name, args) = t {
                out.insert(name.clone());
                for a in args {
                    term_syms(a, out);
                }
            }
        }
        let mut out = BTreeSet::new();
        self.walk(&mut |f| match f {
            Formula::Eq(l, r) => {
                term_syms(l, &mut out);
                term_syms(r, &mut out);
            }
            Formula::Rel(name, args) => {
                out.insert(name.clone());
                for a in args {
                    term_syms(a, &mut out);
                }
            }
            _ => {}
        });
        out
    }

    pub fn well_formed(&self, sig: &Signature) -> Result<(), SyntaxError> {
        let mut err = None;
        self.walk(&mut |f| {
            if err.is_some() {
                return;
            }
            let r = match f {
                Formula::Eq(l, r) => l.well_formed(sig).and_then(|()| r.well_formed(sig)),
                Formula::Rel(name, args) => match sig.kind_arity(name) {
                    None => Err(SyntaxError::UnknownSymbol(name.clone())),
                    Some((SymbolKind::Function, _)) => Err(SyntaxError::WrongKind {
                        name: name.clone(),
                        kind: SymbolKind::Function,
                        used_as: SymbolKind::Relation,
                    }),
                    Some((SymbolKind::Relation, arity)) if arity != args.len() => {
                        Err(SyntaxError::ArityMismatch {
                            name: name.clone(),
                            expected: arity,
                            got: args.len(),
                        })
                    }
                    Some(_) => args.iter().try_for_each(|a| a.well_formed(sig)),
                },
                _ => Ok(()),
            };
            if let Err(e) = r {
                err = Some(e);
            }
        });
        match err {
            None => Ok(()),
            Some(e) => Err(e),
        }
    }

    /// Rewrites to the connective set `{not, and, or, exists, forall}`,
    /// expanding `imp` and `iff`.
    pub fn normalize(&self) -> Formula {
        match self {
            Formula::True | Formula::False | Formula::Eq(..) | Formula::Rel(..) => self.clone(),
            Formula::Not(g) => Formula::not(g.normalize()),
            Formula::And(a, b) => Formula::and(a.normalize(), b.normalize()),
            Formula::Or(a, b) => Formula::or(a.normalize(), b.normalize()),
            Formula::Imp(a, b) => Formula::or(Formula::not(a.normalize()), b.normalize()),
            Formula::Iff(a, b) => {
                let (a, b) = (a.normalize(), b.normalize());
                Formula::and(
                    Formula::or(Formula::not(a.clone()), b.clone()),
                    Formula::or(Formula::not(b), a),
                )
            }
            Formula::Exists(v, g) => Formula::exists(v.clone(), g.normalize()),
            Formula::Forall(v, g) => Formula::forall(v.clone(), g.normalize()),
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", print_formula(self))
    }
}
