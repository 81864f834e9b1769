//! Translations between languages and the interpretation machinery on top
//! of them: formula translation, proof obligations, composition, and induced
//! structures.
//!
//! A translation maps each source symbol to target material: relations to
//! formulas, functions either to defining term tuples or to graph formulas.
//! Translations here are one-piece and parameter-free; the domain and
//! equality formulas are optional, with absence meaning "everything" and
//! componentwise equality respectively.
//!
//! Member formulas are written over positional variables `v0, v1, ...`
//! ([`slot`]): a `k`-ary relation under dimension `n` uses `v0..v{kn-1}`,
//! argument tuples first; a function's graph formula appends the result
//! tuple after the arguments.

mod constructions;
mod files;

pub use constructions::{binary_reduction, pairing_terms};
pub use files::{parse_translation, print_translation, TranslationFileError};

use crate::decide::{decide_with_limits, DecisionResult};
use crate::limits::Limits;
use crate::structures::{tuples, FiniteStructure, StructureError};
use crate::syntax::{
    fresh_name, substitute, substitute_term, Formula, Signature, SymbolKind, SyntaxError, Term,
};
use std::collections::{BTreeMap, BTreeSet};
use thiserror::Error;

/// The `i`-th positional variable of translation member formulas.
pub fn slot(i: usize) -> String {
    format!("v{i}")
}

/// How a source function symbol is realized in the target language.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FunDef {
    /// One target term per dimension, over the argument slots; keeps
    /// translated formulas quantifier-free.
    Terms(Vec<Term>),
    /// A graph formula over argument slots followed by result slots;
    /// translation introduces an existential quantifier per occurrence.
    Graph(Formula),
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum InterpError {
    #[error("translation dimension must be at least 1")]
    DimensionZero,
    #[error("source symbol {0} has no translation")]
    Uncovered(String),
    #[error("translated symbol {0} is not in the source signature")]
    NotInSource(String),
    #[error("function {0} must be defined by exactly one term per dimension")]
    WrongTermCount(String),
    #[error("member formula for {symbol} uses {var}, outside its slot range")]
    SlotOutOfRange { symbol: String, var: String },
    #[error("ill-formed member: {0}")]
    IllFormed(#[from] SyntaxError),
    #[error("signatures do not line up for composition")]
    SignatureMismatch,
    #[error("operation requires a fully term-defined translation")]
    NotTermDefined,
    #[error("operation requires an unrelativized translation with absolute equality")]
    NotAbsolute,
    #[error("induced structure would have {size} elements, over the cap {cap}")]
    InducedTooLarge { size: usize, cap: usize },
    #[error("structure operation failed: {0}")]
    Structure(#[from] StructureError),
    #[error("signature has relations; enable relation preprocessing to reduce them")]
    RelationsNeedPreprocessing,
    #[error("relation preprocessing requires a constant in the signature")]
    NeedsConstant,
    #[error("signature has neither two unary functions nor a function of arity 2 or more")]
    NoPairingCapacity,
}

/// A one-piece, parameter-free translation between two signatures.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Translation {
    source: Signature,
    target: Signature,
    dim: usize,
    domain: Option<Formula>,
    equality: Option<Formula>,
    rels: BTreeMap<String, Formula>,
    funs: BTreeMap<String, FunDef>,
}

impl Translation {
    /// Validates arities, slot ranges, and exact coverage of the source
    /// signature.
    pub fn new(
        source: Signature,
        target: Signature,
        dim: usize,
        domain: Option<Formula>,
        equality: Option<Formula>,
        rels: BTreeMap<String, Formula>,
        funs: BTreeMap<String, FunDef>,
    ) -> Result<Translation, InterpError> {
        if dim == 0 {
            return Err(InterpError::DimensionZero);
        }
        let check_slots = |f: &BTreeSet<String>, max: usize, symbol: &str| {
            let allowed: BTreeSet<String> = (0..max).map(slot).collect();
            match f.iter().find(|v| !allowed.contains(*v)) {
                Some(v) => Err(InterpError::SlotOutOfRange {
                    symbol: symbol.to_string(),
                    var: v.clone(),
                }),
                None => Ok(()),
            }
        };
        if let Some(d) = &domain {
            d.well_formed(&target)?;
            check_slots(&d.free_vars(), dim, "the domain")?;
        }
        if let Some(e) = &equality {
            e.well_formed(&target)?;
            check_slots(&e.free_vars(), 2 * dim, "equality")?;
        }
        for (name, arity) in source.relations() {
            let f = rels.get(name).ok_or_else(|| InterpError::Uncovered(name.to_string()))?;
            f.well_formed(&target)?;
            check_slots(&f.free_vars(), arity * dim, name)?;
        }
        for name in rels.keys() {
            if source.rel_arity(name).is_none() {
                return Err(InterpError::NotInSource(name.clone()));
            }
        }
        for (name, arity) in source.functions() {
            let def = funs.get(name).ok_or_else(|| InterpError::Uncovered(name.to_string()))?;
            match def {
                FunDef::Terms(ts) => {
                    if ts.len() != dim {
                        return Err(InterpError::WrongTermCount(name.to_string()));
                    }
                    for t in ts {
                        t.well_formed(&target)?;
                        check_slots(&t.vars(), arity * dim, name)?;
                    }
                }
                FunDef::Graph(g) => {
                    g.well_formed(&target)?;
                    check_slots(&g.free_vars(), (arity + 1) * dim, name)?;
                }
            }
        }
        for name in funs.keys() {
            if source.fun_arity(name).is_none() {
                return Err(InterpError::NotInSource(name.clone()));
            }
        }
        Ok(Translation { source, target, dim, domain, equality, rels, funs })
    }

    /// The identity translation of a signature into itself.
    pub fn identity(sig: &Signature) -> Translation {
        let rels = sig
            .relations()
            .map(|(name, arity)| {
                let args = (0..arity).map(|i| Term::var(slot(i))).collect();
                (name.to_string(), Formula::rel(name, args))
            })
            .collect();
        let funs = sig
            .functions()
            .map(|(name, arity)| {
                let args = (0..arity).map(|i| Term::var(slot(i))).collect();
                (name.to_string(), FunDef::Terms(vec![Term::app(name, args)]))
            })
            .collect();
        Translation::new(sig.clone(), sig.clone(), 1, None, None, rels, funs)
            .expect("the identity translation is well formed")
    }

    pub fn source(&self) -> &Signature {
        &self.source
    }

    pub fn target(&self) -> &Signature {
        &self.target
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn domain(&self) -> Option<&Formula> {
        self.domain.as_ref()
    }

    pub fn equality(&self) -> Option<&Formula> {
        self.equality.as_ref()
    }

    pub fn rel_formula(&self, name: &str) -> Option<&Formula> {
        self.rels.get(name)
    }

    pub fn fun_def(&self, name: &str) -> Option<&FunDef> {
        self.funs.get(name)
    }

    /// True when every function is defined by terms.
    pub fn is_term_defined(&self) -> bool {
        self.funs.values().all(|d| matches!(d, FunDef::Terms(_)))
    }

    /// True when every member formula is quantifier-free and every function
    /// is term-defined, which makes translation preserve quantifier-freeness.
    pub fn is_quantifier_free(&self) -> bool {
        self.is_term_defined()
            && self.domain.iter().all(|f| f.is_quantifier_free())
            && self.equality.iter().all(|f| f.is_quantifier_free())
            && self.rels.values().all(|f| f.is_quantifier_free())
    }

    fn is_graph_fun(&self, name: &str) -> bool {
        matches!(self.funs.get(name), Some(FunDef::Graph(_)))
    }

    /// Translates a formula over the source signature.  Free variables
    /// expand to tuples named `x`, or `x_0..` for higher dimensions; any
    /// domain presupposition on them is left to the caller.
    pub fn translate(&self, f: &Formula) -> Result<Formula, InterpError> {
        f.well_formed(&self.source)?;
        let mut avoid = f.all_vars();
        let mut names = BTreeMap::new();
        for v in f.free_vars() {
            let tuple = self.tuple_names(&v, &mut avoid);
            names.insert(v, tuple);
        }
        self.translate_with_names(f, &names)
    }

    /// Translates with caller-chosen tuple names for the free variables.
    pub fn translate_with_names(
        &self,
        f: &Formula,
        free_names: &BTreeMap<String, Vec<String>>,
    ) -> Result<Formula, InterpError> {
        let mut avoid = f.all_vars();
        for tuple in free_names.values() {
            avoid.extend(tuple.iter().cloned());
        }
        let flat = self.flatten(f, &mut avoid);
        let mut names = free_names.clone();
        Ok(self.matrix(&flat, &mut names, &mut avoid))
    }

    /// Names for the target tuple representing source variable `v`.
    fn tuple_names(&self, v: &str, avoid: &mut BTreeSet<String>) -> Vec<String> {
        if self.dim == 1 {
            return vec![v.to_string()];
        }
        let mut sep = "_".to_string();
        loop {
            let tuple: Vec<String> = (0..self.dim).map(|i| format!("{v}{sep}{i}")).collect();
            if tuple.iter().all(|n| !avoid.contains(n)) {
                avoid.extend(tuple.iter().cloned());
                return tuple;
            }
            sep.push('_');
        }
    }

    /// Rewrites every atom so that graph-defined functions occur only in
    /// equations `F(args) = w` with a variable on the other side, pulling
    /// each occurrence out through a fresh existential.
    fn flatten(&self, f: &Formula, avoid: &mut BTreeSet<String>) -> Formula {
        match f {
            Formula::True | Formula::False => f.clone(),
            Formula::Eq(..) | Formula::Rel(..) => self.flatten_atom(f.clone(), avoid),
            Formula::Not(g) => Formula::not(self.flatten(g, avoid)),
            Formula::And(a, b) => Formula::and(self.flatten(a, avoid), self.flatten(b, avoid)),
            Formula::Or(a, b) => Formula::or(self.flatten(a, avoid), self.flatten(b, avoid)),
            Formula::Imp(a, b) => Formula::imp(self.flatten(a, avoid), self.flatten(b, avoid)),
            Formula::Iff(a, b) => Formula::iff(self.flatten(a, avoid), self.flatten(b, avoid)),
            Formula::Exists(v, g) => Formula::exists(v.clone(), self.flatten(g, avoid)),
            Formula::Forall(v, g) => Formula::forall(v.clone(), self.flatten(g, avoid)),
        }
    }

    fn flatten_atom(&self, atom: Formula, avoid: &mut BTreeSet<String>) -> Formula {
        let mut unnested: Vec<(String, Term)> = Vec::new();
        let mut a = atom;
        while let Some(app) = self.extractable(&a) {
            let w = fresh_name("w", avoid);
            avoid.insert(w.clone());
            a = replace_in_atom(&a, &app, &Term::var(&w));
            unnested.push((w, app));
        }
        for (w, app) in unnested.into_iter().rev() {
            a = Formula::exists(w.clone(), Formula::and(Formula::eq(app, Term::var(w)), a));
        }
        a
    }

    /// An innermost graph-defined application that must be pulled out of the
    /// atom, if any; equations that already have the terminal shape
    /// `F(graph-free args) = variable` are left alone.
    fn extractable(&self, atom: &Formula) -> Option<Term> {
        let exempt = |l: &Term, r: &Term| -> bool {
            matches!(r, Term::Var(_))
                && matches!(l, Term::App(name, args)
                    if self.is_graph_fun(name) && args.iter().all(|a| self.graph_free(a)))
        };
        match atom {
            Formula::Eq(l, r) => {
                if exempt(l, r) {
                    return self.innermost_graph_strict(l).or_else(|| self.innermost_graph(r));
                }
                if exempt(r, l) {
                    return self.innermost_graph(l).or_else(|| self.innermost_graph_strict(r));
                }
                self.innermost_graph(l).or_else(|| self.innermost_graph(r))
            }
            Formula::Rel(_, args) => args.iter().find_map(|a| self.innermost_graph(a)),
            _ => None,
        }
    }

    fn graph_free(&self, t: &Term) -> bool {
        match t {
            Term::Var(_) => true,
            Term::App(name, args) => {
                !self.is_graph_fun(name) && args.iter().all(|a| self.graph_free(a))
            }
        }
    }

    /// Leftmost graph-defined application all of whose arguments are
    /// graph-free, considering `t` itself.
    fn innermost_graph(&self, t: &Term) -> Option<Term> {
        match t {
            Term::Var(_) => None,
            Term::App(name, args) => args
                .iter()
                .find_map(|a| self.innermost_graph(a))
                .or_else(|| {
                    (self.is_graph_fun(name) && args.iter().all(|a| self.graph_free(a)))
                        .then(|| t.clone())
                }),
        }
    }

    /// Like [`Self::innermost_graph`], but never returns `t` itself.
    fn innermost_graph_strict(&self, t: &Term) -> Option<Term> {
        match t {
            Term::Var(_) => None,
            Term::App(_, args) => args.iter().find_map(|a| self.innermost_graph(a)),
        }
    }

    fn matrix(
        &self,
        f: &Formula,
        names: &mut BTreeMap<String, Vec<String>>,
        avoid: &mut BTreeSet<String>,
    ) -> Formula {
        match f {
            Formula::True | Formula::False => f.clone(),
            Formula::Eq(l, r) => {
                if let Some(g) = self.graph_equation(l, r, names) {
                    return g;
                }
                if let Some(g) = self.graph_equation(r, l, names) {
                    return g;
                }
                let lt = self.term_tuple(l, names);
                let rt = self.term_tuple(r, names);
                self.equality_of(lt, rt)
            }
            Formula::Rel(name, args) => {
                let formula = &self.rels[name];
                let mut binding = BTreeMap::new();
                for (i, a) in args.iter().enumerate() {
                    for (d, t) in self.term_tuple(a, names).into_iter().enumerate() {
                        binding.insert(slot(i * self.dim + d), t);
                    }
                }
                substitute(formula, &binding)
            }
            Formula::Not(g) => Formula::not(self.matrix(g, names, avoid)),
            Formula::And(a, b) => {
                Formula::and(self.matrix(a, names, avoid), self.matrix(b, names, avoid))
            }
            Formula::Or(a, b) => {
                Formula::or(self.matrix(a, names, avoid), self.matrix(b, names, avoid))
            }
            Formula::Imp(a, b) => {
                Formula::imp(self.matrix(a, names, avoid), self.matrix(b, names, avoid))
            }
            Formula::Iff(a, b) => {
                Formula::iff(self.matrix(a, names, avoid), self.matrix(b, names, avoid))
            }
            Formula::Exists(v, g) => {
                let tuple = self.tuple_names(v, avoid);
                let saved = names.insert(v.clone(), tuple.clone());
                let mut body = self.matrix(g, names, avoid);
                if let Some(d) = self.domain_at(&tuple) {
                    body = Formula::and(d, body);
                }
                restore(names, v, saved);
                Formula::exists_all(&tuple, body)
            }
            Formula::Forall(v, g) => {
                let tuple = self.tuple_names(v, avoid);
                let saved = names.insert(v.clone(), tuple.clone());
                let mut body = self.matrix(g, names, avoid);
                if let Some(d) = self.domain_at(&tuple) {
                    body = Formula::imp(d, body);
                }
                restore(names, v, saved);
                Formula::forall_all(&tuple, body)
            }
        }
    }

    /// Translation of the terminal equation `F(args) = y` for graph-defined
    /// `F`, in either orientation; `None` when `l` is not such an application.
    fn graph_equation(
        &self,
        l: &Term,
        r: &Term,
        names: &BTreeMap<String, Vec<String>>,
    ) -> Option<Formula> {
        let (Term::App(name, args), Term::Var(y)) = (l, r) else {
            return None;
        };
        let FunDef::Graph(g) = self.funs.get(name)? else {
            return None;
        };
        let mut binding = BTreeMap::new();
        for (i, a) in args.iter().enumerate() {
            for (d, t) in self.term_tuple(a, names).into_iter().enumerate() {
                binding.insert(slot(i * self.dim + d), t);
            }
        }
        for (d, n) in names[y].iter().enumerate() {
            binding.insert(slot(args.len() * self.dim + d), Term::var(n));
        }
        Some(substitute(g, &binding))
    }

    /// The target tuple representing a graph-free source term.
    fn term_tuple(&self, t: &Term, names: &BTreeMap<String, Vec<String>>) -> Vec<Term> {
        match t {
            Term::Var(v) => names[v].iter().map(Term::var).collect(),
            Term::App(name, args) => {
                let FunDef::Terms(ts) = &self.funs[name] else {
                    unreachable!("flattening leaves no graph-defined applications in terms")
                };
                let mut binding = BTreeMap::new();
                for (i, a) in args.iter().enumerate() {
                    for (d, sub) in self.term_tuple(a, names).into_iter().enumerate() {
                        binding.insert(slot(i * self.dim + d), sub);
                    }
                }
                ts.iter().map(|s| substitute_term(s, &binding)).collect()
            }
        }
    }

    fn equality_of(&self, lt: Vec<Term>, rt: Vec<Term>) -> Formula {
        match &self.equality {
            None => Formula::and_all(
                lt.into_iter().zip(rt).map(|(l, r)| Formula::eq(l, r)),
            ),
            Some(e) => {
                let mut binding = BTreeMap::new();
                for (d, t) in lt.into_iter().enumerate() {
                    binding.insert(slot(d), t);
                }
                for (d, t) in rt.into_iter().enumerate() {
                    binding.insert(slot(self.dim + d), t);
                }
                substitute(e, &binding)
            }
        }
    }

    /// The domain formula at a named tuple; `None` when unrelativized.
    fn domain_at(&self, tuple: &[String]) -> Option<Formula> {
        let d = self.domain.as_ref()?;
        let binding = tuple
            .iter()
            .enumerate()
            .map(|(i, n)| (slot(i), Term::var(n)))
            .collect();
        Some(substitute(d, &binding))
    }

    /// The target tuple of a source term under a slot-to-slot renaming,
    /// for fully term-defined translations.
    fn term_tuple_for_compose(
        &self,
        t: &Term,
        names: &BTreeMap<String, Vec<String>>,
    ) -> Result<Vec<Term>, InterpError> {
        if !self.is_term_defined() {
            return Err(InterpError::NotTermDefined);
        }
        Ok(self.term_tuple(t, names))
    }
}

fn restore(names: &mut BTreeMap<String, Vec<String>>, v: &str, saved: Option<Vec<String>>) {
    match saved {
        Some(t) => {
            names.insert(v.to_string(), t);
        }
        None => {
            names.remove(v);
        }
    }
}

fn replace_in_term(t: &Term, from: &Term, to: &Term) -> Term {
    if t == from {
        return to.clone();
    }
    match t {
        Term::Var(_) => t.clone(),
        Term::App(name, args) => Term::App(
            name.clone(),
            args.iter().map(|a| replace_in_term(a, from, to)).collect(),
        ),
    }
}

fn replace_in_atom(atom: &Formula, from: &Term, to: &Term) -> Formula {
    match atom {
        Formula::Eq(l, r) => {
            Formula::eq(replace_in_term(l, from, to), replace_in_term(r, from, to))
        }
        Formula::Rel(name, args) => Formula::rel(
            name,
            args.iter().map(|a| replace_in_term(a, from, to)).collect::<Vec<_>>(),
        ),
        _ => atom.clone(),
    }
}

/// What happened when an obligation met the decision procedure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Discharge {
    Undischarged,
    Decided(DecisionResult),
    Failed(String),
}

/// One proof obligation of an interpretation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Obligation {
    pub label: String,
    pub sentence: Formula,
    pub discharge: Discharge,
}

/// The obligations making a translation an interpretation: totality of each
/// graph-defined function, the translated equality axioms, and the
/// translated source axioms, in that order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ObligationReport {
    pub obligations: Vec<Obligation>,
}

/// Generates the obligation list for interpreting `axioms` through `i`.
///
/// Equality obligations cover reflexivity, symmetry, and transitivity plus a
/// congruence sentence per source symbol of positive arity; for absolute
/// equality these translate to tautologies and are discharged instantly.
pub fn obligations(i: &Translation, axioms: &[Formula]) -> Result<ObligationReport, InterpError> {
    let mut out = Vec::new();
    for (name, arity) in i.source.functions() {
        if !i.is_graph_fun(name) {
            continue;
        }
        out.push(Obligation {
            label: format!("totality {name}"),
            sentence: totality_sentence(i, name, arity),
            discharge: Discharge::Undischarged,
        });
    }
    for (label, f) in equality_axioms(&i.source) {
        out.push(Obligation {
            label,
            sentence: i.translate(&f)?,
            discharge: Discharge::Undischarged,
        });
    }
    for (k, f) in axioms.iter().enumerate() {
        out.push(Obligation {
            label: format!("axiom {}", k + 1),
            sentence: i.translate(f)?,
            discharge: Discharge::Undischarged,
        });
    }
    Ok(ObligationReport { obligations: out })
}

impl ObligationReport {
    /// Attempts to decide every obligation over the target signature, under
    /// the given background assumptions.  Resource failures are recorded on
    /// the obligation and do not stop the run.
    pub fn discharge_all(
        &mut self,
        i: &Translation,
        assumptions: &[Formula],
        limits: &Limits,
    ) {
        for ob in &mut self.obligations {
            let goal = if assumptions.is_empty() {
                ob.sentence.clone()
            } else {
                Formula::imp(Formula::and_all(assumptions.iter().cloned()), ob.sentence.clone())
            };
            ob.discharge = match decide_with_limits(&goal, &i.target, limits) {
                Ok(r) => Discharge::Decided(r),
                Err(e) => Discharge::Failed(e.to_string()),
            };
        }
    }

    /// True when every obligation is decided valid.
    pub fn all_valid(&self) -> bool {
        self.obligations.iter().all(|ob| match &ob.discharge {
            Discharge::Decided(r) => r.verdict == crate::decide::Verdict::Valid,
            _ => false,
        })
    }
}

/// The sentence stating that a graph-defined function is total on the
/// domain: universally over the argument tuples, the graph has an image
/// tuple inside the domain.
fn totality_sentence(i: &Translation, name: &str, arity: usize) -> Formula {
    let FunDef::Graph(g) = &i.funs[name] else {
        unreachable!("totality is only stated for graph-defined functions")
    };
    let mut avoid = g.all_vars();
    if let Some(d) = &i.domain {
        avoid.extend(d.all_vars());
    }
    let arg_tuples: Vec<Vec<String>> = (0..arity)
        .map(|k| i.tuple_names(&format!("x{k}"), &mut avoid))
        .collect();
    let result_tuple = i.tuple_names("y", &mut avoid);
    let mut binding = BTreeMap::new();
    for (k, tuple) in arg_tuples.iter().enumerate() {
        for (d, n) in tuple.iter().enumerate() {
            binding.insert(slot(k * i.dim + d), Term::var(n));
        }
    }
    for (d, n) in result_tuple.iter().enumerate() {
        binding.insert(slot(arity * i.dim + d), Term::var(n));
    }
    let graph = substitute(g, &binding);
    let mut body = graph;
    if let Some(d) = i.domain_at(&result_tuple) {
        body = Formula::and(d, body);
    }
    let mut inner = Formula::exists_all(&result_tuple, body);
    let presuppositions: Vec<Formula> =
        arg_tuples.iter().filter_map(|t| i.domain_at(t)).collect();
    if !presuppositions.is_empty() {
        inner = Formula::imp(Formula::and_all(presuppositions), inner);
    }
    let all_args: Vec<String> = arg_tuples.into_iter().flatten().collect();
    Formula::forall_all(&all_args, inner)
}

/// Source-level equality axioms: reflexivity, symmetry, transitivity, and a
/// congruence sentence per symbol of positive arity.
fn equality_axioms(sig: &Signature) -> Vec<(String, Formula)> {
    let x = || Term::var("x");
    let y = || Term::var("y");
    let mut out = vec![
        (
            "equality reflexivity".to_string(),
            Formula::forall("x", Formula::eq(x(), x())),
        ),
        (
            "equality symmetry".to_string(),
            Formula::forall(
                "x",
                Formula::forall("y", Formula::imp(Formula::eq(x(), y()), Formula::eq(y(), x()))),
            ),
        ),
        (
            "equality transitivity".to_string(),
            Formula::forall(
                "x",
                Formula::forall(
                    "y",
                    Formula::forall(
                        "z",
                        Formula::imp(
                            Formula::and(
                                Formula::eq(x(), y()),
                                Formula::eq(y(), Term::var("z")),
                            ),
                            Formula::eq(x(), Term::var("z")),
                        ),
                    ),
                ),
            ),
        ),
    ];
    for (name, kind, arity) in sig.symbols() {
        if arity == 0 {
            continue;
        }
        let xs: Vec<String> = (0..arity).map(|k| format!("x{k}")).collect();
        let ys: Vec<String> = (0..arity).map(|k| format!("y{k}")).collect();
        let pairs = Formula::and_all(
            xs.iter().zip(&ys).map(|(a, b)| Formula::eq(Term::var(a), Term::var(b))),
        );
        let xt: Vec<Term> = xs.iter().map(Term::var).collect();
        let yt: Vec<Term> = ys.iter().map(Term::var).collect();
        let conclusion = match kind {
            SymbolKind::Function => {
                Formula::eq(Term::app(name, xt), Term::app(name, yt))
            }
            SymbolKind::Relation => {
                Formula::imp(Formula::rel(name, xt), Formula::rel(name, yt))
            }
        };
        let vars: Vec<String> = xs.into_iter().chain(ys).collect();
        out.push((
            format!("congruence {name}"),
            Formula::forall_all(&vars, Formula::imp(pairs, conclusion)),
        ));
    }
    out
}

/// Composes two translations: `outer` maps the intermediate language into
/// the final target, `inner` maps the source into the intermediate
/// language.  The result translates the source into the final target with
/// the product dimension.
pub fn compose(outer: &Translation, inner: &Translation) -> Result<Translation, InterpError> {
    if inner.target != outer.source {
        return Err(InterpError::SignatureMismatch);
    }
    let n1 = outer.dim;
    let n2 = inner.dim;
    let dim = n1 * n2;
    // Intermediate-level variable `v{j}` becomes the block of final slots
    // starting at j·n1.
    let block_names = |count: usize| -> BTreeMap<String, Vec<String>> {
        (0..count)
            .map(|j| (slot(j), (0..n1).map(|d| slot(j * n1 + d)).collect()))
            .collect()
    };

    let mut domain_parts: Vec<Formula> = Vec::new();
    if let Some(d2) = &inner.domain {
        domain_parts.push(outer.translate_with_names(d2, &block_names(n2))?);
    }
    if outer.domain.is_some() {
        for j in 0..n2 {
            let tuple: Vec<String> = (0..n1).map(|d| slot(j * n1 + d)).collect();
            domain_parts.extend(outer.domain_at(&tuple));
        }
    }
    let domain = match domain_parts.len() {
        0 => None,
        _ => Some(Formula::and_all(domain_parts)),
    };

    let equality = if inner.equality.is_none() && outer.equality.is_none() {
        None
    } else {
        let e2 = inner.equality.clone().unwrap_or_else(|| {
            Formula::and_all(
                (0..n2).map(|j| Formula::eq(Term::var(slot(j)), Term::var(slot(n2 + j)))),
            )
        });
        Some(outer.translate_with_names(&e2, &block_names(2 * n2))?)
    };

    let mut rels = BTreeMap::new();
    for (name, arity) in inner.source.relations() {
        let f2 = &inner.rels[name];
        rels.insert(name.to_string(), outer.translate_with_names(f2, &block_names(arity * n2))?);
    }

    let mut funs = BTreeMap::new();
    for (name, arity) in inner.source.functions() {
        let def = match &inner.funs[name] {
            FunDef::Terms(ts) if outer.is_term_defined() => {
                let names = block_names(arity * n2);
                let mut composed = Vec::new();
                for t in ts {
                    composed.extend(outer.term_tuple_for_compose(t, &names)?);
                }
                FunDef::Terms(composed)
            }
            def => {
                // Fall back to a graph: state the intermediate-level graph
                // and translate it.
                let g2 = match def {
                    FunDef::Graph(g) => g.clone(),
                    FunDef::Terms(ts) => Formula::and_all(ts.iter().enumerate().map(|(j, t)| {
                        Formula::eq(Term::var(slot(arity * n2 + j)), t.clone())
                    })),
                };
                FunDef::Graph(outer.translate_with_names(&g2, &block_names((arity + 1) * n2))?)
            }
        };
        funs.insert(name.to_string(), def);
    }

    Translation::new(inner.source.clone(), outer.target.clone(), dim, domain, equality, rels, funs)
}

/// The structure a translation induces on a finite target structure, for
/// unrelativized, absolute-equality, term-defined translations: elements
/// are dimension-tuples, functions evaluate the defining terms, relations
/// evaluate their formulas.
pub fn induced_structure(
    i: &Translation,
    n: &FiniteStructure,
) -> Result<FiniteStructure, InterpError> {
    const CAP: usize = 4096;
    if !i.is_term_defined() {
        return Err(InterpError::NotTermDefined);
    }
    if i.domain.is_some() || i.equality.is_some() {
        return Err(InterpError::NotAbsolute);
    }
    if n.signature() != &i.target {
        return Err(InterpError::SignatureMismatch);
    }
    let size = match n.size().checked_pow(i.dim as u32) {
        Some(s) if s <= CAP => s,
        Some(s) => return Err(InterpError::InducedTooLarge { size: s, cap: CAP }),
        None => return Err(InterpError::InducedTooLarge { size: usize::MAX, cap: CAP }),
    };
    let decode = |e: usize| -> Vec<usize> {
        let mut components = vec![0usize; i.dim];
        let mut rest = e;
        for d in (0..i.dim).rev() {
            components[d] = rest % n.size();
            rest /= n.size();
        }
        components
    };
    let encode = |components: &[usize]| -> usize {
        components.iter().fold(0usize, |acc, &c| acc * n.size() + c)
    };
    let mut m = FiniteStructure::new(i.source.clone(), size)?;
    for (name, arity) in i.source.functions().map(|(s, a)| (s.to_string(), a)) {
        let FunDef::Terms(ts) = &i.funs[&name] else { unreachable!() };
        for tuple in tuples(size, arity) {
            let mut env = BTreeMap::new();
            for (k, &e) in tuple.iter().enumerate() {
                for (d, &c) in decode(e).iter().enumerate() {
                    env.insert(slot(k * i.dim + d), c);
                }
            }
            let value: Vec<usize> =
                ts.iter().map(|t| n.eval_term(t, &env)).collect::<Result<_, _>>()?;
            m.set_fun(&name, &tuple, encode(&value))?;
        }
    }
    for (name, arity) in i.source.relations().map(|(s, a)| (s.to_string(), a)) {
        let formula = &i.rels[&name];
        for tuple in tuples(size, arity) {
            let mut env = BTreeMap::new();
            for (k, &e) in tuple.iter().enumerate() {
                for (d, &c) in decode(e).iter().enumerate() {
                    env.insert(slot(k * i.dim + d), c);
                }
            }
            let holds = n.eval_formula(formula, &env)?;
            m.set_rel(&name, &tuple, holds)?;
        }
    }
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cli::harness;
    use crate::decide::{decide, Verdict};
    use crate::syntax::parser::{parse_formula, parse_signature, print_formula};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn fr_sig() -> Signature {
        parse_signature("(fun F 1) (const c)").unwrap()
    }

    #[test]
    fn identity_translation_is_the_identity() {
        let sig = parse_signature("(fun F 1) (rel P 2) (const c)").unwrap();
        let i = Translation::identity(&sig);
        for text in [
            "(forall x (exists y (and (= (F x) y) (P y c))))",
            "(imp (P c c) (exists z (= (F (F z)) c)))",
            "(iff true (or (P c c) false))",
        ] {
            let f = parse_formula(text, &sig).unwrap();
            assert_eq!(i.translate(&f).unwrap(), f);
        }
    }

    #[test]
    fn term_defined_translation_stays_quantifier_free() {
        let source = parse_signature("(fun F 1)").unwrap();
        let target = parse_signature("(fun H 2)").unwrap();
        let funs = [(
            "F".to_string(),
            FunDef::Terms(vec![Term::app(
                "H",
                vec![Term::var(slot(0)), Term::var(slot(0))],
            )]),
        )]
        .into();
        let i =
            Translation::new(source.clone(), target, 1, None, None, BTreeMap::new(), funs)
                .unwrap();
        assert!(i.is_quantifier_free());
        let f = parse_formula("(not (= (F (F x)) x))", &source).unwrap();
        let out = i.translate(&f).unwrap();
        assert!(out.is_quantifier_free());
        assert_eq!(print_formula(&out), "(not (= (H (H x x) (H x x)) x))");
    }

    #[test]
    fn graph_functions_translate_through_fresh_existentials() {
        let source = parse_signature("(fun F 1) (const c)").unwrap();
        let target = parse_signature("(rel G 2) (const c)").unwrap();
        let funs: BTreeMap<String, FunDef> = [
            (
                "F".to_string(),
                FunDef::Graph(
                    parse_formula(&format!("(G {} {})", slot(0), slot(1)), &target).unwrap(),
                ),
            ),
            ("c".to_string(), FunDef::Terms(vec![Term::constant("c")])),
        ]
        .into();
        let i = Translation::new(source.clone(), target, 1, None, None, BTreeMap::new(), funs)
            .unwrap();
        let f = parse_formula("(= (F c) c)", &source).unwrap();
        let out = i.translate(&f).unwrap();
        assert_eq!(print_formula(&out), "(exists w_1 (and (G c w_1) (= w_1 c)))");
    }

    #[test]
    fn nested_graph_applications_unnest_innermost_first() {
        let source = parse_signature("(fun F 1)").unwrap();
        let target = parse_signature("(rel G 2)").unwrap();
        let funs: BTreeMap<String, FunDef> = [(
            "F".to_string(),
            FunDef::Graph(
                parse_formula(&format!("(G {} {})", slot(0), slot(1)), &target).unwrap(),
            ),
        )]
        .into();
        let i = Translation::new(source.clone(), target, 1, None, None, BTreeMap::new(), funs)
            .unwrap();
        // After the inner occurrence is pulled out, the outer equation
        // already has the terminal shape and needs no second quantifier.
        let f = parse_formula("(= (F (F x)) x)", &source).unwrap();
        assert_eq!(
            print_formula(&i.translate(&f).unwrap()),
            "(exists w_1 (and (G x w_1) (G w_1 x)))"
        );
        let g = parse_formula("(= (F (F (F x))) x)", &source).unwrap();
        assert_eq!(
            print_formula(&i.translate(&g).unwrap()),
            "(exists w_1 (and (G x w_1) (exists w_2 (and (G w_1 w_2) (G w_2 x)))))"
        );
    }

    #[test]
    fn quantifiers_become_relativized_blocks() {
        let source = parse_signature("(rel P 1)").unwrap();
        let target = parse_signature("(rel D 1) (rel Q 2)").unwrap();
        let rels = [(
            "P".to_string(),
            parse_formula(&format!("(Q {} {})", slot(0), slot(1)), &target).unwrap(),
        )]
        .into();
        let domain = parse_formula(&format!("(D {})", slot(0)), &target).unwrap();
        // Dimension 2 with a one-slot domain formula: the domain applies to
        // the first component of each tuple.
        let i = Translation::new(
            source.clone(),
            target,
            2,
            Some(domain),
            None,
            rels,
            BTreeMap::new(),
        )
        .unwrap();
        let f = parse_formula("(exists u (P u))", &source).unwrap();
        let out = i.translate(&f).unwrap();
        assert_eq!(
            print_formula(&out),
            "(exists u_0 (exists u_1 (and (D u_0) (Q u_0 u_1))))"
        );
        let g = parse_formula("(forall u (P u))", &source).unwrap();
        assert_eq!(
            print_formula(&i.translate(&g).unwrap()),
            "(forall u_0 (forall u_1 (imp (D u_0) (Q u_0 u_1))))"
        );
    }

    #[test]
    fn totality_obligation_has_the_stated_shape() {
        let source = parse_signature("(fun F 1)").unwrap();
        let target = parse_signature("(rel D 1) (rel G 2)").unwrap();
        let funs: BTreeMap<String, FunDef> = [(
            "F".to_string(),
            FunDef::Graph(
                parse_formula(&format!("(G {} {})", slot(0), slot(1)), &target).unwrap(),
            ),
        )]
        .into();
        let domain = parse_formula(&format!("(D {})", slot(0)), &target).unwrap();
        let i = Translation::new(
            source,
            target,
            1,
            Some(domain),
            None,
            BTreeMap::new(),
            funs,
        )
        .unwrap();
        let report = obligations(&i, &[]).unwrap();
        assert_eq!(report.obligations[0].label, "totality F");
        assert_eq!(
            print_formula(&report.obligations[0].sentence),
            "(forall x0 (imp (D x0) (exists y (and (D y) (G x0 y)))))"
        );
    }

    #[test]
    fn absolute_equality_obligations_discharge_instantly() {
        let sig = parse_signature("(fun F 1)").unwrap();
        let i = Translation::identity(&sig);
        let mut report = obligations(&i, &[]).unwrap();
        let labels: Vec<&str> =
            report.obligations.iter().map(|ob| ob.label.as_str()).collect();
        assert_eq!(
            labels,
            vec![
                "equality reflexivity",
                "equality symmetry",
                "equality transitivity",
                "congruence F"
            ]
        );
        report.discharge_all(&i, &[], &Limits::default());
        assert!(report.all_valid());
    }

    #[test]
    fn composition_multiplies_dimensions() {
        let sig = parse_signature("(fun H 2)").unwrap();
        let two = Translation::new(
            sig.clone(),
            sig.clone(),
            2,
            None,
            None,
            BTreeMap::new(),
            [(
                "H".to_string(),
                FunDef::Terms(vec![
                    Term::app("H", vec![Term::var(slot(0)), Term::var(slot(2))]),
                    Term::app("H", vec![Term::var(slot(1)), Term::var(slot(3))]),
                ]),
            )]
            .into(),
        )
        .unwrap();
        let three = Translation::new(
            sig.clone(),
            sig.clone(),
            3,
            None,
            None,
            BTreeMap::new(),
            [(
                "H".to_string(),
                FunDef::Terms(vec![
                    Term::app("H", vec![Term::var(slot(0)), Term::var(slot(3))]),
                    Term::app("H", vec![Term::var(slot(1)), Term::var(slot(4))]),
                    Term::app("H", vec![Term::var(slot(2)), Term::var(slot(5))]),
                ]),
            )]
            .into(),
        )
        .unwrap();
        let c = compose(&two, &three).unwrap();
        assert_eq!(c.dim(), 6);
        assert!(c.is_term_defined());
    }

    #[test]
    fn composition_with_identity_is_a_unit() {
        let sig = parse_signature("(fun F 1) (rel P 1) (const c)").unwrap();
        let target = parse_signature("(fun H 2) (rel P 1) (const c)").unwrap();
        let i = Translation::new(
            sig.clone(),
            target.clone(),
            1,
            None,
            None,
            [(
                "P".to_string(),
                parse_formula(&format!("(P {})", slot(0)), &target).unwrap(),
            )]
            .into(),
            [
                (
                    "F".to_string(),
                    FunDef::Terms(vec![Term::app(
                        "H",
                        vec![Term::var(slot(0)), Term::var(slot(0))],
                    )]),
                ),
                ("c".to_string(), FunDef::Terms(vec![Term::constant("c")])),
            ]
            .into(),
        )
        .unwrap();
        assert_eq!(compose(&i, &Translation::identity(&sig)).unwrap(), i);
        assert_eq!(compose(&Translation::identity(&target), &i).unwrap(), i);
    }

    #[test]
    fn composed_translation_matches_sequential_translation() {
        let sig = parse_signature("(fun F 1) (const c)").unwrap();
        let mid = parse_signature("(fun H 2) (const c)").unwrap();
        let inner = Translation::new(
            sig.clone(),
            mid.clone(),
            1,
            None,
            None,
            BTreeMap::new(),
            [
                (
                    "F".to_string(),
                    FunDef::Terms(vec![Term::app(
                        "H",
                        vec![Term::var(slot(0)), Term::var(slot(0))],
                    )]),
                ),
                ("c".to_string(), FunDef::Terms(vec![Term::constant("c")])),
            ]
            .into(),
        )
        .unwrap();
        let outer = Translation::new(
            mid.clone(),
            mid.clone(),
            1,
            None,
            None,
            BTreeMap::new(),
            [
                (
                    "H".to_string(),
                    FunDef::Terms(vec![Term::app(
                        "H",
                        vec![Term::var(slot(1)), Term::var(slot(0))],
                    )]),
                ),
                ("c".to_string(), FunDef::Terms(vec![Term::constant("c")])),
            ]
            .into(),
        )
        .unwrap();
        let c = compose(&outer, &inner).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..20 {
            let f = harness::random_qf_formula(&sig, &["x", "y"], 4, &mut rng);
            let two_step = outer.translate(&inner.translate(&f).unwrap()).unwrap();
            let one_step = c.translate(&f).unwrap();
            assert!(
                crate::euf::formulas_equivalent(&two_step, &one_step),
                "formula: {f:?}"
            );
        }
    }

    #[test]
    fn induced_structure_matches_translated_evaluation() {
        let source = parse_signature("(fun F 1) (rel P 1) (const c)").unwrap();
        let target = parse_signature("(fun H 2) (rel Q 2) (const c)").unwrap();
        let i = Translation::new(
            source.clone(),
            target.clone(),
            1,
            None,
            None,
            [(
                "P".to_string(),
                parse_formula(&format!("(Q {} {})", slot(0), slot(0)), &target).unwrap(),
            )]
            .into(),
            [
                (
                    "F".to_string(),
                    FunDef::Terms(vec![Term::app(
                        "H",
                        vec![Term::var(slot(0)), Term::var(slot(0))],
                    )]),
                ),
                ("c".to_string(), FunDef::Terms(vec![Term::constant("c")])),
            ]
            .into(),
        )
        .unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..10 {
            let n = harness::random_structure(&target, 3, &mut rng);
            let induced = induced_structure(&i, &n).unwrap();
            for _ in 0..5 {
                let f = harness::random_sentence(&source, &["x"], 3, &mut rng);
                assert_eq!(
                    n.eval_sentence(&i.translate(&f).unwrap()).unwrap(),
                    induced.eval_sentence(&f).unwrap(),
                    "sentence: {f:?}"
                );
            }
        }
    }

    #[test]
    fn two_dimensional_induced_structures_square_the_domain() {
        let source = parse_signature("(fun F 1)").unwrap();
        let target = fr_sig();
        let i = Translation::new(
            source.clone(),
            target.clone(),
            2,
            None,
            None,
            BTreeMap::new(),
            [(
                "F".to_string(),
                FunDef::Terms(vec![
                    Term::app("F", vec![Term::var(slot(1))]),
                    Term::var(slot(0)),
                ]),
            )]
            .into(),
        )
        .unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let n = harness::random_structure(&target, 2, &mut rng);
        let induced = induced_structure(&i, &n).unwrap();
        assert_eq!(induced.size(), 4);
        for _ in 0..10 {
            let f = harness::random_sentence(&source, &["x"], 3, &mut rng);
            assert_eq!(
                n.eval_sentence(&i.translate(&f).unwrap()).unwrap(),
                induced.eval_sentence(&f).unwrap(),
                "sentence: {f:?}"
            );
        }
    }

    #[test]
    fn graph_translation_agrees_with_decide_on_a_defined_graph() {
        // Interpret a unary function as the graph of the identity; the
        // fixed-point sentence translates to a sentence provable outright.
        let source = parse_signature("(fun F 1)").unwrap();
        let target = parse_signature("").unwrap();
        let funs: BTreeMap<String, FunDef> = [(
            "F".to_string(),
            FunDef::Graph(
                parse_formula(&format!("(= {} {})", slot(0), slot(1)), &target).unwrap(),
            ),
        )]
        .into();
        let i = Translation::new(source.clone(), target.clone(), 1, None, None, BTreeMap::new(), funs)
            .unwrap();
        let f = parse_formula("(exists x (= (F x) x))", &source).unwrap();
        let out = i.translate(&f).unwrap();
        let r = decide(&out, &target).unwrap();
        assert_eq!(r.verdict, Verdict::Valid);
    }
}
