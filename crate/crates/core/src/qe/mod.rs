//! Quantifier elimination for existentially closed structures.
//!
//! The pipeline: a quantifier-free matrix is decomposed into a disjunction of
//! elementary existential formulas (a subterm-closed term set, an admissible
//! partition of it, and a truth assignment for relation literals); each
//! elementary formula is replaced by its resultant, a quantifier-free formula
//! over the retained terms; the disjunction of resultants is simplified.
//! Quantifiers are eliminated innermost first, universals through their
//! existential duals.

mod eliminate;
mod partitions;
mod simplify;
mod star;

pub use eliminate::{elementary_decomposition, eliminate, eliminate_one};
pub(crate) use partitions::app_structure;
pub use partitions::{
    close_congruence, enumerate_congruences, is_admissible, CongruenceEnum, Partition,
};
pub use simplify::simplify_open;
pub use star::{compute_star, compute_star_with, StarChoice, StarResult};

use crate::syntax::{subterm_closure, Formula, Signature, SymbolKind, Term};
use std::collections::BTreeMap;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum QeError {
    #[error("partition does not cover the term set exactly")]
    BadPartition,
    #[error("partition is not closed under the congruence condition")]
    NotCongruence,
    #[error("term set is not closed under subterms")]
    NotSubtermClosed,
    #[error("term set has {got} terms, exceeding the limit of {cap}")]
    TooManyTerms { got: usize, cap: usize },
    #[error("more than {cap} partition candidates")]
    TooManyPartitions { cap: u64 },
    #[error("variable {0} occurs in the matrix but is neither free nor bound")]
    StrayVariable(String),
    #[error("free and bound variable lists overlap or repeat at {0}")]
    VariableClash(String),
    #[error("term {0} is not well formed over the signature")]
    BadTerm(String),
    #[error("literal assignment uses {name} with class {class}, but there are only {blocks} classes")]
    EpsilonClassOutOfRange { name: String, class: usize, blocks: usize },
    #[error("literal assignment mentions {0}, which is not a relation symbol")]
    EpsilonNotRelation(String),
    #[error("literal assignment for {name} expects arity {expected}, got a tuple of length {got}")]
    EpsilonArity { name: String, expected: usize, got: usize },
    #[error("literal assignment for {name} is missing the class tuple {tuple:?}")]
    EpsilonIncomplete { name: String, tuple: Vec<usize> },
    #[error("the input formula must be quantifier-free here")]
    NotQuantifierFree,
    #[error("formula is not well formed: {0}")]
    IllFormed(String),
}

/// An elementary existential formula: a finite subterm-closed term set, an
/// admissible partition of it, and a total truth assignment for the relation
/// literals over its classes.  The associated matrix fixes, for every pair of
/// terms, whether they are equal, and for every relation tuple, whether it
/// holds.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ElementaryExistential {
    theta: Vec<Term>,
    free_vars: Vec<String>,
    bound_vars: Vec<String>,
    partition: Partition,
    /// `(relation, class tuple) -> polarity`, total per mentioned relation.
    epsilon: BTreeMap<(String, Vec<usize>), bool>,
}

impl ElementaryExistential {
    /// Validates and builds.  `theta` must be subterm-closed (any order; it
    /// is sorted internally), `partition` admissible over the sorted order,
    /// and `epsilon` total over class tuples for every relation it mentions.
    pub fn new(
        sig: &Signature,
        free_vars: Vec<String>,
        bound_vars: Vec<String>,
        theta: Vec<Term>,
        partition: Partition,
        epsilon: BTreeMap<(String, Vec<usize>), bool>,
    ) -> Result<ElementaryExistential, QeError> {
        let sorted = subterm_closure(theta.iter().cloned());
        {
            let mut given = theta.clone();
            given.sort();
            given.dedup();
            if given != sorted {
                return Err(QeError::NotSubtermClosed);
            }
        }
        if partition.len() != sorted.len() {
            return Err(QeError::BadPartition);
        }
        if !is_admissible(&sorted, &partition) {
            return Err(QeError::NotCongruence);
        }

        let mut seen = std::collections::BTreeSet::new();
        for v in free_vars.iter().chain(&bound_vars) {
            if !seen.insert(v.clone()) {
                return Err(QeError::VariableClash(v.clone()));
            }
        }
        for t in &sorted {
            if t.well_formed(sig).is_err() {
                return Err(QeError::BadTerm(t.to_string()));
            }
            for v in t.vars() {
                if !seen.contains(&v) {
                    return Err(QeError::StrayVariable(v));
                }
            }
        }

        let blocks = partition.num_blocks();
        let mut arities: BTreeMap<&str, usize> = BTreeMap::new();
        for ((name, tuple), _) in &epsilon {
            match sig.kind_arity(name) {
                Some((SymbolKind::Relation, k)) => {
                    if tuple.len() != k {
                        return Err(QeError::EpsilonArity {
                            name: name.clone(),
                            expected: k,
                            got: tuple.len(),
                        });
                    }
                    arities.insert(name, k);
                }
                _ => return Err(QeError::EpsilonNotRelation(name.clone())),
            }
            for &c in tuple {
                if c >= blocks {
                    return Err(QeError::EpsilonClassOutOfRange {
                        name: name.clone(),
                        class: c,
                        blocks,
                    });
                }
            }
        }
        for (name, k) in arities {
            for tuple in crate::structures::tuples(blocks, k) {
                if !epsilon.contains_key(&(name.to_string(), tuple.clone())) {
                    return Err(QeError::EpsilonIncomplete {
                        name: name.to_string(),
                        tuple,
                    });
                }
            }
        }

        Ok(ElementaryExistential {
            theta: sorted,
            free_vars,
            bound_vars,
            partition,
            epsilon,
        })
    }

    pub fn theta(&self) -> &[Term] {
        &self.theta
    }

    pub fn free_vars(&self) -> &[String] {
        &self.free_vars
    }

    pub fn bound_vars(&self) -> &[String] {
        &self.bound_vars
    }

    pub fn partition(&self) -> &Partition {
        &self.partition
    }

    pub fn epsilon(&self) -> &BTreeMap<(String, Vec<usize>), bool> {
        &self.epsilon
    }

    /// Index of a term in the sorted term set, if present.
    pub fn index_of(&self, t: &Term) -> Option<usize> {
        self.theta.binary_search(t).ok()
    }

    /// Relations the literal assignment covers, with their arities.
    pub fn epsilon_relations(&self) -> BTreeMap<String, usize> {
        self.epsilon
            .keys()
            .map(|(name, tuple)| (name.clone(), tuple.len()))
            .collect()
    }

    /// Polarity assigned to `rel` on a tuple of term-set indices.
    pub fn epsilon_bit(&self, rel: &str, term_indices: &[usize]) -> Option<bool> {
        let classes: Vec<usize> = term_indices
            .iter()
            .map(|&i| self.partition.block_of(i))
            .collect();
        self.epsilon.get(&(rel.to_string(), classes)).copied()
    }

    /// The quantifier-free matrix: equalities inside classes, disequalities
    /// across classes, and one relation literal per covered tuple.
    pub fn theta_formula(&self) -> Formula {
        let mut conjuncts = Vec::new();
        for i in 0..self.theta.len() {
            for j in i + 1..self.theta.len() {
                let eq = Formula::eq(self.theta[i].clone(), self.theta[j].clone());
                if self.partition.same(i, j) {
                    conjuncts.push(eq);
                } else {
                    conjuncts.push(Formula::not(eq));
                }
            }
        }
        for (rel, arity) in self.epsilon_relations() {
            for indices in crate::structures::tuples(self.theta.len(), arity) {
                let args: Vec<Term> = indices.iter().map(|&i| self.theta[i].clone()).collect();
                let atom = Formula::rel(&rel, args);
                match self.epsilon_bit(&rel, &indices) {
                    Some(true) => conjuncts.push(atom),
                    Some(false) => conjuncts.push(Formula::not(atom)),
                    None => unreachable!("validated assignments are total"),
                }
            }
        }
        Formula::and_all(conjuncts)
    }

    /// The matrix under its existential prefix.
    pub fn exists_formula(&self) -> Formula {
        Formula::exists_all(&self.bound_vars, self.theta_formula())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parser::parse_signature;

    fn v(n: &str) -> Term {
        Term::var(n)
    }

    fn sig_fr() -> Signature {
        parse_signature("(fun F 1) (rel P 1)").unwrap()
    }

    #[test]
    fn builds_and_prints_matrix() {
        let sig = sig_fr();
        let theta = vec![v("x"), v("y"), Term::app("F", vec![v("y")])];
        let partition = Partition::from_classes(3, &[vec![0, 2], vec![1]]).unwrap();
        let mut epsilon = BTreeMap::new();
        epsilon.insert(("P".to_string(), vec![0]), true);
        epsilon.insert(("P".to_string(), vec![1]), false);
        let e = ElementaryExistential::new(
            &sig,
            vec!["x".to_string()],
            vec!["y".to_string()],
            theta,
            partition,
            epsilon,
        )
        .unwrap();
        // Sorted term set: x, y, F(y).  The matrix lists the class
        // disequality, the in-class equality, and then the relation bits,
        // conjoined as a balanced tree.
        assert_eq!(e.theta()[2], Term::app("F", vec![v("y")]));
        let printed = crate::syntax::parser::print_formula(&e.theta_formula());
        assert_eq!(
            printed,
            "(and (and (not (= x y)) (and (= x (F y)) (not (= y (F y))))) \
             (and (P x) (and (not (P y)) (P (F y)))))"
        );
    }

    #[test]
    fn rejects_unclosed_term_set() {
        let sig = sig_fr();
        let err = ElementaryExistential::new(
            &sig,
            vec!["x".to_string()],
            vec![],
            vec![Term::app("F", vec![v("x")])],
            Partition::singletons(1),
            BTreeMap::new(),
        )
        .unwrap_err();
        assert_eq!(err, QeError::NotSubtermClosed);
    }

    #[test]
    fn rejects_non_congruence_partition() {
        let sig = parse_signature("(fun F 1)").unwrap();
        let theta = subterm_closure([Term::app("F", vec![v("x")]), Term::app("F", vec![v("y")])]);
        // x ~ y but F(x) !~ F(y).
        let p = Partition::from_classes(4, &[vec![0, 1], vec![2], vec![3]]).unwrap();
        let err = ElementaryExistential::new(
            &sig,
            vec!["x".to_string(), "y".to_string()],
            vec![],
            theta,
            p,
            BTreeMap::new(),
        )
        .unwrap_err();
        assert_eq!(err, QeError::NotCongruence);
    }

    #[test]
    fn rejects_incomplete_epsilon() {
        let sig = sig_fr();
        let mut epsilon = BTreeMap::new();
        epsilon.insert(("P".to_string(), vec![0]), true);
        let err = ElementaryExistential::new(
            &sig,
            vec!["x".to_string(), "y".to_string()],
            vec![],
            vec![v("x"), v("y")],
            Partition::singletons(2),
            epsilon,
        )
        .unwrap_err();
        assert!(matches!(err, QeError::EpsilonIncomplete { .. }));
    }

    #[test]
    fn rejects_stray_variable() {
        let sig = sig_fr();
        let err = ElementaryExistential::new(
            &sig,
            vec!["x".to_string()],
            vec![],
            vec![v("x"), v("z")],
            Partition::singletons(2),
            BTreeMap::new(),
        )
        .unwrap_err();
        assert_eq!(err, QeError::StrayVariable("z".to_string()));
    }
}
