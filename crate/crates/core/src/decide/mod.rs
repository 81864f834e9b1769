//! The three-valued decision procedure.
//!
//! A sentence is decided by eliminating its quantifiers and then asking the
//! ground solver about the quantifier-free image and its negation: the image
//! being valid makes the sentence a theorem, the negation being valid makes
//! it refutable, and anything else is contingent.  A finite structure's
//! diagram can be conjoined first, in which case the contingent case is
//! provably impossible and is reported as an internal error.
//!
//! [`naive_universal_check`] is an independent oracle for universal
//! sentences: it evaluates the sentence in every structure up to a size
//! bound read off the sentence itself, with no quantifier elimination and no
//! congruence reasoning involved.

use crate::euf::{self, Atom};
use crate::limits::Limits;
use crate::qe::{eliminate, QeError};
use crate::structures::{enumerate_structures, FiniteStructure, StructureError};
use crate::syntax::{Formula, Signature, SyntaxError, Term};
use thiserror::Error;

/// How a sentence relates to the background theory.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    /// The sentence is a theorem.
    Valid,
    /// Its negation is a theorem.
    Unsatisfiable,
    /// Both the sentence and its negation have models.
    Contingent,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::Valid => "VALID",
            Verdict::Unsatisfiable => "UNSAT",
            Verdict::Contingent => "CONTINGENT",
        })
    }
}

/// A decision together with the evidence that grounds it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecisionResult {
    pub verdict: Verdict,
    /// The quantifier-free image of the decided sentence.
    pub qf_equivalent: Formula,
    /// An atom assignment satisfying the image, when one exists.
    pub satisfying: Option<Vec<(Atom, bool)>>,
    /// An atom assignment satisfying the image's negation, when one exists.
    pub falsifying: Option<Vec<(Atom, bool)>>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DecideError {
    #[error("formula has free variables: {0:?}")]
    NotASentence(Vec<String>),
    #[error("only universally quantified sentences have a size bound")]
    NotUniversal,
    #[error("ill-formed input: {0}")]
    IllFormed(#[from] SyntaxError),
    #[error("quantifier elimination failed: {0}")]
    Qe(#[from] QeError),
    #[error("structure enumeration failed: {0}")]
    Structure(#[from] StructureError),
    #[error("a diagram-relative decision came out two-sided or empty; this is a bug")]
    DiagramInvariant,
}

/// Decides a sentence with the default resource limits.
pub fn decide(f: &Formula, sig: &Signature) -> Result<DecisionResult, DecideError> {
    decide_with_limits(f, sig, &Limits::default())
}

/// Decides a sentence: eliminates quantifiers, then classifies the ground
/// image.  Both the image and its negation are checked and the two checks
/// are asserted not to both succeed.
pub fn decide_with_limits(
    f: &Formula,
    sig: &Signature,
    limits: &Limits,
) -> Result<DecisionResult, DecideError> {
    f.well_formed(sig)?;
    let free = f.free_vars();
    if !free.is_empty() {
        return Err(DecideError::NotASentence(free.into_iter().collect()));
    }
    let g = eliminate(f, limits)?;
    let satisfying = euf::satisfying_assignment(&g);
    let falsifying = euf::satisfying_assignment(&Formula::not(g.clone()));
    let verdict = match (&satisfying, &falsifying) {
        (Some(_), None) => Verdict::Valid,
        (None, Some(_)) => Verdict::Unsatisfiable,
        (Some(_), Some(_)) => Verdict::Contingent,
        (None, None) => unreachable!("a ground formula or its negation is satisfiable"),
    };
    Ok(DecisionResult { verdict, qf_equivalent: g, satisfying, falsifying })
}

/// Decides a sentence relative to the diagram of a finite structure, with
/// the default resource limits.
pub fn decide_with_diagram(
    m: &FiniteStructure,
    f: &Formula,
) -> Result<DecisionResult, DecideError> {
    decide_with_diagram_limits(m, f, &Limits::default())
}

/// Decides `f` relative to `diag(M)`: exactly one of `diag → f` and
/// `diag → ¬f` must be a theorem, because the background theory plus any
/// diagram is complete.  Anything else signals a bug and is returned as
/// [`DecideError::DiagramInvariant`].
///
/// The result's verdict is relative to the diagram; its image and evidence
/// fields describe `diag → f` itself.
pub fn decide_with_diagram_limits(
    m: &FiniteStructure,
    f: &Formula,
    limits: &Limits,
) -> Result<DecisionResult, DecideError> {
    let (dsig, _names, sentences) = m.diagram();
    f.well_formed(&dsig)?;
    let diag = Formula::and_all(sentences);
    let pro = decide_with_limits(&Formula::imp(diag.clone(), f.clone()), &dsig, limits)?;
    let con = decide_with_limits(&Formula::imp(diag, Formula::not(f.clone())), &dsig, limits)?;
    let verdict = match (pro.verdict, con.verdict) {
        (Verdict::Valid, Verdict::Valid) => return Err(DecideError::DiagramInvariant),
        (Verdict::Valid, _) => Verdict::Valid,
        (_, Verdict::Valid) => Verdict::Unsatisfiable,
        _ => return Err(DecideError::DiagramInvariant),
    };
    Ok(DecisionResult {
        verdict,
        qf_equivalent: pro.qf_equivalent,
        satisfying: pro.satisfying,
        falsifying: pro.falsifying,
    })
}

/// Checks a universal sentence by brute force, with the default limits.
pub fn naive_universal_check(f: &Formula) -> Result<bool, DecideError> {
    naive_universal_check_with_limits(f, &Limits::default())
}

/// Evaluates a universal sentence in every structure (over the symbols the
/// sentence itself mentions) whose size is at most the number of distinct
/// subterms of the matrix, counting the prefix variables as terms.  A
/// universal sentence with a countermodel has one within that bound, so this
/// decides validity — slowly, and through none of the quantifier-elimination
/// machinery, which is what makes it a useful oracle.
///
/// The empty structure participates exactly when the sentence mentions no
/// constants.
pub fn naive_universal_check_with_limits(
    f: &Formula,
    limits: &Limits,
) -> Result<bool, DecideError> {
    let free = f.free_vars();
    if !free.is_empty() {
        return Err(DecideError::NotASentence(free.into_iter().collect()));
    }
    let (vars, matrix) = f.universal_prefix();
    if !matrix.is_quantifier_free() {
        return Err(DecideError::NotUniversal);
    }
    let sig = Signature::inferred(f)?;
    let mut seed = matrix.atom_terms();
    seed.extend(vars.iter().map(|v| Term::var(v)));
    let bound = crate::syntax::subterm_closure(seed).len();
    for s in enumerate_structures(&sig, bound, limits)? {
        if !s.eval_sentence(f)? {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cli::harness;
    use crate::syntax::parser::{parse_formula, parse_signature};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn decided(sig_text: &str, f_text: &str) -> DecisionResult {
        let sig = parse_signature(sig_text).unwrap();
        let f = parse_formula(f_text, &sig).unwrap();
        decide(&f, &sig).unwrap()
    }

    #[test]
    fn pairing_projections_are_jointly_surjective() {
        let r = decided(
            "(fun L 1) (fun R 1)",
            "(forall x (forall y (exists z (and (= (L z) x) (= (R z) y)))))",
        );
        assert_eq!(r.verdict, Verdict::Valid);
        assert_eq!(r.qf_equivalent, Formula::True);
        assert!(r.falsifying.is_none());
    }

    #[test]
    fn fresh_preimages_always_exist() {
        let r = decided(
            "(fun F 1)",
            "(forall x (forall y (exists z (and (not (= z x)) (= (F z) y)))))",
        );
        assert_eq!(r.verdict, Verdict::Valid);
    }

    #[test]
    fn two_constants_are_contingently_equal() {
        let r = decided("(const c) (const d)", "(= c d)");
        assert_eq!(r.verdict, Verdict::Contingent);
        // Both sides come with a witnessing assignment.
        assert!(r.satisfying.is_some());
        assert!(r.falsifying.is_some());
    }

    #[test]
    fn self_distinctness_is_unsatisfiable() {
        let r = decided("(fun F 1)", "(exists x (not (= x x)))");
        assert_eq!(r.verdict, Verdict::Unsatisfiable);
        assert!(r.satisfying.is_none());
    }

    #[test]
    fn free_variables_are_rejected() {
        let sig = parse_signature("(rel P 1)").unwrap();
        let f = parse_formula("(P x)", &sig).unwrap();
        assert_eq!(
            decide(&f, &sig),
            Err(DecideError::NotASentence(vec!["x".to_string()]))
        );
    }

    #[test]
    fn negation_swaps_valid_and_unsatisfiable() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..25 {
            let sig = harness::random_signature(&mut rng);
            let f = harness::random_sentence(&sig, &["x", "y"], 4, &mut rng);
            let direct = decide(&f, &sig).unwrap();
            let negated = decide(&Formula::not(f), &sig).unwrap();
            let expected = match direct.verdict {
                Verdict::Valid => Verdict::Unsatisfiable,
                Verdict::Unsatisfiable => Verdict::Valid,
                Verdict::Contingent => Verdict::Contingent,
            };
            assert_eq!(negated.verdict, expected);
        }
    }

    #[test]
    fn one_constant_languages_are_complete() {
        // Over a single constant every sentence is decided one way or the
        // other; contingency requires either two constants or nothing to
        // name at all.
        let sig = parse_signature("(const c)").unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..30 {
            let f = harness::random_sentence(&sig, &["x", "y"], 4, &mut rng);
            let r = decide(&f, &sig).unwrap();
            assert_ne!(r.verdict, Verdict::Contingent, "sentence: {f:?}");
        }
    }

    #[test]
    fn diagram_forces_a_fixed_point() {
        let sig = parse_signature("(fun F 1)").unwrap();
        let mut m = FiniteStructure::new(sig.clone(), 2).unwrap();
        m.set_fun("F", &[0], 1).unwrap();
        m.set_fun("F", &[1], 1).unwrap();
        let f = parse_formula("(exists x (= (F x) x))", &sig).unwrap();
        let r = decide_with_diagram(&m, &f).unwrap();
        assert_eq!(r.verdict, Verdict::Valid);
    }

    #[test]
    fn diagram_separates_its_elements() {
        let sig = parse_signature("(fun F 1)").unwrap();
        let mut m = FiniteStructure::new(sig, 2).unwrap();
        m.set_fun("F", &[0], 1).unwrap();
        m.set_fun("F", &[1], 1).unwrap();
        let (dsig, names, _) = m.diagram();
        let f = parse_formula(&format!("(= {} {})", names[0], names[1]), &dsig).unwrap();
        let r = decide_with_diagram(&m, &f).unwrap();
        assert_eq!(r.verdict, Verdict::Unsatisfiable);
    }

    #[test]
    fn empty_diagram_adds_nothing() {
        let sig = parse_signature("(rel P 1)").unwrap();
        let m = FiniteStructure::new(sig.clone(), 0).unwrap();
        let f = parse_formula("(exists x (P x))", &sig).unwrap();
        let r = decide_with_diagram(&m, &f).unwrap();
        assert_eq!(r.verdict, Verdict::Valid);
    }

    #[test]
    fn diagram_decisions_are_two_valued_on_random_sentences() {
        let mut rng = ChaCha8Rng::seed_from_u64(29);
        for _ in 0..10 {
            let sig = harness::random_signature(&mut rng);
            let size = rng.gen_range(1..=2usize);
            let m = harness::random_structure(&sig, size, &mut rng);
            let f = harness::random_sentence(&sig, &["x"], 3, &mut rng);
            let r = decide_with_diagram(&m, &f).unwrap();
            assert_ne!(r.verdict, Verdict::Contingent);
        }
    }

    #[test]
    fn involution_claim_has_a_small_countermodel() {
        let sig = parse_signature("(fun F 1)").unwrap();
        let f = parse_formula("(forall x (= (F (F x)) x))", &sig).unwrap();
        assert_eq!(naive_universal_check(&f).unwrap(), false);
    }

    #[test]
    fn reflexivity_survives_enumeration() {
        let sig = parse_signature("").unwrap();
        let f = parse_formula("(forall x (= x x))", &sig).unwrap();
        assert_eq!(naive_universal_check(&f).unwrap(), true);
    }

    #[test]
    fn collapsing_everything_fails_at_size_two() {
        let sig = parse_signature("").unwrap();
        let f = parse_formula("(forall x (forall y (= x y)))", &sig).unwrap();
        assert_eq!(naive_universal_check(&f).unwrap(), false);
    }

    #[test]
    fn universal_falsity_is_caught_despite_an_empty_matrix() {
        // The matrix contributes no subterms; the prefix variable alone
        // keeps the size-one structure inside the enumeration bound.
        let sig = parse_signature("").unwrap();
        let f = parse_formula("(forall x false)", &sig).unwrap();
        assert_eq!(naive_universal_check(&f).unwrap(), false);
    }

    #[test]
    fn decide_and_enumeration_agree_on_universal_sentences() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        let mut checked = 0;
        while checked < 15 {
            let sig = harness::random_signature(&mut rng);
            let matrix = harness::random_qf_formula(&sig, &["x", "y"], 3, &mut rng);
            let f = Formula::forall_all(&["x".to_string(), "y".to_string()], matrix);
            let naive = match naive_universal_check(&f) {
                Ok(b) => b,
                // An enumeration blow-up is a legitimate refusal, not a
                // disagreement; draw another sentence.
                Err(DecideError::Structure(_)) => continue,
                Err(e) => panic!("unexpected failure: {e}"),
            };
            let r = decide(&f, &sig).unwrap();
            assert_eq!(r.verdict == Verdict::Valid, naive, "sentence: {f:?}");
            checked += 1;
        }
    }

    #[test]
    fn valid_universal_sentences_hold_in_random_structures() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut spot_checked = 0;
        for _ in 0..60 {
            let sig = harness::random_signature(&mut rng);
            let matrix = harness::random_qf_formula(&sig, &["x"], 3, &mut rng);
            let f = Formula::forall_all(&["x".to_string()], matrix);
            let r = decide(&f, &sig).unwrap();
            if r.verdict != Verdict::Valid {
                continue;
            }
            for size in 1..=3 {
                let m = harness::random_structure(&sig, size, &mut rng);
                assert!(m.eval_sentence(&f).unwrap(), "sentence: {f:?}");
                spot_checked += 1;
            }
        }
        assert!(spot_checked > 0);
    }
}
