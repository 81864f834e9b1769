//! Toolkit for the first-order theory of existentially closed structures.
//!
//! Over any signature, the class of existentially closed structures is
//! axiomatizable and its theory admits quantifier elimination.  This crate
//! implements that elimination together with the machinery that surrounds it:
//!
//! * [`syntax`]: signatures, terms, formulas, parsing and printing.
//! * [`structures`]: finite structures, evaluation, exhaustive enumeration,
//!   diagrams, and extension witnesses for elementary existential conditions.
//! * [`qe`]: elementary existential formulas, admissible congruences over a
//!   subterm-closed set, the resultant computation, and the eliminator.
//! * [`euf`]: congruence closure and validity of open formulas over
//!   uninterpreted symbols.
//! * [`decide`]: the decision procedure for sentences, with or without the
//!   diagram of a finite structure as extra axioms, plus a brute-force
//!   finite-model check used as an independent oracle.
//! * [`interp`]: relative interpretations between theories, translation of
//!   formulas, proof obligations, composition, and the reduction of any
//!   signature to a single binary function.
//! * [`trep`]: axiom sets that pin down finite function and predicate tables
//!   over numerals, and the bounded fragment of Robinson-style arithmetic.
//! * [`cli`]: configuration, seeded corpus generators, and the randomized
//!   cross-check harness behind the command-line interface.

pub mod cli;
pub mod decide;
pub mod euf;
pub mod interp;
pub mod limits;
pub mod qe;
pub mod structures;
pub mod syntax;
pub mod trep;

pub use limits::Limits;
pub use syntax::{Formula, Signature, Term};
