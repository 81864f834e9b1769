//! Command-line front end.
//!
//! One binary, one subcommand per operation.  Every run ends with a
//! machine-readable last line: a verdict token, a `PASS k/N` / `FAIL k/N`
//! count, a formula, or `OK`.  Exit codes: decide-style commands map their
//! verdict to 0 (valid), 1 (unsatisfiable), 2 (contingent); bad input exits
//! 64, a blown resource cap 65, and an internal invariant violation 70.

pub mod harness;

use crate::decide::{
    decide_with_diagram_limits, decide_with_limits, DecideError, Verdict,
};
use crate::interp::{
    binary_reduction, obligations, parse_translation, print_translation, Discharge,
    InterpError, TranslationFileError,
};
use crate::limits::Limits;
use crate::qe::{eliminate, QeError};
use crate::structures::{parse_structure, StructureError, StructureFileError};
use crate::syntax::parser::{
    parse_formula, parse_formulas, parse_signature, print_formula, print_signature,
    ParseError,
};
use crate::syntax::{Formula, Signature};
use crate::trep::{
    parse_tables, r_axioms, r_signature, table_structure, trep_axioms, NumeralStyle,
    TablesFileError, TrepError,
};
use clap::{Args, Parser, Subcommand, ValueEnum};
use std::fmt;
use std::io::Read;
use std::process::ExitCode;

/// Toolkit for the model completion of the empty theory: quantifier
/// elimination, decision procedures, interpretations, and axiom generators.
#[derive(Debug, Parser)]
#[command(name = "eckit", version, max_term_width = 100)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print a quantifier-free equivalent of a formula.
    Qe {
        #[command(flatten)]
        input: FormulaInput,
        #[command(flatten)]
        caps: CapArgs,
        /// Echo the parsed input before the result.
        #[arg(long)]
        verbose: bool,
    },
    /// Decide a sentence; prints VALID, UNSAT, or CONTINGENT.
    Decide {
        #[command(flatten)]
        input: FormulaInput,
        #[command(flatten)]
        caps: CapArgs,
        /// Also print the quantifier-free image and literal evidence.
        #[arg(long)]
        verbose: bool,
    },
    /// Decide a sentence relative to the diagram of a finite structure;
    /// prints VALID or UNSAT.
    DecideDiag {
        #[command(flatten)]
        input: FormulaInput,
        /// Structure file naming the diagram.
        #[arg(long)]
        structure: String,
        #[command(flatten)]
        caps: CapArgs,
        /// Also print the quantifier-free image.
        #[arg(long)]
        verbose: bool,
    },
    /// Translate a formula through a translation file.
    Translate {
        #[command(flatten)]
        input: FormulaInput,
        #[command(flatten)]
        translation: TranslationInput,
    },
    /// Generate and discharge the proof obligations of an interpretation.
    CheckInterp {
        /// Source signature file.
        #[arg(long)]
        sig: String,
        #[command(flatten)]
        translation: TranslationInput,
        /// Optional file of source axiom sentences to interpret.
        #[arg(long)]
        formula: Option<String>,
        #[command(flatten)]
        caps: CapArgs,
        /// Also print each obligation sentence.
        #[arg(long)]
        verbose: bool,
    },
    /// Reduce a signature to one binary function plus constants; prints the
    /// target signature, the translation, and the tag distinctness
    /// sentences.
    BinaryReduce {
        /// Source signature file.
        #[arg(long)]
        sig: String,
        /// Turn relations into functions first (needs a constant).
        #[arg(long)]
        preprocess_relations: bool,
    },
    /// Generate the axioms pinning down finite function and predicate
    /// tables.
    GenTrep {
        /// Tables file.
        #[arg(long)]
        tables: String,
        /// Numeral spelling.
        #[arg(long, value_enum, default_value_t = StyleArg::Successor)]
        style: StyleArg,
        /// Also print the witnessing finite structure.
        #[arg(long)]
        verbose: bool,
    },
    /// Generate the finite fragment of the successor/plus/times/order
    /// theory up to a bound.
    GenR {
        /// Largest numeral in the sum/product/order schemes.
        #[arg(long)]
        bound: usize,
    },
    /// Run a randomized cross-check suite; prints a pass count.
    Oracle {
        /// Number of cases to run.
        #[arg(long, default_value_t = 100)]
        cases: usize,
        /// Random seed.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Which suite to run.
        #[arg(long, value_enum, default_value_t = SuiteArg::Resultant)]
        suite: SuiteArg,
    },
}

/// The two file inputs almost every command needs.
#[derive(Debug, Args)]
struct FormulaInput {
    /// Signature file.
    #[arg(long)]
    sig: String,
    /// Formula file, or `-` for standard input.
    #[arg(long)]
    formula: String,
}

#[derive(Debug, Args)]
struct TranslationInput {
    /// Translation file.
    #[arg(long)]
    translation: String,
    /// Target signature file (member formulas are read over it).
    #[arg(long)]
    target_sig: String,
}

#[derive(Debug, Args)]
struct CapArgs {
    /// Largest subterm-closed term set the eliminator will decompose.
    #[arg(long)]
    max_theta: Option<usize>,
    /// Ceiling on partition candidates per elimination step.
    #[arg(long)]
    max_partitions: Option<u64>,
    /// Largest domain size for structure enumeration.
    #[arg(long)]
    max_model: Option<usize>,
}

impl CapArgs {
    fn limits(&self) -> Limits {
        let defaults = Limits::default();
        Limits {
            max_theta: self.max_theta.unwrap_or(defaults.max_theta),
            max_partitions: self.max_partitions.unwrap_or(defaults.max_partitions),
            max_model: self.max_model.unwrap_or(defaults.max_model),
            ..defaults
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum StyleArg {
    Constants,
    Successor,
    Tprfu,
}

impl From<StyleArg> for NumeralStyle {
    fn from(s: StyleArg) -> NumeralStyle {
        match s {
            StyleArg::Constants => NumeralStyle::Constants,
            StyleArg::Successor => NumeralStyle::Successor,
            StyleArg::Tprfu => NumeralStyle::Tprfu,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SuiteArg {
    /// Resultant formulas against constructive and blind extension search.
    Resultant,
    /// Ground validity of universal sentences against exhaustive
    /// finite-model enumeration.
    Universal,
}

/// A failure with its exit code already decided.
#[derive(Debug)]
struct Failure {
    code: u8,
    message: String,
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.message)
    }
}

const EX_INPUT: u8 = 64;
const EX_CAP: u8 = 65;
const EX_INTERNAL: u8 = 70;

fn input_error(e: impl fmt::Display) -> Failure {
    Failure { code: EX_INPUT, message: e.to_string() }
}

fn qe_failure(e: QeError) -> Failure {
    let code = match e {
        QeError::TooManyTerms { .. } | QeError::TooManyPartitions { .. } => EX_CAP,
        // The eliminator builds its own decompositions, so any other
        // complaint means the pipeline handed itself bad data.
        _ => EX_INTERNAL,
    };
    Failure { code, message: e.to_string() }
}

fn structure_failure(e: StructureError) -> Failure {
    let code = match e {
        StructureError::TooManyStructures { .. } | StructureError::TableTooBig => EX_CAP,
        _ => EX_INPUT,
    };
    Failure { code, message: e.to_string() }
}

fn decide_failure(e: DecideError) -> Failure {
    match e {
        DecideError::Qe(q) => qe_failure(q),
        DecideError::Structure(s) => structure_failure(s),
        DecideError::DiagramInvariant => {
            Failure { code: EX_INTERNAL, message: e.to_string() }
        }
        _ => input_error(e),
    }
}

fn interp_failure(e: InterpError) -> Failure {
    match e {
        InterpError::InducedTooLarge { .. } => {
            Failure { code: EX_CAP, message: e.to_string() }
        }
        InterpError::Structure(s) => structure_failure(s),
        _ => input_error(e),
    }
}

fn read_input(path: &str) -> Result<String, Failure> {
    if path == "-" {
        let mut text = String::new();
        std::io::stdin()
            .read_to_string(&mut text)
            .map_err(|e| input_error(format!("standard input: {e}")))?;
        return Ok(text);
    }
    std::fs::read_to_string(path).map_err(|e| input_error(format!("{path}: {e}")))
}

fn load_signature(path: &str) -> Result<Signature, Failure> {
    parse_signature(&read_input(path)?).map_err(|e: ParseError| input_error(format!("{path}: {e}")))
}

fn load_formula(input: &FormulaInput, sig: &Signature) -> Result<Formula, Failure> {
    parse_formula(&read_input(&input.formula)?, sig)
        .map_err(|e| input_error(format!("{}: {e}", input.formula)))
}

/// Parses the command line and runs it.
pub fn run() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(failure) => {
            eprintln!("error: {failure}");
            ExitCode::from(failure.code)
        }
    }
}

fn execute(command: &Command) -> Result<u8, Failure> {
    match command {
        Command::Qe { input, caps, verbose } => {
            let sig = load_signature(&input.sig)?;
            let f = load_formula(input, &sig)?;
            if *verbose {
                println!("input {}", print_formula(&f));
            }
            let g = eliminate(&f, &caps.limits()).map_err(qe_failure)?;
            println!("{}", print_formula(&g));
            Ok(0)
        }
        Command::Decide { input, caps, verbose } => {
            let sig = load_signature(&input.sig)?;
            let f = load_formula(input, &sig)?;
            let r = decide_with_limits(&f, &sig, &caps.limits()).map_err(decide_failure)?;
            if *verbose {
                print_decision_detail(&r);
            }
            println!("{}", r.verdict);
            Ok(verdict_code(r.verdict))
        }
        Command::DecideDiag { input, structure, caps, verbose } => {
            let sig = load_signature(&input.sig)?;
            let f = load_formula(input, &sig)?;
            let m = parse_structure(&read_input(structure)?, &sig)
                .map_err(|e: StructureFileError| input_error(format!("{structure}: {e}")))?;
            let r = decide_with_diagram_limits(&m, &f, &caps.limits()).map_err(decide_failure)?;
            if *verbose {
                print_decision_detail(&r);
            }
            println!("{}", r.verdict);
            Ok(verdict_code(r.verdict))
        }
        Command::Translate { input, translation } => {
            let source = load_signature(&input.sig)?;
            let target = load_signature(&translation.target_sig)?;
            let i = parse_translation(&read_input(&translation.translation)?, &source, &target)
                .map_err(|e: TranslationFileError| {
                    input_error(format!("{}: {e}", translation.translation))
                })?;
            let f = load_formula(input, &source)?;
            let out = i.translate(&f).map_err(interp_failure)?;
            println!("{}", print_formula(&out));
            Ok(0)
        }
        Command::CheckInterp { sig, translation, formula, caps, verbose } => {
            let source = load_signature(sig)?;
            let target = load_signature(&translation.target_sig)?;
            let i = parse_translation(&read_input(&translation.translation)?, &source, &target)
                .map_err(|e: TranslationFileError| {
                    input_error(format!("{}: {e}", translation.translation))
                })?;
            let axioms = match formula {
                Some(path) => parse_formulas(&read_input(path)?, &source)
                    .map_err(|e| input_error(format!("{path}: {e}")))?,
                None => Vec::new(),
            };
            let mut report = obligations(&i, &axioms).map_err(interp_failure)?;
            report.discharge_all(&i, &[], &caps.limits());
            let total = report.obligations.len();
            let mut valid = 0;
            for ob in &report.obligations {
                let status = match &ob.discharge {
                    Discharge::Decided(r) => {
                        if r.verdict == Verdict::Valid {
                            valid += 1;
                        }
                        r.verdict.to_string()
                    }
                    Discharge::Failed(msg) => format!("UNDISCHARGED ({msg})"),
                    Discharge::Undischarged => "UNDISCHARGED".to_string(),
                };
                println!("{}: {status}", ob.label);
                if *verbose {
                    println!("  {}", print_formula(&ob.sentence));
                }
            }
            print_count(valid, total);
            Ok(u8::from(valid != total))
        }
        Command::BinaryReduce { sig, preprocess_relations } => {
            let source = load_signature(sig)?;
            let (i, target, distinctness) =
                binary_reduction(&source, *preprocess_relations).map_err(interp_failure)?;
            print!("{}", print_signature(&target));
            println!();
            println!("{}", print_translation(&i));
            println!();
            for d in &distinctness {
                println!("{}", print_formula(d));
            }
            println!("OK");
            Ok(0)
        }
        Command::GenTrep { tables, style, verbose } => {
            let t = parse_tables(&read_input(tables)?)
                .map_err(|e: TablesFileError| input_error(format!("{tables}: {e}")))?;
            let style = NumeralStyle::from(*style);
            let sig = t.signature(style).map_err(trep_failure)?;
            print!("{}", print_signature(&sig));
            println!();
            for axiom in trep_axioms(&t, style).map_err(trep_failure)? {
                println!("{}", print_formula(&axiom));
            }
            if *verbose {
                let witness = table_structure(&t, style).map_err(trep_failure)?;
                println!();
                println!("{}", crate::structures::print_structure(&witness));
            }
            println!("OK");
            Ok(0)
        }
        Command::GenR { bound } => {
            print!("{}", print_signature(&r_signature()));
            println!();
            for axiom in r_axioms(*bound) {
                println!("{}", print_formula(&axiom));
            }
            println!("OK");
            Ok(0)
        }
        Command::Oracle { cases, seed, suite } => {
            let passed = match suite {
                SuiteArg::Resultant => harness::run_res_oracle(*cases, *seed),
                SuiteArg::Universal => harness::run_universal_oracle(*cases, *seed),
            };
            print_count(passed, *cases);
            Ok(u8::from(passed != *cases))
        }
    }
}

fn trep_failure(e: TrepError) -> Failure {
    match e {
        TrepError::Structure(s) => structure_failure(s),
        _ => input_error(e),
    }
}

fn verdict_code(v: Verdict) -> u8 {
    match v {
        Verdict::Valid => 0,
        Verdict::Unsatisfiable => 1,
        Verdict::Contingent => 2,
    }
}

fn print_count(passed: usize, total: usize) {
    if passed == total {
        println!("PASS {passed}/{total}");
    } else {
        println!("FAIL {passed}/{total}");
    }
}

fn print_decision_detail(r: &crate::decide::DecisionResult) {
    println!("equivalent {}", print_formula(&r.qf_equivalent));
    if let Some(w) = &r.satisfying {
        println!("satisfying-literals {}", literals_line(w));
    }
    if let Some(w) = &r.falsifying {
        println!("falsifying-literals {}", literals_line(w));
    }
}

fn literals_line(w: &[(crate::euf::Atom, bool)]) -> String {
    if w.is_empty() {
        return "(empty)".to_string();
    }
    w.iter()
        .map(|(atom, value)| {
            let sign = if *value { "+" } else { "-" };
            format!("{sign}{}", print_formula(&atom.to_formula()))
        })
        .collect::<Vec<_>>()
        .join(" ")
}
