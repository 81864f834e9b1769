//! Minimal s-expression reader shared by the file formats.
//!
//! Every textual format in this crate (formulas, signatures, structures,
//! translations, tables) is a sequence of parenthesized prefix forms over
//! identifiers and numbers, so one tokenizer serves them all.  Lines starting
//! with `;` are comments.

use std::fmt;
use thiserror::Error;

/// 1-based line/column position of a token in the input text.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Sexpr {
    /// A bare token: identifier, keyword, number, or operator like `=`.
    Atom(String, Pos),
    List(Vec<Sexpr>, Pos),
}

impl Sexpr {
    pub fn pos(&self) -> Pos {
        match self {
            Sexpr::Atom(_, p) | Sexpr::List(_, p) => *p,
        }
    }

    pub fn as_atom(&self) -> Option<&str> {
        match self {
            Sexpr::Atom(s, _) => Some(s),
            Sexpr::List(..) => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SexprError {
    #[error("{0}: unbalanced ')'")]
    Unbalanced(Pos),
    #[error("{0}: unclosed '('")]
    Unclosed(Pos),
    #[error("{0}: unexpected character {1:?}")]
    BadChar(Pos, char),
}

fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

fn is_ident_continue(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '\''
}

/// Reads all top-level forms in `text`.
pub fn read_all(text: &str) -> Result<Vec<Sexpr>, SexprError> {
    let mut chars = text.chars().peekable();
    let mut line = 1usize;
    let mut col = 1usize;
    // Stack of open lists; the bottom entry collects the top-level forms.
    let mut stack: Vec<(Vec<Sexpr>, Pos)> = vec![(Vec::new(), Pos { line: 1, col: 1 })];

    while let Some(&c) = chars.peek() {
        let pos = Pos { line, col };
        let bump = |c: char, line: &mut usize, col: &mut usize| {
            if c == '\n' {
                *line += 1;
                *col = 1;
            } else {
                *col += 1;
            }
        };
        match c {
            ';' => {
                for c in chars.by_ref() {
                    bump(c, &mut line, &mut col);
                    if c == '\n' {
                        break;
                    }
                }
            }
            c if c.is_whitespace() => {
                chars.next();
                bump(c, &mut line, &mut col);
            }
            '(' => {
                chars.next();
                bump('(', &mut line, &mut col);
                stack.push((Vec::new(), pos));
            }
            ')' => {
                chars.next();
                bump(')', &mut line, &mut col);
                let (items, open_pos) = stack.pop().expect("stack never empty");
                if stack.is_empty() {
                    return Err(SexprError::Unbalanced(pos));
                }
                stack.last_mut().unwrap().0.push(Sexpr::List(items, open_pos));
            }
            c if is_ident_start(c) || c.is_ascii_digit() || c == '=' => {
                let mut tok = String::new();
                while let Some(&c) = chars.peek() {
                    let part_of_token = if tok.starts_with('=') {
                        false
                    } else if tok.is_empty() {
                        true
                    } else {
                        is_ident_continue(c)
                    };
                    if part_of_token && (is_ident_continue(c) || c == '=') {
                        tok.push(c);
                        chars.next();
                        bump(c, &mut line, &mut col);
                    } else {
                        break;
                    }
                }
                stack.last_mut().unwrap().0.push(Sexpr::Atom(tok, pos));
            }
            other => return Err(SexprError::BadChar(pos, other)),
        }
    }

    if stack.len() > 1 {
        let open_pos = stack.last().unwrap().1;
        return Err(SexprError::Unclosed(open_pos));
    }
    Ok(stack.pop().unwrap().0)
}

/// Reads exactly one form, rejecting trailing content.
pub fn read_one(text: &str) -> Result<Sexpr, SexprError> {
    let mut forms = read_all(text)?;
    match forms.len() {
        1 => Ok(forms.pop().unwrap()),
        0 => Err(SexprError::Unclosed(Pos { line: 1, col: 1 })),
        _ => Err(SexprError::Unbalanced(forms[1].pos())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reads_nested_lists() {
        let e = read_one("(and (= x y) true)").unwrap();
        match e {
            Sexpr::List(items, _) => {
                assert_eq!(items.len(), 3);
                assert_eq!(items[0].as_atom(), Some("and"));
            }
            _ => panic!("expected list"),
        }
    }

    #[test]
    fn tracks_positions() {
        let e = read_all("(a\n  b)").unwrap();
        match &e[0] {
            Sexpr::List(items, _) => {
                assert_eq!(items[1].pos(), Pos { line: 2, col: 3 });
            }
            _ => panic!(),
        }
    }

    #[test]
    fn comments_are_skipped() {
        let forms = read_all("; header\n(fun F 1) ; trailing\n(rel P 2)").unwrap();
        assert_eq!(forms.len(), 2);
    }

    #[test]
    fn equals_is_its_own_token() {
        let e = read_one("(=x y)").unwrap();
        match e {
            Sexpr::List(items, _) => {
                assert_eq!(items[0].as_atom(), Some("="));
                assert_eq!(items[1].as_atom(), Some("x"));
            }
            _ => panic!(),
        }
    }

    #[test]
    fn unbalanced_inputs_error() {
        assert!(read_all("(a b").is_err());
        assert!(read_all("a b)").is_err());
        assert!(read_all("(a # b)").is_err());
    }

    #[test]
    fn primes_allowed_in_identifiers() {
        let e = read_one("x'").unwrap();
        assert_eq!(e.as_atom(), Some("x'"));
    }
}
