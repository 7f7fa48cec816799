//! S-expression formula syntax.
//!
//! ```text
//! formula := true | false
//!          | (= v v)
//!          | (dist<= K v v) | (dist> K v v)
//!          | (not formula)
//!          | (and formula*) | (or formula*)
//!          | (implies formula formula)
//!          | (exists VARS formula) | (forall VARS formula)
//!          | (R v*)                      ; relation atom, R not a keyword
//! VARS    := v | (v v*)
//! ```
//!
//! Tokens are parentheses and maximal runs of other non-whitespace
//! characters; `;` starts a comment running to the end of the line.

use super::formula::{Formula, Var};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
enum Token<'a> {
    Open,
    Close,
    Word(&'a str),
}

fn tokenize(text: &str) -> Vec<(usize, Token<'_>)> {
    let mut out = Vec::new();
    let bytes = text.as_bytes();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        match c {
            b'(' => {
                out.push((i, Token::Open));
                i += 1;
            }
            b')' => {
                out.push((i, Token::Close));
                i += 1;
            }
            b';' => {
                while i < bytes.len() && bytes[i] != b'\n' {
                    i += 1;
                }
            }
            c if c.is_ascii_whitespace() => i += 1,
            _ => {
                let start = i;
                while i < bytes.len() && !matches!(bytes[i], b'(' | b')' | b';') && !bytes[i].is_ascii_whitespace() {
                    i += 1;
                }
                out.push((start, Token::Word(&text[start..i])));
            }
        }
    }
    out
}

const KEYWORDS: &[&str] = &[
    "true", "false", "=", "dist<=", "dist>", "not", "and", "or", "implies", "exists", "forall",
];

struct Parser<'a> {
    tokens: Vec<(usize, Token<'a>)>,
    pos: usize,
    len: usize,
}

impl<'a> Parser<'a> {
    fn err<T>(&self, message: impl Into<String>) -> Result<T> {
        let offset = self.tokens.get(self.pos).map_or(self.len, |t| t.0);
        Err(Error::Parse {
            offset,
            message: message.into(),
        })
    }

    fn next(&mut self) -> Option<Token<'a>> {
        let t = self.tokens.get(self.pos).map(|t| t.1.clone());
        self.pos += 1;
        t
    }

    fn peek(&self) -> Option<&Token<'a>> {
        self.tokens.get(self.pos).map(|t| &t.1)
    }

    fn expect_close(&mut self) -> Result<()> {
        match self.next() {
            Some(Token::Close) => Ok(()),
            _ => {
                self.pos -= 1;
                self.err("expected `)`")
            }
        }
    }

    fn var(&mut self) -> Result<Var> {
        match self.next() {
            Some(Token::Word(w)) if !KEYWORDS.contains(&w) && w.parse::<usize>().is_err() => Ok(Var::from(w)),
            _ => {
                self.pos -= 1;
                self.err("expected a variable")
            }
        }
    }

    fn number(&mut self) -> Result<usize> {
        match self.next() {
            Some(Token::Word(w)) => match w.parse() {
                Ok(n) => Ok(n),
                Err(_) => {
                    self.pos -= 1;
                    self.err("expected a distance bound")
                }
            },
            _ => {
                self.pos -= 1;
                self.err("expected a distance bound")
            }
        }
    }

    fn vars(&mut self) -> Result<Vec<Var>> {
        if self.peek() == Some(&Token::Open) {
            self.pos += 1;
            let mut vs = Vec::new();
            while self.peek() != Some(&Token::Close) {
                vs.push(self.var()?);
            }
            self.pos += 1;
            if vs.is_empty() {
                return self.err("empty variable list");
            }
            Ok(vs)
        } else {
            Ok(vec![self.var()?])
        }
    }

    fn formulas_until_close(&mut self) -> Result<Vec<Formula>> {
        let mut out = Vec::new();
        while !matches!(self.peek(), Some(Token::Close) | None) {
            out.push(self.formula()?);
        }
        self.expect_close()?;
        Ok(out)
    }

    fn formula(&mut self) -> Result<Formula> {
        match self.next() {
            Some(Token::Word("true")) => Ok(Formula::True),
            Some(Token::Word("false")) => Ok(Formula::False),
            Some(Token::Open) => {
                let head = match self.next() {
                    Some(Token::Word(w)) => w,
                    _ => {
                        self.pos -= 1;
                        return self.err("expected an operator or relation name");
                    }
                };
                let f = match head {
                    "=" => {
                        let (a, b) = (self.var()?, self.var()?);
                        Formula::Eq(a, b)
                    }
                    "dist<=" | "dist>" => {
                        let bound = self.number()?;
                        let (left, right) = (self.var()?, self.var()?);
                        if head == "dist<=" {
                            Formula::DistLe { bound, left, right }
                        } else {
                            Formula::DistGt { bound, left, right }
                        }
                    }
                    "not" => Formula::not(self.formula()?),
                    "and" => return Ok(Formula::And(self.formulas_until_close()?)),
                    "or" => return Ok(Formula::Or(self.formulas_until_close()?)),
                    "implies" => {
                        let a = self.formula()?;
                        Formula::implies(a, self.formula()?)
                    }
                    "exists" | "forall" => {
                        let vs = self.vars()?;
                        let body = self.formula()?;
                        vs.into_iter().rev().fold(body, |acc, v| {
                            if head == "exists" {
                                Formula::exists(v, acc)
                            } else {
                                Formula::forall(v, acc)
                            }
                        })
                    }
                    "true" | "false" => return self.err("`true`/`false` take no arguments"),
                    relation => {
                        let mut args = Vec::new();
                        while self.peek() != Some(&Token::Close) {
                            if self.peek().is_none() {
                                return self.err("unterminated atom");
                            }
                            args.push(self.var()?);
                        }
                        Formula::Atom {
                            relation: relation.to_string(),
                            args,
                        }
                    }
                };
                self.expect_close()?;
                Ok(f)
            }
            Some(Token::Close) => {
                self.pos -= 1;
                self.err("unexpected `)`")
            }
            Some(Token::Word(_)) => {
                self.pos -= 1;
                self.err("bare word; atoms must be parenthesised")
            }
            None => self.err("unexpected end of input"),
        }
    }
}

/// Parses a formula; free variables are allowed.
pub fn parse_formula(text: &str) -> Result<Formula> {
    let mut p = Parser {
        tokens: tokenize(text),
        pos: 0,
        len: text.len(),
    };
    let f = p.formula()?;
    if p.pos < p.tokens.len() {
        return p.err("trailing input");
    }
    Ok(f)
}

/// Parses a sentence, rejecting any free variable.
pub fn parse_sentence(text: &str) -> Result<Formula> {
    let f = parse_formula(text)?;
    match f.free_vars().into_iter().next() {
        Some(v) => Err(Error::UnboundVariable(v.name().to_string())),
        None => Ok(f),
    }
}
