//! Lexer and parser for the pattern DSL:
//!
//! ```text
//! pattern := "pattern" name "{" "components" INT ";" term+ "}"
//! term    := "term" SIGNEDINT "{" ("comp" INDEX ":" token+ ";")+ "}"
//! token   := arrowName ("H"|"T") (":" ("+"|"-"))?
//! ```
//!
//! `INDEX` is a 1-based component number, or one of `i`, `j`, `k` in
//! templated files, standing for the images of 1, 2, 3 under a permutation.
//! `#` starts a comment running to the end of the line.

use std::collections::BTreeMap;

use super::{Pattern, PatternArrow, Perm, Role, Term};
use crate::diagram::Sign;
use crate::error::PatternError;

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Int(i64),
    Sym(char),
    Sign(Sign),
    Eof,
}

#[derive(Clone, Debug)]
struct Spanned {
    tok: Tok,
    line: usize,
    col: usize,
}

fn lex(text: &str) -> Result<Vec<Spanned>, PatternError> {
    let mut out = Vec::new();
    let mut chars = text.chars().peekable();
    let (mut line, mut col) = (1, 1);
    let err = |line, col, message: String| PatternError::Syntax { line, col, message };
    while let Some(&c) = chars.peek() {
        let (l0, c0) = (line, col);
        let mut bump = |chars: &mut std::iter::Peekable<std::str::Chars>| {
            let ch = chars.next();
            if ch == Some('\n') {
                line += 1;
                col = 1;
            } else {
                col += 1;
            }
            ch
        };
        if c.is_whitespace() {
            bump(&mut chars);
        } else if c == '#' {
            while let Some(&ch) = chars.peek() {
                if ch == '\n' {
                    break;
                }
                bump(&mut chars);
            }
        } else if "{};:".contains(c) {
            bump(&mut chars);
            out.push(Spanned { tok: Tok::Sym(c), line: l0, col: c0 });
        } else if c == '+' || c == '-' || c.is_ascii_digit() {
            let mut s = String::new();
            s.push(bump(&mut chars).unwrap());
            while let Some(&ch) = chars.peek() {
                if !ch.is_ascii_digit() {
                    break;
                }
                s.push(ch);
                bump(&mut chars);
            }
            let tok = match s.as_str() {
                "+" => Tok::Sign(Sign::Pos),
                "-" => Tok::Sign(Sign::Neg),
                num => Tok::Int(
                    num.parse()
                        .map_err(|_| err(l0, c0, format!("bad integer {num:?}")))?,
                ),
            };
            out.push(Spanned { tok, line: l0, col: c0 });
        } else if c.is_ascii_alphabetic() || c == '_' {
            let mut s = String::new();
            while let Some(&ch) = chars.peek() {
                if !(ch.is_ascii_alphanumeric() || ch == '_') {
                    break;
                }
                s.push(ch);
                bump(&mut chars);
            }
            out.push(Spanned { tok: Tok::Ident(s), line: l0, col: c0 });
        } else {
            return Err(err(l0, c0, format!("unexpected character {c:?}")));
        }
    }
    out.push(Spanned { tok: Tok::Eof, line, col });
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<Spanned>,
    at: usize,
    sigma: Option<&'a Perm>,
    name: String,
}

impl Parser<'_> {
    fn peek(&self) -> &Spanned {
        &self.toks[self.at]
    }

    fn next(&mut self) -> Spanned {
        let t = self.toks[self.at].clone();
        if t.tok != Tok::Eof {
            self.at += 1;
        }
        t
    }

    fn fail<T>(&self, at: &Spanned, message: impl Into<String>) -> Result<T, PatternError> {
        Err(PatternError::Syntax {
            line: at.line,
            col: at.col,
            message: message.into(),
        })
    }

    fn expect_sym(&mut self, c: char) -> Result<(), PatternError> {
        let t = self.next();
        if t.tok == Tok::Sym(c) {
            Ok(())
        } else {
            self.fail(&t, format!("expected {c:?}, found {:?}", t.tok))
        }
    }

    fn expect_word(&mut self, w: &str) -> Result<(), PatternError> {
        let t = self.next();
        match &t.tok {
            Tok::Ident(s) if s == w => Ok(()),
            other => self.fail(&t, format!("expected {w:?}, found {other:?}")),
        }
    }

    fn pattern(&mut self) -> Result<Pattern, PatternError> {
        self.expect_word("pattern")?;
        let t = self.next();
        let Tok::Ident(name) = t.tok.clone() else {
            return self.fail(&t, "expected a pattern name");
        };
        self.name = name.clone();
        self.expect_sym('{')?;
        self.expect_word("components")?;
        let t = self.next();
        let components = match t.tok {
            Tok::Int(n) if n > 0 => n as usize,
            _ => return self.fail(&t, "expected a positive component count"),
        };
        self.expect_sym(';')?;
        let mut terms = Vec::new();
        while matches!(&self.peek().tok, Tok::Ident(s) if s == "term") {
            terms.push(self.term(components)?);
        }
        if terms.is_empty() {
            let t = self.peek().clone();
            return self.fail(&t, "expected at least one term");
        }
        self.expect_sym('}')?;
        let t = self.next();
        if t.tok != Tok::Eof {
            return self.fail(&t, "trailing input after pattern");
        }
        Ok(Pattern {
            name,
            components,
            terms,
        })
    }

    fn component_index(&mut self, head: &Spanned, rest: &str, n: usize) -> Result<usize, PatternError> {
        let index = if rest.is_empty() {
            let t = self.next();
            match t.tok {
                Tok::Int(i) => i.to_string(),
                Tok::Ident(s) => s,
                _ => return self.fail(&t, "expected a component index"),
            }
        } else {
            rest.to_string()
        };
        let value = match index.as_str() {
            v @ ("i" | "j" | "k") => {
                let Some(sigma) = self.sigma else {
                    return Err(PatternError::MissingPermutation(self.name.clone()));
                };
                sigma.image(match v {
                    "i" => 1,
                    "j" => 2,
                    _ => 3,
                })
            }
            digits => match digits.parse::<usize>() {
                Ok(i) => i,
                Err(_) => return self.fail(head, format!("bad component index {digits:?}")),
            },
        };
        if value == 0 || value > n {
            return self.fail(head, format!("component index {value} out of range 1..={n}"));
        }
        Ok(value - 1)
    }

    fn term(&mut self, n: usize) -> Result<Term, PatternError> {
        let start = self.next();
        let t = self.next();
        let coeff = match t.tok {
            Tok::Int(c) => c,
            _ => return self.fail(&t, "expected a term coefficient"),
        };
        self.expect_sym('{')?;

        let mut words: Vec<Option<Vec<(String, Role)>>> = vec![None; n];
        let mut signs: BTreeMap<String, Sign> = BTreeMap::new();
        loop {
            let t = self.next();
            match &t.tok {
                Tok::Sym('}') => break,
                Tok::Ident(s) if s.starts_with("comp") => {
                    let rest = s["comp".len()..].to_string();
                    let comp = self.component_index(&t, &rest, n)?;
                    self.expect_sym(':')?;
                    if words[comp].is_some() {
                        return self.fail(&t, format!("component {} listed twice", comp + 1));
                    }
                    let mut word = Vec::new();
                    loop {
                        if self.peek().tok == Tok::Sym('}') {
                            break;
                        }
                        let tok = self.next();
                        match &tok.tok {
                            Tok::Sym(';') => break,
                            Tok::Ident(s) => {
                                let (name, role) = match s.split_at(s.len() - 1) {
                                    (name, "H") if !name.is_empty() => (name, Role::Head),
                                    (name, "T") if !name.is_empty() => (name, Role::Tail),
                                    _ => {
                                        return self.fail(
                                            &tok,
                                            format!("endpoint {s:?} lacks a head/tail role (H or T)"),
                                        )
                                    }
                                };
                                if self.peek().tok == Tok::Sym(':') {
                                    self.next();
                                    let st = self.next();
                                    let Tok::Sign(sign) = st.tok else {
                                        return self.fail(&st, "expected + or - after ':'");
                                    };
                                    if let Some(old) = signs.insert(name.to_string(), sign) {
                                        if old != sign {
                                            return self.fail(
                                                &st,
                                                format!("conflicting sign constraints on {name}"),
                                            );
                                        }
                                    }
                                }
                                word.push((name.to_string(), role));
                            }
                            other => {
                                return self.fail(&tok, format!("expected an endpoint, found {other:?}"))
                            }
                        }
                    }
                    if word.is_empty() {
                        return self.fail(&t, "empty component word");
                    }
                    words[comp] = Some(word);
                }
                other => return self.fail(&t, format!("expected comp clause or '}}', found {other:?}")),
            }
        }

        // arrows in order of first appearance
        let mut names: Vec<String> = Vec::new();
        let mut ends: BTreeMap<String, (Vec<usize>, Vec<usize>)> = BTreeMap::new();
        for (c, word) in words.iter().enumerate() {
            for (name, role) in word.iter().flatten() {
                if !names.contains(name) {
                    names.push(name.clone());
                }
                let e = ends.entry(name.clone()).or_default();
                match role {
                    Role::Head => e.0.push(c),
                    Role::Tail => e.1.push(c),
                }
            }
        }
        if names.is_empty() {
            return self.fail(&start, "term has no arrows");
        }
        let mut arrows = Vec::with_capacity(names.len());
        for name in &names {
            let (heads, tails) = &ends[name];
            if heads.len() + tails.len() != 2 {
                return self.fail(
                    &start,
                    format!("arrow {name} referenced {} times, expected 2", heads.len() + tails.len()),
                );
            }
            if heads.len() != 1 {
                return self.fail(&start, format!("arrow {name} needs exactly one head and one tail"));
            }
            arrows.push(PatternArrow {
                name: name.clone(),
                head: heads[0],
                tail: tails[0],
                sign: signs.get(name).copied(),
            });
        }
        if let Some(extra) = signs.keys().find(|k| !names.contains(k)) {
            return self.fail(&start, format!("sign constraint on unknown arrow {extra}"));
        }
        let index = |name: &str| names.iter().position(|n| n == name).expect("collected");
        let words = words
            .into_iter()
            .map(|w| {
                w.unwrap_or_default()
                    .into_iter()
                    .map(|(name, role)| (index(&name), role))
                    .collect()
            })
            .collect();
        Ok(Term { coeff, arrows, words })
    }
}

/// Parses a pattern; templated component indices require `sigma`.
pub fn parse_pattern_with(text: &str, sigma: Option<&Perm>) -> Result<Pattern, PatternError> {
    let toks = lex(text)?;
    Parser {
        toks,
        at: 0,
        sigma,
        name: String::new(),
    }
    .pattern()
}

pub fn parse_pattern(text: &str) -> Result<Pattern, PatternError> {
    parse_pattern_with(text, None)
}
