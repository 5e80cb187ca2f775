//! The identity-system DSL.
//!
//! ```text
//! system := decl* stmt*
//! decl   := name "/" arity ";"
//! stmt   := term ("=" term)+ ";"
//! term   := var | name "(" var ("," var)* ")"
//! ```
//!
//! Newlines also terminate statements, `≈` is accepted for `=`, and `#`
//! starts a comment running to the end of the line. Chains `a = b = c`
//! expand to the adjacent pairs.

use crate::clone::VARIABLE_NAMES;
use crate::error::ParseError;

use super::{IdentitySystem, LinearTerm, SymbolSignature};

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Ident(String),
    Number(usize),
    LParen,
    RParen,
    Comma,
    Slash,
    Eq,
    End,
}

#[derive(Clone, Debug)]
struct Token {
    tok: Tok,
    line: usize,
    col: usize,
}

fn syntax(line: usize, col: usize, msg: impl Into<String>) -> ParseError {
    ParseError::Syntax {
        line,
        col,
        msg: msg.into(),
    }
}

fn tokenize(text: &str) -> Result<Vec<Token>, ParseError> {
    let mut out = Vec::new();
    for (ln, raw) in text.lines().enumerate() {
        let line = ln + 1;
        let content = raw.split('#').next().unwrap_or("");
        let chars: Vec<(usize, char)> = content.chars().enumerate().collect();
        let mut i = 0;
        while i < chars.len() {
            let (c0, c) = chars[i];
            let col = c0 + 1;
            let simple = match c {
                '(' => Some(Tok::LParen),
                ')' => Some(Tok::RParen),
                ',' => Some(Tok::Comma),
                '/' => Some(Tok::Slash),
                '=' | '≈' => Some(Tok::Eq),
                ';' => Some(Tok::End),
                _ => None,
            };
            if let Some(tok) = simple {
                out.push(Token { tok, line, col });
                i += 1;
            } else if c.is_whitespace() {
                i += 1;
            } else if c.is_ascii_digit() {
                let start = i;
                while i < chars.len() && chars[i].1.is_ascii_digit() {
                    i += 1;
                }
                let s: String = chars[start..i].iter().map(|&(_, c)| c).collect();
                let n = s
                    .parse()
                    .map_err(|_| syntax(line, col, format!("number {s} is too large")))?;
                out.push(Token {
                    tok: Tok::Number(n),
                    line,
                    col,
                });
            } else if c.is_alphabetic() || c == '_' {
                let start = i;
                while i < chars.len() && (chars[i].1.is_alphanumeric() || chars[i].1 == '_') {
                    i += 1;
                }
                let s: String = chars[start..i].iter().map(|&(_, c)| c).collect();
                out.push(Token {
                    tok: Tok::Ident(s),
                    line,
                    col,
                });
            } else {
                return Err(syntax(line, col, format!("unexpected character {c:?}")));
            }
        }
        out.push(Token {
            tok: Tok::End,
            line,
            col: chars.len() + 1,
        });
    }
    Ok(out)
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
    sig: Vec<(String, usize)>,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.toks.get(self.pos)
    }

    fn peek_tok(&self, ahead: usize) -> Option<&Tok> {
        self.toks.get(self.pos + ahead).map(|t| &t.tok)
    }

    fn next(&mut self) -> Option<Token> {
        let t = self.toks.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn eof_pos(&self) -> (usize, usize) {
        self.toks.last().map_or((1, 1), |t| (t.line, t.col))
    }

    fn variable(&mut self) -> Result<u8, ParseError> {
        match self.next() {
            Some(Token {
                tok: Tok::Ident(name),
                line,
                col,
            }) => {
                if self.peek_tok(0) == Some(&Tok::LParen) {
                    return Err(syntax(
                        line,
                        col,
                        "nested terms are not allowed in linear identities",
                    ));
                }
                VARIABLE_NAMES
                    .iter()
                    .position(|&v| v == name)
                    .map(|i| i as u8)
                    .ok_or_else(|| syntax(line, col, format!("{name:?} is not a variable")))
            }
            Some(t) => Err(syntax(t.line, t.col, "expected a variable")),
            None => {
                let (l, c) = self.eof_pos();
                Err(syntax(l, c, "expected a variable, found end of input"))
            }
        }
    }

    fn term(&mut self) -> Result<LinearTerm, ParseError> {
        let Some(tok) = self.peek().cloned() else {
            let (l, c) = self.eof_pos();
            return Err(syntax(l, c, "expected a term, found end of input"));
        };
        let Tok::Ident(name) = &tok.tok else {
            return Err(syntax(tok.line, tok.col, "expected a term"));
        };
        if self.peek_tok(1) != Some(&Tok::LParen) {
            return self.variable().map(LinearTerm::Var);
        }
        self.pos += 2;
        let mut args = vec![self.variable()?];
        loop {
            match self.next() {
                Some(Token {
                    tok: Tok::Comma, ..
                }) => args.push(self.variable()?),
                Some(Token {
                    tok: Tok::RParen, ..
                }) => break,
                Some(t) => return Err(syntax(t.line, t.col, "expected ',' or ')'")),
                None => {
                    let (l, c) = self.eof_pos();
                    return Err(syntax(l, c, "unclosed '('"));
                }
            }
        }
        let Some(sym) = self.sig.iter().position(|(n, _)| n == name) else {
            return Err(ParseError::UnknownSymbol {
                line: tok.line,
                col: tok.col,
                name: name.clone(),
            });
        };
        let expected = self.sig[sym].1;
        if expected != args.len() {
            return Err(ParseError::Arity {
                line: tok.line,
                col: tok.col,
                name: name.clone(),
                expected,
                found: args.len(),
            });
        }
        Ok(LinearTerm::App { sym, args })
    }

    fn end_of_statement(&mut self) -> Result<(), ParseError> {
        match self.next() {
            None | Some(Token { tok: Tok::End, .. }) => Ok(()),
            Some(t) => Err(syntax(t.line, t.col, "expected ';' or end of line")),
        }
    }
}

/// Parses the DSL into a system. Chains expand to adjacent pairs and
/// reflexive identities are dropped.
pub fn parse_system(text: &str) -> Result<IdentitySystem, ParseError> {
    let mut p = Parser {
        toks: tokenize(text)?,
        pos: 0,
        sig: Vec::new(),
    };
    let mut chains: Vec<(usize, usize, Vec<LinearTerm>)> = Vec::new();
    while let Some(tok) = p.peek().cloned() {
        match (&tok.tok, p.peek_tok(1)) {
            (Tok::End, _) => {
                p.pos += 1;
            }
            (Tok::Ident(name), Some(Tok::Slash)) => {
                p.pos += 2;
                let arity = match p.next() {
                    Some(Token {
                        tok: Tok::Number(n),
                        ..
                    }) => n,
                    Some(t) => return Err(syntax(t.line, t.col, "expected an arity")),
                    None => {
                        let (l, c) = p.eof_pos();
                        return Err(syntax(l, c, "expected an arity"));
                    }
                };
                if p.sig.iter().any(|(n, _)| n == name) {
                    return Err(ParseError::DuplicateSymbol {
                        line: tok.line,
                        col: tok.col,
                        name: name.clone(),
                    });
                }
                if VARIABLE_NAMES.contains(&name.as_str()) {
                    return Err(syntax(
                        tok.line,
                        tok.col,
                        format!("{name:?} is a variable name and cannot be a symbol"),
                    ));
                }
                if !(1..=3).contains(&arity) {
                    return Err(syntax(tok.line, tok.col, "arity must be 1, 2 or 3"));
                }
                if !chains.is_empty() {
                    return Err(syntax(
                        tok.line,
                        tok.col,
                        "declarations must precede identities",
                    ));
                }
                p.sig.push((name.clone(), arity));
                p.end_of_statement()?;
            }
            _ => {
                let mut chain = vec![p.term()?];
                while p.peek_tok(0) == Some(&Tok::Eq) {
                    p.pos += 1;
                    chain.push(p.term()?);
                }
                if chain.len() < 2 {
                    return Err(syntax(tok.line, tok.col, "expected '=' after term"));
                }
                p.end_of_statement()?;
                chains.push((tok.line, tok.col, chain));
            }
        }
    }
    let signature = SymbolSignature::new(p.sig).expect("declarations checked while parsing");
    let mut sys = IdentitySystem::new(signature);
    for (_, _, chain) in chains {
        for pair in chain.windows(2) {
            sys.add(pair[0].clone(), pair[1].clone())
                .expect("terms checked while parsing");
        }
    }
    Ok(sys)
}
