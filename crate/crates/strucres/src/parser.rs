//! Parser for logic programs and queries.
//!
//! Syntax is conventional: clauses `head :- b1, b2.` or facts `head.`,
//! queries `?- g1, g2.`, `%` line comments, and one directive form
//! `:- coinductive name/arity.` to mark a predicate coinductive. Symbols
//! start with a lowercase letter or digit, variables with an uppercase
//! letter or underscore. Parsing also infers the signature, rejecting
//! symbols used at two arities or as both predicate and function.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::program::{Clause, GoalClause, Program, Signature, TypingFunction};
use crate::term::Term;

/// Errors raised while parsing a program or query.
#[derive(Clone, PartialEq, Eq, Debug, Error)]
pub enum ParseError {
    #[error("parse error at line {line}, column {col}: {message}")]
    Syntax {
        line: usize,
        col: usize,
        message: String,
    },
    #[error("arity clash: {symbol} used with arity {first} and with arity {second}")]
    ArityClash {
        symbol: String,
        first: usize,
        second: usize,
    },
    #[error("namespace clash: {symbol} used both as predicate and as function symbol")]
    NamespaceClash { symbol: String },
    #[error("directive arity mismatch: {predicate} declared with arity {declared} but used with arity {inferred}")]
    DirectiveArity {
        predicate: String,
        declared: usize,
        inferred: usize,
    },
}

#[derive(Clone, PartialEq, Eq, Debug)]
enum Tok {
    Sym(String),
    Var(String),
    LParen,
    RParen,
    Comma,
    Dot,
    If,
    Query,
    Slash,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Sym(s) => write!(f, "symbol {}", s),
            Tok::Var(v) => write!(f, "variable {}", v),
            Tok::LParen => write!(f, "'('"),
            Tok::RParen => write!(f, "')'"),
            Tok::Comma => write!(f, "','"),
            Tok::Dot => write!(f, "'.'"),
            Tok::If => write!(f, "':-'"),
            Tok::Query => write!(f, "'?-'"),
            Tok::Slash => write!(f, "'/'"),
            Tok::Eof => write!(f, "end of input"),
        }
    }
}

struct Lexed {
    tok: Tok,
    line: usize,
    col: usize,
}

fn is_sym_start(c: char) -> bool {
    c.is_ascii_lowercase() || c.is_ascii_digit()
}

fn is_var_start(c: char) -> bool {
    c.is_ascii_uppercase() || c == '_'
}

fn is_name_continue(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '\''
}

fn lex(src: &str) -> Result<Vec<Lexed>, ParseError> {
    let mut out = Vec::new();
    let mut chars = src.chars().peekable();
    let (mut line, mut col) = (1usize, 1usize);

    macro_rules! bump {
        () => {{
            let c = chars.next();
            if c == Some('\n') {
                line += 1;
                col = 1;
            } else if c.is_some() {
                col += 1;
            }
            c
        }};
    }

    while let Some(&c) = chars.peek() {
        let (tline, tcol) = (line, col);
        match c {
            ' ' | '\t' | '\r' | '\n' => {
                bump!();
            }
            '%' => {
                while let Some(&c) = chars.peek() {
                    if c == '\n' {
                        break;
                    }
                    bump!();
                }
            }
            '(' => {
                bump!();
                out.push(Lexed { tok: Tok::LParen, line: tline, col: tcol });
            }
            ')' => {
                bump!();
                out.push(Lexed { tok: Tok::RParen, line: tline, col: tcol });
            }
            ',' => {
                bump!();
                out.push(Lexed { tok: Tok::Comma, line: tline, col: tcol });
            }
            '.' => {
                bump!();
                out.push(Lexed { tok: Tok::Dot, line: tline, col: tcol });
            }
            '/' => {
                bump!();
                out.push(Lexed { tok: Tok::Slash, line: tline, col: tcol });
            }
            ':' | '?' => {
                bump!();
                if chars.peek() == Some(&'-') {
                    bump!();
                    let tok = if c == ':' { Tok::If } else { Tok::Query };
                    out.push(Lexed { tok, line: tline, col: tcol });
                } else {
                    return Err(ParseError::Syntax {
                        line: tline,
                        col: tcol,
                        message: format!("expected '-' after '{}'", c),
                    });
                }
            }
            c if is_sym_start(c) || is_var_start(c) => {
                let mut name = String::new();
                name.push(bump!().expect("peeked"));
                while let Some(&c) = chars.peek() {
                    if is_name_continue(c) {
                        name.push(bump!().expect("peeked"));
                    } else {
                        break;
                    }
                }
                let tok = if is_sym_start(name.chars().next().expect("nonempty")) {
                    Tok::Sym(name)
                } else {
                    Tok::Var(name)
                };
                out.push(Lexed { tok, line: tline, col: tcol });
            }
            c => {
                return Err(ParseError::Syntax {
                    line: tline,
                    col: tcol,
                    message: format!("unexpected character {:?}", c),
                });
            }
        }
    }
    out.push(Lexed { tok: Tok::Eof, line, col });
    Ok(out)
}

struct Parser {
    toks: Vec<Lexed>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn here(&self) -> (usize, usize) {
        (self.toks[self.pos].line, self.toks[self.pos].col)
    }

    fn advance(&mut self) -> Tok {
        let tok = self.toks[self.pos].tok.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        tok
    }

    fn error(&self, message: impl Into<String>) -> ParseError {
        let (line, col) = self.here();
        ParseError::Syntax {
            line,
            col,
            message: message.into(),
        }
    }

    fn expect(&mut self, want: &Tok, what: &str) -> Result<(), ParseError> {
        if self.peek() == want {
            self.advance();
            Ok(())
        } else {
            Err(self.error(format!("expected {}, found {}", what, self.peek())))
        }
    }

    fn term(&mut self) -> Result<Term, ParseError> {
        match self.advance() {
            Tok::Var(name) => Ok(Term::var(name)),
            Tok::Sym(name) => {
                if *self.peek() == Tok::LParen {
                    self.advance();
                    let args = self.term_list()?;
                    self.expect(&Tok::RParen, "')'")?;
                    Ok(Term::app(name, args))
                } else {
                    Ok(Term::atom(name))
                }
            }
            other => {
                self.pos = self.pos.saturating_sub(1);
                Err(self.error(format!("expected a term, found {}", other)))
            }
        }
    }

    fn term_list(&mut self) -> Result<Vec<Term>, ParseError> {
        let mut out = vec![self.term()?];
        while *self.peek() == Tok::Comma {
            self.advance();
            out.push(self.term()?);
        }
        Ok(out)
    }

    /// An atom: a term that must be a predicate application, not a variable.
    fn atom(&mut self, role: &str) -> Result<Term, ParseError> {
        let at = self.here();
        let t = self.term()?;
        if t.is_var() {
            return Err(ParseError::Syntax {
                line: at.0,
                col: at.1,
                message: format!("{} must be a predicate application, not a variable", role),
            });
        }
        Ok(t)
    }

    /// `:- coinductive name/arity.` — the `:-` is already consumed.
    fn directive(&mut self) -> Result<(String, usize), ParseError> {
        match self.advance() {
            Tok::Sym(kw) if kw == "coinductive" => {}
            other => {
                self.pos = self.pos.saturating_sub(1);
                return Err(self.error(format!(
                    "unknown directive: expected 'coinductive', found {}",
                    other
                )));
            }
        }
        let name = match self.advance() {
            Tok::Sym(name) => name,
            other => {
                self.pos = self.pos.saturating_sub(1);
                return Err(self.error(format!("expected a predicate name, found {}", other)));
            }
        };
        self.expect(&Tok::Slash, "'/'")?;
        let arity = match self.advance() {
            Tok::Sym(digits) if digits.chars().all(|c| c.is_ascii_digit()) => digits
                .parse::<usize>()
                .map_err(|_| self.error("arity out of range"))?,
            other => {
                self.pos = self.pos.saturating_sub(1);
                return Err(self.error(format!("expected an arity, found {}", other)));
            }
        };
        self.expect(&Tok::Dot, "'.'")?;
        Ok((name, arity))
    }
}

/// Signature inference: predicate symbols are atom roots, function symbols
/// everything below them.
fn record_atom(atom: &Term, sig: &mut Signature) -> Result<(), ParseError> {
    let (name, arity) = atom
        .functor()
        .expect("atoms are applications by construction");
    record_symbol(name, arity, &mut sig.predicates)?;
    if sig.functions.contains_key(name) {
        return Err(ParseError::NamespaceClash {
            symbol: name.to_string(),
        });
    }
    if let Term::App(_, args) = atom {
        for arg in args {
            record_functions(arg, sig)?;
        }
    }
    Ok(())
}

fn record_functions(t: &Term, sig: &mut Signature) -> Result<(), ParseError> {
    if let Term::App(name, args) = t {
        record_symbol(name, args.len(), &mut sig.functions)?;
        if sig.predicates.contains_key(name.as_str()) {
            return Err(ParseError::NamespaceClash {
                symbol: name.clone(),
            });
        }
        for arg in args {
            record_functions(arg, sig)?;
        }
    }
    Ok(())
}

fn record_symbol(
    name: &str,
    arity: usize,
    table: &mut BTreeMap<String, usize>,
) -> Result<(), ParseError> {
    match table.get(name) {
        Some(&first) if first != arity => Err(ParseError::ArityClash {
            symbol: name.to_string(),
            first,
            second: arity,
        }),
        Some(_) => Ok(()),
        None => {
            table.insert(name.to_string(), arity);
            Ok(())
        }
    }
}

/// Parses a program source: clauses in order, plus coinductive directives.
pub fn parse_program(src: &str) -> Result<(Program, TypingFunction, Signature), ParseError> {
    let mut p = Parser { toks: lex(src)?, pos: 0 };
    let mut clauses = Vec::new();
    let mut directives: Vec<(String, usize)> = Vec::new();

    loop {
        match p.peek() {
            Tok::Eof => break,
            Tok::If => {
                p.advance();
                directives.push(p.directive()?);
            }
            _ => {
                let head = p.atom("clause head")?;
                let body = match p.peek() {
                    Tok::If => {
                        p.advance();
                        let mut body = vec![p.atom("body atom")?];
                        while *p.peek() == Tok::Comma {
                            p.advance();
                            body.push(p.atom("body atom")?);
                        }
                        body
                    }
                    _ => Vec::new(),
                };
                p.expect(&Tok::Dot, "'.'")?;
                clauses.push(Clause::new(head, body));
            }
        }
    }

    let mut sig = Signature::default();
    for c in &clauses {
        record_atom(&c.head, &mut sig)?;
        for b in &c.body {
            record_atom(b, &mut sig)?;
        }
    }

    let mut typing = TypingFunction::new();
    for (name, declared) in directives {
        if let Some(&inferred) = sig.predicates.get(&name) {
            if inferred != declared {
                return Err(ParseError::DirectiveArity {
                    predicate: name,
                    declared,
                    inferred,
                });
            }
        } else {
            sig.predicates.insert(name.clone(), declared);
        }
        typing.mark_coinductive(name);
    }

    Ok((Program::new(clauses), typing, sig))
}

/// Parses a query `?- g1, g2.` (the final dot may be omitted).
pub fn parse_query(src: &str) -> Result<GoalClause, ParseError> {
    let mut p = Parser { toks: lex(src)?, pos: 0 };
    p.expect(&Tok::Query, "'?-'")?;
    if *p.peek() == Tok::Dot || *p.peek() == Tok::Eof {
        return Err(p.error("a query needs at least one goal atom"));
    }
    let mut body = vec![p.atom("query atom")?];
    while *p.peek() == Tok::Comma {
        p.advance();
        body.push(p.atom("query atom")?);
    }
    if *p.peek() == Tok::Dot {
        p.advance();
    }
    p.expect(&Tok::Eof, "end of query")?;
    Ok(GoalClause::new(body))
}
