//! Clauses, programs, predicate typing, and the example corpus.
//!
//! A program is a finite ordered list of definite clauses. The position of
//! a clause matters: rewriting-tree nodes carry one child slot per clause,
//! in program order, so two programs with the same clauses in different
//! orders are different objects.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::term::{Term, Var};

/// Head symbol reserved for goal clauses (`?- body`). Not a parsable
/// symbol, so it can never collide with a program predicate.
pub const GOAL_HEAD: &str = "?";

/// A definite clause `head :- body`, a fact when the body is empty. Goals
/// are clauses whose head is the reserved goal symbol.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Clause {
    pub head: Term,
    pub body: Vec<Term>,
}

impl Clause {
    pub fn new(head: Term, body: Vec<Term>) -> Clause {
        Clause { head, body }
    }

    pub fn fact(head: Term) -> Clause {
        Clause { head, body: Vec::new() }
    }

    /// Number of body atoms.
    pub fn arity(&self) -> usize {
        self.body.len()
    }

    pub fn is_fact(&self) -> bool {
        self.body.is_empty()
    }

    pub fn is_goal(&self) -> bool {
        matches!(self.head.functor(), Some((GOAL_HEAD, 0)))
    }

    /// Predicate symbol and arity of the head.
    pub fn predicate(&self) -> Option<(&str, usize)> {
        self.head.functor()
    }

    pub fn vars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        self.head.collect_vars(&mut out);
        for t in &self.body {
            t.collect_vars(&mut out);
        }
        out
    }
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let body: Vec<String> = self.body.iter().map(Term::to_string).collect();
        if self.is_goal() {
            write!(f, "?- {}.", body.join(", "))
        } else if self.body.is_empty() {
            write!(f, "{}.", self.head)
        } else {
            write!(f, "{} :- {}.", self.head, body.join(", "))
        }
    }
}

/// A query: the body of a goal clause.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct GoalClause {
    pub body: Vec<Term>,
}

impl GoalClause {
    pub fn new(body: Vec<Term>) -> GoalClause {
        GoalClause { body }
    }

    pub fn to_clause(&self) -> Clause {
        Clause {
            head: Term::atom(GOAL_HEAD),
            body: self.body.clone(),
        }
    }

    pub fn vars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        for t in &self.body {
            t.collect_vars(&mut out);
        }
        out
    }
}

impl fmt::Display for GoalClause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let body: Vec<String> = self.body.iter().map(Term::to_string).collect();
        write!(f, "?- {}.", body.join(", "))
    }
}

/// An ordered list of clauses.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct Program {
    clauses: Vec<Clause>,
}

impl Program {
    pub fn new(clauses: Vec<Clause>) -> Program {
        Program { clauses }
    }

    pub fn clause(&self, i: usize) -> &Clause {
        &self.clauses[i]
    }

    pub fn clauses(&self) -> &[Clause] {
        &self.clauses
    }

    /// Number of clauses; also the number of child slots under every
    /// term node of a rewriting tree over this program.
    pub fn arity(&self) -> usize {
        self.clauses.len()
    }

    /// Predicates defined or referenced by the program, with arities.
    /// The first occurrence fixes the arity.
    pub fn predicates(&self) -> BTreeMap<String, usize> {
        let mut out = BTreeMap::new();
        for c in &self.clauses {
            for atom in std::iter::once(&c.head).chain(c.body.iter()) {
                if let Some((name, arity)) = atom.functor() {
                    out.entry(name.to_string()).or_insert(arity);
                }
            }
        }
        out
    }
}

impl fmt::Display for Program {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.clauses {
            writeln!(f, "{}", c)?;
        }
        Ok(())
    }
}

/// Inductive predicates take least-fixed-point semantics; coinductive ones
/// take greatest-fixed-point semantics and may close proofs by loops.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum PredType {
    Inductive,
    Coinductive,
}

impl fmt::Display for PredType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PredType::Inductive => write!(f, "inductive"),
            PredType::Coinductive => write!(f, "coinductive"),
        }
    }
}

/// Assigns each predicate an inductive or coinductive reading. Predicates
/// not mentioned default to inductive.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct TypingFunction(BTreeMap<String, PredType>);

impl TypingFunction {
    pub fn new() -> TypingFunction {
        TypingFunction(BTreeMap::new())
    }

    pub fn get(&self, predicate: &str) -> PredType {
        self.0
            .get(predicate)
            .copied()
            .unwrap_or(PredType::Inductive)
    }

    pub fn is_coinductive(&self, predicate: &str) -> bool {
        self.get(predicate) == PredType::Coinductive
    }

    pub fn mark_coinductive(&mut self, predicate: impl Into<String>) {
        self.0.insert(predicate.into(), PredType::Coinductive);
    }

    /// Predicates explicitly marked coinductive.
    pub fn coinductive_predicates(&self) -> impl Iterator<Item = &str> {
        self.0
            .iter()
            .filter(|(_, t)| **t == PredType::Coinductive)
            .map(|(name, _)| name.as_str())
    }
}

/// Function and predicate symbols of a program, with arities.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct Signature {
    pub functions: BTreeMap<String, usize>,
    pub predicates: BTreeMap<String, usize>,
}

/// The example programs exercised throughout the tests, keyed by their
/// conventional names. Sources are embedded, so the corpus is available
/// without touching the filesystem.
pub fn corpus() -> BTreeMap<&'static str, Program> {
    const SOURCES: &[(&str, &str)] = &[
        ("P1", "nat(0).\nnat(s(X)) :- nat(X).\n"),
        (
            "P2",
            "nat(0).\nnat(s(X)) :- nat(X).\nnats(scons(X,Y)) :- nat(X), nats(Y).\n",
        ),
        (
            "P3",
            "add(0,Y,Y).\nadd(s(X),Y,s(Z)) :- add(X,Y,Z).\nfibs(X,Y,cons(X,S)) :- add(X,Y,Z), fibs(Y,Z,S).\n",
        ),
        ("P4", "from(X,scons(X,Y)) :- from(s(X),Y).\n"),
        ("P5", "from(X,scons(X,Y)) :- from(s(X),Y), error(0).\n"),
        (
            "P6",
            "conn(X,Y) :- conn(X,Z), conn(Z,Y).\nconn(a,b).\nconn(b,c).\n",
        ),
        ("P7", "p(c).\np(X) :- q(X).\n"),
        (
            "P8",
            "nat(0).\nnat(s(X)) :- nat(X).\nnats(scons(X,Y)) :- nat(X), nats(Y).\nadd(0,Y,Y).\nadd(s(X),Y,s(Z)) :- add(X,Y,Z).\nfibs(X,Y,cons(X,S)) :- add(X,Y,Z), fibs(Y,Z,S).\nfibnats(X,Y) :- fibs(0,s(0),X), nats(Y).\n",
        ),
        ("P9", "anySuccessor(s(X)).\n"),
        ("P10", "p(X,f(X)) :- p(X,X).\n"),
        (
            "P11",
            "from(X,scons(X,Y)) :- from(s(X),Y).\np(Y) :- from(0,X).\n",
        ),
        ("P12", "zeros(scons(0,X)) :- zeros(X).\n"),
        ("bad", "bad(f(X)) :- bad(f(X)).\n"),
        ("good", "good(f(X)) :- good(X).\n"),
    ];
    SOURCES
        .iter()
        .map(|(name, src)| {
            let (program, _, _) = crate::parser::parse_program(src)
                .unwrap_or_else(|e| panic!("embedded program {} must parse: {}", name, e));
            (*name, program)
        })
        .collect()
}
