//! Brute-force ground-model approximation: the forward closure of a
//! program over a depth-bounded ground universe. Slow and exhaustive by
//! design — it is the independent ground truth the engines are tested
//! against, so it shares no machinery with them beyond the term types.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::program::Program;
use crate::term::{Term, Var};

/// Hard cap on the enumerated ground universe; exceeding it is an error
/// rather than a silent truncation.
const UNIVERSE_CAP: usize = 100_000;

/// A finite slice of the program's ground model: every fact derivable in
/// at most `iterations` forward steps, with rule variables instantiated
/// from the universe of ground terms of depth at most `depth_bound`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct HerbrandSlice {
    pub terms: BTreeSet<Term>,
    /// Forward steps actually performed (stops early at a fixpoint).
    pub iterations: usize,
    pub depth_bound: usize,
}

#[derive(Clone, PartialEq, Eq, Debug, Error)]
pub enum OracleError {
    #[error("bounded ground universe exceeds {cap} terms")]
    UniverseTooLarge { cap: usize },
    #[error("membership is defined for ground terms only, got {term}")]
    NotGround { term: Term },
}

/// Function symbols of the program: every symbol applied strictly below
/// the predicate level, with its arity.
fn function_symbols(p: &Program) -> BTreeSet<(String, usize)> {
    fn below(t: &Term, out: &mut BTreeSet<(String, usize)>) {
        if let Term::App(f, args) = t {
            out.insert((f.clone(), args.len()));
            for a in args {
                below(a, out);
            }
        }
    }
    let mut out = BTreeSet::new();
    for clause in p.clauses() {
        for atom in std::iter::once(&clause.head).chain(&clause.body) {
            if let Term::App(_, args) = atom {
                for a in args {
                    below(a, &mut out);
                }
            }
        }
    }
    out
}

/// All ground terms of depth at most `depth_bound` over the program's
/// function symbols.
fn ground_universe(p: &Program, depth_bound: usize) -> Result<BTreeSet<Term>, OracleError> {
    let functions = function_symbols(p);
    let mut universe: BTreeSet<Term> = functions
        .iter()
        .filter(|(_, k)| *k == 0)
        .map(|(f, _)| Term::atom(f.clone()))
        .collect();
    loop {
        let mut fresh: Vec<Term> = Vec::new();
        for (f, k) in &functions {
            if *k == 0 {
                continue;
            }
            let pool: Vec<&Term> = universe.iter().collect();
            let mut pick = vec![0usize; *k];
            'tuples: loop {
                if !pool.is_empty() {
                    let args: Vec<Term> = pick.iter().map(|&i| pool[i].clone()).collect();
                    let t = Term::app(f.clone(), args);
                    if t.depth() <= depth_bound && !universe.contains(&t) {
                        if universe.len() + fresh.len() >= UNIVERSE_CAP {
                            return Err(OracleError::UniverseTooLarge { cap: UNIVERSE_CAP });
                        }
                        fresh.push(t);
                    }
                }
                for slot in (0..*k).rev() {
                    pick[slot] += 1;
                    if pick[slot] < pool.len() {
                        continue 'tuples;
                    }
                    pick[slot] = 0;
                }
                break;
            }
        }
        if fresh.is_empty() {
            return Ok(universe);
        }
        for t in fresh {
            universe.insert(t);
            if universe.len() > UNIVERSE_CAP {
                return Err(OracleError::UniverseTooLarge { cap: UNIVERSE_CAP });
            }
        }
    }
}

/// Syntactic match of a (possibly non-ground) atom against a ground fact,
/// extending `bindings` consistently.
fn match_ground(pattern: &Term, fact: &Term, bindings: &mut BTreeMap<Var, Term>) -> bool {
    match (pattern, fact) {
        (Term::Var(v), _) => match bindings.get(v) {
            Some(bound) => bound == fact,
            None => {
                bindings.insert(v.clone(), fact.clone());
                true
            }
        },
        (Term::App(f, fa), Term::App(g, ga)) => {
            f == g
                && fa.len() == ga.len()
                && fa.iter().zip(ga).all(|(s, t)| match_ground(s, t, bindings))
        }
        (Term::App(..), Term::Var(_)) => false,
    }
}

/// All ways to match the body atoms, in order, against the fact set.
fn body_matches(
    body: &[Term],
    facts: &BTreeSet<Term>,
    bindings: BTreeMap<Var, Term>,
    out: &mut Vec<BTreeMap<Var, Term>>,
) {
    match body.split_first() {
        None => out.push(bindings),
        Some((first, rest)) => {
            for fact in facts {
                let mut extended = bindings.clone();
                if match_ground(first, fact, &mut extended) {
                    body_matches(rest, facts, extended, out);
                }
            }
        }
    }
}

fn apply_ground(bindings: &BTreeMap<Var, Term>, t: &Term) -> Term {
    match t {
        Term::Var(v) => bindings
            .get(v)
            .cloned()
            .unwrap_or_else(|| Term::Var(v.clone())),
        Term::App(f, args) => Term::App(
            f.clone(),
            args.iter().map(|a| apply_ground(bindings, a)).collect(),
        ),
    }
}

/// Iterates the immediate-consequence step: a clause head instance is
/// added whenever every body atom instance is already present, with rule
/// variables grounded into the depth-bounded universe. Stops at a fixpoint
/// or after `iterations` steps. Derived heads themselves are not depth
/// filtered — only the variable bindings are.
pub fn forward_closure(
    p: &Program,
    iterations: usize,
    depth_bound: usize,
) -> Result<HerbrandSlice, OracleError> {
    assert!(iterations >= 1, "at least one forward step is required");
    assert!(depth_bound >= 1, "the universe needs depth at least 1");
    let universe = ground_universe(p, depth_bound)?;
    let universe_vec: Vec<Term> = universe.iter().cloned().collect();
    let mut facts: BTreeSet<Term> = BTreeSet::new();
    let mut performed = 0usize;
    for _ in 0..iterations {
        let mut fresh: Vec<Term> = Vec::new();
        for clause in p.clauses() {
            let mut matches = Vec::new();
            body_matches(&clause.body, &facts, BTreeMap::new(), &mut matches);
            'matches: for bindings in matches {
                for bound in bindings.values() {
                    if bound.depth() > depth_bound {
                        continue 'matches;
                    }
                }
                // Variables of the head not bound by the body range over
                // the whole universe.
                let head_vars: Vec<Var> = clause
                    .head
                    .vars()
                    .into_iter()
                    .filter(|v| !bindings.contains_key(v))
                    .collect();
                let mut pick = vec![0usize; head_vars.len()];
                'tuples: loop {
                    if head_vars.is_empty() || !universe_vec.is_empty() {
                        let mut grounded = bindings.clone();
                        for (v, &i) in head_vars.iter().zip(&pick) {
                            grounded.insert(v.clone(), universe_vec[i].clone());
                        }
                        let head = apply_ground(&grounded, &clause.head);
                        if head.is_ground() && !facts.contains(&head) {
                            fresh.push(head);
                        }
                    }
                    for slot in (0..head_vars.len()).rev() {
                        pick[slot] += 1;
                        if pick[slot] < universe_vec.len() {
                            continue 'tuples;
                        }
                        pick[slot] = 0;
                    }
                    break;
                }
            }
        }
        performed += 1;
        if fresh.is_empty() {
            break;
        }
        facts.extend(fresh);
    }
    Ok(HerbrandSlice { terms: facts, iterations: performed, depth_bound })
}

/// Ground membership in the slice.
pub fn member(slice: &HerbrandSlice, g: &Term) -> Result<bool, OracleError> {
    if !g.is_ground() {
        return Err(OracleError::NotGround { term: g.clone() });
    }
    Ok(slice.terms.contains(g))
}
