//! The three small-step reductions on goals and the productivity check.
//!
//! A goal is a list of atoms; the empty list is success. Three reductions
//! act on goals:
//!
//! * substitution steps ([`sld_step`]) unify a clause head with an atom and
//!   apply the unifier to the whole goal — classical SLD resolution;
//! * rewriting steps ([`rewrite_step`]) only *match* the head against the
//!   atom, so goal variables are never instantiated;
//! * structural steps ([`s_step`]) rewrite to normal form first and then
//!   take one substitution step that is not a rewriting step (an external
//!   resolvent).
//!
//! A program is observationally productive when rewriting alone always
//! terminates; [`productivity_check`] semi-decides this by hunting for
//! repeating subgoals along rewriting chains.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::program::Program;
use crate::subst::Subst;
use crate::term::{Term, Var};
use crate::unify::{
    embeds, mgm, mgu, rename_apart, rename_clause_lazy, variant, UnifyOutcome, VarSupply,
};

/// A goal: an ordered list of atoms. Empty means proved.
pub type GoalList = Vec<Term>;

/// Rewriting did not reach a normal form within the step budget. Carries
/// the goal reached so far; on a non-productive program that goal is a
/// snapshot of an infinite reduction.
#[derive(Clone, PartialEq, Eq, Debug, Error)]
#[error("rewriting fuel exhausted after {steps} steps")]
pub struct FuelExhausted {
    pub partial: GoalList,
    pub steps: usize,
}

fn all_vars(g: &[Term]) -> BTreeSet<Var> {
    let mut out = BTreeSet::new();
    for t in g {
        t.collect_vars(&mut out);
    }
    out
}

/// One SLD-resolution step at `g[index]`: for every clause whose head
/// unifies with the selected atom (occurs check on), returns the unifier
/// and the new goal — the clause body spliced in place of the atom, with
/// the unifier applied to everything.
pub fn sld_step(
    p: &Program,
    g: &[Term],
    index: usize,
    supply: &mut VarSupply,
) -> Vec<(Subst, GoalList)> {
    let used = all_vars(g);
    let mut out = Vec::new();
    for clause in p.clauses() {
        let c = rename_clause_lazy(clause, &used, supply);
        let sigma = match mgu(&c.head, &g[index], true) {
            Some(UnifyOutcome::Unifier(sigma)) => sigma,
            Some(UnifyOutcome::Rational(_)) => unreachable!("occurs check is on"),
            None => continue,
        };
        let mut next: GoalList = Vec::with_capacity(g.len() + c.body.len() - 1);
        next.extend_from_slice(&g[..index]);
        next.extend_from_slice(&c.body);
        next.extend_from_slice(&g[index + 1..]);
        out.push((sigma.clone(), sigma.apply_goal(&next)));
    }
    out
}

/// One rewriting step at `g[index]`: for every clause whose head *matches*
/// the selected atom, returns the matcher and the new goal. The matcher
/// binds clause variables only, so every other atom of the goal is
/// returned unchanged.
pub fn rewrite_step(
    p: &Program,
    g: &[Term],
    index: usize,
    supply: &mut VarSupply,
) -> Vec<(Subst, GoalList)> {
    let used = all_vars(g);
    let mut out = Vec::new();
    for clause in p.clauses() {
        let c = rename_clause_lazy(clause, &used, supply);
        let theta = match mgm(&c.head, &g[index]) {
            Some(theta) => theta,
            None => continue,
        };
        debug_assert!(
            theta.domain().all(|v| !used.contains(v)),
            "matching must not bind goal variables"
        );
        let mut next: GoalList = Vec::with_capacity(g.len() + c.body.len() - 1);
        next.extend_from_slice(&g[..index]);
        next.extend(c.body.iter().map(|b| theta.apply(b)));
        next.extend_from_slice(&g[index + 1..]);
        out.push((theta, next));
    }
    out
}

/// Exhaustive rewriting to normal form, leftmost atom first and lowest
/// clause index first, counting the steps taken. Rewriting need not
/// terminate; the fuel bound turns a runaway reduction into
/// [`FuelExhausted`] with the goal reached so far.
pub fn rewrite_normal_form(
    p: &Program,
    g: &[Term],
    fuel: usize,
    supply: &mut VarSupply,
) -> Result<(GoalList, usize), FuelExhausted> {
    let mut goal: GoalList = g.to_vec();
    let mut steps = 0usize;
    'outer: loop {
        for index in 0..goal.len() {
            let mut results = rewrite_step(p, &goal, index, supply);
            if results.is_empty() {
                continue;
            }
            if steps >= fuel {
                return Err(FuelExhausted { partial: goal, steps });
            }
            let (_, next) = results.swap_remove(0);
            goal = next;
            steps += 1;
            continue 'outer;
        }
        return Ok((goal, steps));
    }
}

/// One structural-resolution step: reduce the goal to rewriting normal
/// form, then enumerate the external resolvents of the normal form — the
/// clause/atom pairs that unify but do not match. Each result is the
/// resolvent applied to the normal form; callers normalize the results
/// themselves when chaining steps.
pub fn s_step(
    p: &Program,
    g: &[Term],
    fuel: usize,
    supply: &mut VarSupply,
) -> Result<Vec<(Subst, GoalList)>, FuelExhausted> {
    let (nf, _) = rewrite_normal_form(p, g, fuel, supply)?;
    let used = all_vars(&nf);
    let mut out = Vec::new();
    for index in 0..nf.len() {
        for clause in p.clauses() {
            let c = rename_clause_lazy(clause, &used, supply);
            debug_assert!(
                mgm(&c.head, &nf[index]).is_none(),
                "a normal form admits no matching clause head"
            );
            if let Some(UnifyOutcome::Unifier(sigma)) = mgu(&c.head, &nf[index], true) {
                out.push((sigma.clone(), sigma.apply_goal(&nf)));
            }
        }
    }
    Ok(out)
}

/// Whether some rewriting sequence reduces `[t]` to the empty goal. The
/// rewriting relation never instantiates goal variables, so a goal reaches
/// `[]` exactly when each of its atoms does, and the search can decompose
/// atom by atom. Atoms already under consideration on the current path are
/// not retried: a proof may not depend on itself.
pub fn rewrites_to_empty(p: &Program, t: &Term, fuel: usize) -> bool {
    let mut proved: BTreeSet<Term> = BTreeSet::new();
    let mut fuel = fuel;
    let mut supply = VarSupply::new();
    let mut on_path: Vec<Term> = Vec::new();
    atom_rewrites_to_empty(p, t, &mut proved, &mut on_path, &mut fuel, &mut supply)
}

fn atom_rewrites_to_empty(
    p: &Program,
    t: &Term,
    proved: &mut BTreeSet<Term>,
    on_path: &mut Vec<Term>,
    fuel: &mut usize,
    supply: &mut VarSupply,
) -> bool {
    let canon = t.alpha_canonical();
    if proved.contains(&canon) {
        return true;
    }
    if on_path.contains(&canon) {
        return false;
    }
    on_path.push(canon.clone());
    let used = t.vars();
    let mut ok = false;
    'clauses: for clause in p.clauses() {
        if *fuel == 0 {
            break;
        }
        *fuel -= 1;
        let c = rename_clause_lazy(clause, &used, supply);
        let theta = match mgm(&c.head, t) {
            Some(theta) => theta,
            None => continue,
        };
        for b in &c.body {
            let b = theta.apply(b);
            if !atom_rewrites_to_empty(p, &b, proved, on_path, fuel, supply) {
                continue 'clauses;
            }
        }
        ok = true;
        break;
    }
    on_path.pop();
    if ok {
        proved.insert(canon);
    }
    ok
}

/// How a repeating subgoal was recognized.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum LoopKind {
    /// The recurring atom is a renaming of an ancestor: a genuine loop, so
    /// the rewriting reduction is provably infinite.
    Variant,
    /// An ancestor embeds homeomorphically into the recurring atom: the
    /// chain keeps growing. This is a conservative whistle; it cannot be
    /// wrong about the corpus but can in principle flag a chain that would
    /// have stopped later.
    Embedding,
}

/// A concrete repeating pattern found along a rewriting chain.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct LoopWitness {
    pub predicate: String,
    pub seed: Term,
    pub ancestor: Term,
    pub recurring: Term,
    pub kind: LoopKind,
    pub depth: usize,
}

impl fmt::Display for LoopWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "non-productive: {} loop: ", self.predicate)?;
        match self.kind {
            LoopKind::Variant => {
                write!(f, "{} is a variant of ancestor {}", self.recurring, self.ancestor)?
            }
            LoopKind::Embedding => {
                write!(f, "ancestor {} embeds into {}", self.ancestor, self.recurring)?
            }
        }
        write!(f, " (rewriting {})", self.seed)
    }
}

/// Outcome of the productivity semi-decision.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum ProductivityVerdict {
    /// Every explored rewriting chain terminates.
    Productive,
    /// A repeating subgoal pattern was found; rewriting does not terminate.
    NonProductive(LoopWitness),
    /// The step budget ran out before either conclusion.
    Unknown { fuel_spent: usize },
}

impl ProductivityVerdict {
    pub fn is_productive(&self) -> bool {
        matches!(self, ProductivityVerdict::Productive)
    }
}

impl fmt::Display for ProductivityVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProductivityVerdict::Productive => write!(f, "productive"),
            ProductivityVerdict::NonProductive(w) => write!(f, "{}", w),
            ProductivityVerdict::Unknown { fuel_spent } => {
                write!(f, "unknown (budget of {} steps spent)", fuel_spent)
            }
        }
    }
}

/// Semi-decides observational productivity: rewriting chains are explored
/// from the most general goal of every predicate and from every clause
/// body atom, and a chain that revisits a variant of an ancestor — or that
/// grows an ancestor into a larger atom — is reported as a loop. Chains
/// that all terminate mean the program is productive; running out of fuel
/// is inconclusive.
///
/// Seeding with clause bodies matters: a clause like `bad(f(X)) :-
/// bad(f(X))` loops on the instantiated atom `bad(f(X))` even though the
/// most general goal `bad(X)` is already a normal form.
pub fn productivity_check(p: &Program, fuel: usize) -> ProductivityVerdict {
    let mut seeds: Vec<Term> = Vec::new();
    let push_seed = |t: Term, seeds: &mut Vec<Term>| {
        if !seeds.iter().any(|s| variant(s, &t)) {
            seeds.push(t);
        }
    };
    for (name, arity) in p.predicates() {
        let args = (1..=arity).map(|i| Term::var(format!("X{}", i))).collect();
        push_seed(Term::app(name, args), &mut seeds);
    }
    for clause in p.clauses() {
        for b in &clause.body {
            push_seed(b.clone(), &mut seeds);
        }
    }

    let mut supply = VarSupply::new();
    let mut remaining = fuel;
    for seed in &seeds {
        // Depth-first walk of the rewriting chains below this seed; each
        // work item carries its own ancestor chain.
        let mut work: Vec<(Term, Vec<Term>)> = vec![(seed.clone(), Vec::new())];
        while let Some((atom, ancestors)) = work.pop() {
            for clause in p.clauses() {
                if remaining == 0 {
                    return ProductivityVerdict::Unknown { fuel_spent: fuel };
                }
                remaining -= 1;
                let c = rename_apart(clause, &mut supply);
                let theta = match mgm(&c.head, &atom) {
                    Some(theta) => theta,
                    None => continue,
                };
                let mut chain = ancestors.clone();
                chain.push(atom.clone());
                for b in &c.body {
                    let b = theta.apply(b);
                    for anc in &chain {
                        let kind = if variant(anc, &b) {
                            Some(LoopKind::Variant)
                        } else if embeds(anc, &b) {
                            Some(LoopKind::Embedding)
                        } else {
                            None
                        };
                        if let Some(kind) = kind {
                            let predicate = b
                                .functor()
                                .map(|(name, _)| name.to_string())
                                .unwrap_or_default();
                            return ProductivityVerdict::NonProductive(LoopWitness {
                                predicate,
                                seed: seed.clone(),
                                ancestor: anc.clone(),
                                recurring: b.clone(),
                                kind,
                                depth: chain.len(),
                            });
                        }
                    }
                    work.push((b, chain.clone()));
                }
            }
        }
    }
    ProductivityVerdict::Productive
}
