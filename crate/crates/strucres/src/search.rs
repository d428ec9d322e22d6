//! Proof search over rewriting trees: inductive refutation by tree
//! transitions, an SLD baseline, coinductive loop detection gated by
//! productivity, bounded observation of infinite answers, and the derived
//! check that a query is supported at every finite depth.
//!
//! All searches are fuel-bounded semi-decisions: a definite answer is
//! returned when found, exhaustion is reported when a finite search space
//! is used up, and running out of fuel is a distinct inconclusive outcome.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use crate::program::{GoalClause, Program, TypingFunction};
use crate::rational::{resolve_binding, Resolved};
use crate::reduction::{
    productivity_check, rewrite_normal_form, LoopWitness, ProductivityVerdict,
};
use crate::rewtree::{build_rew, RewNode, RewTree, TreeTransition};
use crate::subst::Subst;
use crate::term::{truncate, Position, Term, Var};
use crate::unify::{mgm, mgu, rename_clause_lazy, UnifyOutcome, VarSupply};

/// Node budget for every rewriting tree built during search. Trees of
/// non-productive programs are infinite; the budget turns them into
/// partial trees with an explicit frontier, which the searches treat as
/// unknown territory.
const TREE_BUDGET: usize = 2048;

/// A successful derivation: the external resolvents applied in order, the
/// final tree (which contains a success subtree), and the composed answer
/// restricted to the query's variables.
#[derive(Clone, Debug)]
pub struct Refutation {
    pub resolvents: Vec<Subst>,
    pub final_tree: RewTree,
    pub answer: Subst,
}

/// Outcome of inductive refutation search.
#[derive(Clone, Debug)]
pub enum SRefuteOutcome {
    Refuted(Refutation),
    /// The whole (finite) transition space was explored without success.
    Exhausted,
    /// Budget spent; carries the deepest tree reached, if any was built.
    FuelOut(Option<Box<RewTree>>),
}

/// Outcome of the SLD baseline.
#[derive(Clone, Debug)]
pub enum SldOutcome {
    Answer(Subst),
    Exhausted,
    FuelOut,
}

/// One coinductive branch closure: a descendant goal unified (occurs check
/// off) with an ancestor goal of the same coinductive predicate.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct LoopClosure {
    pub ancestor: Position,
    pub descendant: Position,
    pub bindings: BTreeMap<Var, Term>,
}

/// A loop-detection answer: per-variable values (rational where the loop
/// equations are cyclic), the resolvents applied, and the closures used.
#[derive(Clone, Debug)]
pub struct CoinductiveAnswer {
    pub answer: Vec<(Var, Resolved)>,
    pub resolvents: Vec<Subst>,
    pub loops: Vec<LoopClosure>,
}

/// Outcome of coinductive solving.
#[derive(Clone, Debug)]
pub enum ColpOutcome {
    /// The query succeeded outright, no loop needed.
    Refuted(Refutation),
    Coinductive(CoinductiveAnswer),
    Fail,
    /// The program failed the productivity gate, so loop detection would
    /// be unsound; the witness explains the non-terminating rewriting.
    NonProductiveRejected(LoopWitness),
    FuelOut,
}

/// A finite, sound observation of a (possibly infinite) answer.
#[derive(Clone, Debug)]
pub struct Observation {
    pub depth: usize,
    /// The instantiated query, truncated at the requested depth.
    pub approximation: Term,
    /// External resolvents spent growing the coinductive atoms.
    pub resolvents_used: usize,
    /// The still-open coinductive atoms left when observation stopped.
    pub residual: Vec<Term>,
    /// Query variables with their (untruncated) instantiations.
    pub bindings: Vec<(Var, Term)>,
}

/// Outcome of bounded observation.
#[derive(Clone, Debug)]
pub enum ObserveOutcome {
    Observed(Observation),
    NonProductiveRejected(LoopWitness),
    /// A residual atom admits neither another step nor a refutation; the
    /// derivation cannot be continued soundly past it.
    InductiveFailure(Term),
    FuelOut,
}

/// Per-goal evidence that a residual atom holds to the requested depth.
#[derive(Clone, Debug)]
pub enum Evidence {
    Refuted { answer: Subst },
    Loop { answer: Vec<(Var, Resolved)> },
    Observed { approximation: Term, resolvents_used: usize },
}

/// Why a query is supported at every observed depth: the rewriting prefix
/// and one piece of evidence per residual goal.
#[derive(Clone, Debug)]
pub struct ImpliedWitness {
    pub residual: Vec<Term>,
    pub rewrite_steps: usize,
    pub evidence: Vec<(Term, Evidence)>,
}

/// Outcome of the at-every-depth check. There is no inconclusive variant:
/// anything short of a full witness — including a failed productivity gate
/// or an exhausted budget — is a failure, optionally naming the residual
/// goal that could not be evidenced.
#[derive(Clone, Debug)]
pub enum ImpliedOutcome {
    Implied(ImpliedWitness),
    Fail(Option<Term>),
}

/// Composes a resolvent sequence (first applied innermost) and restricts
/// the result to the given variables.
fn fold_answer(resolvents: &[Subst], keep: &BTreeSet<Var>) -> Subst {
    let mut acc = Subst::id();
    for theta in resolvents {
        acc = Subst::compose(theta, &acc);
    }
    acc.restrict(keep)
}

fn initial_tree(p: &Arc<Program>, goal: &GoalClause) -> RewTree {
    match build_rew(p, &goal.to_clause(), &Subst::id(), TREE_BUDGET) {
        Ok(tree) => tree,
        Err(e) => e.partial,
    }
}

/// Result of one bounded depth-first pass.
enum Walk<T> {
    Found(T),
    /// The depth limit (or a tree frontier) cut the search short.
    CutOff,
    /// This subspace is fully explored and contains no success.
    Done,
    Fuel,
}

struct TransitionSearch {
    fuel: usize,
    deepest: Option<(usize, Box<RewTree>)>,
}

impl TransitionSearch {
    fn note(&mut self, depth: usize, tree: &RewTree) {
        let best = self.deepest.as_ref().map(|(d, _)| *d);
        if best.map_or(true, |d| depth > d) {
            self.deepest = Some((depth, Box::new(tree.clone())));
        }
    }

    fn spend(&mut self, amount: usize) -> bool {
        if self.fuel < amount {
            self.fuel = 0;
            return false;
        }
        self.fuel -= amount;
        true
    }

    /// Iterative-deepening driver: `check` inspects a tree for success;
    /// transitions are tried at every or-node variable in position order.
    fn run<T>(
        &mut self,
        root: &RewTree,
        check: &impl Fn(&RewTree, &[Subst]) -> Option<T>,
    ) -> Walk<T> {
        let mut limit = 0usize;
        loop {
            let mut path = Vec::new();
            match self.dfs(root, limit, &mut path, check) {
                Walk::CutOff => limit += 1,
                other => return other,
            }
            if self.fuel == 0 {
                return Walk::Fuel;
            }
        }
    }

    fn dfs<T>(
        &mut self,
        tree: &RewTree,
        remaining: usize,
        path: &mut Vec<Subst>,
        check: &impl Fn(&RewTree, &[Subst]) -> Option<T>,
    ) -> Walk<T> {
        if !self.spend(1) {
            return Walk::Fuel;
        }
        if let Some(found) = check(tree, path) {
            return Walk::Found(found);
        }
        let or_vars = tree.or_vars();
        if remaining == 0 {
            return if tree.is_complete() && or_vars.is_empty() {
                Walk::Done
            } else {
                Walk::CutOff
            };
        }
        let mut cut = !tree.is_complete();
        for (_, x) in or_vars {
            if !self.spend(1) {
                return Walk::Fuel;
            }
            match tree.transition(x) {
                TreeTransition::Empty => {}
                TreeTransition::Step { resolvent, tree: next } => {
                    path.push(resolvent);
                    self.note(path.len(), &next);
                    let walk = self.dfs(&next, remaining - 1, path, check);
                    path.pop();
                    match walk {
                        Walk::Found(found) => return Walk::Found(found),
                        Walk::CutOff => cut = true,
                        Walk::Done => {}
                        Walk::Fuel => return Walk::Fuel,
                    }
                }
            }
        }
        if cut {
            Walk::CutOff
        } else {
            Walk::Done
        }
    }
}

/// Searches for a refutation of the goal by iterative deepening over tree
/// transitions, or-node variables tried in position order within each
/// tree. The first tree admitting a success subtree wins.
pub fn s_refute_goal(p: &Arc<Program>, goal: &GoalClause, fuel: usize) -> SRefuteOutcome {
    let root = initial_tree(p, goal);
    let query_vars = goal.vars();
    let mut search = TransitionSearch { fuel, deepest: None };
    search.note(0, &root);
    let check = |tree: &RewTree, path: &[Subst]| {
        tree.find_success_subtree().map(|_| Refutation {
            resolvents: path.to_vec(),
            final_tree: tree.clone(),
            answer: fold_answer(path, &query_vars),
        })
    };
    match search.run(&root, &check) {
        Walk::Found(r) => SRefuteOutcome::Refuted(r),
        Walk::Done => SRefuteOutcome::Exhausted,
        Walk::Fuel | Walk::CutOff => {
            SRefuteOutcome::FuelOut(search.deepest.map(|(_, tree)| tree))
        }
    }
}

/// Single-atom form of [`s_refute_goal`].
pub fn s_refute(p: &Arc<Program>, t: &Term, fuel: usize) -> SRefuteOutcome {
    s_refute_goal(p, &GoalClause::new(vec![t.clone()]), fuel)
}

/// The variables a derivation must not capture: everything visible in the
/// goal, the accumulated answer, or the original query.
fn derivation_used(goal: &[Term], acc: &Subst, query_vars: &BTreeSet<Var>) -> BTreeSet<Var> {
    let mut used = query_vars.clone();
    for t in goal {
        t.collect_vars(&mut used);
    }
    for (v, t) in acc.iter() {
        used.insert(v.clone());
        t.collect_vars(&mut used);
    }
    used
}

struct SldSearch {
    fuel: usize,
    query_vars: BTreeSet<Var>,
    supply: VarSupply,
}

impl SldSearch {
    fn dfs(&mut self, p: &Program, goal: &[Term], acc: &Subst, remaining: usize) -> Walk<Subst> {
        if self.fuel == 0 {
            return Walk::Fuel;
        }
        self.fuel -= 1;
        if goal.is_empty() {
            return Walk::Found(acc.restrict(&self.query_vars));
        }
        if remaining == 0 {
            return Walk::CutOff;
        }
        let used = derivation_used(goal, acc, &self.query_vars);
        let mut cut = false;
        for clause in p.clauses() {
            let c = rename_clause_lazy(clause, &used, &mut self.supply);
            let sigma = match mgu(&c.head, &goal[0], true) {
                Some(UnifyOutcome::Unifier(sigma)) => sigma,
                Some(UnifyOutcome::Rational(_)) => unreachable!("occurs check is on"),
                None => continue,
            };
            let mut next: Vec<Term> = Vec::with_capacity(goal.len() + c.body.len() - 1);
            next.extend(c.body.iter().cloned());
            next.extend_from_slice(&goal[1..]);
            let next = sigma.apply_goal(&next);
            let acc_next = Subst::compose(&sigma.restrict(&used), acc);
            match self.dfs(p, &next, &acc_next, remaining - 1) {
                Walk::Found(answer) => return Walk::Found(answer),
                Walk::CutOff => cut = true,
                Walk::Done => {}
                Walk::Fuel => return Walk::Fuel,
            }
        }
        if cut {
            Walk::CutOff
        } else {
            Walk::Done
        }
    }
}

/// Standard SLD resolution (leftmost atom, clause order) under iterative
/// deepening; the baseline the tree-based engine is checked against.
pub fn sld_solve_goal(p: &Program, goal: &GoalClause, fuel: usize) -> SldOutcome {
    let mut search = SldSearch {
        fuel,
        query_vars: goal.vars(),
        supply: VarSupply::new(),
    };
    let mut limit = 0usize;
    loop {
        match search.dfs(p, &goal.body, &Subst::id(), limit) {
            Walk::Found(answer) => return SldOutcome::Answer(answer),
            Walk::Done => return SldOutcome::Exhausted,
            Walk::Fuel => return SldOutcome::FuelOut,
            Walk::CutOff => limit += 1,
        }
        if search.fuel == 0 {
            return SldOutcome::FuelOut;
        }
    }
}

/// Single-atom form of [`sld_solve_goal`].
pub fn sld_solve(p: &Program, t: &Term, fuel: usize) -> SldOutcome {
    sld_solve_goal(p, &GoalClause::new(vec![t.clone()]), fuel)
}

/// Deterministic SLD (leftmost atom, first unifying clause, no
/// backtracking) run until the binding of `v` has no variable above the
/// requested depth, then truncated there. Used to cross-check rational
/// answers: the loop answer's unfolding must agree with what plain SLD
/// computes step by step.
pub fn sld_partial_answer(
    p: &Program,
    t: &Term,
    v: &Var,
    depth: usize,
    fuel: usize,
) -> Option<Term> {
    let query_vars = t.vars();
    let mut goal: Vec<Term> = vec![t.clone()];
    let mut acc = Subst::id();
    let mut supply = VarSupply::new();
    let mut fuel_left = fuel;
    loop {
        let current = acc.apply(&Term::Var(v.clone()));
        if !current.has_var_above_depth(depth) {
            return Some(truncate(depth, &current));
        }
        if goal.is_empty() || fuel_left == 0 {
            return None;
        }
        fuel_left -= 1;
        let used = derivation_used(&goal, &acc, &query_vars);
        let mut stepped = false;
        for clause in p.clauses() {
            let c = rename_clause_lazy(clause, &used, &mut supply);
            if let Some(UnifyOutcome::Unifier(sigma)) = mgu(&c.head, &goal[0], true) {
                let mut next: Vec<Term> = Vec::with_capacity(goal.len() + c.body.len() - 1);
                next.extend(c.body.iter().cloned());
                next.extend_from_slice(&goal[1..]);
                goal = sigma.apply_goal(&next);
                acc = Subst::compose(&sigma.restrict(&used), &acc);
                stepped = true;
                break;
            }
        }
        if !stepped {
            return None;
        }
    }
}

/// Walks a tree looking for a coinductive success subtree: every clause
/// node needs all children to succeed; a term node succeeds through some
/// clause child (lowest index first), or — when its predicate is
/// coinductive — by unifying (occurs check off) with an ancestor term node
/// of the same predicate on its root path.
fn coinductive_success(tree: &RewTree, ty: &TypingFunction) -> Option<Vec<LoopClosure>> {
    let frontier: BTreeSet<Position> = tree.frontier_positions().into_iter().collect();
    success_clause(tree, ty, &frontier, &Position::root())
}

fn success_clause(
    tree: &RewTree,
    ty: &TypingFunction,
    frontier: &BTreeSet<Position>,
    pos: &Position,
) -> Option<Vec<LoopClosure>> {
    if frontier.contains(pos) {
        return None;
    }
    let clause = match tree.node(pos) {
        Some(RewNode::Clause(c)) => c.clone(),
        _ => return None,
    };
    let mut loops = Vec::new();
    for j in 0..clause.body.len() {
        loops.extend(success_term(tree, ty, frontier, &pos.child(j))?);
    }
    Some(loops)
}

fn success_term(
    tree: &RewTree,
    ty: &TypingFunction,
    frontier: &BTreeSet<Position>,
    pos: &Position,
) -> Option<Vec<LoopClosure>> {
    if frontier.contains(pos) {
        return None;
    }
    let term = match tree.node(pos) {
        Some(RewNode::Term(t)) => t.clone(),
        _ => return None,
    };
    for j in 0..tree.program().arity() {
        let child = pos.child(j);
        if matches!(tree.node(&child), Some(RewNode::Clause(_))) {
            if let Some(loops) = success_clause(tree, ty, frontier, &child) {
                return Some(loops);
            }
        }
    }
    let predicate = match term.functor() {
        Some((name, _)) if ty.is_coinductive(name) => name.to_string(),
        _ => return None,
    };
    // Nearest coinductive ancestor of the same predicate that unifies
    // without the occurs check closes the branch.
    let mut up = pos.parent();
    while let Some(q) = up {
        if let Some(RewNode::Term(ancestor)) = tree.node(&q) {
            if ancestor.functor().map(|(name, _)| name) == Some(predicate.as_str()) {
                if let Some(outcome) = mgu(ancestor, &term, false) {
                    let bindings = match outcome {
                        UnifyOutcome::Unifier(s) => {
                            s.iter().map(|(v, t)| (v.clone(), t.clone())).collect()
                        }
                        UnifyOutcome::Rational(rb) => rb.bindings,
                    };
                    return Some(vec![LoopClosure {
                        ancestor: q,
                        descendant: pos.clone(),
                        bindings,
                    }]);
                }
            }
        }
        up = q.parent();
    }
    None
}

/// Loop-detection search without the productivity gate: shared by the
/// gated public entry point and by evidence collection, which gates once
/// up front.
fn colp_search(p: &Arc<Program>, goal: &GoalClause, ty: &TypingFunction, fuel: usize) -> ColpOutcome {
    let root = initial_tree(p, goal);
    let query_vars = goal.vars();
    let mut search = TransitionSearch { fuel, deepest: None };
    let check = |tree: &RewTree, path: &[Subst]| {
        coinductive_success(tree, ty).map(|loops| (tree.clone(), path.to_vec(), loops))
    };
    match search.run(&root, &check) {
        Walk::Found((final_tree, resolvents, loops)) => {
            let answer = fold_answer(&resolvents, &query_vars);
            if loops.is_empty() {
                return ColpOutcome::Refuted(Refutation { resolvents, final_tree, answer });
            }
            let mut equations: BTreeMap<Var, Term> = BTreeMap::new();
            for closure in &loops {
                equations.extend(closure.bindings.clone());
            }
            let mut resolved = Vec::new();
            for v in &query_vars {
                let value = match answer.get(v) {
                    Some(t0) => resolve_binding(v, t0, &equations),
                    None => match equations.get(v) {
                        Some(t0) => resolve_binding(v, t0, &equations),
                        None => Resolved::Finite(Term::Var(v.clone())),
                    },
                };
                resolved.push((v.clone(), value));
            }
            ColpOutcome::Coinductive(CoinductiveAnswer {
                answer: resolved,
                resolvents,
                loops,
            })
        }
        Walk::Done => ColpOutcome::Fail,
        Walk::Fuel | Walk::CutOff => ColpOutcome::FuelOut,
    }
}

/// Coinductive solving: the program must first pass the observational
/// productivity gate (loop detection over a non-productive program is
/// unsound); then transition search runs with coinductive branch closure.
pub fn colp_solve_goal(
    p: &Arc<Program>,
    goal: &GoalClause,
    ty: &TypingFunction,
    fuel: usize,
) -> ColpOutcome {
    match productivity_check(p, fuel) {
        ProductivityVerdict::Productive => {}
        ProductivityVerdict::NonProductive(w) => return ColpOutcome::NonProductiveRejected(w),
        ProductivityVerdict::Unknown { .. } => return ColpOutcome::FuelOut,
    }
    colp_search(p, goal, ty, fuel)
}

/// Single-atom form of [`colp_solve_goal`].
pub fn colp_s_solve(p: &Arc<Program>, t: &Term, ty: &TypingFunction, fuel: usize) -> ColpOutcome {
    colp_solve_goal(p, &GoalClause::new(vec![t.clone()]), ty, fuel)
}

/// One external resolvent for a normal-form atom: the lowest-index clause
/// whose head unifies (occurs check on) with it. `None` when some clause
/// head *matches* the atom (it is not in normal form — rewrite first) or
/// when no head unifies at all (the atom is dead).
fn external_resolvent(
    p: &Program,
    atom: &Term,
    used: &BTreeSet<Var>,
    supply: &mut VarSupply,
) -> Option<Subst> {
    for clause in p.clauses() {
        let c = rename_clause_lazy(clause, used, supply);
        if mgm(&c.head, atom).is_some() {
            return None;
        }
        if let Some(UnifyOutcome::Unifier(sigma)) = mgu(&c.head, atom, true) {
            return Some(sigma);
        }
    }
    None
}

fn atom_is_alive(p: &Program, atom: &Term, supply: &mut VarSupply) -> bool {
    let used = atom.vars();
    for clause in p.clauses() {
        let c = rename_clause_lazy(clause, &used, supply);
        if mgu(&c.head, atom, true).is_some() {
            return true;
        }
    }
    false
}

/// Observation without the productivity gate (see [`observe`]).
fn observe_ungated(
    p: &Arc<Program>,
    t: &Term,
    ty: &TypingFunction,
    depth: usize,
    fuel: usize,
) -> ObserveOutcome {
    assert!(depth >= 1, "observation depth must be at least 1");
    let query_vars = t.vars();
    let mut goal: Vec<Term> = vec![t.clone()];
    let mut acc = Subst::id();
    let mut supply = VarSupply::new();
    let mut resolvents_used = 0usize;
    let mut fuel_left = fuel;

    loop {
        // Rewriting binds no goal variables and inductively closes what it
        // can; a runaway reduction here means fuel ran out (the gate, when
        // used, rules out genuine non-termination).
        let (nf, steps) = match rewrite_normal_form(p, &goal, fuel_left, &mut supply) {
            Ok(result) => result,
            Err(_) => return ObserveOutcome::FuelOut,
        };
        fuel_left = fuel_left.saturating_sub(steps);
        goal = nf;

        // Inductive residual atoms must be refuted — their answers feed the
        // coinductive atoms they share variables with. An atom admitting no
        // refutation poisons every extension of this derivation.
        let mut index = 0;
        while index < goal.len() {
            let atom = goal[index].clone();
            let coinductive = atom
                .functor()
                .map(|(name, _)| ty.is_coinductive(name))
                .unwrap_or(false);
            if coinductive {
                index += 1;
                continue;
            }
            match sld_solve(p, &atom, fuel_left) {
                SldOutcome::Answer(theta) => {
                    goal.remove(index);
                    goal = theta.apply_goal(&goal);
                    acc = Subst::compose(&theta, &acc);
                }
                SldOutcome::Exhausted => return ObserveOutcome::InductiveFailure(atom),
                SldOutcome::FuelOut => return ObserveOutcome::FuelOut,
            }
        }

        // Every remaining atom is coinductive and must still be open:
        // a dead atom falsifies the whole derivation.
        for atom in &goal {
            if !atom_is_alive(p, atom, &mut supply) {
                return ObserveOutcome::InductiveFailure(atom.clone());
            }
        }

        let current = acc.apply(t);
        if !current.has_var_above_depth(depth) {
            let bindings = query_vars
                .iter()
                .map(|v| (v.clone(), acc.apply(&Term::Var(v.clone()))))
                .collect();
            return ObserveOutcome::Observed(Observation {
                depth,
                approximation: truncate(depth, &current),
                resolvents_used,
                residual: goal,
                bindings,
            });
        }

        // Fairness: every open atom takes one external resolvent per
        // round. An atom a sibling's resolvent made matchable again is
        // skipped here; the next round's rewriting picks it up.
        let mut progressed = false;
        for index in 0..goal.len() {
            let atom = goal[index].clone();
            let used = derivation_used(&goal, &acc, &query_vars);
            let sigma = match external_resolvent(p, &atom, &used, &mut supply) {
                Some(sigma) => sigma,
                None => continue,
            };
            if fuel_left == 0 {
                return ObserveOutcome::FuelOut;
            }
            fuel_left -= 1;
            resolvents_used += 1;
            progressed = true;
            goal = sigma.apply_goal(&goal);
            acc = Subst::compose(&sigma.restrict(&used), &acc);
        }
        if !progressed {
            // Nothing advanced and the depth is not reached: every atom
            // was re-made matchable — rewriting will advance — or the goal
            // is empty with free variables left, which no further step can
            // instantiate.
            if goal.is_empty() {
                return ObserveOutcome::FuelOut;
            }
        }
        if fuel_left == 0 {
            return ObserveOutcome::FuelOut;
        }
        fuel_left -= 1;
    }
}

/// Observes the query to the requested depth: rewriting closes inductive
/// structure, inductive residual atoms are refuted, and the open
/// coinductive atoms are grown fairly (round-robin, one external resolvent
/// each) until the instantiated query has no variable above the depth. The
/// result is the truncation of that instantiation — a sound finite
/// fragment of a possibly infinite answer. Gated by productivity, like all
/// coinductive reasoning here.
pub fn observe(
    p: &Arc<Program>,
    t: &Term,
    ty: &TypingFunction,
    depth: usize,
    fuel: usize,
) -> ObserveOutcome {
    match productivity_check(p, fuel) {
        ProductivityVerdict::Productive => {}
        ProductivityVerdict::NonProductive(w) => return ObserveOutcome::NonProductiveRejected(w),
        ProductivityVerdict::Unknown { .. } => return ObserveOutcome::FuelOut,
    }
    observe_ungated(p, t, ty, depth, fuel)
}

/// Budget for the refutation attempt on each residual goal.
const EVIDENCE_REFUTE_FUEL: usize = 400;
/// Budget for the loop-detection attempt on each residual goal.
const EVIDENCE_LOOP_FUEL: usize = 200;

/// Checks that the query is supported at the observed depth: the query is
/// rewritten to its normal form, and every residual atom must produce
/// evidence — a refutation, a coinductive loop answer, or an observation
/// at the given depth. A failed productivity gate, a runaway rewriting, or
/// an unevidenced atom all yield `Fail` (naming the atom when there is
/// one).
pub fn implied_at_infinity(
    p: &Arc<Program>,
    t: &Term,
    ty: &TypingFunction,
    depth: usize,
    fuel: usize,
) -> ImpliedOutcome {
    if !productivity_check(p, fuel).is_productive() {
        return ImpliedOutcome::Fail(None);
    }
    let mut supply = VarSupply::new();
    let (residual, rewrite_steps) =
        match rewrite_normal_form(p, &[t.clone()], fuel, &mut supply) {
            Ok(result) => result,
            Err(_) => return ImpliedOutcome::Fail(None),
        };
    let mut evidence = Vec::new();
    for atom in &residual {
        if let SRefuteOutcome::Refuted(r) = s_refute(p, atom, EVIDENCE_REFUTE_FUEL.min(fuel)) {
            evidence.push((atom.clone(), Evidence::Refuted { answer: r.answer }));
            continue;
        }
        let loop_goal = GoalClause::new(vec![atom.clone()]);
        if let ColpOutcome::Coinductive(ca) =
            colp_search(p, &loop_goal, ty, EVIDENCE_LOOP_FUEL.min(fuel))
        {
            evidence.push((atom.clone(), Evidence::Loop { answer: ca.answer }));
            continue;
        }
        if let ObserveOutcome::Observed(o) = observe_ungated(p, atom, ty, depth, fuel) {
            evidence.push((
                atom.clone(),
                Evidence::Observed {
                    approximation: o.approximation,
                    resolvents_used: o.resolvents_used,
                },
            ));
            continue;
        }
        return ImpliedOutcome::Fail(Some(atom.clone()));
    }
    ImpliedOutcome::Implied(ImpliedWitness { residual, rewrite_steps, evidence })
}
