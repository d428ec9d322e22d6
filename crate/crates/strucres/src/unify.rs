//! Unification, matching, and the bookkeeping around variable renaming.
//!
//! Three operations drive the whole engine:
//!
//! * [`mgm`] — most general matcher: instantiates only the pattern, so a
//!   clause head can be laid onto a goal atom without touching the goal's
//!   variables.
//! * [`mgu`] — most general unifier, with the occurs check switchable.
//!   Without the check, cyclic bindings such as `X ↦ scons(0, X)` are legal
//!   and are reported as [`RationalBindings`] instead of a substitution.
//! * [`resolvent`] — classifies a clause head against a goal atom as
//!   matchable, merely unifiable, or neither, which is exactly the split
//!   between rewriting steps and substitution steps.
//!
//! Renaming keeps source names readable: a renamed `X` becomes `X_17`, and
//! the lazy variant renames only the clause variables that would clash with
//! the goal, so reported answers keep the clause's own variable names
//! whenever possible.

use std::collections::{BTreeMap, BTreeSet};

use crate::program::Clause;
use crate::rational::RationalBindings;
use crate::subst::Subst;
use crate::term::{Term, Var};

/// A successful unification: an idempotent substitution when the binding
/// graph is acyclic, and a triangular cyclic system otherwise (only
/// possible with the occurs check disabled).
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum UnifyOutcome {
    Unifier(Subst),
    Rational(RationalBindings),
}

/// Follows variable bindings at the root until an application or an unbound
/// variable appears.
fn walk<'a>(store: &'a BTreeMap<Var, Term>, mut t: &'a Term) -> &'a Term {
    while let Term::Var(v) = t {
        match store.get(v) {
            Some(next) => t = next,
            None => break,
        }
    }
    t
}

/// Occurs check through the binding store.
fn occurs(store: &BTreeMap<Var, Term>, x: &Var, t: &Term) -> bool {
    match walk(store, t) {
        Term::Var(v) => v == x,
        Term::App(_, args) => args.iter().any(|a| occurs(store, x, a)),
    }
}

/// Ordering key that makes renamed variables bind to source variables:
/// fresh generations are greater, so they point at older names and answers
/// read off in the goal's vocabulary.
fn var_key(v: &Var) -> (u64, &str) {
    (v.gen, v.name.as_str())
}

/// Most general unifier of `a` and `b`. With `occurs_check` the result is
/// an idempotent [`Subst`]; without it, cyclic solutions are permitted and
/// a cyclic solution is returned as [`RationalBindings`]. `None` means the
/// terms do not unify at all.
pub fn mgu(a: &Term, b: &Term, occurs_check: bool) -> Option<UnifyOutcome> {
    let mut store: BTreeMap<Var, Term> = BTreeMap::new();
    let mut stack: Vec<(Term, Term)> = vec![(a.clone(), b.clone())];
    // Pairs already processed; revisiting one is consistent by assumption.
    // This is what makes unification over cyclic stores terminate.
    let mut seen: BTreeSet<(Term, Term)> = BTreeSet::new();

    while let Some((s, t)) = stack.pop() {
        let s = walk(&store, &s).clone();
        let t = walk(&store, &t).clone();
        if s == t {
            continue;
        }
        if !occurs_check && !seen.insert((s.clone(), t.clone())) {
            continue;
        }
        match (s, t) {
            (Term::Var(x), Term::Var(y)) => {
                if var_key(&x) > var_key(&y) {
                    store.insert(x, Term::Var(y));
                } else {
                    store.insert(y, Term::Var(x));
                }
            }
            (Term::Var(x), t) | (t, Term::Var(x)) => {
                if occurs_check && occurs(&store, &x, &t) {
                    return None;
                }
                store.insert(x, t);
            }
            (Term::App(f, fa), Term::App(g, ga)) => {
                if f != g || fa.len() != ga.len() {
                    return None;
                }
                for pair in fa.into_iter().zip(ga) {
                    stack.push(pair);
                }
            }
        }
    }

    let cyclic: BTreeSet<Var> = store
        .keys()
        .filter(|v| reaches_itself(&store, v))
        .cloned()
        .collect();

    if cyclic.is_empty() {
        let resolved = store
            .keys()
            .map(|v| (v.clone(), resolve_opaque(&store, &cyclic, &Term::Var(v.clone()))))
            .collect();
        Some(UnifyOutcome::Unifier(resolved))
    } else {
        let bindings = store
            .iter()
            .map(|(v, t)| (v.clone(), resolve_opaque(&store, &cyclic, t)))
            .collect();
        Some(UnifyOutcome::Rational(RationalBindings { bindings, cyclic }))
    }
}

/// Whether `v`'s binding chain can reach `v` again.
fn reaches_itself(store: &BTreeMap<Var, Term>, v: &Var) -> bool {
    let mut work: Vec<Var> = match store.get(v) {
        Some(t) => t.vars().into_iter().collect(),
        None => return false,
    };
    let mut seen: BTreeSet<Var> = BTreeSet::new();
    while let Some(w) = work.pop() {
        if w == *v {
            return true;
        }
        if seen.insert(w.clone()) {
            if let Some(t) = store.get(&w) {
                work.extend(t.vars());
            }
        }
    }
    false
}

/// Fully resolves a term through the store, leaving cyclic variables in
/// place as names for their infinite values.
fn resolve_opaque(store: &BTreeMap<Var, Term>, cyclic: &BTreeSet<Var>, t: &Term) -> Term {
    match t {
        Term::Var(v) => {
            if cyclic.contains(v) {
                Term::Var(v.clone())
            } else {
                match store.get(v) {
                    Some(next) => resolve_opaque(store, cyclic, next),
                    None => Term::Var(v.clone()),
                }
            }
        }
        Term::App(f, args) => Term::App(
            f.clone(),
            args.iter().map(|a| resolve_opaque(store, cyclic, a)).collect(),
        ),
    }
}

/// Most general matcher: a substitution `θ` over the pattern's variables
/// with `θ(pattern) = subject`, or `None`. The subject is never
/// instantiated — a subject variable facing a pattern application is a
/// mismatch, not a binding.
pub fn mgm(pattern: &Term, subject: &Term) -> Option<Subst> {
    // Identity bindings must stay visible while matching (a pattern
    // variable may legitimately match itself when pattern and subject share
    // names), so use a raw map rather than `Subst`.
    let mut store: BTreeMap<Var, Term> = BTreeMap::new();
    let mut stack: Vec<(&Term, &Term)> = vec![(pattern, subject)];
    while let Some((p, s)) = stack.pop() {
        match p {
            Term::Var(v) => match store.get(v) {
                Some(prev) => {
                    if prev != s {
                        return None;
                    }
                }
                None => {
                    store.insert(v.clone(), s.clone());
                }
            },
            Term::App(f, fa) => match s {
                Term::Var(_) => return None,
                Term::App(g, ga) => {
                    if f != g || fa.len() != ga.len() {
                        return None;
                    }
                    stack.extend(fa.iter().zip(ga.iter()));
                }
            },
        }
    }
    Some(store.into_iter().collect())
}

/// How a clause head relates to a goal atom: matchable (internal
/// resolvent), merely unifiable (external resolvent), or neither.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum ResolventKind {
    Null,
    Internal(Subst),
    External(Subst),
}

/// Classifies `head` against `goal_atom`: matching is tried first, then
/// unification with occurs check.
pub fn resolvent(head: &Term, goal_atom: &Term) -> ResolventKind {
    if let Some(theta) = mgm(head, goal_atom) {
        return ResolventKind::Internal(theta);
    }
    match mgu(head, goal_atom, true) {
        Some(UnifyOutcome::Unifier(sigma)) => ResolventKind::External(sigma),
        Some(UnifyOutcome::Rational(_)) => unreachable!("occurs check excludes cyclic solutions"),
        None => ResolventKind::Null,
    }
}

/// Source of fresh renaming generations; each renaming event takes one
/// generation, shared by all variables it renames.
#[derive(Clone, Debug)]
pub struct VarSupply {
    next_gen: u64,
}

impl VarSupply {
    pub fn new() -> VarSupply {
        VarSupply { next_gen: 1 }
    }

    pub fn fresh_gen(&mut self) -> u64 {
        let g = self.next_gen;
        self.next_gen += 1;
        g
    }
}

impl Default for VarSupply {
    fn default() -> Self {
        VarSupply::new()
    }
}

fn rename_term(t: &Term, renaming: &BTreeMap<Var, Var>) -> Term {
    match t {
        Term::Var(v) => match renaming.get(v) {
            Some(w) => Term::Var(w.clone()),
            None => t.clone(),
        },
        Term::App(f, args) => Term::App(
            f.clone(),
            args.iter().map(|a| rename_term(a, renaming)).collect(),
        ),
    }
}

fn rename_clause(c: &Clause, renaming: &BTreeMap<Var, Var>) -> Clause {
    Clause {
        head: rename_term(&c.head, renaming),
        body: c.body.iter().map(|t| rename_term(t, renaming)).collect(),
    }
}

/// Renames every variable of the clause with one fresh generation, so `X`
/// becomes e.g. `X_17` throughout.
pub fn rename_apart(c: &Clause, supply: &mut VarSupply) -> Clause {
    let gen = supply.fresh_gen();
    let renaming = c
        .vars()
        .into_iter()
        .map(|v| (v.clone(), Var::with_gen(v.name.clone(), gen)))
        .collect();
    rename_clause(c, &renaming)
}

/// Renames only the clause variables that occur in `used`, keeping the rest
/// verbatim so answers stay in the clause's own vocabulary. The chosen
/// generation is re-checked against `used` and the clause's untouched
/// variables, bumping to the next generation on a clash.
pub fn rename_clause_lazy(c: &Clause, used: &BTreeSet<Var>, supply: &mut VarSupply) -> Clause {
    let vars = c.vars();
    let colliding: Vec<&Var> = vars.iter().filter(|v| used.contains(*v)).collect();
    if colliding.is_empty() {
        return c.clone();
    }
    loop {
        let gen = supply.fresh_gen();
        let renaming: BTreeMap<Var, Var> = colliding
            .iter()
            .map(|v| ((*v).clone(), Var::with_gen(v.name.clone(), gen)))
            .collect();
        let clash = renaming
            .values()
            .any(|w| used.contains(w) || (vars.contains(w) && !renaming.contains_key(w)));
        if !clash {
            return rename_clause(c, &renaming);
        }
    }
}

/// Whether two terms are equal up to a bijective renaming of variables.
pub fn variant(a: &Term, b: &Term) -> bool {
    let mut ab: BTreeMap<&Var, &Var> = BTreeMap::new();
    let mut ba: BTreeMap<&Var, &Var> = BTreeMap::new();
    variant_rec(a, b, &mut ab, &mut ba)
}

fn variant_rec<'a>(
    a: &'a Term,
    b: &'a Term,
    ab: &mut BTreeMap<&'a Var, &'a Var>,
    ba: &mut BTreeMap<&'a Var, &'a Var>,
) -> bool {
    match (a, b) {
        (Term::Var(x), Term::Var(y)) => {
            let fwd = *ab.entry(x).or_insert(y);
            let bwd = *ba.entry(y).or_insert(x);
            fwd == y && bwd == x
        }
        (Term::App(f, fa), Term::App(g, ga)) => {
            f == g
                && fa.len() == ga.len()
                && fa.iter().zip(ga).all(|(s, t)| variant_rec(s, t, ab, ba))
        }
        _ => false,
    }
}

/// Homeomorphic embedding of `s` into `t`: `s` appears in `t` after
/// deleting some of `t`'s structure. Used as a growth whistle when
/// exploring rewriting chains.
pub fn embeds(s: &Term, t: &Term) -> bool {
    match (s, t) {
        (Term::Var(_), Term::Var(_)) => true,
        (Term::Var(_), Term::App(_, args)) => args.iter().any(|a| embeds(s, a)),
        (Term::App(_, _), Term::Var(_)) => false,
        (Term::App(f, fa), Term::App(g, ga)) => {
            let couple = f == g
                && fa.len() == ga.len()
                && fa.iter().zip(ga).all(|(a, b)| embeds(a, b));
            couple || ga.iter().any(|b| embeds(s, b))
        }
    }
}
