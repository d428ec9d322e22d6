//! Rational (finitely describable infinite) terms.
//!
//! A cyclic system of equations such as `X = scons(0, X)` denotes a unique
//! infinite tree. This module represents such trees as a root variable plus
//! an equation per named variable, provides finite observation of them
//! ([`RationalTerm::unfold`]), and resolves the triangular variable bindings
//! produced by unification without occurs check into either an ordinary
//! finite term or a minimal equation system ([`resolve_binding`]).
//! Minimality comes from a bisimulation quotient: systems denoting the same
//! tree resolve to the same equations up to the choice of variable names.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::term::{Term, Var};

/// An infinite tree given by a root variable and one defining equation per
/// bound variable. The root always has an equation; further equations
/// appear only when distinct cycles need distinct names.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct RationalTerm {
    pub root: Var,
    pub equations: BTreeMap<Var, Term>,
}

impl RationalTerm {
    /// Observes the first `n` levels of the denoted tree: the result equals
    /// the depth-`n` truncation of the infinite unfolding. Following a
    /// variable to its equation consumes no depth, because the variable is
    /// not a node of the denoted tree.
    pub fn unfold(&self, n: usize) -> Term {
        self.unfold_term(&Term::Var(self.root.clone()), n)
    }

    fn unfold_term(&self, t: &Term, remaining: usize) -> Term {
        match t {
            Term::Var(v) => match self.equations.get(v) {
                Some(rhs) => self.unfold_term(rhs, remaining),
                None => Term::Var(v.clone()),
            },
            Term::App(_, _) if remaining == 0 => Term::diamond(),
            Term::App(f, args) => {
                let kids = args
                    .iter()
                    .map(|a| self.unfold_term(a, remaining - 1))
                    .collect();
                Term::App(f.clone(), kids)
            }
        }
    }
}

impl fmt::Display for RationalTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let root_rhs = self
            .equations
            .get(&self.root)
            .expect("rational term root must be bound by an equation");
        write!(f, "{} = {}", self.root, root_rhs)?;
        let rest: Vec<String> = self
            .equations
            .iter()
            .filter(|(v, _)| **v != self.root)
            .map(|(v, t)| format!("{} = {}", v, t))
            .collect();
        if !rest.is_empty() {
            write!(f, " where {}", rest.join(", "))?;
        }
        Ok(())
    }
}

/// Variable bindings produced by unification without occurs check. The
/// bindings are triangular rather than idempotent: a bound variable may
/// occur inside its own binding, directly or through other bindings; the
/// set of such variables is recorded in `cyclic`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct RationalBindings {
    pub bindings: BTreeMap<Var, Term>,
    pub cyclic: BTreeSet<Var>,
}

impl RationalBindings {
    /// Resolves one variable of the system to a finite or rational term.
    pub fn resolve(&self, v: &Var) -> Resolved {
        match self.bindings.get(v) {
            None => Resolved::Finite(Term::Var(v.clone())),
            Some(t0) => resolve_binding(v, t0, &self.bindings),
        }
    }
}

/// A variable's value under an equation system.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Resolved {
    Finite(Term),
    Rational(RationalTerm),
}

impl fmt::Display for Resolved {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Resolved::Finite(t) => write!(f, "{}", t),
            Resolved::Rational(r) => write!(f, "{}", r),
        }
    }
}

/// A node of the tree automaton induced by an equation system: either a
/// function application or a free (unbound) variable.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug)]
enum Node {
    App(String, Vec<Term>),
    Free(Var),
}

/// Resolves `v = t0` under the additional equations `eqs` (an entry for `v`
/// inside `eqs` is ignored in favour of `t0`). Returns the finite term when
/// no cycle is reachable from `v`, and otherwise a minimal equation system
/// rooted at `v`.
pub fn resolve_binding(v: &Var, t0: &Term, eqs: &BTreeMap<Var, Term>) -> Resolved {
    let mut system: BTreeMap<Var, Term> = eqs.clone();
    system.insert(v.clone(), t0.clone());

    // Dereference a term to the automaton node it denotes, following
    // variable equations. A pure-variable cycle constrains nothing, so it
    // collapses to its least variable, kept free.
    let deref = |start: &Term| -> Node {
        let mut t = start.clone();
        let mut seen: BTreeSet<Var> = BTreeSet::new();
        loop {
            match t {
                Term::App(f, args) => return Node::App(f, args),
                Term::Var(w) => {
                    if !seen.insert(w.clone()) {
                        let least = seen
                            .iter()
                            .filter(|u| reaches_var(&system, u, &w))
                            .min()
                            .cloned()
                            .unwrap_or(w);
                        return Node::Free(least);
                    }
                    match system.get(&w) {
                        Some(rhs) => t = rhs.clone(),
                        None => return Node::Free(w),
                    }
                }
            }
        }
    };

    // Collect the nodes reachable from the root, with child edges.
    let root = deref(&Term::Var(v.clone()));
    let mut nodes: Vec<Node> = Vec::new();
    let mut index: BTreeMap<Node, usize> = BTreeMap::new();
    let mut children: Vec<Vec<usize>> = Vec::new();
    let mut work = vec![root.clone()];
    index.insert(root.clone(), 0);
    nodes.push(root.clone());
    children.push(Vec::new());
    while let Some(node) = work.pop() {
        let id = index[&node];
        if let Node::App(_, args) = &node {
            let mut kids = Vec::with_capacity(args.len());
            for arg in args {
                let child = deref(arg);
                let cid = match index.get(&child) {
                    Some(&cid) => cid,
                    None => {
                        let cid = nodes.len();
                        index.insert(child.clone(), cid);
                        nodes.push(child.clone());
                        children.push(Vec::new());
                        work.push(child);
                        cid
                    }
                };
                kids.push(cid);
            }
            children[id] = kids;
        }
    }

    // Finite case: the node graph is acyclic, so the tree can be expanded.
    if !has_cycle(&children) {
        let mut memo: BTreeMap<usize, Term> = BTreeMap::new();
        return Resolved::Finite(expand_finite(0, &nodes, &children, &mut memo));
    }

    // Bisimulation quotient: start from the node labels and refine by child
    // classes until stable.
    let label = |n: &Node| -> (u8, String, usize) {
        match n {
            Node::App(f, args) => (0, f.clone(), args.len()),
            Node::Free(w) => (1, w.to_string(), 0),
        }
    };
    let mut class: Vec<usize> = {
        let mut by_label: BTreeMap<(u8, String, usize), usize> = BTreeMap::new();
        let mut out = Vec::with_capacity(nodes.len());
        for n in &nodes {
            let next = by_label.len();
            out.push(*by_label.entry(label(n)).or_insert(next));
        }
        out
    };
    loop {
        let mut by_sig: BTreeMap<(usize, Vec<usize>), usize> = BTreeMap::new();
        let mut next: Vec<usize> = Vec::with_capacity(nodes.len());
        for (id, kids) in children.iter().enumerate() {
            let sig = (class[id], kids.iter().map(|&k| class[k]).collect());
            let fresh = by_sig.len();
            next.push(*by_sig.entry(sig).or_insert(fresh));
        }
        if next == class {
            break;
        }
        class = next;
    }

    // Pick the classes that receive a name and an equation: the root class
    // (named by the resolved variable) and every class on a cycle that some
    // equation variable dereferences into. Each cycle of the node graph
    // traverses at least one variable dereference, so these names cut every
    // cycle and the remaining classes unfold to finite contexts.
    let cyclic = cyclic_classes(&children, &class);
    let mut names: BTreeMap<usize, Var> = BTreeMap::new();
    names.insert(class[0], v.clone());
    for w in system.keys() {
        let node = deref(&Term::Var(w.clone()));
        let id = index[&node];
        let c = class[id];
        if cyclic.contains(&c) && !names.contains_key(&c) {
            names.insert(c, w.clone());
        }
    }

    // One representative node per class, for expansion.
    let mut rep: BTreeMap<usize, usize> = BTreeMap::new();
    for id in 0..nodes.len() {
        rep.entry(class[id]).or_insert(id);
    }

    let mut equations: BTreeMap<Var, Term> = BTreeMap::new();
    for (&c, name) in &names {
        let id = rep[&c];
        let rhs = expand_class(id, &nodes, &children, &class, &names, Some(c));
        equations.insert(name.clone(), rhs);
    }
    Resolved::Rational(RationalTerm {
        root: v.clone(),
        equations,
    })
}

/// Whether variable `target` is reachable from `from` through pure-variable
/// equations only (used to collapse variable cycles deterministically).
fn reaches_var(system: &BTreeMap<Var, Term>, from: &Var, target: &Var) -> bool {
    let mut cur = from.clone();
    let mut seen = BTreeSet::new();
    loop {
        if cur == *target {
            return true;
        }
        if !seen.insert(cur.clone()) {
            return false;
        }
        match system.get(&cur) {
            Some(Term::Var(next)) => cur = next.clone(),
            _ => return false,
        }
    }
}

fn has_cycle(children: &[Vec<usize>]) -> bool {
    // 0 = unvisited, 1 = on stack, 2 = done.
    let mut state = vec![0u8; children.len()];
    for start in 0..children.len() {
        if state[start] != 0 {
            continue;
        }
        let mut stack = vec![(start, 0usize)];
        state[start] = 1;
        while let Some(&mut (id, ref mut next)) = stack.last_mut() {
            if *next < children[id].len() {
                let child = children[id][*next];
                *next += 1;
                match state[child] {
                    0 => {
                        state[child] = 1;
                        stack.push((child, 0));
                    }
                    1 => return true,
                    _ => {}
                }
            } else {
                state[id] = 2;
                stack.pop();
            }
        }
    }
    false
}

fn expand_finite(
    id: usize,
    nodes: &[Node],
    children: &[Vec<usize>],
    memo: &mut BTreeMap<usize, Term>,
) -> Term {
    if let Some(t) = memo.get(&id) {
        return t.clone();
    }
    let out = match &nodes[id] {
        Node::Free(w) => Term::Var(w.clone()),
        Node::App(f, _) => {
            let kids = children[id]
                .iter()
                .map(|&k| expand_finite(k, nodes, children, memo))
                .collect();
            Term::App(f.clone(), kids)
        }
    };
    memo.insert(id, out.clone());
    out
}

/// Expands a node into a term, cutting at named classes (which become their
/// variable). `skip_self` suppresses the cut at the equation's own class so
/// the right-hand side starts with a function symbol.
fn expand_class(
    id: usize,
    nodes: &[Node],
    children: &[Vec<usize>],
    class: &[usize],
    names: &BTreeMap<usize, Var>,
    skip_self: Option<usize>,
) -> Term {
    if skip_self != Some(class[id]) {
        if let Some(name) = names.get(&class[id]) {
            return Term::Var(name.clone());
        }
    }
    match &nodes[id] {
        Node::Free(w) => Term::Var(w.clone()),
        Node::App(f, _) => {
            let kids = children[id]
                .iter()
                .map(|&k| expand_class(k, nodes, children, class, names, None))
                .collect();
            Term::App(f.clone(), kids)
        }
    }
}

/// Classes whose quotient-graph node lies on a cycle.
fn cyclic_classes(children: &[Vec<usize>], class: &[usize]) -> BTreeSet<usize> {
    let nclass = class.iter().max().map_or(0, |m| m + 1);
    let mut edges: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); nclass];
    for (id, kids) in children.iter().enumerate() {
        for &k in kids {
            edges[class[id]].insert(class[k]);
        }
    }
    // A class is cyclic when it can reach itself.
    let mut out = BTreeSet::new();
    for c in 0..nclass {
        let mut seen = BTreeSet::new();
        let mut work: Vec<usize> = edges[c].iter().copied().collect();
        while let Some(n) = work.pop() {
            if n == c {
                out.insert(c);
                break;
            }
            if seen.insert(n) {
                work.extend(edges[n].iter().copied());
            }
        }
    }
    out
}
