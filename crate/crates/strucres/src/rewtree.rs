//! Rewriting trees: the and-or trees that structural resolution works on.
//!
//! A rewriting tree records, for a goal clause under a substitution, every
//! matching-based derivation at once. Clause nodes (boxes) sit at even
//! depths and carry a clause instance whose body atoms become the node's
//! term-node children; every term node (ellipse) has one child slot per
//! program clause — a clause node when that clause's head *matches* the
//! term, and otherwise a variable node (diamond) that merely reserves the
//! slot. A variable node where head and term still *unify* is where a tree
//! transition can act: the unifier is applied to the whole tree, and slots
//! whose match is thereby enabled grow fresh clause-node subtrees.
//!
//! Trees may be infinite for non-productive programs, so construction is
//! budgeted: nodes whose children were cut off are kept on an explicit
//! frontier, and searches treat those regions as unknown.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::program::{Clause, PredType, Program, TypingFunction};
use crate::subst::Subst;
use crate::term::{Position, Term, Var};
use crate::unify::{mgm, mgu, rename_clause_lazy, UnifyOutcome, VarSupply};

/// An or-node variable: a placeholder occupying a clause slot that did not
/// match. Numbered globally per derivation in breadth-first discovery
/// order, so diagrams and tests can refer to `X1`, `X2`, … deterministically.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct OrVar(pub u64);

impl fmt::Display for OrVar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "X{}", self.0)
    }
}

/// Payload of one rewriting-tree node.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum RewNode {
    /// Even depth: a clause instance; its children are the body atoms.
    Clause(Clause),
    /// Odd depth: a goal atom; its children are the clause slots.
    Term(Term),
    /// Even depth: an unmatched clause slot. Never has children.
    Var(OrVar),
}

impl fmt::Display for RewNode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RewNode::Clause(c) => write!(f, "{}", c),
            RewNode::Term(t) => write!(f, "{}", t),
            RewNode::Var(x) => write!(f, "{}", x),
        }
    }
}

type NodeId = usize;

#[derive(Clone, Debug)]
struct NodeEntry {
    node: RewNode,
    parent: Option<NodeId>,
    children: Vec<NodeId>,
    pos: Position,
}

/// Construction ran out of node budget; the partially built tree (with its
/// frontier marking the cut) is carried along.
#[derive(Clone, Debug, Error)]
#[error("rewriting tree budget of {budget} nodes exhausted")]
pub struct TreeFuelExhausted {
    pub budget: usize,
    pub partial: RewTree,
}

/// A budgeted rewriting tree together with its provenance: the program, the
/// original goal clause, and the substitution under which it was built.
#[derive(Clone, Debug)]
pub struct RewTree {
    program: Arc<Program>,
    goal: Clause,
    sigma: Subst,
    nodes: Vec<NodeEntry>,
    /// Nodes whose children were not built because the budget ran out.
    frontier: BTreeSet<NodeId>,
    next_or: u64,
    supply: VarSupply,
    /// Every variable visible in the tree, the goal instance, or the
    /// substitution's range; clause renaming must avoid all of them.
    used: BTreeSet<Var>,
    budget: usize,
}

/// What to do for a node that exists but whose children are still owed.
enum Grow {
    /// Mirror an existing node of `source`, re-checking variable slots.
    Copy(NodeId),
    /// Expand from the node's own payload, as in a fresh construction.
    Fresh,
}

impl RewTree {
    fn add_node(&mut self, node: RewNode, parent: Option<NodeId>) -> NodeId {
        let pos = match parent {
            None => Position::root(),
            Some(p) => {
                let idx = self.nodes[p].children.len();
                self.nodes[p].pos.child(idx)
            }
        };
        let id = self.nodes.len();
        self.nodes.push(NodeEntry { node, parent, children: Vec::new(), pos });
        if let Some(p) = parent {
            self.nodes[p].children.push(id);
        }
        id
    }

    /// Tries clause slot `j` against a subject term: lazily renames the
    /// clause apart from the used variables and matches its head. On
    /// success the matched clause — under the tree's substitution, which
    /// may bind variables the deterministic renaming reuses — is returned
    /// and its variables join the used set.
    fn probe_slot(&mut self, j: usize, subject: &Term) -> Option<Clause> {
        let program = Arc::clone(&self.program);
        let clause = rename_clause_lazy(program.clause(j), &self.used, &mut self.supply);
        let theta = mgm(&clause.head, subject)?;
        let instance = Clause {
            head: self.sigma.apply(&theta.apply(&clause.head)),
            body: clause
                .body
                .iter()
                .map(|b| self.sigma.apply(&theta.apply(b)))
                .collect(),
        };
        for v in instance.vars() {
            self.used.insert(v);
        }
        Some(instance)
    }

    /// Breadth-first child construction shared by fresh builds, copies, and
    /// grafts. Each queued node receives all of its children at once or is
    /// marked frontier when the budget does not allow them. Returns whether
    /// the budget was hit during this growth.
    fn pump(
        &mut self,
        mut queue: VecDeque<(NodeId, Grow)>,
        source: Option<(&RewTree, &Subst)>,
    ) -> bool {
        let mut budget_hit = false;
        while let Some((id, grow)) = queue.pop_front() {
            match grow {
                Grow::Fresh => match self.nodes[id].node.clone() {
                    RewNode::Clause(c) => {
                        if self.nodes.len() + c.body.len() > self.budget {
                            self.frontier.insert(id);
                            budget_hit = true;
                            continue;
                        }
                        for atom in &c.body {
                            let cid = self.add_node(RewNode::Term(atom.clone()), Some(id));
                            queue.push_back((cid, Grow::Fresh));
                        }
                    }
                    RewNode::Term(t) => {
                        let arity = self.program.arity();
                        if self.nodes.len() + arity > self.budget {
                            self.frontier.insert(id);
                            budget_hit = true;
                            continue;
                        }
                        for j in 0..arity {
                            match self.probe_slot(j, &t) {
                                Some(instance) => {
                                    let cid =
                                        self.add_node(RewNode::Clause(instance), Some(id));
                                    queue.push_back((cid, Grow::Fresh));
                                }
                                None => {
                                    let x = OrVar(self.next_or);
                                    self.next_or += 1;
                                    self.add_node(RewNode::Var(x), Some(id));
                                }
                            }
                        }
                    }
                    RewNode::Var(_) => {}
                },
                Grow::Copy(old_id) => {
                    let (old, sp) = source.expect("copy items only arise with a source tree");
                    if old.frontier.contains(&old_id) {
                        // The source ran out of budget here; grow fresh from
                        // the substituted payload so the result matches a
                        // from-scratch construction under the same budget.
                        queue.push_front((id, Grow::Fresh));
                        continue;
                    }
                    let old_entry = &old.nodes[old_id];
                    let needed = old_entry.children.len();
                    if self.nodes.len() + needed > self.budget {
                        self.frontier.insert(id);
                        budget_hit = true;
                        continue;
                    }
                    match &old_entry.node {
                        RewNode::Clause(_) => {
                            for &c_old in &old_entry.children {
                                let payload = match &old.nodes[c_old].node {
                                    RewNode::Term(t) => RewNode::Term(sp.apply(t)),
                                    other => other.clone(),
                                };
                                let cid = self.add_node(payload, Some(id));
                                queue.push_back((cid, Grow::Copy(c_old)));
                            }
                        }
                        RewNode::Term(t_old) => {
                            let t_new = match &self.nodes[id].node {
                                RewNode::Term(t) => t.clone(),
                                _ => unreachable!("copy of a term node targets a term node"),
                            };
                            let changed = *t_old != t_new;
                            for (j, &c_old) in old_entry.children.iter().enumerate() {
                                match &old.nodes[c_old].node {
                                    RewNode::Clause(c) => {
                                        let payload = RewNode::Clause(Clause {
                                            head: sp.apply(&c.head),
                                            body: c.body.iter().map(|b| sp.apply(b)).collect(),
                                        });
                                        let cid = self.add_node(payload, Some(id));
                                        queue.push_back((cid, Grow::Copy(c_old)));
                                    }
                                    RewNode::Var(x) => {
                                        // A previously unmatched slot can only have
                                        // become matchable if the term changed.
                                        let graft = if changed {
                                            self.probe_slot(j, &t_new)
                                        } else {
                                            None
                                        };
                                        match graft {
                                            Some(instance) => {
                                                let cid = self.add_node(
                                                    RewNode::Clause(instance),
                                                    Some(id),
                                                );
                                                queue.push_back((cid, Grow::Fresh));
                                            }
                                            None => {
                                                self.add_node(RewNode::Var(*x), Some(id));
                                            }
                                        }
                                    }
                                    RewNode::Term(_) => {
                                        unreachable!("term nodes never have term children")
                                    }
                                }
                            }
                        }
                        RewNode::Var(_) => {}
                    }
                }
            }
        }
        budget_hit
    }
}

/// Builds the rewriting tree of goal clause `c` under `sigma`, spending at
/// most `fuel` nodes. A budget overrun returns the partial tree inside the
/// error; the partial tree is a perfectly usable value whose frontier marks
/// the unexplored regions.
pub fn build_rew(
    program: &Arc<Program>,
    c: &Clause,
    sigma: &Subst,
    fuel: usize,
) -> Result<RewTree, TreeFuelExhausted> {
    assert!(fuel >= 1, "tree budget must allow at least the root");
    let root_clause = Clause {
        head: sigma.apply(&c.head),
        body: c.body.iter().map(|b| sigma.apply(b)).collect(),
    };
    let mut used: BTreeSet<Var> = root_clause.vars();
    used.extend(sigma.range_vars());

    let mut tree = RewTree {
        program: Arc::clone(program),
        goal: c.clone(),
        sigma: sigma.clone(),
        nodes: Vec::new(),
        frontier: BTreeSet::new(),
        next_or: 1,
        supply: VarSupply::new(),
        used,
        budget: fuel,
    };
    let root = tree.add_node(RewNode::Clause(root_clause), None);
    let mut queue = VecDeque::new();
    queue.push_back((root, Grow::Fresh));
    let budget_hit = tree.pump(queue, None);
    if budget_hit {
        Err(TreeFuelExhausted { budget: fuel, partial: tree })
    } else {
        Ok(tree)
    }
}

/// Applies a substitution to a whole tree: payloads are instantiated, and
/// each variable-node slot whose term changed is re-checked — a slot that
/// now matches grows a fresh clause-node subtree, while every other
/// variable node keeps its identity. The result is the rewriting tree of
/// the same goal under the composed substitution.
pub fn apply_subst_tree(sp: &Subst, tree: &RewTree) -> Result<RewTree, TreeFuelExhausted> {
    let sigma_new = Subst::compose(sp, &tree.sigma);
    let root_clause = Clause {
        head: sigma_new.apply(&tree.goal.head),
        body: tree.goal.body.iter().map(|b| sigma_new.apply(b)).collect(),
    };
    let mut used: BTreeSet<Var> = root_clause.vars();
    used.extend(sigma_new.range_vars());
    for entry in &tree.nodes {
        match &entry.node {
            RewNode::Term(t) => sp.apply(t).collect_vars(&mut used),
            RewNode::Clause(c) => {
                sp.apply(&c.head).collect_vars(&mut used);
                for b in &c.body {
                    sp.apply(b).collect_vars(&mut used);
                }
            }
            RewNode::Var(_) => {}
        }
    }

    let mut out = RewTree {
        program: Arc::clone(&tree.program),
        goal: tree.goal.clone(),
        sigma: sigma_new,
        nodes: Vec::new(),
        frontier: BTreeSet::new(),
        next_or: tree.next_or,
        supply: tree.supply.clone(),
        used,
        budget: tree.budget,
    };
    let root = out.add_node(RewNode::Clause(root_clause), None);
    let mut queue = VecDeque::new();
    queue.push_back((root, Grow::Copy(0)));
    let budget_hit = out.pump(queue, Some((tree, sp)));
    if budget_hit {
        let budget = out.budget;
        Err(TreeFuelExhausted { budget, partial: out })
    } else {
        Ok(out)
    }
}

/// Outcome of a tree transition at an or-node variable.
#[derive(Clone, Debug)]
pub enum TreeTransition {
    /// Head and term do not unify: the slot can never be filled.
    Empty,
    /// The external resolvent and the transitioned tree. If grafting hit
    /// the node budget the tree is partial (check `is_complete`).
    Step { resolvent: Subst, tree: Box<RewTree> },
}

/// A subtree witnessing inductive success: all children taken at clause
/// nodes, exactly one clause child at each term node, every leaf a fact.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SuccessSubtree {
    pub positions: BTreeSet<Position>,
}

impl SuccessSubtree {
    /// Positions of the subtree with no child inside the subtree.
    pub fn leaf_positions(&self) -> Vec<Position> {
        self.positions
            .iter()
            .filter(|p| {
                !self
                    .positions
                    .iter()
                    .any(|q| q.parent().as_ref() == Some(*p))
            })
            .cloned()
            .collect()
    }
}

/// Openness and inductive/coinductive type of one node.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct NodeClass {
    pub open: bool,
    pub typ: PredType,
}

impl RewTree {
    pub fn program(&self) -> &Arc<Program> {
        &self.program
    }

    /// The goal clause the tree was built for (before substitution).
    pub fn goal_clause(&self) -> &Clause {
        &self.goal
    }

    /// The substitution under which the tree stands.
    pub fn sigma(&self) -> &Subst {
        &self.sigma
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn budget(&self) -> usize {
        self.budget
    }

    /// False when some node's children were cut off by the budget.
    pub fn is_complete(&self) -> bool {
        self.frontier.is_empty()
    }

    pub fn frontier_positions(&self) -> Vec<Position> {
        let mut out: Vec<Position> = self.frontier.iter().map(|&id| self.nodes[id].pos.clone()).collect();
        out.sort();
        out
    }

    pub fn node(&self, pos: &Position) -> Option<&RewNode> {
        self.node_id(pos).map(|id| &self.nodes[id].node)
    }

    fn node_id(&self, pos: &Position) -> Option<NodeId> {
        let mut id = 0usize;
        for &i in pos.indices() {
            id = *self.nodes[id].children.get(i)?;
        }
        Some(id)
    }

    /// All positions, in breadth-first order.
    pub fn positions(&self) -> Vec<Position> {
        let mut out: Vec<Position> = self.nodes.iter().map(|e| e.pos.clone()).collect();
        out.sort();
        out
    }

    /// Every or-node variable with its position, in position order.
    pub fn or_vars(&self) -> Vec<(Position, OrVar)> {
        let mut out: Vec<(Position, OrVar)> = self
            .nodes
            .iter()
            .filter_map(|e| match e.node {
                RewNode::Var(x) => Some((e.pos.clone(), x)),
                _ => None,
            })
            .collect();
        out.sort();
        out
    }

    /// The term-node payload above the given or-node variable, with the
    /// clause slot index the variable occupies.
    fn var_site(&self, x: OrVar) -> Option<(usize, Term)> {
        let entry = self.nodes.iter().find(|e| e.node == RewNode::Var(x))?;
        let slot = entry.pos.last()?;
        let parent = entry.parent?;
        match &self.nodes[parent].node {
            RewNode::Term(t) => Some((slot, t.clone())),
            _ => None,
        }
    }

    /// Tree transition at or-node variable `x`: unifies the corresponding
    /// clause head (occurs check on) with the term above `x` and applies
    /// the unifier — restricted to the tree's variables — to the whole
    /// tree. Where head and term do not even unify, the transition is
    /// empty.
    pub fn transition(&self, x: OrVar) -> TreeTransition {
        let (slot, term) = match self.var_site(x) {
            Some(site) => site,
            None => return TreeTransition::Empty,
        };
        let mut supply = self.supply.clone();
        let clause = rename_clause_lazy(self.program.clause(slot), &self.used, &mut supply);
        let theta = match mgu(&clause.head, &term, true) {
            Some(UnifyOutcome::Unifier(theta)) => theta,
            Some(UnifyOutcome::Rational(_)) => unreachable!("occurs check is on"),
            None => return TreeTransition::Empty,
        };
        let resolvent = theta.restrict(&self.used);
        let tree = match apply_subst_tree(&resolvent, self) {
            Ok(tree) => tree,
            Err(e) => e.partial,
        };
        TreeTransition::Step { resolvent, tree: Box::new(tree) }
    }

    /// Searches for an inductive success subtree: at every term node some
    /// clause child (lowest index first) must succeed, at every clause node
    /// all children must, and leaves must be facts. Frontier nodes fail —
    /// success may not rest on an unexplored region.
    pub fn find_success_subtree(&self) -> Option<SuccessSubtree> {
        self.success_positions(0).map(|positions| SuccessSubtree {
            positions: positions.into_iter().collect(),
        })
    }

    fn success_positions(&self, id: NodeId) -> Option<Vec<Position>> {
        if self.frontier.contains(&id) {
            return None;
        }
        let entry = &self.nodes[id];
        match &entry.node {
            RewNode::Var(_) => None,
            RewNode::Clause(_) => {
                let mut out = vec![entry.pos.clone()];
                for &c in &entry.children {
                    out.extend(self.success_positions(c)?);
                }
                Some(out)
            }
            RewNode::Term(_) => {
                for &c in &entry.children {
                    if matches!(self.nodes[c].node, RewNode::Clause(_)) {
                        if let Some(mut sub) = self.success_positions(c) {
                            sub.push(entry.pos.clone());
                            return Some(sub);
                        }
                    }
                }
                None
            }
        }
    }

    /// Classifies every node as open/closed and inductive/coinductive: a
    /// variable node is open when its transition exists; term nodes take
    /// their predicate's type and or-nodes inherit from their parent.
    pub fn classify_nodes(&self, ty: &TypingFunction) -> BTreeMap<Position, NodeClass> {
        let mut out = BTreeMap::new();
        let mut types: Vec<PredType> = Vec::with_capacity(self.nodes.len());
        for entry in &self.nodes {
            let typ = match &entry.node {
                RewNode::Term(t) => t
                    .functor()
                    .map(|(name, _)| ty.get(name))
                    .unwrap_or(PredType::Inductive),
                _ => match entry.parent {
                    Some(p) => types[p],
                    None => PredType::Inductive,
                },
            };
            types.push(typ);
            let open = match &entry.node {
                RewNode::Var(x) => matches!(self.transition(*x), TreeTransition::Step { .. }),
                _ => false,
            };
            out.insert(entry.pos.clone(), NodeClass { open, typ });
        }
        out
    }

    /// Renders the tree as a DOT digraph: clause nodes as boxes, term nodes
    /// as ellipses, variable nodes as diamonds; frontier nodes dashed. Node
    /// ids are derived from positions, so output is deterministic.
    pub fn to_dot(&self) -> String {
        fn dot_id(pos: &Position) -> String {
            let mut s = String::from("n");
            for i in pos.indices() {
                s.push('_');
                s.push_str(&i.to_string());
            }
            s
        }
        fn escape(s: &str) -> String {
            s.replace('\\', "\\\\").replace('"', "\\\"")
        }
        let mut ids: Vec<NodeId> = (0..self.nodes.len()).collect();
        ids.sort_by(|&a, &b| self.nodes[a].pos.cmp(&self.nodes[b].pos));
        let mut out = String::from("digraph rewtree {\n");
        for &id in &ids {
            let entry = &self.nodes[id];
            let shape = match entry.node {
                RewNode::Clause(_) => "box",
                RewNode::Term(_) => "ellipse",
                RewNode::Var(_) => "diamond",
            };
            let style = if self.frontier.contains(&id) {
                ", style=dashed"
            } else {
                ""
            };
            out.push_str(&format!(
                "  {} [shape={}, label=\"{}\"{}];\n",
                dot_id(&entry.pos),
                shape,
                escape(&entry.node.to_string()),
                style
            ));
        }
        for &id in &ids {
            let entry = &self.nodes[id];
            for &c in &entry.children {
                out.push_str(&format!(
                    "  {} -> {};\n",
                    dot_id(&entry.pos),
                    dot_id(&self.nodes[c].pos)
                ));
            }
        }
        out.push_str("}\n");
        out
    }
}

/// Structural equality of two trees up to a bijective renaming of both
/// first-order variables and or-node variables (compared in breadth-first
/// position order, so the bijections are forced).
pub fn alpha_eq(a: &RewTree, b: &RewTree) -> bool {
    if a.nodes.len() != b.nodes.len() {
        return false;
    }
    let frontier_a: BTreeSet<&Position> = a.frontier.iter().map(|&id| &a.nodes[id].pos).collect();
    let frontier_b: BTreeSet<&Position> = b.frontier.iter().map(|&id| &b.nodes[id].pos).collect();
    if frontier_a != frontier_b {
        return false;
    }
    let mut ids_a: Vec<NodeId> = (0..a.nodes.len()).collect();
    ids_a.sort_by(|&x, &y| a.nodes[x].pos.cmp(&a.nodes[y].pos));
    let mut ids_b: Vec<NodeId> = (0..b.nodes.len()).collect();
    ids_b.sort_by(|&x, &y| b.nodes[x].pos.cmp(&b.nodes[y].pos));

    let mut fo_ab: BTreeMap<Var, Var> = BTreeMap::new();
    let mut fo_ba: BTreeMap<Var, Var> = BTreeMap::new();
    let mut or_ab: BTreeMap<OrVar, OrVar> = BTreeMap::new();
    let mut or_ba: BTreeMap<OrVar, OrVar> = BTreeMap::new();

    fn terms_match(
        s: &Term,
        t: &Term,
        ab: &mut BTreeMap<Var, Var>,
        ba: &mut BTreeMap<Var, Var>,
    ) -> bool {
        match (s, t) {
            (Term::Var(x), Term::Var(y)) => {
                let fwd = ab.entry(x.clone()).or_insert_with(|| y.clone()).clone();
                let bwd = ba.entry(y.clone()).or_insert_with(|| x.clone()).clone();
                fwd == *y && bwd == *x
            }
            (Term::App(f, fa), Term::App(g, ga)) => {
                f == g
                    && fa.len() == ga.len()
                    && fa.iter().zip(ga).all(|(u, v)| terms_match(u, v, ab, ba))
            }
            _ => false,
        }
    }

    for (&ia, &ib) in ids_a.iter().zip(&ids_b) {
        let (ea, eb) = (&a.nodes[ia], &b.nodes[ib]);
        if ea.pos != eb.pos {
            return false;
        }
        let ok = match (&ea.node, &eb.node) {
            (RewNode::Term(s), RewNode::Term(t)) => terms_match(s, t, &mut fo_ab, &mut fo_ba),
            (RewNode::Clause(c), RewNode::Clause(d)) => {
                c.body.len() == d.body.len()
                    && terms_match(&c.head, &d.head, &mut fo_ab, &mut fo_ba)
                    && c.body
                        .iter()
                        .zip(&d.body)
                        .all(|(u, v)| terms_match(u, v, &mut fo_ab, &mut fo_ba))
            }
            (RewNode::Var(x), RewNode::Var(y)) => {
                let fwd = *or_ab.entry(*x).or_insert(*y);
                let bwd = *or_ba.entry(*y).or_insert(*x);
                fwd == *y && bwd == *x
            }
            _ => false,
        };
        if !ok {
            return false;
        }
    }
    true
}
