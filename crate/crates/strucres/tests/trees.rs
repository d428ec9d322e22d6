//! Rewriting trees: construction, or-variable numbering, substitution
//! application, tree transitions, success subtrees, classification, and the
//! structural-equality and DOT renderings.

use std::sync::Arc;

use strucres::program::{corpus, GoalClause, Program, TypingFunction};
use strucres::rewtree::{
    alpha_eq, apply_subst_tree, build_rew, OrVar, RewNode, RewTree, TreeTransition,
};
use strucres::subst::Subst;
use strucres::term::{Position, Term, Var};

fn arc(p: &Program) -> Arc<Program> {
    Arc::new(p.clone())
}

fn goal(atoms: Vec<Term>) -> strucres::program::Clause {
    GoalClause::new(atoms).to_clause()
}

fn pos(indices: &[usize]) -> Position {
    Position::from_indices(indices)
}

fn node_string(t: &RewTree, indices: &[usize]) -> String {
    t.node(&pos(indices)).map(|n| n.to_string()).unwrap_or_else(|| "<missing>".into())
}

fn step(t: &RewTree, x: u64) -> (Subst, RewTree) {
    match t.transition(OrVar(x)) {
        TreeTransition::Step { resolvent, tree } => (resolvent, *tree),
        TreeTransition::Empty => panic!("transition at X{x} is unexpectedly empty"),
    }
}

/// The overlapping two-clause program: p(c) and p(X) :- q(X).
fn two_clause_tree() -> RewTree {
    let p = arc(&corpus()["P7"]);
    let g = goal(vec![Term::app("p", vec![Term::var("X")])]);
    build_rew(&p, &g, &Subst::id(), 2048).expect("small finite tree")
}

#[test]
fn the_initial_tree_of_the_two_clause_program_has_the_expected_shape() {
    let t = two_clause_tree();
    assert_eq!(t.node_count(), 7);
    assert!(t.is_complete());
    assert_eq!(node_string(&t, &[]), "?- p(X).");
    assert_eq!(node_string(&t, &[0]), "p(X)");
    assert_eq!(node_string(&t, &[0, 0]), "X1", "the fact p(c) does not match p(X)");
    assert_eq!(node_string(&t, &[0, 1]), "p(X) :- q(X).");
    assert_eq!(node_string(&t, &[0, 1, 0]), "q(X)");
    assert_eq!(node_string(&t, &[0, 1, 0, 0]), "X2");
    assert_eq!(node_string(&t, &[0, 1, 0, 1]), "X3");
    let or_positions: Vec<Vec<usize>> =
        t.or_vars().iter().map(|(p, _)| p.indices().to_vec()).collect();
    assert_eq!(
        or_positions,
        vec![vec![0, 0], vec![0, 1, 0, 0], vec![0, 1, 0, 1]],
        "or-variables are numbered in discovery order"
    );
}

#[test]
fn every_term_node_has_one_child_slot_per_clause() {
    let t = two_clause_tree();
    for p in t.positions() {
        if let Some(RewNode::Term(_)) = t.node(&p) {
            let children = (0..2)
                .map(|j| t.node(&p.child(j)))
                .filter(|n| n.is_some())
                .count();
            assert_eq!(children, 2, "term at {:?} has a slot for each clause", p.indices());
        }
    }
}

#[test]
fn transition_substitutes_and_grafts_the_matched_fact() {
    let t = two_clause_tree();
    let (resolvent, stepped) = step(&t, 1);
    assert_eq!(resolvent.to_string(), "{X ↦ c}");
    assert_eq!(stepped.node_count(), 7);
    assert_eq!(node_string(&stepped, &[]), "?- p(c).");
    assert_eq!(node_string(&stepped, &[0, 0]), "p(c).", "the or-variable becomes the fact");
    assert_eq!(node_string(&stepped, &[0, 1]), "p(c) :- q(c).");
    assert_eq!(
        stepped.or_vars().iter().map(|(_, x)| x.0).collect::<Vec<_>>(),
        vec![2, 3],
        "surviving or-variables keep their numbers"
    );
}

#[test]
fn the_stepped_tree_equals_a_fresh_build_under_the_composed_substitution() {
    let t = two_clause_tree();
    let (resolvent, stepped) = step(&t, 1);
    let p = arc(&corpus()["P7"]);
    let g = goal(vec![Term::app("p", vec![Term::var("X")])]);
    let rebuilt = build_rew(&p, &g, &resolvent, 2048).expect("finite tree");
    assert!(alpha_eq(&stepped, &rebuilt), "transition output matches a from-scratch build");
    assert!(!alpha_eq(&stepped, &t), "the substituted tree differs from the original");
}

#[test]
fn success_subtrees_certify_refutations() {
    let t = two_clause_tree();
    assert!(t.find_success_subtree().is_none(), "p(X) alone proves nothing yet");
    let (_, stepped) = step(&t, 1);
    let success = stepped.find_success_subtree().expect("p(c) closes the proof");
    let leaves: Vec<String> = success
        .leaf_positions()
        .iter()
        .map(|p| stepped.node(p).unwrap().to_string())
        .collect();
    assert_eq!(leaves, vec!["p(c)."], "the fact is the only leaf of the proof");
}

#[test]
fn transitions_at_dead_or_variables_are_empty() {
    let t = two_clause_tree();
    let (_, stepped) = step(&t, 1);
    // q has no clauses at all, so neither slot under q(c) can ever fire.
    assert!(matches!(stepped.transition(OrVar(2)), TreeTransition::Empty));
    assert!(matches!(stepped.transition(OrVar(3)), TreeTransition::Empty));
    assert!(
        matches!(t.transition(OrVar(9)), TreeTransition::Empty),
        "unknown or-variables have no transition"
    );
}

#[test]
fn the_fibonacci_tree_grows_by_substitution_steps() {
    let p = arc(&corpus()["P3"]);
    let zero = Term::atom("0");
    let one = Term::app("s", vec![zero.clone()]);
    let g = goal(vec![Term::app("fibs", vec![zero, one, Term::var("X")])]);
    let t = build_rew(&p, &g, &Subst::id(), 2048).expect("finite tree");
    assert_eq!(t.node_count(), 5, "root, goal atom, and three unmatched clause slots");
    assert_eq!(
        t.or_vars().iter().map(|(_, x)| x.0).collect::<Vec<_>>(),
        vec![1, 2, 3]
    );

    let (theta1, t1) = step(&t, 3);
    assert_eq!(theta1.to_string(), "{X ↦ cons(0, S)}");
    assert_eq!(t1.node_count(), 13);
    assert_eq!(
        node_string(&t1, &[0, 2]),
        "fibs(0, s(0), cons(0, S)) :- add(0, s(0), Z), fibs(s(0), Z, S).",
        "the grafted clause instance keeps the source clause's variable names"
    );
    assert_eq!(node_string(&t1, &[0, 2, 0]), "add(0, s(0), Z)");
    assert_eq!(node_string(&t1, &[0, 2, 1]), "fibs(s(0), Z, S)");
    assert_eq!(
        t1.or_vars().iter().map(|(_, x)| x.0).collect::<Vec<_>>(),
        vec![1, 2, 4, 5, 6, 7, 8, 9],
        "six fresh or-variables continue the numbering"
    );

    let (theta2, t2) = step(&t1, 4);
    assert_eq!(theta2.to_string(), "{Z ↦ s(0)}");
    assert_eq!(
        node_string(&t2, &[0, 2, 0, 0]),
        "add(0, s(0), s(0)).",
        "the base-case fact grafts under the substituted addition atom"
    );
    assert!(t2.find_success_subtree().is_none(), "the stream subgoal remains open");
}

#[test]
fn node_classification_tracks_predicate_types_and_openness() {
    let programs = corpus();
    let p = arc(&programs["P2"]);
    let mut ty = TypingFunction::new();
    ty.mark_coinductive("nats");
    let g = goal(vec![Term::app("nats", vec![Term::var("X")])]);
    let t = build_rew(&p, &g, &Subst::id(), 2048).expect("finite tree");
    let (_, stepped) = step(&t, 3);
    let classes = stepped.classify_nodes(&ty);
    let class = |idx: &[usize]| classes[&pos(idx)];
    assert_eq!(class(&[0]).typ, strucres::program::PredType::Coinductive);
    assert_eq!(class(&[0, 2, 0]).typ, strucres::program::PredType::Inductive, "nat is inductive");
    assert!(class(&[0, 2, 0, 0]).open, "nat(X_3) can still resolve against nat(0)");
    assert!(class(&[0, 2, 0, 1]).open, "and against nat(s(X))");
    assert!(!class(&[0, 2, 0, 2]).open, "but not against the stream clause");
    assert!(class(&[0, 2, 1, 2]).open, "the stream tail stays open coinductively");
    assert_eq!(
        class(&[0, 2, 1, 2]).typ,
        strucres::program::PredType::Coinductive,
        "or-nodes inherit their parent's type"
    );
}

#[test]
fn budget_overruns_return_the_partial_tree_with_a_frontier() {
    let p = arc(&corpus()["P6"]);
    let g = goal(vec![Term::app("conn", vec![Term::atom("a"), Term::atom("c")])]);
    let err = build_rew(&p, &g, &Subst::id(), 64).expect_err("the connectivity tree is infinite");
    assert!(
        err.to_string().contains("budget"),
        "the error names the exhausted budget, got: {err}"
    );
    let partial = err.partial;
    assert!(partial.node_count() <= 64, "the budget caps the node count");
    assert!(!partial.is_complete());
    assert!(!partial.frontier_positions().is_empty(), "unexpanded nodes are marked");
    assert!(
        partial.find_success_subtree().is_none(),
        "no refutation hides in the explored region"
    );
}

#[test]
fn binding_the_internal_variable_closes_the_connectivity_proof() {
    let p = arc(&corpus()["P6"]);
    let g = goal(vec![Term::app("conn", vec![Term::atom("a"), Term::atom("c")])]);
    let zb = Subst::singleton(Var::source("Z"), Term::atom("b"));
    let t = match build_rew(&p, &g, &zb, 64) {
        Ok(t) => t,
        Err(e) => e.partial,
    };
    assert_eq!(
        node_string(&t, &[0, 0]),
        "conn(a, c) :- conn(a, b), conn(b, c).",
        "the substitution reaches into the clause instance"
    );
    let success = t.find_success_subtree().expect("both legs close on facts");
    let leaves: Vec<String> = success
        .leaf_positions()
        .iter()
        .map(|p| t.node(p).unwrap().to_string())
        .collect();
    assert_eq!(leaves, vec!["conn(a, b).", "conn(b, c)."]);
}

#[test]
fn applying_a_substitution_commutes_with_construction_even_past_the_frontier() {
    let p = arc(&corpus()["P6"]);
    let g = goal(vec![Term::app("conn", vec![Term::var("V0"), Term::var("V1")])]);
    let base = match build_rew(&p, &g, &Subst::id(), 100) {
        Ok(t) => t,
        Err(e) => e.partial,
    };
    let theta = Subst::from_pairs(vec![
        (Var::source("V0"), Term::atom("a")),
        (Var::source("V1"), Term::var("W2")),
    ]);
    let applied = match apply_subst_tree(&theta, &base) {
        Ok(t) => t,
        Err(e) => e.partial,
    };
    let rebuilt = match build_rew(&p, &g, &theta, 100) {
        Ok(t) => t,
        Err(e) => e.partial,
    };
    assert!(
        alpha_eq(&applied, &rebuilt),
        "growing fresh past the copied frontier keeps both constructions aligned"
    );
}

#[test]
fn structural_equality_ignores_variable_names_but_not_shape() {
    let p = arc(&corpus()["P6"]);
    let ga = goal(vec![Term::app("conn", vec![Term::var("V0"), Term::var("V1")])]);
    let gb = goal(vec![Term::app("conn", vec![Term::var("Q5"), Term::var("Q6")])]);
    let gc = goal(vec![Term::app("conn", vec![Term::var("V0"), Term::var("V0")])]);
    let build = |g| match build_rew(&p, g, &Subst::id(), 80) {
        Ok(t) => t,
        Err(e) => e.partial,
    };
    let ta = build(&ga);
    let tb = build(&gb);
    let tc = build(&gc);
    assert!(alpha_eq(&ta, &tb), "renamed goal variables yield the same tree");
    assert!(!alpha_eq(&ta, &tc), "collapsing two goal variables changes the tree");
}

#[test]
fn dot_rendering_is_deterministic_and_shape_complete() {
    let t = two_clause_tree();
    let dot = t.to_dot();
    assert_eq!(dot, t.to_dot(), "rendering twice gives identical output");
    assert!(dot.starts_with("digraph"), "output is a DOT digraph");
    for needle in ["box", "ellipse", "diamond", "p(X)", "q(X)", "X1"] {
        assert!(dot.contains(needle), "missing {needle} in DOT output:\n{dot}");
    }
    let edges = dot.matches(" -> ").count();
    assert_eq!(edges, 6, "a seven-node tree has six edges");
}

#[test]
fn provenance_accessors_expose_the_construction_inputs() {
    let p = arc(&corpus()["P7"]);
    let g = goal(vec![Term::app("p", vec![Term::var("X")])]);
    let sigma = Subst::singleton(Var::source("X"), Term::atom("c"));
    let t = build_rew(&p, &g, &sigma, 2048).expect("finite tree");
    assert_eq!(t.goal_clause(), &g);
    assert_eq!(t.sigma(), &sigma);
    assert_eq!(t.program().arity(), 2);
    assert_eq!(t.budget(), 2048);
}
