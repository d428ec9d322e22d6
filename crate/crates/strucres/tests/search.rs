//! Proof search: inductive refutation over tree transitions, the SLD
//! baseline, coinductive loop detection with rational answers, bounded
//! observation of infinite answers, and the at-every-depth check.

use std::sync::Arc;

use strucres::program::{corpus, Program, TypingFunction};
use strucres::rational::Resolved;
use strucres::search::{
    colp_s_solve, implied_at_infinity, observe, s_refute, sld_partial_answer, sld_solve,
    ColpOutcome, Evidence, ImpliedOutcome, ObserveOutcome, SRefuteOutcome, SldOutcome,
};
use strucres::term::{truncate, Term, Var};

fn program(name: &str) -> Arc<Program> {
    Arc::new(corpus()[name].clone())
}

fn typing(coinductive: &[&str]) -> TypingFunction {
    let mut ty = TypingFunction::new();
    for p in coinductive {
        ty.mark_coinductive(*p);
    }
    ty
}

fn refuted(outcome: SRefuteOutcome) -> strucres::search::Refutation {
    match outcome {
        SRefuteOutcome::Refuted(r) => r,
        other => panic!("expected a refutation, got {other:?}"),
    }
}

#[test]
fn refutation_composes_the_resolvents_into_the_answer() {
    let p = program("P7");
    let r = refuted(s_refute(&p, &Term::app("p", vec![Term::var("X")]), 500));
    assert_eq!(r.answer.to_string(), "{X ↦ c}");
    let shown: Vec<String> = r.resolvents.iter().map(|s| s.to_string()).collect();
    assert_eq!(shown, vec!["{X ↦ c}"], "one substitution step closes the proof");
    assert!(r.final_tree.find_success_subtree().is_some());
}

#[test]
fn refutation_of_a_ground_query_can_bind_only_internal_variables() {
    let p = program("P6");
    let goal = Term::app("conn", vec![Term::atom("a"), Term::atom("c")]);
    let r = refuted(s_refute(&p, &goal, 500));
    assert!(r.answer.is_id(), "a ground query has nothing to bind");
    let shown: Vec<String> = r.resolvents.iter().map(|s| s.to_string()).collect();
    assert_eq!(shown, vec!["{Z ↦ b}"], "the midpoint is guessed by external resolution");
}

#[test]
fn refutation_answers_restrict_to_the_query_variables() {
    let p = program("P6");
    let goal = Term::app("conn", vec![Term::var("X"), Term::var("Y")]);
    let r = refuted(s_refute(&p, &goal, 500));
    assert_eq!(r.answer.to_string(), "{X ↦ a, Y ↦ b}");
}

#[test]
fn rewriting_alone_refutes_without_any_resolvent() {
    let p = program("P1");
    let two = Term::app("s", vec![Term::app("s", vec![Term::atom("0")])]);
    let r = refuted(s_refute(&p, &Term::app("nat", vec![two]), 500));
    assert!(r.answer.is_id());
    assert!(r.resolvents.is_empty(), "nat(s(s(0))) closes by rewriting alone");
}

#[test]
fn unprovable_queries_exhaust_or_time_out() {
    let p7 = program("P7");
    assert!(
        matches!(s_refute(&p7, &Term::app("q", vec![Term::atom("c")]), 500), SRefuteOutcome::Exhausted),
        "q has no clauses: the finite space is exhausted"
    );
    let p6 = program("P6");
    let goal = Term::app("conn", vec![Term::atom("c"), Term::atom("a")]);
    match s_refute(&p6, &goal, 500) {
        SRefuteOutcome::FuelOut(Some(deepest)) => {
            assert!(deepest.node_count() > 500, "the deepest tree kept growing");
        }
        other => panic!("conn(c, a) has an infinite failing space, got {other:?}"),
    }
}

#[test]
fn the_sld_baseline_agrees_on_inductive_queries() {
    let answers = [
        ("P6", Term::app("conn", vec![Term::var("X"), Term::var("Y")]), "{X ↦ a, Y ↦ b}"),
        ("P1", Term::app("nat", vec![Term::app("s", vec![Term::var("X")])]), "{X ↦ 0}"),
        ("P7", Term::app("p", vec![Term::var("X")]), "{X ↦ c}"),
    ];
    for (name, goal, expected) in answers {
        match sld_solve(&corpus()[name], &goal, 10_000) {
            SldOutcome::Answer(s) => assert_eq!(s.to_string(), expected, "query {goal}"),
            other => panic!("{goal} should have an answer, got {other:?}"),
        }
    }
}

#[test]
fn loop_detection_returns_the_rational_stream_of_naturals() {
    let p = program("P2");
    let ty = typing(&["nats"]);
    let goal = Term::app("nats", vec![Term::var("X")]);
    let ca = match colp_s_solve(&p, &goal, &ty, 4000) {
        ColpOutcome::Coinductive(ca) => ca,
        other => panic!("expected a coinductive answer, got {other:?}"),
    };
    assert_eq!(ca.answer.len(), 1);
    let (v, resolved) = &ca.answer[0];
    assert_eq!(v, &Var::source("X"));
    let rational = match resolved {
        Resolved::Rational(r) => r,
        Resolved::Finite(t) => panic!("the stream of zeros is infinite, got finite {t}"),
    };
    assert_eq!(rational.to_string(), "X = scons(0, X)");
    assert_eq!(rational.unfold(2).to_string(), "scons(0, scons(◇, ◇))");
    assert_eq!(rational.unfold(3).to_string(), "scons(0, scons(0, scons(◇, ◇)))");
    assert_eq!(ca.resolvents.len(), 2, "two external steps before the loop closes");
    assert_eq!(ca.loops.len(), 1);
    let closure = &ca.loops[0];
    assert_eq!(closure.ancestor.indices(), &[0]);
    assert_eq!(closure.descendant.indices(), &[0, 2, 1]);
    assert_eq!(closure.bindings.len(), 1);
    let (bound, value) = closure.bindings.iter().next().unwrap();
    assert_eq!(
        value,
        &Term::app("scons", vec![Term::atom("0"), Term::Var(bound.clone())]),
        "the closing unifier is cyclic: the tail is the stream itself"
    );
}

#[test]
fn loop_detection_closes_the_zeros_stream_at_the_first_recursion() {
    let p = program("P12");
    let ty = typing(&["zeros"]);
    let goal = Term::app("zeros", vec![Term::var("X")]);
    let ca = match colp_s_solve(&p, &goal, &ty, 4000) {
        ColpOutcome::Coinductive(ca) => ca,
        other => panic!("expected a coinductive answer, got {other:?}"),
    };
    let (_, resolved) = &ca.answer[0];
    assert_eq!(resolved.to_string(), "X = scons(0, X)");
    assert_eq!(ca.loops[0].ancestor.indices(), &[0]);
    assert_eq!(ca.loops[0].descendant.indices(), &[0, 0, 0]);
}

#[test]
fn the_productivity_gate_rejects_loop_detection_on_unproductive_programs() {
    let p = program("bad");
    let ty = typing(&["bad"]);
    let goal = Term::app("bad", vec![Term::app("f", vec![Term::atom("0")])]);
    match colp_s_solve(&p, &goal, &ty, 4000) {
        ColpOutcome::NonProductiveRejected(w) => {
            assert!(w.to_string().starts_with("non-productive:"), "witness: {w}");
        }
        other => panic!("the gate must reject, got {other:?}"),
    }
}

#[test]
fn irrational_answers_defeat_loop_detection() {
    let p = program("P3");
    let ty = typing(&["fibs"]);
    let zero = Term::atom("0");
    let one = Term::app("s", vec![zero.clone()]);
    let goal = Term::app("fibs", vec![zero, one, Term::var("X")]);
    assert!(
        matches!(colp_s_solve(&p, &goal, &ty, 600), ColpOutcome::FuelOut),
        "no finite loop exists in the fibonacci derivation"
    );
}

#[test]
fn observation_grows_the_stream_to_the_requested_depth() {
    let p = program("P4");
    let ty = typing(&["from"]);
    let goal = Term::app("from", vec![Term::atom("0"), Term::var("X")]);
    let obs = match observe(&p, &goal, &ty, 4, 4000) {
        ObserveOutcome::Observed(o) => o,
        other => panic!("expected an observation, got {other:?}"),
    };
    assert_eq!(obs.depth, 4);
    assert_eq!(
        obs.approximation.to_string(),
        "from(0, scons(0, scons(s(◇), scons(◇, ◇))))"
    );
    assert_eq!(obs.resolvents_used, 3);
    assert_eq!(obs.bindings.len(), 1);
    assert_eq!(obs.bindings[0].0, Var::source("X"));
    assert_eq!(
        obs.bindings[0].1.to_string(),
        "scons(0, scons(s(0), scons(s(s(0)), Y_8)))",
        "the untruncated binding carries the open tail"
    );
    assert_eq!(obs.residual.len(), 1);
    assert_eq!(obs.residual[0].to_string(), "from(s(s(s(0))), Y_8)");
}

#[test]
fn observation_of_the_zeros_stream_is_exact() {
    let p = program("P12");
    let ty = typing(&["zeros"]);
    let goal = Term::app("zeros", vec![Term::var("X")]);
    let obs = match observe(&p, &goal, &ty, 3, 4000) {
        ObserveOutcome::Observed(o) => o,
        other => panic!("expected an observation, got {other:?}"),
    };
    assert_eq!(obs.approximation.to_string(), "zeros(scons(0, scons(◇, ◇)))");
    assert_eq!(obs.resolvents_used, 2);
    assert_eq!(obs.bindings[0].1.to_string(), "scons(0, scons(0, X_4))");
}

#[test]
fn observation_reveals_the_fibonacci_prefix() {
    let p = program("P3");
    let ty = typing(&["fibs"]);
    let zero = Term::atom("0");
    let one = Term::app("s", vec![zero.clone()]);
    let goal = Term::app("fibs", vec![zero, one, Term::var("X")]);
    let at = |depth: usize| match observe(&p, &goal, &ty, depth, 20_000) {
        ObserveOutcome::Observed(o) => o,
        other => panic!("expected an observation at depth {depth}, got {other:?}"),
    };

    let six = at(6);
    assert_eq!(six.resolvents_used, 5);
    assert_eq!(
        six.approximation.to_string(),
        "fibs(0, s(0), cons(0, cons(s(0), cons(s(0), cons(s(◇), cons(◇, ◇))))))"
    );

    let ten = at(10);
    assert_eq!(ten.resolvents_used, 9);
    assert_eq!(
        ten.approximation.to_string(),
        "fibs(0, s(0), cons(0, cons(s(0), cons(s(0), cons(s(s(0)), \
         cons(s(s(s(0))), cons(s(s(s(◇))), cons(s(s(◇)), cons(s(◇), cons(◇, ◇))))))))))",
        "the first five elements 0, 1, 1, 2, 3 are fully visible"
    );

    for depth in 3..=6 {
        assert_eq!(
            truncate(depth, &at(depth + 1).approximation),
            at(depth).approximation,
            "deeper observations refine shallower ones (depth {depth})"
        );
    }
}

#[test]
fn observation_fails_when_an_inductive_side_goal_is_unprovable() {
    let p = program("P5");
    let ty = typing(&["from"]);
    let goal = Term::app("from", vec![Term::atom("0"), Term::var("X")]);
    match observe(&p, &goal, &ty, 3, 4000) {
        ObserveOutcome::InductiveFailure(t) => assert_eq!(t.to_string(), "error(0)"),
        other => panic!("the error(0) side goal has no clause, got {other:?}"),
    }

    let p12 = program("P12");
    let bad_goal = Term::app("zeros", vec![Term::app("s", vec![Term::atom("0")])]);
    match observe(&p12, &bad_goal, &typing(&["zeros"]), 2, 4000) {
        ObserveOutcome::InductiveFailure(t) => assert_eq!(t.to_string(), "zeros(s(0))"),
        other => panic!("zeros(s(0)) can never step, got {other:?}"),
    }
}

#[test]
fn support_at_every_depth_is_witnessed_by_observation_evidence() {
    let p = program("P11");
    let ty = typing(&["from"]);
    let goal = Term::app("p", vec![Term::var("Y")]);
    let witness = match implied_at_infinity(&p, &goal, &ty, 3, 8000) {
        ImpliedOutcome::Implied(w) => w,
        ImpliedOutcome::Fail(t) => panic!("expected support, got failure at {t:?}"),
    };
    assert_eq!(witness.rewrite_steps, 1, "one rewrite exposes the stream subgoal");
    let residual: Vec<String> = witness.residual.iter().map(|t| t.to_string()).collect();
    assert_eq!(residual, vec!["from(0, X)"]);
    assert_eq!(witness.evidence.len(), 1);
    let (atom, evidence) = &witness.evidence[0];
    assert_eq!(atom.to_string(), "from(0, X)");
    match evidence {
        Evidence::Observed { approximation, resolvents_used } => {
            assert_eq!(approximation.to_string(), "from(0, scons(0, scons(◇, ◇)))");
            assert_eq!(*resolvents_used, 2);
        }
        other => panic!("the stream subgoal is evidenced by observation, got {other:?}"),
    }
}

#[test]
fn finitely_provable_queries_are_supported_with_empty_residue() {
    let p = program("P1");
    let goal = Term::app("nat", vec![Term::app("s", vec![Term::atom("0")])]);
    match implied_at_infinity(&p, &goal, &TypingFunction::new(), 2, 8000) {
        ImpliedOutcome::Implied(w) => {
            assert_eq!(w.rewrite_steps, 2);
            assert!(w.residual.is_empty());
            assert!(w.evidence.is_empty());
        }
        ImpliedOutcome::Fail(t) => panic!("nat(s(0)) rewrites to nothing, got failure at {t:?}"),
    }
}

#[test]
fn support_checking_respects_the_productivity_gate() {
    let p = program("bad");
    let ty = typing(&["bad"]);
    let goal = Term::app("bad", vec![Term::app("f", vec![Term::atom("0")])]);
    assert!(
        matches!(implied_at_infinity(&p, &goal, &ty, 2, 4000), ImpliedOutcome::Fail(None)),
        "a non-productive program supports nothing observably"
    );
}

#[test]
fn stepwise_resolution_agrees_with_the_rational_answer_at_every_depth() {
    let p = program("P2");
    let ty = typing(&["nats"]);
    let goal = Term::app("nats", vec![Term::var("X")]);
    let rational = match colp_s_solve(&p, &goal, &ty, 4000) {
        ColpOutcome::Coinductive(ca) => match &ca.answer[0].1 {
            Resolved::Rational(r) => r.clone(),
            Resolved::Finite(t) => panic!("expected a rational answer, got {t}"),
        },
        other => panic!("expected a coinductive answer, got {other:?}"),
    };
    for depth in 1..=6 {
        let stepped = sld_partial_answer(&p, &goal, &Var::source("X"), depth, 20_000)
            .unwrap_or_else(|| panic!("plain resolution reaches depth {depth}"));
        assert_eq!(
            stepped,
            rational.unfold(depth),
            "loop answer and stepwise bindings agree at depth {depth}"
        );
    }
}
