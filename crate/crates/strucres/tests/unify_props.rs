//! Unification, matching, renaming, and the variant/embedding orders used by
//! the productivity whistle.

use std::collections::BTreeSet;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use strucres::program::Clause;
use strucres::subst::Subst;
use strucres::term::{Term, Var};
use strucres::unify::{embeds, mgm, mgu, rename_apart, rename_clause_lazy, variant, UnifyOutcome, VarSupply};

fn unifier(a: &Term, b: &Term) -> Subst {
    match mgu(a, b, true) {
        Some(UnifyOutcome::Unifier(s)) => s,
        other => panic!("expected a finite unifier for {a} and {b}, got {other:?}"),
    }
}

fn random_term(rng: &mut StdRng, depth: usize) -> Term {
    if depth == 0 || rng.gen_range(0..3) == 0 {
        return match rng.gen_range(0..5) {
            0 => Term::atom("a"),
            1 => Term::atom("0"),
            2 => Term::var("X"),
            3 => Term::var("Y"),
            _ => Term::var("Z"),
        };
    }
    match rng.gen_range(0..3) {
        0 => Term::app("f", vec![random_term(rng, depth - 1), random_term(rng, depth - 1)]),
        1 => Term::app("g", vec![random_term(rng, depth - 1)]),
        _ => Term::app("s", vec![random_term(rng, depth - 1)]),
    }
}

#[test]
fn unifier_binds_variables_through_shared_structure() {
    let a = Term::app("p", vec![Term::var("X"), Term::app("f", vec![Term::var("X")])]);
    let b = Term::app("p", vec![Term::atom("a"), Term::var("Y")]);
    let s = unifier(&a, &b);
    assert_eq!(s.apply(&a), s.apply(&b), "a unifier equalizes both terms");
    assert_eq!(s.get(&Var::source("X")), Some(&Term::atom("a")));
    assert_eq!(
        s.get(&Var::source("Y")).unwrap().to_string(),
        "f(a)",
        "Y picks up the instantiated structure"
    );
}

#[test]
fn unification_fails_on_clashing_functors() {
    assert!(mgu(&Term::atom("a"), &Term::atom("b"), true).is_none());
    assert!(mgu(
        &Term::app("f", vec![Term::var("X")]),
        &Term::app("g", vec![Term::var("X")]),
        true
    )
    .is_none());
}

#[test]
fn occurs_check_rejects_cyclic_solutions() {
    let x = Term::var("X");
    let fx = Term::app("f", vec![Term::var("X")]);
    assert!(mgu(&x, &fx, true).is_none(), "X = f(X) has no finite solution");
}

#[test]
fn without_occurs_check_cyclic_solutions_come_back_as_equations() {
    let x = Term::var("X");
    let fx = Term::app("f", vec![Term::var("X")]);
    match mgu(&x, &fx, false) {
        Some(UnifyOutcome::Rational(r)) => {
            assert!(r.cyclic.contains(&Var::source("X")), "X is the cyclic variable");
            assert_eq!(r.bindings[&Var::source("X")].to_string(), "f(X)");
        }
        other => panic!("expected a rational solution, got {other:?}"),
    }
}

#[test]
fn mutually_recursive_equations_terminate_without_occurs_check() {
    // X and Y only unify through each other; the solved form is a pair of
    // mutually recursive equations.
    let a = Term::app("p", vec![Term::var("X"), Term::var("Y"), Term::var("X")]);
    let b = Term::app(
        "p",
        vec![
            Term::app("g", vec![Term::var("Y")]),
            Term::app("g", vec![Term::var("X")]),
            Term::var("Y"),
        ],
    );
    assert!(mgu(&a, &b, true).is_none(), "no finite solution exists");
    match mgu(&a, &b, false) {
        Some(UnifyOutcome::Rational(r)) => {
            assert!(!r.cyclic.is_empty(), "the cycle through X and Y is reported");
        }
        other => panic!("expected a rational solution, got {other:?}"),
    }
}

#[test]
fn unifiers_are_idempotent_on_random_pairs() {
    let mut rng = StdRng::seed_from_u64(23);
    let mut unified = 0;
    for _ in 0..400 {
        let a = random_term(&mut rng, 3);
        let b = random_term(&mut rng, 3);
        if let Some(UnifyOutcome::Unifier(s)) = mgu(&a, &b, true) {
            unified += 1;
            assert!(s.is_idempotent(), "mgu({a}, {b}) = {s} must be idempotent");
            assert_eq!(s.apply(&a), s.apply(&b), "mgu({a}, {b}) = {s} must equalize");
        }
    }
    assert!(unified > 50, "the generator should produce plenty of unifiable pairs");
}

#[test]
fn matching_instantiates_only_the_pattern() {
    let pattern = Term::app("conn", vec![Term::var("X"), Term::var("Y")]);
    let subject = Term::app("conn", vec![Term::atom("a"), Term::atom("b")]);
    let theta = mgm(&pattern, &subject).expect("the pattern generalizes the subject");
    assert_eq!(theta.apply(&pattern), subject);
    assert_eq!(
        mgm(&subject, &pattern),
        None,
        "a ground pattern never matches onto a variable subject"
    );
}

#[test]
fn matching_refuses_to_bind_subject_variables() {
    // The subject's variable would need instantiating, which matching must
    // never do: this is what separates rewriting from resolution.
    let pattern = Term::app("nats", vec![Term::app("scons", vec![Term::var("X"), Term::var("Y")])]);
    let subject = Term::app("nats", vec![Term::var("S")]);
    assert_eq!(mgm(&pattern, &subject), None);
    assert!(
        matches!(mgu(&pattern.clone(), &subject, true), Some(UnifyOutcome::Unifier(_))),
        "the same pair unifies once subject instantiation is allowed"
    );
}

#[test]
fn matching_respects_nonlinear_patterns() {
    let pattern = Term::app("p", vec![Term::var("X"), Term::var("X")]);
    let same = Term::app("p", vec![Term::atom("a"), Term::atom("a")]);
    let diff = Term::app("p", vec![Term::atom("a"), Term::atom("b")]);
    assert!(mgm(&pattern, &same).is_some());
    assert_eq!(mgm(&pattern, &diff), None, "repeated pattern variables must agree");
}

#[test]
fn matching_allows_shared_names_between_pattern_and_subject() {
    let pattern = Term::app("p", vec![Term::var("X")]);
    let subject = Term::app("p", vec![Term::var("X")]);
    let theta = mgm(&pattern, &subject).expect("a pattern variable may match itself");
    assert_eq!(theta.apply(&pattern), subject);
}

#[test]
fn rename_apart_refreshes_every_clause_variable() {
    let c = Clause::new(
        Term::app("p", vec![Term::var("X")]),
        vec![Term::app("q", vec![Term::var("X"), Term::var("Y")])],
    );
    let mut supply = VarSupply::new();
    let r = rename_apart(&c, &mut supply);
    assert!(r.vars().is_disjoint(&c.vars()), "no original variable survives");
    assert_eq!(r.vars().len(), c.vars().len(), "distinct variables stay distinct");
}

#[test]
fn lazy_renaming_touches_only_colliding_variables() {
    let c = Clause::new(
        Term::app("p", vec![Term::var("X")]),
        vec![Term::app("q", vec![Term::var("X"), Term::var("Y")])],
    );
    let mut supply = VarSupply::new();
    let used: BTreeSet<Var> = [Var::source("X")].into_iter().collect();
    let r = rename_clause_lazy(&c, &used, &mut supply);
    assert!(!r.vars().contains(&Var::source("X")), "the colliding X is renamed");
    assert!(r.vars().contains(&Var::source("Y")), "the free Y keeps its name");
    let untouched = rename_clause_lazy(&c, &BTreeSet::new(), &mut supply);
    assert_eq!(untouched, c, "nothing collides, nothing changes");
}

#[test]
fn variants_are_renamings_in_both_directions() {
    let a = Term::app("p", vec![Term::var("X"), Term::var("Y")]);
    let b = Term::app("p", vec![Term::var("Y"), Term::var("X")]);
    let c = Term::app("p", vec![Term::var("X"), Term::var("X")]);
    assert!(variant(&a, &b), "swapping names is still a variant");
    assert!(!variant(&a, &c), "collapsing two variables is not");
    assert!(!variant(&c, &a), "nor is splitting one into two");
}

#[test]
fn homeomorphic_embedding_dives_and_couples() {
    let nat_x = Term::app("nat", vec![Term::var("X")]);
    let nat_sx = Term::app("nat", vec![Term::app("s", vec![Term::var("X")])]);
    assert!(embeds(&nat_x, &nat_sx), "the smaller goal embeds by diving through s");
    assert!(!embeds(&nat_sx, &nat_x), "embedding is not symmetric");
    assert!(embeds(&nat_x, &nat_x), "embedding is reflexive");
    let fxy = Term::app("f", vec![Term::var("X"), Term::atom("a")]);
    let big = Term::app("g", vec![Term::app("f", vec![Term::app("s", vec![Term::var("X")]), Term::atom("a")])]);
    assert!(embeds(&fxy, &big), "coupling under f after diving through g");
}

#[test]
fn variable_supply_generations_are_strictly_increasing() {
    let mut supply = VarSupply::new();
    let g1 = supply.fresh_gen();
    let g2 = supply.fresh_gen();
    assert!(g2 > g1, "each generation is fresh");
}
