//! Parsing programs and queries, signature hygiene, typing directives, and
//! the embedded example corpus.

use strucres::parser::{parse_program, parse_query, ParseError};
use strucres::program::{corpus, PredType};
use strucres::term::Term;

#[test]
fn a_program_parses_into_ordered_clauses() {
    let (p, ty, sig) = parse_program("conn(X,Y) :- conn(X,Z), conn(Z,Y).\nconn(a,b).\nconn(b,c).\n")
        .expect("valid source");
    assert_eq!(p.arity(), 3, "program arity counts clauses");
    assert_eq!(p.clause(0).body.len(), 2, "clause order preserves the source");
    assert!(p.clause(1).is_fact());
    assert_eq!(sig.predicates["conn"], 2);
    assert_eq!(ty.get("conn"), PredType::Inductive, "untyped predicates default to inductive");
}

#[test]
fn coinductive_directives_mark_predicates() {
    let src = ":- coinductive nats/1.\nnat(0).\nnat(s(X)) :- nat(X).\nnats(scons(X,Y)) :- nat(X), nats(Y).\n";
    let (_, ty, _) = parse_program(src).expect("valid source");
    assert!(ty.is_coinductive("nats"));
    assert!(!ty.is_coinductive("nat"));
    assert_eq!(ty.coinductive_predicates().collect::<Vec<_>>(), vec!["nats"]);
}

#[test]
fn comments_and_whitespace_are_ignored() {
    let src = "% naturals\nnat(0). % zero\n\n  nat(s(X)) :-\n     nat(X).\n";
    let (p, _, _) = parse_program(src).expect("valid source");
    assert_eq!(p.arity(), 2);
}

#[test]
fn display_and_parse_roundtrip_on_the_corpus() {
    for (name, p) in corpus() {
        let printed = p.to_string();
        let (reparsed, _, _) =
            parse_program(&printed).unwrap_or_else(|e| panic!("{name} reprints parseably: {e}"));
        assert_eq!(reparsed, p, "printing then parsing {name} is the identity");
    }
}

#[test]
fn corpus_contains_the_expected_programs() {
    let programs = corpus();
    assert_eq!(programs.len(), 14);
    assert_eq!(programs["P1"].arity(), 2);
    assert_eq!(programs["P6"].arity(), 3);
    assert_eq!(programs["P8"].arity(), 7);
    assert_eq!(
        programs["P6"].clause(0).predicate(),
        Some(("conn", 2)),
        "the transitive clause comes first in the connectivity program"
    );
    let preds = programs["P8"].predicates();
    assert_eq!(preds["fibs"], 3);
    assert_eq!(preds["fibnats"], 2);
}

#[test]
fn queries_parse_as_goal_bodies() {
    let g = parse_query("?- nats(X).").expect("valid query");
    assert_eq!(g.body.len(), 1);
    assert_eq!(g.to_string(), "?- nats(X).");
    let multi = parse_query("?- nat(X), nats(Y).").expect("valid query");
    assert_eq!(multi.body.len(), 2);
}

#[test]
fn arity_clashes_are_rejected() {
    let err = parse_program("p(a).\np(a,b).\n").unwrap_err();
    match err {
        ParseError::ArityClash { symbol, first, second } => {
            assert_eq!(symbol, "p");
            assert_eq!((first, second), (1, 2));
        }
        other => panic!("expected an arity clash, got {other}"),
    }
}

#[test]
fn predicate_and_function_namespaces_stay_apart() {
    let err = parse_program("p(s(a)).\ns(a).\n").unwrap_err();
    match err {
        ParseError::NamespaceClash { symbol } => assert_eq!(symbol, "s"),
        other => panic!("expected a namespace clash, got {other}"),
    }
}

#[test]
fn directive_arity_must_match_usage() {
    let err = parse_program(":- coinductive nats/2.\nnats(scons(X,Y)) :- nats(Y).\n").unwrap_err();
    match err {
        ParseError::DirectiveArity { predicate, declared, inferred } => {
            assert_eq!(predicate, "nats");
            assert_eq!((declared, inferred), (2, 1));
        }
        other => panic!("expected a directive arity error, got {other}"),
    }
}

#[test]
fn syntax_errors_carry_a_position() {
    let err = parse_program("nat(0.\n").unwrap_err();
    match err {
        ParseError::Syntax { line, .. } => assert_eq!(line, 1),
        other => panic!("expected a syntax error, got {other}"),
    }
    assert!(parse_query("?- .").is_err(), "an empty goal body is not a query");
    assert!(parse_query("nat(0).").is_err(), "queries must start with ?-");
}

#[test]
fn variables_are_uppercase_and_symbols_lowercase() {
    let (p, _, _) = parse_program("likes(alice, X) :- likes(X, alice).\n").expect("valid source");
    let clause = p.clause(0);
    assert!(!clause.head.is_ground());
    let args = match &clause.head {
        Term::App(_, args) => args,
        _ => unreachable!(),
    };
    assert!(matches!(args[0], Term::App(_, _)), "alice is a constant");
    assert!(matches!(args[1], Term::Var(_)), "X is a variable");
}

#[test]
fn goal_clauses_print_with_the_query_prefix() {
    let g = parse_query("?- conn(a, c).").expect("valid query");
    let clause = g.to_clause();
    assert!(clause.is_goal());
    assert_eq!(clause.to_string(), "?- conn(a, c).");
}

#[test]
fn the_shipped_program_files_match_the_embedded_corpus() {
    let programs = corpus();
    let dir = std::path::PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../programs");
    for (key, expected) in &programs {
        let file = dir.join(format!("{}.lp", key.to_lowercase()));
        let source = std::fs::read_to_string(&file)
            .unwrap_or_else(|e| panic!("cannot read {}: {e}", file.display()));
        let (parsed, _, _) = parse_program(&source)
            .unwrap_or_else(|e| panic!("{} must parse: {e}", file.display()));
        assert_eq!(&parsed, expected, "{} drifted from the embedded corpus", file.display());
    }
}
