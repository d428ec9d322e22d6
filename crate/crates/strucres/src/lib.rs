//! A structural-resolution engine for Horn-clause logic programs.
//!
//! Classical SLD-resolution performs unification and goal expansion in a
//! single step. This library factors that step into its two ingredients —
//! matching-based *rewriting*, which never instantiates goal variables, and
//! unification-based *substitution* — and builds proof search on top of the
//! split. The rewriting half of a derivation is finitely observable whenever
//! the program is *observationally productive* (rewriting is strongly
//! normalising), and that property gates the coinductive features: loop
//! detection may close a branch with a circular (rational) answer only for
//! productive programs, and infinite non-circular answers can still be
//! observed to any finite depth.
//!
//! Module map:
//!
//! * [`term`] — first-order terms as finitely branching trees; positions,
//!   truncation, and the dyadic ultrametric on terms.
//! * [`subst`] — substitutions, application, composition.
//! * [`rational`] — circular bindings, equation systems, finite unfolding.
//! * [`unify`] — most general matchers and unifiers (occurs check optional),
//!   resolvent classification, renaming, variants, embeddings.
//! * [`program`] — clauses, programs, predicate typing, the example corpus.
//! * [`parser`] — the `.lp` front end.
//! * [`reduction`] — the three reduction relations on goal lists, normal
//!   forms, and the observational-productivity semi-decision.
//! * [`rewtree`] — rewriting trees, substitution on trees, success subtrees,
//!   tree transitions, DOT export.
//! * [`search`] — refutation search, an SLD baseline, gated coinductive loop
//!   detection, finite observation of infinite answers, and
//!   implied-at-infinity checking.
//! * [`oracle`] — brute-force ground-model approximation used as ground
//!   truth in tests.

pub mod oracle;
pub mod parser;
pub mod program;
pub mod rational;
pub mod reduction;
pub mod rewtree;
pub mod search;
pub mod subst;
pub mod term;
pub mod unify;

pub use program::{Clause, GoalClause, PredType, Program, Signature, TypingFunction};
pub use subst::Subst;
pub use term::{Position, Term, Var};
pub use unify::VarSupply;

/// Default step budget used by normalisation, search, and tree construction
/// when the caller does not specify one.
pub const DEFAULT_FUEL: usize = 10_000;
