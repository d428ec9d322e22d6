//! Substitutions: finite maps from variables to terms.
//!
//! Application walks the term once and replaces each variable by its image,
//! so the result is correct for idempotent substitutions (the only kind the
//! unification module produces). Composition is the usual
//! `compose(outer, inner)(x) = outer(inner(x))`, with identity bindings
//! dropped so substitutions stay minimal and print cleanly.

use std::collections::BTreeMap;
use std::collections::BTreeSet;
use std::fmt;

use crate::term::{Term, Var};

/// A substitution, stored as an ordered map for deterministic iteration and
/// display.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct Subst(BTreeMap<Var, Term>);

impl Subst {
    /// The identity substitution.
    pub fn id() -> Subst {
        Subst(BTreeMap::new())
    }

    pub fn is_id(&self) -> bool {
        self.0.is_empty()
    }

    pub fn singleton(v: Var, t: Term) -> Subst {
        let mut m = BTreeMap::new();
        if Term::Var(v.clone()) != t {
            m.insert(v, t);
        }
        Subst(m)
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (Var, Term)>) -> Subst {
        let mut m = BTreeMap::new();
        for (v, t) in pairs {
            if Term::Var(v.clone()) != t {
                m.insert(v, t);
            }
        }
        Subst(m)
    }

    pub fn get(&self, v: &Var) -> Option<&Term> {
        self.0.get(v)
    }

    pub fn bind(&mut self, v: Var, t: Term) {
        if Term::Var(v.clone()) == t {
            self.0.remove(&v);
        } else {
            self.0.insert(v, t);
        }
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Var, &Term)> {
        self.0.iter()
    }

    pub fn domain(&self) -> impl Iterator<Item = &Var> {
        self.0.keys()
    }

    /// Variables occurring in the range of the substitution.
    pub fn range_vars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        for t in self.0.values() {
            t.collect_vars(&mut out);
        }
        out
    }

    /// Applies the substitution to a term with a single pass: each variable
    /// is looked up exactly once and its image copied verbatim.
    pub fn apply(&self, t: &Term) -> Term {
        if self.0.is_empty() {
            return t.clone();
        }
        match t {
            Term::Var(v) => match self.0.get(v) {
                Some(img) => img.clone(),
                None => t.clone(),
            },
            Term::App(f, args) => {
                Term::App(f.clone(), args.iter().map(|a| self.apply(a)).collect())
            }
        }
    }

    /// Applies the substitution to each atom of a goal.
    pub fn apply_goal(&self, goal: &[Term]) -> Vec<Term> {
        goal.iter().map(|t| self.apply(t)).collect()
    }

    /// Composition: the substitution mapping `x` to `outer(inner(x))` for
    /// `x` in the domain of `inner`, and to `outer(x)` for the remaining
    /// variables of `outer`'s domain.
    pub fn compose(outer: &Subst, inner: &Subst) -> Subst {
        let mut m = BTreeMap::new();
        for (v, t) in &inner.0 {
            let img = outer.apply(t);
            if Term::Var(v.clone()) != img {
                m.insert(v.clone(), img);
            }
        }
        for (v, t) in &outer.0 {
            if !inner.0.contains_key(v) && Term::Var(v.clone()) != *t {
                m.insert(v.clone(), t.clone());
            }
        }
        Subst(m)
    }

    /// Restriction of the substitution to the given variables.
    pub fn restrict(&self, keep: &BTreeSet<Var>) -> Subst {
        Subst(
            self.0
                .iter()
                .filter(|(v, _)| keep.contains(v))
                .map(|(v, t)| (v.clone(), t.clone()))
                .collect(),
        )
    }

    /// True when applying the substitution twice equals applying it once,
    /// i.e. no range term mentions a domain variable.
    pub fn is_idempotent(&self) -> bool {
        self.0
            .values()
            .all(|t| t.vars().iter().all(|v| !self.0.contains_key(v)))
    }
}

impl fmt::Display for Subst {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "id");
        }
        write!(f, "{{")?;
        for (i, (v, t)) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{} ↦ {}", v, t)?;
        }
        write!(f, "}}")
    }
}

impl FromIterator<(Var, Term)> for Subst {
    fn from_iter<I: IntoIterator<Item = (Var, Term)>>(iter: I) -> Self {
        Subst::from_pairs(iter)
    }
}
