//! First-order terms viewed as finitely branching trees.
//!
//! A term is either a variable or a function symbol applied to argument
//! terms; a node of the tree is addressed by a [`Position`] (a path of child
//! indices). On top of the tree view the module provides depth-`n`
//! truncation with the reserved placeholder symbol [`DIAMOND`], the
//! similarity depth [`gamma`], and the induced ultrametric [`distance`],
//! kept as exact dyadic rationals so tests can compare them without any
//! floating-point slack.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;

/// Reserved nullary symbol that stands for a cut-off subtree in a
/// truncation. It is not accepted by the parser and never occurs in source
/// programs.
pub const DIAMOND: &str = "◇";

/// ASCII rendering of [`DIAMOND`] used by [`Term::display_ascii`].
pub const DIAMOND_ASCII: &str = "?diamond?";

/// A first-order variable: the name it had in the source text plus a
/// renaming generation. Generation 0 is reserved for variables exactly as
/// written; renaming allocates fresh generations and keeps the base name, so
/// a renamed `X` prints as `X_17` rather than an opaque fresh symbol.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Var {
    pub name: String,
    pub gen: u64,
}

impl Var {
    /// A variable as written in source text (generation 0).
    pub fn source(name: impl Into<String>) -> Self {
        Var { name: name.into(), gen: 0 }
    }

    /// A renamed variable with an explicit generation.
    pub fn with_gen(name: impl Into<String>, gen: u64) -> Self {
        Var { name: name.into(), gen }
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.gen == 0 {
            write!(f, "{}", self.name)
        } else {
            write!(f, "{}_{}", self.name, self.gen)
        }
    }
}

/// A finite first-order term.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Term {
    Var(Var),
    App(String, Vec<Term>),
}

impl Term {
    /// Variable term with a source-level name.
    pub fn var(name: impl Into<String>) -> Term {
        Term::Var(Var::source(name))
    }

    /// Application of `symbol` to `args`.
    pub fn app(symbol: impl Into<String>, args: Vec<Term>) -> Term {
        Term::App(symbol.into(), args)
    }

    /// Nullary application (a constant).
    pub fn atom(symbol: impl Into<String>) -> Term {
        Term::App(symbol.into(), Vec::new())
    }

    /// The truncation placeholder `◇`.
    pub fn diamond() -> Term {
        Term::atom(DIAMOND)
    }

    /// Root symbol and arity, if this is an application.
    pub fn functor(&self) -> Option<(&str, usize)> {
        match self {
            Term::Var(_) => None,
            Term::App(f, args) => Some((f.as_str(), args.len())),
        }
    }

    pub fn is_var(&self) -> bool {
        matches!(self, Term::Var(_))
    }

    pub fn is_ground(&self) -> bool {
        match self {
            Term::Var(_) => false,
            Term::App(_, args) => args.iter().all(Term::is_ground),
        }
    }

    /// Maximum position length in the term's tree; a constant has depth 0.
    pub fn depth(&self) -> usize {
        match self {
            Term::Var(_) => 0,
            Term::App(_, args) => args.iter().map(Term::depth).max().map_or(0, |d| d + 1),
        }
    }

    /// All variables occurring in the term.
    pub fn vars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    pub(crate) fn collect_vars(&self, out: &mut BTreeSet<Var>) {
        match self {
            Term::Var(v) => {
                out.insert(v.clone());
            }
            Term::App(_, args) => {
                for a in args {
                    a.collect_vars(out);
                }
            }
        }
    }

    /// Variables in order of first occurrence (left to right, outside in).
    pub fn vars_in_order(&self) -> Vec<Var> {
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        self.collect_vars_in_order(&mut seen, &mut out);
        out
    }

    fn collect_vars_in_order(&self, seen: &mut BTreeSet<Var>, out: &mut Vec<Var>) {
        match self {
            Term::Var(v) => {
                if seen.insert(v.clone()) {
                    out.push(v.clone());
                }
            }
            Term::App(_, args) => {
                for a in args {
                    a.collect_vars_in_order(seen, out);
                }
            }
        }
    }

    /// The subterm rooted at `pos`, if the position is in the term's domain.
    pub fn subterm(&self, pos: &Position) -> Option<&Term> {
        let mut cur = self;
        for &i in pos.indices() {
            match cur {
                Term::Var(_) => return None,
                Term::App(_, args) => cur = args.get(i)?,
            }
        }
        Some(cur)
    }

    /// All positions of the term, sorted by depth and then lexicographically
    /// (breadth-first order).
    pub fn positions(&self) -> Vec<Position> {
        let mut out = Vec::new();
        let mut stack = vec![(Position::root(), self)];
        while let Some((pos, t)) = stack.pop() {
            if let Term::App(_, args) = t {
                for (i, a) in args.iter().enumerate() {
                    stack.push((pos.child(i), a));
                }
            }
            out.push(pos);
        }
        out.sort();
        out
    }

    /// True when some variable occurs at a position of length `< n`.
    /// Used to decide whether an observation already determines the first
    /// `n` levels of the instantiated goal.
    pub fn has_var_above_depth(&self, n: usize) -> bool {
        if n == 0 {
            return false;
        }
        match self {
            Term::Var(_) => true,
            Term::App(_, args) => args.iter().any(|a| a.has_var_above_depth(n - 1)),
        }
    }

    /// The term with variables renamed to a canonical sequence in order of
    /// first occurrence, so two terms are variants exactly when their
    /// canonical forms are equal.
    pub fn alpha_canonical(&self) -> Term {
        let renaming: std::collections::BTreeMap<Var, Var> = self
            .vars_in_order()
            .into_iter()
            .enumerate()
            .map(|(i, v)| (v, Var::with_gen("V", i as u64 + 1)))
            .collect();
        fn go(t: &Term, renaming: &std::collections::BTreeMap<Var, Var>) -> Term {
            match t {
                Term::Var(v) => Term::Var(renaming[v].clone()),
                Term::App(f, args) => {
                    Term::App(f.clone(), args.iter().map(|a| go(a, renaming)).collect())
                }
            }
        }
        go(self, &renaming)
    }

    /// Renders the term with `◇` replaced by its ASCII spelling.
    pub fn display_ascii(&self) -> String {
        match self {
            Term::Var(v) => v.to_string(),
            Term::App(f, args) => {
                let f = if f == DIAMOND { DIAMOND_ASCII } else { f.as_str() };
                if args.is_empty() {
                    f.to_string()
                } else {
                    let inner: Vec<String> = args.iter().map(Term::display_ascii).collect();
                    format!("{}({})", f, inner.join(", "))
                }
            }
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) => write!(f, "{}", v),
            Term::App(sym, args) => {
                write!(f, "{}", sym)?;
                if !args.is_empty() {
                    write!(f, "(")?;
                    for (i, a) in args.iter().enumerate() {
                        if i > 0 {
                            write!(f, ", ")?;
                        }
                        write!(f, "{}", a)?;
                    }
                    write!(f, ")")?;
                }
                Ok(())
            }
        }
    }
}

/// A path of child indices addressing a node in a term or in a rewriting
/// tree. Positions are ordered by length first and lexicographically second,
/// which is breadth-first order over any tree.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct Position(Vec<usize>);

impl Position {
    pub fn root() -> Position {
        Position(Vec::new())
    }

    pub fn from_indices(ix: impl Into<Vec<usize>>) -> Position {
        Position(ix.into())
    }

    pub fn child(&self, i: usize) -> Position {
        let mut v = self.0.clone();
        v.push(i);
        Position(v)
    }

    pub fn parent(&self) -> Option<Position> {
        if self.0.is_empty() {
            None
        } else {
            Some(Position(self.0[..self.0.len() - 1].to_vec()))
        }
    }

    pub fn last(&self) -> Option<usize> {
        self.0.last().copied()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn indices(&self) -> &[usize] {
        &self.0
    }
}

impl Ord for Position {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0
            .len()
            .cmp(&other.0.len())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Position {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            write!(f, "ε")
        } else {
            let parts: Vec<String> = self.0.iter().map(usize::to_string).collect();
            write!(f, "{}", parts.join("."))
        }
    }
}

/// Depth-`n` truncation: positions strictly above depth `n` keep their
/// labels, every node at depth exactly `n` becomes the placeholder `◇`, and
/// everything below is cut. `truncate(0, t)` is `◇` for any `t`.
pub fn truncate(n: usize, t: &Term) -> Term {
    if n == 0 {
        return Term::diamond();
    }
    match t {
        Term::Var(v) => Term::Var(v.clone()),
        Term::App(f, args) => {
            let kids = args.iter().map(|a| truncate(n - 1, a)).collect();
            Term::App(f.clone(), kids)
        }
    }
}

/// Similarity depth of two terms: the least `n` such that the depth-`n`
/// truncations of `s` and `t` differ, or `None` when `s = t` (all
/// truncations agree). Since depth-0 truncations are both `◇`, the result is
/// at least 1 for distinct terms.
pub fn gamma(s: &Term, t: &Term) -> Option<usize> {
    first_difference(s, t).map(|d| d + 1)
}

/// Least depth of a position where the two terms carry different labels.
fn first_difference(s: &Term, t: &Term) -> Option<usize> {
    match (s, t) {
        (Term::Var(a), Term::Var(b)) => {
            if a == b {
                None
            } else {
                Some(0)
            }
        }
        (Term::App(f, fa), Term::App(g, ga)) => {
            if f != g || fa.len() != ga.len() {
                Some(0)
            } else {
                fa.iter()
                    .zip(ga)
                    .filter_map(|(a, b)| first_difference(a, b))
                    .min()
                    .map(|d| d + 1)
            }
        }
        _ => Some(0),
    }
}

/// An exact dyadic distance value: either 0 or `2^(-exp)` with `exp ≥ 1`.
/// Ordered as a rational number, so ultrametric laws can be asserted with
/// plain comparisons.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum Distance {
    Zero,
    /// The value `2^(-exp)`.
    Dyadic { exp: usize },
}

impl Distance {
    pub fn is_zero(&self) -> bool {
        matches!(self, Distance::Zero)
    }
}

impl Ord for Distance {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Distance::Zero, Distance::Zero) => Ordering::Equal,
            (Distance::Zero, Distance::Dyadic { .. }) => Ordering::Less,
            (Distance::Dyadic { .. }, Distance::Zero) => Ordering::Greater,
            // Larger exponent means a smaller value.
            (Distance::Dyadic { exp: a }, Distance::Dyadic { exp: b }) => b.cmp(a),
        }
    }
}

impl PartialOrd for Distance {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Distance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Distance::Zero => write!(f, "0"),
            Distance::Dyadic { exp } if *exp <= 127 => write!(f, "1/{}", 1u128 << exp),
            Distance::Dyadic { exp } => write!(f, "2^-{}", exp),
        }
    }
}

/// The ultrametric distance on terms: 0 when the terms are equal and
/// `2^(-gamma(s,t))` otherwise.
pub fn distance(s: &Term, t: &Term) -> Distance {
    match gamma(s, t) {
        None => Distance::Zero,
        Some(exp) => Distance::Dyadic { exp },
    }
}
