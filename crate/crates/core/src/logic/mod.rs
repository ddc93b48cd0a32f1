//! Literals, conjunctions, the replacement operator and a sound entailment
//! check for linear integer arithmetic.

mod fm;
mod linear;

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

pub use fm::{refute_atoms, Refutation, MAX_DISEQ_SPLITS};
pub use linear::{CmpOp, Folded, LinExpr, LinearAtom, Rel};

/// Literals are stored as positive-form atoms: a negated atom is its
/// complementary atom.
pub type Literal = LinearAtom;

/// A variable or an integer constant in operand position.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Operand {
    Var(String),
    Const(i64),
}

impl Operand {
    pub fn as_var(&self) -> Option<&str> {
        match self {
            Operand::Var(v) => Some(v),
            Operand::Const(_) => None,
        }
    }

    pub fn to_lin(&self) -> LinExpr {
        match self {
            Operand::Var(v) => LinExpr::var(v.clone()),
            Operand::Const(c) => LinExpr::constant(*c),
        }
    }
}

impl fmt::Display for Operand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Operand::Var(v) => write!(f, "{}", v),
            Operand::Const(c) => write!(f, "{}", c),
        }
    }
}

/// A conjunction of literals, or the unsatisfiable `Bottom`. The empty
/// conjunction is `true`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Conjunction {
    Bottom,
    And(BTreeSet<Literal>),
}

impl Default for Conjunction {
    fn default() -> Self {
        Conjunction::top()
    }
}

impl Conjunction {
    pub fn top() -> Self {
        Conjunction::And(BTreeSet::new())
    }

    /// Builds a conjunction, collapsing to `Bottom` on a complementary pair
    /// or a constant-false atom.
    pub fn from_folded(items: impl IntoIterator<Item = Folded>) -> Self {
        let mut set = BTreeSet::new();
        for f in items {
            match f {
                Folded::Const(true) => {}
                Folded::Const(false) => return Conjunction::Bottom,
                Folded::Atom(a) => {
                    set.insert(a);
                }
            }
        }
        Self::from_set(set)
    }

    pub fn from_literals(items: impl IntoIterator<Item = Literal>) -> Self {
        Self::from_set(items.into_iter().collect())
    }

    fn from_set(set: BTreeSet<Literal>) -> Self {
        if set.iter().any(|l| set.contains(&l.negate())) {
            Conjunction::Bottom
        } else {
            Conjunction::And(set)
        }
    }

    pub fn is_bottom(&self) -> bool {
        matches!(self, Conjunction::Bottom)
    }

    pub fn is_top(&self) -> bool {
        matches!(self, Conjunction::And(s) if s.is_empty())
    }

    /// Literals; empty for `Bottom`.
    pub fn literals(&self) -> impl Iterator<Item = &Literal> {
        let set = match self {
            Conjunction::And(s) => Some(s),
            Conjunction::Bottom => None,
        };
        set.into_iter().flatten()
    }

    pub fn literal_count(&self) -> usize {
        self.literals().count()
    }

    pub fn contains(&self, lit: &Literal) -> bool {
        matches!(self, Conjunction::And(s) if s.contains(lit))
    }

    pub fn vars(&self) -> BTreeSet<String> {
        self.literals().flat_map(|l| l.var_set()).collect()
    }

    pub fn mentions(&self, var: &str) -> bool {
        self.literals().any(|l| l.mentions(var))
    }

    pub fn with(&self, lit: Literal) -> Conjunction {
        match self {
            Conjunction::Bottom => Conjunction::Bottom,
            Conjunction::And(s) => {
                let mut s = s.clone();
                s.insert(lit);
                Self::from_set(s)
            }
        }
    }

    pub fn retain(&self, keep: impl Fn(&Literal) -> bool) -> Conjunction {
        match self {
            Conjunction::Bottom => Conjunction::Bottom,
            Conjunction::And(s) => Conjunction::And(s.iter().filter(|l| keep(l)).cloned().collect()),
        }
    }

    /// `Some(true/false)` for a total assignment, `None` if a variable is unbound.
    pub fn holds(&self, env: impl Fn(&str) -> Option<i128> + Copy) -> Option<bool> {
        match self {
            Conjunction::Bottom => Some(false),
            Conjunction::And(s) => {
                for l in s {
                    if !l.holds(env)? {
                        return Some(false);
                    }
                }
                Some(true)
            }
        }
    }

    /// Renames a variable in every literal.
    pub fn rename(&self, from: &str, to: &str) -> Conjunction {
        match self {
            Conjunction::Bottom => Conjunction::Bottom,
            Conjunction::And(s) => Self::from_folded(s.iter().map(|l| l.rename(from, to))),
        }
    }

    /// Drops literals entailed by the remaining ones, scanning in order.
    /// The result is equivalent to `self` under [`entails`].
    pub fn minimized(&self) -> Conjunction {
        let Conjunction::And(s) = self else {
            return Conjunction::Bottom;
        };
        if refute(self) == Refutation::Unsat {
            return Conjunction::Bottom;
        }
        let mut kept: Vec<Literal> = s.iter().cloned().collect();
        let mut i = 0;
        while i < kept.len() {
            let others =
                Conjunction::And(kept.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, l)| l.clone()).collect());
            if entails(&others, &kept[i]) == Entailment::Proved {
                kept.remove(i);
            } else {
                i += 1;
            }
        }
        Conjunction::And(kept.into_iter().collect())
    }
}

impl fmt::Display for Conjunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Conjunction::Bottom => write!(f, "false"),
            Conjunction::And(s) if s.is_empty() => write!(f, "true"),
            Conjunction::And(s) => {
                for (i, l) in s.iter().enumerate() {
                    if i > 0 {
                        write!(f, " && ")?;
                    }
                    write!(f, "{}", l)?;
                }
                Ok(())
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Entailment {
    Proved,
    Unknown,
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum SubstitutionError {
    #[error("replacement variable `{0}` already occurs in the conjunction")]
    NotFresh(String),
}

/// `Q[old ↤ new]` for each pair: variables are renamed, constants add
/// `new = c`.
pub fn substitute(q: &Conjunction, mapping: &[(Operand, String)]) -> Result<Conjunction, SubstitutionError> {
    for (_, new) in mapping {
        if q.mentions(new) {
            return Err(SubstitutionError::NotFresh(new.clone()));
        }
    }
    let mut out = q.clone();
    for (old, new) in mapping {
        out = match old {
            Operand::Var(v) => out.rename(v, new),
            Operand::Const(c) => {
                out.with(LinearAtom::new(&LinExpr::var(new.clone()), CmpOp::Eq, &LinExpr::constant(*c)))
            }
        };
    }
    Ok(out)
}

pub fn refute(c: &Conjunction) -> Refutation {
    match c {
        Conjunction::Bottom => Refutation::Unsat,
        Conjunction::And(s) => refute_atoms(s.iter()),
    }
}

/// `Proved` only when `ctx ⇒ q` holds over the integers.
pub fn entails(ctx: &Conjunction, q: &Literal) -> Entailment {
    match ctx {
        Conjunction::Bottom => Entailment::Proved,
        Conjunction::And(s) => {
            if s.contains(q) {
                return Entailment::Proved;
            }
            let neg = q.negate();
            if refute_atoms(s.iter().chain(std::iter::once(&neg))) == Refutation::Unsat {
                Entailment::Proved
            } else {
                Entailment::Unknown
            }
        }
    }
}
