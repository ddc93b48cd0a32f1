//! Tolerance constraints: extraction from an abstract transition system,
//! mapping onto an adder signature `z = x op y`, and the constraint file
//! format.

mod smt;

use std::collections::BTreeSet;

use thiserror::Error;

use crate::abstraction::Ats;
use crate::frontend::{BinOp, Loc, ThreeAddress};
use crate::logic::{entails, substitute, CmpOp, Conjunction, Entailment, LinExpr, LinearAtom, Operand};

pub use smt::{parse, parse_file, serialize, write_file};

pub const X: &str = "x";
pub const Y: &str = "y";
pub const Z: &str = "z";

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum ToleranceError {
    #[error("hardware signature name `{0}` is also a program variable")]
    Collision(String),
    #[error("{line}:{col}: {msg}")]
    Parse { line: usize, col: usize, msg: String },
}

/// The (pre, post) pairs recorded for one `u := v op w` edge.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ToleranceConstraint {
    pub statement: ThreeAddress,
    pub edge: usize,
    pub from: Loc,
    pub to: Loc,
    pub pairs: Vec<(Conjunction, Conjunction)>,
}

/// One constraint per edge applying `op` whose source state is not `Bottom`.
pub fn extract(ats: &Ats, op: BinOp) -> Vec<ToleranceConstraint> {
    ats.transitions
        .iter()
        .filter(|t| !t.pre.is_bottom() && !t.post.is_bottom())
        .filter_map(|t| {
            let statement = t.stmt.three_address()?;
            (statement.op == op).then(|| ToleranceConstraint {
                statement,
                edge: t.edge,
                from: t.from,
                to: t.to,
                pairs: vec![(t.pre.clone(), t.post.clone())],
            })
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Signature {
    /// The statement as written, e.g. `j := j + 10`.
    pub statement: String,
    pub op: BinOp,
    pub target: String,
    pub lhs: Operand,
    pub rhs: Operand,
    /// Remaining free variables of the mapped conditions, sorted.
    pub side: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MappedPair {
    pub pre: Conjunction,
    pub post: Conjunction,
}

/// A constraint over the hardware inputs `x`, `y`, output `z` and side
/// variables. The adder must satisfy every pair.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MappedConstraint {
    pub signature: Signature,
    pub pairs: Vec<MappedPair>,
}

impl MappedConstraint {
    pub fn side_vars(&self) -> &[String] {
        &self.signature.side
    }

    /// Whether an adder output `z` for inputs `x`, `y` and side values
    /// violates some pair. `None` if a variable is unbound.
    pub fn violates(&self, env: impl Fn(&str) -> Option<i128> + Copy) -> Option<bool> {
        for p in &self.pairs {
            if p.pre.holds(env)? && !p.post.holds(env)? {
                return Some(true);
            }
        }
        Some(false)
    }
}

fn eq_lit(a: &str, b: &str) -> LinearAtom {
    LinearAtom::new(&LinExpr::var(a), CmpOp::Eq, &LinExpr::var(b))
}

fn map_pair(s: &ThreeAddress, pre: &Conjunction, post: &Conjunction) -> MappedPair {
    let u = s.target.as_str();
    let is_operand = |name: &str| s.lhs.as_var() == Some(name) || s.rhs.as_var() == Some(name);
    // The target's old value plays no role in the operation.
    let pre = if is_operand(u) { pre.clone() } else { pre.retain(|l| !l.mentions(u)) };
    let mut mapping = vec![(s.lhs.clone(), X.to_string())];
    let same_var = s.lhs.as_var().is_some() && s.lhs == s.rhs;
    if !same_var {
        mapping.push((s.rhs.clone(), Y.to_string()));
    }
    let mut mpre = substitute(&pre, &mapping).expect("signature names checked fresh");
    if same_var {
        mpre = mpre.with(eq_lit(Y, X));
    }

    let mut mpost = post.rename(u, Z);
    for (operand, hw) in [(&s.lhs, X), (&s.rhs, Y)] {
        if let Some(v) = operand.as_var() {
            if v != u && !(same_var && hw == Y) {
                mpost = mpost.rename(v, hw);
            }
        }
    }
    let mpre = mpre.minimized();
    // Conjuncts already implied by the precondition carry no obligation.
    let mpost = mpost.retain(|l| l.mentions(Z) || entails(&mpre, l) != Entailment::Proved).minimized();
    MappedPair { pre: mpre, post: mpost }
}

/// `(pre[v ↤ x, w ↤ y], post[u ↤ z])` for each pair.
pub fn map_to_signature(tc: &ToleranceConstraint) -> Result<MappedConstraint, ToleranceError> {
    let s = &tc.statement;
    let mut names: BTreeSet<String> = BTreeSet::new();
    names.insert(s.target.clone());
    names.extend(s.lhs.as_var().map(String::from));
    names.extend(s.rhs.as_var().map(String::from));
    for (pre, post) in &tc.pairs {
        names.extend(pre.vars());
        names.extend(post.vars());
    }
    for hw in [X, Y, Z] {
        if names.contains(hw) {
            return Err(ToleranceError::Collision(hw.to_string()));
        }
    }
    let pairs: Vec<MappedPair> = tc.pairs.iter().map(|(pre, post)| map_pair(s, pre, post)).collect();
    let side: BTreeSet<String> = pairs
        .iter()
        .flat_map(|p| p.pre.vars().into_iter().chain(p.post.vars()))
        .filter(|v| ![X, Y, Z].contains(&v.as_str()))
        .collect();
    Ok(MappedConstraint {
        signature: Signature {
            statement: s.to_string(),
            op: s.op,
            target: s.target.clone(),
            lhs: s.lhs.clone(),
            rhs: s.rhs.clone(),
            side: side.into_iter().collect(),
        },
        pairs,
    })
}
