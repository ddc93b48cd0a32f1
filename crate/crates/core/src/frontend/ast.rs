use std::collections::BTreeSet;
use std::fmt;

use crate::logic::{CmpOp, Folded, LinExpr, LinearAtom, Operand};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
}

impl BinOp {
    pub fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Div => "/",
        }
    }

    pub fn from_symbol(s: &str) -> Option<BinOp> {
        Some(match s {
            "+" => BinOp::Add,
            "-" => BinOp::Sub,
            "*" => BinOp::Mul,
            "/" => BinOp::Div,
            _ => return None,
        })
    }

    fn precedence(self) -> u8 {
        match self {
            BinOp::Add | BinOp::Sub => 1,
            BinOp::Mul | BinOp::Div => 2,
        }
    }

    pub fn is_commutative(self) -> bool {
        matches!(self, BinOp::Add | BinOp::Mul)
    }
}

impl fmt::Display for BinOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Expr {
    Var(String),
    Const(i64),
    /// Nondeterministic integer source, `input()`.
    Input,
    Bin(BinOp, Box<Expr>, Box<Expr>),
}

impl Expr {
    pub fn var(name: &str) -> Expr {
        Expr::Var(name.to_string())
    }

    pub fn bin(op: BinOp, l: Expr, r: Expr) -> Expr {
        Expr::Bin(op, Box::new(l), Box::new(r))
    }

    pub fn from_operand(o: &Operand) -> Expr {
        match o {
            Operand::Var(v) => Expr::Var(v.clone()),
            Operand::Const(c) => Expr::Const(*c),
        }
    }

    pub fn as_operand(&self) -> Option<Operand> {
        match self {
            Expr::Var(v) => Some(Operand::Var(v.clone())),
            Expr::Const(c) => Some(Operand::Const(*c)),
            _ => None,
        }
    }

    pub fn vars(&self, out: &mut BTreeSet<String>) {
        match self {
            Expr::Var(v) => {
                out.insert(v.clone());
            }
            Expr::Bin(_, l, r) => {
                l.vars(out);
                r.vars(out);
            }
            Expr::Const(_) | Expr::Input => {}
        }
    }

    pub fn uses_op(&self, op: BinOp) -> bool {
        match self {
            Expr::Bin(o, l, r) => *o == op || l.uses_op(op) || r.uses_op(op),
            _ => false,
        }
    }

    pub fn op_count(&self) -> usize {
        match self {
            Expr::Bin(_, l, r) => 1 + l.op_count() + r.op_count(),
            _ => 0,
        }
    }

    /// Linear form, if the expression is linear (products only with a
    /// constant factor; no division, no `input()`).
    pub fn linearize(&self) -> Option<LinExpr> {
        match self {
            Expr::Var(v) => Some(LinExpr::var(v.clone())),
            Expr::Const(c) => Some(LinExpr::constant(*c)),
            Expr::Input => None,
            Expr::Bin(op, l, r) => {
                let (a, b) = (l.linearize()?, r.linearize()?);
                match op {
                    BinOp::Add => Some(a.add(&b)),
                    BinOp::Sub => Some(a.sub(&b)),
                    BinOp::Mul if a.is_constant() => Some(b.scale(a.get_constant())),
                    BinOp::Mul if b.is_constant() => Some(a.scale(b.get_constant())),
                    _ => None,
                }
            }
        }
    }

    pub fn rename(&self, from: &str, to: &str) -> Expr {
        match self {
            Expr::Var(v) if v == from => Expr::Var(to.to_string()),
            Expr::Bin(op, l, r) => Expr::bin(*op, l.rename(from, to), r.rename(from, to)),
            e => e.clone(),
        }
    }

    fn fmt_prec(&self, f: &mut fmt::Formatter<'_>, min: u8, right: bool) -> fmt::Result {
        match self {
            Expr::Var(v) => write!(f, "{}", v),
            Expr::Const(c) if *c < 0 => write!(f, "({})", c),
            Expr::Const(c) => write!(f, "{}", c),
            Expr::Input => write!(f, "input()"),
            Expr::Bin(op, l, r) => {
                let p = op.precedence();
                let paren = p < min || (right && p == min);
                if paren {
                    write!(f, "(")?;
                }
                l.fmt_prec(f, p, false)?;
                write!(f, " {} ", op)?;
                r.fmt_prec(f, p, true)?;
                if paren {
                    write!(f, ")")?;
                }
                Ok(())
            }
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_prec(f, 0, false)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum BExpr {
    Const(bool),
    Cmp(Expr, CmpOp, Expr),
    Not(Box<BExpr>),
    And(Box<BExpr>, Box<BExpr>),
    Or(Box<BExpr>, Box<BExpr>),
}

impl BExpr {
    pub fn negation(b: BExpr) -> BExpr {
        BExpr::Not(Box::new(b))
    }

    pub fn cmp(l: Expr, op: CmpOp, r: Expr) -> BExpr {
        BExpr::Cmp(l, op, r)
    }

    pub fn vars(&self, out: &mut BTreeSet<String>) {
        match self {
            BExpr::Const(_) => {}
            BExpr::Cmp(l, _, r) => {
                l.vars(out);
                r.vars(out);
            }
            BExpr::Not(b) => b.vars(out),
            BExpr::And(a, b) | BExpr::Or(a, b) => {
                a.vars(out);
                b.vars(out);
            }
        }
    }

    /// Every arithmetic subexpression appearing as a comparison side.
    pub fn sides(&self) -> Vec<&Expr> {
        let mut out = Vec::new();
        self.collect_sides(&mut out);
        out
    }

    fn collect_sides<'a>(&'a self, out: &mut Vec<&'a Expr>) {
        match self {
            BExpr::Const(_) => {}
            BExpr::Cmp(l, _, r) => {
                out.push(l);
                out.push(r);
            }
            BExpr::Not(b) => b.collect_sides(out),
            BExpr::And(a, b) | BExpr::Or(a, b) => {
                a.collect_sides(out);
                b.collect_sides(out);
            }
        }
    }

    pub fn map_sides(&self, f: &mut impl FnMut(&Expr) -> Expr) -> BExpr {
        match self {
            BExpr::Const(b) => BExpr::Const(*b),
            BExpr::Cmp(l, op, r) => BExpr::Cmp(f(l), *op, f(r)),
            BExpr::Not(b) => BExpr::negation(b.map_sides(f)),
            BExpr::And(a, b) => BExpr::And(Box::new(a.map_sides(f)), Box::new(b.map_sides(f))),
            BExpr::Or(a, b) => BExpr::Or(Box::new(a.map_sides(f)), Box::new(b.map_sides(f))),
        }
    }

    pub fn rename(&self, from: &str, to: &str) -> BExpr {
        self.map_sides(&mut |e| e.rename(from, to))
    }

    /// Disjunctive normal form over comparison atoms, negations pushed in.
    /// Each disjunct is a list of `(lhs, op, rhs)` comparisons; an empty
    /// disjunct is `true`, an empty outer list is `false`.
    pub fn dnf(&self) -> Vec<Vec<(Expr, CmpOp, Expr)>> {
        self.dnf_polarity(true)
    }

    fn dnf_polarity(&self, positive: bool) -> Vec<Vec<(Expr, CmpOp, Expr)>> {
        match (self, positive) {
            (BExpr::Const(b), p) => {
                if *b == p {
                    vec![vec![]]
                } else {
                    vec![]
                }
            }
            (BExpr::Cmp(l, op, r), p) => {
                let op = if p { *op } else { op.negate() };
                vec![vec![(l.clone(), op, r.clone())]]
            }
            (BExpr::Not(b), p) => b.dnf_polarity(!p),
            (BExpr::And(a, b), true) | (BExpr::Or(a, b), false) => {
                let da = a.dnf_polarity(positive);
                let db = b.dnf_polarity(positive);
                let mut out = Vec::new();
                for x in &da {
                    for y in &db {
                        out.push(x.iter().chain(y.iter()).cloned().collect());
                    }
                }
                out
            }
            (BExpr::Or(a, b), true) | (BExpr::And(a, b), false) => {
                let mut out = a.dnf_polarity(positive);
                out.extend(b.dnf_polarity(positive));
                out
            }
        }
    }

    fn fmt_prec(&self, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
        match self {
            BExpr::Const(true) => write!(f, "true"),
            BExpr::Const(false) => write!(f, "false"),
            BExpr::Cmp(l, op, r) => write!(f, "{} {} {}", l, op.symbol(), r),
            BExpr::Not(b) => {
                write!(f, "!(")?;
                b.fmt_prec(f, 0)?;
                write!(f, ")")
            }
            BExpr::And(a, b) | BExpr::Or(a, b) => {
                let (p, sym) = if matches!(self, BExpr::Or(..)) { (1, "||") } else { (2, "&&") };
                if p < min {
                    write!(f, "(")?;
                }
                a.fmt_prec(f, p)?;
                write!(f, " {} ", sym)?;
                b.fmt_prec(f, p + 1)?;
                if p < min {
                    write!(f, ")")?;
                }
                Ok(())
            }
        }
    }
}

impl fmt::Display for BExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_prec(f, 0)
    }
}

/// Converts a comparison to a linear atom; `None` if a side is non-linear.
pub fn comparison_atom(l: &Expr, op: CmpOp, r: &Expr) -> Option<Folded> {
    Some(LinearAtom::build(&l.linearize()?, op, &r.linearize()?))
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Statement {
    Assume(BExpr),
    Assign(String, Expr),
    Skip,
}

/// A statement in three-address shape `target := lhs op rhs`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ThreeAddress {
    pub target: String,
    pub lhs: Operand,
    pub op: BinOp,
    pub rhs: Operand,
}

impl fmt::Display for ThreeAddress {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} := {} {} {}", self.target, self.lhs, self.op, self.rhs)
    }
}

impl Statement {
    pub fn vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        match self {
            Statement::Assume(b) => b.vars(&mut out),
            Statement::Assign(v, e) => {
                out.insert(v.clone());
                e.vars(&mut out);
            }
            Statement::Skip => {}
        }
        out
    }

    pub fn assigned(&self) -> Option<&str> {
        match self {
            Statement::Assign(v, _) => Some(v),
            _ => None,
        }
    }

    pub fn three_address(&self) -> Option<ThreeAddress> {
        match self {
            Statement::Assign(t, Expr::Bin(op, l, r)) => {
                Some(ThreeAddress { target: t.clone(), lhs: l.as_operand()?, op: *op, rhs: r.as_operand()? })
            }
            _ => None,
        }
    }

    pub fn uses_op(&self, op: BinOp) -> bool {
        match self {
            Statement::Assign(_, e) => e.uses_op(op),
            Statement::Assume(b) => b.sides().iter().any(|e| e.uses_op(op)),
            Statement::Skip => false,
        }
    }
}

impl fmt::Display for Statement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Statement::Assume(b) => write!(f, "assume ({})", b),
            Statement::Assign(v, e) => write!(f, "{} := {}", v, e),
            Statement::Skip => write!(f, "skip"),
        }
    }
}
