//! Linear integer terms and atoms in canonical form.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

/// `Σ cᵢ·vᵢ + c` with integer coefficients. Zero coefficients are never stored.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LinExpr {
    coeffs: BTreeMap<String, i64>,
    constant: i64,
}

impl LinExpr {
    pub fn constant(c: i64) -> Self {
        LinExpr { coeffs: BTreeMap::new(), constant: c }
    }

    pub fn var(name: impl Into<String>) -> Self {
        let mut coeffs = BTreeMap::new();
        coeffs.insert(name.into(), 1);
        LinExpr { coeffs, constant: 0 }
    }

    pub fn from_parts(coeffs: impl IntoIterator<Item = (String, i64)>, constant: i64) -> Self {
        let mut e = LinExpr::constant(constant);
        for (v, c) in coeffs {
            e.add_term(&v, c);
        }
        e
    }

    pub fn get_constant(&self) -> i64 {
        self.constant
    }

    pub fn coeff(&self, var: &str) -> i64 {
        self.coeffs.get(var).copied().unwrap_or(0)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&str, i64)> {
        self.coeffs.iter().map(|(v, c)| (v.as_str(), *c))
    }

    pub fn vars(&self) -> impl Iterator<Item = &str> {
        self.coeffs.keys().map(String::as_str)
    }

    pub fn mentions(&self, var: &str) -> bool {
        self.coeffs.contains_key(var)
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.is_empty()
    }

    fn add_term(&mut self, var: &str, c: i64) {
        if c == 0 {
            return;
        }
        let entry = self.coeffs.entry(var.to_string()).or_insert(0);
        *entry += c;
        if *entry == 0 {
            self.coeffs.remove(var);
        }
    }

    pub fn add(&self, other: &LinExpr) -> LinExpr {
        let mut out = self.clone();
        for (v, c) in &other.coeffs {
            out.add_term(v, *c);
        }
        out.constant += other.constant;
        out
    }

    pub fn sub(&self, other: &LinExpr) -> LinExpr {
        self.add(&other.scale(-1))
    }

    pub fn scale(&self, k: i64) -> LinExpr {
        if k == 0 {
            return LinExpr::constant(0);
        }
        LinExpr { coeffs: self.coeffs.iter().map(|(v, c)| (v.clone(), c * k)).collect(), constant: self.constant * k }
    }

    pub fn add_constant(&self, k: i64) -> LinExpr {
        let mut out = self.clone();
        out.constant += k;
        out
    }

    /// Replaces every occurrence of `from` by `to` (merging coefficients).
    pub fn rename(&self, from: &str, to: &str) -> LinExpr {
        match self.coeffs.get(from) {
            None => self.clone(),
            Some(&c) => {
                let mut out = self.clone();
                out.coeffs.remove(from);
                out.add_term(to, c);
                out
            }
        }
    }

    /// Evaluates under `env`; `None` if a variable is unbound or on overflow.
    pub fn eval(&self, env: impl Fn(&str) -> Option<i128>) -> Option<i128> {
        let mut acc = self.constant as i128;
        for (v, c) in &self.coeffs {
            acc = acc.checked_add((*c as i128).checked_mul(env(v)?)?)?;
        }
        Some(acc)
    }

    /// Splits into `(left, right)` with `self = left - right`, every
    /// coefficient positive and the constant on whichever side keeps it
    /// non-negative.
    pub fn split_sides(&self) -> (LinExpr, LinExpr) {
        let (mut left, mut right) = if self.constant > 0 {
            (LinExpr::constant(self.constant), LinExpr::default())
        } else {
            (LinExpr::default(), LinExpr::constant(-self.constant))
        };
        for (v, c) in &self.coeffs {
            if *c > 0 {
                left.add_term(v, *c);
            } else {
                right.add_term(v, -*c);
            }
        }
        (left, right)
    }
}

impl fmt::Display for LinExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (v, c) in &self.coeffs {
            let (sign, mag) = if *c < 0 { ("-", -c) } else { ("+", *c) };
            if first {
                if sign == "-" {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", sign)?;
            }
            if mag == 1 {
                write!(f, "{}", v)?;
            } else {
                write!(f, "{} * {}", mag, v)?;
            }
            first = false;
        }
        if first {
            write!(f, "{}", self.constant)
        } else if self.constant > 0 {
            write!(f, " + {}", self.constant)
        } else if self.constant < 0 {
            write!(f, " - {}", -self.constant)
        } else {
            Ok(())
        }
    }
}

/// Surface comparison operators.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CmpOp {
    Lt,
    Le,
    Gt,
    Ge,
    Eq,
    Ne,
}

impl CmpOp {
    pub fn symbol(self) -> &'static str {
        match self {
            CmpOp::Lt => "<",
            CmpOp::Le => "<=",
            CmpOp::Gt => ">",
            CmpOp::Ge => ">=",
            CmpOp::Eq => "==",
            CmpOp::Ne => "!=",
        }
    }

    pub fn holds(self, l: i128, r: i128) -> bool {
        match self {
            CmpOp::Lt => l < r,
            CmpOp::Le => l <= r,
            CmpOp::Gt => l > r,
            CmpOp::Ge => l >= r,
            CmpOp::Eq => l == r,
            CmpOp::Ne => l != r,
        }
    }

    pub fn negate(self) -> CmpOp {
        match self {
            CmpOp::Lt => CmpOp::Ge,
            CmpOp::Le => CmpOp::Gt,
            CmpOp::Gt => CmpOp::Le,
            CmpOp::Ge => CmpOp::Lt,
            CmpOp::Eq => CmpOp::Ne,
            CmpOp::Ne => CmpOp::Eq,
        }
    }
}

/// Canonical relation of an atom `e rel 0`. Strict and `≥` forms are
/// rewritten into `≤` using integrality.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Rel {
    Le,
    Eq,
    Ne,
}

/// A linear atom `expr rel 0` over the integers.
///
/// Construction normalizes: `a < b` becomes `a - b + 1 <= 0`, `a >= b`
/// becomes `b - a <= 0`, and for `=`/`≠` the first coefficient is made
/// positive. Two atoms with the same integer meaning built from the usual
/// surface forms therefore compare equal.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LinearAtom {
    expr: LinExpr,
    rel: Rel,
}

/// Result of building an atom: either a real atom or a folded constant.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Folded {
    Const(bool),
    Atom(LinearAtom),
}

impl Folded {
    pub fn atom(self) -> Option<LinearAtom> {
        match self {
            Folded::Atom(a) => Some(a),
            Folded::Const(_) => None,
        }
    }
}

impl LinearAtom {
    pub fn build(left: &LinExpr, cmp: CmpOp, right: &LinExpr) -> Folded {
        let diff = left.sub(right);
        let (expr, rel) = match cmp {
            CmpOp::Le => (diff, Rel::Le),
            CmpOp::Lt => (diff.add_constant(1), Rel::Le),
            CmpOp::Ge => (diff.scale(-1), Rel::Le),
            CmpOp::Gt => (diff.scale(-1).add_constant(1), Rel::Le),
            CmpOp::Eq => (diff, Rel::Eq),
            CmpOp::Ne => (diff, Rel::Ne),
        };
        Self::from_canonical(expr, rel)
    }

    pub fn from_canonical(expr: LinExpr, rel: Rel) -> Folded {
        if expr.is_constant() {
            let c = expr.constant;
            return Folded::Const(match rel {
                Rel::Le => c <= 0,
                Rel::Eq => c == 0,
                Rel::Ne => c != 0,
            });
        }
        let expr = match rel {
            Rel::Le => expr,
            Rel::Eq | Rel::Ne => {
                let lead = expr.coeffs.values().next().copied().unwrap_or(1);
                if lead < 0 {
                    expr.scale(-1)
                } else {
                    expr
                }
            }
        };
        Folded::Atom(LinearAtom { expr, rel })
    }

    /// Convenience constructor that panics on constant atoms; for tests and
    /// fixed tables.
    pub fn new(left: &LinExpr, cmp: CmpOp, right: &LinExpr) -> LinearAtom {
        match Self::build(left, cmp, right) {
            Folded::Atom(a) => a,
            Folded::Const(b) => panic!("atom folds to constant {}", b),
        }
    }

    pub fn expr(&self) -> &LinExpr {
        &self.expr
    }

    pub fn rel(&self) -> Rel {
        self.rel
    }

    /// The complementary atom (`¬(e ≤ 0)` is `-e + 1 ≤ 0`).
    pub fn negate(&self) -> LinearAtom {
        let folded = match self.rel {
            Rel::Le => Self::from_canonical(self.expr.scale(-1).add_constant(1), Rel::Le),
            Rel::Eq => Self::from_canonical(self.expr.clone(), Rel::Ne),
            Rel::Ne => Self::from_canonical(self.expr.clone(), Rel::Eq),
        };
        folded.atom().expect("negation of a non-constant atom is non-constant")
    }

    pub fn vars(&self) -> impl Iterator<Item = &str> {
        self.expr.vars()
    }

    pub fn var_set(&self) -> BTreeSet<String> {
        self.expr.vars().map(str::to_string).collect()
    }

    pub fn mentions(&self, var: &str) -> bool {
        self.expr.mentions(var)
    }

    pub fn rename(&self, from: &str, to: &str) -> Folded {
        Self::from_canonical(self.expr.rename(from, to), self.rel)
    }

    /// `None` if a variable is unbound or arithmetic overflows.
    pub fn holds(&self, env: impl Fn(&str) -> Option<i128>) -> Option<bool> {
        let v = self.expr.eval(env)?;
        Some(match self.rel {
            Rel::Le => v <= 0,
            Rel::Eq => v == 0,
            Rel::Ne => v != 0,
        })
    }

    /// Readable (left, operator, right) presentation with non-negative
    /// coefficients on both sides.
    pub fn sides(&self) -> (LinExpr, &'static str, LinExpr) {
        let (l, r) = match self.rel {
            Rel::Le => self.expr.split_sides(),
            // equations read best with the constant alone on the right
            Rel::Eq | Rel::Ne => {
                let c = self.expr.constant;
                let (l, r) = self.expr.add_constant(-c).split_sides();
                (l, r.add_constant(-c))
            }
        };
        let op = match self.rel {
            Rel::Le => "<=",
            Rel::Eq => "==",
            Rel::Ne => "!=",
        };
        (l, op, r)
    }
}

impl fmt::Display for LinearAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (l, op, r) = self.sides();
        write!(f, "{} {} {}", l, op, r)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(n: &str) -> LinExpr {
        LinExpr::var(n)
    }
    fn c(k: i64) -> LinExpr {
        LinExpr::constant(k)
    }

    #[test]
    fn surface_forms_canonicalize_together() {
        let a = LinearAtom::new(&v("x"), CmpOp::Ge, &c(0));
        let b = LinearAtom::new(&c(0), CmpOp::Le, &v("x"));
        let d = LinearAtom::new(&c(-1), CmpOp::Lt, &v("x"));
        assert_eq!(a, b);
        assert_eq!(a, d);
        assert_eq!(a.to_string(), "0 <= x");
    }

    #[test]
    fn strict_tightening() {
        let a = LinearAtom::new(&v("j"), CmpOp::Lt, &c(990));
        assert_eq!(a, LinearAtom::new(&v("j"), CmpOp::Le, &c(989)));
        assert_eq!(a.to_string(), "j <= 989");
    }

    #[test]
    fn negation_is_involutive() {
        for cmp in [CmpOp::Lt, CmpOp::Le, CmpOp::Gt, CmpOp::Ge, CmpOp::Eq, CmpOp::Ne] {
            let a = LinearAtom::new(&v("n").sub(&v("i")), cmp, &c(3));
            assert_eq!(a.negate().negate(), a);
            let neg = LinearAtom::new(&v("n").sub(&v("i")), cmp.negate(), &c(3));
            assert_eq!(a.negate(), neg);
        }
    }

    #[test]
    fn equality_sign_normalized() {
        let a = LinearAtom::new(&v("y"), CmpOp::Eq, &c(10));
        let b = LinearAtom::new(&c(10), CmpOp::Eq, &v("y"));
        assert_eq!(a, b);
        assert_eq!(a.to_string(), "y == 10");
    }

    #[test]
    fn constant_atoms_fold() {
        assert_eq!(LinearAtom::build(&c(1), CmpOp::Le, &c(2)), Folded::Const(true));
        assert_eq!(LinearAtom::build(&v("x"), CmpOp::Lt, &v("x")), Folded::Const(false));
    }

    #[test]
    fn rename_merges() {
        let a = LinearAtom::new(&v("a").sub(&v("b")), CmpOp::Le, &c(0));
        assert_eq!(a.rename("a", "b"), Folded::Const(true));
    }
}
