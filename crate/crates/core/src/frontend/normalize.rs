use std::collections::btree_map::Entry;
use std::collections::BTreeMap;

use super::ast::{BinOp, Expr, Statement};
use super::cfa::{Cfa, Edge, Loc};
use crate::logic::Operand;

struct Normalizer<'a> {
    cfa: &'a mut Cfa,
    out: Vec<Edge>,
}

impl Normalizer<'_> {
    fn temp(&mut self) -> String {
        self.cfa.fresh_var("__t")
    }

    /// Emits `target := l op r`, putting a constant left operand of a
    /// commutative operator on the right.
    fn emit(&mut self, from: Loc, target: String, e: &Expr, to: Loc, line: usize) {
        let e = match e {
            Expr::Bin(op, l, r) if op.is_commutative() && l.as_operand().is_some_and(|o| o.as_var().is_none()) => {
                match r.as_operand() {
                    Some(Operand::Var(_)) => Expr::Bin(*op, r.clone(), l.clone()),
                    _ => e.clone(),
                }
            }
            _ => e.clone(),
        };
        self.out.push(Edge { from, stmt: Statement::Assign(target, e), to, line });
    }

    /// Reduces `e` to an operand, emitting temporaries along a chain starting
    /// at `*cur`.
    fn flatten(&mut self, e: &Expr, cur: &mut Loc, line: usize) -> Expr {
        match e {
            Expr::Bin(op, l, r) => {
                let l = self.flatten(l, cur, line);
                let r = self.flatten(r, cur, line);
                let t = self.temp();
                let next = self.cfa.add_location();
                self.emit(*cur, t.clone(), &Expr::Bin(*op, Box::new(l), Box::new(r)), next, line);
                *cur = next;
                Expr::Var(t)
            }
            _ => e.clone(),
        }
    }

    fn assign(&mut self, e: &Edge, target: &str, rhs: &Expr) {
        match rhs {
            Expr::Bin(op, l, r) => {
                let mut cur = e.from;
                let l = self.flatten(l, &mut cur, e.line);
                let r = self.flatten(r, &mut cur, e.line);
                let rhs = Expr::Bin(*op, Box::new(l), Box::new(r));
                self.emit(cur, target.to_string(), &rhs, e.to, e.line);
            }
            _ => self.out.push(e.clone()),
        }
    }
}

fn needs_hoist(e: &Expr, approx: Option<BinOp>) -> bool {
    matches!(e, Expr::Bin(..)) && (approx.is_some_and(|op| e.uses_op(op)) || e.linearize().is_none())
}

/// Rewrites every assignment into three-address form through fresh
/// temporaries `__t0, __t1, …`, and hoists comparison sides that are
/// non-linear or apply `approx` out of assume conditions.
pub fn normalize_3ac(cfa: &Cfa, approx: Option<BinOp>) -> Cfa {
    let mut cfa = cfa.clone();
    let edges = std::mem::take(&mut cfa.edges);
    let mut hoisted: BTreeMap<Loc, (Loc, BTreeMap<Expr, Expr>)> = BTreeMap::new();
    let mut n = Normalizer { cfa: &mut cfa, out: Vec::new() };
    for e in &edges {
        match &e.stmt {
            Statement::Assign(v, rhs) => n.assign(e, v, rhs),
            Statement::Assume(b) => {
                if let Entry::Vacant(slot) = hoisted.entry(e.from) {
                    let mut sides: Vec<Expr> = Vec::new();
                    for out in edges.iter().filter(|o| o.from == e.from) {
                        if let Statement::Assume(c) = &out.stmt {
                            for s in c.sides() {
                                if needs_hoist(s, approx) && !sides.contains(s) {
                                    sides.push(s.clone());
                                }
                            }
                        }
                    }
                    if sides.is_empty() {
                        slot.insert((e.from, BTreeMap::new()));
                    } else {
                        let mut cur = e.from;
                        let mut map = BTreeMap::new();
                        for s in sides {
                            let Expr::Bin(op, l, r) = &s else { unreachable!() };
                            let l = n.flatten(l, &mut cur, e.line);
                            let r = n.flatten(r, &mut cur, e.line);
                            let t = n.temp();
                            let next = n.cfa.add_location();
                            n.emit(cur, t.clone(), &Expr::Bin(*op, Box::new(l), Box::new(r)), next, e.line);
                            cur = next;
                            map.insert(s, Expr::Var(t));
                        }
                        slot.insert((cur, map));
                    }
                }
                let (start, map) = &hoisted[&e.from];
                let cond = b.map_sides(&mut |s| map.get(s).cloned().unwrap_or_else(|| s.clone()));
                n.out.push(Edge { from: *start, stmt: Statement::Assume(cond), to: e.to, line: e.line });
            }
            Statement::Skip => n.out.push(e.clone()),
        }
    }
    cfa.edges = n.out;
    cfa.canonicalize();
    cfa
}
