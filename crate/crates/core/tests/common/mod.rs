//! Generators and oracles shared by the property suites.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};
use std::path::PathBuf;

use actol::adders::AdderModel;
use actol::checkers::{CnfFormula, SideRange};
use actol::concrete::ConcreteState;
use actol::frontend::{parse_statement, BinOp, Statement};
use actol::logic::{CmpOp, Conjunction, LinExpr, LinearAtom, Literal, Operand};
use actol::tolerance::{MappedConstraint, MappedPair, Signature};
use proptest::prelude::*;
use proptest::sample::select;
use rand::Rng;

pub fn corpus_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus")
}

pub const CMPS: [CmpOp; 6] = [CmpOp::Lt, CmpOp::Le, CmpOp::Gt, CmpOp::Ge, CmpOp::Eq, CmpOp::Ne];

/// `Σ k·v cmp c` with one or two terms over `vars`; constant atoms are
/// filtered out.
pub fn atom(vars: &'static [&'static str], c: i64) -> impl Strategy<Value = Literal> {
    (prop::collection::vec((select(vars), select(&[-3i64, -2, -1, 1, 2, 3][..])), 1..=2), select(&CMPS[..]), -c..=c)
        .prop_filter_map("constant atom", |(terms, cmp, k)| {
            let e = LinExpr::from_parts(terms.into_iter().map(|(v, k)| (v.to_string(), k)), 0);
            LinearAtom::build(&e, cmp, &LinExpr::constant(k)).atom()
        })
}

/// A conjunction picking each atom positively, negatively or not at all.
pub fn cube(atoms: &[Literal], polarity: &[u8]) -> Conjunction {
    Conjunction::from_literals(atoms.iter().zip(polarity).filter_map(|(a, p)| match p % 3 {
        0 => None,
        1 => Some(a.clone()),
        _ => Some(a.negate()),
    }))
}

pub fn state(vars: &[&str], vals: &[i128]) -> ConcreteState {
    vars.iter().zip(vals).map(|(v, x)| (v.to_string(), *x)).collect()
}

/// Statements over `a` and `b` covering linear, nonlinear, division,
/// constant and guard shapes.
pub fn statement() -> impl Strategy<Value = Statement> {
    (0u8..9, select(&["a", "b"][..]), -3i64..=3, -12i64..=12, select(&[2i64, 3, -2][..])).prop_map(
        |(shape, t, k, c, d)| {
            let o = if t == "a" { "b" } else { "a" };
            let src = match shape {
                0 => format!("{t} := {k} * {t} + {c}"),
                1 => format!("{t} := a + b"),
                2 => format!("{t} := a - b + {c}"),
                3 => format!("{t} := {c}"),
                4 => format!("{t} := a * b"),
                5 => format!("{t} := {t} / {d}"),
                6 => format!("assume {k} * a - b <= {c}"),
                7 => "skip".to_string(),
                _ => format!("{t} := {o} + {o}"),
            };
            parse_statement(&src).unwrap_or_else(|e| panic!("{}: {}", src, e))
        },
    )
}

pub const HW: [&str; 4] = ["x", "y", "z", "k"];

/// A random mapped constraint over `x`, `y`, `z` and optionally one side
/// variable `k`, which every precondition bounds so enumeration stays
/// finite.
pub fn constraint(width: u32) -> impl Strategy<Value = MappedConstraint> {
    let top = (1i64 << width) + 4;
    let pre = prop::collection::vec(atom(&["x", "y", "k"], top), 1..=3);
    let post = prop::collection::vec(
        (select(&[-1i64, 1][..]), atom(&["x", "y", "k"], top), select(&CMPS[..]), -top..=top),
        1..=2,
    );
    (prop::collection::vec((pre, post), 1..=2), -3i64..=3, 0i64..=3, any::<bool>()).prop_map(
        move |(pairs, lo, span, use_k)| {
            let mut out = Vec::new();
            for (pre, post) in pairs {
                let keep = |l: &Literal| use_k || !l.mentions("k");
                let mut p = Conjunction::from_literals(pre.into_iter().filter(keep));
                if use_k {
                    p = p
                        .with(LinearAtom::new(&LinExpr::var("k"), CmpOp::Ge, &LinExpr::constant(lo)))
                        .with(LinearAtom::new(&LinExpr::var("k"), CmpOp::Le, &LinExpr::constant(lo + span)));
                }
                // Each post literal relates `z` to a linear term of the rest.
                let q =
                    Conjunction::from_folded(post.into_iter().filter(|(_, a, _, _)| keep(a)).map(|(s, a, cmp, c)| {
                        let rest = a.expr().clone();
                        LinearAtom::build(&LinExpr::var("z").scale(s), cmp, &rest.add_constant(c))
                    }));
                out.push(MappedPair { pre: p, post: q });
            }
            let side: BTreeSet<String> =
                out.iter().flat_map(|p| p.pre.vars().into_iter().chain(p.post.vars())).filter(|v| v == "k").collect();
            MappedConstraint {
                signature: Signature {
                    statement: "u := v + w".into(),
                    op: BinOp::Add,
                    target: "u".into(),
                    lhs: Operand::Var("v".into()),
                    rhs: Operand::Var("w".into()),
                    side: side.into_iter().collect(),
                },
                pairs: out,
            }
        },
    )
}

/// Exact, slice-sum and generate-only models at `width`.
pub fn model(widths: std::ops::RangeInclusive<u32>) -> impl Strategy<Value = AdderModel> {
    (widths, 0u8..3, 0u32..4, 0u32..=10).prop_filter_map("invalid parameters", |(n, kind, r_log, p)| {
        let r = 1 << r_log;
        match kind {
            0 => AdderModel::exact(n).ok(),
            1 => AdderModel::slice_sum(n, r, p.min(n)).ok(),
            _ => AdderModel::generate_only(n, r).ok(),
        }
    })
}

/// Whether some operand pair and side valuation in `sides` breaks `mc`.
pub fn brute_violation(m: &AdderModel, mc: &MappedConstraint, sides: &BTreeMap<String, SideRange>) -> bool {
    let k = sides.get("k").copied().unwrap_or(SideRange { lo: 0, hi: 0 });
    for x in 0..=m.max_operand() {
        for y in 0..=m.max_operand() {
            let z = m.evaluate(x, y).unwrap() as i128;
            for kv in k.lo..=k.hi {
                let env = |v: &str| match v {
                    "x" => Some(x as i128),
                    "y" => Some(y as i128),
                    "z" => Some(z),
                    "k" => Some(kv),
                    _ => None,
                };
                if mc.violates(env) == Some(true) {
                    return true;
                }
            }
        }
    }
    false
}

/// Uniform random 3-CNF; clause count near the satisfiability threshold.
pub fn random_3sat(rng: &mut impl Rng, vars: u32) -> CnfFormula {
    let mut f = CnfFormula::default();
    for _ in 0..vars {
        f.new_var();
    }
    let clauses = (vars as f64 * rng.gen_range(3.5..5.0)).round() as usize;
    for _ in 0..clauses {
        let c = (0..3)
            .map(|_| {
                let v = rng.gen_range(1..=vars as i32);
                if rng.gen() {
                    v
                } else {
                    -v
                }
            })
            .collect();
        f.add_clause(c);
    }
    f
}

/// Satisfiability by trying all assignments.
pub fn enumerate_sat(f: &CnfFormula) -> bool {
    let masks: Vec<(u32, u32)> = f
        .clauses
        .iter()
        .map(|c| {
            c.iter().fold((0, 0), |(p, n), &l| {
                let bit = 1u32 << (l.unsigned_abs() - 1);
                if l > 0 {
                    (p | bit, n)
                } else {
                    (p, n | bit)
                }
            })
        })
        .collect();
    (0u32..1 << f.num_vars).any(|a| masks.iter().all(|&(p, n)| (a & p) | (!a & n) != 0))
}

/// Pigeonhole: `p` pigeons into `h` holes.
pub fn pigeonhole(p: u32, h: u32) -> CnfFormula {
    let mut f = CnfFormula::default();
    let var: Vec<Vec<i32>> = (0..p).map(|_| (0..h).map(|_| f.new_var()).collect()).collect();
    for row in &var {
        f.add_clause(row.clone());
    }
    for (a, ra) in var.iter().enumerate() {
        for rb in &var[a + 1..] {
            for (pa, pb) in ra.iter().zip(rb) {
                f.add_clause(vec![-pa, -pb]);
            }
        }
    }
    f
}
