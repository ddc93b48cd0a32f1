mod common;

use std::collections::BTreeSet;

use actol::frontend::{BinOp, Loc, Statement, ThreeAddress};
use actol::logic::{Conjunction, Operand};
use actol::pipeline::{analyze, load_corpus};
use actol::tolerance::{map_to_signature, parse, serialize, ToleranceConstraint};
use common::*;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn serialization_round_trips(mc in constraint(8)) {
        let text = serialize(&mc);
        let back = parse(&text).map_err(|e| TestCaseError::fail(format!("{}\n{}", e, text)))?;
        prop_assert_eq!(back, mc);
    }
}

const PROG: &[&str] = &["u", "v", "w", "n"];

fn holds(c: &Conjunction, s: &actol::concrete::ConcreteState) -> bool {
    c.holds(|v| s.get(v).copied()) == Some(true)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(60))]

    // An operator adhering to the mapped constraint fulfils the original
    // one on every state of the box.
    #[test]
    fn adherence_transfers(pre in prop::collection::vec(atom(PROG, 40), 1..=3),
                           post in prop::collection::vec(atom(PROG, 40), 1..=2),
                           m in model(6..=6),
                           tweak in (0u64..64, 0u64..64, 0u64..128)) {
        let s = ThreeAddress { target: "u".into(), lhs: Operand::Var("v".into()), op: BinOp::Add, rhs: Operand::Var("w".into()) };
        let tc = ToleranceConstraint {
            statement: s,
            edge: 0,
            from: Loc(0),
            to: Loc(1),
            pairs: vec![(Conjunction::from_literals(pre), Conjunction::from_literals(post))],
        };
        let mc = map_to_signature(&tc).unwrap();
        let f = |x: u64, y: u64| if (x, y) == (tweak.0, tweak.1) { tweak.2 } else { m.evaluate(x, y).unwrap() };
        let box_n = -8i128..=8;
        let adheres = (0..64u64).all(|x| (0..64u64).all(|y| box_n.clone().all(|n| {
            let z = f(x, y) as i128;
            let env = |v: &str| match v { "x" => Some(x as i128), "y" => Some(y as i128), "z" => Some(z), "n" => Some(n), _ => None };
            mc.violates(env) != Some(true)
        })));
        prop_assume!(adheres);
        let (p, q) = &tc.pairs[0];
        for v in 0..64i128 {
            for w in 0..64i128 {
                for n in box_n.clone() {
                    for u in -2i128..=2 {
                        let st = state(PROG, &[u, v, w, n]);
                        if holds(p, &st) {
                            let mut next = st.clone();
                            next.insert("u".into(), f(v as u64, w as u64) as i128);
                            prop_assert!(holds(q, &next), "{:?} -> {:?} breaks {}", st, next, q);
                        }
                    }
                }
            }
        }
    }
}

#[test]
fn every_live_operator_edge_is_extracted_once() {
    for entry in load_corpus(&corpus_dir()).unwrap() {
        let a = analyze(&entry.sources().unwrap(), BinOp::Add).unwrap();
        let live: BTreeSet<usize> = a
            .cfa
            .edges
            .iter()
            .enumerate()
            .filter(|(_, e)| {
                matches!(&e.stmt, Statement::Assign(..)) && e.stmt.three_address().is_some_and(|t| t.op == BinOp::Add)
            })
            .filter(|(_, e)| a.ats.state(e.from).is_some_and(|c| !c.is_bottom()))
            .map(|(i, _)| i)
            .collect();
        let got: Vec<usize> = a.constraints.iter().map(|c| c.edge).collect();
        let unique: BTreeSet<usize> = got.iter().copied().collect();
        assert_eq!(got.len(), unique.len(), "{}", entry.name);
        assert_eq!(unique, live, "{}", entry.name);
    }
}

#[test]
fn mapped_constraints_avoid_program_names() {
    for entry in load_corpus(&corpus_dir()).unwrap() {
        let a = analyze(&entry.sources().unwrap(), BinOp::Add).unwrap();
        for mc in a.mapped().unwrap() {
            let t = &mc.signature.target;
            for p in &mc.pairs {
                assert!(!p.pre.mentions(t) && !p.post.mentions(t), "{}: still names {}", entry.name, t);
            }
        }
    }
}
