//! Cartesian predicate abstraction and the abstract transition system.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt::Write as _;

use rayon::prelude::*;
use thiserror::Error;

use crate::concrete::ConcreteState;
use crate::frontend::{comparison_atom, BExpr, BinOp, Cfa, Expr, Loc, Statement};
use crate::logic::{entails, refute, CmpOp, Conjunction, Entailment, Folded, LinExpr, LinearAtom, Literal, Refutation};

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum PredicateError {
    #[error("predicate `{0}` is not a linear comparison")]
    NonLinear(String),
    #[error("predicate `{0}` mentions unknown variable `{1}`")]
    UnknownVariable(String, String),
}

/// The predicate set `P`; the abstract domain ranges over `P ∪ ¬P`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PredicateSet {
    atoms: Vec<LinearAtom>,
}

impl PredicateSet {
    pub fn new(atoms: impl IntoIterator<Item = LinearAtom>) -> PredicateSet {
        let mut out: Vec<LinearAtom> = Vec::new();
        for a in atoms {
            if !out.contains(&a) && !out.contains(&a.negate()) {
                out.push(a);
            }
        }
        PredicateSet { atoms: out }
    }

    /// From parsed comparisons; constant comparisons are dropped.
    pub fn from_comparisons(cmps: &[(Expr, CmpOp, Expr)]) -> Result<PredicateSet, PredicateError> {
        let mut atoms = Vec::new();
        for (l, op, r) in cmps {
            let text = format!("{} {} {}", l, op.symbol(), r);
            match comparison_atom(l, *op, r) {
                None => return Err(PredicateError::NonLinear(text)),
                Some(Folded::Atom(a)) => atoms.push(a),
                Some(Folded::Const(_)) => log::warn!("ignoring constant predicate `{}`", text),
            }
        }
        Ok(PredicateSet::new(atoms))
    }

    pub fn atoms(&self) -> &[LinearAtom] {
        &self.atoms
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    /// `P ∪ ¬P`.
    pub fn closure(&self) -> Vec<Literal> {
        self.atoms.iter().flat_map(|a| [a.clone(), a.negate()]).collect()
    }

    pub fn vars(&self) -> BTreeSet<String> {
        self.atoms.iter().flat_map(|a| a.var_set()).collect()
    }

    pub fn check_vars(&self, cfa: &Cfa) -> Result<(), PredicateError> {
        for a in &self.atoms {
            if let Some(v) = a.vars().find(|v| !cfa.has_var(v)) {
                return Err(PredicateError::UnknownVariable(a.to_string(), v.to_string()));
            }
        }
        Ok(())
    }
}

/// Literals of `P ∪ ¬P` true in every state; `Bottom` for no states.
pub fn alpha(states: &[ConcreteState], preds: &PredicateSet) -> Conjunction {
    if states.is_empty() {
        return Conjunction::Bottom;
    }
    Conjunction::from_literals(
        preds.closure().into_iter().filter(|q| states.iter().all(|s| q.holds(|v| s.get(v).copied()) == Some(true))),
    )
}

/// Whether a concrete state lies in `γ(a)`.
pub fn gamma_contains(a: &Conjunction, s: &ConcreteState) -> bool {
    a.holds(|v| s.get(v).copied()) == Some(true)
}

fn entailed_closure(ctx: &Conjunction, candidates: &[(Literal, Literal)]) -> Vec<Literal> {
    candidates
        .par_iter()
        .filter(|(_, probe)| entails(ctx, probe) == Entailment::Proved)
        .map(|(lit, _)| lit.clone())
        .collect()
}

fn prime(v: &str) -> String {
    format!("{}'", v)
}

// Constraints tying `target` to the value of `e`, or None for a havoc.
fn assignment_constraints(target: &str, e: &Expr) -> Option<Vec<Folded>> {
    let t = LinExpr::var(target.to_string());
    if let Some(lin) = e.linearize() {
        return Some(vec![LinearAtom::build(&t, CmpOp::Eq, &lin)]);
    }
    if let Expr::Bin(BinOp::Div, num, den) = e {
        if let (Some(a), Expr::Const(c)) = (num.linearize(), den.as_ref()) {
            if *c != 0 {
                // a = c·t + r with |r| ≤ |c| − 1
                let k = c.abs();
                let ct = t.scale(*c);
                return Some(vec![
                    LinearAtom::build(&ct.add_constant(-(k - 1)), CmpOp::Le, &a),
                    LinearAtom::build(&a, CmpOp::Le, &ct.add_constant(k - 1)),
                ]);
            }
        }
    }
    None
}

/// The Cartesian abstract post of `a` under `stm`.
pub fn abstract_post(a: &Conjunction, stm: &Statement, preds: &PredicateSet) -> Conjunction {
    if a.is_bottom() {
        return Conjunction::Bottom;
    }
    let closure = preds.closure();
    match stm {
        Statement::Skip => a.clone(),
        Statement::Assume(b) => post_assume(a, b, &closure),
        Statement::Assign(v, e) => {
            let pv = prime(v);
            let mut ctx: Vec<Folded> = a.literals().cloned().map(Folded::Atom).collect();
            if let Some(cs) = assignment_constraints(&pv, e) {
                ctx.extend(cs);
            }
            let ctx = Conjunction::from_folded(ctx);
            let candidates: Vec<(Literal, Literal)> = closure
                .into_iter()
                .filter_map(|q| match q.rename(v, &pv) {
                    Folded::Atom(p) => Some((q, p)),
                    Folded::Const(_) => None,
                })
                .collect();
            Conjunction::from_literals(entailed_closure(&ctx, &candidates))
        }
    }
}

fn post_assume(a: &Conjunction, b: &BExpr, closure: &[Literal]) -> Conjunction {
    let candidates: Vec<(Literal, Literal)> = closure.iter().map(|q| (q.clone(), q.clone())).collect();
    let mut result: Option<BTreeSet<Literal>> = None;
    for disjunct in b.dnf() {
        let mut ctx: Vec<Folded> = a.literals().cloned().map(Folded::Atom).collect();
        for (l, op, r) in &disjunct {
            // Non-linear comparisons are left unconstrained.
            if let Some(f) = comparison_atom(l, *op, r) {
                ctx.push(f);
            }
        }
        let ctx = Conjunction::from_folded(ctx);
        if refute(&ctx) == Refutation::Unsat {
            continue;
        }
        let lits: BTreeSet<Literal> = entailed_closure(&ctx, &candidates).into_iter().collect();
        result = Some(match result {
            None => lits,
            Some(acc) => acc.intersection(&lits).cloned().collect(),
        });
    }
    match result {
        None => Conjunction::Bottom,
        Some(set) => Conjunction::from_literals(set),
    }
}

/// Literals entailed by both arguments.
pub fn join(a: &Conjunction, b: &Conjunction, preds: &PredicateSet) -> Conjunction {
    match (a, b) {
        (Conjunction::Bottom, x) | (x, Conjunction::Bottom) => x.clone(),
        _ => Conjunction::from_literals(
            preds
                .closure()
                .into_iter()
                .filter(|q| entails(a, q) == Entailment::Proved && entails(b, q) == Entailment::Proved),
        ),
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Transition {
    /// Index into the CFA's edges.
    pub edge: usize,
    pub from: Loc,
    pub to: Loc,
    pub stmt: Statement,
    pub pre: Conjunction,
    pub post: Conjunction,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ats {
    pub initial: Loc,
    pub states: BTreeMap<Loc, Conjunction>,
    pub transitions: Vec<Transition>,
    pub errors: BTreeSet<Loc>,
}

impl Ats {
    pub fn state(&self, l: Loc) -> Option<&Conjunction> {
        self.states.get(&l)
    }

    /// Graphviz rendering with each location labelled by its state.
    pub fn to_dot(&self) -> String {
        let mut s = String::from("digraph ats {\n  node [shape=box];\n");
        for (l, st) in &self.states {
            let shape = if self.errors.contains(l) { ", color=red" } else { "" };
            let _ = writeln!(s, "  {} [label=\"{}: {}\"{}];", l, l, escape(&st.minimized().to_string()), shape);
        }
        for l in &self.errors {
            if !self.states.contains_key(l) {
                let _ = writeln!(s, "  {} [label=\"{}: false\", color=red];", l, l);
            }
        }
        for t in &self.transitions {
            let _ = writeln!(s, "  {} -> {} [label=\"{}\"];", t.from, t.to, escape(&t.stmt.to_string()));
        }
        s.push_str("}\n");
        s
    }
}

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

/// Worklist fixpoint with one state per location, merged by [`join`].
pub fn build_ats(cfa: &Cfa, preds: &PredicateSet) -> Ats {
    let zero: ConcreteState = cfa.variables.iter().cloned().chain(preds.vars()).map(|v| (v, 0)).collect();
    let mut states: BTreeMap<Loc, Conjunction> = BTreeMap::new();
    states.insert(cfa.initial, alpha(&[zero], preds));
    let mut out: BTreeMap<Loc, Vec<usize>> = BTreeMap::new();
    for (i, e) in cfa.edges.iter().enumerate() {
        out.entry(e.from).or_default().push(i);
    }
    let mut work = VecDeque::from([cfa.initial]);
    let mut queued = BTreeSet::from([cfa.initial]);
    while let Some(l) = work.pop_front() {
        queued.remove(&l);
        let a = states[&l].clone();
        if a.is_bottom() {
            continue;
        }
        for &i in out.get(&l).into_iter().flatten() {
            let e = &cfa.edges[i];
            let post = abstract_post(&a, &e.stmt, preds);
            if post.is_bottom() {
                continue;
            }
            let new = match states.get(&e.to) {
                None | Some(Conjunction::Bottom) => post,
                Some(old) => old.retain(|q| entails(&post, q) == Entailment::Proved),
            };
            if states.get(&e.to) != Some(&new) {
                states.insert(e.to, new);
                if queued.insert(e.to) {
                    work.push_back(e.to);
                }
            }
        }
    }
    let transitions = cfa
        .edges
        .iter()
        .enumerate()
        .filter_map(|(i, e)| {
            let pre = states.get(&e.from)?;
            if pre.is_bottom() {
                return None;
            }
            Some(Transition {
                edge: i,
                from: e.from,
                to: e.to,
                stmt: e.stmt.clone(),
                pre: pre.clone(),
                post: states.get(&e.to).cloned().unwrap_or(Conjunction::Bottom),
            })
        })
        .collect();
    Ats { initial: cfa.initial, states, transitions, errors: cfa.errors.clone() }
}

/// Every error location is `Bottom` or never reached.
pub fn is_error_free(ats: &Ats) -> bool {
    ats.errors.iter().all(|l| ats.states.get(l).is_none_or(Conjunction::is_bottom))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frontend::{normalize_3ac, parse_predicates, parse_program, parse_statement};

    fn preds(src: &str) -> PredicateSet {
        PredicateSet::from_comparisons(&parse_predicates(src).unwrap()).unwrap()
    }

    fn conj(p: &PredicateSet, src: &str) -> Conjunction {
        let atoms = PredicateSet::from_comparisons(&parse_predicates(src).unwrap()).unwrap();
        for a in atoms.atoms() {
            assert!(p.closure().contains(a), "{} not in closure", a);
        }
        Conjunction::from_literals(atoms.atoms().iter().cloned())
    }

    fn st(pairs: &[(&str, i128)]) -> ConcreteState {
        pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect()
    }

    const ARRAY_PREDS: &str = "j >= 0\nj <= 989\nj <= 999\n";

    #[test]
    fn alpha_examples() {
        let p = preds(ARRAY_PREDS);
        assert_eq!(alpha(&[st(&[("j", 5)])], &p), conj(&p, ARRAY_PREDS));
        assert_eq!(alpha(&[], &p), Conjunction::Bottom);
        assert_eq!(alpha(&[st(&[("j", 5)]), st(&[("j", -5)])], &p), conj(&p, "j <= 989\nj <= 999"));
    }

    #[test]
    fn post_examples() {
        let p = preds(ARRAY_PREDS);
        let inc = parse_statement("j := j + 10").unwrap();
        let got = abstract_post(&conj(&p, "j >= 0\nj <= 989"), &inc, &p);
        assert_eq!(got.minimized(), conj(&p, "j >= 0\nj <= 999"));
        let guard = parse_statement("assume (j < 990)").unwrap();
        let got = abstract_post(&conj(&p, "j >= 0"), &guard, &p);
        assert_eq!(got.minimized(), conj(&p, "j >= 0\nj <= 989"));
        assert_eq!(abstract_post(&Conjunction::Bottom, &inc, &p), Conjunction::Bottom);
    }

    #[test]
    fn post_of_disjunctive_guard() {
        let p = preds("x >= 0\nx <= 10");
        let b = parse_statement("assume (x < 0 || x > 10)").unwrap();
        let got = abstract_post(&Conjunction::top(), &b, &p);
        assert!(got.literals().all(|l| !p.atoms().contains(l)));
        let pinned = abstract_post(&conj(&p, "x >= 0\nx <= 10"), &b, &p);
        assert!(pinned.is_bottom());
    }

    #[test]
    fn division_by_constant() {
        let p = preds("q >= 5\nq <= 6");
        let a = Conjunction::top();
        let s = parse_statement("q := 17 / 3").unwrap();
        assert_eq!(abstract_post(&a, &s, &p).minimized(), conj(&p, "q >= 5\nq <= 6").minimized());
    }

    const ARRAY: &str = "int arr[1000];\nint j;\nj := 0;\nwhile (j < 990) {\n  j := j + 10;\n  if (!(j >= 0 && j < 1000)) { ERR: ; }\n  arr[j] := 0;\n}\n";

    #[test]
    fn array_fixpoint() {
        let p = preds(ARRAY_PREDS);
        let cfa = normalize_3ac(&parse_program(ARRAY).unwrap(), Some(BinOp::Add));
        let ats = build_ats(&cfa, &p);
        assert!(is_error_free(&ats));
        let add = ats.transitions.iter().find(|t| t.stmt.to_string() == "j := j + 10").unwrap();
        assert_eq!(add.pre.minimized(), conj(&p, "j >= 0\nj <= 989"));
        assert_eq!(add.post.minimized(), conj(&p, "j >= 0\nj <= 999"));
        assert!(ats.to_dot().contains("j <= 989"));
        assert_eq!(build_ats(&cfa, &p), ats);
    }

    #[test]
    fn empty_predicates_give_true_everywhere() {
        let cfa = parse_program(ARRAY).unwrap();
        let ats = build_ats(&cfa, &PredicateSet::default());
        assert!(ats.states.values().all(Conjunction::is_top));
        assert_eq!(ats.states.len(), cfa.num_locations);
        assert!(!is_error_free(&ats));
    }

    #[test]
    fn add_one_verifies() {
        let src = "int u; int sum;\nu := input();\nsum := 1;\nif (u > 0) { sum := 1 + u; }\nif (sum == 0) { ERR: ; }\n";
        let cfa = normalize_3ac(&parse_program(src).unwrap(), Some(BinOp::Add));
        let ats = build_ats(&cfa, &preds("u >= 1\nsum != 0"));
        assert!(is_error_free(&ats));
    }

    #[test]
    fn trivial_error_freedom_cases() {
        let reach = parse_program("int x; ERR: ;").unwrap();
        assert!(!is_error_free(&build_ats(&reach, &PredicateSet::default())));
        let none = parse_program("int x; x := 1;").unwrap();
        assert!(is_error_free(&build_ats(&none, &PredicateSet::default())));
    }
}
