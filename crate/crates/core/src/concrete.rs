//! Concrete semantics over (bounded-width stand-ins for) mathematical
//! integers, with an optional approximate adder for `+`, and a bounded
//! explorer over all executions.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::adders::AdderModel;
use crate::frontend::{BExpr, BinOp, Cfa, Expr, Loc, Statement};
use crate::logic::CmpOp;

pub type ConcreteState = BTreeMap<String, i128>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum Fault {
    #[error("division by zero")]
    DivisionByZero,
    #[error("arithmetic overflow")]
    Overflow,
    #[error("operands {0} and {1} outside the adder's range")]
    Range(i128, i128),
    #[error("`input()` needs a value")]
    Input,
    #[error("unbound variable")]
    Unbound,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConcreteError {
    #[error("invalid bounds: {0}")]
    Bounds(String),
    #[error("adder: {0}")]
    Adder(#[from] crate::adders::AdderError),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExecBounds {
    pub max_steps: u64,
    pub input_lo: i128,
    pub input_hi: i128,
    /// Operand width of the adder in AC runs; the model's own width if unset.
    pub width: Option<u32>,
    /// Cap on steps summed over all explored executions.
    pub max_total_steps: u64,
}

impl ExecBounds {
    pub fn new(max_steps: u64, input_lo: i128, input_hi: i128) -> Result<ExecBounds, ConcreteError> {
        if max_steps == 0 {
            return Err(ConcreteError::Bounds("max steps must be at least 1".into()));
        }
        if input_lo > input_hi {
            return Err(ConcreteError::Bounds(format!("empty input range [{}, {}]", input_lo, input_hi)));
        }
        Ok(ExecBounds { max_steps, input_lo, input_hi, width: None, max_total_steps: 200_000_000 })
    }

    pub fn with_width(mut self, w: u32) -> Self {
        self.width = Some(w);
        self
    }
}

fn arith(op: BinOp, a: i128, b: i128) -> Result<i128, Fault> {
    match op {
        BinOp::Add => a.checked_add(b).ok_or(Fault::Overflow),
        BinOp::Sub => a.checked_sub(b).ok_or(Fault::Overflow),
        BinOp::Mul => a.checked_mul(b).ok_or(Fault::Overflow),
        BinOp::Div if b == 0 => Err(Fault::DivisionByZero),
        BinOp::Div => a.checked_div(b).ok_or(Fault::Overflow),
    }
}

fn adder_add(m: &AdderModel, a: i128, b: i128) -> Result<i128, Fault> {
    let max = m.max_operand() as i128;
    if !(0..=max).contains(&a) || !(0..=max).contains(&b) {
        return Err(Fault::Range(a, b));
    }
    m.evaluate(a as u64, b as u64).map(|z| z as i128).map_err(|_| Fault::Range(a, b))
}

pub fn eval_expr(e: &Expr, s: &ConcreteState) -> Result<i128, Fault> {
    match e {
        Expr::Var(v) => s.get(v).copied().ok_or(Fault::Unbound),
        Expr::Const(c) => Ok(*c as i128),
        Expr::Input => Err(Fault::Input),
        Expr::Bin(op, l, r) => arith(*op, eval_expr(l, s)?, eval_expr(r, s)?),
    }
}

pub fn eval_bexpr(b: &BExpr, s: &ConcreteState) -> Result<bool, Fault> {
    Ok(match b {
        BExpr::Const(c) => *c,
        BExpr::Cmp(l, op, r) => op.holds(eval_expr(l, s)?, eval_expr(r, s)?),
        BExpr::Not(x) => !eval_bexpr(x, s)?,
        BExpr::And(a, b) => eval_bexpr(a, s)? && eval_bexpr(b, s)?,
        BExpr::Or(a, b) => eval_bexpr(a, s)? || eval_bexpr(b, s)?,
    })
}

/// One precise transition; `Ok(None)` when an assumption blocks.
pub fn step(stm: &Statement, s: &ConcreteState) -> Result<Option<ConcreteState>, Fault> {
    match stm {
        Statement::Skip => Ok(Some(s.clone())),
        Statement::Assume(b) => Ok(eval_bexpr(b, s)?.then(|| s.clone())),
        Statement::Assign(v, e) => {
            let val = eval_expr(e, s)?;
            let mut out = s.clone();
            out.insert(v.clone(), val);
            Ok(Some(out))
        }
    }
}

/// Every program variable mapped to 0.
pub fn initial_state(cfa: &Cfa) -> ConcreteState {
    cfa.variables.iter().map(|v| (v.clone(), 0)).collect()
}

// Index-compiled statements for the explorer.

#[derive(Clone, Debug)]
enum CExpr {
    Var(usize),
    Const(i128),
    Input,
    Bin(BinOp, Box<CExpr>, Box<CExpr>),
}

#[derive(Clone, Debug)]
enum CBool {
    Const(bool),
    Cmp(CExpr, CmpOp, CExpr),
    Not(Box<CBool>),
    And(Box<CBool>, Box<CBool>),
    Or(Box<CBool>, Box<CBool>),
}

#[derive(Clone, Debug)]
enum CStmt {
    Skip,
    Assume(CBool),
    Assign(usize, CExpr),
    /// `v := a + b` evaluated by the adder in AC runs.
    Approx(usize, CExpr, CExpr),
}

struct Compiled {
    index: BTreeMap<String, usize>,
    stmts: Vec<CStmt>,
    succ: Vec<Vec<usize>>,
}

impl Compiled {
    fn new(cfa: &Cfa, approx: bool) -> Compiled {
        let mut index = BTreeMap::new();
        for v in &cfa.variables {
            let n = index.len();
            index.entry(v.clone()).or_insert(n);
        }
        for e in &cfa.edges {
            for v in e.stmt.vars() {
                let n = index.len();
                index.entry(v).or_insert(n);
            }
        }
        let expr = |e: &Expr| compile_expr(e, &index);
        let stmts = cfa
            .edges
            .iter()
            .map(|e| match &e.stmt {
                Statement::Skip => CStmt::Skip,
                Statement::Assume(b) => CStmt::Assume(compile_bool(b, &index)),
                Statement::Assign(v, Expr::Bin(BinOp::Add, l, r))
                    if approx && l.as_operand().is_some() && r.as_operand().is_some() =>
                {
                    CStmt::Approx(index[v], expr(l), expr(r))
                }
                Statement::Assign(v, rhs) => CStmt::Assign(index[v], expr(rhs)),
            })
            .collect();
        let mut succ = vec![Vec::new(); cfa.num_locations];
        for (i, e) in cfa.edges.iter().enumerate() {
            succ[e.from.0].push(i);
        }
        Compiled { index, stmts, succ }
    }
}

fn compile_expr(e: &Expr, index: &BTreeMap<String, usize>) -> CExpr {
    match e {
        Expr::Var(v) => CExpr::Var(index[v]),
        Expr::Const(c) => CExpr::Const(*c as i128),
        Expr::Input => CExpr::Input,
        Expr::Bin(op, l, r) => CExpr::Bin(*op, Box::new(compile_expr(l, index)), Box::new(compile_expr(r, index))),
    }
}

fn compile_bool(b: &BExpr, index: &BTreeMap<String, usize>) -> CBool {
    match b {
        BExpr::Const(c) => CBool::Const(*c),
        BExpr::Cmp(l, op, r) => CBool::Cmp(compile_expr(l, index), *op, compile_expr(r, index)),
        BExpr::Not(x) => CBool::Not(Box::new(compile_bool(x, index))),
        BExpr::And(a, c) => CBool::And(Box::new(compile_bool(a, index)), Box::new(compile_bool(c, index))),
        BExpr::Or(a, c) => CBool::Or(Box::new(compile_bool(a, index)), Box::new(compile_bool(c, index))),
    }
}

fn ceval(e: &CExpr, s: &[i128]) -> Result<i128, Fault> {
    match e {
        CExpr::Var(i) => Ok(s[*i]),
        CExpr::Const(c) => Ok(*c),
        CExpr::Input => Err(Fault::Input),
        CExpr::Bin(op, l, r) => arith(*op, ceval(l, s)?, ceval(r, s)?),
    }
}

fn cbool(b: &CBool, s: &[i128]) -> Result<bool, Fault> {
    Ok(match b {
        CBool::Const(c) => *c,
        CBool::Cmp(l, op, r) => op.holds(ceval(l, s)?, ceval(r, s)?),
        CBool::Not(x) => !cbool(x, s)?,
        CBool::And(a, c) => cbool(a, s)? && cbool(c, s)?,
        CBool::Or(a, c) => cbool(a, s)? || cbool(c, s)?,
    })
}

/// An execution reaching an error location.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    /// Values returned by `input()`, in order.
    pub inputs: Vec<i128>,
    /// Indices into the CFA's edges.
    pub edges: Vec<usize>,
    pub error: Loc,
}

impl Witness {
    pub fn render(&self, cfa: &Cfa) -> String {
        let mut s = format!("inputs: {:?}\n", self.inputs);
        for &i in &self.edges {
            let e = &cfa.edges[i];
            s.push_str(&format!("  {} -> {}: {}\n", e.from, e.to, e.stmt));
        }
        s.push_str(&format!("  reached error location {}\n", self.error));
        s
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    NoErrorFound,
    ErrorReached(Witness),
    BudgetExhausted,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Exploration {
    pub verdict: Verdict,
    /// Executions cut short by a fault.
    pub fault_count: u64,
    pub first_fault: Option<(usize, Fault)>,
    pub steps: u64,
}

struct Frame {
    loc: usize,
    state: Vec<i128>,
    depth: u64,
    via: Option<(usize, Option<i128>)>,
}

/// Explores every execution from the all-zero state: branches over enabled
/// edges and over each `input()` value in `[input_lo, input_hi]`. With an
/// adder, three-address `+` assignments use it.
pub fn reach_error_bounded(
    cfa: &Cfa,
    bounds: &ExecBounds,
    adder: Option<&AdderModel>,
) -> Result<Exploration, ConcreteError> {
    let adder = match adder {
        Some(m) => Some(match bounds.width {
            Some(w) => m.with_width(w)?,
            None => m.clone(),
        }),
        None => None,
    };
    let prog = Compiled::new(cfa, adder.is_some());
    let errors: BTreeSet<usize> = cfa.errors.iter().map(|l| l.0).collect();
    let init = vec![0i128; prog.index.len()];
    let mut stack = vec![Frame { loc: cfa.initial.0, state: init, depth: 0, via: None }];
    let mut path: Vec<usize> = Vec::new();
    let mut inputs: Vec<(u64, i128)> = Vec::new();
    let mut out = Exploration { verdict: Verdict::NoErrorFound, fault_count: 0, first_fault: None, steps: 0 };
    let mut budget_hit = false;
    let mut succs: Vec<Frame> = Vec::new();

    while let Some(mut f) = stack.pop() {
        path.truncate(f.depth.saturating_sub(1) as usize);
        inputs.retain(|(d, _)| *d < f.depth);
        if let Some((edge, input)) = f.via {
            path.push(edge);
            if let Some(v) = input {
                inputs.push((f.depth, v));
            }
        }
        loop {
            if errors.contains(&f.loc) {
                out.verdict = Verdict::ErrorReached(Witness {
                    inputs: inputs.iter().map(|(_, v)| *v).collect(),
                    edges: path.clone(),
                    error: Loc(f.loc),
                });
                return Ok(out);
            }
            if f.depth >= bounds.max_steps {
                budget_hit = true;
                break;
            }
            out.steps += 1;
            if out.steps > bounds.max_total_steps {
                out.verdict = Verdict::BudgetExhausted;
                return Ok(out);
            }
            succs.clear();
            for &ei in &prog.succ[f.loc] {
                let to = cfa.edges[ei].to.0;
                let depth = f.depth + 1;
                let res: Result<(), Fault> = (|| {
                    match &prog.stmts[ei] {
                        CStmt::Skip => {
                            succs.push(Frame { loc: to, state: f.state.clone(), depth, via: Some((ei, None)) })
                        }
                        CStmt::Assume(b) => {
                            if cbool(b, &f.state)? {
                                succs.push(Frame { loc: to, state: f.state.clone(), depth, via: Some((ei, None)) });
                            }
                        }
                        CStmt::Assign(v, CExpr::Input) => {
                            for val in bounds.input_lo..=bounds.input_hi {
                                let mut s = f.state.clone();
                                s[*v] = val;
                                succs.push(Frame { loc: to, state: s, depth, via: Some((ei, Some(val))) });
                            }
                        }
                        CStmt::Assign(v, e) => {
                            let val = ceval(e, &f.state)?;
                            let mut s = f.state.clone();
                            s[*v] = val;
                            succs.push(Frame { loc: to, state: s, depth, via: Some((ei, None)) });
                        }
                        CStmt::Approx(v, l, r) => {
                            let m = adder.as_ref().expect("approximate statement without adder");
                            let val = adder_add(m, ceval(l, &f.state)?, ceval(r, &f.state)?)?;
                            let mut s = f.state.clone();
                            s[*v] = val;
                            succs.push(Frame { loc: to, state: s, depth, via: Some((ei, None)) });
                        }
                    }
                    Ok(())
                })();
                if let Err(fault) = res {
                    out.fault_count += 1;
                    out.first_fault.get_or_insert((ei, fault));
                }
            }
            if succs.is_empty() {
                break;
            }
            // Continue with the first successor, keep the rest for later.
            let mut rest = succs.drain(..);
            let next = rest.next().expect("nonempty");
            let pending: Vec<Frame> = rest.collect();
            stack.extend(pending.into_iter().rev());
            f = next;
            let (edge, input) = f.via.expect("successor has an edge");
            path.truncate(f.depth as usize - 1);
            path.push(edge);
            if let Some(v) = input {
                inputs.push((f.depth, v));
            }
        }
    }
    if budget_hit {
        out.verdict = Verdict::BudgetExhausted;
    }
    Ok(out)
}

/// How a single execution ended.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RunOutcome {
    /// No enabled edge left; the final state.
    Exit(ConcreteState),
    Error(Loc, ConcreteState),
    Fault(Fault),
    OutOfSteps,
    /// More than one edge enabled.
    Nondeterministic(Loc),
}

/// Runs one execution from `init`, taking `input()` values from `inputs`
/// (0 once exhausted).
pub fn run(cfa: &Cfa, init: &ConcreteState, inputs: &[i128], max_steps: u64, adder: Option<&AdderModel>) -> RunOutcome {
    let prog = Compiled::new(cfa, adder.is_some());
    let mut s = vec![0i128; prog.index.len()];
    for (v, i) in &prog.index {
        s[*i] = init.get(v).copied().unwrap_or(0);
    }
    let mut loc = cfa.initial.0;
    let mut feed = inputs.iter().copied();
    for _ in 0..=max_steps {
        if cfa.errors.contains(&Loc(loc)) {
            return RunOutcome::Error(Loc(loc), named(&prog, &s));
        }
        let mut chosen = None;
        for &ei in &prog.succ[loc] {
            let enabled = match &prog.stmts[ei] {
                CStmt::Assume(b) => match cbool(b, &s) {
                    Ok(x) => x,
                    Err(f) => return RunOutcome::Fault(f),
                },
                _ => true,
            };
            if enabled {
                if chosen.is_some() {
                    return RunOutcome::Nondeterministic(Loc(loc));
                }
                chosen = Some(ei);
            }
        }
        let Some(ei) = chosen else {
            return RunOutcome::Exit(named(&prog, &s));
        };
        let res = match &prog.stmts[ei] {
            CStmt::Skip | CStmt::Assume(_) => Ok(()),
            CStmt::Assign(v, CExpr::Input) => {
                s[*v] = feed.next().unwrap_or(0);
                Ok(())
            }
            CStmt::Assign(v, e) => ceval(e, &s).map(|x| s[*v] = x),
            CStmt::Approx(v, l, r) => (|| {
                let m = adder.expect("approximate statement without adder");
                let x = adder_add(m, ceval(l, &s)?, ceval(r, &s)?)?;
                s[*v] = x;
                Ok(())
            })(),
        };
        if let Err(f) = res {
            return RunOutcome::Fault(f);
        }
        loc = cfa.edges[ei].to.0;
    }
    RunOutcome::OutOfSteps
}

fn named(prog: &Compiled, s: &[i128]) -> ConcreteState {
    prog.index.iter().map(|(v, i)| (v.clone(), s[*i])).collect()
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::NoErrorFound => write!(f, "no error found"),
            Verdict::ErrorReached(w) => write!(f, "error reached with inputs {:?}", w.inputs),
            Verdict::BudgetExhausted => write!(f, "budget exhausted"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::adders::preset;
    use crate::frontend::{normalize_3ac, parse_program, parse_statement};

    fn st(pairs: &[(&str, i128)]) -> ConcreteState {
        pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect()
    }

    #[test]
    fn step_examples() {
        let guard = parse_statement("assume (j < 990)").unwrap();
        assert_eq!(step(&guard, &st(&[("j", 0)])).unwrap(), Some(st(&[("j", 0)])));
        assert_eq!(step(&guard, &st(&[("j", 990)])).unwrap(), None);
        let inc = parse_statement("j := j + 10").unwrap();
        assert_eq!(step(&inc, &st(&[("j", 0)])).unwrap(), Some(st(&[("j", 10)])));
        let div = parse_statement("j := j / k").unwrap();
        assert_eq!(step(&div, &st(&[("j", 1), ("k", 0)])), Err(Fault::DivisionByZero));
    }

    const ARRAY: &str = "int arr[1000];\nint j;\nj := 0;\nwhile (j < 990) {\n  j := j + 10;\n  if (!(j >= 0 && j < 1000)) { ERR: ; }\n  arr[j] := 0;\n}\n";
    const ADD_ONE: &str =
        "int u; int sum;\nu := input();\nsum := 1;\nif (u > 0) { sum := 1 + u; }\nif (sum == 0) { ERR: ; }\n";

    #[test]
    fn array_is_safe_precisely() {
        let cfa = parse_program(ARRAY).unwrap();
        let r = reach_error_bounded(&cfa, &ExecBounds::new(10_000, 0, 0).unwrap(), None).unwrap();
        assert_eq!(r.verdict, Verdict::NoErrorFound);
    }

    #[test]
    fn add_one_fails_on_approximate_adder() {
        let cfa = normalize_3ac(&parse_program(ADD_ONE).unwrap(), Some(BinOp::Add));
        let b = ExecBounds::new(100, 1, 255).unwrap().with_width(8);
        let exact = reach_error_bounded(&cfa, &b, Some(&preset("rca_16").unwrap())).unwrap();
        assert_eq!(exact.verdict, Verdict::NoErrorFound);
        let r = reach_error_bounded(&cfa, &b, Some(&preset("aca_ii_16_4").unwrap())).unwrap();
        let Verdict::ErrorReached(w) = r.verdict else { panic!("{:?}", r) };
        assert_eq!(w.inputs, vec![15]);
        assert!(w.render(&cfa).contains("reached error"));
    }

    #[test]
    fn infinite_loop_exhausts_budget() {
        let cfa = parse_program("int x; while (x >= 0) { x := x + 1; }").unwrap();
        let r = reach_error_bounded(&cfa, &ExecBounds::new(50, 0, 0).unwrap(), None).unwrap();
        assert_eq!(r.verdict, Verdict::BudgetExhausted);
    }

    #[test]
    fn range_fault_aborts_only_that_path() {
        let src = "int a; int b; a := input(); b := a + 1; if (a == 3) { ERR: ; }";
        let cfa = normalize_3ac(&parse_program(src).unwrap(), Some(BinOp::Add));
        let b = ExecBounds::new(100, -2, 3).unwrap().with_width(8);
        let r = reach_error_bounded(&cfa, &b, Some(&preset("rca_16").unwrap())).unwrap();
        assert_eq!(r.fault_count, 2);
        assert!(matches!(r.verdict, Verdict::ErrorReached(_)));
    }

    #[test]
    fn run_is_deterministic_and_framed() {
        let cfa = parse_program("int a; int b; a := input(); b := a * 2;").unwrap();
        let out = run(&cfa, &st(&[]), &[21], 10, None);
        assert_eq!(out, RunOutcome::Exit(st(&[("a", 21), ("b", 42)])));
        assert_eq!(run(&cfa, &st(&[]), &[21], 10, None), out);
    }

    #[test]
    fn bounds_validation() {
        assert!(ExecBounds::new(0, 0, 1).is_err());
        assert!(ExecBounds::new(1, 2, 1).is_err());
    }
}
