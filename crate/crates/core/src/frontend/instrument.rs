use std::collections::BTreeSet;

use super::ast::{BExpr, Expr, Statement};
use super::cfa::{Cfa, Edge, Loc};
use super::loops::loop_starts;
use super::parser::{LoopRef, RankingEntry};
use super::FrontendError;
use crate::logic::CmpOp;

fn describe(at: &LoopRef) -> String {
    match at {
        LoopRef::Line(l) => format!("at {}", l),
        LoopRef::Index(k) => format!("at loop{}", k),
    }
}

/// Emits the pair `assume c -> fresh error location`, `assume !c -> to`.
fn guard(cfa: &mut Cfa, from: Loc, c: BExpr, to: Loc) {
    let err = cfa.add_location();
    cfa.errors.insert(err);
    cfa.edges.push(Edge { from, stmt: Statement::Assume(c.clone()), to: err, line: 0 });
    cfa.edges.push(Edge { from, stmt: Statement::Assume(BExpr::negation(c)), to, line: 0 });
}

/// Turns termination of the given loops into reachability of fresh error
/// locations: each rank must be non-negative where its loop body starts and
/// strictly smaller on every back edge than at the last body start.
pub fn instrument_termination(cfa: &Cfa, rankings: &[RankingEntry]) -> Result<Cfa, FrontendError> {
    let mut out = cfa.clone();
    if rankings.is_empty() {
        return Ok(out);
    }
    let starts = loop_starts(cfa)?;
    for r in rankings {
        let mut vars = BTreeSet::new();
        r.rank.vars(&mut vars);
        if let Some(v) = vars.iter().find(|v| !cfa.has_var(v)) {
            return Err(FrontendError::Undeclared { name: v.clone(), line: 0 });
        }
        if r.rank.linearize().is_none() {
            return Err(FrontendError::NonLinearRank(r.rank.to_string()));
        }
        let not_loop = || FrontendError::NotALoop(describe(&r.at));
        let start = match &r.at {
            LoopRef::Line(l) => {
                let loc = cfa.loop_lines.get(l).ok_or_else(not_loop)?;
                starts.iter().find(|s| s.start == *loc).ok_or_else(not_loop)?
            }
            LoopRef::Index(k) => starts.get(*k).ok_or_else(not_loop)?,
        };
        let entry = &cfa.edges[start.entry_edge];
        if entry.from != start.lp.header {
            return Err(not_loop());
        }
        let assigned: BTreeSet<&str> =
            cfa.edges.iter().filter(|e| start.lp.body.contains(&e.from)).filter_map(|e| e.stmt.assigned()).collect();
        let mut copies = Vec::new();
        let mut old_rank = r.rank.clone();
        for v in vars.iter().filter(|v| assigned.contains(v.as_str())) {
            let mut old = format!("old_{}", v);
            if out.has_var(&old) {
                old = out.fresh_var(&format!("old_{}_", v));
            }
            out.add_var(&old);
            old_rank = old_rank.rename(v, &old);
            copies.push((old, v.clone()));
        }

        let g0 = out.add_location();
        out.edges[start.entry_edge].to = g0;
        for l in out.loop_lines.values_mut() {
            if *l == start.start {
                *l = g0;
            }
        }
        let non_negative = BExpr::cmp(r.rank.clone(), CmpOp::Ge, Expr::Const(0));
        let after_guard = if copies.is_empty() { start.start } else { out.add_location() };
        guard(&mut out, g0, BExpr::negation(non_negative), after_guard);
        let mut cur = after_guard;
        for (i, (old, v)) in copies.iter().enumerate() {
            let next = if i + 1 == copies.len() { start.start } else { out.add_location() };
            out.edges.push(Edge { from: cur, stmt: Statement::Assign(old.clone(), Expr::var(v)), to: next, line: 0 });
            cur = next;
        }

        let decrease = BExpr::cmp(r.rank.clone(), CmpOp::Lt, old_rank);
        for &b in &start.lp.back_edges {
            let b0 = out.add_location();
            out.edges[b].to = b0;
            guard(&mut out, b0, BExpr::negation(decrease.clone()), start.lp.header);
        }
    }
    out.canonicalize();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frontend::{detect_loop_starts, parse_expr, parse_program};

    const SUM: &str = "int N; int sum; int i;\nN := input();\nsum := 0;\ni := 0;\nwhile (i < N) {\n  sum := sum + i;\n  i := i + 1;\n}\n";

    fn entry(at: LoopRef, rank: &str) -> RankingEntry {
        RankingEntry { at, rank: parse_expr(rank).unwrap() }
    }

    #[test]
    fn sum_instrumentation() {
        let cfa = parse_program(SUM).unwrap();
        let inst = instrument_termination(&cfa, &[entry(LoopRef::Line(5), "N - i")]).unwrap();
        let labels: Vec<String> = inst.edges.iter().map(|e| e.stmt.to_string()).collect();
        assert!(labels.contains(&"old_i := i".to_string()));
        assert!(!labels.iter().any(|l| l.contains("old_N")));
        assert!(labels.contains(&"assume (!(N - i >= 0))".to_string()));
        assert!(labels.contains(&"assume (!(N - i < N - old_i))".to_string()));
        assert_eq!(inst.errors.len(), 2);
        assert!(inst.has_var("old_i"));
        assert_eq!(detect_loop_starts(&inst).unwrap().len(), 1);
    }

    #[test]
    fn empty_spec_list_is_identity() {
        let cfa = parse_program(SUM).unwrap();
        assert_eq!(instrument_termination(&cfa, &[]).unwrap(), cfa);
    }

    #[test]
    fn rejects_bad_specs() {
        let cfa = parse_program(SUM).unwrap();
        assert!(matches!(
            instrument_termination(&cfa, &[entry(LoopRef::Line(5), "z - i")]),
            Err(FrontendError::Undeclared { .. })
        ));
        assert!(matches!(
            instrument_termination(&cfa, &[entry(LoopRef::Line(2), "N - i")]),
            Err(FrontendError::NotALoop(_))
        ));
        assert!(matches!(
            instrument_termination(&cfa, &[entry(LoopRef::Index(3), "N - i")]),
            Err(FrontendError::NotALoop(_))
        ));
    }
}
