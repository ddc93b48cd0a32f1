use std::collections::{BTreeMap, BTreeSet};

use petgraph::algo::dominators::simple_fast;
use petgraph::algo::toposort;
use petgraph::graph::{DiGraph, NodeIndex};

use super::ast::{BExpr, Statement};
use super::cfa::{Cfa, Loc};
use super::FrontendError;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NaturalLoop {
    pub header: Loc,
    pub body: BTreeSet<Loc>,
    /// Indices into `cfa.edges` of the edges `u -> header` with `u` in the body.
    pub back_edges: Vec<usize>,
}

/// A detected loop start together with the edge entering it and its loop.
#[derive(Clone, Debug)]
pub(crate) struct LoopStart {
    pub start: Loc,
    pub entry_edge: usize,
    pub lp: NaturalLoop,
}

fn graph(cfa: &Cfa) -> (DiGraph<(), usize>, Vec<NodeIndex>) {
    let mut g = DiGraph::new();
    let nodes: Vec<NodeIndex> = cfa.locations().map(|_| g.add_node(())).collect();
    for (i, e) in cfa.edges.iter().enumerate() {
        g.add_edge(nodes[e.from.0], nodes[e.to.0], i);
    }
    (g, nodes)
}

/// Natural loops keyed by header, after checking that every cycle passes
/// through a back edge.
pub fn natural_loops(cfa: &Cfa) -> Result<Vec<NaturalLoop>, FrontendError> {
    if cfa.num_locations == 0 {
        return Ok(Vec::new());
    }
    let (g, nodes) = graph(cfa);
    let doms = simple_fast(&g, nodes[cfa.initial.0]);
    let dominates = |a: Loc, b: Loc| doms.dominators(nodes[b.0]).is_some_and(|mut it| it.any(|n| n == nodes[a.0]));
    let mut back: BTreeMap<Loc, Vec<usize>> = BTreeMap::new();
    for (i, e) in cfa.edges.iter().enumerate() {
        if dominates(e.to, e.from) {
            back.entry(e.to).or_default().push(i);
        }
    }
    let back_set: BTreeSet<usize> = back.values().flatten().copied().collect();
    let forward = g.filter_map(|_, _| Some(()), |i, w| (!back_set.contains(&g[i])).then_some(*w));
    if let Err(cycle) = toposort(&forward, None) {
        return Err(FrontendError::Unsupported(cycle.node_id().index()));
    }
    let mut preds: BTreeMap<Loc, Vec<Loc>> = BTreeMap::new();
    for e in &cfa.edges {
        preds.entry(e.to).or_default().push(e.from);
    }
    let mut loops = Vec::new();
    for (header, edges) in back {
        let mut body = BTreeSet::from([header]);
        let mut stack: Vec<Loc> = edges.iter().map(|i| cfa.edges[*i].from).collect();
        while let Some(l) = stack.pop() {
            if body.insert(l) {
                stack.extend(preds.get(&l).into_iter().flatten().copied());
            }
        }
        loops.push(NaturalLoop { header, body, back_edges: edges });
    }
    Ok(loops)
}

fn is_negation_of(neg: &BExpr, pos: &BExpr) -> bool {
    matches!(neg, BExpr::Not(inner) if **inner == *pos)
}

pub(crate) fn loop_starts(cfa: &Cfa) -> Result<Vec<LoopStart>, FrontendError> {
    let mut out: Vec<LoopStart> = Vec::new();
    for lp in natural_loops(cfa)? {
        let mut found = false;
        for (i, e) in cfa.edges.iter().enumerate() {
            let Statement::Assume(c) = &e.stmt else { continue };
            if !lp.body.contains(&e.from) || !lp.body.contains(&e.to) {
                continue;
            }
            let exits = cfa
                .out_edges(e.from)
                .any(|o| matches!(&o.stmt, Statement::Assume(n) if is_negation_of(n, c)) && !lp.body.contains(&o.to));
            if exits {
                found = true;
                if !out.iter().any(|s| s.start == e.to) {
                    out.push(LoopStart { start: e.to, entry_edge: i, lp: lp.clone() });
                }
            }
        }
        if !found {
            return Err(FrontendError::Unsupported(lp.header.0));
        }
    }
    out.sort_by_key(|s| s.start);
    Ok(out)
}

/// Locations where a loop body starts: the target of an `assume b` edge
/// that stays inside a natural loop while its sibling `assume !b` leaves it.
pub fn detect_loop_starts(cfa: &Cfa) -> Result<BTreeSet<Loc>, FrontendError> {
    Ok(loop_starts(cfa)?.into_iter().map(|s| s.start).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frontend::{parse_program, Edge};

    // Simple cycles by brute-force DFS from each smallest node.
    fn simple_cycles(cfa: &Cfa) -> Vec<Vec<Loc>> {
        let mut out = Vec::new();
        for s in cfa.locations() {
            let mut stack = vec![(s, vec![s])];
            while let Some((l, path)) = stack.pop() {
                for e in cfa.out_edges(l) {
                    if e.to == s {
                        out.push(path.clone());
                    } else if e.to > s && !path.contains(&e.to) {
                        let mut p = path.clone();
                        p.push(e.to);
                        stack.push((e.to, p));
                    }
                }
            }
        }
        out
    }

    // Iterative set-based dominators.
    fn dominators(cfa: &Cfa) -> Vec<BTreeSet<Loc>> {
        let all: BTreeSet<Loc> = cfa.locations().collect();
        let mut dom: Vec<BTreeSet<Loc>> = cfa.locations().map(|_| all.clone()).collect();
        dom[cfa.initial.0] = BTreeSet::from([cfa.initial]);
        let mut changed = true;
        while changed {
            changed = false;
            for l in cfa.locations().filter(|l| *l != cfa.initial) {
                let mut new: Option<BTreeSet<Loc>> = None;
                for e in cfa.edges.iter().filter(|e| e.to == l) {
                    let d = &dom[e.from.0];
                    new = Some(match new {
                        None => d.clone(),
                        Some(n) => n.intersection(d).copied().collect(),
                    });
                }
                let mut new = new.unwrap_or_default();
                new.insert(l);
                if new != dom[l.0] {
                    dom[l.0] = new;
                    changed = true;
                }
            }
        }
        dom
    }

    fn oracle(cfa: &Cfa) -> BTreeSet<Loc> {
        let dom = dominators(cfa);
        let cycles = simple_cycles(cfa);
        let mut out = BTreeSet::new();
        for h in cfa.locations() {
            let lp: BTreeSet<Loc> = cycles
                .iter()
                .filter(|c| c.contains(&h) && c.iter().all(|n| dom[n.0].contains(&h)))
                .flatten()
                .copied()
                .collect();
            for e in cfa.edges.iter().filter(|e| lp.contains(&e.from) && lp.contains(&e.to)) {
                let Statement::Assume(c) = &e.stmt else { continue };
                let exits = cfa.out_edges(e.from).any(|o: &Edge| {
                    matches!(&o.stmt, Statement::Assume(n) if is_negation_of(n, c)) && !lp.contains(&o.to)
                });
                if exits {
                    out.insert(e.to);
                }
            }
        }
        out
    }

    const ARRAY: &str = "int arr[1000];\nint j;\nj := 0;\nwhile (j < 990) {\n  j := j + 10;\n  if (!(j >= 0 && j < 1000)) { ERR: ; }\n  arr[j] := 0;\n}\n";

    #[test]
    fn array_has_one_loop_start() {
        let cfa = parse_program(ARRAY).unwrap();
        let starts = detect_loop_starts(&cfa).unwrap();
        assert_eq!(starts.len(), 1);
        let entry = cfa.edges.iter().find(|e| e.stmt.to_string() == "assume (j < 990)").unwrap();
        assert_eq!(starts, BTreeSet::from([entry.to]));
        assert_eq!(starts, oracle(&cfa));
    }

    #[test]
    fn straight_line_has_none() {
        let cfa = parse_program("int x; x := 1; if (x > 0) { x := 2; }").unwrap();
        assert!(detect_loop_starts(&cfa).unwrap().is_empty());
    }

    #[test]
    fn sequential_and_nested_loops() {
        let seq = parse_program("int i; while (i < 3) { i := i + 1; } while (i > 0) { i := i - 1; }").unwrap();
        let s = detect_loop_starts(&seq).unwrap();
        assert_eq!(s.len(), 2);
        assert_eq!(s, oracle(&seq));

        let nested = parse_program(
            "int i; int j; while (i < 3) { j := 0; while (j < i) { if (j > 5) { j := 0; } else { j := j + 1; } } i := i + 1; }",
        )
        .unwrap();
        let s = detect_loop_starts(&nested).unwrap();
        assert_eq!(s.len(), 2);
        assert_eq!(s, oracle(&nested));
    }

    #[test]
    fn irreducible_graph_is_rejected() {
        let text = "vars x\nlocations 3\ninitial 0\nerrors\nedge 0 1 assume (x > 0)\nedge 0 2 assume (!(x > 0))\nedge 1 2 skip\nedge 2 1 skip\n";
        let cfa = Cfa::from_text(text).unwrap();
        assert!(matches!(detect_loop_starts(&cfa), Err(FrontendError::Unsupported(_))));
    }

    #[test]
    fn loop_without_conditional_exit_is_rejected() {
        let text = "vars x\nlocations 2\ninitial 0\nerrors\nedge 0 1 skip\nedge 1 0 skip\n";
        let cfa = Cfa::from_text(text).unwrap();
        assert!(matches!(detect_loop_starts(&cfa), Err(FrontendError::Unsupported(_))));
    }
}
