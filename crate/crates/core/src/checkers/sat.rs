//! A small CDCL solver: two watched literals, first-UIP learning, VSIDS-style
//! activities with phase saving, and geometric restarts.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use super::cnf::CnfFormula;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SatResult {
    /// Indexed by DIMACS variable; slot 0 is unused.
    Sat(Vec<bool>),
    Unsat,
}

impl SatResult {
    pub fn is_sat(&self) -> bool {
        matches!(self, SatResult::Sat(_))
    }
}

// Internal literal: 2 * var + (1 if negative).
type Lit = u32;

fn lit_of(d: i32) -> Lit {
    let v = d.unsigned_abs() - 1;
    2 * v + (d < 0) as u32
}

fn var(l: Lit) -> usize {
    (l >> 1) as usize
}

#[derive(PartialEq)]
struct Score(f64, usize);

impl Eq for Score {}

impl PartialOrd for Score {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Score {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.total_cmp(&other.0).then_with(|| other.1.cmp(&self.1))
    }
}

struct Solver {
    clauses: Vec<Vec<Lit>>,
    watches: Vec<Vec<usize>>,
    // 0 unassigned, 1 true, -1 false
    assign: Vec<i8>,
    level: Vec<u32>,
    reason: Vec<Option<usize>>,
    trail: Vec<Lit>,
    trail_lim: Vec<usize>,
    qhead: usize,
    activity: Vec<f64>,
    var_inc: f64,
    heap: BinaryHeap<Score>,
    phase: Vec<bool>,
    seen: Vec<bool>,
}

impl Solver {
    fn new(n: usize) -> Solver {
        Solver {
            clauses: Vec::new(),
            watches: vec![Vec::new(); 2 * n],
            assign: vec![0; n],
            level: vec![0; n],
            reason: vec![None; n],
            trail: Vec::new(),
            trail_lim: Vec::new(),
            qhead: 0,
            activity: vec![0.0; n],
            var_inc: 1.0,
            heap: (0..n).map(|v| Score(0.0, v)).collect(),
            phase: vec![false; n],
            seen: vec![false; n],
        }
    }

    fn value(&self, l: Lit) -> i8 {
        let a = self.assign[var(l)];
        if l & 1 == 1 {
            -a
        } else {
            a
        }
    }

    fn decision_level(&self) -> u32 {
        self.trail_lim.len() as u32
    }

    fn enqueue(&mut self, l: Lit, reason: Option<usize>) {
        let v = var(l);
        self.assign[v] = if l & 1 == 1 { -1 } else { 1 };
        self.level[v] = self.decision_level();
        self.reason[v] = reason;
        self.trail.push(l);
    }

    fn attach(&mut self, lits: Vec<Lit>) -> usize {
        let i = self.clauses.len();
        self.watches[lits[0] as usize].push(i);
        self.watches[lits[1] as usize].push(i);
        self.clauses.push(lits);
        i
    }

    fn propagate(&mut self) -> Option<usize> {
        while self.qhead < self.trail.len() {
            let p = self.trail[self.qhead];
            self.qhead += 1;
            let false_lit = p ^ 1;
            let mut ws = std::mem::take(&mut self.watches[false_lit as usize]);
            let mut j = 0;
            let mut conflict = None;
            let mut i = 0;
            while i < ws.len() {
                let ci = ws[i];
                i += 1;
                let c = &mut self.clauses[ci];
                if c[0] == false_lit {
                    c.swap(0, 1);
                }
                let first = c[0];
                let first_val = {
                    let a = self.assign[var(first)];
                    if first & 1 == 1 {
                        -a
                    } else {
                        a
                    }
                };
                if first_val == 1 {
                    ws[j] = ci;
                    j += 1;
                    continue;
                }
                let mut moved = false;
                for k in 2..c.len() {
                    let l = c[k];
                    let a = self.assign[var(l)];
                    let val = if l & 1 == 1 { -a } else { a };
                    if val != -1 {
                        c.swap(1, k);
                        self.watches[c[1] as usize].push(ci);
                        moved = true;
                        break;
                    }
                }
                if moved {
                    continue;
                }
                ws[j] = ci;
                j += 1;
                if first_val == -1 {
                    conflict = Some(ci);
                    while i < ws.len() {
                        ws[j] = ws[i];
                        j += 1;
                        i += 1;
                    }
                } else {
                    self.enqueue(first, Some(ci));
                }
            }
            ws.truncate(j);
            self.watches[false_lit as usize] = ws;
            if conflict.is_some() {
                return conflict;
            }
        }
        None
    }

    fn bump(&mut self, v: usize) {
        self.activity[v] += self.var_inc;
        if self.activity[v] > 1e100 {
            for a in &mut self.activity {
                *a *= 1e-100;
            }
            self.var_inc *= 1e-100;
            self.heap = (0..self.activity.len()).map(|v| Score(self.activity[v], v)).collect();
        } else {
            self.heap.push(Score(self.activity[v], v));
        }
    }

    /// First-UIP learnt clause (asserting literal first) and backjump level.
    fn analyze(&mut self, mut confl: usize) -> (Vec<Lit>, u32) {
        let mut learnt: Vec<Lit> = vec![0];
        let mut counter = 0;
        let mut p: Option<Lit> = None;
        let mut idx = self.trail.len();
        let current = self.decision_level();
        loop {
            let start = if p.is_some() { 1 } else { 0 };
            for k in start..self.clauses[confl].len() {
                let q = self.clauses[confl][k];
                let v = var(q);
                if !self.seen[v] && self.level[v] > 0 {
                    self.seen[v] = true;
                    self.bump(v);
                    if self.level[v] == current {
                        counter += 1;
                    } else {
                        learnt.push(q);
                    }
                }
            }
            loop {
                idx -= 1;
                if self.seen[var(self.trail[idx])] {
                    break;
                }
            }
            let pl = self.trail[idx];
            self.seen[var(pl)] = false;
            counter -= 1;
            p = Some(pl);
            if counter == 0 {
                break;
            }
            confl = self.reason[var(pl)].expect("implied literal has a reason");
        }
        learnt[0] = p.expect("conflict at a positive level") ^ 1;
        for l in &learnt[1..] {
            self.seen[var(*l)] = false;
        }
        let mut back = 0;
        if learnt.len() > 1 {
            let mut best = 1;
            for k in 2..learnt.len() {
                if self.level[var(learnt[k])] > self.level[var(learnt[best])] {
                    best = k;
                }
            }
            learnt.swap(1, best);
            back = self.level[var(learnt[1])];
        }
        self.var_inc /= 0.95;
        (learnt, back)
    }

    fn backtrack(&mut self, lvl: u32) {
        if self.decision_level() <= lvl {
            return;
        }
        let lim = self.trail_lim[lvl as usize];
        for k in (lim..self.trail.len()).rev() {
            let l = self.trail[k];
            let v = var(l);
            self.phase[v] = l & 1 == 0;
            self.assign[v] = 0;
            self.reason[v] = None;
            self.heap.push(Score(self.activity[v], v));
        }
        self.trail.truncate(lim);
        self.trail_lim.truncate(lvl as usize);
        self.qhead = lim;
    }

    fn pick(&mut self) -> Option<Lit> {
        while let Some(Score(_, v)) = self.heap.pop() {
            if self.assign[v] == 0 {
                return Some(2 * v as u32 + (!self.phase[v]) as u32);
            }
        }
        None
    }

    fn search(&mut self) -> bool {
        let mut limit = 100.0f64;
        let mut since_restart = 0u64;
        loop {
            if let Some(confl) = self.propagate() {
                if self.decision_level() == 0 {
                    return false;
                }
                let (learnt, back) = self.analyze(confl);
                self.backtrack(back);
                if learnt.len() == 1 {
                    self.enqueue(learnt[0], None);
                } else {
                    let first = learnt[0];
                    let ci = self.attach(learnt);
                    self.enqueue(first, Some(ci));
                }
                since_restart += 1;
                if since_restart as f64 >= limit {
                    since_restart = 0;
                    limit *= 1.5;
                    self.backtrack(0);
                }
            } else {
                match self.pick() {
                    None => return true,
                    Some(l) => {
                        self.trail_lim.push(self.trail.len());
                        self.enqueue(l, None);
                    }
                }
            }
        }
    }
}

/// Decides satisfiability. A returned model is checked against every clause.
pub fn sat_solve(f: &CnfFormula) -> SatResult {
    let n = f.num_vars as usize;
    let mut s = Solver::new(n);
    for c in &f.clauses {
        let mut lits: Vec<Lit> = c.iter().map(|&d| lit_of(d)).collect();
        lits.sort_unstable();
        lits.dedup();
        if lits.windows(2).any(|w| w[0] ^ 1 == w[1]) {
            continue;
        }
        match lits.len() {
            0 => return SatResult::Unsat,
            1 => match s.value(lits[0]) {
                -1 => return SatResult::Unsat,
                0 => s.enqueue(lits[0], None),
                _ => {}
            },
            _ => {
                s.attach(lits);
            }
        }
    }
    if !s.search() {
        return SatResult::Unsat;
    }
    let mut model = vec![false; n + 1];
    for v in 0..n {
        model[v + 1] = s.assign[v] == 1;
    }
    assert!(f.satisfied_by(&model), "solver produced a non-model");
    SatResult::Sat(model)
}
