use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use super::ast::{BExpr, Expr, Statement};
use super::parser::{declarations, parse_source, parse_statement, Program, Stmt};
use super::FrontendError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Loc(pub usize);

impl fmt::Display for Loc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "l{}", self.0)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Edge {
    pub from: Loc,
    pub stmt: Statement,
    pub to: Loc,
    /// Source line, 0 when synthesized.
    pub line: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cfa {
    pub num_locations: usize,
    pub initial: Loc,
    pub edges: Vec<Edge>,
    pub errors: BTreeSet<Loc>,
    pub variables: Vec<String>,
    /// `while` source line to the location its body starts at.
    pub loop_lines: BTreeMap<usize, Loc>,
}

impl Cfa {
    pub fn locations(&self) -> impl Iterator<Item = Loc> {
        (0..self.num_locations).map(Loc)
    }

    pub fn out_edges(&self, l: Loc) -> impl Iterator<Item = &Edge> {
        self.edges.iter().filter(move |e| e.from == l)
    }

    pub fn add_location(&mut self) -> Loc {
        self.num_locations += 1;
        Loc(self.num_locations - 1)
    }

    pub fn has_var(&self, v: &str) -> bool {
        self.variables.iter().any(|x| x == v)
    }

    pub fn add_var(&mut self, v: &str) {
        if !self.has_var(v) {
            self.variables.push(v.to_string());
        }
    }

    /// A variable name `prefix{k}` not yet in use.
    pub fn fresh_var(&mut self, prefix: &str) -> String {
        let mut k = 0;
        loop {
            let name = format!("{}{}", prefix, k);
            if !self.has_var(&name) {
                self.add_var(&name);
                return name;
            }
            k += 1;
        }
    }

    /// Count of edges whose statement applies the given operator.
    pub fn count_op(&self, op: super::BinOp) -> usize {
        self.edges.iter().filter(|e| e.stmt.uses_op(op)).count()
    }

    /// Drops locations unreachable from the initial one and renumbers the
    /// rest in depth-first preorder (edges taken in insertion order).
    pub fn canonicalize(&mut self) {
        let mut succ: BTreeMap<Loc, Vec<Loc>> = BTreeMap::new();
        for e in &self.edges {
            succ.entry(e.from).or_default().push(e.to);
        }
        let mut order = Vec::new();
        let mut seen = BTreeSet::new();
        let mut stack = vec![self.initial];
        while let Some(l) = stack.pop() {
            if !seen.insert(l) {
                continue;
            }
            order.push(l);
            if let Some(ns) = succ.get(&l) {
                for n in ns.iter().rev() {
                    if !seen.contains(n) {
                        stack.push(*n);
                    }
                }
            }
        }
        if order.len() < self.num_locations {
            log::warn!("pruning {} unreachable location(s)", self.num_locations - order.len());
        }
        let map: BTreeMap<Loc, Loc> = order.iter().enumerate().map(|(i, l)| (*l, Loc(i))).collect();
        self.edges.retain(|e| map.contains_key(&e.from));
        for e in &mut self.edges {
            e.from = map[&e.from];
            e.to = map[&e.to];
        }
        self.errors = self.errors.iter().filter_map(|l| map.get(l).copied()).collect();
        self.loop_lines = self.loop_lines.iter().filter_map(|(line, l)| map.get(l).map(|m| (*line, *m))).collect();
        self.initial = map[&self.initial];
        self.num_locations = order.len();
    }

    /// Line-oriented text form, re-readable by [`Cfa::from_text`].
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        s.push_str("vars");
        for v in &self.variables {
            s.push(' ');
            s.push_str(v);
        }
        s.push('\n');
        s.push_str(&format!("locations {}\ninitial {}\n", self.num_locations, self.initial.0));
        s.push_str("errors");
        for l in &self.errors {
            s.push_str(&format!(" {}", l.0));
        }
        s.push('\n');
        for (line, l) in &self.loop_lines {
            s.push_str(&format!("loop {} {}\n", line, l.0));
        }
        for e in &self.edges {
            s.push_str(&format!("edge {} {} {}\n", e.from.0, e.to.0, e.stmt));
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Cfa, FrontendError> {
        let mut cfa = Cfa {
            num_locations: 0,
            initial: Loc(0),
            edges: Vec::new(),
            errors: BTreeSet::new(),
            variables: Vec::new(),
            loop_lines: BTreeMap::new(),
        };
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() {
                continue;
            }
            let bad = |msg: &str| FrontendError::Parse { line: i + 1, col: 1, msg: msg.to_string() };
            let num = |w: Option<&str>| -> Result<usize, FrontendError> {
                w.and_then(|w| w.parse().ok()).ok_or_else(|| bad("expected a number"))
            };
            let (head, rest) = line.split_once(' ').unwrap_or((line, ""));
            match head {
                "vars" => cfa.variables = rest.split_whitespace().map(String::from).collect(),
                "locations" => cfa.num_locations = num(Some(rest.trim()))?,
                "initial" => cfa.initial = Loc(num(Some(rest.trim()))?),
                "errors" => {
                    for w in rest.split_whitespace() {
                        cfa.errors.insert(Loc(num(Some(w))?));
                    }
                }
                "loop" => {
                    let mut it = rest.split_whitespace();
                    let ln = num(it.next())?;
                    let l = num(it.next())?;
                    cfa.loop_lines.insert(ln, Loc(l));
                }
                "edge" => {
                    let mut it = rest.splitn(3, ' ');
                    let from = Loc(num(it.next())?);
                    let to = Loc(num(it.next())?);
                    let stmt = parse_statement(it.next().unwrap_or("")).map_err(|e| e.at_line(i + 1))?;
                    cfa.edges.push(Edge { from, stmt, to, line: 0 });
                }
                _ => return Err(bad("unknown directive")),
            }
        }
        let n = cfa.num_locations;
        let in_range = |l: &Loc| l.0 < n;
        if !in_range(&cfa.initial)
            || !cfa.errors.iter().all(in_range)
            || !cfa.edges.iter().all(|e| in_range(&e.from) && in_range(&e.to))
        {
            return Err(FrontendError::Parse { line: 0, col: 0, msg: "location out of range".into() });
        }
        Ok(cfa)
    }

    /// Structural equality up to location renaming, by comparing canonical forms.
    pub fn isomorphic(&self, other: &Cfa) -> bool {
        let (mut a, mut b) = (self.clone(), other.clone());
        a.canonicalize();
        b.canonicalize();
        let key = |c: &Cfa| {
            let mut es: Vec<(usize, usize, String)> =
                c.edges.iter().map(|e| (e.from.0, e.to.0, e.stmt.to_string())).collect();
            es.sort();
            let mut vs = c.variables.clone();
            vs.sort();
            (c.num_locations, c.initial, c.errors.clone(), es, vs)
        };
        key(&a) == key(&b)
    }
}

impl fmt::Display for Cfa {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

pub fn parse_program(src: &str) -> Result<Cfa, FrontendError> {
    let program = parse_source(src)?;
    let decls = declarations(&program)?;
    check_uses(&program.body, &decls)?;
    Ok(build(&program, &decls))
}

fn check_uses(stmts: &[Stmt], decls: &BTreeMap<String, Option<i64>>) -> Result<(), FrontendError> {
    let scalar = |name: &str, line: usize| match decls.get(name) {
        None => Err(FrontendError::Undeclared { name: name.to_string(), line }),
        Some(Some(_)) => Err(FrontendError::NotScalar { name: name.to_string(), line }),
        Some(None) => Ok(()),
    };
    let expr = |e: &Expr, line: usize| {
        let mut vs = BTreeSet::new();
        e.vars(&mut vs);
        vs.iter().try_for_each(|v| scalar(v, line))
    };
    let cond = |b: &BExpr, line: usize| {
        let mut vs = BTreeSet::new();
        b.vars(&mut vs);
        vs.iter().try_for_each(|v| scalar(v, line))
    };
    for s in stmts {
        match s {
            Stmt::Assign { target, expr: e, line } => {
                scalar(target, *line)?;
                expr(e, *line)?;
            }
            Stmt::ArrayWrite { array, index, value, line } => {
                match decls.get(array) {
                    None => return Err(FrontendError::Undeclared { name: array.clone(), line: *line }),
                    Some(None) => {
                        return Err(FrontendError::Parse {
                            line: *line,
                            col: 1,
                            msg: format!("`{}` is not an array", array),
                        })
                    }
                    Some(Some(_)) => {}
                }
                expr(index, *line)?;
                expr(value, *line)?;
            }
            Stmt::If { cond: c, then, otherwise, line } => {
                cond(c, *line)?;
                check_uses(then, decls)?;
                if let Some(o) = otherwise {
                    check_uses(o, decls)?;
                }
            }
            Stmt::While { cond: c, body, line } => {
                cond(c, *line)?;
                check_uses(body, decls)?;
            }
            Stmt::Err { .. } => {}
        }
    }
    Ok(())
}

struct Builder {
    n: usize,
    edges: Vec<Edge>,
    errors: BTreeSet<Loc>,
    loop_lines: BTreeMap<usize, Loc>,
}

impl Builder {
    fn fresh(&mut self) -> Loc {
        self.n += 1;
        Loc(self.n - 1)
    }

    fn edge(&mut self, from: Loc, stmt: Statement, to: Loc, line: usize) {
        self.edges.push(Edge { from, stmt, to, line });
    }

    fn seq(&mut self, stmts: &[Stmt], from: Loc, to: Loc) {
        if stmts.is_empty() {
            self.edge(from, Statement::Skip, to, 0);
            return;
        }
        let mut cur = from;
        for (i, s) in stmts.iter().enumerate() {
            let next = if i + 1 == stmts.len() { to } else { self.fresh() };
            self.stmt(s, cur, next);
            cur = next;
        }
    }

    fn stmt(&mut self, s: &Stmt, from: Loc, to: Loc) {
        match s {
            Stmt::Assign { target, expr, line } => {
                self.edge(from, Statement::Assign(target.clone(), expr.clone()), to, *line)
            }
            Stmt::ArrayWrite { line, .. } => self.edge(from, Statement::Skip, to, *line),
            Stmt::If { cond, then, otherwise, line } => {
                let t = self.fresh();
                self.edge(from, Statement::Assume(cond.clone()), t, *line);
                self.seq(then, t, to);
                let neg = Statement::Assume(BExpr::negation(cond.clone()));
                match otherwise {
                    Some(o) => {
                        let e = self.fresh();
                        self.edge(from, neg, e, *line);
                        self.seq(o, e, to);
                    }
                    None => self.edge(from, neg, to, *line),
                }
            }
            Stmt::While { cond, body, line } => {
                let b = self.fresh();
                self.loop_lines.insert(*line, b);
                self.edge(from, Statement::Assume(cond.clone()), b, *line);
                self.seq(body, b, from);
                self.edge(from, Statement::Assume(BExpr::negation(cond.clone())), to, *line);
            }
            Stmt::Err { .. } => {
                self.errors.insert(from);
            }
        }
    }
}

fn build(p: &Program, decls: &BTreeMap<String, Option<i64>>) -> Cfa {
    let mut b = Builder { n: 1, edges: Vec::new(), errors: BTreeSet::new(), loop_lines: BTreeMap::new() };
    if !p.body.is_empty() {
        let exit = b.fresh();
        let mut start = Loc(0);
        if let Some(d) = p.decls.iter().find(|d| d.array_len.is_some()) {
            start = b.fresh();
            b.edge(Loc(0), Statement::Skip, start, d.line);
        }
        b.seq(&p.body, start, exit);
    }
    let variables = p.decls.iter().filter(|d| decls.get(&d.name) == Some(&None)).map(|d| d.name.clone()).collect();
    let mut cfa = Cfa {
        num_locations: b.n,
        initial: Loc(0),
        edges: b.edges,
        errors: b.errors,
        variables,
        loop_lines: b.loop_lines,
    };
    cfa.canonicalize();
    cfa
}
