//! `*.tc.smt2` files: a header comment with the statement, a signature
//! block, and `Q_1`/`Q_2`, `Q_3`/`Q_4`, … definitions for the pairs.

use std::fmt::Write as _;
use std::path::Path;

use super::{MappedConstraint, MappedPair, Signature, ToleranceError};
use crate::frontend::{parse_statement, Expr};
use crate::logic::{CmpOp, Conjunction, Folded, LinExpr, LinearAtom, Literal, Operand};

fn term(e: &LinExpr) -> String {
    let mut parts: Vec<String> =
        e.terms().map(|(v, c)| if c == 1 { v.to_string() } else { format!("(* {} {})", num(c), v) }).collect();
    if e.get_constant() != 0 || parts.is_empty() {
        parts.push(num(e.get_constant()));
    }
    if parts.len() == 1 {
        parts.pop().expect("one part")
    } else {
        format!("(+ {})", parts.join(" "))
    }
}

fn num(c: i64) -> String {
    if c < 0 {
        format!("(- {})", c.unsigned_abs())
    } else {
        c.to_string()
    }
}

fn literal(l: &Literal) -> String {
    let (lhs, op, rhs) = l.sides();
    let (lhs, rhs) = (term(&lhs), term(&rhs));
    match op {
        "<=" => format!("(<= {} {})", lhs, rhs),
        "==" => format!("(= {} {})", lhs, rhs),
        _ => format!("(not (= {} {}))", lhs, rhs),
    }
}

fn conjunction(c: &Conjunction) -> String {
    match c {
        Conjunction::Bottom => "false".to_string(),
        _ if c.is_top() => "true".to_string(),
        _ if c.literal_count() == 1 => literal(c.literals().next().expect("one literal")),
        _ => {
            let lits: Vec<String> = c.literals().map(literal).collect();
            format!("(and {})", lits.join(" "))
        }
    }
}

pub fn serialize(mc: &MappedConstraint) -> String {
    let sig = &mc.signature;
    let mut s = String::new();
    let _ = writeln!(s, "; statement: {}", sig.statement);
    let side = if sig.side.is_empty() { String::new() } else { format!(" (side {})", sig.side.join(" ")) };
    let _ = writeln!(s, "(set-info :signature ((x {}) (y {}) (z {}@1){}))", sig.lhs, sig.rhs, sig.target, side);
    for (i, p) in mc.pairs.iter().enumerate() {
        let _ = writeln!(s, "(define-fun Q_{} () Bool {})", 2 * i + 1, conjunction(&p.pre));
        let _ = writeln!(s, "(define-fun Q_{} () Bool {})", 2 * i + 2, conjunction(&p.post));
    }
    s
}

pub fn write_file(mc: &MappedConstraint, path: &Path) -> std::io::Result<()> {
    std::fs::write(path, serialize(mc))
}

pub fn parse_file(path: &Path) -> Result<MappedConstraint, ToleranceError> {
    let text = std::fs::read_to_string(path).map_err(|e| ToleranceError::Parse {
        line: 0,
        col: 0,
        msg: format!("{}: {}", path.display(), e),
    })?;
    parse(&text)
}

#[derive(Clone, Debug, PartialEq)]
enum Sexp {
    Atom(String, usize, usize),
    List(Vec<Sexp>, usize, usize),
}

impl Sexp {
    fn pos(&self) -> (usize, usize) {
        match self {
            Sexp::Atom(_, l, c) | Sexp::List(_, l, c) => (*l, *c),
        }
    }

    fn err(&self, msg: impl Into<String>) -> ToleranceError {
        let (line, col) = self.pos();
        ToleranceError::Parse { line, col, msg: msg.into() }
    }

    fn atom(&self) -> Option<&str> {
        match self {
            Sexp::Atom(a, ..) => Some(a),
            _ => None,
        }
    }
}

fn read_all(text: &str) -> Result<Vec<Sexp>, ToleranceError> {
    let mut stack: Vec<(Vec<Sexp>, usize, usize)> = Vec::new();
    let mut top = Vec::new();
    let mut chars = text.chars().peekable();
    let (mut line, mut col) = (1usize, 0usize);
    let mut atom: Option<(String, usize, usize)> = None;
    let flush =
        |atom: &mut Option<(String, usize, usize)>, stack: &mut Vec<(Vec<Sexp>, usize, usize)>, top: &mut Vec<Sexp>| {
            if let Some((a, l, c)) = atom.take() {
                let s = Sexp::Atom(a, l, c);
                match stack.last_mut() {
                    Some(frame) => frame.0.push(s),
                    None => top.push(s),
                }
            }
        };
    while let Some(ch) = chars.next() {
        col += 1;
        match ch {
            ';' => {
                flush(&mut atom, &mut stack, &mut top);
                for c in chars.by_ref() {
                    if c == '\n' {
                        break;
                    }
                }
                line += 1;
                col = 0;
            }
            '(' => {
                flush(&mut atom, &mut stack, &mut top);
                stack.push((Vec::new(), line, col));
            }
            ')' => {
                flush(&mut atom, &mut stack, &mut top);
                let Some((items, l, c)) = stack.pop() else {
                    return Err(ToleranceError::Parse { line, col, msg: "unbalanced `)`".into() });
                };
                let s = Sexp::List(items, l, c);
                match stack.last_mut() {
                    Some(frame) => frame.0.push(s),
                    None => top.push(s),
                }
            }
            c if c.is_whitespace() => {
                flush(&mut atom, &mut stack, &mut top);
                if c == '\n' {
                    line += 1;
                    col = 0;
                }
            }
            c => match &mut atom {
                Some((a, ..)) => a.push(c),
                None => atom = Some((c.to_string(), line, col)),
            },
        }
    }
    flush(&mut atom, &mut stack, &mut top);
    if let Some((_, l, c)) = stack.last() {
        return Err(ToleranceError::Parse { line: *l, col: *c, msg: "unbalanced `(`".into() });
    }
    Ok(top)
}

fn lin(s: &Sexp) -> Result<LinExpr, ToleranceError> {
    match s {
        Sexp::Atom(a, ..) => Ok(match a.parse::<i64>() {
            Ok(n) => LinExpr::constant(n),
            Err(_) => LinExpr::var(a.clone()),
        }),
        Sexp::List(items, ..) => {
            let (head, args) = items.split_first().ok_or_else(|| s.err("empty term"))?;
            let args: Vec<LinExpr> = args.iter().map(lin).collect::<Result<_, _>>()?;
            match (head.atom(), args.as_slice()) {
                (Some("+"), [_, ..]) => Ok(args.iter().skip(1).fold(args[0].clone(), |acc, a| acc.add(a))),
                (Some("-"), [a]) => Ok(a.scale(-1)),
                (Some("-"), [a, rest @ ..]) => Ok(rest.iter().fold(a.clone(), |acc, b| acc.sub(b))),
                (Some("*"), [a, b]) if a.is_constant() => Ok(b.scale(a.get_constant())),
                (Some("*"), [a, b]) if b.is_constant() => Ok(a.scale(b.get_constant())),
                _ => Err(s.err("unsupported term")),
            }
        }
    }
}

fn atoms(s: &Sexp, out: &mut Vec<Folded>) -> Result<(), ToleranceError> {
    match s {
        Sexp::Atom(a, ..) if a == "true" => Ok(()),
        Sexp::Atom(a, ..) if a == "false" => {
            out.push(Folded::Const(false));
            Ok(())
        }
        Sexp::List(items, ..) => {
            let head = items.first().and_then(Sexp::atom).ok_or_else(|| s.err("expected a formula"))?;
            let args = &items[1..];
            if head == "and" {
                return args.iter().try_for_each(|a| atoms(a, out));
            }
            if head == "not" {
                let [inner] = args else { return Err(s.err("`not` takes one argument")) };
                let mut tmp = Vec::new();
                atoms(inner, &mut tmp)?;
                let [one] = tmp.as_slice() else { return Err(s.err("`not` applies to a single atom")) };
                out.push(match one {
                    Folded::Const(b) => Folded::Const(!b),
                    Folded::Atom(a) => Folded::Atom(a.negate()),
                });
                return Ok(());
            }
            let op = match head {
                "<=" => CmpOp::Le,
                "<" => CmpOp::Lt,
                ">=" => CmpOp::Ge,
                ">" => CmpOp::Gt,
                "=" => CmpOp::Eq,
                _ => return Err(s.err(format!("unsupported operator `{}`", head))),
            };
            let [l, r] = args else { return Err(s.err("comparison takes two arguments")) };
            out.push(LinearAtom::build(&lin(l)?, op, &lin(r)?));
            Ok(())
        }
        _ => Err(s.err("expected a formula")),
    }
}

fn operand(s: &Sexp) -> Result<Operand, ToleranceError> {
    let a = s.atom().ok_or_else(|| s.err("expected an operand"))?;
    Ok(match a.parse::<i64>() {
        Ok(n) => Operand::Const(n),
        Err(_) => Operand::Var(a.to_string()),
    })
}

pub fn parse(text: &str) -> Result<MappedConstraint, ToleranceError> {
    let statement = text
        .lines()
        .find_map(|l| l.trim().strip_prefix("; statement:"))
        .map(|s| s.trim().to_string())
        .ok_or(ToleranceError::Parse { line: 1, col: 1, msg: "missing `; statement:` header".into() })?;
    let op = parse_statement(&statement)
        .ok()
        .and_then(|s| match s {
            crate::frontend::Statement::Assign(_, Expr::Bin(op, ..)) => Some(op),
            _ => None,
        })
        .ok_or(ToleranceError::Parse { line: 1, col: 1, msg: "header statement is not `u := v op w`".into() })?;

    let mut sig: Option<Signature> = None;
    let mut defs: Vec<(usize, Conjunction)> = Vec::new();
    for form in read_all(text)? {
        let Sexp::List(items, ..) = &form else { return Err(form.err("expected a command")) };
        match items.first().and_then(Sexp::atom) {
            Some("set-info") => {
                let list = match items.as_slice() {
                    [_, key, Sexp::List(list, ..)] if key.atom() == Some(":signature") => list,
                    _ => return Err(form.err("malformed signature")),
                };
                let (mut lhs, mut rhs, mut target, mut side) = (None, None, None, Vec::new());
                for entry in list {
                    let Sexp::List(kv, ..) = entry else { return Err(entry.err("malformed signature entry")) };
                    let (Some(k), rest) = (kv.first().and_then(Sexp::atom), &kv[1..]) else {
                        return Err(entry.err("malformed signature entry"));
                    };
                    match (k, rest) {
                        ("x", [v]) => lhs = Some(operand(v)?),
                        ("y", [v]) => rhs = Some(operand(v)?),
                        ("z", [v]) => {
                            let t = v.atom().ok_or_else(|| v.err("expected the target"))?;
                            target = Some(t.strip_suffix("@1").unwrap_or(t).to_string());
                        }
                        ("side", vs) => {
                            for v in vs {
                                side.push(v.atom().ok_or_else(|| v.err("expected a variable"))?.to_string());
                            }
                        }
                        _ => return Err(entry.err("unknown signature entry")),
                    }
                }
                match (lhs, rhs, target) {
                    (Some(lhs), Some(rhs), Some(target)) => {
                        sig = Some(Signature { statement: statement.clone(), op, target, lhs, rhs, side })
                    }
                    _ => return Err(form.err("signature needs x, y and z")),
                }
            }
            Some("define-fun") => {
                let (name, body) = match items.as_slice() {
                    [_, name, Sexp::List(params, ..), ty, body] if params.is_empty() && ty.atom() == Some("Bool") => {
                        (name, body)
                    }
                    _ => return Err(form.err("expected `(define-fun Q_k () Bool <formula>)`")),
                };
                let k = name
                    .atom()
                    .and_then(|n| n.strip_prefix("Q_"))
                    .and_then(|n| n.parse::<usize>().ok())
                    .filter(|k| *k >= 1)
                    .ok_or_else(|| name.err("expected a name `Q_k`"))?;
                let mut out = Vec::new();
                atoms(body, &mut out)?;
                defs.push((k, Conjunction::from_folded(out)));
            }
            _ => return Err(form.err("unknown command")),
        }
    }
    let signature = sig.ok_or(ToleranceError::Parse { line: 0, col: 0, msg: "missing signature".into() })?;
    defs.sort_by_key(|(k, _)| *k);
    if defs.is_empty() || !defs.len().is_multiple_of(2) || defs.iter().enumerate().any(|(i, (k, _))| *k != i + 1) {
        return Err(ToleranceError::Parse { line: 0, col: 0, msg: "definitions must be Q_1 … Q_2n".into() });
    }
    let pairs = defs.chunks(2).map(|c| MappedPair { pre: c[0].1.clone(), post: c[1].1.clone() }).collect();
    Ok(MappedConstraint { signature, pairs })
}
