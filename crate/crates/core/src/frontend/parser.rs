use std::collections::BTreeMap;

use super::ast::{BExpr, BinOp, Expr, Statement};
use super::lexer::{tokenize, Tok, Token};
use super::FrontendError;
use crate::logic::CmpOp;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Decl {
    pub name: String,
    pub array_len: Option<i64>,
    pub line: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Stmt {
    Assign { target: String, expr: Expr, line: usize },
    ArrayWrite { array: String, index: Expr, value: Expr, line: usize },
    If { cond: BExpr, then: Vec<Stmt>, otherwise: Option<Vec<Stmt>>, line: usize },
    While { cond: BExpr, body: Vec<Stmt>, line: usize },
    Err { line: usize },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Program {
    pub decls: Vec<Decl>,
    pub body: Vec<Stmt>,
}

pub(crate) struct Parser {
    toks: Vec<Token>,
    pos: usize,
}

impl Parser {
    pub(crate) fn new(src: &str) -> Result<Parser, FrontendError> {
        Ok(Parser { toks: tokenize(src)?, pos: 0 })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek_at(&self, k: usize) -> &Tok {
        let i = (self.pos + k).min(self.toks.len() - 1);
        &self.toks[i].tok
    }

    fn line(&self) -> usize {
        self.toks[self.pos].line
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error(&self, msg: impl Into<String>) -> FrontendError {
        let t = &self.toks[self.pos];
        FrontendError::Parse { line: t.line, col: t.col, msg: msg.into() }
    }

    fn unexpected(&self, wanted: &str) -> FrontendError {
        self.error(format!("expected {}, found {}", wanted, self.peek().describe()))
    }

    fn expect(&mut self, t: Tok, wanted: &str) -> Result<(), FrontendError> {
        if *self.peek() == t {
            self.bump();
            Ok(())
        } else {
            Err(self.unexpected(wanted))
        }
    }

    fn is_keyword(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == kw)
    }

    fn ident(&mut self) -> Result<String, FrontendError> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                self.bump();
                Ok(s)
            }
            _ => Err(self.unexpected("identifier")),
        }
    }

    pub(crate) fn at_end(&self) -> bool {
        *self.peek() == Tok::Eof
    }

    pub(crate) fn expect_end(&self) -> Result<(), FrontendError> {
        if self.at_end() {
            Ok(())
        } else {
            Err(self.unexpected("end of input"))
        }
    }

    pub(crate) fn program(&mut self) -> Result<Program, FrontendError> {
        let mut decls = Vec::new();
        while self.is_keyword("int") {
            let line = self.line();
            self.bump();
            let name = self.ident()?;
            let mut array_len = None;
            if *self.peek() == Tok::LBracket {
                self.bump();
                match self.bump() {
                    Tok::Int(n) => array_len = Some(n),
                    _ => {
                        self.pos -= 1;
                        return Err(self.unexpected("array length"));
                    }
                }
                self.expect(Tok::RBracket, "`]`")?;
            }
            self.expect(Tok::Semi, "`;`")?;
            decls.push(Decl { name, array_len, line });
        }
        let mut body = Vec::new();
        while !self.at_end() {
            body.push(self.stmt()?);
        }
        Ok(Program { decls, body })
    }

    fn block(&mut self) -> Result<Vec<Stmt>, FrontendError> {
        self.expect(Tok::LBrace, "`{`")?;
        let mut out = Vec::new();
        while *self.peek() != Tok::RBrace {
            if self.at_end() {
                return Err(self.unexpected("`}`"));
            }
            out.push(self.stmt()?);
        }
        self.bump();
        Ok(out)
    }

    fn stmt(&mut self) -> Result<Stmt, FrontendError> {
        let line = self.line();
        if self.is_keyword("if") {
            self.bump();
            self.expect(Tok::LParen, "`(`")?;
            let cond = self.bexpr()?;
            self.expect(Tok::RParen, "`)`")?;
            let then = self.block()?;
            let otherwise = if self.is_keyword("else") {
                self.bump();
                if self.is_keyword("if") {
                    Some(vec![self.stmt()?])
                } else {
                    Some(self.block()?)
                }
            } else {
                None
            };
            return Ok(Stmt::If { cond, then, otherwise, line });
        }
        if self.is_keyword("while") {
            self.bump();
            self.expect(Tok::LParen, "`(`")?;
            let cond = self.bexpr()?;
            self.expect(Tok::RParen, "`)`")?;
            let body = self.block()?;
            return Ok(Stmt::While { cond, body, line });
        }
        if self.is_keyword("ERR") && *self.peek_at(1) == Tok::Colon {
            self.bump();
            self.bump();
            self.expect(Tok::Semi, "`;`")?;
            return Ok(Stmt::Err { line });
        }
        if self.is_keyword("int") {
            return Err(self.error("declarations must precede statements"));
        }
        let target = self.ident()?;
        if *self.peek() == Tok::LBracket {
            self.bump();
            let index = self.expr()?;
            self.expect(Tok::RBracket, "`]`")?;
            self.expect(Tok::Assign, "`:=`")?;
            let value = self.expr()?;
            self.expect(Tok::Semi, "`;`")?;
            return Ok(Stmt::ArrayWrite { array: target, index, value, line });
        }
        self.expect(Tok::Assign, "`:=`")?;
        let start = self.pos;
        let expr = self.expr()?;
        if expr != Expr::Input && contains_input(&expr) {
            self.pos = start;
            return Err(self.error("`input()` must be the whole right-hand side"));
        }
        self.expect(Tok::Semi, "`;`")?;
        Ok(Stmt::Assign { target, expr, line })
    }

    pub(crate) fn expr(&mut self) -> Result<Expr, FrontendError> {
        let mut left = self.term()?;
        loop {
            let op = match self.peek() {
                Tok::Plus => BinOp::Add,
                Tok::Minus => BinOp::Sub,
                _ => return Ok(left),
            };
            self.bump();
            let right = self.term()?;
            left = Expr::bin(op, left, right);
        }
    }

    fn term(&mut self) -> Result<Expr, FrontendError> {
        let mut left = self.unary()?;
        loop {
            let op = match self.peek() {
                Tok::Star => BinOp::Mul,
                Tok::Slash => BinOp::Div,
                _ => return Ok(left),
            };
            self.bump();
            let right = self.unary()?;
            left = Expr::bin(op, left, right);
        }
    }

    fn unary(&mut self) -> Result<Expr, FrontendError> {
        if *self.peek() == Tok::Minus {
            self.bump();
            if let Tok::Int(n) = *self.peek() {
                self.bump();
                return Ok(Expr::Const(-n));
            }
            let inner = self.unary()?;
            return Ok(Expr::bin(BinOp::Sub, Expr::Const(0), inner));
        }
        self.primary()
    }

    fn primary(&mut self) -> Result<Expr, FrontendError> {
        match self.peek().clone() {
            Tok::Int(n) => {
                self.bump();
                Ok(Expr::Const(n))
            }
            Tok::Ident(s) => {
                if s == "input" && *self.peek_at(1) == Tok::LParen {
                    self.bump();
                    self.bump();
                    self.expect(Tok::RParen, "`)`")?;
                    return Ok(Expr::Input);
                }
                if *self.peek_at(1) == Tok::LBracket {
                    return Err(self.error(format!("array read `{}[...]` is not supported", s)));
                }
                self.bump();
                Ok(Expr::Var(s))
            }
            Tok::LParen => {
                self.bump();
                let e = self.expr()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(e)
            }
            _ => Err(self.unexpected("expression")),
        }
    }

    pub(crate) fn bexpr(&mut self) -> Result<BExpr, FrontendError> {
        let mut left = self.conj()?;
        while *self.peek() == Tok::OrOr {
            self.bump();
            let right = self.conj()?;
            left = BExpr::Or(Box::new(left), Box::new(right));
        }
        Ok(left)
    }

    fn conj(&mut self) -> Result<BExpr, FrontendError> {
        let mut left = self.batom()?;
        while *self.peek() == Tok::AndAnd {
            self.bump();
            let right = self.batom()?;
            left = BExpr::And(Box::new(left), Box::new(right));
        }
        Ok(left)
    }

    fn batom(&mut self) -> Result<BExpr, FrontendError> {
        if *self.peek() == Tok::Bang {
            self.bump();
            return Ok(BExpr::negation(self.batom()?));
        }
        if self.is_keyword("true") {
            self.bump();
            return Ok(BExpr::Const(true));
        }
        if self.is_keyword("false") {
            self.bump();
            return Ok(BExpr::Const(false));
        }
        if *self.peek() == Tok::LParen {
            // Either a parenthesised boolean or the start of an arithmetic side.
            let save = self.pos;
            self.bump();
            if let Ok(b) = self.bexpr() {
                if *self.peek() == Tok::RParen {
                    self.bump();
                    if !is_cmp(self.peek()) {
                        return Ok(b);
                    }
                }
            }
            self.pos = save;
        }
        let l = self.expr()?;
        let op = match self.peek() {
            Tok::Lt => CmpOp::Lt,
            Tok::Le => CmpOp::Le,
            Tok::Gt => CmpOp::Gt,
            Tok::Ge => CmpOp::Ge,
            Tok::EqEq => CmpOp::Eq,
            Tok::Ne => CmpOp::Ne,
            _ => return Err(self.unexpected("comparison operator")),
        };
        self.bump();
        let r = self.expr()?;
        Ok(BExpr::cmp(l, op, r))
    }

    /// `assume (<bexpr>)`, `skip`, or `v := <expr>`.
    pub(crate) fn statement(&mut self) -> Result<Statement, FrontendError> {
        if self.is_keyword("skip") {
            self.bump();
            return Ok(Statement::Skip);
        }
        if self.is_keyword("assume") {
            self.bump();
            return Ok(Statement::Assume(self.bexpr()?));
        }
        let v = self.ident()?;
        self.expect(Tok::Assign, "`:=`")?;
        Ok(Statement::Assign(v, self.expr()?))
    }
}

fn is_cmp(t: &Tok) -> bool {
    matches!(t, Tok::Lt | Tok::Le | Tok::Gt | Tok::Ge | Tok::EqEq | Tok::Ne)
}

fn contains_input(e: &Expr) -> bool {
    match e {
        Expr::Input => true,
        Expr::Bin(_, l, r) => contains_input(l) || contains_input(r),
        _ => false,
    }
}

pub fn parse_source(src: &str) -> Result<Program, FrontendError> {
    Parser::new(src)?.program()
}

pub fn parse_expr(src: &str) -> Result<Expr, FrontendError> {
    let mut p = Parser::new(src)?;
    let e = p.expr()?;
    p.expect_end()?;
    Ok(e)
}

pub fn parse_bexpr(src: &str) -> Result<BExpr, FrontendError> {
    let mut p = Parser::new(src)?;
    let b = p.bexpr()?;
    p.expect_end()?;
    Ok(b)
}

pub fn parse_statement(src: &str) -> Result<Statement, FrontendError> {
    let mut p = Parser::new(src)?;
    let s = p.statement()?;
    p.expect_end()?;
    Ok(s)
}

/// Loop selector in a ranking file.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum LoopRef {
    /// Source line of the `while`.
    Line(usize),
    /// `loopK`: the K-th loop start in location order, counting from 0.
    Index(usize),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RankingEntry {
    pub at: LoopRef,
    pub rank: Expr,
}

/// One `at <line|loopK> rank <expr>` per non-empty line.
pub fn parse_ranking(src: &str) -> Result<Vec<RankingEntry>, FrontendError> {
    let mut out = Vec::new();
    for (i, raw) in src.lines().enumerate() {
        let line = strip_comment(raw).trim();
        if line.is_empty() {
            continue;
        }
        let bad = |msg: &str| FrontendError::Parse { line: i + 1, col: 1, msg: msg.to_string() };
        let rest = line.strip_prefix("at ").ok_or_else(|| bad("expected `at <loop> rank <expr>`"))?;
        let (label, expr) = rest.split_once(" rank ").ok_or_else(|| bad("expected `rank` after the loop label"))?;
        let label = label.trim();
        let at = if let Some(k) = label.strip_prefix("loop") {
            LoopRef::Index(k.parse().map_err(|_| bad("bad loop index"))?)
        } else {
            LoopRef::Line(label.parse().map_err(|_| bad("loop label must be a line number or loopK"))?)
        };
        let rank = parse_expr(expr).map_err(|e| e.at_line(i + 1))?;
        out.push(RankingEntry { at, rank });
    }
    Ok(out)
}

/// One comparison per non-empty line.
pub fn parse_predicates(src: &str) -> Result<Vec<(Expr, CmpOp, Expr)>, FrontendError> {
    let mut out = Vec::new();
    for (i, raw) in src.lines().enumerate() {
        let line = strip_comment(raw).trim();
        if line.is_empty() {
            continue;
        }
        match parse_bexpr(line).map_err(|e| e.at_line(i + 1))? {
            BExpr::Cmp(l, op, r) => out.push((l, op, r)),
            _ => {
                return Err(FrontendError::Parse {
                    line: i + 1,
                    col: 1,
                    msg: "a predicate must be a single comparison".into(),
                })
            }
        }
    }
    Ok(out)
}

fn strip_comment(s: &str) -> &str {
    let cut = [s.find('#'), s.find("//")].into_iter().flatten().min();
    match cut {
        Some(i) => &s[..i],
        None => s,
    }
}

/// Scalar and array declarations by name.
pub(crate) fn declarations(p: &Program) -> Result<BTreeMap<String, Option<i64>>, FrontendError> {
    let mut out = BTreeMap::new();
    for d in &p.decls {
        if out.insert(d.name.clone(), d.array_len).is_some() {
            return Err(FrontendError::Duplicate { name: d.name.clone(), line: d.line });
        }
    }
    Ok(out)
}
