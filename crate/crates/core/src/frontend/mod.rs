//! The mini imperative language: parsing, control-flow automata,
//! three-address normalization, loop detection and termination
//! instrumentation.

pub mod ast;
mod cfa;
mod instrument;
mod lexer;
mod loops;
mod normalize;
mod parser;

use thiserror::Error;

pub use ast::{comparison_atom, BExpr, BinOp, Expr, Statement, ThreeAddress};
pub use cfa::{parse_program, Cfa, Edge, Loc};
pub use instrument::instrument_termination;
pub use loops::{detect_loop_starts, natural_loops, NaturalLoop};
pub use normalize::normalize_3ac;
pub use parser::{
    parse_bexpr, parse_expr, parse_predicates, parse_ranking, parse_source, parse_statement, Decl, LoopRef, Program,
    RankingEntry, Stmt,
};

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum FrontendError {
    #[error("{line}:{col}: {msg}")]
    Parse { line: usize, col: usize, msg: String },
    #[error("line {line}: variable `{name}` declared twice")]
    Duplicate { name: String, line: usize },
    #[error("line {line}: use of undeclared variable `{name}`")]
    Undeclared { name: String, line: usize },
    #[error("line {line}: `{name}` is an array and cannot be used as a scalar")]
    NotScalar { name: String, line: usize },
    #[error("irreducible or unstructured control flow at location {0}")]
    Unsupported(usize),
    #[error("ranking entry `{0}` does not name a loop start")]
    NotALoop(String),
    #[error("ranking expression `{0}` is not linear")]
    NonLinearRank(String),
}

impl FrontendError {
    /// Rebases a parse error from a single-line sub-parse onto a file line.
    pub(crate) fn at_line(self, line: usize) -> FrontendError {
        match self {
            FrontendError::Parse { col, msg, .. } => FrontendError::Parse { line, col, msg },
            e => e,
        }
    }
}
