//! Parse, optionally instrument for termination, normalise, build the
//! abstract transition system and extract mapped constraints. Also loads
//! a corpus directory of `*.acp` programs with `.preds` and `.rank`
//! sidecars.

use std::path::{Path, PathBuf};

use rayon::prelude::*;
use thiserror::Error;

use crate::abstraction::{build_ats, is_error_free, Ats, PredicateError, PredicateSet};
use crate::adders::AdderModel;
use crate::checkers::{check_adherence, CheckOptions, Engine, Verdict};
use crate::frontend::{
    instrument_termination, normalize_3ac, parse_predicates, parse_program, parse_ranking, BinOp, Cfa, FrontendError,
};
use crate::tolerance::{extract, map_to_signature, MappedConstraint, ToleranceConstraint, ToleranceError};

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("program: {0}")]
    Program(FrontendError),
    #[error("predicates: {0}")]
    PredicateSyntax(FrontendError),
    #[error("predicates: {0}")]
    Predicate(#[from] PredicateError),
    #[error("ranking: {0}")]
    Ranking(FrontendError),
    #[error(transparent)]
    Tolerance(#[from] ToleranceError),
}

impl PipelineError {
    /// Whether the error comes from malformed input text rather than I/O.
    pub fn is_parse_error(&self) -> bool {
        !matches!(self, PipelineError::Io { .. })
    }
}

pub(crate) fn read(path: &Path) -> Result<String, PipelineError> {
    std::fs::read_to_string(path).map_err(|source| PipelineError::Io { path: path.to_path_buf(), source })
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Sources {
    pub program: String,
    pub predicates: String,
    pub ranking: Option<String>,
}

impl Sources {
    pub fn load(program: &Path, predicates: &Path, ranking: Option<&Path>) -> Result<Sources, PipelineError> {
        Ok(Sources { program: read(program)?, predicates: read(predicates)?, ranking: ranking.map(read).transpose()? })
    }
}

#[derive(Clone, Debug)]
pub struct Analysis {
    /// The program as parsed, before instrumentation.
    pub source_cfa: Cfa,
    /// Instrumented and in three-address form; what the abstraction ran on.
    pub cfa: Cfa,
    pub predicates: PredicateSet,
    pub ats: Ats,
    pub safe: bool,
    pub constraints: Vec<ToleranceConstraint>,
}

impl Analysis {
    /// `#+`: applications of the operator in the source program.
    pub fn op_count(&self, op: BinOp) -> usize {
        self.source_cfa.count_op(op)
    }

    /// `#stm`: edges of the analysed automaton.
    pub fn stm_count(&self) -> usize {
        self.cfa.edges.len()
    }

    pub fn mapped(&self) -> Result<Vec<MappedConstraint>, ToleranceError> {
        self.constraints.iter().map(map_to_signature).collect()
    }
}

pub fn instrumented(src: &Sources) -> Result<Cfa, PipelineError> {
    let cfa = parse_program(&src.program).map_err(PipelineError::Program)?;
    match &src.ranking {
        Some(r) => {
            let specs = parse_ranking(r).map_err(PipelineError::Ranking)?;
            instrument_termination(&cfa, &specs).map_err(PipelineError::Ranking)
        }
        None => Ok(cfa),
    }
}

pub fn analyze(src: &Sources, op: BinOp) -> Result<Analysis, PipelineError> {
    let source_cfa = parse_program(&src.program).map_err(PipelineError::Program)?;
    let cfa = normalize_3ac(&instrumented(src)?, Some(op));
    let comparisons = parse_predicates(&src.predicates).map_err(PipelineError::PredicateSyntax)?;
    let predicates = PredicateSet::from_comparisons(&comparisons)?;
    predicates.check_vars(&cfa)?;
    let ats = build_ats(&cfa, &predicates);
    let safe = is_error_free(&ats);
    let constraints = extract(&ats, op);
    log::info!(
        "{} locations, {} edges, {} abstract states, {} constraints",
        cfa.num_locations,
        cfa.edges.len(),
        ats.states.len(),
        constraints.len()
    );
    Ok(Analysis { source_cfa, cfa, predicates, ats, safe, constraints })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CorpusEntry {
    pub name: String,
    pub program: PathBuf,
    pub predicates: PathBuf,
    pub ranking: Option<PathBuf>,
}

impl CorpusEntry {
    pub fn sources(&self) -> Result<Sources, PipelineError> {
        Sources::load(&self.program, &self.predicates, self.ranking.as_deref())
    }
}

/// Every `*.acp` in `dir`, sorted by name. The `.preds` sidecar is
/// expected next to each program; `.rank` is optional.
pub fn load_corpus(dir: &Path) -> Result<Vec<CorpusEntry>, PipelineError> {
    let io = |source| PipelineError::Io { path: dir.to_path_buf(), source };
    let mut out = Vec::new();
    for entry in std::fs::read_dir(dir).map_err(io)? {
        let path = entry.map_err(io)?.path();
        if path.extension().and_then(|e| e.to_str()) != Some("acp") {
            continue;
        }
        let name = path.file_stem().and_then(|s| s.to_str()).unwrap_or_default().to_string();
        let rank = path.with_extension("rank");
        out.push(CorpusEntry {
            name,
            predicates: path.with_extension("preds"),
            ranking: rank.exists().then_some(rank),
            program: path,
        });
    }
    out.sort_by(|a, b| a.name.cmp(&b.name));
    Ok(out)
}

/// One row of the experiment matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReportRow {
    pub program: String,
    pub outcome: Result<RowData, String>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RowData {
    pub op_count: usize,
    pub stm_count: usize,
    pub tc_count: usize,
    /// One verdict per preset, in column order.
    pub verdicts: Vec<Verdict>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Report {
    pub presets: Vec<String>,
    pub rows: Vec<ReportRow>,
}

impl Report {
    pub fn has_failures(&self) -> bool {
        self.rows.iter().any(|r| r.outcome.is_err())
    }

    /// Plain-text table: program, `#+`, `#stm`, `#tc`, then one column per
    /// preset with ✓, × or `?`. Failed rows are dashed.
    pub fn render(&self) -> String {
        let name_w = self.rows.iter().map(|r| r.program.len()).max().unwrap_or(0).max(7);
        let mut s = format!("{:<w$}  {:>3}  {:>4}  {:>3}", "program", "#+", "#stm", "#tc", w = name_w);
        for p in &self.presets {
            s.push_str(&format!("  {}", p));
        }
        s.push('\n');
        for r in &self.rows {
            match &r.outcome {
                Ok(d) => {
                    s.push_str(&format!(
                        "{:<w$}  {:>3}  {:>4}  {:>3}",
                        r.program,
                        d.op_count,
                        d.stm_count,
                        d.tc_count,
                        w = name_w
                    ));
                    for (p, v) in self.presets.iter().zip(&d.verdicts) {
                        let mark = match v {
                            Verdict::Holds => "✓",
                            Verdict::Violated { .. } => "×",
                            Verdict::Unknown { .. } => "?",
                        };
                        s.push_str(&format!("  {:^w$}", mark, w = p.chars().count()));
                    }
                }
                Err(_) => {
                    s.push_str(&format!("{:<w$}  {:>3}  {:>4}  {:>3}", r.program, "-", "-", "-", w = name_w));
                    for p in &self.presets {
                        s.push_str(&format!("  {:^w$}", "-", w = p.chars().count()));
                    }
                }
            }
            s.push('\n');
        }
        s
    }
}

fn analyze_row(e: &CorpusEntry, op: BinOp) -> Result<(Analysis, Vec<MappedConstraint>), String> {
    let a = analyze(&e.sources().map_err(|x| x.to_string())?, op).map_err(|x| x.to_string())?;
    if !a.safe {
        return Err("abstract error reachable".into());
    }
    let mapped = a.mapped().map_err(|x| x.to_string())?;
    Ok((a, mapped))
}

/// Verify, extract and check every corpus program against every preset.
/// Jobs run in parallel; rows keep the corpus order.
pub fn corpus_report(
    corpus: &[CorpusEntry],
    adders: &[AdderModel],
    op: BinOp,
    engine: Engine,
    width: u32,
    opts: &CheckOptions,
) -> Report {
    let analysed: Vec<_> = corpus.par_iter().map(|e| analyze_row(e, op)).collect();
    let jobs: Vec<(usize, usize)> = analysed
        .iter()
        .enumerate()
        .filter(|(_, r)| r.is_ok())
        .flat_map(|(i, _)| (0..adders.len()).map(move |j| (i, j)))
        .collect();
    let verdicts: Vec<((usize, usize), Result<Verdict, String>)> = jobs
        .par_iter()
        .map(|&(i, j)| {
            let (_, mapped) = analysed[i].as_ref().expect("analysed");
            let v = if mapped.is_empty() {
                Ok(Verdict::Holds)
            } else {
                check_adherence(&adders[j], mapped, engine, width, opts).map_err(|e| e.to_string())
            };
            ((i, j), v)
        })
        .collect();
    let mut rows = Vec::new();
    for (i, (e, r)) in corpus.iter().zip(analysed).enumerate() {
        let outcome = r.and_then(|(a, mapped)| {
            let mut vs = Vec::new();
            for ((ri, _), v) in verdicts.iter().filter(|((ri, _), _)| *ri == i) {
                debug_assert_eq!(*ri, i);
                vs.push(v.clone()?);
            }
            Ok(RowData { op_count: a.op_count(op), stm_count: a.stm_count(), tc_count: mapped.len(), verdicts: vs })
        });
        rows.push(ReportRow { program: e.name.clone(), outcome });
    }
    Report { presets: adders.iter().map(|m| m.name.clone()).collect(), rows }
}
