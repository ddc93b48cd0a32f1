use std::path::{Path, PathBuf};
use std::process::ExitCode;

use actol::adders::{preset, presets, AdderModel};
use actol::checkers::{
    bitblast, check_constraint, emit_checker_hdl, export_dimacs, report_line, side_ranges, CheckOptions, Engine,
    Verdict,
};
use actol::frontend::BinOp;
use actol::pipeline::{analyze, corpus_report, instrumented, load_corpus, Analysis, PipelineError, Sources};
use actol::tolerance::{parse_file, write_file, MappedConstraint};
use clap::{Parser, Subcommand, ValueEnum};

const OK: u8 = 0;
const FAIL: u8 = 1;
const UNKNOWN: u8 = 2;
const USAGE: u8 = 64;
const PARSE: u8 = 65;

/// Derive tolerance constraints for approximate operators from a
/// predicate-abstraction proof and check adder designs against them.
#[derive(Parser, Debug)]
#[command(name = "actol", version)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum EngineArg {
    Auto,
    Exhaustive,
    Sat,
}

impl From<EngineArg> for Engine {
    fn from(e: EngineArg) -> Engine {
        match e {
            EngineArg::Auto => Engine::Auto,
            EngineArg::Exhaustive => Engine::Exhaustive,
            EngineArg::Sat => Engine::Sat,
        }
    }
}

#[derive(clap::Args, Debug)]
struct ProgramArgs {
    /// Program source.
    program: PathBuf,
    /// One predicate per line.
    #[arg(long)]
    predicates: PathBuf,
    /// Ranking functions, `at <line|loopK> rank <expr>` per line.
    #[arg(long)]
    ranking: Option<PathBuf>,
    /// Operator treated as approximate.
    #[arg(long, default_value = "+")]
    op: String,
}

#[derive(clap::Args, Debug)]
struct CheckArgs {
    /// Adder presets; all of them if omitted.
    #[arg(long = "adder", value_delimiter = ',')]
    adders: Vec<String>,
    /// Operand width of the adders.
    #[arg(long, default_value_t = 16)]
    width: u32,
    #[arg(long, value_enum, default_value_t = EngineArg::Auto)]
    engine: EngineArg,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Build the abstract transition system and report whether errors are unreachable.
    Verify {
        #[command(flatten)]
        prog: ProgramArgs,
        /// Write the abstract transition system in DOT format.
        #[arg(long)]
        dot: Option<PathBuf>,
    },
    /// Write one `*.tc.smt2` file per operator statement of a verified program.
    Extract {
        #[command(flatten)]
        prog: ProgramArgs,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Print the automaton after termination instrumentation.
    Instrument {
        program: PathBuf,
        #[arg(long)]
        ranking: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check constraint files against adder presets.
    Check {
        /// Constraint files, or directories holding `*.tc.smt2` files.
        #[arg(required = true)]
        constraints: Vec<PathBuf>,
        #[command(flatten)]
        check: CheckArgs,
        /// Write verdicts as JSON lines.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Directory for adherence-checker Verilog, one file per pair.
        #[arg(long)]
        emit_verilog: Option<PathBuf>,
        /// Directory for the DIMACS encoding, one file per pair.
        #[arg(long)]
        emit_dimacs: Option<PathBuf>,
    },
    /// Verify, extract and check every program of a corpus directory.
    Report {
        corpus: PathBuf,
        #[command(flatten)]
        check: CheckArgs,
        #[arg(long, default_value = "+")]
        op: String,
    },
    /// Evaluate an adder preset on one operand pair.
    AdderEval {
        #[arg(long)]
        adder: String,
        #[arg(long, default_value_t = 16)]
        width: u32,
        x: u64,
        y: u64,
    },
}

/// Failure with its exit code.
struct Exit(u8, String);

impl Exit {
    fn usage(msg: impl Into<String>) -> Exit {
        Exit(USAGE, msg.into())
    }
}

impl From<PipelineError> for Exit {
    fn from(e: PipelineError) -> Exit {
        Exit(if e.is_parse_error() { PARSE } else { USAGE }, e.to_string())
    }
}

fn op_of(s: &str) -> Result<BinOp, Exit> {
    BinOp::from_symbol(s).ok_or_else(|| Exit::usage(format!("unknown operator `{}`", s)))
}

fn width_ok(w: u32) -> Result<u32, Exit> {
    if (4..=32).contains(&w) {
        Ok(w)
    } else {
        Err(Exit::usage(format!("width {} outside 4..=32", w)))
    }
}

fn adders_of(names: &[String], width: u32) -> Result<Vec<AdderModel>, Exit> {
    let ms = if names.is_empty() {
        presets()
    } else {
        names.iter().map(|n| preset(n)).collect::<Result<_, _>>().map_err(|e| Exit::usage(e.to_string()))?
    };
    ms.iter().map(|m| m.with_width(width).map_err(|e| Exit::usage(format!("{}: {}", m.name, e)))).collect()
}

fn run_program(p: &ProgramArgs) -> Result<Analysis, Exit> {
    let op = op_of(&p.op)?;
    for f in std::iter::once(&p.program).chain(Some(&p.predicates)).chain(p.ranking.as_ref()) {
        if !f.is_file() {
            return Err(Exit::usage(format!("{}: no such file", f.display())));
        }
    }
    let src = Sources::load(&p.program, &p.predicates, p.ranking.as_deref())?;
    Ok(analyze(&src, op)?)
}

fn io(path: &Path) -> impl Fn(std::io::Error) -> Exit + '_ {
    move |e| Exit::usage(format!("{}: {}", path.display(), e))
}

fn verify(prog: &ProgramArgs, dot: Option<&Path>) -> Result<u8, Exit> {
    let a = run_program(prog)?;
    if let Some(path) = dot {
        std::fs::write(path, a.ats.to_dot()).map_err(io(path))?;
    }
    println!(
        "{} locations, {} edges, {} reachable abstract states",
        a.cfa.num_locations,
        a.stm_count(),
        a.ats.states.len()
    );
    if a.safe {
        println!("SAFE");
        Ok(OK)
    } else {
        println!(
            "UNSAFE-ABSTRACT (an error location is reachable in the abstraction; the predicates may be too coarse)"
        );
        Ok(FAIL)
    }
}

fn extract_cmd(prog: &ProgramArgs, out: &Path) -> Result<u8, Exit> {
    let a = run_program(prog)?;
    if !a.safe {
        eprintln!("error: the program is not verified SAFE with these predicates; nothing to extract");
        return Ok(FAIL);
    }
    let mapped = a.mapped().map_err(|e| Exit(PARSE, e.to_string()))?;
    std::fs::create_dir_all(out).map_err(io(out))?;
    let stem = prog.program.file_stem().and_then(|s| s.to_str()).unwrap_or("program");
    for (i, mc) in mapped.iter().enumerate() {
        let path = out.join(format!("{}.{}.tc.smt2", stem, i + 1));
        write_file(mc, &path).map_err(io(&path))?;
        println!("{}: {}", path.display(), mc.signature.statement);
    }
    if mapped.is_empty() {
        log::warn!("no statement applies `{}`", prog.op);
        eprintln!("warning: no constraints extracted");
    }
    println!("{} constraint(s)", mapped.len());
    Ok(OK)
}

fn constraint_files(paths: &[PathBuf]) -> Result<Vec<PathBuf>, Exit> {
    let mut out = Vec::new();
    for p in paths {
        if p.is_dir() {
            let mut found: Vec<PathBuf> = std::fs::read_dir(p)
                .map_err(io(p))?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|f| f.to_str().is_some_and(|s| s.ends_with(".tc.smt2")))
                .collect();
            found.sort();
            out.extend(found);
        } else if p.is_file() {
            out.push(p.clone());
        } else {
            return Err(Exit::usage(format!("{}: no such file", p.display())));
        }
    }
    Ok(out)
}

fn label(path: &Path) -> String {
    path.file_name().and_then(|s| s.to_str()).unwrap_or_default().trim_end_matches(".tc.smt2").to_string()
}

fn check(
    files: &[PathBuf],
    args: &CheckArgs,
    out: Option<&Path>,
    verilog: Option<&Path>,
    dimacs: Option<&Path>,
) -> Result<u8, Exit> {
    let width = width_ok(args.width)?;
    let adders = adders_of(&args.adders, width)?;
    let files = constraint_files(files)?;
    let mut constraints: Vec<(String, MappedConstraint)> = Vec::new();
    for f in &files {
        let mc = parse_file(f).map_err(|e| Exit(PARSE, format!("{}: {}", f.display(), e)))?;
        constraints.push((label(f), mc));
    }
    for d in [verilog, dimacs].into_iter().flatten() {
        std::fs::create_dir_all(d).map_err(io(d))?;
    }
    let engine: Engine = args.engine.into();
    let opts = CheckOptions::default();
    let mut lines = Vec::new();
    let (mut violated, mut unknown) = (false, false);
    for (name, mc) in &constraints {
        for m in &adders {
            let v = check_constraint(m, mc, engine, &opts).map_err(|e| Exit(FAIL, e.to_string()))?;
            violated |= v.is_violated();
            unknown |= matches!(v, Verdict::Unknown { .. });
            println!("{}  {}  {}", name, m.name, v);
            lines.push(report_line(name, &m.name, engine, &v));
            if let Some(d) = verilog {
                let path = d.join(format!("{}__{}.v", name, m.name));
                emit_checker_hdl(m, mc, &side_ranges(mc, width, &opts), &path).map_err(io(&path))?;
            }
            if let Some(d) = dimacs {
                let path = d.join(format!("{}__{}.cnf", name, m.name));
                let f = bitblast(m, mc, &opts).map_err(|e| Exit(FAIL, e.to_string()))?;
                export_dimacs(&f, &path).map_err(io(&path))?;
            }
        }
    }
    if let Some(path) = out {
        let mut text = lines.join("\n");
        text.push('\n');
        std::fs::write(path, text).map_err(io(path))?;
    }
    Ok(if violated {
        FAIL
    } else if unknown {
        UNKNOWN
    } else {
        OK
    })
}

fn report(dir: &Path, args: &CheckArgs, op: &str) -> Result<u8, Exit> {
    let op = op_of(op)?;
    let width = width_ok(args.width)?;
    let adders = adders_of(&args.adders, width)?;
    if !dir.is_dir() {
        return Err(Exit::usage(format!("{}: not a directory", dir.display())));
    }
    let corpus = load_corpus(dir)?;
    let r = corpus_report(&corpus, &adders, op, args.engine.into(), width, &CheckOptions::default());
    print!("{}", r.render());
    for row in &r.rows {
        if let Err(e) = &row.outcome {
            eprintln!("{}: {}", row.program, e);
        }
    }
    Ok(if r.has_failures() { FAIL } else { OK })
}

fn run(cli: Cli) -> Result<u8, Exit> {
    match cli.cmd {
        Cmd::Verify { prog, dot } => verify(&prog, dot.as_deref()),
        Cmd::Extract { prog, out } => extract_cmd(&prog, &out),
        Cmd::Instrument { program, ranking, out } => {
            for f in [&program, &ranking] {
                if !f.is_file() {
                    return Err(Exit::usage(format!("{}: no such file", f.display())));
                }
            }
            let src = Sources::load(&program, &program, Some(&ranking))?;
            let cfa = instrumented(&src)?;
            match out {
                Some(path) => std::fs::write(&path, cfa.to_text()).map_err(io(&path))?,
                None => print!("{}", cfa.to_text()),
            }
            Ok(OK)
        }
        Cmd::Check { constraints, check: args, out, emit_verilog, emit_dimacs } => {
            check(&constraints, &args, out.as_deref(), emit_verilog.as_deref(), emit_dimacs.as_deref())
        }
        Cmd::Report { corpus, check, op } => report(&corpus, &check, &op),
        Cmd::AdderEval { adder, width, x, y } => {
            let m = adders_of(&[adder], width_ok(width)?)?.remove(0);
            let z = m.evaluate(x, y).map_err(|e| Exit::usage(e.to_string()))?;
            println!("{}", z);
            if z != x + y {
                eprintln!("differs from exact sum {}", x + y);
            }
            Ok(OK)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { USAGE } else { OK };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(Exit(code, msg)) => {
            eprintln!("error: {}", msg);
            ExitCode::from(code)
        }
    }
}
